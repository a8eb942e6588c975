// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failures. Monte Carlo checks use fixed seeds and 3-standard-error gates
// with the standard error taken across seed replicas.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "photongun/commands.hpp"
#include "photongun/emitter.hpp"
#include "photongun/fitting.hpp"
#include "photongun/report.hpp"
#include "photongun/simulator.hpp"
#include "photongun/statistics.hpp"
#include "photongun/timestamp_io.hpp"

using namespace photongun;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

void note(const std::string& text) {
  std::printf("       note: %s\n", text.c_str());
  std::fflush(stdout);
}

struct MeanSe {
  double mean = 0;
  double se = 0;
};

MeanSe mean_se(const std::vector<double>& values) {
  MeanSe out;
  const double n = static_cast<double>(values.size());
  for (double v : values) out.mean += v;
  out.mean /= n;
  double var = 0;
  for (double v : values) var += (v - out.mean) * (v - out.mean);
  if (values.size() > 1) out.se = std::sqrt(var / (n - 1) / n);
  return out;
}

void run_parallel(int n_tasks, const std::function<void(int)>& fn) {
  const int n_threads =
      std::min<int>(std::max(1u, std::thread::hardware_concurrency()), n_tasks);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int task = next.fetch_add(1); task < n_tasks; task = next.fetch_add(1)) fn(task);
  };
  std::vector<std::thread> pool;
  for (int i = 1; i < n_threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
}

// Per-seed noise ratio of a binned run, computed through a binning sink so
// long runs never materialize a record vector.
NoiseReport binned_run(const SimConfig& cfg, double bin_width_s) {
  const std::uint64_t bin_ps = static_cast<std::uint64_t>(std::llround(bin_width_s * 1e12));
  const std::uint64_t duration_ps =
      static_cast<std::uint64_t>(std::llround(cfg.excitation.duration_s * 1e12));
  BinnedTrace trace;
  trace.bin_width_s = bin_width_s;
  trace.counts.assign(static_cast<std::size_t>(duration_ps / bin_ps), 0);
  simulate_stream(cfg, [&](const PhotonRecord& r) {
    const std::uint64_t idx = r.t_ps / bin_ps;
    if (idx < trace.counts.size()) ++trace.counts[static_cast<std::size_t>(idx)];
  });
  return noise_ratio_measured(trace, cfg.excitation.rep_rate_hz);
}

SimConfig base_config(double zeta, double rho, double bg_cps, double duration_s,
                      std::uint64_t seed, bool shelving = false) {
  SimConfig cfg;
  if (!shelving) cfg.emitter.k23 = 0;
  cfg.excitation.pulse_energy_pj = 200;
  cfg.excitation.saturation_energy_pj = 0.05;
  cfg.excitation.rep_rate_hz = 15e3;
  cfg.excitation.duration_s = duration_s;
  cfg.rho_override = rho;
  cfg.chain = DetectionChain{zeta, 1.0, 1.0, 1.0};
  cfg.background.mode = BackgroundModel::Mode::fixed_rate;
  cfg.background.rate_cps = bg_cps;
  cfg.seed = seed;
  return cfg;
}

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

// ---- criterion 1 -----------------------------------------------------------

void criterion_1() {
  const double zeta = 0.68, rho = 0.99;
  const int seeds = 30;
  const double duration = 1e7 / 15e3;  // 1e7 pulses per seed

  std::vector<double> ratios(seeds);
  run_parallel(seeds, [&](int i) {
    ratios[static_cast<std::size_t>(i)] =
        binned_run(base_config(zeta, rho, 0, duration, 1000 + i), 1e-3).ratio;
  });
  const auto [mean, se] = mean_se(ratios);
  const double expected = std::sqrt(1 - zeta * rho);

  const bool anchor_ok = std::abs(expected - 0.5717) < 1e-4;
  const bool mc_ok = std::abs(mean - expected) <= 3 * se;
  report(1, anchor_ok && mc_ok,
         "loss-only noise ratio: measured " + fmt(mean) + " +- " + fmt(se, 3) +
             " vs sqrt(1 - zeta rho) = " + fmt(expected) + " (anchor 0.5717), 30 seeds x 1e7 "
             "pulses");
}

// ---- criterion 2 -----------------------------------------------------------

void criterion_2() {
  const double n_mol = 0.68 * 0.99 * 15000 * 0.001;
  const double model = noise_ratio_from_bins(n_mol, 1.1, 0.68 * 0.99);
  const bool model_ok = std::abs(model - 0.627) <= 0.002;

  const int seeds = 30;
  std::vector<double> ratios(seeds);
  run_parallel(seeds, [&](int i) {
    ratios[static_cast<std::size_t>(i)] =
        binned_run(base_config(0.68, 0.99, 1100, 10.0, 2000 + i, true), 1e-3).ratio;
  });
  const auto [mean, se] = mean_se(ratios);
  const bool mc_ok = std::abs(mean - model) <= 3 * se;
  const bool band_ok = std::abs(model - 0.62) <= 0.03 && std::abs(mean - 0.62) <= 0.03;

  report(2, model_ok && mc_ok && band_ok,
         "strong-drive ratio with background: model " + fmt(model) +
             " (anchor 0.627 +- 0.002), measured " + fmt(mean) + " +- " + fmt(se, 3) +
             ", both inside 0.62 +- 0.03");
}

// ---- criterion 3 -----------------------------------------------------------

void criterion_3() {
  const double db_06 = squeezing_db(0.6);
  const double db_024 = squeezing_db(0.24);
  const bool ok = std::abs(db_06 - 2.22) <= 0.01 && std::abs(db_024 - 6.20) <= 0.01;
  report(3, ok,
         "squeezing anchors: ratio 0.6 -> " + fmt(db_06, 4) + " dB (2.22 +- 0.01), 0.24 -> " +
             fmt(db_024, 4) + " dB (6.20 +- 0.01)");
}

// ---- criterion 4 -----------------------------------------------------------

void criterion_4() {
  // Tune zeta * rho = 0.64 so the loss-only ratio sits at 0.60.
  const double zeta = 0.68, rho = 0.64 / 0.68;
  const int seeds = 20;
  std::vector<double> ratios(seeds);
  run_parallel(seeds, [&](int i) {
    ratios[static_cast<std::size_t>(i)] =
        binned_run(base_config(zeta, rho, 0, 10.0, 3000 + i), 1e-3).ratio;
  });
  const auto [mean, se] = mean_se(ratios);
  const double reduction = 1.0 - mean;
  const bool ok = std::abs(reduction - 0.40) <= 0.02;
  report(4, ok,
         "noise reduction at ratio 0.60: measured ratio " + fmt(mean) + " +- " + fmt(se, 3) +
             " -> reduction " + fmt(100 * reduction, 4) + "% (40% +- 2%)");
}

// ---- criterion 5 -----------------------------------------------------------

void criterion_5() {
  const bool ideal_ok = mandel_q_model(0.0, 1.0, 1.0, 1.0) == -1.0;

  const std::vector<double> zetas{0.1, 0.3, 0.68, 0.9};
  const std::vector<double> rhos{0.1, 0.31, 0.6, 0.99};
  struct Combo {
    double zeta, rho;
  };
  std::vector<Combo> combos;
  for (double z : zetas) {
    for (double r : rhos) combos.push_back({z, r});
  }

  const int seeds = 6;
  const double duration = 1.5e6 / 15e3;
  std::vector<std::vector<double>> q(combos.size(), std::vector<double>(seeds));
  std::vector<std::vector<double>> ratio(combos.size(), std::vector<double>(seeds));
  run_parallel(static_cast<int>(combos.size()) * seeds, [&](int task) {
    const int c = task / seeds;
    const int s = task % seeds;
    const auto& combo = combos[static_cast<std::size_t>(c)];
    const NoiseReport noise =
        binned_run(base_config(combo.zeta, combo.rho, 0, duration, 4000 + task), 1e-3);
    q[static_cast<std::size_t>(c)][static_cast<std::size_t>(s)] = noise.mandel_q;
    ratio[static_cast<std::size_t>(c)][static_cast<std::size_t>(s)] = noise.ratio;
  });

  bool grid_ok = true;
  double worst_pull = 0;
  for (std::size_t c = 0; c < combos.size(); ++c) {
    const double zr = combos[c].zeta * combos[c].rho;
    const auto [q_mean, q_se] = mean_se(q[c]);
    const double q_pull = q_se > 0 ? std::abs(q_mean + zr) / q_se : 0;
    const auto [r_mean, r_se] = mean_se(ratio[c]);
    const double r_pull = r_se > 0 ? std::abs(r_mean - std::sqrt(1 - zr)) / r_se : 0;
    worst_pull = std::max({worst_pull, q_pull, r_pull});
    if (q_pull > 3 || r_pull > 3) grid_ok = false;
  }

  report(5, ideal_ok && grid_ok,
         "Mandel Q: ideal source formula gives -1 exactly; trace Q matches -zeta*rho and the "
         "ratio matches sqrt(1 - zeta rho) over the 4x4 grid (worst pull " +
             fmt(worst_pull, 3) + " se)");
  note("formula Q_D(g2=0, M=1, zeta=0.68, rho=0.99) = " +
       fmt(mandel_q_model(0, 1, 0.68, 0.99), 4) +
       " vs reference -0.64 (difference reported, equality not asserted)");
  note("formula Q_D(g2=0, M=1, zeta=0.99*0.95=0.9405, rho=0.99) = " +
       fmt(mandel_q_model(0, 1, 0.9405, 0.99), 4) +
       " vs reference -0.93 (collection-limited efficiency choice)");
}

// ---- criterion 6 -----------------------------------------------------------

void criterion_6() {
  EmitterParams emitter;  // shelving kinetics at their default values
  const double rho = 0.99, rep = 15e3;
  const double occupancy = shelving_occupancy(emitter, rep, rho);

  const int seeds = 10;
  std::vector<double> lost(seeds), entries(seeds);
  run_parallel(seeds, [&](int i) {
    SimConfig cfg = base_config(1.0, rho, 0, 1e7 / rep, 5000 + i, true);
    const SimSummary s = simulate_stream(cfg, [](const PhotonRecord&) {});
    lost[static_cast<std::size_t>(i)] =
        static_cast<double>(s.triplet_lost_pulses) / static_cast<double>(s.pulses);
    entries[static_cast<std::size_t>(i)] =
        static_cast<double>(s.triplet_entries) / static_cast<double>(s.pulses);
  });
  const auto [lost_mean, lost_se] = mean_se(lost);
  const auto [entry_mean, entry_se] = mean_se(entries);

  // The crossing probability per pulse is the budget quoted as "about
  // 0.01%"; the dark-pulse occupancy additionally counts pulses swallowed by
  // a dwell in progress and is checked against its closed form.
  const bool budget_ok = entry_mean >= 0.5e-4 && entry_mean <= 2.0e-4;
  const bool occupancy_ok = std::abs(lost_mean - occupancy) <= 3 * lost_se;

  report(6, budget_ok && occupancy_ok,
         "shelving budget at 15 kHz: crossing fraction " + fmt(entry_mean, 4) + " +- " +
             fmt(entry_se, 3) + " per pulse (1e-4 within factor 2); dark-pulse fraction " +
             fmt(lost_mean, 4) + " vs closed form " + fmt(occupancy, 4) + " within 3 se");
  note("dark-pulse occupancy includes multi-pulse dwells (mean dwell 167 us vs 66.7 us "
       "between pulses), which is why it sits near 2e-4 rather than 1e-4");
}

// ---- criterion 7 -----------------------------------------------------------

double enumerated_pulsed_g2(double bg_mean) {
  // One signal photon plus Poisson(bg_mean) background photons per pulse:
  // g2(0) = E[N(N-1)] / E[N]^2 by exhaustive outcome enumeration.
  double e_n = 0, e_nn1 = 0;
  double pmf = std::exp(-bg_mean);
  for (int k = 0; k <= 60; ++k) {
    const double n = 1.0 + k;
    e_n += pmf * n;
    e_nn1 += pmf * n * (n - 1);
    pmf *= bg_mean / (k + 1);
  }
  return e_nn1 / (e_n * e_n);
}

void criterion_7() {
  const double period = 1.0 / 15e3;

  // (a) pure pulsed signal: zero-delay coincidences are exactly zero
  const SimResult pure = simulate_stream(base_config(1.0, 1.0, 0, 300000 / 15e3, 7001));
  const auto [pa, pb] = hbt_split(pure.records, 0.5, 7002);
  const double g2_pure =
      g2_histogram(pa, pb, 4.5 * period, 271, G2Mode::pulsed, period).g2_zero;
  const bool pure_ok = g2_pure == 0.0;

  // (b) two independent Poisson streams: flat at 1
  const SimResult poisson_a = simulate_stream(base_config(1.0, 0.0, 20e3, 20.0, 7101));
  const SimResult poisson_b = simulate_stream(base_config(1.0, 0.0, 20e3, 20.0, 7102));
  const G2Histogram flat = g2_histogram(poisson_a.records, poisson_b.records, 1e-3, 201,
                                        G2Mode::continuous, 0, 20.0);
  const double se_flat = 1.0 / std::sqrt(flat.norm_per_bin);
  const bool flat_ok = std::abs(flat.g2_zero - 1.0) <= 3 * se_flat;

  // (c) signal plus 0.075 background photons per pulse vs the enumeration
  const double oracle = enumerated_pulsed_g2(0.075);
  const int seeds = 10;
  std::vector<double> estimates(seeds);
  run_parallel(seeds, [&](int i) {
    const SimResult run =
        simulate_stream(base_config(1.0, 1.0, 0.075 * 15e3, 300000 / 15e3, 7200 + i));
    const auto [a, b] = hbt_split(run.records, 0.5, 7300 + i);
    estimates[static_cast<std::size_t>(i)] =
        g2_histogram(a, b, 4.5 * period, 271, G2Mode::pulsed, period).g2_zero;
  });
  const auto [g2_mean, g2_se] = mean_se(estimates);
  const bool oracle_ok = std::abs(g2_mean - oracle) <= 3 * g2_se;
  const bool anchor_ok = std::abs(oracle - 0.15) <= 0.02;  // leading-order 2 p_b anchor

  // (d) probability of a simultaneous background pair
  const double pair = background_pair_probability(0.075);
  const bool pair_ok = std::abs(pair - 0.0027) <= 0.0001;

  report(7, pure_ok && flat_ok && oracle_ok && anchor_ok && pair_ok,
         "g2 suite: pure signal g2(0) = " + fmt(g2_pure, 3) + " (exact 0); Poisson g2(0) = " +
             fmt(flat.g2_zero, 4) + " (1 within 3 se); with background " + fmt(g2_mean, 4) +
             " +- " + fmt(g2_se, 3) + " vs enumeration " + fmt(oracle, 4) +
             " (leading order 0.15); pair probability " + fmt(pair, 3) + " (0.0027 +- 0.0001)");
}

// ---- criterion 8 -----------------------------------------------------------

double ode_population(double energy_ratio, double width_ratio) {
  // Rate-equation integration in lifetime units: drho/dt = W(1-rho) - rho.
  const double pump = energy_ratio;
  const double lambda = pump + 1.0;
  const double t_end = std::min(width_ratio, 50.0 / lambda);
  const int n_steps = 20000;
  const double h = t_end / n_steps;
  auto f = [&](double rho) { return pump * (1.0 - rho) - rho; };
  double rho = 0.0;
  for (int i = 0; i < n_steps; ++i) {
    const double k1 = f(rho);
    const double k2 = f(rho + 0.5 * h * k1);
    const double k3 = f(rho + 0.5 * h * k2);
    const double k4 = f(rho + h * k3);
    rho += h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  if (t_end < width_ratio) rho = pump / lambda;  // transient fully decayed
  return rho;
}

void criterion_8() {
  double worst = 0;
  for (int i = 0; i <= 14; ++i) {
    const double x = std::pow(10.0, -3.0 + 0.5 * i);
    for (int j = 0; j <= 10; ++j) {
      const double w = std::pow(10.0, -4.0 + 0.5 * j);
      const double closed = excited_population(x, 1.0, w, 1.0);
      const double ode = ode_population(x, w);
      const double rel = std::abs(closed - ode) / std::max(std::abs(ode), 1e-300);
      worst = std::max(worst, rel);
    }
  }
  report(8, worst <= 1e-9,
         "excitation closed form vs rate-equation integration: worst relative deviation " +
             fmt(worst, 3) + " over the 15 x 11 log grid (gate 1e-9)");
}

// ---- criterion 9 -----------------------------------------------------------

void criterion_9() {
  SaturationParams p;
  p.max_rate_cps = 10200;
  p.saturation_energy_pj = 1.5;
  p.background_slope_cps_per_pj = 5.5;
  p.tau_p_s = 13e-12;
  p.tau_r_s = 13e-12;

  auto make_grid = [] {
    std::vector<double> grid(20);
    for (int i = 0; i < 20; ++i) grid[i] = 0.02 * std::pow(500.0 / 0.02, i / 19.0);
    return grid;
  };

  SaturationDataset noiseless;
  noiseless.tau_p_s = p.tau_p_s;
  noiseless.tau_r_s = p.tau_r_s;
  for (double e : make_grid()) noiseless.points.push_back({e, detected_rate(e, p), 1.0});
  const FitResult clean = fit_saturation(noiseless);
  const bool clean_ok =
      clean.converged && std::abs(clean.params.max_rate_cps - 10200) / 10200 < 1e-6 &&
      std::abs(clean.params.saturation_energy_pj - 1.5) / 1.5 < 1e-6 &&
      std::abs(clean.params.background_slope_cps_per_pj - 5.5) / 5.5 < 1e-6;

  int within = 0;
  const int trials = 100;
  for (int t = 0; t < trials; ++t) {
    std::mt19937_64 gen(9000 + static_cast<std::uint64_t>(t));
    SaturationDataset noisy;
    noisy.tau_p_s = p.tau_p_s;
    noisy.tau_r_s = p.tau_r_s;
    for (double e : make_grid()) {
      std::poisson_distribution<long> counts(detected_rate(e, p));
      const double rate = static_cast<double>(counts(gen));
      noisy.points.push_back({e, rate, 1.0 / std::max(rate, 1.0)});
    }
    const FitResult fit = fit_saturation(noisy);
    if (fit.converged && std::abs(fit.params.max_rate_cps - 10200) / 10200 <= 0.02) ++within;
  }
  const bool noisy_ok = within >= 95;

  // End-to-end: recover the detection efficiency from measured noise ratios.
  const std::vector<double> rhos{0.31, 0.6, 0.8, 0.99};
  const int seeds = 8;
  std::vector<double> zetas(seeds);
  run_parallel(seeds, [&](int s) {
    std::vector<std::pair<double, double>> points;
    for (std::size_t r = 0; r < rhos.size(); ++r) {
      const NoiseReport noise = binned_run(
          base_config(0.68, rhos[r], 0, 10.0, 9500 + 100 * s + static_cast<int>(r)), 1e-3);
      points.emplace_back(rhos[r], noise.ratio);
    }
    zetas[static_cast<std::size_t>(s)] = fit_noise_curve(points).zeta;
  });
  const auto [zeta_mean, zeta_se] = mean_se(zetas);
  const bool zeta_ok = std::abs(zeta_mean - 0.68) <= 3 * zeta_se;

  report(9, clean_ok && noisy_ok && zeta_ok,
         "fit roundtrips: noiseless params to 1e-6; noisy max-rate within 2% in " +
             fmt(within, 3) + "/100 seeds (gate 95); efficiency from noise points " +
             fmt(zeta_mean, 4) + " +- " + fmt(zeta_se, 3) + " vs 0.68");
}

// ---- criterion 10 ----------------------------------------------------------

void criterion_10() {
  namespace fs = std::filesystem;
  const fs::path tmp =
      fs::temp_directory_path() /
      ("photongun-acceptance-" +
       std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
  fs::create_directories(tmp);

  bool ok = true;
  std::string detail;
  try {
    std::ofstream(tmp / "run.scenario")
        << "name = run\nseed = 11\n"
        << "excitation.pulse_energy_pJ = 200\n"
        << "excitation.saturation_energy_pJ = 0.05\n"
        << "excitation.repetition_rate_Hz = 15000\n"
        << "excitation.duration_s = 2\n"
        << "chain.objective_T = 0.68\nchain.optics_T = 1.0\nchain.detector_qe = 1.0\n"
        << "background.mode = fixed_rate\nbackground.rate_cps = 1100\n";

    auto slurp = [](const fs::path& p) {
      std::ifstream in(p, std::ios::binary);
      return std::string((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
    };

    cli::SimulateOptions sim;
    sim.scenario_path = (tmp / "run.scenario").string();
    sim.out_dir = (tmp / "a").string();
    sim.quiet = true;
    sim.csv_mirror = true;
    ok &= cli::cmd_simulate(sim) == 0;
    sim.out_dir = (tmp / "b").string();
    ok &= cli::cmd_simulate(sim) == 0;
    const bool identical = slurp(tmp / "a" / "run.pgun") == slurp(tmp / "b" / "run.pgun");
    ok &= identical;

    const auto records = read_timestamps_binary(tmp / "a" / "run.pgun");
    const auto mirrored = read_timestamps_csv(tmp / "a" / "run.csv");
    const bool lossless = records == mirrored;
    ok &= lossless;
    write_timestamps_binary(tmp / "a" / "again.pgun", mirrored);
    ok &= slurp(tmp / "a" / "run.pgun") == slurp(tmp / "a" / "again.pgun");

    const std::string bytes = slurp(tmp / "a" / "run.pgun");
    std::ofstream(tmp / "trunc.pgun", std::ios::binary)
        .write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 3));
    std::string corrupt = bytes;
    corrupt[1] = 'X';
    std::ofstream(tmp / "magic.pgun", std::ios::binary)
        .write(corrupt.data(), static_cast<std::streamsize>(corrupt.size()));

    cli::AnalyzeOptions an;
    an.out_dir = tmp.string();
    an.quiet = true;
    an.input_path = (tmp / "trunc.pgun").string();
    const int trunc_code = cli::cmd_analyze(an);
    an.input_path = (tmp / "magic.pgun").string();
    const int magic_code = cli::cmd_analyze(an);
    ok &= trunc_code == 4 && magic_code == 4;

    detail = "determinism and formats: repeat runs byte-identical (" +
             std::string(identical ? "yes" : "NO") + "), binary<->csv lossless (" +
             (lossless ? "yes" : "NO") + "), truncated/corrupt files exit " +
             std::to_string(trunc_code) + "/" + std::to_string(magic_code) + " (expect 4/4)";
  } catch (const std::exception& e) {
    ok = false;
    detail = std::string("determinism and formats: exception ") + e.what();
  }
  std::error_code ec;
  fs::remove_all(tmp, ec);
  report(10, ok, detail);
}

// ---- stress ----------------------------------------------------------------

void stress_run() {
  const auto t0 = std::chrono::steady_clock::now();
  SimConfig cfg = base_config(0.68, 0.99, 1100, 1e8 / 15e3, 77, true);
  std::uint64_t detected = 0;
  const SimSummary s = simulate_stream(cfg, [&](const PhotonRecord&) { ++detected; });
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool ok = s.pulses == 100000000ull && dt < 60.0 &&
                  detected == s.signal_detected + s.background_detected &&
                  s.signal_emitted == s.signal_detected + s.signal_lost;
  report(11, ok,
         "stress: 1e8 pulses in " + fmt(dt, 3) + " s (gate 60 s), bookkeeping balanced (" +
             fmt(static_cast<double>(detected), 10) + " records)");
}

}  // namespace

int main() {
  std::printf("photongun acceptance suite\n");
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  stress_run();

  // Non-asserted companion number: the source as seen after the collection
  // antenna (detector and optics at unit transmission, background scaled by
  // the removed factors), reported next to the reference ratio 0.24.
  {
    const double rho = excited_population(200, 0.05, 13e-12, 10e-9);
    const double n_mol = 0.90 * rho * 15000 * 0.001;
    const double n_bg = (5.5 / (0.95 * 0.80)) * 200 * 0.001;
    const double ratio = noise_ratio_from_bins(n_mol, n_bg, 0.90 * rho);
    note("after-antenna scenario ratio " + fmt(ratio, 4) +
         " (reference 0.24; the removed-loss accounting is a documented choice, equality not "
         "asserted)");
  }

  if (g_failures == 0) {
    std::printf("all criteria passed\n");
  } else {
    std::printf("%d criterion(s) FAILED\n", g_failures);
  }
  return g_failures;
}
