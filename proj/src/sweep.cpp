#include "photongun/sweep.hpp"

#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "photongun/errors.hpp"
#include "photongun/rng.hpp"

namespace photongun {

namespace {

SimConfig config_for_point(const Scenario& scenario, SweepConfig::Axis axis, double value) {
  SimConfig cfg = scenario.sim;
  switch (axis) {
    case SweepConfig::Axis::pulse_energy:
      cfg.excitation.pulse_energy_pj = value;
      break;
    case SweepConfig::Axis::rho:
      cfg.rho_override = value;
      break;
    case SweepConfig::Axis::zeta:
      if (value <= 0 || value > 1) throw ConfigError("zeta sweep values must be in (0, 1]");
      cfg.chain = DetectionChain{value, 1.0, 1.0, 1.0};
      break;
    case SweepConfig::Axis::none:
      break;
  }
  return cfg;
}

}  // namespace

SweepTable run_sweep(const Scenario& scenario, int jobs) {
  if (scenario.sweep.axis == SweepConfig::Axis::none || scenario.sweep.grid.empty()) {
    throw ConfigError("sweep: scenario has no sweep axis/grid configured");
  }
  const int n_points = static_cast<int>(scenario.sweep.grid.size());
  const int n_seeds = scenario.sweep.seeds;
  if (jobs < 1) jobs = 1;

  // Validate every point up front so errors surface before any work runs.
  for (double v : scenario.sweep.grid) {
    config_for_point(scenario, scenario.sweep.axis, v).validate();
  }

  struct Cell {
    double ratio = 0;
    double rate = 0;
  };
  std::vector<Cell> cells(static_cast<std::size_t>(n_points) * n_seeds);

  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::string error_message;
  std::mutex error_mutex;

  auto worker = [&] {
    while (true) {
      const int task = next.fetch_add(1);
      if (task >= n_points * n_seeds || failed.load()) return;
      const int point = task / n_seeds;
      const int replica = task % n_seeds;
      try {
        SimConfig cfg =
            config_for_point(scenario, scenario.sweep.axis, scenario.sweep.grid[point]);
        std::uint64_t mix = scenario.sim.seed ^ (0x9e3779b97f4a7c15ull *
                                                 (static_cast<std::uint64_t>(point) * 1000003 +
                                                  static_cast<std::uint64_t>(replica) + 1));
        cfg.seed = rng::splitmix64(mix);

        const std::uint64_t bin_ps =
            static_cast<std::uint64_t>(std::llround(scenario.analysis.bin_width_s * 1e12));
        const std::uint64_t duration_ps =
            static_cast<std::uint64_t>(std::llround(cfg.excitation.duration_s * 1e12));
        BinnedTrace trace;
        trace.bin_width_s = scenario.analysis.bin_width_s;
        trace.counts.assign(static_cast<std::size_t>(duration_ps / bin_ps), 0);
        simulate_stream(cfg, [&](const PhotonRecord& r) {
          const std::uint64_t idx = r.t_ps / bin_ps;
          if (idx < trace.counts.size()) ++trace.counts[static_cast<std::size_t>(idx)];
        });
        const NoiseReport noise = noise_ratio_measured(trace, cfg.excitation.rep_rate_hz);
        cells[static_cast<std::size_t>(task)] = {noise.ratio, noise.mean_rate_cps};
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        error_message = e.what();
        failed.store(true);
        return;
      }
    }
  };

  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    const int n_threads = std::min(jobs, n_points * n_seeds);
    pool.reserve(static_cast<std::size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failed.load()) throw ConfigError("sweep: " + error_message);

  SweepTable table;
  table.axis = scenario.sweep.axis;
  table.rows.resize(static_cast<std::size_t>(n_points));

  const double bin_width = scenario.analysis.bin_width_s;
  for (int point = 0; point < n_points; ++point) {
    SweepRow& row = table.rows[static_cast<std::size_t>(point)];
    row.axis_value = scenario.sweep.grid[point];
    row.seeds = n_seeds;

    double mean = 0, rate = 0;
    for (int s = 0; s < n_seeds; ++s) {
      mean += cells[static_cast<std::size_t>(point) * n_seeds + s].ratio;
      rate += cells[static_cast<std::size_t>(point) * n_seeds + s].rate;
    }
    mean /= n_seeds;
    rate /= n_seeds;
    double var = 0;
    for (int s = 0; s < n_seeds; ++s) {
      const double d = cells[static_cast<std::size_t>(point) * n_seeds + s].ratio - mean;
      var += d * d;
    }
    row.measured_ratio_mean = mean;
    row.measured_ratio_se =
        n_seeds > 1 ? std::sqrt(var / (n_seeds - 1) / n_seeds) : 0.0;
    row.mean_rate_cps = rate;

    const SimConfig cfg = config_for_point(scenario, scenario.sweep.axis, row.axis_value);
    row.rho = cfg.rho();
    row.zeta = cfg.chain.total_zeta();
    const double n_bg =
        cfg.background.detected_rate_cps(cfg.excitation.pulse_energy_pj) * bin_width;
    const double pulses_per_bin = cfg.excitation.rep_rate_hz * bin_width;
    row.model_ratio = noise_ratio_model_rho(row.rho, row.zeta, n_bg, pulses_per_bin);
  }

  if (scenario.sweep.axis == SweepConfig::Axis::rho) {
    std::vector<std::pair<double, double>> points;
    points.reserve(table.rows.size());
    for (const auto& row : table.rows) {
      points.emplace_back(row.rho, row.measured_ratio_mean);
    }
    const SimConfig& cfg = scenario.sim;
    const double n_bg =
        cfg.background.detected_rate_cps(cfg.excitation.pulse_energy_pj) * bin_width;
    try {
      table.zeta_fit =
          fit_noise_curve(points, n_bg, cfg.excitation.rep_rate_hz * bin_width);
    } catch (const FitError&) {
      table.zeta_fit = std::nullopt;  // e.g. single-point weak-drive grids
    }
  }
  return table;
}

}  // namespace photongun
