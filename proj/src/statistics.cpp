#include "photongun/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace photongun {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::domain_error(what);
}

}  // namespace

BinnedTrace bin_trace(std::span<const PhotonRecord> stream, double bin_width_s,
                      double duration_s) {
  require(bin_width_s > 0, "bin_trace: bin width must be > 0");
  const std::uint64_t bin_ps = static_cast<std::uint64_t>(std::llround(bin_width_s * 1e12));
  require(bin_ps >= 1, "bin_trace: bin width must be at least 1 ps");

  BinnedTrace trace;
  trace.bin_width_s = bin_width_s;
  if (stream.empty() && duration_s <= 0) return trace;

  std::uint64_t duration_ps;
  if (duration_s > 0) {
    duration_ps = static_cast<std::uint64_t>(std::llround(duration_s * 1e12));
  } else {
    duration_ps = stream.back().t_ps + 1;
  }
  const std::uint64_t n_bins = duration_ps / bin_ps;
  trace.counts.assign(static_cast<std::size_t>(n_bins), 0);

  for (const PhotonRecord& r : stream) {
    const std::uint64_t idx = r.t_ps / bin_ps;
    if (idx < n_bins) ++trace.counts[static_cast<std::size_t>(idx)];
  }
  return trace;
}

NoiseReport noise_ratio_measured(const BinnedTrace& trace, double rep_rate_hz) {
  if (trace.counts.size() < 2) {
    throw std::invalid_argument("noise_ratio_measured: need at least 2 bins");
  }

  // Welford, stable for long traces.
  double mean = 0;
  double m2 = 0;
  std::size_t n = 0;
  for (std::uint32_t c : trace.counts) {
    ++n;
    const double d = static_cast<double>(c) - mean;
    mean += d / static_cast<double>(n);
    m2 += d * (static_cast<double>(c) - mean);
  }
  const double var = m2 / static_cast<double>(n - 1);

  NoiseReport report;
  report.bins = n;
  report.bin_width_s = trace.bin_width_s;
  report.mean_per_bin = mean;
  report.mean_rate_cps = mean / trace.bin_width_s;
  report.sigma_sps = std::sqrt(var);
  report.sigma_sn = std::sqrt(mean);
  report.ratio = report.sigma_sn > 0 ? report.sigma_sps / report.sigma_sn
                                     : std::numeric_limits<double>::quiet_NaN();
  report.mandel_q = report.ratio * report.ratio - 1.0;
  report.squeezing_db = -10.0 * std::log10(report.ratio);
  report.squeezing_db_variance = 2.0 * report.squeezing_db;
  if (rep_rate_hz > 0) {
    report.mean_photons_per_pulse = report.mean_rate_cps / rep_rate_hz;
  }
  return report;
}

double noise_ratio_from_bins(double n_mol_per_bin, double n_bg_per_bin, double zeta_rho) {
  require(n_mol_per_bin >= 0 && n_bg_per_bin >= 0, "noise ratio: bin means must be >= 0");
  require(zeta_rho >= 0 && zeta_rho <= 1, "noise ratio: zeta*rho must be in [0, 1]");
  const double total = n_mol_per_bin + n_bg_per_bin;
  if (total <= 0) return 1.0;
  return std::sqrt(((1.0 - zeta_rho) * n_mol_per_bin + n_bg_per_bin) / total);
}

double noise_ratio_model(double pulse_energy_pj, double zeta, const SaturationParams& sat,
                         double rep_rate_hz, double bin_width_s) {
  require(zeta > 0 && zeta <= 1, "noise_ratio_model: zeta must be in (0, 1]");
  require(rep_rate_hz > 0, "noise_ratio_model: repetition rate must be > 0");
  require(bin_width_s > 0, "noise_ratio_model: bin width must be > 0");
  const double rho = excited_population(pulse_energy_pj, sat.saturation_energy_pj,
                                        sat.tau_p_s, sat.tau_r_s);
  const double n_mol = zeta * rho * rep_rate_hz * bin_width_s;
  const double n_bg = sat.background_slope_cps_per_pj * pulse_energy_pj * bin_width_s;
  return noise_ratio_from_bins(n_mol, n_bg, zeta * rho);
}

double noise_ratio_model_rho(double rho, double zeta, double n_bg_per_bin,
                             double pulses_per_bin) {
  require(rho >= 0 && rho <= 1, "noise_ratio_model_rho: rho must be in [0, 1]");
  require(zeta > 0 && zeta <= 1, "noise_ratio_model_rho: zeta must be in (0, 1]");
  if (n_bg_per_bin == 0) return std::sqrt(1.0 - zeta * rho);
  const double n_mol = zeta * rho * pulses_per_bin;
  return noise_ratio_from_bins(n_mol, n_bg_per_bin, zeta * rho);
}

double squeezing_db(double ratio) {
  require(ratio > 0 && ratio <= 1, "squeezing_db: ratio must be in (0, 1]");
  return -10.0 * std::log10(ratio);
}

double mandel_q_model(double g2_zero, double mean_photons_per_pulse, double zeta,
                      double rho) {
  require(g2_zero >= 0, "mandel_q_model: g2(0) must be >= 0");
  require(mean_photons_per_pulse > 0, "mandel_q_model: M must be > 0");
  require(zeta >= 0 && zeta <= 1, "mandel_q_model: zeta must be in [0, 1]");
  require(rho >= 0 && rho <= 1, "mandel_q_model: rho must be in [0, 1]");
  return (g2_zero - 1.0) * mean_photons_per_pulse * zeta * rho;
}

G2Histogram g2_histogram(std::span<const PhotonRecord> arm_a,
                         std::span<const PhotonRecord> arm_b, double tau_max_s,
                         int n_bins, G2Mode mode, double rep_period_s,
                         double duration_s) {
  if (arm_a.size() < 2 || arm_b.size() < 2) {
    throw std::invalid_argument("g2_histogram: need at least 2 records in each arm");
  }
  require(tau_max_s > 0, "g2_histogram: tau_max must be > 0");
  require(n_bins >= 3, "g2_histogram: need at least 3 bins");
  if (n_bins % 2 == 0) ++n_bins;  // keep a bin centered on zero lag

  const double tau_max_ps = tau_max_s * 1e12;
  const double bin_ps = 2.0 * tau_max_ps / n_bins;

  double period_ps = 0;
  int side_peaks = 0;
  if (mode == G2Mode::pulsed) {
    require(rep_period_s > 0, "g2_histogram: pulsed mode needs the repetition period");
    period_ps = rep_period_s * 1e12;
    side_peaks = static_cast<int>(std::floor((tau_max_ps - 0.5 * period_ps) / period_ps));
    if (side_peaks < 1) {
      throw std::invalid_argument(
          "g2_histogram: tau_max must cover at least one full side peak in pulsed mode");
    }
  }

  G2Histogram hist;
  hist.mode = mode;
  hist.rep_period_s = rep_period_s;
  hist.counts.assign(static_cast<std::size_t>(n_bins), 0);
  hist.tau_s.resize(static_cast<std::size_t>(n_bins));
  for (int i = 0; i < n_bins; ++i) {
    hist.tau_s[static_cast<std::size_t>(i)] = ((i + 0.5) * bin_ps - tau_max_ps) * 1e-12;
  }

  std::vector<std::uint64_t> peak_area(static_cast<std::size_t>(2 * side_peaks + 1), 0);

  // Forward-and-backward cross correlation with a sliding window over arm B.
  std::size_t lo = 0;
  for (const PhotonRecord& a : arm_a) {
    const double ta = static_cast<double>(a.t_ps);
    while (lo < arm_b.size() && static_cast<double>(arm_b[lo].t_ps) < ta - tau_max_ps) ++lo;
    for (std::size_t j = lo; j < arm_b.size(); ++j) {
      const double lag = static_cast<double>(arm_b[j].t_ps) - ta;
      if (lag > tau_max_ps) break;
      ++hist.total_pairs;
      const int idx = static_cast<int>((lag + tau_max_ps) / bin_ps);
      ++hist.counts[static_cast<std::size_t>(std::clamp(idx, 0, n_bins - 1))];
      if (mode == G2Mode::pulsed) {
        const int k = static_cast<int>(std::llround(lag / period_ps));
        if (std::abs(k) <= side_peaks) {
          ++peak_area[static_cast<std::size_t>(k + side_peaks)];
        }
      }
    }
  }

  const double last_a = static_cast<double>(arm_a.back().t_ps);
  const double last_b = static_cast<double>(arm_b.back().t_ps);
  const double duration_ps =
      duration_s > 0 ? duration_s * 1e12 : std::max(last_a, last_b) + 1;
  hist.duration_s = duration_ps * 1e-12;

  const double n_a = static_cast<double>(arm_a.size());
  const double n_b = static_cast<double>(arm_b.size());
  hist.norm_per_bin = n_a * n_b * bin_ps / duration_ps;
  hist.normalized.resize(hist.counts.size());
  for (std::size_t i = 0; i < hist.counts.size(); ++i) {
    hist.normalized[i] = static_cast<double>(hist.counts[i]) / hist.norm_per_bin;
  }

  if (mode == G2Mode::continuous) {
    hist.g2_zero = hist.normalized[static_cast<std::size_t>(n_bins / 2)];
  } else {
    const std::uint64_t zero_area = peak_area[static_cast<std::size_t>(side_peaks)];
    std::uint64_t side_total = 0;
    for (int k = -side_peaks; k <= side_peaks; ++k) {
      if (k != 0) side_total += peak_area[static_cast<std::size_t>(k + side_peaks)];
    }
    if (side_total == 0) {
      throw std::invalid_argument("g2_histogram: no side-peak coincidences to normalize by");
    }
    const double side_mean = static_cast<double>(side_total) / (2.0 * side_peaks);
    hist.g2_zero = static_cast<double>(zero_area) / side_mean;
  }
  return hist;
}

double background_pair_probability(double mean_per_pulse) {
  require(mean_per_pulse >= 0, "background_pair_probability: mean must be >= 0");
  return 1.0 - std::exp(-mean_per_pulse) * (1.0 + mean_per_pulse);
}

}  // namespace photongun
