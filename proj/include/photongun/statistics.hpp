#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "photongun/emitter.hpp"
#include "photongun/simulator.hpp"

namespace photongun {

// Photon counts in consecutive fixed-width time bins.
struct BinnedTrace {
  double bin_width_s = 0;
  std::uint64_t start_ps = 0;
  std::vector<std::uint32_t> counts;
};

struct NoiseReport {
  double mean_rate_cps = 0;
  double mean_per_bin = 0;
  double sigma_sps = 0;  // sample standard deviation of bin counts
  double sigma_sn = 0;   // shot-noise floor, sqrt(mean per bin)
  double ratio = 0;      // sigma_sps / sigma_sn
  double squeezing_db = 0;           // -10 log10(ratio)
  double squeezing_db_variance = 0;  // variance convention, -20 log10(ratio)
  double mandel_q = 0;               // ratio^2 - 1
  double mean_photons_per_pulse = 0;  // filled when the repetition rate is known
  std::size_t bins = 0;
  double bin_width_s = 0;
};

enum class G2Mode { continuous, pulsed };

struct G2Histogram {
  std::vector<double> tau_s;         // bin centers
  std::vector<std::uint64_t> counts;  // raw coincidences per bin
  std::vector<double> normalized;    // counts / (rate_a * rate_b * bin_width * duration)
  double norm_per_bin = 0;           // expected coincidences per bin for uncorrelated streams
  double g2_zero = 0;
  G2Mode mode = G2Mode::continuous;
  double rep_period_s = 0;
  std::uint64_t total_pairs = 0;
  double duration_s = 0;
};

// Exact integer counts per bin over [0, duration); a partial trailing bin is
// discarded. With duration_s <= 0 the span is inferred from the last record.
BinnedTrace bin_trace(std::span<const PhotonRecord> stream, double bin_width_s,
                      double duration_s = 0);

// Binned-trace noise statistics. The repetition rate, when given, fills in
// the mean photon number per pulse.
NoiseReport noise_ratio_measured(const BinnedTrace& trace, double rep_rate_hz = 0);

// Noise ratio for given per-bin signal and background means:
// sqrt(((1 - zeta_rho) * n_mol + n_bg) / (n_mol + n_bg)).
double noise_ratio_from_bins(double n_mol_per_bin, double n_bg_per_bin, double zeta_rho);

// Model curve vs pulse energy: n_mol = zeta * rho(E) * rep_rate * bin_width,
// n_bg = slope * E * bin_width. Background-free it reduces to sqrt(1 - zeta rho).
double noise_ratio_model(double pulse_energy_pj, double zeta, const SaturationParams& sat,
                         double rep_rate_hz, double bin_width_s);

// Same model parameterized by rho directly (n_bg given per bin).
double noise_ratio_model_rho(double rho, double zeta, double n_bg_per_bin,
                             double pulses_per_bin);

// Intensity squeezing in dB; the amplitude convention -10 log10(ratio).
double squeezing_db(double ratio);

// Mandel parameter from the correlation model: (g2_zero - 1) * M * zeta * rho.
double mandel_q_model(double g2_zero, double mean_photons_per_pulse, double zeta, double rho);

// Cross-correlation histogram over lags in [-tau_max, tau_max] via a
// two-pointer sweep. Pulsed mode takes g2_zero as zero-delay peak area over
// the mean side-peak area (each peak integrated over one repetition period);
// continuous mode reads the zero-lag bin.
G2Histogram g2_histogram(std::span<const PhotonRecord> arm_a,
                         std::span<const PhotonRecord> arm_b, double tau_max_s,
                         int n_bins, G2Mode mode, double rep_period_s = 0,
                         double duration_s = 0);

// P(N >= 2) for Poisson-distributed background with the given mean per pulse.
double background_pair_probability(double mean_per_pulse);

}  // namespace photongun
