#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "photongun/emitter.hpp"

namespace photongun {

struct SaturationPoint {
  double pulse_energy_pj = 0;
  double rate_cps = 0;
  double weight = 1.0;
};

struct SaturationDataset {
  std::vector<SaturationPoint> points;
  double tau_p_s = 13e-12;
  double tau_r_s = 10e-9;
  double rep_rate_hz = 15e3;

  void validate() const;
};

struct FitResult {
  SaturationParams params;
  double residual_norm = 0;
  std::array<double, 3> std_errors{};  // max_rate, saturation_energy, slope
  bool converged = false;
  int iterations = 0;
  std::string message;
};

struct SaturationFitOptions {
  std::optional<SaturationParams> init;
  std::optional<double> fix_background_slope;
};

// Weighted nonlinear least squares on the saturation curve, damped
// (Levenberg-Marquardt) steps on log-parameters so positivity holds by
// construction. Deterministic for fixed data and initialization; a
// non-converged fit is flagged, not thrown. Throws FitError when the data
// cannot identify the saturation energy (all points in the linear regime).
FitResult fit_saturation(const SaturationDataset& data,
                         const SaturationFitOptions& options = {});

// rho(E) on a grid from a converged fit's saturation energy and the
// dataset's fixed pulse width / lifetime.
std::vector<std::pair<double, double>> extract_rho_curve(const FitResult& fit,
                                                         std::span<const double> energies_pj);

struct NoiseCurveFit {
  double zeta = 0;
  double std_error = 0;
  double residual_norm = 0;
  bool converged = false;
  int iterations = 0;
};

// Least-squares detection efficiency from (rho, noise ratio) points using
// ratio = sqrt(((1 - zeta rho) n_mol + n_bg) / (n_mol + n_bg)) with
// n_mol = zeta * rho * pulses_per_bin. Background-free the bin scale cancels
// and the model is sqrt(1 - zeta rho).
NoiseCurveFit fit_noise_curve(std::span<const std::pair<double, double>> rho_ratio_points,
                              double n_bg_per_bin = 0, double pulses_per_bin = 0);

}  // namespace photongun
