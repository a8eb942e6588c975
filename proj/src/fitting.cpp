#include "photongun/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <set>

#include "photongun/errors.hpp"
#include "photongun/statistics.hpp"

namespace photongun {

namespace {

// Dense damped least squares for a handful of parameters. Residual function
// fills r for a given theta; the Jacobian is taken by central differences.
struct LmOutcome {
  std::vector<double> theta;
  double sse = 0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> covariance;  // p x p, row-major; empty if not computable
  bool singular_geometry = false;
};

using ResidualFn = std::function<void(const std::vector<double>&, std::vector<double>&)>;

double sum_sq(const std::vector<double>& r) {
  double s = 0;
  for (double v : r) s += v * v;
  return s;
}

// Solve A x = b (n <= 4) by Gaussian elimination with partial pivoting.
// Returns false when the pivot collapses.
bool solve_dense(std::vector<double> a, std::vector<double> b, int n,
                 std::vector<double>& x) {
  for (int col = 0; col < n; ++col) {
    int pivot = col;
    for (int row = col + 1; row < n; ++row) {
      if (std::abs(a[row * n + col]) > std::abs(a[pivot * n + col])) pivot = row;
    }
    if (std::abs(a[pivot * n + col]) < 1e-300) return false;
    if (pivot != col) {
      for (int k = 0; k < n; ++k) std::swap(a[col * n + k], a[pivot * n + k]);
      std::swap(b[col], b[pivot]);
    }
    for (int row = col + 1; row < n; ++row) {
      const double f = a[row * n + col] / a[col * n + col];
      for (int k = col; k < n; ++k) a[row * n + k] -= f * a[col * n + k];
      b[row] -= f * b[col];
    }
  }
  x.assign(n, 0);
  for (int row = n - 1; row >= 0; --row) {
    double s = b[row];
    for (int k = row + 1; k < n; ++k) s -= a[row * n + k] * x[k];
    x[row] = s / a[row * n + row];
  }
  return true;
}

bool invert_dense(const std::vector<double>& a, int n, std::vector<double>& inv) {
  inv.assign(n * n, 0);
  std::vector<double> col;
  for (int j = 0; j < n; ++j) {
    std::vector<double> e(n, 0);
    e[j] = 1;
    if (!solve_dense(a, e, n, col)) return false;
    for (int i = 0; i < n; ++i) inv[i * n + j] = col[i];
  }
  return true;
}

void jacobian(const ResidualFn& fn, const std::vector<double>& theta, int n_resid,
              std::vector<double>& jac) {
  const int p = static_cast<int>(theta.size());
  jac.assign(static_cast<std::size_t>(n_resid) * p, 0);
  std::vector<double> plus(n_resid), minus(n_resid);
  std::vector<double> t = theta;
  for (int j = 0; j < p; ++j) {
    const double h = 1e-6 * std::max(1.0, std::abs(theta[j]));
    t[j] = theta[j] + h;
    fn(t, plus);
    t[j] = theta[j] - h;
    fn(t, minus);
    t[j] = theta[j];
    for (int i = 0; i < n_resid; ++i) {
      jac[static_cast<std::size_t>(i) * p + j] = (plus[i] - minus[i]) / (2 * h);
    }
  }
}

// det of the correlation-normalized normal matrix; ~0 flags a direction the
// data cannot see.
double normalized_det(const std::vector<double>& ata, int p) {
  std::vector<double> scaled(ata);
  std::vector<double> d(p);
  for (int i = 0; i < p; ++i) d[i] = std::sqrt(std::max(ata[i * p + i], 1e-300));
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) scaled[i * p + j] /= d[i] * d[j];
  }
  if (p == 1) return scaled[0];
  if (p == 2) return scaled[0] * scaled[3] - scaled[1] * scaled[2];
  // p == 3
  return scaled[0] * (scaled[4] * scaled[8] - scaled[5] * scaled[7]) -
         scaled[1] * (scaled[3] * scaled[8] - scaled[5] * scaled[6]) +
         scaled[2] * (scaled[3] * scaled[7] - scaled[4] * scaled[6]);
}

LmOutcome lm_minimize(const ResidualFn& fn, std::vector<double> theta, int n_resid,
                      double data_scale, int max_iter = 500, double tol = 1e-10) {
  const int p = static_cast<int>(theta.size());
  LmOutcome out;

  std::vector<double> r(n_resid);
  fn(theta, r);
  double sse = sum_sq(r);
  // Residuals this far below the data scale are numerically zero.
  const double sse_floor = 1e-24 * std::max(data_scale, 1e-300);

  std::vector<double> jac, ata(p * p), atr(p), delta, trial_r(n_resid);
  double lambda = 1e-3;
  int iter = 0;
  bool first = true;
  int stationary_streak = 0;  // accepted steps that no longer move the residual

  while (iter < max_iter) {
    ++iter;
    jacobian(fn, theta, n_resid, jac);
    for (int i = 0; i < p; ++i) {
      for (int j = 0; j < p; ++j) {
        double s = 0;
        for (int k = 0; k < n_resid; ++k) {
          s += jac[static_cast<std::size_t>(k) * p + i] * jac[static_cast<std::size_t>(k) * p + j];
        }
        ata[i * p + j] = s;
      }
      double g = 0;
      for (int k = 0; k < n_resid; ++k) {
        g += jac[static_cast<std::size_t>(k) * p + i] * r[k];
      }
      atr[i] = g;
    }

    if (first) {
      first = false;
      if (std::abs(normalized_det(ata, p)) < 1e-12) {
        out.singular_geometry = true;
        out.theta = theta;
        out.sse = sse;
        out.iterations = iter;
        return out;
      }
    }

    if (sse <= sse_floor) {
      out.converged = true;
      break;
    }

    bool stepped = false;
    for (int attempt = 0; attempt < 40; ++attempt) {
      std::vector<double> damped = ata;
      for (int i = 0; i < p; ++i) damped[i * p + i] = ata[i * p + i] * (1.0 + lambda);
      std::vector<double> rhs(p);
      for (int i = 0; i < p; ++i) rhs[i] = -atr[i];
      if (!solve_dense(damped, rhs, p, delta)) {
        lambda *= 9;
        continue;
      }
      std::vector<double> trial = theta;
      for (int i = 0; i < p; ++i) trial[i] += delta[i];
      fn(trial, trial_r);
      const double trial_sse = sum_sq(trial_r);
      if (std::isfinite(trial_sse) && trial_sse <= sse) {
        double step = 0;
        for (int i = 0; i < p; ++i) {
          step = std::max(step, std::abs(delta[i]) / (1.0 + std::abs(theta[i])));
        }
        const double drop = (sse - trial_sse) / std::max(sse, 1e-300);
        theta = std::move(trial);
        r = trial_r;
        sse = trial_sse;
        lambda = std::max(lambda / 3, 1e-12);
        stepped = true;
        if (step < tol && drop < tol) out.converged = true;
        // A flat direction (e.g. a parameter heading to zero in log space)
        // keeps stepping without moving the residual; treat a stationary
        // residual as converged.
        stationary_streak = drop < tol ? stationary_streak + 1 : 0;
        if (stationary_streak >= 5) out.converged = true;
        break;
      }
      lambda *= 9;
      if (lambda > 1e14) break;
    }
    if (out.converged) break;
    if (!stepped) {
      // Damping saturated without an acceptable step: gradient is flat at
      // working precision.
      double gnorm = 0;
      for (int i = 0; i < p; ++i) gnorm = std::max(gnorm, std::abs(atr[i]));
      out.converged = gnorm < 1e-8 * std::max(1.0, sse);
      break;
    }
  }

  out.theta = theta;
  out.sse = sse;
  out.iterations = iter;

  jacobian(fn, theta, n_resid, jac);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      double s = 0;
      for (int k = 0; k < n_resid; ++k) {
        s += jac[static_cast<std::size_t>(k) * p + i] * jac[static_cast<std::size_t>(k) * p + j];
      }
      ata[i * p + j] = s;
    }
  }
  std::vector<double> inv;
  if (n_resid > p && invert_dense(ata, p, inv)) {
    const double s2 = sse / (n_resid - p);
    out.covariance.assign(p * p, 0);
    for (int i = 0; i < p * p; ++i) out.covariance[i] = inv[i] * s2;
  }
  return out;
}

}  // namespace

void SaturationDataset::validate() const {
  if (points.size() < 4) {
    throw FitError("saturation fit needs at least 4 points (3 free parameters)");
  }
  std::set<double> energies;
  for (const auto& pt : points) {
    if (!(pt.pulse_energy_pj >= 0)) throw FitError("pulse energies must be >= 0");
    if (!(pt.rate_cps >= 0) || !std::isfinite(pt.rate_cps)) {
      throw FitError("rates must be finite and >= 0");
    }
    if (!(pt.weight > 0)) throw FitError("weights must be > 0");
    if (!energies.insert(pt.pulse_energy_pj).second) {
      throw FitError("pulse energies must be distinct");
    }
  }
  if (!(tau_p_s > 0) || !(tau_r_s > 0)) throw FitError("fixed tau_p and tau_r must be > 0");
}

FitResult fit_saturation(const SaturationDataset& data, const SaturationFitOptions& options) {
  data.validate();

  const bool fit_slope = !options.fix_background_slope.has_value();
  const double fixed_slope = options.fix_background_slope.value_or(0.0);
  if (!fit_slope && fixed_slope < 0) throw FitError("fixed background slope must be >= 0");

  // Default initialization: max rate from the data ceiling, slope from the
  // two highest-energy points, saturation energy from the half-max crossing.
  auto sorted = data.points;
  std::sort(sorted.begin(), sorted.end(),
            [](const SaturationPoint& a, const SaturationPoint& b) {
              return a.pulse_energy_pj < b.pulse_energy_pj;
            });

  SaturationParams init;
  init.tau_p_s = data.tau_p_s;
  init.tau_r_s = data.tau_r_s;
  if (options.init) {
    init = *options.init;
    init.tau_p_s = data.tau_p_s;
    init.tau_r_s = data.tau_r_s;
  } else {
    double max_rate = 0;
    for (const auto& pt : sorted) max_rate = std::max(max_rate, pt.rate_cps);
    init.max_rate_cps = std::max(max_rate, 1e-6);

    const auto& last = sorted[sorted.size() - 1];
    const auto& prev = sorted[sorted.size() - 2];
    const double de = last.pulse_energy_pj - prev.pulse_energy_pj;
    double slope = de > 0 ? (last.rate_cps - prev.rate_cps) / de : 0.0;
    init.background_slope_cps_per_pj = std::max(slope, 1e-9 * init.max_rate_cps);

    double half_crossing = 0;
    for (const auto& pt : sorted) {
      if (pt.rate_cps >= 0.5 * init.max_rate_cps) {
        half_crossing = pt.pulse_energy_pj;
        break;
      }
    }
    if (half_crossing <= 0) {
      half_crossing = sorted[sorted.size() / 2].pulse_energy_pj;
    }
    init.saturation_energy_pj = std::max(half_crossing, 1e-12);
  }

  const int n = static_cast<int>(data.points.size());
  std::vector<double> sqrt_w(n);
  for (int i = 0; i < n; ++i) sqrt_w[i] = std::sqrt(data.points[i].weight);

  auto model = [&](double energy, double max_rate, double e_sat, double slope) {
    return max_rate * excited_population(energy, e_sat, data.tau_p_s, data.tau_r_s) +
           slope * energy;
  };

  ResidualFn residuals = [&](const std::vector<double>& theta, std::vector<double>& r) {
    const double max_rate = std::exp(theta[0]);
    const double e_sat = std::exp(theta[1]);
    const double slope = fit_slope ? std::exp(theta[2]) : fixed_slope;
    for (int i = 0; i < n; ++i) {
      const auto& pt = data.points[i];
      r[i] = sqrt_w[i] * (model(pt.pulse_energy_pj, max_rate, e_sat, slope) - pt.rate_cps);
    }
  };

  double data_scale = 0;
  for (int i = 0; i < n; ++i) {
    data_scale += data.points[i].weight * data.points[i].rate_cps * data.points[i].rate_cps;
  }

  // The half-max heuristic assumes the bend comes from the x/(1+x) factor.
  // When the pulse is short (tau_p << tau_r) saturation is driven by the
  // exponential factor instead and the knee sits at E_half * (tau_p/tau_r) /
  // ln 2; try both starts and keep the better optimum. A caller-supplied
  // init is used verbatim.
  std::vector<double> candidates{init.saturation_energy_pj};
  if (!options.init) {
    const double exp_knee =
        init.saturation_energy_pj * (data.tau_p_s / data.tau_r_s) / 0.6931471805599453;
    if (exp_knee > 0 && exp_knee < 0.9 * init.saturation_energy_pj) {
      candidates.push_back(exp_knee);
    }
  }

  LmOutcome lm;
  bool have_outcome = false;
  for (double e_sat0 : candidates) {
    std::vector<double> theta{std::log(init.max_rate_cps), std::log(e_sat0)};
    if (fit_slope) {
      theta.push_back(std::log(std::max(init.background_slope_cps_per_pj, 1e-30)));
    }
    LmOutcome attempt = lm_minimize(residuals, std::move(theta), n, data_scale);
    if (!have_outcome || attempt.sse < lm.sse) {
      lm = std::move(attempt);
      have_outcome = true;
    }
  }

  // Identifiability: when a pure line through the origin explains the data
  // as well as the full model does, the saturation energy is invisible.
  {
    double swr = 0, swee = 0, wsum = 0, wr = 0;
    for (const auto& pt : data.points) {
      swr += pt.weight * pt.pulse_energy_pj * pt.rate_cps;
      swee += pt.weight * pt.pulse_energy_pj * pt.pulse_energy_pj;
      wsum += pt.weight;
      wr += pt.weight * pt.rate_cps;
    }
    const double c = swee > 0 ? swr / swee : 0;
    const double mean = wr / wsum;
    double sse_linear = 0, tss = 0;
    for (const auto& pt : data.points) {
      const double d = c * pt.pulse_energy_pj - pt.rate_cps;
      sse_linear += pt.weight * d * d;
      tss += pt.weight * (pt.rate_cps - mean) * (pt.rate_cps - mean);
    }
    const int dof = n - (fit_slope ? 3 : 2);
    const double noise_band = dof > 0 ? 6.0 * std::min(lm.sse, sse_linear) / dof : 0.0;
    if (lm.singular_geometry || sse_linear <= lm.sse + noise_band + 1e-9 * tss) {
      throw FitError(
          "singular fit geometry: the sampled pulse energies do not identify the "
          "saturation energy (all points in the linear regime)");
    }
  }

  FitResult result;
  result.params.max_rate_cps = std::exp(lm.theta[0]);
  result.params.saturation_energy_pj = std::exp(lm.theta[1]);
  result.params.background_slope_cps_per_pj = fit_slope ? std::exp(lm.theta[2]) : fixed_slope;
  result.params.tau_p_s = data.tau_p_s;
  result.params.tau_r_s = data.tau_r_s;
  result.residual_norm = std::sqrt(lm.sse);
  result.converged = lm.converged;
  result.iterations = lm.iterations;
  result.message = lm.converged ? "converged" : "iteration limit reached";

  const int p = fit_slope ? 3 : 2;
  if (!lm.covariance.empty()) {
    // Chain rule from log-parameters: sigma_x = x * sigma_log_x.
    result.std_errors[0] =
        result.params.max_rate_cps * std::sqrt(std::max(lm.covariance[0 * p + 0], 0.0));
    result.std_errors[1] = result.params.saturation_energy_pj *
                           std::sqrt(std::max(lm.covariance[1 * p + 1], 0.0));
    result.std_errors[2] =
        fit_slope ? result.params.background_slope_cps_per_pj *
                        std::sqrt(std::max(lm.covariance[2 * p + 2], 0.0))
                  : 0.0;
  } else {
    result.std_errors = {std::numeric_limits<double>::quiet_NaN(),
                         std::numeric_limits<double>::quiet_NaN(),
                         std::numeric_limits<double>::quiet_NaN()};
  }

  // Degenerate outcomes mean the bend of the curve was never observed: the
  // saturation energy runs beyond the sampled range, or the saturating
  // component collapses and the background slope absorbs the data.
  const double max_energy = sorted.back().pulse_energy_pj;
  double max_rate_in_data = 0;
  for (const auto& pt : sorted) max_rate_in_data = std::max(max_rate_in_data, pt.rate_cps);
  if (result.params.saturation_energy_pj > 100.0 * std::max(max_energy, 1e-12) ||
      result.params.max_rate_cps < 1e-9 * std::max(max_rate_in_data, 1e-12)) {
    throw FitError(
        "singular fit geometry: the sampled pulse energies do not identify the "
        "saturation energy (all points in the linear regime)");
  }
  return result;
}

std::vector<std::pair<double, double>> extract_rho_curve(const FitResult& fit,
                                                         std::span<const double> energies_pj) {
  if (!fit.converged) {
    throw FitError("extract_rho_curve: fit did not converge");
  }
  std::vector<std::pair<double, double>> curve;
  curve.reserve(energies_pj.size());
  for (double e : energies_pj) {
    curve.emplace_back(e, excited_population(e, fit.params.saturation_energy_pj,
                                             fit.params.tau_p_s, fit.params.tau_r_s));
  }
  return curve;
}

NoiseCurveFit fit_noise_curve(std::span<const std::pair<double, double>> rho_ratio_points,
                              double n_bg_per_bin, double pulses_per_bin) {
  if (rho_ratio_points.empty()) {
    throw FitError("fit_noise_curve: need at least one (rho, ratio) point");
  }
  if (n_bg_per_bin < 0) throw FitError("fit_noise_curve: background per bin must be >= 0");
  if (n_bg_per_bin > 0 && !(pulses_per_bin > 0)) {
    throw FitError("fit_noise_curve: pulses per bin required when background is present");
  }
  double rho_max = 0;
  for (const auto& [rho, ratio] : rho_ratio_points) {
    if (!(rho > 0 && rho <= 1)) throw FitError("fit_noise_curve: rho must be in (0, 1]");
    if (!(ratio > 0) || !std::isfinite(ratio)) {
      throw FitError("fit_noise_curve: ratios must be finite and > 0");
    }
    rho_max = std::max(rho_max, rho);
  }
  if (rho_max < 1e-6) {
    throw FitError("fit_noise_curve: zeta is unidentifiable with rho ~ 0 everywhere");
  }

  const int n = static_cast<int>(rho_ratio_points.size());

  auto model = [&](double rho, double zeta) {
    return noise_ratio_model_rho(rho, zeta, n_bg_per_bin, pulses_per_bin);
  };

  // Logistic parameterization keeps zeta inside (0, 1).
  auto to_zeta = [](double u) { return 1.0 / (1.0 + std::exp(-u)); };

  ResidualFn residuals = [&](const std::vector<double>& theta, std::vector<double>& r) {
    const double zeta = to_zeta(theta[0]);
    for (int i = 0; i < n; ++i) {
      const auto& [rho, ratio] = rho_ratio_points[i];
      r[i] = model(rho, zeta) - ratio;
    }
  };

  // Initialize from the highest-rho point via the background-free inverse.
  double ratio_at_max = 1;
  for (const auto& [rho, ratio] : rho_ratio_points) {
    if (rho == rho_max) ratio_at_max = ratio;
  }
  double zeta0 = (1.0 - ratio_at_max * ratio_at_max) / rho_max;
  zeta0 = std::clamp(zeta0, 1e-3, 1.0 - 1e-3);

  double data_scale = 0;
  for (const auto& [rho, ratio] : rho_ratio_points) data_scale += ratio * ratio;

  LmOutcome lm = lm_minimize(residuals, {std::log(zeta0 / (1.0 - zeta0))}, n, data_scale);

  NoiseCurveFit fit;
  fit.zeta = to_zeta(lm.theta[0]);
  fit.converged = lm.converged;
  fit.iterations = lm.iterations;
  fit.residual_norm = std::sqrt(lm.sse);
  if (!lm.covariance.empty()) {
    const double dz_du = fit.zeta * (1.0 - fit.zeta);
    fit.std_error = dz_du * std::sqrt(std::max(lm.covariance[0], 0.0));
  } else {
    fit.std_error = std::numeric_limits<double>::quiet_NaN();
  }
  return fit;
}

}  // namespace photongun
