#include "photongun/emitter.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace photongun {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::domain_error(what);
}

}  // namespace

void EmitterParams::validate() const {
  require(k21 > 0, "emitter.k21_per_s must be > 0");
  require(k23 >= 0, "emitter.k23_per_s must be >= 0");
  require(k31 > 0, "emitter.k31_per_s must be > 0");
  require(tau_r_s >= 0, "emitter.tau_r_s must be >= 0 (0 selects 1/k21)");
  require(quantum_efficiency > 0 && quantum_efficiency <= 1,
          "emitter.quantum_efficiency must be in (0, 1]");
}

void ExcitationConfig::validate() const {
  require(pulse_energy_pj >= 0, "excitation.pulse_energy_pJ must be >= 0");
  require(saturation_energy_pj > 0, "excitation.saturation_energy_pJ must be > 0");
  require(pulse_width_s > 0, "excitation.pulse_width_s must be > 0");
  require(rep_rate_hz > 0, "excitation.repetition_rate_Hz must be > 0");
  require(duration_s > 0, "excitation.duration_s must be > 0");
  require(rep_rate_hz * duration_s >= 1.0,
          "excitation: run must cover at least one pulse (repetition_rate_Hz * duration_s >= 1)");
}

void SaturationParams::validate() const {
  require(max_rate_cps > 0, "saturation max_rate_cps must be > 0");
  require(saturation_energy_pj > 0, "saturation_energy_pJ must be > 0");
  require(background_slope_cps_per_pj >= 0, "background slope must be >= 0");
  require(tau_p_s > 0, "tau_p_s must be > 0");
  require(tau_r_s > 0, "tau_r_s must be > 0");
}

double excited_population(double pulse_energy_pj, double saturation_energy_pj,
                          double tau_p_s, double tau_r_s) {
  require(saturation_energy_pj > 0, "excited_population: saturation energy must be > 0");
  require(tau_p_s > 0, "excited_population: pulse width must be > 0");
  require(tau_r_s > 0, "excited_population: lifetime must be > 0");
  require(pulse_energy_pj >= 0, "excited_population: pulse energy must be >= 0");

  const double x = pulse_energy_pj / saturation_energy_pj;
  // -expm1 keeps full precision when the exponent is tiny.
  const double pumped = -std::expm1(-(tau_p_s / tau_r_s) * (1.0 + x));
  return x / (1.0 + x) * pumped;
}

double detected_rate(double pulse_energy_pj, const SaturationParams& params) {
  params.validate();
  const double rho = excited_population(pulse_energy_pj, params.saturation_energy_pj,
                                        params.tau_p_s, params.tau_r_s);
  return params.max_rate_cps * rho + params.background_slope_cps_per_pj * pulse_energy_pj;
}

double triplet_branching(const EmitterParams& params) {
  params.validate();
  return params.k23 / (params.k21 + params.k23);
}

double shelving_occupancy(const EmitterParams& params, double rep_rate_hz, double rho) {
  params.validate();
  require(rep_rate_hz > 0, "shelving_occupancy: repetition rate must be > 0");
  require(rho >= 0 && rho <= 1, "shelving_occupancy: rho must be in [0, 1]");

  const double enter = rho * triplet_branching(params);  // per ground-state pulse
  const double stay = std::exp(-params.k31 / rep_rate_hz);
  const double denom = 1.0 - stay + enter * stay;
  if (denom <= 0) return 0.0;  // rep_rate -> 0: every dwell ends before the next pulse
  return enter * stay / denom;
}

}  // namespace photongun
