#pragma once

namespace photongun {

// Single-molecule photophysics: three-level scheme with ground state,
// emitting excited state (decay rate k21) and a shelved triplet reached by
// intersystem crossing (k23) that empties at k31.
struct EmitterParams {
  double k21 = 1e8;  // excited-state decay rate, 1/s
  double k23 = 1e4;  // intersystem-crossing rate, 1/s
  double k31 = 6e3;  // triplet decay rate, 1/s
  double tau_r_s = 0;  // radiative lifetime; 0 selects the 1/k21 default
  double quantum_efficiency = 1.0;

  double radiative_lifetime_s() const { return tau_r_s > 0 ? tau_r_s : 1.0 / k21; }

  // Mean dwell in the shelved state, s.
  double dark_period_s() const { return 1.0 / k31; }

  void validate() const;
};

// One pulsed-excitation run.
struct ExcitationConfig {
  double pulse_energy_pj = 0;
  double saturation_energy_pj = 1.0;
  double pulse_width_s = 13e-12;
  double rep_rate_hz = 15e3;
  double duration_s = 1.0;

  void validate() const;
};

// Parameters of the saturation curve  rate(E) = max_rate * rho(E) + slope * E.
struct SaturationParams {
  double max_rate_cps = 0;
  double saturation_energy_pj = 0;
  double background_slope_cps_per_pj = 0;
  double tau_p_s = 13e-12;
  double tau_r_s = 10e-9;

  void validate() const;
};

// Excited-state population left by one pulse. Exact solution of the driven
// two-level rate equation  drho/dt = W (1 - rho) - rho / tau_r  integrated
// over the pulse, with pump rate W = (E/E_sat) / tau_r.
double excited_population(double pulse_energy_pj, double saturation_energy_pj,
                          double tau_p_s, double tau_r_s);

// Detected count rate vs pulse energy (saturating signal plus linear
// background).
double detected_rate(double pulse_energy_pj, const SaturationParams& params);

// Probability per excitation of shelving into the triplet, k23/(k21+k23).
double triplet_branching(const EmitterParams& params);

// Steady-state fraction of pulses arriving while the molecule is shelved.
// Closed form of the two-state chain sampled at pulse times: a ground-state
// pulse enters the triplet with probability rho*k23/(k21+k23), and a dwell
// survives one inter-pulse interval with probability exp(-k31/rep_rate).
double shelving_occupancy(const EmitterParams& params, double rep_rate_hz, double rho);

}  // namespace photongun
