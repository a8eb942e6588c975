#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "photongun/emitter.hpp"

namespace photongun {

enum class Origin : std::uint8_t { molecule = 0, background = 1 };

// One detected photon. Timestamps are integer picoseconds from run start,
// which resolves the pulse width and the lifetime without floating-point
// ordering hazards.
struct PhotonRecord {
  std::uint64_t t_ps = 0;
  Origin origin = Origin::molecule;
  std::uint8_t channel = 0;

  friend bool operator==(const PhotonRecord&, const PhotonRecord&) = default;
};

// Cascaded transmissions of the collection/detection path. Losses act on a
// photon as a single compound Bernoulli with probability total_zeta();
// distributionally identical to per-stage draws.
struct DetectionChain {
  double objective_t = 0.90;
  double optics_t = 0.95;
  double detector_qe = 0.80;
  double extra_t = 1.0;

  double total_zeta() const { return objective_t * optics_t * detector_qe * extra_t; }

  void validate() const;
};

// Background photon flux as seen by the detector: either a fixed rate or a
// rate linear in pulse energy.
struct BackgroundModel {
  enum class Mode { fixed_rate, energy_linear };

  Mode mode = Mode::fixed_rate;
  double rate_cps = 0.0;
  double slope_cps_per_pj = 0.0;

  double detected_rate_cps(double pulse_energy_pj) const {
    return mode == Mode::fixed_rate ? rate_cps : slope_cps_per_pj * pulse_energy_pj;
  }

  void validate() const;
};

struct SimConfig {
  EmitterParams emitter;
  ExcitationConfig excitation;
  DetectionChain chain;
  BackgroundModel background;
  std::uint64_t seed = 1;
  // When set, replaces the computed excitation probability per pulse (used
  // e.g. to pin a weak-drive operating point exactly).
  std::optional<double> rho_override;

  double rho() const;
  void validate() const;
};

struct SimSummary {
  std::uint64_t pulses = 0;
  std::uint64_t signal_emitted = 0;
  std::uint64_t signal_detected = 0;
  std::uint64_t signal_lost = 0;
  std::uint64_t background_detected = 0;
  std::uint64_t triplet_lost_pulses = 0;  // pulses arriving while shelved
  std::uint64_t triplet_entries = 0;      // intersystem-crossing events
  double duration_s = 0;
  double rho = 0;
  double zeta = 0;
  double background_rate_cps = 0;
  std::uint64_t seed = 0;
};

struct SimResult {
  std::vector<PhotonRecord> records;
  SimSummary summary;
};

using RecordSink = std::function<void(const PhotonRecord&)>;

// Runs the pulsed-emitter Monte Carlo and hands records to `sink` in
// nondecreasing timestamp order. Per pulse: a shelved molecule produces
// nothing; otherwise a signal photon is emitted with probability rho*qe at
// the pulse time plus an exponential lifetime delay and survives the chain
// with probability total_zeta(); the molecule then shelves with probability
// rho*k23/(k21+k23) for an exponential dwell. Background photons form a
// homogeneous Poisson process at the configured detected rate.
// Deterministic for a fixed config including seed.
SimSummary simulate_stream(const SimConfig& config, const RecordSink& sink);

// Convenience wrapper collecting the records.
SimResult simulate_stream(const SimConfig& config);

// Independent Bernoulli(transmission) retention per record; order preserved.
std::vector<PhotonRecord> apply_loss(std::span<const PhotonRecord> stream,
                                     double transmission, std::uint64_t seed);

// Routes each record to arm A with the given probability, else arm B.
// Output channels are tagged 0 (A) and 1 (B); the union equals the input.
std::pair<std::vector<PhotonRecord>, std::vector<PhotonRecord>> hbt_split(
    std::span<const PhotonRecord> stream, double ratio, std::uint64_t seed);

}  // namespace photongun
