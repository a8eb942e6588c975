#include "photongun/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

#include "photongun/rng.hpp"

namespace photongun {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::domain_error(what);
}

// Largest run length, in ps, for which pulse times stay exactly
// representable in double before rounding to the integer grid.
constexpr double kMaxDurationPs = 9.0e15;  // 2^53 ~ 9.007e15

struct LaterFirst {
  bool operator()(const PhotonRecord& a, const PhotonRecord& b) const {
    if (a.t_ps != b.t_ps) return a.t_ps > b.t_ps;
    return a.origin > b.origin;  // deterministic tie order
  }
};

}  // namespace

void DetectionChain::validate() const {
  require(objective_t > 0 && objective_t <= 1, "chain.objective_T must be in (0, 1]");
  require(optics_t > 0 && optics_t <= 1, "chain.optics_T must be in (0, 1]");
  require(detector_qe > 0 && detector_qe <= 1, "chain.detector_qe must be in (0, 1]");
  require(extra_t > 0 && extra_t <= 1, "chain.extra_T must be in (0, 1]");
}

void BackgroundModel::validate() const {
  require(rate_cps >= 0, "background.rate_cps must be >= 0");
  require(slope_cps_per_pj >= 0, "background.alpha_cps_per_pJ must be >= 0");
}

double SimConfig::rho() const {
  if (rho_override) return *rho_override;
  return excited_population(excitation.pulse_energy_pj, excitation.saturation_energy_pj,
                            excitation.pulse_width_s, emitter.radiative_lifetime_s());
}

void SimConfig::validate() const {
  emitter.validate();
  excitation.validate();
  chain.validate();
  background.validate();
  if (rho_override) {
    require(*rho_override >= 0 && *rho_override <= 1, "rho_override must be in [0, 1]");
  }
}

SimSummary simulate_stream(const SimConfig& config, const RecordSink& sink) {
  config.validate();

  const double duration_ps = std::round(config.excitation.duration_s * 1e12);
  const double pulses_d = std::floor(config.excitation.duration_s * config.excitation.rep_rate_hz);
  if (duration_ps > kMaxDurationPs || pulses_d > 1e12) {
    throw std::overflow_error("run length exceeds the pulse-count capacity");
  }
  const std::uint64_t n_pulses = static_cast<std::uint64_t>(pulses_d);

  const double rho = config.rho();
  const double p_emit = rho * config.emitter.quantum_efficiency;
  const double p_shelve = rho * triplet_branching(config.emitter);
  const double zeta = config.chain.total_zeta();
  const double tau_r_ps = config.emitter.radiative_lifetime_s() * 1e12;
  const double dwell_ps = config.emitter.dark_period_s() * 1e12;
  const double period_ps = 1e12 / config.excitation.rep_rate_hz;
  const double bg_rate_cps = config.background.detected_rate_cps(config.excitation.pulse_energy_pj);
  const double bg_gap_ps = bg_rate_cps > 0 ? 1e12 / bg_rate_cps : 0;

  rng::Engine emission = rng::Engine::for_stream(config.seed, rng::Stream::emission);
  rng::Engine loss = rng::Engine::for_stream(config.seed, rng::Stream::loss);
  rng::Engine background = rng::Engine::for_stream(config.seed, rng::Stream::background);

  SimSummary summary;
  summary.pulses = n_pulses;
  summary.duration_s = config.excitation.duration_s;
  summary.rho = rho;
  summary.zeta = zeta;
  summary.background_rate_cps = bg_rate_cps;
  summary.seed = config.seed;

  std::priority_queue<PhotonRecord, std::vector<PhotonRecord>, LaterFirst> pending;

  double next_bg_ps = bg_rate_cps > 0 ? background.exponential(bg_gap_ps)
                                      : std::numeric_limits<double>::infinity();
  auto push_background_up_to = [&](double t_ps) {
    while (next_bg_ps <= t_ps && next_bg_ps < duration_ps) {
      pending.push({static_cast<std::uint64_t>(std::llround(next_bg_ps)),
                    Origin::background, 0});
      ++summary.background_detected;
      next_bg_ps += background.exponential(bg_gap_ps);
    }
  };

  double triplet_until_ps = -1.0;
  for (std::uint64_t k = 0; k < n_pulses; ++k) {
    const double t_pulse_ps = static_cast<double>(k) * period_ps;

    push_background_up_to(t_pulse_ps);
    while (!pending.empty() &&
           static_cast<double>(pending.top().t_ps) <= t_pulse_ps) {
      sink(pending.top());
      pending.pop();
    }

    if (t_pulse_ps < triplet_until_ps) {
      // Pulse arrives during a dark dwell: absorbed and ignored.
      ++summary.triplet_lost_pulses;
      continue;
    }

    if (emission.bernoulli(p_emit)) {
      ++summary.signal_emitted;
      const double t_photon_ps = t_pulse_ps + emission.exponential(tau_r_ps);
      if (loss.bernoulli(zeta)) {
        ++summary.signal_detected;
        pending.push({static_cast<std::uint64_t>(std::llround(t_photon_ps)),
                      Origin::molecule, 0});
      } else {
        ++summary.signal_lost;
      }
    }
    if (p_shelve > 0 && emission.bernoulli(p_shelve)) {
      ++summary.triplet_entries;
      triplet_until_ps = t_pulse_ps + emission.exponential(dwell_ps);
    }
  }

  push_background_up_to(duration_ps);
  while (!pending.empty()) {
    sink(pending.top());
    pending.pop();
  }

  return summary;
}

SimResult simulate_stream(const SimConfig& config) {
  SimResult result;
  const double expected = config.excitation.duration_s *
                          (config.excitation.rep_rate_hz + config.background.detected_rate_cps(
                                                               config.excitation.pulse_energy_pj));
  if (expected > 0 && expected < 5e8) {
    result.records.reserve(static_cast<std::size_t>(expected * 1.05) + 64);
  }
  result.summary = simulate_stream(
      config, [&](const PhotonRecord& r) { result.records.push_back(r); });
  return result;
}

std::vector<PhotonRecord> apply_loss(std::span<const PhotonRecord> stream,
                                     double transmission, std::uint64_t seed) {
  require(transmission >= 0 && transmission <= 1,
          "apply_loss: transmission must be in [0, 1]");
  rng::Engine engine = rng::Engine::for_stream(seed, rng::Stream::loss);
  std::vector<PhotonRecord> kept;
  kept.reserve(static_cast<std::size_t>(static_cast<double>(stream.size()) * transmission) + 16);
  for (const PhotonRecord& r : stream) {
    if (engine.bernoulli(transmission)) kept.push_back(r);
  }
  return kept;
}

std::pair<std::vector<PhotonRecord>, std::vector<PhotonRecord>> hbt_split(
    std::span<const PhotonRecord> stream, double ratio, std::uint64_t seed) {
  require(ratio >= 0 && ratio <= 1, "hbt_split: ratio must be in [0, 1]");
  rng::Engine engine = rng::Engine::for_stream(seed, rng::Stream::split);
  std::vector<PhotonRecord> arm_a;
  std::vector<PhotonRecord> arm_b;
  for (PhotonRecord r : stream) {
    if (engine.bernoulli(ratio)) {
      r.channel = 0;
      arm_a.push_back(r);
    } else {
      r.channel = 1;
      arm_b.push_back(r);
    }
  }
  return {std::move(arm_a), std::move(arm_b)};
}

}  // namespace photongun
