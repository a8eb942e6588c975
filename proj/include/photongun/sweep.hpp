#pragma once

#include <optional>
#include <vector>

#include "photongun/fitting.hpp"
#include "photongun/scenario.hpp"

namespace photongun {

struct SweepRow {
  double axis_value = 0;
  double measured_ratio_mean = 0;
  double measured_ratio_se = 0;
  double model_ratio = 0;
  double mean_rate_cps = 0;
  double rho = 0;
  double zeta = 0;
  int seeds = 0;
};

struct SweepTable {
  SweepConfig::Axis axis = SweepConfig::Axis::none;
  std::vector<SweepRow> rows;
  // For rho-axis sweeps, the detection efficiency recovered from the
  // measured (rho, ratio) points.
  std::optional<NoiseCurveFit> zeta_fit;
};

// Runs every (grid point, seed replica) pair, in parallel up to `jobs`
// threads. Seeds derive deterministically from the scenario root seed and
// the (point, replica) index, so results do not depend on scheduling.
SweepTable run_sweep(const Scenario& scenario, int jobs = 1);

}  // namespace photongun
