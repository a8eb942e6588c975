#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "photongun/simulator.hpp"
#include "photongun/statistics.hpp"

namespace photongun {

struct AnalysisConfig {
  double bin_width_s = 1e-3;
  enum class G2 { off, continuous, pulsed } g2_mode = G2::off;
  double tau_max_s = 3e-4;
  int g2_bins = 201;
  double split_ratio = 0.5;
};

struct SweepConfig {
  enum class Axis { none, pulse_energy, rho, zeta } axis = Axis::none;
  std::vector<double> grid;
  int seeds = 8;
};

// Named bundle of a simulation configuration plus analysis settings; the
// unit of work the CLI operates on.
struct Scenario {
  std::string name;
  SimConfig sim;
  AnalysisConfig analysis;
  SweepConfig sweep;
  std::string output_dir;
};

// Flat "key = value" text with dotted section keys and '#' comments; units
// are explicit in the key names. Unknown keys are rejected with a line
// diagnostic.
Scenario parse_scenario_text(std::string_view text, const std::string& source_name);
Scenario parse_scenario_file(const std::filesystem::path& path);

// Canonical form: every resolved key, sorted, one per line. parse(serialize)
// reproduces the configuration exactly.
std::string serialize_scenario(const Scenario& scenario);

// FNV-1a over the canonical serialization (seed excluded), as a stable
// configuration fingerprint.
std::uint64_t config_hash(const Scenario& scenario);

// Grid expression: "1,2,5", "linspace:a:b:n" or "logspace:a:b:n".
std::vector<double> parse_grid(std::string_view spec);

}  // namespace photongun
