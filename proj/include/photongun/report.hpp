#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "photongun/simulator.hpp"
#include "photongun/statistics.hpp"

namespace photongun {

// Everything needed to reproduce and audit one simulation run. Every number
// here is recomputable from the manifest files plus the seed.
struct RunReport {
  std::string scenario_name;
  std::string tool_version;
  std::string config_hash_hex;
  std::uint64_t seed = 0;
  SimSummary summary;
  NoiseReport noise;
  std::optional<double> g2_zero;
  std::string g2_mode = "off";
  double analysis_bin_width_s = 0;
  std::map<std::string, std::string> files;  // role -> path
};

void write_report_kv(const std::filesystem::path& path, const RunReport& report);
RunReport read_report_kv(const std::filesystem::path& path);
std::string format_report_text(const RunReport& report);

// Locale-independent shortest round-trip formatting for doubles.
std::string format_number(double v);

}  // namespace photongun
