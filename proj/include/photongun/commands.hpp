#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace photongun::cli {

// Subcommand entry points. Each returns a process exit code per the
// contract: 0 ok, 2 configuration, 3 I/O, 4 malformed input file, 5 fit
// failure. Diagnostics go to stderr, results to stdout and the output dir.
// Seed precedence: --seed flag, then PHOTONGUN_SEED, then the scenario.

struct SimulateOptions {
  std::string scenario_path;
  std::string out_dir;  // empty: scenario output.dir, else directory of scenario
  std::optional<std::uint64_t> seed;
  bool csv_mirror = false;
  bool quiet = false;
};
int cmd_simulate(const SimulateOptions& options);

struct AnalyzeOptions {
  std::string input_path;
  std::string out_dir;
  std::optional<double> bin_width_ms;
  std::optional<double> duration_s;
  std::string g2_mode = "off";  // off | continuous | pulsed
  std::optional<double> tau_max_s;
  std::optional<double> rep_rate_hz;  // enables photons-per-pulse and pulsed g2
  int g2_bins = 201;
  std::optional<std::uint64_t> split_seed;
  bool quiet = false;
};
int cmd_analyze(const AnalyzeOptions& options);

struct SweepOptions {
  std::string scenario_path;
  std::string out_dir;
  std::optional<std::string> axis;  // E_p | rho | zeta
  std::optional<std::string> grid;
  std::optional<int> seeds;
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  bool quiet = false;
};
int cmd_sweep(const SweepOptions& options);

struct FitOptions {
  std::string data_path;
  std::string out_dir;
  std::optional<double> tau_p_s;
  std::optional<double> tau_r_s;
  std::optional<double> fix_alpha;
  std::optional<double> init_max_rate;
  std::optional<double> init_saturation_energy;
  std::optional<double> init_alpha;
  bool quiet = false;
};
int cmd_fit(const FitOptions& options);

struct ReportOptions {
  std::string report_path;
  bool verify = false;
  bool quiet = false;
};
int cmd_report(const ReportOptions& options);

}  // namespace photongun::cli
