// photongun - pulsed single-emitter photon stream simulator and analysis CLI.

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "photongun/commands.hpp"
#include "photongun/version.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo photon streams from a pulsed single emitter, with noise, "
               "correlation and saturation-fit analysis"};
  app.set_version_flag("--version", std::string(photongun::kVersion));
  app.require_subcommand(1);

  photongun::cli::SimulateOptions sim_opts;
  auto* simulate = app.add_subcommand("simulate", "run a scenario and write timestamps + report");
  simulate->add_option("scenario", sim_opts.scenario_path, "scenario file")->required();
  simulate->add_option("--out", sim_opts.out_dir, "output directory");
  std::optional<std::uint64_t> sim_seed;
  simulate->add_option("--seed", sim_seed, "override the scenario seed");
  simulate->add_flag("--csv", sim_opts.csv_mirror, "also write a CSV mirror of the timestamps");
  simulate->add_flag("--quiet", sim_opts.quiet, "suppress stdout report");

  photongun::cli::AnalyzeOptions an_opts;
  auto* analyze = app.add_subcommand("analyze", "compute statistics from a timestamp file");
  analyze->add_option("input", an_opts.input_path, "timestamp file (binary or CSV)")->required();
  analyze->add_option("--out", an_opts.out_dir, "output directory");
  analyze->add_option("--bin-width-ms", an_opts.bin_width_ms, "bin width in ms (default 1)");
  analyze->add_option("--duration-s", an_opts.duration_s,
                      "trace span in s (default: inferred from the last record)");
  analyze->add_option("--g2", an_opts.g2_mode, "g2 mode: off | continuous | pulsed");
  analyze->add_option("--tau-max-s", an_opts.tau_max_s, "correlation window half-width in s");
  analyze->add_option("--rep-rate-hz", an_opts.rep_rate_hz,
                      "repetition rate (photons/pulse numbers and pulsed g2 peaks)");
  analyze->add_option("--g2-bins", an_opts.g2_bins, "histogram bins (default 201)");
  std::optional<std::uint64_t> split_seed;
  analyze->add_option("--split-seed", split_seed, "seed for the HBT splitter");
  analyze->add_flag("--quiet", an_opts.quiet, "suppress stdout report");

  photongun::cli::SweepOptions sw_opts;
  auto* sweep = app.add_subcommand("sweep", "run a parameter sweep with seed replicas");
  sweep->add_option("scenario", sw_opts.scenario_path, "scenario file")->required();
  sweep->add_option("--out", sw_opts.out_dir, "output directory");
  std::optional<std::string> axis, grid;
  std::optional<int> seeds;
  std::optional<std::uint64_t> sweep_seed;
  sweep->add_option("--axis", axis, "sweep axis: E_p | rho | zeta");
  sweep->add_option("--grid", grid, "grid: v1,v2,... or linspace:a:b:n or logspace:a:b:n");
  sweep->add_option("--seeds", seeds, "seed replicas per grid point");
  sweep->add_option("--seed", sweep_seed, "override the scenario root seed");
  sweep->add_option("--jobs", sw_opts.jobs, "worker threads (default 1)");
  sweep->add_flag("--quiet", sw_opts.quiet, "suppress stdout table");

  photongun::cli::FitOptions fit_opts;
  auto* fit = app.add_subcommand("fit", "fit the saturation curve to a rate-vs-energy CSV");
  fit->add_option("data", fit_opts.data_path, "CSV with E_p_pJ,rate_cps[,weight]")->required();
  fit->add_option("--out", fit_opts.out_dir, "output directory");
  std::vector<std::string> fixes;
  fit->add_option("--fix", fixes,
                  "fix parameters, e.g. --fix tau_p=13e-12,tau_r=1e-8 or --fix alpha=0")
      ->delimiter(',');
  fit->add_option("--init-max-rate", fit_opts.init_max_rate, "initial max rate (counts/s)");
  fit->add_option("--init-e-sat", fit_opts.init_saturation_energy, "initial E_sat (pJ)");
  fit->add_option("--init-alpha", fit_opts.init_alpha, "initial background slope");
  fit->add_flag("--quiet", fit_opts.quiet, "suppress stdout report");

  photongun::cli::ReportOptions rep_opts;
  auto* report = app.add_subcommand("report", "print a stored run report");
  report->add_option("report", rep_opts.report_path, "report .kv file")->required();
  report->add_flag("--verify", rep_opts.verify,
                   "recompute the statistics from the manifest files and compare");
  report->add_flag("--quiet", rep_opts.quiet, "suppress stdout report");

  CLI11_PARSE(app, argc, argv);

  if (simulate->parsed()) {
    sim_opts.seed = sim_seed;
    return photongun::cli::cmd_simulate(sim_opts);
  }
  if (analyze->parsed()) {
    an_opts.split_seed = split_seed;
    return photongun::cli::cmd_analyze(an_opts);
  }
  if (sweep->parsed()) {
    sw_opts.axis = axis;
    sw_opts.grid = grid;
    sw_opts.seeds = seeds;
    sw_opts.seed = sweep_seed;
    return photongun::cli::cmd_sweep(sw_opts);
  }
  if (fit->parsed()) {
    for (const std::string& fix : fixes) {
      const auto eq = fix.find('=');
      if (eq == std::string::npos) {
        std::cerr << "fit: --fix expects key=value, got '" << fix << "'\n";
        return 2;
      }
      const std::string key = fix.substr(0, eq);
      const double value = std::strtod(fix.c_str() + eq + 1, nullptr);
      if (key == "tau_p") {
        fit_opts.tau_p_s = value;
      } else if (key == "tau_r") {
        fit_opts.tau_r_s = value;
      } else if (key == "alpha") {
        fit_opts.fix_alpha = value;
      } else {
        std::cerr << "fit: unknown --fix key '" << key << "' (tau_p, tau_r, alpha)\n";
        return 2;
      }
    }
    return photongun::cli::cmd_fit(fit_opts);
  }
  return photongun::cli::cmd_report(rep_opts);
}
