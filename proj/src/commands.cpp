#include "photongun/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "photongun/errors.hpp"
#include "photongun/fitting.hpp"
#include "photongun/report.hpp"
#include "photongun/scenario.hpp"
#include "photongun/statistics.hpp"
#include "photongun/svg.hpp"
#include "photongun/sweep.hpp"
#include "photongun/timestamp_io.hpp"
#include "photongun/version.hpp"

namespace photongun::cli {

namespace fs = std::filesystem;

namespace {

int map_exception(const char* command) {
  try {
    throw;
  } catch (const ConfigError& e) {
    std::cerr << command << ": " << e.what() << "\n";
    return exit_code::config;
  } catch (const std::domain_error& e) {
    std::cerr << command << ": " << e.what() << "\n";
    return exit_code::config;
  } catch (const std::overflow_error& e) {
    std::cerr << command << ": " << e.what() << "\n";
    return exit_code::config;
  } catch (const std::invalid_argument& e) {
    std::cerr << command << ": " << e.what() << "\n";
    return exit_code::config;
  } catch (const FormatError& e) {
    std::cerr << command << ": " << e.what() << "\n";
    return exit_code::format;
  } catch (const IoError& e) {
    std::cerr << command << ": " << e.what() << "\n";
    return exit_code::io;
  } catch (const FitError& e) {
    std::cerr << command << ": " << e.what() << "\n";
    return exit_code::fit;
  } catch (const std::exception& e) {
    std::cerr << command << ": " << e.what() << "\n";
    return 1;
  }
}

std::optional<std::uint64_t> env_seed() {
  const char* env = std::getenv("PHOTONGUN_SEED");
  if (!env || !*env) return std::nullopt;
  std::uint64_t v = 0;
  const std::string text(env);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("PHOTONGUN_SEED must be an unsigned integer, got '" + text + "'");
  }
  return v;
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag, std::uint64_t scenario_seed) {
  if (flag) return *flag;
  if (auto env = env_seed()) return *env;
  return scenario_seed;
}

fs::path prepare_out_dir(const std::string& requested, const fs::path& fallback) {
  fs::path dir = requested.empty() ? fallback : fs::path(requested);
  if (dir.empty()) dir = ".";
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

std::string hash_hex(std::uint64_t h) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void write_trace_csv(const fs::path& path, const BinnedTrace& trace) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "bin_index,t_start_s,count\n";
  for (std::size_t i = 0; i < trace.counts.size(); ++i) {
    out << i << "," << format_number(static_cast<double>(i) * trace.bin_width_s) << ","
        << trace.counts[i] << "\n";
  }
  if (!out) throw IoError("write failure on " + path.string());
}

void write_g2_csv(const fs::path& path, const G2Histogram& hist) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "tau_s,coincidences,g2\n";
  for (std::size_t i = 0; i < hist.counts.size(); ++i) {
    out << format_number(hist.tau_s[i]) << "," << hist.counts[i] << ","
        << format_number(hist.normalized[i]) << "\n";
  }
  if (!out) throw IoError("write failure on " + path.string());
}

struct G2Outcome {
  double g2_zero = 0;
  G2Histogram histogram;
};

std::optional<G2Outcome> run_g2(const std::vector<PhotonRecord>& records,
                                AnalysisConfig::G2 mode, double tau_max_s, int bins,
                                double split_ratio, double rep_rate_hz, double duration_s,
                                std::uint64_t seed) {
  if (mode == AnalysisConfig::G2::off) return std::nullopt;
  auto [arm_a, arm_b] = hbt_split(records, split_ratio, seed);
  const G2Mode g2mode =
      mode == AnalysisConfig::G2::pulsed ? G2Mode::pulsed : G2Mode::continuous;
  const double period = rep_rate_hz > 0 ? 1.0 / rep_rate_hz : 0.0;
  G2Outcome outcome;
  outcome.histogram =
      g2_histogram(arm_a, arm_b, tau_max_s, bins, g2mode, period, duration_s);
  outcome.g2_zero = outcome.histogram.g2_zero;
  return outcome;
}

}  // namespace

int cmd_simulate(const SimulateOptions& options) {
  try {
    Scenario scenario = parse_scenario_file(options.scenario_path);
    scenario.sim.seed = resolve_seed(options.seed, scenario.sim.seed);

    const fs::path default_dir = scenario.output_dir.empty()
                                     ? fs::path(options.scenario_path).parent_path()
                                     : fs::path(scenario.output_dir);
    const fs::path out_dir = prepare_out_dir(options.out_dir, default_dir);

    SimResult result = simulate_stream(scenario.sim);

    RunReport report;
    report.scenario_name = scenario.name;
    report.tool_version = kVersion;
    report.config_hash_hex = hash_hex(config_hash(scenario));
    report.seed = scenario.sim.seed;
    report.summary = result.summary;
    report.analysis_bin_width_s = scenario.analysis.bin_width_s;

    const BinnedTrace trace = bin_trace(result.records, scenario.analysis.bin_width_s,
                                        scenario.sim.excitation.duration_s);
    report.noise = noise_ratio_measured(trace, scenario.sim.excitation.rep_rate_hz);

    const fs::path ts_path = out_dir / (scenario.name + ".pgun");
    write_timestamps_binary(ts_path, result.records);
    report.files["timestamps"] = ts_path.string();

    if (options.csv_mirror) {
      const fs::path csv_path = out_dir / (scenario.name + ".csv");
      write_timestamps_csv(csv_path, result.records);
      report.files["timestamps_csv"] = csv_path.string();
    }

    const fs::path trace_path = out_dir / (scenario.name + ".trace.csv");
    write_trace_csv(trace_path, trace);
    report.files["trace_csv"] = trace_path.string();

    if (scenario.analysis.g2_mode != AnalysisConfig::G2::off) {
      auto g2 = run_g2(result.records, scenario.analysis.g2_mode, scenario.analysis.tau_max_s,
                       scenario.analysis.g2_bins, scenario.analysis.split_ratio,
                       scenario.sim.excitation.rep_rate_hz, scenario.sim.excitation.duration_s,
                       scenario.sim.seed);
      report.g2_zero = g2->g2_zero;
      report.g2_mode =
          scenario.analysis.g2_mode == AnalysisConfig::G2::pulsed ? "pulsed" : "continuous";
      const fs::path g2_path = out_dir / (scenario.name + ".g2.csv");
      write_g2_csv(g2_path, g2->histogram);
      report.files["g2_csv"] = g2_path.string();
    }

    const fs::path scenario_copy = out_dir / (scenario.name + ".scenario");
    {
      std::ofstream copy(scenario_copy, std::ios::trunc);
      if (!copy) throw IoError("cannot open " + scenario_copy.string() + " for writing");
      copy << serialize_scenario(scenario);
    }
    report.files["scenario"] = scenario_copy.string();

    const fs::path report_kv = out_dir / (scenario.name + ".report.kv");
    write_report_kv(report_kv, report);
    const fs::path report_txt = out_dir / (scenario.name + ".report.txt");
    {
      std::ofstream txt(report_txt, std::ios::trunc);
      if (!txt) throw IoError("cannot open " + report_txt.string() + " for writing");
      txt << format_report_text(report);
    }

    if (!options.quiet) std::cout << format_report_text(report);
    return exit_code::ok;
  } catch (...) {
    return map_exception("simulate");
  }
}

int cmd_analyze(const AnalyzeOptions& options) {
  try {
    const std::vector<PhotonRecord> records = read_timestamps_auto(options.input_path);

    const double bin_width_s = options.bin_width_ms.value_or(1.0) * 1e-3;
    const double duration_s = options.duration_s.value_or(0.0);
    const BinnedTrace trace = bin_trace(records, bin_width_s, duration_s);
    const NoiseReport noise = noise_ratio_measured(trace, options.rep_rate_hz.value_or(0.0));

    const fs::path out_dir =
        prepare_out_dir(options.out_dir, fs::path(options.input_path).parent_path());
    const std::string stem = fs::path(options.input_path).stem().string();

    RunReport report;
    report.scenario_name = stem;
    report.tool_version = kVersion;
    report.config_hash_hex = "analyze";
    report.seed = options.split_seed.value_or(0);
    report.summary.duration_s =
        duration_s > 0 ? duration_s
                       : (records.empty() ? 0.0 : static_cast<double>(records.back().t_ps) * 1e-12);
    report.summary.pulses = options.rep_rate_hz
                                ? static_cast<std::uint64_t>(std::floor(
                                      *options.rep_rate_hz * report.summary.duration_s))
                                : 0;
    for (const auto& r : records) {
      if (r.origin == Origin::molecule) {
        ++report.summary.signal_detected;
      } else {
        ++report.summary.background_detected;
      }
    }
    report.noise = noise;
    report.analysis_bin_width_s = bin_width_s;
    report.files["timestamps"] = options.input_path;

    const fs::path trace_path = out_dir / (stem + ".trace.csv");
    write_trace_csv(trace_path, trace);
    report.files["trace_csv"] = trace_path.string();

    if (options.g2_mode != "off") {
      AnalysisConfig::G2 mode;
      if (options.g2_mode == "continuous") {
        mode = AnalysisConfig::G2::continuous;
      } else if (options.g2_mode == "pulsed") {
        mode = AnalysisConfig::G2::pulsed;
      } else {
        throw ConfigError("--g2 must be off, continuous or pulsed");
      }
      if (mode == AnalysisConfig::G2::pulsed && !options.rep_rate_hz) {
        throw ConfigError("pulsed g2 needs --rep-rate-hz for the peak spacing");
      }
      const double tau_max = options.tau_max_s.value_or(
          mode == AnalysisConfig::G2::pulsed ? 4.5 / options.rep_rate_hz.value() : 1e-3);
      auto g2 = run_g2(records, mode, tau_max, options.g2_bins, 0.5,
                       options.rep_rate_hz.value_or(0.0), duration_s,
                       options.split_seed.value_or(1));
      report.g2_zero = g2->g2_zero;
      report.g2_mode = options.g2_mode;
      const fs::path g2_path = out_dir / (stem + ".g2.csv");
      write_g2_csv(g2_path, g2->histogram);
      report.files["g2_csv"] = g2_path.string();
    }

    const fs::path report_kv = out_dir / (stem + ".report.kv");
    write_report_kv(report_kv, report);

    if (!options.quiet) std::cout << format_report_text(report);
    return exit_code::ok;
  } catch (...) {
    return map_exception("analyze");
  }
}

int cmd_sweep(const SweepOptions& options) {
  try {
    Scenario scenario = parse_scenario_file(options.scenario_path);
    scenario.sim.seed = resolve_seed(options.seed, scenario.sim.seed);

    if (options.axis) {
      if (*options.axis == "E_p") {
        scenario.sweep.axis = SweepConfig::Axis::pulse_energy;
      } else if (*options.axis == "rho") {
        scenario.sweep.axis = SweepConfig::Axis::rho;
      } else if (*options.axis == "zeta") {
        scenario.sweep.axis = SweepConfig::Axis::zeta;
      } else {
        throw ConfigError("--axis must be E_p, rho or zeta");
      }
    }
    if (options.grid) scenario.sweep.grid = parse_grid(*options.grid);
    if (options.seeds) scenario.sweep.seeds = *options.seeds;
    if (scenario.sweep.seeds < 1) throw ConfigError("--seeds must be >= 1");

    const fs::path default_dir = scenario.output_dir.empty()
                                     ? fs::path(options.scenario_path).parent_path()
                                     : fs::path(scenario.output_dir);
    const fs::path out_dir = prepare_out_dir(options.out_dir, default_dir);

    const SweepTable table = run_sweep(scenario, options.jobs);

    const char* axis_name = table.axis == SweepConfig::Axis::pulse_energy ? "pulse_energy_pJ"
                            : table.axis == SweepConfig::Axis::rho        ? "rho"
                                                                          : "zeta";

    const fs::path csv_path = out_dir / (scenario.name + ".sweep.csv");
    {
      std::ofstream out(csv_path, std::ios::trunc);
      if (!out) throw IoError("cannot open " + csv_path.string() + " for writing");
      out << axis_name
          << ",measured_ratio_mean,measured_ratio_se,model_ratio,mean_rate_cps,rho,zeta,seeds\n";
      for (const auto& row : table.rows) {
        out << format_number(row.axis_value) << "," << format_number(row.measured_ratio_mean)
            << "," << format_number(row.measured_ratio_se) << ","
            << format_number(row.model_ratio) << "," << format_number(row.mean_rate_cps) << ","
            << format_number(row.rho) << "," << format_number(row.zeta) << "," << row.seeds
            << "\n";
      }
      if (!out) throw IoError("write failure on " + csv_path.string());
    }

    // Model curve on a dense grid for the overlay.
    svg::Plot plot("noise ratio vs " + std::string(axis_name), axis_name,
                   "sigma_sps / sigma_sn");
    const bool log_x = table.axis == SweepConfig::Axis::pulse_energy;
    plot.set_log_x(log_x);

    svg::Series model;
    model.label = "model";
    model.color = "#222222";
    {
      const double lo = *std::min_element(scenario.sweep.grid.begin(), scenario.sweep.grid.end());
      const double hi = *std::max_element(scenario.sweep.grid.begin(), scenario.sweep.grid.end());
      const int n_dense = 200;
      for (int i = 0; i < n_dense; ++i) {
        const double f = static_cast<double>(i) / (n_dense - 1);
        const double v = (log_x && lo > 0) ? lo * std::pow(hi / lo, f) : lo + f * (hi - lo);
        SimConfig cfg = scenario.sim;
        switch (table.axis) {
          case SweepConfig::Axis::pulse_energy:
            cfg.excitation.pulse_energy_pj = v;
            break;
          case SweepConfig::Axis::rho:
            cfg.rho_override = v;
            break;
          case SweepConfig::Axis::zeta:
            cfg.chain = DetectionChain{v, 1.0, 1.0, 1.0};
            break;
          default:
            break;
        }
        const double n_bg =
            cfg.background.detected_rate_cps(cfg.excitation.pulse_energy_pj) *
            scenario.analysis.bin_width_s;
        model.x.push_back(v);
        model.y.push_back(noise_ratio_model_rho(
            cfg.rho(), cfg.chain.total_zeta(), n_bg,
            cfg.excitation.rep_rate_hz * scenario.analysis.bin_width_s));
      }
    }
    plot.add(std::move(model));

    svg::Series measured;
    measured.label = "measured (mean over seeds)";
    measured.color = "#c44e52";
    measured.points = true;
    for (const auto& row : table.rows) {
      measured.x.push_back(row.axis_value);
      measured.y.push_back(row.measured_ratio_mean);
      measured.y_err.push_back(row.measured_ratio_se);
    }
    plot.add(std::move(measured));

    const fs::path svg_path = out_dir / (scenario.name + ".sweep.svg");
    plot.write(svg_path);

    if (!options.quiet) {
      std::cout << "sweep over " << axis_name << ": " << table.rows.size() << " points x "
                << scenario.sweep.seeds << " seeds\n";
      for (const auto& row : table.rows) {
        std::cout << "  " << axis_name << " = " << format_number(row.axis_value)
                  << "  measured " << format_number(row.measured_ratio_mean) << " +- "
                  << format_number(row.measured_ratio_se) << "  model "
                  << format_number(row.model_ratio) << "\n";
      }
      if (table.zeta_fit) {
        std::cout << "  fitted zeta from measured points: " << format_number(table.zeta_fit->zeta)
                  << " +- " << format_number(table.zeta_fit->std_error) << "\n";
      }
      std::cout << "  table: " << csv_path.string() << "\n  plot:  " << svg_path.string() << "\n";
    }
    return exit_code::ok;
  } catch (...) {
    return map_exception("sweep");
  }
}

namespace {

SaturationDataset read_saturation_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  SaturationDataset data;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (!line.starts_with("E_p_pJ,rate_cps")) {
        throw FormatError("expected CSV header E_p_pJ,rate_cps[,weight] in " + path.string() +
                          " at line " + std::to_string(line_no));
      }
      header_seen = true;
      continue;
    }
    std::istringstream row(line);
    std::string field;
    SaturationPoint pt;
    auto next_field = [&](double& target, const char* what) {
      if (!std::getline(row, field, ',')) {
        throw FormatError(std::string("missing ") + what + " at line " + std::to_string(line_no) +
                          " in " + path.string());
      }
      char* end = nullptr;
      target = std::strtod(field.c_str(), &end);
      if (end != field.c_str() + field.size() || field.empty()) {
        throw FormatError(std::string("bad ") + what + " at line " + std::to_string(line_no) +
                          " in " + path.string());
      }
    };
    next_field(pt.pulse_energy_pj, "pulse energy");
    next_field(pt.rate_cps, "rate");
    if (std::getline(row, field, ',')) {
      char* end = nullptr;
      pt.weight = std::strtod(field.c_str(), &end);
      if (end != field.c_str() + field.size() || field.empty() || pt.weight <= 0) {
        throw FormatError("bad weight at line " + std::to_string(line_no) + " in " +
                          path.string());
      }
    }
    data.points.push_back(pt);
  }
  if (!header_seen) throw FormatError("empty dataset " + path.string());
  return data;
}

}  // namespace

int cmd_fit(const FitOptions& options) {
  try {
    SaturationDataset data = read_saturation_csv(options.data_path);
    if (options.tau_p_s) data.tau_p_s = *options.tau_p_s;
    if (options.tau_r_s) data.tau_r_s = *options.tau_r_s;

    SaturationFitOptions fit_options;
    if (options.fix_alpha) fit_options.fix_background_slope = *options.fix_alpha;
    if (options.init_max_rate || options.init_saturation_energy || options.init_alpha) {
      SaturationParams init;
      init.max_rate_cps = options.init_max_rate.value_or(10000);
      init.saturation_energy_pj = options.init_saturation_energy.value_or(1.0);
      init.background_slope_cps_per_pj = options.init_alpha.value_or(1.0);
      init.tau_p_s = data.tau_p_s;
      init.tau_r_s = data.tau_r_s;
      fit_options.init = init;
    }

    const FitResult fit = fit_saturation(data, fit_options);
    if (!fit.converged) {
      std::cerr << "fit: did not converge after " << fit.iterations
                << " iterations (residual norm " << format_number(fit.residual_norm) << ")\n";
      std::cerr << "fit: last parameters: max_rate " << format_number(fit.params.max_rate_cps)
                << ", E_sat " << format_number(fit.params.saturation_energy_pj) << ", alpha "
                << format_number(fit.params.background_slope_cps_per_pj) << "\n";
      return exit_code::fit;
    }

    const fs::path out_dir =
        prepare_out_dir(options.out_dir, fs::path(options.data_path).parent_path());
    const std::string stem = fs::path(options.data_path).stem().string();

    const fs::path result_path = out_dir / (stem + ".fit.kv");
    {
      std::ofstream out(result_path, std::ios::trunc);
      if (!out) throw IoError("cannot open " + result_path.string() + " for writing");
      out << "fit.max_rate_cps = " << format_number(fit.params.max_rate_cps) << "\n";
      out << "fit.max_rate_cps_stderr = " << format_number(fit.std_errors[0]) << "\n";
      out << "fit.saturation_energy_pJ = " << format_number(fit.params.saturation_energy_pj)
          << "\n";
      out << "fit.saturation_energy_pJ_stderr = " << format_number(fit.std_errors[1]) << "\n";
      out << "fit.alpha_cps_per_pJ = " << format_number(fit.params.background_slope_cps_per_pj)
          << "\n";
      out << "fit.alpha_cps_per_pJ_stderr = " << format_number(fit.std_errors[2]) << "\n";
      out << "fit.tau_p_s = " << format_number(data.tau_p_s) << "\n";
      out << "fit.tau_r_s = " << format_number(data.tau_r_s) << "\n";
      out << "fit.residual_norm = " << format_number(fit.residual_norm) << "\n";
      out << "fit.iterations = " << fit.iterations << "\n";
      out << "fit.converged = " << (fit.converged ? "true" : "false") << "\n";
    }

    // rho(E) curve on a dense grid spanning the data.
    double lo = data.points.front().pulse_energy_pj;
    double hi = lo;
    for (const auto& pt : data.points) {
      lo = std::min(lo, pt.pulse_energy_pj);
      hi = std::max(hi, pt.pulse_energy_pj);
    }
    if (lo <= 0) lo = std::max(1e-3 * hi, 1e-6);
    std::vector<double> grid(160);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      grid[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (grid.size() - 1));
    }
    const auto rho_curve = extract_rho_curve(fit, grid);
    const fs::path rho_path = out_dir / (stem + ".rho.csv");
    {
      std::ofstream out(rho_path, std::ios::trunc);
      if (!out) throw IoError("cannot open " + rho_path.string() + " for writing");
      out << "E_p_pJ,rho\n";
      for (const auto& [e, rho] : rho_curve) {
        out << format_number(e) << "," << format_number(rho) << "\n";
      }
    }

    svg::Plot plot("saturation fit: " + stem, "pulse energy (pJ)", "rate (counts/s)");
    plot.set_log_x(true);
    svg::Series points;
    points.label = "data";
    points.color = "#c44e52";
    points.points = true;
    for (const auto& pt : data.points) {
      points.x.push_back(pt.pulse_energy_pj);
      points.y.push_back(pt.rate_cps);
    }
    plot.add(std::move(points));
    svg::Series curve;
    curve.label = "fit";
    curve.color = "#222222";
    for (double e : grid) {
      curve.x.push_back(e);
      curve.y.push_back(detected_rate(e, fit.params));
    }
    plot.add(std::move(curve));
    const fs::path svg_path = out_dir / (stem + ".fit.svg");
    plot.write(svg_path);

    if (!options.quiet) {
      std::cout << "fit: " << stem << " (" << data.points.size() << " points)\n";
      std::cout << "  max rate        " << format_number(fit.params.max_rate_cps) << " +- "
                << format_number(fit.std_errors[0]) << " counts/s\n";
      std::cout << "  E_sat           " << format_number(fit.params.saturation_energy_pj)
                << " +- " << format_number(fit.std_errors[1]) << " pJ\n";
      std::cout << "  alpha           " << format_number(fit.params.background_slope_cps_per_pj)
                << " +- " << format_number(fit.std_errors[2]) << " counts/s/pJ\n";
      std::cout << "  residual norm   " << format_number(fit.residual_norm) << " after "
                << fit.iterations << " iterations\n";
      std::cout << "  outputs: " << result_path.string() << ", " << rho_path.string() << ", "
                << svg_path.string() << "\n";
    }
    return exit_code::ok;
  } catch (...) {
    return map_exception("fit");
  }
}

int cmd_report(const ReportOptions& options) {
  try {
    const RunReport report = read_report_kv(options.report_path);
    if (!options.quiet) std::cout << format_report_text(report);

    if (options.verify) {
      auto it = report.files.find("timestamps");
      if (it == report.files.end()) {
        throw FormatError("report has no timestamps file to verify against");
      }
      fs::path ts_path(it->second);
      if (!fs::exists(ts_path)) {
        // Manifest paths may be relative to the report location.
        ts_path = fs::path(options.report_path).parent_path() / ts_path.filename();
      }
      const std::vector<PhotonRecord> records = read_timestamps_auto(ts_path);
      const BinnedTrace trace =
          bin_trace(records, report.analysis_bin_width_s, report.summary.duration_s);
      const double rep_rate =
          report.summary.duration_s > 0 && report.summary.pulses > 0
              ? static_cast<double>(report.summary.pulses) / report.summary.duration_s
              : 0.0;
      const NoiseReport recomputed = noise_ratio_measured(trace, rep_rate);

      std::uint64_t detected = 0, bg = 0;
      for (const auto& r : records) {
        if (r.origin == Origin::molecule) {
          ++detected;
        } else {
          ++bg;
        }
      }
      const bool counts_ok = detected == report.summary.signal_detected &&
                             bg == report.summary.background_detected;
      const bool noise_ok = recomputed.bins == report.noise.bins &&
                            recomputed.mean_per_bin == report.noise.mean_per_bin &&
                            recomputed.sigma_sps == report.noise.sigma_sps &&
                            recomputed.ratio == report.noise.ratio;
      if (!counts_ok || !noise_ok) {
        std::cerr << "report: verification FAILED: recomputed statistics disagree with the "
                     "stored report\n";
        if (!counts_ok) {
          std::cerr << "  counts: file has " << detected << " signal / " << bg
                    << " background, report says " << report.summary.signal_detected << " / "
                    << report.summary.background_detected << "\n";
        }
        if (!noise_ok) {
          std::cerr << "  noise: recomputed ratio " << format_number(recomputed.ratio)
                    << ", report says " << format_number(report.noise.ratio) << "\n";
        }
        return 1;
      }
      if (!options.quiet) {
        std::cout << "verification OK: statistics recomputed from " << ts_path.string()
                  << " match the report\n";
      }
    }
    return exit_code::ok;
  } catch (...) {
    return map_exception("report");
  }
}

}  // namespace photongun::cli
