#include "photongun/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "photongun/errors.hpp"
#include "photongun/version.hpp"

namespace photongun {

namespace {

double parse_number(const std::string& text, const std::string& key) {
  if (text == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw FormatError("report: bad number for key '" + key + "': " + text);
  }
  return v;
}

std::uint64_t parse_u64(const std::string& text, const std::string& key) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw FormatError("report: bad integer for key '" + key + "': " + text);
  }
  return v;
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

void write_report_kv(const std::filesystem::path& path, const RunReport& r) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");

  out << "report.scenario = " << r.scenario_name << "\n";
  out << "report.version = " << r.tool_version << "\n";
  out << "report.config_hash = " << r.config_hash_hex << "\n";
  out << "report.seed = " << r.seed << "\n";
  out << "summary.pulses = " << r.summary.pulses << "\n";
  out << "summary.signal_emitted = " << r.summary.signal_emitted << "\n";
  out << "summary.signal_detected = " << r.summary.signal_detected << "\n";
  out << "summary.signal_lost = " << r.summary.signal_lost << "\n";
  out << "summary.background_detected = " << r.summary.background_detected << "\n";
  out << "summary.triplet_lost_pulses = " << r.summary.triplet_lost_pulses << "\n";
  out << "summary.triplet_entries = " << r.summary.triplet_entries << "\n";
  out << "summary.duration_s = " << format_number(r.summary.duration_s) << "\n";
  out << "summary.rho = " << format_number(r.summary.rho) << "\n";
  out << "summary.zeta = " << format_number(r.summary.zeta) << "\n";
  out << "summary.background_rate_cps = " << format_number(r.summary.background_rate_cps) << "\n";
  out << "noise.bins = " << r.noise.bins << "\n";
  out << "noise.bin_width_s = " << format_number(r.noise.bin_width_s) << "\n";
  out << "noise.mean_rate_cps = " << format_number(r.noise.mean_rate_cps) << "\n";
  out << "noise.mean_per_bin = " << format_number(r.noise.mean_per_bin) << "\n";
  out << "noise.sigma_sps = " << format_number(r.noise.sigma_sps) << "\n";
  out << "noise.sigma_sn = " << format_number(r.noise.sigma_sn) << "\n";
  out << "noise.ratio = " << format_number(r.noise.ratio) << "\n";
  out << "noise.squeezing_db = " << format_number(r.noise.squeezing_db) << "\n";
  out << "noise.squeezing_db_variance_convention = "
      << format_number(r.noise.squeezing_db_variance) << "\n";
  out << "noise.mandel_q = " << format_number(r.noise.mandel_q) << "\n";
  out << "noise.mean_photons_per_pulse = " << format_number(r.noise.mean_photons_per_pulse)
      << "\n";
  out << "g2.mode = " << r.g2_mode << "\n";
  if (r.g2_zero) out << "g2.zero = " << format_number(*r.g2_zero) << "\n";
  out << "analysis.bin_width_s = " << format_number(r.analysis_bin_width_s) << "\n";
  for (const auto& [role, file] : r.files) {
    out << "files." << role << " = " << file << "\n";
  }
  out.flush();
  if (!out) throw IoError("write failure on " + path.string());
}

RunReport read_report_kv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());

  std::map<std::string, std::string> kv;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw FormatError("report " + path.string() + ":" + std::to_string(line_no) +
                        ": expected 'key = value'");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }

  auto need = [&](const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw FormatError("report " + path.string() + ": missing key " + key);
    return it->second;
  };

  RunReport r;
  r.scenario_name = need("report.scenario");
  r.tool_version = need("report.version");
  r.config_hash_hex = need("report.config_hash");
  r.seed = parse_u64(need("report.seed"), "report.seed");
  r.summary.pulses = parse_u64(need("summary.pulses"), "summary.pulses");
  r.summary.signal_emitted = parse_u64(need("summary.signal_emitted"), "summary.signal_emitted");
  r.summary.signal_detected =
      parse_u64(need("summary.signal_detected"), "summary.signal_detected");
  r.summary.signal_lost = parse_u64(need("summary.signal_lost"), "summary.signal_lost");
  r.summary.background_detected =
      parse_u64(need("summary.background_detected"), "summary.background_detected");
  r.summary.triplet_lost_pulses =
      parse_u64(need("summary.triplet_lost_pulses"), "summary.triplet_lost_pulses");
  r.summary.triplet_entries =
      parse_u64(need("summary.triplet_entries"), "summary.triplet_entries");
  r.summary.duration_s = parse_number(need("summary.duration_s"), "summary.duration_s");
  r.summary.rho = parse_number(need("summary.rho"), "summary.rho");
  r.summary.zeta = parse_number(need("summary.zeta"), "summary.zeta");
  r.summary.background_rate_cps =
      parse_number(need("summary.background_rate_cps"), "summary.background_rate_cps");
  r.summary.seed = r.seed;
  r.noise.bins = parse_u64(need("noise.bins"), "noise.bins");
  r.noise.bin_width_s = parse_number(need("noise.bin_width_s"), "noise.bin_width_s");
  r.noise.mean_rate_cps = parse_number(need("noise.mean_rate_cps"), "noise.mean_rate_cps");
  r.noise.mean_per_bin = parse_number(need("noise.mean_per_bin"), "noise.mean_per_bin");
  r.noise.sigma_sps = parse_number(need("noise.sigma_sps"), "noise.sigma_sps");
  r.noise.sigma_sn = parse_number(need("noise.sigma_sn"), "noise.sigma_sn");
  r.noise.ratio = parse_number(need("noise.ratio"), "noise.ratio");
  r.noise.squeezing_db = parse_number(need("noise.squeezing_db"), "noise.squeezing_db");
  r.noise.squeezing_db_variance = parse_number(need("noise.squeezing_db_variance_convention"),
                                               "noise.squeezing_db_variance_convention");
  r.noise.mandel_q = parse_number(need("noise.mandel_q"), "noise.mandel_q");
  r.noise.mean_photons_per_pulse =
      parse_number(need("noise.mean_photons_per_pulse"), "noise.mean_photons_per_pulse");
  r.g2_mode = need("g2.mode");
  if (auto it = kv.find("g2.zero"); it != kv.end()) {
    r.g2_zero = parse_number(it->second, "g2.zero");
  }
  r.analysis_bin_width_s =
      parse_number(need("analysis.bin_width_s"), "analysis.bin_width_s");
  for (const auto& [key, value] : kv) {
    if (key.starts_with("files.")) r.files[key.substr(6)] = value;
  }
  return r;
}

std::string format_report_text(const RunReport& r) {
  std::ostringstream out;
  out << "run report: " << r.scenario_name << " (tool " << r.tool_version << ", config "
      << r.config_hash_hex << ", seed " << r.seed << ")\n";
  out << "  pulses fired            " << r.summary.pulses << "\n";
  out << "  signal emitted          " << r.summary.signal_emitted << "\n";
  out << "  signal detected         " << r.summary.signal_detected << "\n";
  out << "  signal lost in chain    " << r.summary.signal_lost << "\n";
  out << "  background detected     " << r.summary.background_detected << "\n";
  out << "  pulses lost to shelving " << r.summary.triplet_lost_pulses << "\n";
  out << "  shelving events         " << r.summary.triplet_entries << "\n";
  out << "  rho " << format_number(r.summary.rho) << ", zeta " << format_number(r.summary.zeta)
      << ", background " << format_number(r.summary.background_rate_cps) << " counts/s\n";
  out << "  mean rate               " << format_number(r.noise.mean_rate_cps) << " counts/s over "
      << format_number(r.summary.duration_s) << " s\n";
  out << "  noise ratio             " << format_number(r.noise.ratio) << " (sigma "
      << format_number(r.noise.sigma_sps) << " vs shot-noise " << format_number(r.noise.sigma_sn)
      << " per " << format_number(r.noise.bin_width_s * 1e3) << " ms bin)\n";
  out << "  squeezing               " << format_number(r.noise.squeezing_db)
      << " dB (amplitude convention), " << format_number(r.noise.squeezing_db_variance)
      << " dB (variance convention)\n";
  out << "  Mandel Q (trace)        " << format_number(r.noise.mandel_q) << "\n";
  out << "  photons per pulse       " << format_number(r.noise.mean_photons_per_pulse) << "\n";
  if (r.g2_zero) {
    out << "  g2(0) [" << r.g2_mode << "]         " << format_number(*r.g2_zero) << "\n";
  }
  if (!r.files.empty()) {
    out << "  files:\n";
    for (const auto& [role, file] : r.files) {
      out << "    " << role << ": " << file << "\n";
    }
  }
  return out.str();
}

}  // namespace photongun
