#include "photongun/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "photongun/errors.hpp"

namespace photongun {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

double parse_double(std::string_view text, const std::string& context) {
  const std::string buf(text);
  char* end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || buf.empty() || !std::isfinite(v)) {
    throw ConfigError(context + ": expected a number, got '" + buf + "'");
  }
  return v;
}

std::uint64_t parse_u64(std::string_view text, const std::string& context) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError(context + ": expected an unsigned integer, got '" + std::string(text) + "'");
  }
  return v;
}

// Ordered key/value document with access tracking so leftover keys can be
// reported as typos.
class KeyValueDoc {
 public:
  KeyValueDoc(std::string_view text, std::string source) : source_(std::move(source)) {
    std::size_t pos = 0;
    int line_no = 0;
    while (pos <= text.size()) {
      std::size_t eol = text.find('\n', pos);
      if (eol == std::string_view::npos) eol = text.size();
      std::string_view line = text.substr(pos, eol - pos);
      pos = eol + 1;
      ++line_no;
      if (auto hash = line.find('#'); hash != std::string_view::npos) {
        line = line.substr(0, hash);
      }
      line = trim(line);
      if (line.empty()) continue;
      const std::size_t eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw ConfigError(source_ + ":" + std::to_string(line_no) +
                          ": expected 'key = value', got '" + std::string(line) + "'");
      }
      const std::string key(trim(line.substr(0, eq)));
      const std::string value(trim(line.substr(eq + 1)));
      if (key.empty()) {
        throw ConfigError(source_ + ":" + std::to_string(line_no) + ": empty key");
      }
      if (!entries_.emplace(key, Entry{value, line_no}).second) {
        throw ConfigError(source_ + ":" + std::to_string(line_no) + ": duplicate key '" + key +
                          "'");
      }
      if (pos > text.size()) break;
    }
  }

  std::optional<std::string> take(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    used_.insert(key);
    return it->second.value;
  }

  double take_double(const std::string& key, double fallback) {
    auto v = take(key);
    return v ? parse_double(*v, context(key)) : fallback;
  }

  double require_double(const std::string& key) {
    auto v = take(key);
    if (!v) throw ConfigError(source_ + ": missing required key '" + key + "'");
    return parse_double(*v, context(key));
  }

  std::string context(const std::string& key) const {
    auto it = entries_.find(key);
    const int line = it == entries_.end() ? 0 : it->second.line;
    return source_ + ":" + std::to_string(line) + ": " + key;
  }

  void reject_unknown() const {
    for (const auto& [key, entry] : entries_) {
      if (!used_.contains(key)) {
        throw ConfigError(source_ + ":" + std::to_string(entry.line) + ": unknown key '" + key +
                          "'");
      }
    }
  }

  const std::string& source() const { return source_; }

 private:
  struct Entry {
    std::string value;
    int line;
  };
  std::map<std::string, Entry> entries_;
  std::set<std::string> used_;
  std::string source_;
};

std::string format_double(double v) {
  char buf[40];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

}  // namespace

std::vector<double> parse_grid(std::string_view spec) {
  spec = trim(spec);
  if (spec.empty()) throw ConfigError("empty sweep grid");

  auto split = [](std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t pos = 0;
    while (true) {
      const std::size_t next = s.find(sep, pos);
      parts.push_back(trim(s.substr(pos, next - pos)));
      if (next == std::string_view::npos) break;
      pos = next + 1;
    }
    return parts;
  };

  const bool linspace = spec.starts_with("linspace:");
  const bool logspace = spec.starts_with("logspace:");
  if (linspace || logspace) {
    const auto parts = split(spec.substr(9), ':');
    if (parts.size() != 3) {
      throw ConfigError("grid spec must be linspace:start:stop:count or logspace:start:stop:count");
    }
    const double start = parse_double(parts[0], "grid start");
    const double stop = parse_double(parts[1], "grid stop");
    const double count_d = parse_double(parts[2], "grid count");
    const int count = static_cast<int>(count_d);
    if (count < 1 || count_d != count) throw ConfigError("grid count must be a positive integer");
    if (logspace && (start <= 0 || stop <= 0)) {
      throw ConfigError("logspace grid endpoints must be > 0");
    }
    std::vector<double> grid(count);
    if (count == 1) {
      grid[0] = start;
    } else {
      for (int i = 0; i < count; ++i) {
        const double f = static_cast<double>(i) / (count - 1);
        grid[i] = logspace ? start * std::pow(stop / start, f) : start + f * (stop - start);
      }
    }
    return grid;
  }

  std::vector<double> grid;
  for (const auto& part : split(spec, ',')) {
    grid.push_back(parse_double(part, "grid value"));
  }
  return grid;
}

Scenario parse_scenario_text(std::string_view text, const std::string& source_name) {
  KeyValueDoc doc(text, source_name);
  Scenario s;

  s.name = doc.take("name").value_or(
      std::filesystem::path(source_name).stem().string());
  if (auto seed = doc.take("seed")) s.sim.seed = parse_u64(*seed, doc.context("seed"));
  s.output_dir = doc.take("output.dir").value_or("");

  s.sim.emitter.k21 = doc.take_double("emitter.k21_per_s", s.sim.emitter.k21);
  s.sim.emitter.k23 = doc.take_double("emitter.k23_per_s", s.sim.emitter.k23);
  s.sim.emitter.k31 = doc.take_double("emitter.k31_per_s", s.sim.emitter.k31);
  s.sim.emitter.tau_r_s = doc.take_double("emitter.tau_r_s", s.sim.emitter.tau_r_s);
  s.sim.emitter.quantum_efficiency =
      doc.take_double("emitter.quantum_efficiency", s.sim.emitter.quantum_efficiency);

  s.sim.excitation.pulse_energy_pj = doc.require_double("excitation.pulse_energy_pJ");
  s.sim.excitation.saturation_energy_pj = doc.require_double("excitation.saturation_energy_pJ");
  s.sim.excitation.pulse_width_s =
      doc.take_double("excitation.pulse_width_s", s.sim.excitation.pulse_width_s);
  s.sim.excitation.rep_rate_hz = doc.require_double("excitation.repetition_rate_Hz");
  s.sim.excitation.duration_s = doc.require_double("excitation.duration_s");
  if (auto rho = doc.take("excitation.rho_override")) {
    s.sim.rho_override = parse_double(*rho, doc.context("excitation.rho_override"));
  }

  s.sim.chain.objective_t = doc.take_double("chain.objective_T", s.sim.chain.objective_t);
  s.sim.chain.optics_t = doc.take_double("chain.optics_T", s.sim.chain.optics_t);
  s.sim.chain.detector_qe = doc.take_double("chain.detector_qe", s.sim.chain.detector_qe);
  s.sim.chain.extra_t = doc.take_double("chain.extra_T", s.sim.chain.extra_t);

  if (auto mode = doc.take("background.mode")) {
    if (*mode == "fixed_rate") {
      s.sim.background.mode = BackgroundModel::Mode::fixed_rate;
    } else if (*mode == "alpha") {
      s.sim.background.mode = BackgroundModel::Mode::energy_linear;
    } else {
      throw ConfigError(doc.context("background.mode") + ": must be fixed_rate or alpha");
    }
  }
  s.sim.background.rate_cps = doc.take_double("background.rate_cps", 0.0);
  s.sim.background.slope_cps_per_pj = doc.take_double("background.alpha_cps_per_pJ", 0.0);

  if (auto bw = doc.take("analysis.bin_width_ms")) {
    s.analysis.bin_width_s = 1e-3 * parse_double(*bw, doc.context("analysis.bin_width_ms"));
  }
  if (auto mode = doc.take("analysis.g2_mode")) {
    if (*mode == "off") {
      s.analysis.g2_mode = AnalysisConfig::G2::off;
    } else if (*mode == "continuous") {
      s.analysis.g2_mode = AnalysisConfig::G2::continuous;
    } else if (*mode == "pulsed") {
      s.analysis.g2_mode = AnalysisConfig::G2::pulsed;
    } else {
      throw ConfigError(doc.context("analysis.g2_mode") + ": must be off, continuous or pulsed");
    }
  }
  s.analysis.tau_max_s = doc.take_double("analysis.tau_max_s", s.analysis.tau_max_s);
  s.analysis.g2_bins = static_cast<int>(doc.take_double("analysis.g2_bins", s.analysis.g2_bins));
  s.analysis.split_ratio = doc.take_double("analysis.split_ratio", s.analysis.split_ratio);

  if (auto axis = doc.take("sweep.axis")) {
    if (*axis == "pulse_energy_pJ") {
      s.sweep.axis = SweepConfig::Axis::pulse_energy;
    } else if (*axis == "rho") {
      s.sweep.axis = SweepConfig::Axis::rho;
    } else if (*axis == "zeta") {
      s.sweep.axis = SweepConfig::Axis::zeta;
    } else {
      throw ConfigError(doc.context("sweep.axis") + ": must be pulse_energy_pJ, rho or zeta");
    }
  }
  if (auto grid = doc.take("sweep.grid")) {
    try {
      s.sweep.grid = parse_grid(*grid);
    } catch (const ConfigError& e) {
      throw ConfigError(doc.context("sweep.grid") + ": " + e.what());
    }
  }
  s.sweep.seeds = static_cast<int>(doc.take_double("sweep.seeds", s.sweep.seeds));

  doc.reject_unknown();

  if (s.sweep.axis != SweepConfig::Axis::none && s.sweep.grid.empty()) {
    throw ConfigError(doc.source() + ": sweep.axis set but sweep.grid is missing");
  }
  if (s.sweep.seeds < 1) throw ConfigError(doc.source() + ": sweep.seeds must be >= 1");
  for (double v : s.sweep.grid) {
    if (!std::isfinite(v)) throw ConfigError(doc.source() + ": sweep grid values must be finite");
  }
  if (s.analysis.split_ratio <= 0 || s.analysis.split_ratio >= 1) {
    throw ConfigError(doc.source() + ": analysis.split_ratio must be in (0, 1)");
  }

  try {
    s.sim.validate();
  } catch (const std::exception& e) {
    throw ConfigError(doc.source() + ": " + e.what());
  }
  return s;
}

Scenario parse_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario_text(ss.str(), path.string());
}

std::string serialize_scenario(const Scenario& s) {
  std::ostringstream out;
  out << "name = " << s.name << "\n";
  out << "seed = " << s.sim.seed << "\n";
  out << "emitter.k21_per_s = " << format_double(s.sim.emitter.k21) << "\n";
  out << "emitter.k23_per_s = " << format_double(s.sim.emitter.k23) << "\n";
  out << "emitter.k31_per_s = " << format_double(s.sim.emitter.k31) << "\n";
  out << "emitter.tau_r_s = " << format_double(s.sim.emitter.tau_r_s) << "\n";
  out << "emitter.quantum_efficiency = " << format_double(s.sim.emitter.quantum_efficiency)
      << "\n";
  out << "excitation.pulse_energy_pJ = " << format_double(s.sim.excitation.pulse_energy_pj)
      << "\n";
  out << "excitation.saturation_energy_pJ = "
      << format_double(s.sim.excitation.saturation_energy_pj) << "\n";
  out << "excitation.pulse_width_s = " << format_double(s.sim.excitation.pulse_width_s) << "\n";
  out << "excitation.repetition_rate_Hz = " << format_double(s.sim.excitation.rep_rate_hz)
      << "\n";
  out << "excitation.duration_s = " << format_double(s.sim.excitation.duration_s) << "\n";
  if (s.sim.rho_override) {
    out << "excitation.rho_override = " << format_double(*s.sim.rho_override) << "\n";
  }
  out << "chain.objective_T = " << format_double(s.sim.chain.objective_t) << "\n";
  out << "chain.optics_T = " << format_double(s.sim.chain.optics_t) << "\n";
  out << "chain.detector_qe = " << format_double(s.sim.chain.detector_qe) << "\n";
  out << "chain.extra_T = " << format_double(s.sim.chain.extra_t) << "\n";
  out << "background.mode = "
      << (s.sim.background.mode == BackgroundModel::Mode::fixed_rate ? "fixed_rate" : "alpha")
      << "\n";
  out << "background.rate_cps = " << format_double(s.sim.background.rate_cps) << "\n";
  out << "background.alpha_cps_per_pJ = " << format_double(s.sim.background.slope_cps_per_pj)
      << "\n";
  out << "analysis.bin_width_ms = " << format_double(s.analysis.bin_width_s * 1e3) << "\n";
  const char* g2 = s.analysis.g2_mode == AnalysisConfig::G2::off ? "off"
                   : s.analysis.g2_mode == AnalysisConfig::G2::continuous ? "continuous"
                                                                          : "pulsed";
  out << "analysis.g2_mode = " << g2 << "\n";
  out << "analysis.tau_max_s = " << format_double(s.analysis.tau_max_s) << "\n";
  out << "analysis.g2_bins = " << s.analysis.g2_bins << "\n";
  out << "analysis.split_ratio = " << format_double(s.analysis.split_ratio) << "\n";
  if (s.sweep.axis != SweepConfig::Axis::none) {
    const char* axis = s.sweep.axis == SweepConfig::Axis::pulse_energy ? "pulse_energy_pJ"
                       : s.sweep.axis == SweepConfig::Axis::rho        ? "rho"
                                                                       : "zeta";
    out << "sweep.axis = " << axis << "\n";
    out << "sweep.grid = ";
    for (std::size_t i = 0; i < s.sweep.grid.size(); ++i) {
      if (i) out << ",";
      out << format_double(s.sweep.grid[i]);
    }
    out << "\n";
    out << "sweep.seeds = " << s.sweep.seeds << "\n";
  }
  if (!s.output_dir.empty()) out << "output.dir = " << s.output_dir << "\n";
  return out.str();
}

std::uint64_t config_hash(const Scenario& scenario) {
  // Seed excluded: the hash identifies the configuration, the seed is
  // reported next to it.
  Scenario copy = scenario;
  copy.sim.seed = 0;
  const std::string canon = serialize_scenario(copy);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace photongun
