#include <doctest.h>

#include <fstream>
#include <string>
#include <vector>

#include "photongun/errors.hpp"
#include "photongun/report.hpp"
#include "photongun/scenario.hpp"
#include "photongun/simulator.hpp"
#include "photongun/svg.hpp"
#include "photongun/timestamp_io.hpp"
#include "test_util.hpp"

using namespace photongun;

namespace {

std::vector<PhotonRecord> sample_records() {
  SimConfig cfg;
  cfg.excitation.pulse_energy_pj = 200;
  cfg.excitation.saturation_energy_pj = 0.05;
  cfg.excitation.rep_rate_hz = 15e3;
  cfg.excitation.duration_s = 1.0;
  cfg.rho_override = 0.9;
  cfg.background.rate_cps = 1100;
  cfg.seed = 55;
  return simulate_stream(cfg).records;
}

std::string slurp_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

const std::string kScenarioText = R"(# strong-drive operating point
name = op_point
seed = 42
emitter.k21_per_s = 1e8
emitter.k23_per_s = 1e4
emitter.k31_per_s = 6e3
excitation.pulse_energy_pJ = 200
excitation.saturation_energy_pJ = 0.05
excitation.pulse_width_s = 13e-12
excitation.repetition_rate_Hz = 15000
excitation.duration_s = 10
excitation.rho_override = 0.99
chain.objective_T = 0.90
chain.optics_T = 0.95
chain.detector_qe = 0.80
background.mode = fixed_rate
background.rate_cps = 1100
analysis.bin_width_ms = 1
analysis.g2_mode = pulsed
analysis.tau_max_s = 3e-4
)";

}  // namespace

TEST_CASE("binary timestamp round trip is lossless") {
  testutil::TempDir tmp("io");
  const auto records = sample_records();

  const auto path = tmp.file("stream.pgun");
  write_timestamps_binary(path, records);

  TimestampFileInfo info;
  const auto loaded = read_timestamps_binary(path, &info);
  CHECK(loaded == records);
  CHECK(info.version == 1);
  CHECK(info.resolution_ps == 1);
  CHECK(std::filesystem::file_size(path) == 16 + 16 * records.size());
}

TEST_CASE("csv timestamp round trip is lossless") {
  testutil::TempDir tmp("io");
  const auto records = sample_records();

  const auto path = tmp.file("stream.csv");
  write_timestamps_csv(path, records);
  CHECK(read_timestamps_csv(path) == records);

  SUBCASE("binary -> csv -> binary preserves every record") {
    const auto bin1 = tmp.file("a.pgun");
    const auto csv = tmp.file("b.csv");
    const auto bin2 = tmp.file("c.pgun");
    write_timestamps_binary(bin1, records);
    write_timestamps_csv(csv, read_timestamps_binary(bin1));
    write_timestamps_binary(bin2, read_timestamps_csv(csv));
    CHECK(slurp_bytes(bin1) == slurp_bytes(bin2));
  }
}

TEST_CASE("auto reader sniffs the format") {
  testutil::TempDir tmp("io");
  const auto records = sample_records();
  const auto bin = tmp.file("stream.dat");
  const auto csv = tmp.file("stream.txt");
  write_timestamps_binary(bin, records);
  write_timestamps_csv(csv, records);
  CHECK(read_timestamps_auto(bin) == records);
  CHECK(read_timestamps_auto(csv) == records);
}

TEST_CASE("malformed timestamp files are rejected with byte offsets") {
  testutil::TempDir tmp("io");
  const auto records = sample_records();
  const auto path = tmp.file("stream.pgun");
  write_timestamps_binary(path, records);
  const std::string good = slurp_bytes(path);

  SUBCASE("truncated record") {
    const auto bad = tmp.file("trunc.pgun");
    std::ofstream(bad, std::ios::binary).write(good.data(), 16 + 16 * 10 + 7);
    CHECK_THROWS_AS(read_timestamps_binary(bad), FormatError);
    try {
      read_timestamps_binary(bad);
    } catch (const FormatError& e) {
      CHECK(e.byte_offset == 16 + 16 * 10);
      CHECK(std::string(e.what()).find("byte offset") != std::string::npos);
    }
  }

  SUBCASE("truncated header") {
    const auto bad = tmp.file("header.pgun");
    std::ofstream(bad, std::ios::binary).write(good.data(), 9);
    CHECK_THROWS_AS(read_timestamps_binary(bad), FormatError);
  }

  SUBCASE("bad magic") {
    std::string corrupt = good;
    corrupt[0] = 'X';
    const auto bad = tmp.file("magic.pgun");
    std::ofstream(bad, std::ios::binary).write(corrupt.data(),
                                               static_cast<std::streamsize>(corrupt.size()));
    CHECK_THROWS_AS(read_timestamps_binary(bad), FormatError);
  }

  SUBCASE("bad version") {
    std::string corrupt = good;
    corrupt[4] = 9;
    const auto bad = tmp.file("version.pgun");
    std::ofstream(bad, std::ios::binary).write(corrupt.data(),
                                               static_cast<std::streamsize>(corrupt.size()));
    CHECK_THROWS_AS(read_timestamps_binary(bad), FormatError);
  }

  SUBCASE("csv with a broken row") {
    const auto bad = tmp.file("bad.csv");
    std::ofstream(bad) << "t_ps,origin,channel\n123,molecule,0\n456,meteor,0\n";
    CHECK_THROWS_AS(read_timestamps_csv(bad), FormatError);
  }

  SUBCASE("missing file") {
    CHECK_THROWS_AS(read_timestamps_binary(tmp.file("nothing.pgun")), IoError);
  }
}

TEST_CASE("scenario parsing") {
  const Scenario s = parse_scenario_text(kScenarioText, "inline.scenario");

  CHECK(s.name == "op_point");
  CHECK(s.sim.seed == 42);
  CHECK(s.sim.emitter.k21 == 1e8);
  CHECK(s.sim.excitation.pulse_energy_pj == 200);
  CHECK(s.sim.rho_override == 0.99);
  CHECK(s.sim.chain.total_zeta() == doctest::Approx(0.684).epsilon(1e-12));
  CHECK(s.sim.background.mode == BackgroundModel::Mode::fixed_rate);
  CHECK(s.sim.background.rate_cps == 1100);
  CHECK(s.analysis.bin_width_s == doctest::Approx(1e-3));
  CHECK(s.analysis.g2_mode == AnalysisConfig::G2::pulsed);

  SUBCASE("round trip: parse -> serialize -> parse is identical") {
    const std::string canon = serialize_scenario(s);
    const Scenario again = parse_scenario_text(canon, "roundtrip.scenario");
    CHECK(serialize_scenario(again) == canon);
    CHECK(config_hash(again) == config_hash(s));
  }

  SUBCASE("config hash ignores the seed but tracks the physics") {
    Scenario reseeded = s;
    reseeded.sim.seed = 1234;
    CHECK(config_hash(reseeded) == config_hash(s));
    Scenario changed = s;
    changed.sim.background.rate_cps = 900;
    CHECK(config_hash(changed) != config_hash(s));
  }

  SUBCASE("unknown keys are rejected with the line number") {
    CHECK_THROWS_AS(parse_scenario_text(kScenarioText + "\nemitter.k99_per_s = 1\n", "t"),
                    ConfigError);
    try {
      parse_scenario_text(kScenarioText + "emitter.k99_per_s = 1\n", "t");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("emitter.k99_per_s") != std::string::npos);
    }
  }

  SUBCASE("invalid values carry the failing field") {
    std::string bad = kScenarioText;
    const auto pos = bad.find("excitation.duration_s = 10");
    bad.replace(pos, 26, "excitation.duration_s = 0 ");
    try {
      parse_scenario_text(bad, "t");
      CHECK(false);
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("duration") != std::string::npos);
    }
  }

  SUBCASE("missing required keys fail") {
    CHECK_THROWS_AS(parse_scenario_text("name = x\n", "t"), ConfigError);
  }
}

TEST_CASE("grid expressions") {
  CHECK(parse_grid("1,2,5") == std::vector<double>{1, 2, 5});
  const auto lin = parse_grid("linspace:0:1:5");
  REQUIRE(lin.size() == 5);
  CHECK(lin[1] == doctest::Approx(0.25));
  const auto log = parse_grid("logspace:1:1000:4");
  REQUIRE(log.size() == 4);
  CHECK(log[1] == doctest::Approx(10.0).epsilon(1e-9));
  CHECK_THROWS_AS(parse_grid("linspace:0:1"), ConfigError);
  CHECK_THROWS_AS(parse_grid("logspace:0:1:4"), ConfigError);
  CHECK_THROWS_AS(parse_grid(""), ConfigError);
}

TEST_CASE("run report kv round trip") {
  testutil::TempDir tmp("report");
  RunReport r;
  r.scenario_name = "op_point";
  r.tool_version = "0.1.0";
  r.config_hash_hex = "0xdeadbeef00000000";
  r.seed = 42;
  r.summary.pulses = 150000;
  r.summary.signal_emitted = 148000;
  r.summary.signal_detected = 100000;
  r.summary.signal_lost = 48000;
  r.summary.background_detected = 11000;
  r.summary.triplet_lost_pulses = 30;
  r.summary.triplet_entries = 15;
  r.summary.duration_s = 10.0;
  r.summary.rho = 0.99;
  r.summary.zeta = 0.684;
  r.summary.background_rate_cps = 1100;
  r.noise.bins = 10000;
  r.noise.bin_width_s = 1e-3;
  r.noise.mean_rate_cps = 11100.5;
  r.noise.mean_per_bin = 11.1005;
  r.noise.sigma_sps = 2.087;
  r.noise.sigma_sn = 3.3317;
  r.noise.ratio = 0.6264;
  r.noise.squeezing_db = 2.0322;
  r.noise.squeezing_db_variance = 4.0644;
  r.noise.mandel_q = -0.6076;
  r.noise.mean_photons_per_pulse = 0.74;
  r.g2_zero = 0.1852;
  r.g2_mode = "pulsed";
  r.analysis_bin_width_s = 1e-3;
  r.files["timestamps"] = "op_point.pgun";

  const auto path = tmp.file("run.report.kv");
  write_report_kv(path, r);
  const RunReport back = read_report_kv(path);

  CHECK(back.scenario_name == r.scenario_name);
  CHECK(back.seed == r.seed);
  CHECK(back.summary.pulses == r.summary.pulses);
  CHECK(back.noise.ratio == r.noise.ratio);  // exact: shortest round-trip formatting
  CHECK(back.noise.sigma_sps == r.noise.sigma_sps);
  CHECK(back.g2_zero.has_value());
  CHECK(*back.g2_zero == *r.g2_zero);
  CHECK(back.files.at("timestamps") == "op_point.pgun");

  const std::string text = format_report_text(back);
  CHECK(text.find("op_point") != std::string::npos);
  CHECK(text.find("0.6264") != std::string::npos);
}

TEST_CASE("svg plots render valid documents") {
  testutil::TempDir tmp("svg");
  svg::Plot plot("test plot", "x", "y");
  svg::Series line;
  line.x = {1, 2, 3, 4};
  line.y = {1, 4, 9, 16};
  line.label = "quadratic";
  plot.add(line);
  svg::Series pts;
  pts.x = {1, 2, 3, 4};
  pts.y = {1.1, 3.9, 9.2, 15.8};
  pts.y_err = {0.5, 0.5, 0.5, 0.5};
  pts.points = true;
  pts.label = "measured";
  plot.add(pts);

  const auto path = tmp.file("plot.svg");
  plot.write(path);
  const std::string doc = slurp_bytes(path);
  CHECK(doc.find("<svg") != std::string::npos);
  CHECK(doc.find("</svg>") != std::string::npos);
  CHECK(doc.find("quadratic") != std::string::npos);
  CHECK(doc.find("circle") != std::string::npos);

  SUBCASE("log-x rendering") {
    svg::Plot logplot("log plot", "energy", "ratio");
    logplot.set_log_x(true);
    svg::Series s;
    s.x = {0.1, 1, 10, 100};
    s.y = {1, 0.8, 0.6, 0.7};
    logplot.add(s);
    logplot.write(tmp.file("log.svg"));
    CHECK(slurp_bytes(tmp.file("log.svg")).find("</svg>") != std::string::npos);
  }
}
