#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "qjumps/commands.hpp"
#include "qjumps/errors.hpp"

using namespace qjumps;
using nlohmann::json;

namespace {

struct CsvRow {
  double eta, value, error;
  std::string method;
};

std::vector<CsvRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<CsvRow> rows;
  std::getline(in, line);  // manifest comment
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    CsvRow r;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    ls >> r.eta >> r.value >> r.error >> r.method;
    rows.push_back(r);
  }
  return rows;
}

std::vector<std::vector<double>> parse_numbers(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<std::vector<double>> rows;
  std::getline(in, line);
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::vector<double> v;
    double x;
    while (ls >> x) v.push_back(x);
    rows.push_back(v);
  }
  return rows;
}

RunConfig quick() {
  RunConfig c;
  c.n_traj = 8;
  c.t_final = 219.0;
  c.bootstrap = 50;
  c.workers = 4;
  return c;
}

}  // namespace

TEST_SUITE("commands") {
  TEST_CASE("config round trip and strict keys") {
    RunConfig c;
    c.scheme = "y_secular";
    c.eta_grid = {0.3, 0.9};
    c.seed = 7;
    c.out = "ignored.csv";
    const json j = c.to_json();
    CHECK(!j.contains("out"));
    CHECK(!j.contains("workers"));
    const RunConfig back = RunConfig::from_json(j);
    CHECK(back.to_json() == j);
    CHECK(back.seed == 7);
    CHECK_THROWS_AS(RunConfig::from_json(json{{"no_such_key", 1}}), ConfigError);
    RunConfig bad;
    bad.eta_grid = {0.5, 1.5};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = RunConfig{};
    bad.sampling = "sometimes";
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    CHECK(RunConfig{}.records_per_trajectory() == 500);
  }

  TEST_CASE("number formatting") {
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1.0 / 3.0) == "0.333333333333");
    CHECK(round12(1.0 / 3.0) == 0.333333333333);
  }

  TEST_CASE("SAID curve rises to one and reruns are byte-identical") {
    RunConfig c = quick();
    c.out = "test_curve_said.csv";
    const auto r = cmd_curve(c);
    REQUIRE(r.exit_code == 0);
    CHECK(r.files[0].content.rfind("# manifest: test_curve_said.csv.manifest.json\n", 0) == 0);
    const auto rows = parse_csv(r.files[0].content);
    std::vector<double> mc, oracle;
    for (const auto& row : rows) (row.method == "mc" ? mc : oracle).push_back(row.value);
    REQUIRE(mc.size() == 5);
    REQUIRE(oracle.size() == 5);
    for (std::size_t i = 1; i < oracle.size(); ++i) CHECK(oracle[i] > oracle[i - 1]);
    CHECK(oracle.back() == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(mc.back() == doctest::Approx(1.0).epsilon(1e-6));

    RunConfig serial = c;
    serial.workers = 1;
    CHECK(cmd_curve(serial).files[0].content == r.files[0].content);
  }

  TEST_CASE("secular Y curve stays below the SAID curve") {
    RunConfig c = quick();
    c.scheme = "y_secular";
    const auto y = parse_csv(cmd_curve(c).files[0].content);
    c.scheme = "said";
    const auto s = parse_csv(cmd_curve(c).files[0].content);
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y[i].method == "oracle") CHECK(y[i].value <= s[i].value + 1e-12);
    }
  }

  TEST_CASE("surface cells respect the local bound and reach two") {
    RunConfig c = quick();
    c.eta_grid = {0.3, 0.5, 1.0};
    const auto r = cmd_surface(c);
    REQUIRE(r.files.size() == 2);
    for (const auto& row : parse_numbers(r.files[0].content)) {
      REQUIRE(row.size() == 4);
      if (row[0] + row[1] <= 1.0) CHECK(row[2] <= 1.0 + 3.0 * row[3]);
      if (row[0] == 1.0 && row[1] == 1.0) CHECK(row[2] > 1.9);
    }
    const json summary = json::parse(r.files[1].content);
    CHECK(summary["pair"] == "said_y");
    CHECK(!summary["violating_cells"].empty());
  }

  TEST_CASE("x_y surface violates at high efficiency") {
    RunConfig c = quick();
    c.pair = "x_y";
    c.eta_grid = {0.9};
    const auto rows = parse_numbers(cmd_surface(c).files[0].content);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0][2] - 1.0 > 3.0 * rows[0][3]);
  }

  TEST_CASE("critical search reports inconclusive on a tiny budget") {
    RunConfig c = quick();
    c.n_traj = 2;
    c.budget = 2;
    c.t_final = 119.0;
    const auto r = cmd_critical(c);
    const json j = json::parse(r.files[0].content);
    if (j["status"] == "inconclusive") {
      CHECK(r.exit_code == exit_code::inconclusive);
      CHECK(j["eta_critical"].is_null());
      CHECK(j["reason"] == "inconclusive");
    } else {
      CHECK(r.exit_code == exit_code::ok);
    }
    CHECK(j["n_traj_used"].get<std::size_t>() <= 2);
    CHECK(j.contains("bracket"));
  }

  TEST_CASE("validation passes by default and catches a coarse step") {
    RunConfig c;
    c.workers = 0;
    const auto ok = cmd_validate(c);
    const json j = json::parse(ok.files[0].content);
    for (const auto& check : j["checks"]) {
      INFO(check.dump());
      CHECK(check["pass"].get<bool>());
    }
    CHECK(ok.exit_code == 0);

    // Flipping the sideband sign alone turns both sideband channels anti-Hermitian
    // (pure random rotations), so it is not a phase convention: the β statistics
    // and the x = 0 confinement both change even with the phase check off.
    RunConfig flipped = c;
    flipped.sideband_sign = "flipped";
    flipped.phase_check = false;
    const auto fr = cmd_validate(flipped);
    CHECK(fr.exit_code == exit_code::validation_failed);
    std::set<std::string> failed;
    const json fj = json::parse(fr.files[0].content);
    for (const auto& check : fj["checks"])
      if (!check["pass"].get<bool>()) failed.insert(check["name"].get<std::string>());
    CHECK(failed.count("beta_drift_diffusion_cross_check") == 1);
    CHECK(failed.count("secular_y_x0_confinement") == 1);

    RunConfig coarse = c;
    coarse.dt = 10.0 * scheme_dt(Scheme::y_secular, c.omega, 0.0);
    CHECK(cmd_validate(coarse).exit_code == exit_code::validation_failed);
  }

  TEST_CASE("manifests carry digests of every output") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    RunConfig c = quick();
    c.eta_grid = {0.5};
    c.out = "test_manifest_curve.csv";
    const auto r = cmd_curve(c);
    write_outputs("curve", c, r, 1.25);
    std::ifstream in("test_manifest_curve.csv.manifest.json");
    REQUIRE(in.good());
    const json m = json::parse(in);
    CHECK(m["command"] == "curve");
    CHECK(m["version"] == kVersion);
    CHECK(m["seed"] == c.seed);
    CHECK(m["outputs"][0]["sha256"] == sha256_hex(r.files[0].content));
    CHECK(RunConfig::from_json(m["config"]).to_json() == c.to_json());
    std::filesystem::remove("test_manifest_curve.csv");
    std::filesystem::remove("test_manifest_curve.csv.manifest.json");
  }
}
