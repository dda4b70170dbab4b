#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "hsteer/config.hpp"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kBinary = HSTEER_BINARY;
const std::string kConfigs = HSTEER_CONFIG_DIR;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hsteer_cli_" + std::to_string(::getpid())) / name;
  fs::create_directories(p);
  return p;
}

int run(const std::string& args) {
  const std::string cmd = kBinary + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

json read_json(const fs::path& p) { return json::parse(slurp(p)); }

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream f(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::string config(const std::string& name) { return kConfigs + "/" + name; }

json base_config() { return hsteer::read_json_file(config("ideal.json")); }

fs::path write_config(const fs::path& dir, const std::string& name, const json& j) {
  const fs::path p = dir / name;
  std::ofstream(p) << j.dump(2);
  return p;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("strict configuration parsing") {
  const json good = base_config();
  CHECK_NOTHROW(hsteer::parse_experiment_config(good));

  SUBCASE("round trip") {
    const auto c = hsteer::parse_experiment_config(good);
    CHECK(hsteer::to_json(c) == hsteer::to_json(hsteer::parse_experiment_config(hsteer::to_json(c))));
  }
  SUBCASE("unknown top-level key") {
    json j = good;
    j["channel_loss"] = 3.0;
    CHECK_THROWS_AS(hsteer::parse_experiment_config(j), hsteer::ConfigError);
  }
  SUBCASE("unknown nested key") {
    json j = good;
    j["source1"]["xi"] = 0.1;
    CHECK_THROWS_AS(hsteer::parse_experiment_config(j), hsteer::ConfigError);
    j = good;
    j["detectors"]["alice_plus"]["eta"] = 0.5;
    CHECK_THROWS_AS(hsteer::parse_experiment_config(j), hsteer::ConfigError);
  }
  SUBCASE("wrong types and ranges") {
    json j = good;
    j["settings_n"] = 6.5;
    CHECK_THROWS_AS(hsteer::parse_experiment_config(j), hsteer::ConfigError);
    j = good;
    j["settings_n"] = 5;
    CHECK_THROWS_AS(hsteer::parse_experiment_config(j), hsteer::ConfigError);
    j = good;
    j["channel_loss_db"] = "high";
    CHECK_THROWS_AS(hsteer::parse_experiment_config(j), hsteer::ConfigError);
    j = good;
    j["source2"]["squeezing"] = 1.0;
    CHECK_THROWS_AS(hsteer::parse_experiment_config(j), hsteer::ConfigError);
    j = good;
    j["source2"]["pair_state"] = "bell";
    CHECK_THROWS_AS(hsteer::parse_experiment_config(j), hsteer::ConfigError);
  }
  SUBCASE("missing keys take defaults") {
    const auto c = hsteer::parse_experiment_config(json::object());
    CHECK(c.max_photons == 6);
    CHECK(c.swap_enabled);
  }
  SUBCASE("every shipped config parses") {
    for (const auto& entry : fs::directory_iterator(kConfigs)) {
      const auto name = entry.path().filename().string();
      if (name.rfind("geometry_", 0) == 0) {
        CHECK_NOTHROW(hsteer::load_geometry(entry.path().string()));
      } else {
        CHECK_NOTHROW(hsteer::load_experiment_config(entry.path().string()));
      }
    }
  }
  SUBCASE("geometry keys") {
    json g = hsteer::read_json_file(config("geometry_symmetric_30km.json"));
    g["rng"]["z_m"] = 0.0;
    CHECK_THROWS_AS(hsteer::parse_geometry(g), hsteer::ConfigError);
    g = hsteer::read_json_file(config("geometry_symmetric_30km.json"));
    g["bsm"].erase("t_ns");
    CHECK_THROWS_AS(hsteer::parse_geometry(g), hsteer::ConfigError);
  }
}

TEST_CASE("bounds command") {
  const auto dir = scratch("bounds");
  const auto out = dir / "c6.csv";
  REQUIRE(run("bounds --n 6 --out " + out.string()) == 0);
  const std::string text = slurp(out);
  CHECK(text.rfind("# manifest=c6.csv.manifest.json\n", 0) == 0);
  const auto rows = read_csv(out);
  REQUIRE(rows.size() == 20);
  CHECK(rows[0] == std::vector<std::string>{"epsilon", "c_n", "c_inf_approx"});
  double previous = 2.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double c = std::stod(rows[i][1]);
    CHECK(c <= previous + 1e-12);
    CHECK(std::stod(rows[i][2]) <= c + 1e-12);
    previous = c;
  }
  const json m = read_json(dir / "c6.csv.manifest.json");
  CHECK(m["command"] == "bounds");
  CHECK(m["outputs"][0] == "c6.csv");
  CHECK(m.contains("version"));
  CHECK(m.contains("wall_clock_s"));
  CHECK(m.contains("truncation_tail_weight"));

  const auto two = dir / "c2.csv";
  REQUIRE(run("bounds --n 2 --grid 0.5,1.0 --out " + two.string()) == 0);
  const auto r2 = read_csv(two);
  CHECK(std::stod(r2[1][1]) == doctest::Approx(1.0));
  CHECK(std::stod(r2[2][1]) == doctest::Approx(0.70710678).epsilon(1e-8));

  const auto six = dir / "c6_sixth.csv";
  REQUIRE(run("bounds --n 6 --grid 0.16666666666666667 --out " + six.string()) == 0);
  CHECK(std::stod(read_csv(six)[1][1]) == doctest::Approx(1.0));
}

TEST_CASE("configuration errors exit with 2") {
  const auto dir = scratch("errors");
  CHECK(run("bounds --n 5 --out " + (dir / "x.csv").string()) == 2);
  CHECK(run("bounds --n 6 --grid 0,0.5 --out " + (dir / "x.csv").string()) == 2);
  CHECK(run("bounds --bogus") == 2);
  CHECK(run("") == 2);
  CHECK(run("simulate --config " + (dir / "missing.json").string() + " --out " + (dir / "s.json").string()) == 2);

  json bad = base_config();
  bad["unknown_key"] = 1;
  const auto path = write_config(dir, "bad.json", bad);
  CHECK(run("simulate --config " + path.string() + " --out " + (dir / "s.json").string()) == 2);
  CHECK(run("sweep --config " + config("ideal.json") + " --axis xi1 --values 0.1 --out " + (dir / "w.csv").string()) == 2);
  CHECK(run("tomo --state singlet --counts x.csv --out " + (dir / "t.json").string()) == 2);
  CHECK(run("tomo --state werner:2 --out " + (dir / "t.json").string()) == 2);
  CHECK(run("simulate --config " + config("ideal.json") + " --mode fast --out " + (dir / "s.json").string()) == 2);
  CHECK(run("--version") == 0);
}

TEST_CASE("simulate") {
  const auto dir = scratch("simulate");
  SUBCASE("ideal config violates the bound") {
    const auto out = dir / "ideal.json";
    REQUIRE(run("simulate --config " + config("ideal.json") + " --trials 3000 --seed 5 --out " + out.string()) == 0);
    const json r = read_json(out);
    CHECK(r["verdict"] == "PASS");
    CHECK(r["manifest"] == "ideal.json.manifest.json");
    CHECK(r["steering"]["value"].get<double>() > 0.95);
    CHECK(fs::exists(dir / "ideal.trials.csv"));
    CHECK(slurp(dir / "ideal.trials.csv").rfind("# manifest=ideal.json.manifest.json", 0) == 0);
    const json m = read_json(dir / "ideal.json.manifest.json");
    CHECK(m["seed"] == 5);
    CHECK(m["config"]["source1"]["squeezing"] == 0.01);
  }
  SUBCASE("product state does not violate") {
    const auto out = dir / "product.json";
    REQUIRE(run("simulate --config " + config("product_state.json") + " --trials 3000 --out " + out.string()) == 0);
    CHECK(read_json(out)["verdict"] == "FAIL");
  }
  SUBCASE("identical seed gives byte-identical outputs") {
    const auto a = dir / "a" / "run.json";
    const auto b = dir / "b" / "run.json";
    const std::string args = "simulate --config " + config("calibrated_0db.json") + " --trials 500 --seed 9 --out ";
    REQUIRE(run(args + a.string()) == 0);
    REQUIRE(run(args + b.string()) == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(dir / "a" / "run.trials.csv") == slurp(dir / "b" / "run.trials.csv"));
    json ma = read_json(dir / "a" / "run.json.manifest.json");
    json mb = read_json(dir / "b" / "run.json.manifest.json");
    ma.erase("wall_clock_s");
    mb.erase("wall_clock_s");
    CHECK(ma == mb);
  }
}

TEST_CASE("sweep") {
  const auto dir = scratch("sweep");
  SUBCASE("conventional loss sweep decays with transmission") {
    const auto out = dir / "conv.csv";
    REQUIRE(run("sweep --config " + config("conventional_noloss.json") + " --axis loss_db --values 0,10 --out " + out.string()) == 0);
    const auto rows = read_csv(out);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0][0] == "loss_db");
    CHECK(std::stod(rows[2][1]) / std::stod(rows[1][1]) == doctest::Approx(0.1).epsilon(2e-3));
  }
  SUBCASE("thread count does not change the output") {
    const auto one = dir / "one.csv", four = dir / "four.csv";
    const std::string args = "sweep --config " + config("xi2_scan_ideal.json") + " --axis xi2 --values 0.005,0.01,0.02,0.04 ";
    REQUIRE(run(args + "--threads 1 --out " + one.string()) == 0);
    REQUIRE(run(args + "--threads 4 --out " + four.string()) == 0);
    const auto a = slurp(one), b = slurp(four);
    CHECK(a.substr(a.find('\n')) == b.substr(b.find('\n')));
    const auto rows = read_csv(one);
    for (std::size_t i = 2; i < rows.size(); ++i) CHECK(std::stod(rows[i][1]) < std::stod(rows[i - 1][1]));
  }
}

TEST_CASE("tomo") {
  const auto dir = scratch("tomo");
  SUBCASE("synthetic singlet") {
    const auto out = dir / "singlet.json";
    REQUIRE(run("tomo --state singlet --seed 3 --resamples 100 --out " + out.string()) == 0);
    const json r = read_json(out);
    CHECK(r["fidelity_singlet"].get<double>() >= 0.995);
    CHECK(r["converged"] == true);
    CHECK(r["monte_carlo"]["resamples"] == 100);
    CHECK(fs::exists(dir / "singlet.counts.csv"));

    const auto again = dir / "again.json";
    REQUIRE(run("tomo --counts " + (dir / "singlet.counts.csv").string() + " --resamples 0 --out " + again.string()) == 0);
    CHECK(read_json(again)["fidelity_singlet"].get<double>() == doctest::Approx(r["fidelity_singlet"].get<double>()).epsilon(1e-9));
  }
  SUBCASE("iteration cap reports non-convergence with exit 3") {
    const auto out = dir / "capped.json";
    CHECK(run("tomo --state werner:0.9 --resamples 0 --max-iterations 1 --out " + out.string()) == 3);
    CHECK(fs::exists(out));
    CHECK(read_json(out)["converged"] == false);
  }
}

TEST_CASE("timing") {
  const auto dir = scratch("timing");
  const auto out = dir / "t.json";
  REQUIRE(run("timing --config " + config("geometry_symmetric_30km.json") + " --out " + out.string()) == 0);
  const json r = read_json(out);
  CHECK(r["all_pass"] == true);
  CHECK(r["constraints"].size() == 4);
  REQUIRE(run("timing --config " + config("geometry_colocated.json") + " --out " + out.string()) == 0);
  CHECK(read_json(out)["all_pass"] == false);
}

}
