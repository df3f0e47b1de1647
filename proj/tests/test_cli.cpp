#include <doctest.h>

#include <sys/wait.h>

#include <filesystem>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hpfact/calibration.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("hpfact_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

fs::path write_config(const fs::path& dir, const json& j) {
  fs::path p = dir / "config.json";
  std::ofstream(p) << j.dump(2);
  return p;
}

Run run_cli(const std::string& args, const fs::path& dir) {
  const std::string cmd = std::string(HPFACT_CLI) + " " + args + " > " + (dir / "stdout").string() + " 2> " +
                          (dir / "stderr").string();
  const int status = std::system(cmd.c_str());
  return Run{WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(dir / "stdout"), slurp(dir / "stderr")};
}

json base() { return json{{"schema_version", 1}, {"kernel", {{"name", "riesz"}}}}; }

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("verify-kernel on the default config passes") {
  auto d = scratch("verify");
  auto r = run_cli("verify-kernel --config " HPFACT_SOURCE_DIR "/config/default.json --out " + (d / "o").string(), d);
  CHECK(r.code == 0);
  const json report = json::parse(slurp(d / "o" / "kernel_report.json"));
  CHECK(report["pass"] == true);
  CHECK(report["checks"].size() == 4);
}

TEST_CASE("epsilon outside (0, 1] is a validation error") {
  auto d = scratch("eps");
  json j = base();
  j["kernel"]["epsilon"] = 1.5;
  auto r = run_cli("verify-kernel --config " + write_config(d, j).string() + " --out " + (d / "o").string(), d);
  CHECK(r.code == 1);
  CHECK(r.err.find("kernel.epsilon") != std::string::npos);
  CHECK_FALSE(fs::exists(d / "o" / "kernel_report.json"));
}

TEST_CASE("missing kernel name is a usage error") {
  auto d = scratch("noname");
  auto r = run_cli("verify-kernel --config " + write_config(d, json{{"schema_version", 1}}).string(), d);
  CHECK(r.code == 1);
  CHECK(r.err.find("usage error") != std::string::npos);
  CHECK(r.err.find("kernel.name") != std::string::npos);
}

TEST_CASE("command line usage errors exit 1") {
  auto d = scratch("usage");
  CHECK(run_cli("", d).code == 1);
  CHECK(run_cli("factorize", d).code == 1);
  CHECK(run_cli("bogus --config " HPFACT_SOURCE_DIR "/config/default.json", d).code == 1);
  CHECK(run_cli("factorize --config /nonexistent.json", d).code == 1);
  CHECK(run_cli("--help", d).code == 0);
}

TEST_CASE("rounds = 0 gives a header-only table") {
  auto d = scratch("zero");
  json j = base();
  j["factorize"] = {{"rounds", 0}};
  auto r = run_cli("factorize --config " + write_config(d, j).string() + " --out " + (d / "o").string(), d);
  CHECK(r.code == 0);
  CHECK(slurp(d / "o" / "decay.csv") == "round,num_triples,error_quasinorm_p,contraction_ratio,triple_norm_budget_max\n");
}

TEST_CASE("default factorize run: decreasing errors, byte-identical across runs and threads") {
  auto d = scratch("factorize");
  const std::string cfg = "--config " HPFACT_SOURCE_DIR "/config/default.json";
  auto a = run_cli("factorize " + cfg + " --out " + (d / "a").string(), d);
  auto b = run_cli("factorize " + cfg + " --out " + (d / "b").string() + " --threads 4", d);
  CHECK(a.code == 0);
  CHECK(b.code == 0);
  const auto rows = read_csv(d / "a" / "decay.csv");
  REQUIRE(rows.size() == 4);
  CHECK(rows[1][1] == "1");
  for (std::size_t k = 2; k < rows.size(); ++k) CHECK(std::stod(rows[k][2]) < std::stod(rows[k - 1][2]));
  CHECK(slurp(d / "a" / "decay.csv") == slurp(d / "b" / "decay.csv"));
  CHECK(slurp(d / "a" / "factorization.json") == slurp(d / "b" / "factorization.json"));
  const json doc = json::parse(slurp(d / "a" / "factorization.json"));
  CHECK(doc["rounds"].size() == 3);
  CHECK(doc["non_contraction"] == false);
}

TEST_CASE("non-contraction exits 2") {
  // A short separation makes the error grow round over round.
  auto d = scratch("grow");
  json j = base();
  j["factorize"] = {{"N", 4.0}, {"rounds", 3}, {"spacing", 0.125}, {"atom_shape", "odd"}};
  auto r = run_cli("factorize --config " + write_config(d, j).string() + " --out " + (d / "o").string(), d);
  const json doc = json::parse(slurp(d / "o" / "factorization.json"));
  CHECK(r.code == 2);
  CHECK(doc["non_contraction"] == true);
  CHECK(r.out.find("NON-CONTRACTION") != std::string::npos);
}

TEST_CASE("commutator table with b = 0") {
  auto d = scratch("comm");
  json j = base();
  j["commutator"] = {{"half_width", 2.0},
                     {"spacing", 1.0 / 32},
                     {"trials", 8},
                     {"duality_triples", 5},
                     {"lip_sample_budget", 1 << 16},
                     {"family", {{{"name", "zero"}, {"type", "zero"}}, {{"name", "abs_power"}, {"type", "power"}}}}};
  const std::string args = "commutator --config " + write_config(d, j).string() + " --seed 3 --out ";
  // Eight trials on a small grid under-estimate the norm, so only the
  // table contents are checked here, not the band.
  run_cli(args + (d / "a").string(), d);
  const auto rows = read_csv(d / "a" / "commutator.csv");
  REQUIRE(rows.size() == 3);
  CHECK(rows[0] == std::vector<std::string>{"name", "seminorm_est", "commutator_estimate", "ratio", "duality_rel_err"});
  CHECK(rows[1] == std::vector<std::string>{"zero", "0", "0", "0", "0"});
  CHECK(std::stod(rows[2][4]) <= 1e-10);
  run_cli(args + (d / "b").string() + " --threads 4", d);
  CHECK(slurp(d / "a" / "commutator.csv") == slurp(d / "b" / "commutator.csv"));

  j["commutator"]["family"][1]["alpha"] = 0.5;
  auto bad = run_cli("commutator --config " + write_config(d, j).string(), d);
  CHECK(bad.code == 1);
  CHECK(bad.err.find("alpha = n(1/p - 1)") != std::string::npos);
}

TEST_CASE("default commutator family stays in the calibrated band") {
  auto d = scratch("family");
  auto r = run_cli("commutator --config " HPFACT_SOURCE_DIR "/config/default.json --out " + (d / "o").string(), d);
  CHECK(r.code == 0);
  const auto rows = read_csv(d / "o" / "commutator.csv");
  REQUIRE(rows.size() == 4);
  for (std::size_t k = 1; k < rows.size(); ++k) {
    CHECK(std::stod(rows[k][3]) >= 1.0 / hpfact::calibration::lip_equivalence);
    CHECK(std::stod(rows[k][3]) <= hpfact::calibration::lip_equivalence);
    CHECK(std::stod(rows[k][4]) <= 1e-10);
  }
}

TEST_CASE("decay-table") {
  auto d = scratch("decay");
  json j = base();
  j["decay_table"] = {{"N", {8.0, 16.0, 32.0}}};
  auto r = run_cli("decay-table --config " + write_config(d, j).string() + " --out " + (d / "o").string(), d);
  CHECK(r.code == 0);
  const auto rows = read_csv(d / "o" / "approximation_decay.csv");
  REQUIRE(rows.size() == 4);
  CHECK(rows[1].size() == 4);  // no ratio for the first N
  CHECK(rows[2].size() == 5);
}
