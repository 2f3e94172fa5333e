#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "fanlab/cli/config.hpp"

namespace fs = std::filesystem;
using fanlab::cli::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fanlab_cli_" + std::to_string(::getpid()) + "_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

Run run(const std::string& args, const fs::path& dir) {
  const char* bin = std::getenv("FANLAB_BIN");
  REQUIRE(bin != nullptr);
  const std::string cmd = std::string(bin) + " " + args + " > " + (dir / "stdout.txt").string() + " 2> " +
                          (dir / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(dir / "stdout.txt"), slurp(dir / "stderr.txt")};
}

// Data rows of a CSV with the comment lines and header dropped.
std::vector<std::string> rows(const std::string& csv) {
  std::vector<std::string> out;
  std::istringstream in(csv);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.rfind("#", 0) == 0) continue;
    if (header) {
      header = false;
      continue;
    }
    out.push_back(line);
  }
  return out;
}

}  // namespace

TEST_CASE("schema covers every command and rejects unknown keys") {
  using namespace fanlab::cli;
  for (const auto& c : commands()) {
    CHECK_FALSE(schema(c).empty());
    const auto cfg = resolve_config(c, std::nullopt, {});
    CHECK(cfg.contains("out"));
    CHECK(cfg.contains("seed"));
  }
  CHECK_THROWS_AS(resolve_config("simulate", std::nullopt, {{"lamda", "0.5"}}), ConfigError);
  CHECK_THROWS_AS(resolve_config("nope", std::nullopt, {}), ConfigError);
  const auto cfg = resolve_config("coupling-verify", std::nullopt, {{"times", "[0, 2]"}, {"seeds", "3"}});
  CHECK(cfg["times"] == json::array({0, 2}));
  CHECK(cfg["seeds"] == 3);
}

TEST_CASE("config files and flags: flags win") {
  const auto dir = scratch("cfg");
  std::ofstream(dir / "c.json") << R"({"lambda": 0.9, "t": 8, "seed": 4})";
  const auto cfg = fanlab::cli::resolve_config("simulate", (dir / "c.json").string(), {{"t", "16"}});
  CHECK(cfg["lambda"] == 0.9);
  CHECK(cfg["t"] == 16);
  CHECK(cfg["seed"] == 4);
  std::ofstream(dir / "bad.json") << R"({"lambda": "high"})";
  CHECK_THROWS_AS(fanlab::cli::resolve_config("simulate", (dir / "bad.json").string(), {}), fanlab::cli::ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("simulate writes a manifest and reruns byte-identically") {
  const auto a = scratch("sim_a"), b = scratch("sim_b");
  const std::string args = "simulate --t 16 --replicas 3 --seed 5 --plot true --out ";
  REQUIRE(run(args + a.string(), a).code == 0);
  REQUIRE(run(args + b.string(), b).code == 0);
  for (const char* f : {"simulate.csv", "simulate.manifest.json", "simulate.svg"}) {
    REQUIRE(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  const auto csv = slurp(a / "simulate.csv");
  CHECK(csv.find("# manifest: simulate.manifest.json") != std::string::npos);
  CHECK(csv.find("# seed: 5") != std::string::npos);
  const auto manifest = json::parse(slurp(a / "simulate.manifest.json"));
  CHECK(manifest["command"] == "simulate");
  CHECK(manifest["parameters"]["t"] == 16);
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("misspelled keys exit with status 2 and name the key") {
  const auto d = scratch("typo");
  const auto r = run("simulate --lamda 0.5 --out " + d.string(), d);
  CHECK(r.code == 2);
  CHECK(r.err.find("lamda") != std::string::npos);
  std::ofstream(d / "c.json") << R"({"lamda": 0.5})";
  const auto f = run("simulate --config " + (d / "c.json").string() + " --out " + d.string(), d);
  CHECK(f.code == 2);
  CHECK(f.err.find("lamda") != std::string::npos);
  CHECK(run("simulate --t -1 --out " + d.string(), d).code == 2);
  fs::remove_all(d);
}

TEST_CASE("coupling-verify passes, including at t = 0") {
  const auto d = scratch("coupling");
  const auto r = run("coupling-verify --times [0] --seeds 2 --window 60 --out " + d.string(), d);
  CHECK(r.code == 0);
  const auto body = rows(slurp(d / "coupling.csv"));
  REQUIRE_FALSE(body.empty());
  for (const auto& line : body) CHECK(line.substr(line.rfind(',') + 1) == "true");
  CHECK(run("coupling-verify --times [0,2,6] --seeds 2 --window 80 --out " + d.string(), d).code == 0);
  fs::remove_all(d);
}

TEST_CASE("lpp-shape reports the diagonal target") {
  const auto d = scratch("lpp");
  REQUIRE(run("lpp-shape --n [60] --thetas [0.5] --replicas 5 --out " + d.string(), d).code == 0);
  const auto body = rows(slurp(d / "lpp_shape.csv"));
  REQUIRE(body.size() == 1);
  CHECK(body[0].rfind("60,0.5,5,", 0) == 0);
  CHECK(body[0].find(",2,") != std::string::npos);
  CHECK(run("lpp-shape --thetas [1.5] --out " + d.string(), d).code == 2);
  fs::remove_all(d);
}

TEST_CASE("hydro-check writes the normalized deviation and the profile") {
  const auto d = scratch("hydro");
  REQUIRE(run("hydro-check --n 32 --replicas 2 --profile_points 11 --out " + d.string(), d).code == 0);
  const auto csv = slurp(d / "hydro.csv");
  CHECK(csv.find("normalized") != std::string::npos);
  CHECK(rows(csv).size() == 2);
  CHECK(rows(slurp(d / "hydro_profile.csv")).size() == 11);
  CHECK(run("hydro-check --t_multiplier 0.25 --out " + d.string(), d).code == 2);
  fs::remove_all(d);
}

TEST_CASE("sll summary carries the KS row with its threshold") {
  const auto d = scratch("sll");
  REQUIRE(run("sll --n_min 4 --n_max 5 --replicas 10 --ks_threshold 0.9 --out " + d.string(), d).code == 0);
  const auto body = rows(slurp(d / "sll_summary.csv"));
  REQUIRE_FALSE(body.empty());
  CHECK(body[0].rfind("sll,ks_uniform_terminal,", 0) == 0);
  CHECK(body[0].find(",0.90000000000000002,true") != std::string::npos);
  // (2 scales) x (17 grid points) x (10 replicas)
  CHECK(rows(slurp(d / "sll_trajectories.csv")).size() == 2 * 17 * 10);
  CHECK(run("sll --m 8 --out " + d.string(), d).code == 2);
  // A threshold nobody meets fails only in strict mode.
  CHECK(run("sll --n_min 4 --n_max 4 --replicas 5 --ks_threshold 0 --out " + d.string(), d).code == 0);
  CHECK(run("sll --n_min 4 --n_max 4 --replicas 5 --ks_threshold 0 --strict true --out " + d.string(), d).code == 3);
  fs::remove_all(d);
}
