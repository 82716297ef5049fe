#include <filesystem>
#include <sstream>

#include "doctest.h"
#include "lossperc/cli.hpp"
#include "lossperc/commands.hpp"
#include "lossperc/io.hpp"

using namespace lossperc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "lossperc_unit";
  fs::create_directories(dir);
  return dir / name;
}

int cli(std::vector<std::string> args, std::string* err_text = nullptr) {
  args.insert(args.begin(), "lossperc");
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  if (err_text) *err_text = err.str();
  return code;
}

}  // namespace

TEST_CASE("doubles round-trip through text") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456.789, 0.0}) CHECK(std::stod(format_double(v)) == v);
}

TEST_CASE("curve csv round-trip and schema check") {
  CanonicalCurve c;
  c.p = {0.0, 0.5, 1.0};
  c.mean_largest = {0.0, 1.0 / 3.0, 64.0};
  c.span_probability = {0.0, 0.25, 1.0};
  const fs::path path = scratch("curve.csv");
  write_text(path, curve_csv(c, "0123456789abcdef"));
  const std::string text = read_text(path);
  CHECK(text.rfind("# schema=curve v1\n# config_hash=0123456789abcdef\np,mean_S,span_prob\n", 0) == 0);
  const CanonicalCurve back = read_curve_csv(path);
  CHECK(back.p == c.p);
  CHECK(back.mean_largest == c.mean_largest);
  CHECK(back.span_probability == c.span_probability);
  write_text(path, threshold_csv({{8, 0.3, 0.01}}, "0123456789abcdef"));
  CHECK_THROWS_AS(read_curve_csv(path), IoError);
  CHECK_THROWS_AS(read_curve_csv(scratch("missing.csv")), IoError);
}

TEST_CASE("grid parsing") {
  CHECK(parse_grid("0:1:5") == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK(parse_grid("0.1,0.2") == std::vector<double>{0.1, 0.2});
  CHECK(parse_grid("0.3:0.3:1") == std::vector<double>{0.3});
  CHECK_THROWS_AS(parse_grid("0:1"), ConfigError);
  CHECK_THROWS_AS(parse_grid("0:2:3"), ConfigError);
  CHECK_THROWS_AS(parse_grid("a,b"), ConfigError);
  CHECK_THROWS_AS(parse_grid("0:1:0"), ConfigError);
}

TEST_CASE("config hash ignores workers and output path") {
  RunConfig a;
  a.grid = {0.5};
  RunConfig b = a;
  b.workers = 7;
  b.out = "elsewhere";
  CHECK(config_hash(a, "sweep") == config_hash(b, "sweep"));
  CHECK(config_hash(a, "sweep").size() == 16);
  b.seed = 2;
  CHECK(config_hash(a, "sweep") != config_hash(b, "sweep"));
  CHECK(config_hash(a, "sweep") != config_hash(a, "threshold"));
}

TEST_CASE("cli exit codes") {
  std::string err;
  CHECK(cli({}) == kExitConfig);
  CHECK(cli({"sweep", "--no-such-flag"}) == kExitConfig);
  CHECK(cli({"sweep", "--lattice", "cubic", "--dim", "2"}, &err) == kExitConfig);
  CHECK(err.find("conflicts") != std::string::npos);
  CHECK(cli({"sweep", "--model", "model9"}) == kExitConfig);
  CHECK(cli({"sweep", "--grid", "0:1.5:3"}) == kExitConfig);
  CHECK(cli({"verify", "--suite", "nonsense"}) == kExitConfig);
  // A regular file used as a directory cannot be written below.
  const fs::path blocker = scratch("blocker");
  write_text(blocker, "x");
  CHECK(cli({"sweep", "--size", "4", "--reps", "2", "--grid", "0:1:3", "--out", (blocker / "x").string()}) ==
        kExitIo);
  const std::string corrupt = scratch("corrupt").string();
  CHECK(cli({"verify", "--suite", "lattice_structure", "--corrupt-lattice", "--out", corrupt}) == kExitVerifyFailed);
  CHECK(cli({"verify", "--suite", "lattice_structure", "--out", corrupt}) == kExitOk);
}

TEST_CASE("cli sweep writes reproducible files") {
  const std::string a = scratch("sweep_a").string();
  const std::string b = scratch("sweep_b").string();
  const std::vector<std::string> common{"sweep", "--lattice", "cubic", "--size", "4", "--model", "model2",
                                        "--reps", "5", "--grid", "0:1:11", "--seed", "9"};
  auto with = [&](const std::string& out, const std::string& workers) {
    auto args = common;
    args.insert(args.end(), {"--out", out, "--workers", workers});
    return args;
  };
  REQUIRE(cli(with(a, "1")) == kExitOk);
  REQUIRE(cli(with(b, "3")) == kExitOk);
  CHECK(read_text(a + ".csv") == read_text(b + ".csv"));
  const CanonicalCurve c = read_curve_csv(a + ".csv");
  CHECK(c.size() == 11);
  CHECK(c.mean_largest.back() > c.mean_largest.front());
  const std::string meta = read_text(a + ".json");
  CHECK(meta.find("\"config_hash\"") != std::string::npos);
  CHECK(meta.find("\"wall_time_s\"") != std::string::npos);
}

TEST_CASE("cli threshold and lattice commands") {
  const std::string t = scratch("threshold").string();
  REQUIRE(cli({"threshold", "--lattice", "square", "--model", "bond", "--sizes", "8,12,16", "--reps", "20", "--out",
               t}) == kExitOk);
  const std::string csv = read_text(t + ".csv");
  CHECK(csv.find("L,lambda,stderr") != std::string::npos);
  CHECK(read_text(t + ".json").find("lambda_inf") != std::string::npos);
  const std::string l = scratch("lattice").string();
  REQUIRE(cli({"lattice", "--lattice", "diamond", "--dim", "3", "--size", "3", "--out", l}) == kExitOk);
  CHECK(fs::exists(l + ".edges"));
}
