#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "riesz/cli/runner.hpp"

namespace fs = std::filesystem;
using namespace riesz::cli;

namespace {

class Scratch {
 public:
  Scratch() {
    dir_ = fs::temp_directory_path() /
           ("riesz_runner_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Scratch() { fs::remove_all(dir_); }
  const fs::path& dir() const { return dir_; }

  fs::path write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name) << text;
    return dir_ / name;
  }

 private:
  fs::path dir_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Result {
  int code;
  std::string err;
};

Result invoke(const std::string& command, const fs::path& config, const fs::path& out,
              std::vector<std::string> overrides = {}, int workers = 1) {
  RunOptions o;
  o.command = command;
  o.config_path = config;
  o.out_dir = out;
  o.overrides = std::move(overrides);
  o.workers = workers;
  std::ostringstream err;
  const int code = run(o, err);
  return {code, err.str()};
}

nlohmann::json manifest(const fs::path& out) { return nlohmann::json::parse(slurp(out / "manifest.json")); }

}  // namespace

TEST(Runner, SubcommandList) {
  EXPECT_EQ(subcommands(), (std::vector<std::string>{"apply", "resolvent-verify", "kernel-decay", "probe",
                                                     "spectrum-map", "norms", "mikhlin"}));
}

TEST(Runner, ResolventVerifyForwardAndReverse) {
  Scratch s;
  const auto cfg = s.write("rv.toml", R"([resolvent]
z_re = 2.0
delta = 1.0
fields = 4
[assert]
reconstruction_tol = 1e-8
certified = true
)");
  const Result r = invoke("resolvent-verify", cfg, s.dir() / "out");
  ASSERT_EQ(r.code, exit_ok) << r.err;
  const auto m = manifest(s.dir() / "out");
  EXPECT_EQ(m["status"], "ok");
  EXPECT_EQ(m["csv"]["rows"], 2);
  EXPECT_EQ(m["config"]["resolvent.z_re"], 2.0);
  for (const char* k : {"riesz", "fftw", "boost", "compiler"}) EXPECT_TRUE(m["versions"].contains(k)) << k;
  EXPECT_TRUE(m.contains("wall_time_seconds"));
  const std::string csv = slurp(s.dir() / "out" / "resolvent-verify.csv");
  EXPECT_EQ(csv.rfind("direction,z_re,z_im,delta,r0,n0,truncation,certified_tail", 0), 0u) << csv;
}

TEST(Runner, ProbeAtLambdaZeroIsAnnihilated) {
  Scratch s;
  const auto cfg = s.write("p.toml", "probe.lambdas = [0]\nprobe.p = [2]\nassert.max_ratio = 1e-12\n");
  const Result r = invoke("probe", cfg, s.dir() / "out");
  EXPECT_EQ(r.code, exit_ok) << r.err;
}

TEST(Runner, FailedAssertionExitsTwoAndStillWrites) {
  Scratch s;
  // lambda = 1.5 lies off the spectrum: ratios stay large.
  const auto cfg = s.write("p.toml", "probe.lambdas = [1.5]\nprobe.p = [2]\nassert.max_ratio = 1e-3\n");
  const Result r = invoke("probe", cfg, s.dir() / "out");
  EXPECT_EQ(r.code, exit_assertion);
  EXPECT_NE(r.err.find("assertion failed"), std::string::npos) << r.err;
  EXPECT_EQ(manifest(s.dir() / "out")["status"], "assertion_failure");
  EXPECT_TRUE(fs::exists(s.dir() / "out" / "probe.csv"));
}

TEST(Runner, UsageErrorsWriteNothing) {
  Scratch s;
  const auto bad_syntax = s.write("bad.toml", "probe.sweep = [8, 16,, 32]\n");
  const auto unknown_key = s.write("typo.toml", "probe.lamdas = [0.5]\n");
  const auto bad_range = s.write("range.toml", "probe.lambdas = [0.5]\nprobe.p = [0.5]\n");
  const auto ok = s.write("ok.toml", "probe.lambdas = [0]\n");
  struct Case {
    std::string command;
    fs::path config;
    std::vector<std::string> overrides;
    std::string expect;
  };
  const std::vector<Case> cases{
      {"probe", bad_syntax, {}, "bad.toml:1: field 'probe.sweep'"},
      {"probe", unknown_key, {}, "field 'probe.lamdas'"},
      {"probe", bad_range, {}, "field 'probe.p'"},
      {"probe", s.dir() / "missing.toml", {}, "cannot open"},
      {"probe", ok, {"probe.sweep=[1,"}, "--set"},
      {"nope", ok, {}, "unknown subcommand"},
  };
  for (const auto& c : cases) {
    const fs::path out = s.dir() / "never";
    const Result r = invoke(c.command, c.config, out, c.overrides);
    EXPECT_EQ(r.code, exit_usage) << c.expect;
    EXPECT_NE(r.err.find(c.expect), std::string::npos) << r.err;
    EXPECT_FALSE(fs::exists(out)) << c.expect;
  }
}

TEST(Runner, OverridesWinOverFile) {
  Scratch s;
  const auto cfg = s.write("p.toml", "probe.lambdas = [1.5]\nprobe.p = [2]\nassert.max_ratio = 1e-12\n");
  const Result r = invoke("probe", cfg, s.dir() / "out", {"probe.lambdas=[0]"});
  EXPECT_EQ(r.code, exit_ok) << r.err;
  EXPECT_EQ(manifest(s.dir() / "out")["config"]["probe.lambdas"], nlohmann::json::array({0.0}));
}

TEST(Runner, CsvIsByteIdenticalAcrossRunsAndWorkerCounts) {
  Scratch s;
  const auto cfg = s.write("a.toml", R"(grid.points = 128
symbol.kind = "bochner"
symbol.delta = 1
input.kind = "random"
input.band = 3
seed = 11
)");
  ASSERT_EQ(invoke("apply", cfg, s.dir() / "a").code, exit_ok);
  ASSERT_EQ(invoke("apply", cfg, s.dir() / "b", {}, 3).code, exit_ok);
  EXPECT_EQ(slurp(s.dir() / "a" / "apply.csv"), slurp(s.dir() / "b" / "apply.csv"));
  EXPECT_EQ(slurp(s.dir() / "a" / "fields" / "output.csv"), slurp(s.dir() / "b" / "fields" / "output.csv"));
  // A different seed changes the random input.
  ASSERT_EQ(invoke("apply", cfg, s.dir() / "c", {"seed=12"}).code, exit_ok);
  EXPECT_NE(slurp(s.dir() / "a" / "apply.csv"), slurp(s.dir() / "c" / "apply.csv"));
}

TEST(Runner, ApplyCombinationMatchesDenseOracle) {
  Scratch s;
  const auto cfg = s.write("ap.toml", R"(grid.points = 128
symbol.kind = "scalar-combination"
symbol.terms = ["b", "r", "c"]
term.b.kind = "bochner"
term.b.delta = 1
term.r.kind = "resolvent"
term.r.delta = 1
term.r.z_re = 2
term.r.coeff = [0.5, 1]
term.c.kind = "cutoff2"
term.c.r0 = 0.25
input.kind = "random"
input.band = 3
assert.dense_tol = 1e-10
)");
  const Result r = invoke("apply", cfg, s.dir() / "out");
  EXPECT_EQ(r.code, exit_ok) << r.err;
}

TEST(Runner, UnknownSymbolKindIsUsageError) {
  Scratch s;
  const auto cfg = s.write("m.toml", "symbol.kind = \"wavelet\"\n");
  const Result r = invoke("mikhlin", cfg, s.dir() / "out");
  EXPECT_EQ(r.code, exit_usage);
  EXPECT_NE(r.err.find("m.toml:1: field 'symbol.kind'"), std::string::npos) << r.err;
}

// The shipped binary: flag parsing and exit codes.
TEST(Binary, ExitCodes) {
  const char* bin = std::getenv("RIESZ_BIN");
  if (!bin) GTEST_SKIP() << "RIESZ_BIN not set";
  Scratch s;
  const auto cfg = s.write("p.toml", "probe.lambdas = [0]\n");
  const std::string base = std::string(bin) + " ";
  const std::string quiet = " >/dev/null 2>&1";
  auto status = [](int raw) { return WEXITSTATUS(raw); };
  EXPECT_EQ(status(std::system((base + "probe --config " + cfg.string() + " --out " + (s.dir() / "o").string() +
                                " --workers 2 --seed 3" + quiet).c_str())),
            0);
  EXPECT_EQ(manifest(s.dir() / "o")["seed"], 3);
  EXPECT_EQ(status(std::system((base + "probe" + quiet).c_str())), 1);
  EXPECT_EQ(status(std::system((base + "frobnicate --config x" + quiet).c_str())), 1);
  EXPECT_EQ(status(std::system((base + "probe --config " + cfg.string() + " --workers 0" + quiet).c_str())), 1);
}
