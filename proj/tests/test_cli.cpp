#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sphcov/cli.hpp"
#include "sphcov/errors.hpp"

using namespace sphcov;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  args.insert(args.begin(), "sphcov");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

fs::path scratch_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / name;
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("config round trip") {
  RunConfig c;
  c.subcommand = "verify";
  c.identity = "sphere2";
  c.n = 6;
  c.f = "x1*x2";
  c.alpha = {-0.5, 0.25};
  c.seed = 42;
  c.serial = true;
  c.rtol = 3e-7;
  const auto j = c.to_json();
  const RunConfig back = RunConfig::from_json(nlohmann::json::parse(j.dump()));
  CHECK(back.to_json() == j);
  CHECK(back.seed == std::optional<std::uint64_t>(42));

  auto bad = nlohmann::json::parse(j.dump());
  bad["colour"] = 1;
  CHECK_THROWS_AS(RunConfig::from_json(bad), InputError);
  bad = nlohmann::json::parse(j.dump());
  bad["n"] = "six";
  CHECK_THROWS_AS(RunConfig::from_json(bad), InputError);
}

TEST_CASE("config validation") {
  RunConfig c;
  c.subcommand = "verify";
  c.identity = "sphere1";
  CHECK_THROWS_AS(c.validate(), InputError);  // no seed
  c.seed = 1;
  c.validate();
  c.samples = 999;
  CHECK_THROWS_AS(c.validate(), InputError);
  c.samples = 1000;
  c.atol = 0.0;
  CHECK_THROWS_AS(c.validate(), InputError);
  c.atol = 1e-3;
  c.rtol = -1.0;
  CHECK_THROWS_AS(c.validate(), InputError);
  c.rtol = 1e-6;
  c.subcommand = "plot";
  CHECK_THROWS_AS(c.validate(), InputError);
}

TEST_CASE("density on the circle at zero") {
  const Result r = call({"density", "--n", "2", "--alpha", "0", "--order", "1"});
  CHECK(r.code == kPass);
  CHECK(r.out.rfind("n,order,alpha,psi_series,psi_quadrature,rel_diff\n", 0) == 0);
  CHECK(r.out.find("2,1,0,1.57079632679489") != std::string::npos);
}

TEST_CASE("exit codes") {
  CHECK(call({"verify", "--identity", "sphere2", "--n", "4", "--f", "x1*x2", "--g", "x1*x2", "--seed", "1"}).code == kScope);
  const Result scope = call({"concentration", "--mode", "expmoment", "--order", "2", "--n", "4", "--f", "x1*x2", "--seed", "1", "--samples", "1000"});
  CHECK(scope.code == kScope);
  CHECK(scope.err.find("second-order identity requires n >= 5") != std::string::npos);
  CHECK(call({"verify", "--identity", "sphere1", "--n", "3"}).code == kUsage);  // no seed
  CHECK(call({"verify", "--identity", "sphere1", "--seed", "1", "--samples", "10"}).code == kUsage);
  CHECK(call({"verify", "--identity", "unknown", "--seed", "1"}).code == kUsage);
  CHECK(call({"verify", "--identity", "sphere1", "--f", "x1 +", "--seed", "1"}).code == kUsage);
  CHECK(call({"frobnicate"}).code == kUsage);
  CHECK(call({}).code == kUsage);
  CHECK(call({"constants", "--n", "10", "--order", "2"}).code == kCheckFail);
  CHECK(call({"constants", "--n", "5", "--order", "2"}).code == kPass);
}

TEST_CASE("help lists exactly the registry subcommands") {
  const Result r = call({"--help"});
  CHECK(r.code == kPass);
  const std::string section = r.out.substr(r.out.find("Subcommands:"));
  std::istringstream is(section);
  std::string line;
  std::getline(is, line);
  std::vector<std::string> names;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::string name;
    if (ls >> name) names.push_back(name);
  }
  CHECK(names == std::vector<std::string>{"density", "constants", "verify", "concentration",
                                          "hoeffding", "semigroup"});
  for (const auto& n : names) {
    const Result sub = call({n, "--help"});
    CHECK(sub.code == kPass);
  }
}

TEST_CASE("repeat runs give identical bytes") {
  const fs::path dir = scratch_dir("sphcov_cli_repeat");
  const std::vector<std::string> args = {"verify", "--identity", "sphere1", "--n", "3", "--f", "x1*x2",
                                         "--g", "x1*x2", "--samples", "20000", "--seed", "7"};
  auto a = args, b = args;
  a.insert(a.end(), {"--output", (dir / "a.json").string()});
  b.insert(b.end(), {"--output", (dir / "b.json").string()});
  CHECK(call(a).code == kPass);
  CHECK(call(b).code == kPass);
  CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
  CHECK_FALSE(fs::exists(dir / "a.json.tmp"));

  auto serial = args;
  serial.insert(serial.end(), {"--serial", "--output", (dir / "c.json").string()});
  CHECK(call(serial).code == kPass);
  CHECK(slurp(dir / "a.json") == slurp(dir / "c.json"));
  fs::remove_all(dir);
}

TEST_CASE("default output directory from the environment") {
  const fs::path dir = scratch_dir("sphcov_cli_env");
  ::setenv(kOutputDirEnv, dir.c_str(), 1);
  const Result r = call({"hoeffding", "--dist", "uniform", "--op", "marginal", "--x", "0.3"});
  ::unsetenv(kOutputDirEnv);
  CHECK(r.code == kPass);
  CHECK(r.out.empty());
  CHECK(slurp(dir / "hoeffding-marginal.csv") == "x,h\n0.3,0.105\n");
  fs::remove_all(dir);
}

TEST_CASE("printed config replays the same run") {
  const fs::path dir = scratch_dir("sphcov_cli_config");
  const std::vector<std::string> args = {"hoeffding", "--dist", "gauss", "--op", "kernel", "--x", "0", "1",
                                         "--format", "json"};
  auto printer = args;
  printer.push_back("--print-config");
  const Result cfg = call(printer);
  CHECK(cfg.code == kPass);
  {
    std::ofstream os(dir / "cfg.json");
    os << cfg.out;
  }
  const Result direct = call(args);
  const Result replay = call({"--config", (dir / "cfg.json").string()});
  CHECK(direct.code == kPass);
  CHECK(replay.code == kPass);
  CHECK(direct.out == replay.out);
  fs::remove_all(dir);
}

TEST_CASE("hoeffding operations") {
  CHECK(call({"hoeffding", "--dist", "bernoulli", "--a", "0", "--b", "1", "--p", "0.3", "--op", "kernel", "--x", "0.5", "--y", "0.5"}).out ==
        "x,y,H\n0.5,0.5,0.21\n");
  CHECK(call({"hoeffding", "--dist", "gauss", "--op", "stein", "--x", "0.3"}).out == "x,tau\n0.3,1\n");
  CHECK(call({"hoeffding", "--dist", "uniform", "--op", "verify"}).code == kPass);
  CHECK(call({"hoeffding", "--dist", "uniform", "--op", "fourier", "--t", "0"}).code == kUsage);
  CHECK(call({"hoeffding", "--dist", "table:/nonexistent.csv"}).code == kUsage);
}

TEST_CASE("semigroup subcommand") {
  const Result r = call({"semigroup", "--n", "4", "--f", "x1*x2 + x3", "--g", "x1*x2", "--seed", "3", "--samples", "20000"});
  CHECK(r.code == kPass);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.at("reports").size() == 4);
}

}  // TEST_SUITE
