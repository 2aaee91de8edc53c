#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace sphcov {

/// Everything one CLI invocation needs. Serializes to JSON and back
/// unchanged; `sphcov --config file.json` replays a saved run.
struct RunConfig {
  std::string subcommand;  // density, constants, verify, concentration, hoeffding, semigroup
  int n = 3;
  int n_max = 0;  // constants: run n..n_max when > n
  int order = 1;
  std::string f = "x1";
  std::string g = "x1";
  std::vector<double> alpha;  // density grid
  std::vector<double> r;      // concentration grid
  std::vector<double> x;      // hoeffding points
  std::vector<double> y;
  double t = 1.0;  // hoeffding frequency, semigroup time
  double s = 1.0;
  std::string identity;          // verify
  std::string mode = "deviation";  // concentration: deviation | expmoment
  std::string dist = "uniform";  // uniform | bernoulli | gauss | table:<file>
  std::string op = "kernel";     // kernel | marginal | stein | fourier | verify
  double a = 0.0;
  double b = 1.0;
  double prob = 0.5;
  double mean = 0.0;
  double var = 1.0;
  double p = 2.0;
  double c = 1.0 / 24.0;
  std::uint64_t samples = 1'000'000;
  std::optional<std::uint64_t> seed;
  double atol = 1e-3;
  double rtol = 1e-6;
  std::string output;  // file path; empty means default directory or stdout
  std::string format = "json";
  bool serial = false;

  nlohmann::ordered_json to_json() const;
  /// Throws InputError on unknown keys or wrong types.
  static RunConfig from_json(const nlohmann::json& j);
  /// Throws InputError when a value is out of range.
  void validate() const;
};

inline constexpr const char* kOutputDirEnv = "SPHCOV_OUTPUT_DIR";

enum ExitCode { kPass = 0, kCheckFail = 1, kUsage = 2, kScope = 3 };

/// Runs one configuration and writes its report. Returns an ExitCode.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv (CLI11) and runs. Usage errors return kUsage.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Writes to a temporary file in the same directory and renames it.
void write_atomically(const std::string& path, const std::string& content);

}  // namespace sphcov
