#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace sphcov {

/// Outcome of one identity or inequality check.
struct VerificationReport {
  std::string identity_id;
  int n = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double abs_err = 0.0;
  double rel_err = 0.0;
  double mc_halfwidth = 0.0;  // 95% half-width of lhs - rhs; 0 when both sides are exact
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  bool pass = false;
  std::string notes;

  nlohmann::ordered_json to_json() const;
  static VerificationReport from_json(const nlohmann::json& j);
  static std::string csv_header();
  std::string csv_row() const;
};

inline constexpr double kZ95 = 1.959963984540054;

/// Two-sided check: |lhs - rhs| <= max(atol, 4 sigma), where sigma is the
/// standard error of lhs - rhs.
VerificationReport equality_report(std::string id, int n, double lhs, double rhs, double sigma,
                                   double atol, std::uint64_t samples, std::uint64_t seed,
                                   std::string notes = {});

/// One-sided check: lhs <= rhs + max(atol, 4 sigma).
VerificationReport inequality_report(std::string id, int n, double lhs, double rhs, double sigma,
                                     double atol, std::uint64_t samples, std::uint64_t seed,
                                     std::string notes = {});

bool all_pass(const std::vector<VerificationReport>& reports);

/// JSON array of reports.
std::string reports_to_json(const std::vector<VerificationReport>& reports);
std::string reports_to_csv(const std::vector<VerificationReport>& reports);

/// Shortest round-trip text of a double, used for CSV output.
std::string format_double(double v);

}  // namespace sphcov
