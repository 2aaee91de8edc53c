#include "sphcov/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace sphcov {

namespace {

void fill_errors(VerificationReport& r) {
  r.abs_err = std::abs(r.lhs - r.rhs);
  const double scale = std::max(std::abs(r.lhs), std::abs(r.rhs));
  r.rel_err = scale > 0.0 ? r.abs_err / scale : 0.0;
}

// JSON has no infinities; non-finite values are written as strings.
nlohmann::ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

double read_number(const nlohmann::json& j) {
  if (j.is_string()) return std::stod(j.get<std::string>());
  return j.get<double>();
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

nlohmann::ordered_json VerificationReport::to_json() const {
  nlohmann::ordered_json j;
  j["identity_id"] = identity_id;
  j["n"] = n;
  j["lhs"] = number(lhs);
  j["rhs"] = number(rhs);
  j["abs_err"] = number(abs_err);
  j["rel_err"] = number(rel_err);
  j["mc_halfwidth"] = number(mc_halfwidth);
  j["samples"] = samples;
  j["seed"] = seed;
  j["pass"] = pass;
  j["notes"] = notes;
  return j;
}

VerificationReport VerificationReport::from_json(const nlohmann::json& j) {
  VerificationReport r;
  r.identity_id = j.at("identity_id").get<std::string>();
  r.n = j.at("n").get<int>();
  r.lhs = read_number(j.at("lhs"));
  r.rhs = read_number(j.at("rhs"));
  r.abs_err = read_number(j.at("abs_err"));
  r.rel_err = read_number(j.at("rel_err"));
  r.mc_halfwidth = read_number(j.at("mc_halfwidth"));
  r.samples = j.at("samples").get<std::uint64_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.pass = j.at("pass").get<bool>();
  r.notes = j.at("notes").get<std::string>();
  return r;
}

std::string VerificationReport::csv_header() {
  return "identity_id,n,lhs,rhs,abs_err,rel_err,mc_halfwidth,samples,seed,pass,notes";
}

std::string VerificationReport::csv_row() const {
  std::ostringstream os;
  os << csv_escape(identity_id) << ',' << n << ',' << format_double(lhs) << ','
     << format_double(rhs) << ',' << format_double(abs_err) << ',' << format_double(rel_err)
     << ',' << format_double(mc_halfwidth) << ',' << samples << ',' << seed << ','
     << (pass ? "true" : "false") << ',' << csv_escape(notes);
  return os.str();
}

VerificationReport equality_report(std::string id, int n, double lhs, double rhs, double sigma,
                                   double atol, std::uint64_t samples, std::uint64_t seed,
                                   std::string notes) {
  VerificationReport r;
  r.identity_id = std::move(id);
  r.n = n;
  r.lhs = lhs;
  r.rhs = rhs;
  r.mc_halfwidth = kZ95 * sigma;
  r.samples = samples;
  r.seed = seed;
  r.notes = std::move(notes);
  fill_errors(r);
  r.pass = r.abs_err <= std::max(atol, 4.0 * sigma);
  return r;
}

VerificationReport inequality_report(std::string id, int n, double lhs, double rhs, double sigma,
                                     double atol, std::uint64_t samples, std::uint64_t seed,
                                     std::string notes) {
  VerificationReport r = equality_report(std::move(id), n, lhs, rhs, sigma, atol, samples, seed,
                                         std::move(notes));
  r.pass = lhs <= rhs + std::max(atol, 4.0 * sigma);
  return r;
}

bool all_pass(const std::vector<VerificationReport>& reports) {
  return std::all_of(reports.begin(), reports.end(),
                     [](const VerificationReport& r) { return r.pass; });
}

std::string reports_to_json(const std::vector<VerificationReport>& reports) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& r : reports) arr.push_back(r.to_json());
  return arr.dump(2) + "\n";
}

std::string reports_to_csv(const std::vector<VerificationReport>& reports) {
  std::string out = VerificationReport::csv_header() + "\n";
  for (const auto& r : reports) out += r.csv_row() + "\n";
  return out;
}

}  // namespace sphcov
