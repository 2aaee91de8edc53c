#include "sphcov/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "sphcov/concentration.hpp"
#include "sphcov/errors.hpp"
#include "sphcov/harmonics.hpp"
#include "sphcov/hoeffding.hpp"
#include "sphcov/mixing.hpp"
#include "sphcov/report.hpp"
#include "sphcov/verify.hpp"

namespace sphcov {

namespace {

const std::vector<std::string> kSubcommands = {"density",       "constants", "verify",
                                               "concentration", "hoeffding", "semigroup"};

bool needs_seed(const std::string& sub) {
  return sub == "verify" || sub == "concentration" || sub == "semigroup";
}

template <class T>
T get_field(const nlohmann::json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw InputError(std::string("config field '") + key + "' has the wrong type");
  }
}

std::string join_csv(const std::vector<std::string>& cells) {
  std::string s;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) s += ',';
    s += cells[i];
  }
  return s + '\n';
}

nlohmann::ordered_json number(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

struct Output {
  std::string text;
  bool pass = true;
};

// density: psi by both backends on the alpha grid.
Output run_density(const RunConfig& cfg) {
  std::vector<double> grid = cfg.alpha;
  if (grid.empty()) {
    for (int i = 0; i <= 20; ++i) grid.push_back(-1.0 + 0.1 * i);
    grid[10] = 0.0;
  }
  Output out;
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  std::string csv = "n,order,alpha,psi_series,psi_quadrature,rel_diff\n";
  for (double a : grid) {
    if (!(std::abs(a) <= 1.0)) throw InputError("alpha must lie in [-1, 1]");
    double series = std::nan("");
    if (std::abs(a) < 1.0) series = psi_series(cfg.n, a, cfg.order).value;
    const double quad = psi_quadrature(cfg.n, a, cfg.order).value;
    double rel = std::nan("");
    if (std::isfinite(series) && std::isfinite(quad)) {
      rel = std::abs(series - quad) / std::max(std::abs(quad), 1e-300);
      if (std::abs(a) <= 0.95 && rel > cfg.rtol) out.pass = false;
    }
    csv += join_csv({std::to_string(cfg.n), std::to_string(cfg.order), format_double(a),
                     format_double(series), format_double(quad), format_double(rel)});
    nlohmann::ordered_json r;
    r["n"] = cfg.n;
    r["order"] = cfg.order;
    r["alpha"] = a;
    r["psi_series"] = number(series);
    r["psi_quadrature"] = number(quad);
    r["rel_diff"] = number(rel);
    rows.push_back(r);
  }
  out.text = cfg.format == "csv" ? csv : rows.dump(2) + "\n";
  return out;
}

Output run_constants(const RunConfig& cfg) {
  Output out;
  const int last = std::max(cfg.n, cfg.n_max);
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  std::string csv = "order,n,value,error,lower,upper,within_bounds\n";
  for (int n = cfg.n; n <= last; ++n) {
    const MixingConstant c = mixing_constant(n, cfg.order);
    out.pass = out.pass && c.within_bounds;
    csv += join_csv({std::to_string(c.order), std::to_string(c.n), format_double(c.value),
                     format_double(c.error), format_double(c.lower), format_double(c.upper),
                     c.within_bounds ? "true" : "false"});
    nlohmann::ordered_json r;
    r["order"] = c.order;
    r["n"] = c.n;
    r["value"] = c.value;
    r["error"] = c.error;
    r["lower"] = c.lower;
    r["upper"] = c.upper;
    r["within_bounds"] = c.within_bounds;
    rows.push_back(r);
  }
  out.text = cfg.format == "csv" ? csv : rows.dump(2) + "\n";
  return out;
}

CheckOptions check_options(const RunConfig& cfg) {
  CheckOptions o;
  o.samples = cfg.samples;
  o.seed = *cfg.seed;
  o.atol = cfg.atol;
  o.exec = cfg.serial ? Execution::serial : Execution::parallel;
  return o;
}

Output reports_output(const RunConfig& cfg, const std::vector<VerificationReport>& reports) {
  return {cfg.format == "csv" ? reports_to_csv(reports) : reports_to_json(reports),
          all_pass(reports)};
}

Output run_verify(const RunConfig& cfg) {
  if (cfg.identity.empty()) throw InputError("verify requires --identity");
  IdentityRequest req;
  req.id = cfg.identity;
  // The circle and periodic identities act on polynomials in two variables.
  const int dim = (cfg.identity == "circle" || cfg.identity == "periodic") ? 2 : cfg.n;
  req.f = Polynomial::parse(cfg.f, dim);
  req.g = Polynomial::parse(cfg.g, dim);
  req.p = cfg.p;
  req.c = cfg.c;
  req.options = check_options(cfg);
  return reports_output(cfg, run_identity(req));
}

Output run_concentration(const RunConfig& cfg) {
  const Polynomial f = Polynomial::parse(cfg.f, cfg.n);
  const Execution exec = cfg.serial ? Execution::serial : Execution::parallel;
  if (cfg.mode == "expmoment") {
    const ExpMomentResult r = exp_moment_check(f, cfg.order, cfg.samples, *cfg.seed, exec);
    return reports_output(cfg, r.reports);
  }
  if (cfg.mode != "deviation") throw InputError("mode must be deviation or expmoment");
  std::vector<double> grid = cfg.r;
  if (grid.empty()) {
    for (int i = 1; i <= 10; ++i) grid.push_back(0.1 * i);
  }
  const ConcentrationExperiment ex = deviation_experiment(f, grid, cfg.samples, *cfg.seed, exec);
  if (cfg.format == "csv") return {ex.to_csv(), ex.pass};
  nlohmann::ordered_json j;
  j["n"] = ex.n;
  j["f"] = ex.f;
  j["lipschitz"] = ex.lipschitz;
  j["mean"] = ex.mean;
  j["mean_abs_dev"] = ex.mean_abs_dev;
  j["samples"] = ex.samples;
  j["seed"] = ex.seed;
  j["pass"] = ex.pass;
  j["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : ex.rows) {
    nlohmann::ordered_json r;
    r["r"] = row.r;
    r["count"] = row.count;
    r["empirical"] = row.empirical;
    r["wilson95"] = {row.wilson95.lo, row.wilson95.hi};
    r["bound17"] = number(row.bound_levy);
    r["bound18"] = number(row.bound_mixing);
    r["bound_poincare"] = number(row.bound_poincare);
    if (row.exact >= 0.0) r["exact"] = row.exact;
    r["pass"] = row.pass;
    j["rows"].push_back(r);
  }
  return {j.dump(2) + "\n", ex.pass};
}

Distribution1D make_distribution(const RunConfig& cfg) {
  if (cfg.dist == "uniform") return Distribution1D::uniform(cfg.a, cfg.b);
  if (cfg.dist == "bernoulli") return Distribution1D::bernoulli(cfg.a, cfg.b, cfg.prob);
  if (cfg.dist == "gauss") return Distribution1D::gaussian(cfg.mean, cfg.var);
  if (cfg.dist.rfind("table:", 0) == 0) return Distribution1D::table_from_file(cfg.dist.substr(6));
  throw InputError("unknown distribution '" + cfg.dist + "'");
}

std::vector<double> default_points(const Distribution1D& d) {
  auto [lo, hi] = d.support();
  const double sd = std::sqrt(d.variance());
  lo = std::max(lo, d.mean() - 4.0 * sd);
  hi = std::min(hi, d.mean() + 4.0 * sd);
  std::vector<double> pts;
  for (int i = 0; i <= 10; ++i) pts.push_back(lo + (hi - lo) * i / 10.0);
  return pts;
}

Output run_hoeffding(const RunConfig& cfg) {
  const Distribution1D d = make_distribution(cfg);
  const std::vector<double> xs = cfg.x.empty() ? default_points(d) : cfg.x;
  const std::vector<double> ys = cfg.y.empty() ? xs : cfg.y;
  const bool csv = cfg.format == "csv";
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  std::string text;

  if (cfg.op == "kernel") {
    text = "x,y,H\n";
    for (double x : xs) {
      for (double y : ys) {
        const double h = hoeffding_kernel(d, x, y);
        text += join_csv({format_double(x), format_double(y), format_double(h)});
        rows.push_back({{"x", x}, {"y", y}, {"H", h}});
      }
    }
  } else if (cfg.op == "marginal") {
    text = "x,h\n";
    for (double x : xs) {
      const double h = hoeffding_marginal(d, x);
      text += join_csv({format_double(x), format_double(h)});
      rows.push_back({{"x", x}, {"h", number(h)}});
    }
  } else if (cfg.op == "stein") {
    text = "x,tau\n";
    for (double x : xs) {
      const double tau = stein_kernel(d, x);
      text += join_csv({format_double(x), format_double(tau)});
      rows.push_back({{"x", x}, {"tau", tau}});
    }
  } else if (cfg.op == "fourier") {
    const auto z = hoeffding_fourier(d, cfg.t, cfg.s);
    text = "t,s,re,im\n" +
           join_csv({format_double(cfg.t), format_double(cfg.s), format_double(z.real()),
                     format_double(z.imag())});
    rows.push_back({{"t", cfg.t}, {"s", cfg.s}, {"re", z.real()}, {"im", z.imag()}});
  } else if (cfg.op == "verify") {
    std::vector<VerificationReport> reports;
    if (d.absolutely_continuous()) {
      for (int k = 1; k <= 3; ++k) {
        Polynomial u = Polynomial::monomial(1, {k}, 1.0);
        reports.push_back(stein_identity_check(d, u, cfg.atol));
      }
    }
    for (double x : xs) {
      const double closed = hoeffding_marginal(d, x);
      if (!std::isfinite(closed)) continue;
      const double quad = hoeffding_marginal_quadrature(d, x);
      reports.push_back(equality_report("hoeffding_marginal", 1, closed, quad, 0.0, cfg.atol, 0, 0,
                                        "x=" + format_double(x)));
    }
    return reports_output(cfg, reports);
  } else {
    throw InputError("op must be kernel, marginal, stein, fourier or verify");
  }
  return {csv ? text : rows.dump(2) + "\n", true};
}

Output run_semigroup(const RunConfig& cfg) {
  const Polynomial f = Polynomial::parse(cfg.f, cfg.n);
  const Polynomial g = Polynomial::parse(cfg.g, cfg.n);
  const std::vector<VerificationReport> reports = check_semigroup_identity(f, g, check_options(cfg));
  if (cfg.format == "csv") return reports_output(cfg, reports);
  const HarmonicExpansion ef = harmonic_decompose(f);
  nlohmann::ordered_json j;
  j["n"] = cfg.n;
  j["t"] = cfg.t;
  j["f"] = nlohmann::ordered_json::parse(ef.to_json());
  j["pt_f"] = nlohmann::ordered_json::parse(heat_semigroup(ef, cfg.t).to_json());
  j["reports"] = nlohmann::ordered_json::array();
  for (const auto& r : reports) j["reports"].push_back(r.to_json());
  return {j.dump(2) + "\n", all_pass(reports)};
}

std::string default_file_name(const RunConfig& cfg) {
  std::string name = cfg.subcommand;
  if (cfg.subcommand == "verify") name += "-" + cfg.identity;
  if (cfg.subcommand == "hoeffding") name += "-" + cfg.op;
  return name + "." + cfg.format;
}

void emit(const RunConfig& cfg, const std::string& text, std::ostream& out) {
  std::string path = cfg.output;
  if (path.empty()) {
    if (const char* dir = std::getenv(kOutputDirEnv); dir && *dir) {
      path = (std::filesystem::path(dir) / default_file_name(cfg)).string();
    }
  }
  if (path.empty()) {
    out << text;
  } else {
    write_atomically(path, text);
  }
}

}  // namespace

nlohmann::ordered_json RunConfig::to_json() const {
  nlohmann::ordered_json j;
  j["subcommand"] = subcommand;
  j["n"] = n;
  j["n_max"] = n_max;
  j["order"] = order;
  j["f"] = f;
  j["g"] = g;
  j["alpha"] = alpha;
  j["r"] = r;
  j["x"] = x;
  j["y"] = y;
  j["t"] = t;
  j["s"] = s;
  j["identity"] = identity;
  j["mode"] = mode;
  j["dist"] = dist;
  j["op"] = op;
  j["a"] = a;
  j["b"] = b;
  j["prob"] = prob;
  j["mean"] = mean;
  j["var"] = var;
  j["p"] = p;
  j["c"] = c;
  j["samples"] = samples;
  if (seed) {
    j["seed"] = *seed;
  } else {
    j["seed"] = nullptr;
  }
  j["atol"] = atol;
  j["rtol"] = rtol;
  j["output"] = output;
  j["format"] = format;
  j["serial"] = serial;
  return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw InputError("config must be a JSON object");
  static const std::set<std::string> known = {
      "subcommand", "n", "n_max", "order", "f",  "g",   "alpha",   "r",    "x",    "y",
      "t",          "s", "identity", "mode", "dist", "op", "a",     "b",    "prob", "mean",
      "var",        "p", "c",     "samples", "seed", "atol", "rtol", "output", "format", "serial"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw InputError("unknown config field '" + key + "'");
  }
  RunConfig c;
  auto read = [&](const char* key, auto& field) {
    if (j.contains(key)) field = get_field<std::decay_t<decltype(field)>>(j, key);
  };
  read("subcommand", c.subcommand);
  read("n", c.n);
  read("n_max", c.n_max);
  read("order", c.order);
  read("f", c.f);
  read("g", c.g);
  read("alpha", c.alpha);
  read("r", c.r);
  read("x", c.x);
  read("y", c.y);
  read("t", c.t);
  read("s", c.s);
  read("identity", c.identity);
  read("mode", c.mode);
  read("dist", c.dist);
  read("op", c.op);
  read("a", c.a);
  read("b", c.b);
  read("prob", c.prob);
  read("mean", c.mean);
  read("var", c.var);
  read("p", c.p);
  read("c", c.c);
  read("samples", c.samples);
  if (j.contains("seed") && !j.at("seed").is_null()) c.seed = get_field<std::uint64_t>(j, "seed");
  read("atol", c.atol);
  read("rtol", c.rtol);
  read("output", c.output);
  read("format", c.format);
  read("serial", c.serial);
  return c;
}

void RunConfig::validate() const {
  if (std::find(kSubcommands.begin(), kSubcommands.end(), subcommand) == kSubcommands.end()) {
    throw InputError("unknown subcommand '" + subcommand + "'");
  }
  if (!(atol > 0.0) || !(rtol > 0.0)) throw InputError("tolerances must be > 0");
  if (samples < 1000) throw InputError("samples must be >= 1000");
  if (needs_seed(subcommand) && !seed) throw InputError(subcommand + " requires --seed");
  if (n < 1) throw InputError("n must be >= 1");
  if (order != 1 && order != 2) throw InputError("order must be 1 or 2");
  if (format != "json" && format != "csv") throw InputError("format must be json or csv");
}

void write_atomically(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
    os << content;
    os.flush();
    if (!os) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, target);
}

int run(const RunConfig& config, std::ostream& out, std::ostream& err) {
  try {
    config.validate();
    Output result;
    const std::string& sub = config.subcommand;
    if (sub == "density") {
      result = run_density(config);
    } else if (sub == "constants") {
      result = run_constants(config);
    } else if (sub == "verify") {
      result = run_verify(config);
    } else if (sub == "concentration") {
      result = run_concentration(config);
    } else if (sub == "hoeffding") {
      result = run_hoeffding(config);
    } else {
      result = run_semigroup(config);
    }
    emit(config, result.text, out);
    return result.pass ? kPass : kCheckFail;
  } catch (const ScopeError& e) {
    err << "scope: " << e.what() << '\n';
    return kScope;
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return kCheckFail;
  }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Covariance identities on the sphere: mixing densities, constants and checks"};
  app.require_subcommand(0, 1);
  RunConfig cfg;
  std::string config_path;
  bool print_config = false;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "Run a saved RunConfig JSON file");

  auto common = [&](CLI::App* s) {
    s->add_option("--n", cfg.n, "Ambient dimension");
    s->add_option("--format,--out", cfg.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
    s->add_option("--output,-o", cfg.output, "Output file (default: stdout or $SPHCOV_OUTPUT_DIR)");
    s->add_option("--atol", cfg.atol, "Absolute tolerance");
    s->add_option("--rtol", cfg.rtol, "Relative tolerance");
    s->add_option("--samples", cfg.samples, "Monte Carlo samples (>= 1000)");
    s->add_option("--seed", seed, "Random seed");
    s->add_flag("--serial", cfg.serial, "Run kernels serially");
    s->add_flag("--print-config", print_config, "Print the RunConfig JSON and exit");
  };
  auto polys = [&](CLI::App* s) {
    s->add_option("--f", cfg.f, "Polynomial f, e.g. \"x1*x2 - 0.5*x3^2\"");
    s->add_option("--g", cfg.g, "Polynomial g");
  };

  std::map<std::string, CLI::App*> subs;
  auto* density = subs["density"] = app.add_subcommand("density", "Tabulate psi by series and quadrature (CSV)");
  common(density);
  density->add_option("--order", cfg.order, "1 or 2");
  density->add_option("--alpha", cfg.alpha, "Inner-product values in [-1, 1]");

  auto* constants = subs["constants"] = app.add_subcommand("constants", "Mixing constants c_n with bounds");
  common(constants);
  constants->add_option("--order", cfg.order, "1 or 2");
  constants->add_option("--n-max", cfg.n_max, "Last n of the range");

  auto* verify = subs["verify"] = app.add_subcommand("verify", "Run one identity from the registry");
  common(verify);
  polys(verify);
  verify->add_option("--identity", cfg.identity, "Registry id")->check(CLI::IsMember(identity_ids()));
  verify->add_option("--p", cfg.p, "Exponent for covbounds");
  verify->add_option("--c", cfg.c, "Marginal constant for periodic");

  auto* conc = subs["concentration"] = app.add_subcommand("concentration", "Deviation tails against bounds (CSV)");
  common(conc);
  polys(conc);
  conc->add_option("--r", cfg.r, "Deviation levels");
  conc->add_option("--mode", cfg.mode, "deviation or expmoment")->check(CLI::IsMember({"deviation", "expmoment"}));
  conc->add_option("--order", cfg.order, "Exponential-moment order");

  auto* hoeff = subs["hoeffding"] = app.add_subcommand("hoeffding", "Hoeffding and Stein kernels of a 1D law");
  common(hoeff);
  hoeff->add_option("--dist", cfg.dist, "uniform|bernoulli|gauss|table:<file>");
  hoeff->add_option("--op", cfg.op, "kernel|marginal|stein|fourier|verify")
      ->check(CLI::IsMember({"kernel", "marginal", "stein", "fourier", "verify"}));
  hoeff->add_option("--a", cfg.a, "Left end or first atom");
  hoeff->add_option("--b", cfg.b, "Right end or second atom");
  hoeff->add_option("--p", cfg.prob, "Bernoulli mass at a");
  hoeff->add_option("--mean", cfg.mean, "Gaussian mean");
  hoeff->add_option("--var", cfg.var, "Gaussian variance");
  hoeff->add_option("--x", cfg.x, "Evaluation points");
  hoeff->add_option("--y", cfg.y, "Second coordinates for the kernel");
  hoeff->add_option("--t", cfg.t, "Fourier frequency t");
  hoeff->add_option("--s", cfg.s, "Fourier frequency s");

  auto* semi = subs["semigroup"] = app.add_subcommand("semigroup", "Spectral expansion and semigroup identities");
  common(semi);
  polys(semi);
  semi->add_option("--t", cfg.t, "Heat semigroup time");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kPass;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kPass;
  } catch (const CLI::ParseError& e) {
    err << "usage: " << e.what() << '\n';
    return kUsage;
  }

  if (!config_path.empty()) {
    std::ifstream is(config_path);
    if (!is) {
      err << "error: cannot read " << config_path << '\n';
      return kUsage;
    }
    try {
      return run(RunConfig::from_json(nlohmann::json::parse(is)), out, err);
    } catch (const nlohmann::json::exception& e) {
      err << "error: " << e.what() << '\n';
      return kUsage;
    } catch (const InputError& e) {
      err << "error: " << e.what() << '\n';
      return kUsage;
    }
  }

  for (const auto& [name, sub] : subs) {
    if (sub->parsed()) {
      cfg.subcommand = name;
      if (sub->count("--seed")) cfg.seed = seed;
      // Grids default to CSV, reports to JSON.
      const bool grid = name == "density" || name == "concentration" ||
                        (name == "hoeffding" && cfg.op != "verify");
      if (!sub->count("--format") && grid) cfg.format = "csv";
    }
  }
  if (cfg.subcommand.empty()) {
    err << app.help();
    return kUsage;
  }
  if (print_config) {
    out << cfg.to_json().dump(2) << '\n';
    return kPass;
  }
  return run(cfg, out, err);
}

}  // namespace sphcov
