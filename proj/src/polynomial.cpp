#include "sphcov/polynomial.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iterator>
#include <numeric>
#include <string>

#include "sphcov/errors.hpp"

namespace sphcov {

namespace {

int total_degree(const Exponents& e) { return std::accumulate(e.begin(), e.end(), 0); }

class Parser {
 public:
  Parser(std::string_view text, int dimension) : text_(text), dimension_(dimension) {}

  Polynomial run() {
    Polynomial result(dimension_);
    skip_ws();
    if (at_end()) fail("empty polynomial text");
    bool first = true;
    while (!at_end()) {
      double sign = 1.0;
      if (peek() == '+' || peek() == '-') {
        sign = peek() == '-' ? -1.0 : 1.0;
        ++pos_;
        skip_ws();
      } else if (!first) {
        fail("expected '+' or '-' between terms");
      }
      first = false;
      auto [exps, coef] = term();
      result += Polynomial::monomial(dimension_, std::move(exps), sign * coef);
      skip_ws();
    }
    return result;
  }

 private:
  std::pair<Exponents, double> term() {
    Exponents exps(static_cast<std::size_t>(dimension_), 0);
    double coef = 1.0;
    factor(exps, coef);
    skip_ws();
    while (!at_end() && peek() == '*') {
      ++pos_;
      skip_ws();
      factor(exps, coef);
      skip_ws();
    }
    return {std::move(exps), coef};
  }

  void factor(Exponents& exps, double& coef) {
    if (at_end()) fail("unexpected end of text");
    if (peek() == 'x') {
      ++pos_;
      const int index = integer();
      if (index < 1 || index > dimension_) {
        fail("variable index x" + std::to_string(index) + " outside 1.." +
             std::to_string(dimension_));
      }
      int power = 1;
      skip_ws();
      if (!at_end() && peek() == '^') {
        ++pos_;
        skip_ws();
        power = integer();
      }
      exps[static_cast<std::size_t>(index - 1)] += power;
      return;
    }
    double value = 0.0;
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr == begin) fail("expected a number or variable");
    if (!std::isfinite(value)) fail("non-finite coefficient");
    pos_ += static_cast<std::size_t>(ptr - begin);
    coef *= value;
  }

  int integer() {
    int value = 0;
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr == begin) fail("expected an integer");
    if (value < 0) fail("negative exponent");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return value;
  }

  void skip_ws() {
    while (!at_end() && (peek() == ' ' || peek() == '\t' || peek() == '\n')) ++pos_;
  }
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }
  [[noreturn]] void fail(const std::string& what) const {
    throw InputError("polynomial parse error at offset " + std::to_string(pos_) + ": " +
                     what + " in \"" + std::string(text_) + "\"");
  }

  std::string_view text_;
  int dimension_;
  std::size_t pos_ = 0;
};

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

bool GradedOrder::operator()(const Exponents& a, const Exponents& b) const {
  const int da = total_degree(a);
  const int db = total_degree(b);
  if (da != db) return da < db;
  return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
}

Polynomial::Polynomial(int dimension) : dimension_(dimension) {
  if (dimension < 1) throw InputError("polynomial dimension must be >= 1");
}

Polynomial Polynomial::constant(int dimension, double value) {
  Polynomial p(dimension);
  p.add_term(Exponents(static_cast<std::size_t>(dimension), 0), value);
  return p;
}

Polynomial Polynomial::variable(int dimension, int index) {
  if (index < 0 || index >= dimension) throw InputError("variable index out of range");
  Exponents e(static_cast<std::size_t>(dimension), 0);
  e[static_cast<std::size_t>(index)] = 1;
  return monomial(dimension, std::move(e), 1.0);
}

Polynomial Polynomial::monomial(int dimension, Exponents exponents, double coefficient) {
  if (static_cast<int>(exponents.size()) != dimension) {
    throw InputError("multi-index length does not match dimension");
  }
  Polynomial p(dimension);
  p.add_term(exponents, coefficient);
  return p;
}

Polynomial Polynomial::norm_squared(int dimension) {
  Polynomial p(dimension);
  for (int i = 0; i < dimension; ++i) {
    Exponents e(static_cast<std::size_t>(dimension), 0);
    e[static_cast<std::size_t>(i)] = 2;
    p.add_term(e, 1.0);
  }
  return p;
}

Polynomial Polynomial::linear(std::span<const double> v) {
  const int n = static_cast<int>(v.size());
  Polynomial p(n);
  for (int i = 0; i < n; ++i) p += variable(n, i) * v[static_cast<std::size_t>(i)];
  return p;
}

Polynomial Polynomial::parse(std::string_view text, int dimension) {
  return Parser(text, dimension).run();
}

std::string Polynomial::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [e, c] : terms_) {
    const bool negative = c < 0.0;
    const double mag = std::abs(c);
    if (first) {
      if (negative) out += '-';
    } else {
      out += negative ? " - " : " + ";
    }
    first = false;
    std::string mono;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (!mono.empty()) mono += '*';
      mono += 'x' + std::to_string(i + 1);
      if (e[i] > 1) mono += '^' + std::to_string(e[i]);
    }
    if (mono.empty()) {
      out += format_number(mag);
    } else if (mag == 1.0) {
      out += mono;
    } else {
      out += format_number(mag) + '*' + mono;
    }
  }
  return out;
}

int Polynomial::degree() const {
  int d = -1;
  for (const auto& [e, c] : terms_) d = std::max(d, total_degree(e));
  return d;
}

double Polynomial::coefficient(const Exponents& exponents) const {
  auto it = terms_.find(exponents);
  return it == terms_.end() ? 0.0 : it->second;
}

double Polynomial::max_abs_coefficient() const {
  double m = 0.0;
  for (const auto& [e, c] : terms_) m = std::max(m, std::abs(c));
  return m;
}

double Polynomial::operator()(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dimension_) {
    throw InputError("evaluation point has wrong dimension");
  }
  double sum = 0.0;
  for (const auto& [e, c] : terms_) {
    double t = c;
    for (std::size_t i = 0; i < e.size(); ++i) {
      for (int k = 0; k < e[i]; ++k) t *= x[i];
    }
    sum += t;
  }
  return sum;
}

Polynomial Polynomial::derivative(int index) const {
  if (index < 0 || index >= dimension_) throw InputError("derivative index out of range");
  const auto i = static_cast<std::size_t>(index);
  Polynomial d(dimension_);
  for (const auto& [e, c] : terms_) {
    if (e[i] == 0) continue;
    Exponents f = e;
    f[i] -= 1;
    d.add_term(f, c * e[i]);
  }
  return d;
}

Polynomial Polynomial::laplacian() const {
  Polynomial l(dimension_);
  for (const auto& [e, c] : terms_) {
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] < 2) continue;
      Exponents f = e;
      f[i] -= 2;
      l.add_term(f, c * e[i] * (e[i] - 1));
    }
  }
  return l;
}

Polynomial Polynomial::homogeneous_part(int degree) const {
  Polynomial h(dimension_);
  for (const auto& [e, c] : terms_) {
    if (total_degree(e) == degree) h.terms_.emplace(e, c);
  }
  return h;
}

Polynomial Polynomial::pruned(double tol) const {
  Polynomial p(dimension_);
  for (const auto& [e, c] : terms_) {
    if (std::abs(c) > tol) p.terms_.emplace(e, c);
  }
  return p;
}

Polynomial& Polynomial::operator+=(const Polynomial& rhs) {
  check_same_dimension(rhs);
  for (const auto& [e, c] : rhs.terms_) add_term(e, c);
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& rhs) {
  check_same_dimension(rhs);
  for (const auto& [e, c] : rhs.terms_) add_term(e, -c);
  return *this;
}

Polynomial& Polynomial::operator*=(const Polynomial& rhs) {
  check_same_dimension(rhs);
  Polynomial product(dimension_);
  Exponents e(static_cast<std::size_t>(dimension_));
  for (const auto& [ea, ca] : terms_) {
    for (const auto& [eb, cb] : rhs.terms_) {
      for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
      product.add_term(e, ca * cb);
    }
  }
  *this = std::move(product);
  return *this;
}

Polynomial& Polynomial::operator*=(double s) {
  if (s == 0.0) {
    terms_.clear();
    return *this;
  }
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= s;
    it = it->second == 0.0 ? terms_.erase(it) : std::next(it);
  }
  return *this;
}

void Polynomial::add_term(const Exponents& e, double c) {
  if (c == 0.0) return;
  auto [it, inserted] = terms_.try_emplace(e, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0.0) terms_.erase(it);
  }
}

void Polynomial::check_same_dimension(const Polynomial& other) const {
  if (other.dimension_ != dimension_) throw InputError("polynomial dimension mismatch");
}

double sphere_mean(const Polynomial& p) {
  // E theta^a = prod (a_i - 1)!! / (n (n+2) ... (n + |a| - 2)) for all a_i even.
  const int n = p.dimension();
  double sum = 0.0;
  for (const auto& [e, c] : p.terms()) {
    bool even = true;
    double num = 1.0;
    int half = 0;
    for (int a : e) {
      if (a % 2 != 0) {
        even = false;
        break;
      }
      for (int k = a - 1; k > 0; k -= 2) num *= k;
      half += a / 2;
    }
    if (!even) continue;
    double den = 1.0;
    for (int j = 0; j < half; ++j) den *= n + 2 * j;
    sum += c * num / den;
  }
  return sum;
}

double gaussian_mean(const Polynomial& p) {
  double sum = 0.0;
  for (const auto& [e, c] : p.terms()) {
    double m = 1.0;
    for (int a : e) {
      if (a % 2 != 0) {
        m = 0.0;
        break;
      }
      for (int k = a - 1; k > 0; k -= 2) m *= k;
    }
    sum += c * m;
  }
  return sum;
}

CompiledPolynomial::CompiledPolynomial(const Polynomial& p) : dimension_(p.dimension()) {
  offsets_.push_back(0);
  for (const auto& [e, c] : p.terms()) {
    coefficients_.push_back(c);
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      factor_vars_.push_back(static_cast<std::uint16_t>(i));
      factor_pows_.push_back(static_cast<std::uint16_t>(e[i]));
    }
    offsets_.push_back(static_cast<std::uint32_t>(factor_vars_.size()));
  }
}

double CompiledPolynomial::operator()(const double* x) const {
  double sum = 0.0;
  for (std::size_t t = 0; t < coefficients_.size(); ++t) {
    double v = coefficients_[t];
    for (std::uint32_t k = offsets_[t]; k < offsets_[t + 1]; ++k) {
      const double xi = x[factor_vars_[k]];
      for (std::uint16_t j = 0; j < factor_pows_[k]; ++j) v *= xi;
    }
    sum += v;
  }
  return sum;
}

JetEvaluator::JetEvaluator(const Polynomial& p)
    : dimension_(p.dimension()), source_(p), f_(p) {
  std::vector<Polynomial> first;
  for (int i = 0; i < dimension_; ++i) {
    first.push_back(p.derivative(i));
    df_.emplace_back(first.back());
  }
  for (int i = 0; i < dimension_; ++i) {
    for (int j = i; j < dimension_; ++j) d2f_.emplace_back(first[static_cast<std::size_t>(i)].derivative(j));
  }
}

void JetEvaluator::gradient(const double* x, double* out) const {
  for (int i = 0; i < dimension_; ++i) out[i] = df_[static_cast<std::size_t>(i)](x);
}

Jet JetEvaluator::evaluate(const double* x, bool with_hessian) const {
  const auto n = static_cast<std::size_t>(dimension_);
  Jet jet;
  jet.value = f_(x);
  jet.gradient.resize(n);
  gradient(x, jet.gradient.data());
  if (with_hessian) {
    jet.hessian.assign(n * n, 0.0);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j, ++k) {
        const double v = d2f_[k](x);
        jet.hessian[i * n + j] = v;
        jet.hessian[j * n + i] = v;
      }
    }
  }
  return jet;
}

}  // namespace sphcov
