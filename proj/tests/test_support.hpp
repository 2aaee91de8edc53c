#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "sphcov/polynomial.hpp"

namespace sphcov::testing {

// Random polynomial of total degree <= deg with coefficients in [-1, 1].
// Each monomial is kept with probability keep.
inline Polynomial random_polynomial(int n, int deg, std::uint64_t seed, double keep = 0.5) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Polynomial p(n);
  Exponents e(static_cast<std::size_t>(n), 0);
  // Enumerate exponent vectors of total degree <= deg in lexicographic order.
  auto rec = [&](auto&& self, int i, int left) -> void {
    if (i == n) {
      if (u(rng) < keep) p += Polynomial::monomial(n, e, coef(rng));
      return;
    }
    for (int k = 0; k <= left; ++k) {
      e[static_cast<std::size_t>(i)] = k;
      self(self, i + 1, left - k);
    }
    e[static_cast<std::size_t>(i)] = 0;
  };
  rec(rec, 0, deg);
  if (p.is_zero()) p = Polynomial::variable(n, 0);
  return p;
}

inline Polynomial poly(const std::string& text, int n) { return Polynomial::parse(text, n); }

}  // namespace sphcov::testing
