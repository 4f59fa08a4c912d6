#pragma once

// Slow, independent reference computations used to cross-check the library.

#include "k3conics/lattice/discriminant.hpp"
#include "k3conics/lattice/matrix.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

namespace oracle {

using k3conics::Integer;
using k3conics::IntMatrix;
using k3conics::Rational;
using k3conics::RatMatrix;

/// Laplace expansion along the first row.
inline Rational cofactor_determinant(const RatMatrix& m) {
  const std::size_t n = m.rows();
  if (n == 0) return 1;
  if (n == 1) return m(0, 0);
  Rational det = 0;
  for (std::size_t c = 0; c < n; ++c) {
    if (m(0, c) == 0) continue;
    RatMatrix minor(n - 1, n - 1);
    for (std::size_t i = 1; i < n; ++i)
      for (std::size_t j = 0, k = 0; j < n; ++j)
        if (j != c) minor(i - 1, k++) = m(i, j);
    const Rational term = m(0, c) * cofactor_determinant(minor);
    det += c % 2 == 0 ? term : -term;
  }
  return det;
}

/// Invariant factors from determinantal divisors: d_k = D_k / D_{k-1} where
/// D_k is the gcd of all k×k minors. Exponential; only for small matrices.
inline std::vector<Integer> invariant_factors(const IntMatrix& m) {
  const std::size_t n = m.rows();
  std::vector<Integer> big_d{1};
  for (std::size_t k = 1; k <= n; ++k) {
    Integer g = 0;
    std::vector<std::size_t> rows(k), cols(k);
    std::function<void(std::size_t, std::size_t)> pick_rows, pick_cols;
    pick_cols = [&](std::size_t at, std::size_t from) {
      if (at == k) {
        RatMatrix minor(k, k);
        for (std::size_t i = 0; i < k; ++i)
          for (std::size_t j = 0; j < k; ++j) minor(i, j) = m(rows[i], cols[j]);
        const Integer d = cofactor_determinant(minor).get_num();
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), d.get_mpz_t());
        return;
      }
      for (std::size_t c = from; c < n; ++c) {
        cols[at] = c;
        pick_cols(at + 1, c + 1);
      }
    };
    pick_rows = [&](std::size_t at, std::size_t from) {
      if (at == k) {
        pick_cols(0, 0);
        return;
      }
      for (std::size_t r = from; r < n; ++r) {
        rows[at] = r;
        pick_rows(at + 1, r + 1);
      }
    };
    pick_rows(0, 0);
    big_d.push_back(g);
  }
  std::vector<Integer> out;
  for (std::size_t k = 1; k <= n; ++k) out.push_back(big_d[k - 1] == 0 ? Integer(0) : Integer(big_d[k] / big_d[k - 1]));
  return out;
}

/// All integer x in the box [-r, r]^n with xᵀGx == target.
inline std::vector<std::vector<std::int64_t>> box_vectors(const RatMatrix& g, const Rational& target, int r,
                                                          const std::vector<Rational>& shift = {}) {
  const std::size_t n = g.rows();
  std::vector<std::vector<std::int64_t>> out;
  std::vector<std::int64_t> x(n, -r);
  while (true) {
    std::vector<Rational> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = Rational(x[i]) + (shift.empty() ? Rational(0) : shift[i]);
    if (k3conics::bilinear(y, g, y) == target) out.push_back(x);
    std::size_t i = 0;
    while (i < n && x[i] == r) x[i++] = -r;
    if (i == n) break;
    ++x[i];
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Isometry test by trying every assignment of generator images, without
/// any pruning beyond the final check.
inline bool fqf_isomorphic_exhaustive(const k3conics::lattice::FiniteQuadraticForm& a,
                                      const k3conics::lattice::FiniteQuadraticForm& b) {
  if (a.group_order() != b.group_order()) return false;
  const std::size_t k = a.generator_count();
  k3conics::lattice::FqfIsomorphism images(k);
  std::function<bool(std::size_t)> go = [&](std::size_t i) {
    if (i == k) return k3conics::lattice::verify_isomorphism(a, b, images);
    for (std::int64_t idx = 0; idx < b.group_order(); ++idx) {
      images[i] = b.element(idx);
      if (go(i + 1)) return true;
    }
    return false;
  };
  return go(0);
}

}  // namespace oracle
