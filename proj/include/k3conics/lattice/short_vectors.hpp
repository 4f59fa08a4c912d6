#pragma once

#include "k3conics/lattice/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace k3conics::lattice {

enum class NormMode {
  exact,    ///< (x+s)ᵀG(x+s) == target
  at_most,  ///< (x+s)ᵀG(x+s) <= target
};

using ShortVector = std::vector<std::int64_t>;

namespace detail {

/// Exact value of (x + shift)ᵀ G (x + shift), given G = gram_num / gram_den
/// (integral numerator) and shift = shift_num / shift_den.
class ExactNorm {
 public:
  ExactNorm(const RatMatrix& g, const RatVector& shift) : n_(g.rows()) {
    auto [den, num] = clear_denominators(g);
    gram_den_ = den;
    gram_.resize(n_ * n_);
    fits_ = true;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) {
        const Integer& e = num(i, j);
        if (!e.fits_slong_p()) fits_ = false;
        gram_[i * n_ + j] = fits_ ? e.get_si() : 0;
      }
    gram_num_ = num;
    shift_den_ = 1;
    for (const auto& s : shift) mpz_lcm(shift_den_.get_mpz_t(), shift_den_.get_mpz_t(), s.get_den_mpz_t());
    shift_num_.resize(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      Rational scaled = shift.empty() ? Rational(0) : shift[i] * Rational(shift_den_);
      Integer v = scaled.get_num();
      if (!v.fits_slong_p()) fits_ = false;
      shift_num_[i] = fits_ ? v.get_si() : 0;
    }
    if (!shift_den_.fits_slong_p()) fits_ = false;
    shift_den_i_ = fits_ ? shift_den_.get_si() : 1;
    denominator_ = gram_den_ * shift_den_ * shift_den_;
  }

  /// Numerator over denominator(); the true value is numerator/denominator.
  Rational operator()(const ShortVector& x) const {
    if (fits_) {
      // y = den*x + shift_num is small; products accumulate in 128 bits.
      __int128 acc = 0;
      bool overflow = false;
      std::vector<__int128> y(n_);
      for (std::size_t i = 0; i < n_; ++i) y[i] = static_cast<__int128>(shift_den_i_) * x[i] + shift_num_[i];
      for (std::size_t i = 0; i < n_ && !overflow; ++i) {
        if (y[i] == 0) continue;
        __int128 row = 0;
        for (std::size_t j = 0; j < n_; ++j) row += static_cast<__int128>(gram_[i * n_ + j]) * y[j];
        __int128 term;
        if (__builtin_mul_overflow(row, y[i], &term) || __builtin_add_overflow(acc, term, &acc)) overflow = true;
      }
      if (!overflow) {
        Rational v(from_int128(acc), denominator_);
        v.canonicalize();
        return v;
      }
    }
    RatVector y(n_);
    for (std::size_t i = 0; i < n_; ++i) y[i] = Rational(Integer(static_cast<long>(x[i])) * shift_den_ + shift_num_big(i));
    Rational v = 0;
    for (std::size_t i = 0; i < n_; ++i)
      for (std::size_t j = 0; j < n_; ++j) v += y[i] * Rational(gram_num_(i, j)) * y[j];
    v /= Rational(denominator_);
    v.canonicalize();
    return v;
  }

 private:
  Integer shift_num_big(std::size_t i) const { return Integer(static_cast<long>(shift_num_[i])); }

  std::size_t n_;
  bool fits_ = true;
  Integer gram_den_;
  IntMatrix gram_num_;
  std::vector<long> gram_;
  Integer shift_den_;
  long shift_den_i_ = 1;
  std::vector<long> shift_num_;
  Integer denominator_;
};

}  // namespace detail

/// Fincke–Pohst enumeration of all integer x with Q(x + shift) == target
/// (or <= target), Q(y) = yᵀGy for positive definite G. The tree is bounded
/// in floating point with a safety margin; every hit is confirmed exactly.
/// The callback receives each confirmed vector; results are produced in a
/// deterministic order.
inline void for_each_short_vector(const RatMatrix& g, const Rational& target, NormMode mode,
                                  const RatVector& shift, const std::function<void(const ShortVector&)>& sink) {
  const std::size_t n = g.rows();
  if (n != g.cols()) throw LatticeError("short_vectors: Gram matrix not square");
  if (!shift.empty() && shift.size() != n) throw LatticeError("short_vectors: shift has wrong length");
  if (n == 0) return;

  // Exact Q(y) = Σ d_i (y_i + Σ_{j>i} m_ij y_j)², then rounded to double.
  RatMatrix m(n, n);
  RatVector d(n);
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = g(i, i);
    for (std::size_t k = 0; k < i; ++k) d[i] -= d[k] * m(k, i) * m(k, i);
    if (d[i] <= 0) throw LatticeError("short_vectors: Gram matrix is not positive definite");
    for (std::size_t j = i + 1; j < n; ++j) {
      Rational s = g(i, j);
      for (std::size_t k = 0; k < i; ++k) s -= d[k] * m(k, i) * m(k, j);
      m(i, j) = s / d[i];
    }
  }
  std::vector<double> dd(n), mm(n * n), sh(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    dd[i] = d[i].get_d();
    for (std::size_t j = i + 1; j < n; ++j) mm[i * n + j] = m(i, j).get_d();
    if (!shift.empty()) sh[i] = shift[i].get_d();
  }
  const double bound = target.get_d() * (1.0 + 1e-9) + 1e-9;

  detail::ExactNorm exact(g, shift);
  ShortVector x(n, 0);
  std::vector<double> partial(n + 1, 0.0);  // partial[i] = Σ_{k>=i} contributions

  std::function<void(std::size_t)> descend = [&](std::size_t level) {
    // Center of coordinate `level` given deeper coordinates.
    double c = sh[level];
    for (std::size_t j = level + 1; j < n; ++j) c += mm[level * n + j] * (static_cast<double>(x[j]) + sh[j]);
    const double budget = bound - partial[level + 1];
    if (budget < 0) return;
    const double radius = std::sqrt(budget / dd[level]);
    const auto lo = static_cast<std::int64_t>(std::ceil(-c - radius - 1e-9));
    const auto hi = static_cast<std::int64_t>(std::floor(-c + radius + 1e-9));
    for (std::int64_t v = lo; v <= hi; ++v) {
      x[level] = v;
      const double t = static_cast<double>(v) + c;
      partial[level] = partial[level + 1] + dd[level] * t * t;
      if (partial[level] > bound) continue;
      if (level == 0) {
        Rational q = exact(x);
        if (mode == NormMode::exact ? q == target : q <= target) sink(x);
      } else {
        descend(level - 1);
      }
    }
    x[level] = 0;
  };
  descend(n - 1);
}

inline std::vector<ShortVector> short_vectors(const RatMatrix& g, const Rational& target,
                                              NormMode mode = NormMode::exact, const RatVector& shift = {}) {
  std::vector<ShortVector> out;
  for_each_short_vector(g, target, mode, shift, [&out](const ShortVector& v) { out.push_back(v); });
  std::sort(out.begin(), out.end());
  return out;
}

/// Number of solutions without materializing them.
inline std::size_t count_short_vectors(const RatMatrix& g, const Rational& target, NormMode mode = NormMode::exact,
                                       const RatVector& shift = {}) {
  std::size_t count = 0;
  for_each_short_vector(g, target, mode, shift, [&count](const ShortVector&) { ++count; });
  return count;
}

}  // namespace k3conics::lattice
