#pragma once

#include "k3conics/lattice/matrix.hpp"

#include <iterator>
#include <type_traits>
#include <optional>
#include <vector>

namespace k3conics::lattice {

namespace detail {

// g = s*a + t*b with g = gcd(a, b) >= 0.
inline void xgcd(const Integer& a, const Integer& b, Integer& g, Integer& s, Integer& t) {
  mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
}

// Applies the unimodular 2x2 map [[s, t], [-b/g, a/g]] to rows (r, i) of m.
inline void combine_rows(IntMatrix& m, std::size_t r, std::size_t i, const Integer& s, const Integer& t,
                         const Integer& x, const Integer& y) {
  Integer u, v;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    u = s * m(r, j) + t * m(i, j);
    v = x * m(r, j) + y * m(i, j);
    m(r, j) = u;
    m(i, j) = v;
  }
}

inline void add_row_multiple(std::span<Integer> dst, std::span<const Integer> src, const Integer& f) {
  for (std::size_t j = 0; j < dst.size(); ++j) dst[j] -= f * src[j];
}

inline Integer floor_div(const Integer& a, const Integer& b) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

}  // namespace detail

struct HermiteForm {
  IntMatrix h;                       ///< row Hermite normal form, zero rows last
  IntMatrix u;                       ///< unimodular, h = u * input
  std::size_t rank = 0;
  std::vector<std::size_t> pivots;   ///< pivot column of each nonzero row
};

/// Row-style HNF: pivots positive, entries above each pivot reduced into
/// [0, pivot), entries below zero. Returns the transform as well.
inline HermiteForm hnf(const IntMatrix& m) {
  HermiteForm out{m, IntMatrix::identity(m.rows()), 0, {}};
  IntMatrix& h = out.h;
  IntMatrix& u = out.u;
  Integer g, s, t, x, y;
  std::size_t r = 0;
  for (std::size_t c = 0; c < h.cols() && r < h.rows(); ++c) {
    for (std::size_t i = r + 1; i < h.rows(); ++i) {
      if (h(i, c) == 0) continue;
      if (h(r, c) == 0) {
        h.swap_rows(r, i);
        u.swap_rows(r, i);
        continue;
      }
      detail::xgcd(h(r, c), h(i, c), g, s, t);
      x = -h(i, c) / g;
      y = h(r, c) / g;
      detail::combine_rows(h, r, i, s, t, x, y);
      detail::combine_rows(u, r, i, s, t, x, y);
    }
    if (h(r, c) == 0) continue;
    if (h(r, c) < 0) {
      for (auto& e : h.row(r)) e = -e;
      for (auto& e : u.row(r)) e = -e;
    }
    for (std::size_t k = 0; k < r; ++k) {
      Integer f = detail::floor_div(h(k, c), h(r, c));
      if (f == 0) continue;
      detail::add_row_multiple(h.row(k), h.row(r), f);
      detail::add_row_multiple(u.row(k), u.row(r), f);
    }
    out.pivots.push_back(c);
    ++r;
  }
  out.rank = r;
  return out;
}

/// Basis (in HNF) of the Z-span of the rows of `m`, without a transform.
/// Rows are folded in one at a time, so very tall inputs are fine.
class RowSpanBuilder {
 public:
  explicit RowSpanBuilder(std::size_t width) : width_(width), pivot_rows_(width) {}

  template <class Range>
  void add(const Range& v) {
    if (static_cast<std::size_t>(std::distance(v.begin(), v.end())) != width_)
      throw LatticeError("RowSpanBuilder: width mismatch");
    if (fast_ready_ && contained_fast(v)) return;
    std::vector<Integer> w(v.begin(), v.end());
    if (modulus_ != 0)
      for (auto& e : w) mpz_fdiv_r(e.get_mpz_t(), e.get_mpz_t(), modulus_.get_mpz_t());
    Integer g, s, t, x, y, a, b;
    for (std::size_t c = 0; c < width_; ++c) {
      if (w[c] == 0) continue;
      auto& p = pivot_rows_[c];
      if (!p) {
        if (w[c] < 0)
          for (auto& e : w) e = -e;
        p = std::move(w);
        ++rank_;
        refresh_modulus();
        refresh_fast();
        return;
      }
      std::vector<Integer>& pr = *p;
      if (mpz_divisible_p(w[c].get_mpz_t(), pr[c].get_mpz_t())) {
        Integer f = w[c] / pr[c];
        detail::add_row_multiple(w, pr, f);
      } else {
        detail::xgcd(pr[c], w[c], g, s, t);
        x = -w[c] / g;
        y = pr[c] / g;
        for (std::size_t j = c; j < width_; ++j) {
          a = s * pr[j] + t * w[j];
          b = x * pr[j] + y * w[j];
          pr[j] = a;
          w[j] = b;
        }
        refresh_modulus();
      }
      if (modulus_ != 0) {
        reduce(pr, c + 1);
        reduce(w, c + 1);
      }
    }
    refresh_fast();
  }

  std::size_t rank() const { return rank_; }

  /// Final HNF basis, rows ordered by pivot column.
  IntMatrix basis() const {
    IntMatrix m(0, width_);
    for (const auto& p : pivot_rows_)
      if (p) m.append_row(*p);
    if (modulus_ != 0) {
      // Full rank: the lattice contains modulus*Z^n, so rows reduced mod the
      // modulus still generate it once those vectors are added back.
      for (std::size_t i = 0; i < width_; ++i) {
        std::vector<Integer> e(width_);
        e[i] = modulus_;
        m.append_row(e);
      }
    }
    HermiteForm f = hnf(m);
    return f.h.rows_range(0, f.rank);
  }

 private:
  void refresh_modulus() {
    if (rank_ < width_) return;
    Integer d = 1;
    for (std::size_t c = 0; c < width_; ++c) d *= abs((*pivot_rows_[c])[c]);
    modulus_ = d;
  }
  // Membership test against the current (full-rank) pivot rows in 128-bit
  // arithmetic: everything stays reduced modulo the modulus (< 2^40).
  template <class Range>
  bool contained_fast(const Range& v) const {
    std::vector<__int128> w;
    w.reserve(width_);
    for (const auto& e : v) {
      if constexpr (std::is_integral_v<std::decay_t<decltype(e)>>) {
        w.push_back(e);
      } else {
        auto x = to_int128(Integer(e));
        if (!x) return false;
        w.push_back(*x);
      }
    }
    const __int128 m = fast_modulus_;
    auto red = [m](__int128 x) { x %= m; return x < 0 ? x + m : x; };
    for (auto& e : w) e = red(e);
    for (std::size_t c = 0; c < width_; ++c) {
      if (w[c] == 0) continue;
      const auto& pr = fast_rows_[c];
      if (w[c] % pr[c] != 0) return false;
      const __int128 f = w[c] / pr[c];
      for (std::size_t j = c; j < width_; ++j) w[j] = red(w[j] - f * pr[j]);
    }
    return true;
  }

  void refresh_fast() {
    fast_ready_ = false;
    if (modulus_ == 0 || mpz_sizeinbase(modulus_.get_mpz_t(), 2) > 40) return;
    fast_modulus_ = *to_int128(modulus_);
    fast_rows_.assign(width_, std::vector<__int128>(width_));
    for (std::size_t c = 0; c < width_; ++c)
      for (std::size_t j = 0; j < width_; ++j) {
        Integer e = (*pivot_rows_[c])[j];
        if (j > c) mpz_fdiv_r(e.get_mpz_t(), e.get_mpz_t(), modulus_.get_mpz_t());
        fast_rows_[c][j] = *to_int128(e);
      }
    fast_ready_ = true;
  }

  void reduce(std::vector<Integer>& v, std::size_t from) const {
    for (std::size_t j = from; j < width_; ++j) mpz_fdiv_r(v[j].get_mpz_t(), v[j].get_mpz_t(), modulus_.get_mpz_t());
  }

  std::size_t width_;
  std::vector<std::optional<std::vector<Integer>>> pivot_rows_;
  std::size_t rank_ = 0;
  Integer modulus_ = 0;
  bool fast_ready_ = false;
  __int128 fast_modulus_ = 0;
  std::vector<std::vector<__int128>> fast_rows_;
};

/// Left integer kernel {y : y*m = 0}. The rows returned form a basis of a
/// saturated sublattice of Z^rows(m).
inline IntMatrix left_kernel(const IntMatrix& m) {
  HermiteForm f = hnf(m);
  return f.u.rows_range(f.rank, m.rows());
}

struct SmithForm {
  std::vector<Integer> divisors;  ///< d1 | d2 | ..., length min(rows, cols); zeros last
  IntMatrix left;                 ///< unimodular L
  IntMatrix right;                ///< unimodular R, L*m*R = diag(divisors)
};

/// Smith normal form with both transforms.
inline SmithForm snf(const IntMatrix& m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  IntMatrix a = m;
  IntMatrix left = IntMatrix::identity(rows);
  IntMatrix right = IntMatrix::identity(cols);
  const std::size_t n = std::min(rows, cols);
  Integer q;
  for (std::size_t t = 0; t < n; ++t) {
    while (true) {
      // Smallest nonzero entry of the trailing block becomes the pivot.
      std::optional<std::pair<std::size_t, std::size_t>> best;
      for (std::size_t i = t; i < rows; ++i)
        for (std::size_t j = t; j < cols; ++j)
          if (a(i, j) != 0 && (!best || abs(a(i, j)) < abs(a(best->first, best->second)))) best = {{i, j}};
      if (!best) goto done;
      a.swap_rows(t, best->first);
      left.swap_rows(t, best->first);
      a.swap_cols(t, best->second);
      right.swap_cols(t, best->second);

      bool clean = true;
      for (std::size_t i = t + 1; i < rows; ++i) {
        if (a(i, t) == 0) continue;
        mpz_fdiv_q(q.get_mpz_t(), a(i, t).get_mpz_t(), a(t, t).get_mpz_t());
        detail::add_row_multiple(a.row(i), a.row(t), q);
        detail::add_row_multiple(left.row(i), left.row(t), q);
        if (a(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < cols; ++j) {
        if (a(t, j) == 0) continue;
        mpz_fdiv_q(q.get_mpz_t(), a(t, j).get_mpz_t(), a(t, t).get_mpz_t());
        for (std::size_t i = 0; i < rows; ++i) a(i, j) -= q * a(i, t);
        for (std::size_t i = 0; i < cols; ++i) right(i, j) -= q * right(i, t);
        if (a(t, j) != 0) clean = false;
      }
      if (!clean) continue;
      // Divisibility: fold any offending row into the pivot row and retry.
      bool divides = true;
      for (std::size_t i = t + 1; i < rows && divides; ++i)
        for (std::size_t j = t + 1; j < cols; ++j)
          if (!mpz_divisible_p(a(i, j).get_mpz_t(), a(t, t).get_mpz_t())) {
            for (std::size_t k = 0; k < cols; ++k) a(t, k) += a(i, k);
            for (std::size_t k = 0; k < rows; ++k) left(t, k) += left(i, k);
            divides = false;
            break;
          }
      if (divides) break;
    }
    if (a(t, t) < 0) {
      for (auto& e : a.row(t)) e = -e;
      for (auto& e : left.row(t)) e = -e;
    }
  }
done:
  SmithForm out{std::vector<Integer>(n), std::move(left), std::move(right)};
  for (std::size_t i = 0; i < n; ++i) out.divisors[i] = a(i, i);
  return out;
}

}  // namespace k3conics::lattice
