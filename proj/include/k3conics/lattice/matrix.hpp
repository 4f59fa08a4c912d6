#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace k3conics {

using Integer = mpz_class;
using Rational = mpq_class;

/// Thrown when an exact computation meets input it cannot handle
/// (dimension mismatch, singular matrix where one is forbidden, ...).
class LatticeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense row-major matrix over an exact ring.
template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  Matrix(std::initializer_list<std::initializer_list<T>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
      if (r.size() != cols_) throw LatticeError("ragged matrix literal");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
    return m;
  }

  static Matrix from_rows(const std::vector<std::vector<T>>& rows, std::size_t cols) {
    Matrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != cols) throw LatticeError("row length mismatch");
      std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<T> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const T> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  std::vector<T> row_vector(std::size_t i) const { return {row(i).begin(), row(i).end()}; }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    std::swap_ranges(row(a).begin(), row(a).end(), row(b).begin());
  }
  void swap_cols(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
  }

  void append_row(std::span<const T> r) {
    if (rows_ == 0 && cols_ == 0) cols_ = r.size();
    if (r.size() != cols_) throw LatticeError("append_row: width mismatch");
    data_.insert(data_.end(), r.begin(), r.end());
    ++rows_;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Matrix rows_range(std::size_t first, std::size_t last) const {
    Matrix m(last - first, cols_);
    std::copy(data_.begin() + first * cols_, data_.begin() + last * cols_, m.data_.begin());
    return m;
  }

  bool operator==(const Matrix& o) const {
    return rows_ == o.rows_ && cols_ == o.cols_ && data_ == o.data_;
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw LatticeError("matrix product: shape mismatch");
    Matrix c(a.rows_, b.cols_);
    T t;
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        if (aik == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) {
          t = aik * b(k, j);
          c(i, j) += t;
        }
      }
    return c;
  }

  friend Matrix operator*(const T& s, Matrix m) {
    for (auto& x : m.data_) x *= s;
    return m;
  }

  friend Matrix operator+(Matrix a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw LatticeError("matrix sum: shape mismatch");
    for (std::size_t k = 0; k < a.data_.size(); ++k) a.data_[k] += b.data_[k];
    return a;
  }

  Matrix operator-() const {
    Matrix m = *this;
    for (auto& x : m.data_) x = -x;
    return m;
  }

  const std::vector<T>& data() const { return data_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using IntMatrix = Matrix<Integer>;
using RatMatrix = Matrix<Rational>;
using IntVector = std::vector<Integer>;
using RatVector = std::vector<Rational>;

inline RatMatrix to_rational(const IntMatrix& m) {
  RatMatrix r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) r(i, j) = m(i, j);
  return r;
}

inline bool is_integral(const Rational& x) { return x.get_den() == 1; }

inline bool is_integral(const RatMatrix& m) {
  return std::all_of(m.data().begin(), m.data().end(),
                     [](const Rational& x) { return is_integral(x); });
}

inline bool is_integral(std::span<const Rational> v) {
  return std::all_of(v.begin(), v.end(), [](const Rational& x) { return is_integral(x); });
}

/// Converts an integral rational matrix; throws if any entry has a denominator.
inline IntMatrix to_integer(const RatMatrix& m) {
  IntMatrix r(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (!is_integral(m(i, j))) throw LatticeError("to_integer: non-integral entry");
      r(i, j) = m(i, j).get_num();
    }
  return r;
}

inline Integer common_denominator(const RatMatrix& m) {
  Integer l = 1;
  for (const auto& x : m.data()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.get_den_mpz_t());
  return l;
}

/// Returns (d, d*m) with d the least common denominator, so d*m is integral.
inline std::pair<Integer, IntMatrix> clear_denominators(const RatMatrix& m) {
  Integer d = common_denominator(m);
  return {d, to_integer(Rational(d) * m)};
}

/// Value as a 128-bit integer when it fits in 126 bits (headroom for a few
/// additions), else nullopt.
inline std::optional<__int128> to_int128(const Integer& x) {
  if (mpz_sizeinbase(x.get_mpz_t(), 2) > 126) return std::nullopt;
  Integer a = abs(x);
  Integer hi = a >> 64;
  Integer lo = a - (hi << 64);
  __int128 v = (static_cast<__int128>(hi.get_ui()) << 64) | static_cast<__int128>(lo.get_ui());
  return x < 0 ? -v : v;
}

inline Integer from_int128(__int128 v) {
  const bool neg = v < 0;
  unsigned __int128 u = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
  Integer hi = static_cast<unsigned long>(u >> 64);
  Integer lo = static_cast<unsigned long>(u & 0xFFFFFFFFFFFFFFFFULL);
  Integer r = (hi << 64) + lo;
  return neg ? Integer(-r) : r;
}

inline RatVector to_rational(std::span<const Integer> v) { return {v.begin(), v.end()}; }

inline Rational dot(std::span<const Rational> a, std::span<const Rational> b) {
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

/// Row vector times matrix.
template <class T>
std::vector<T> row_times(std::span<const T> v, const Matrix<T>& m) {
  if (v.size() != m.rows()) throw LatticeError("row_times: shape mismatch");
  std::vector<T> out(m.cols());
  for (std::size_t k = 0; k < m.rows(); ++k) {
    if (v[k] == 0) continue;
    for (std::size_t j = 0; j < m.cols(); ++j) out[j] += v[k] * m(k, j);
  }
  return out;
}

/// Bilinear form value v·G·wᵀ.
inline Rational bilinear(std::span<const Rational> v, const RatMatrix& g, std::span<const Rational> w) {
  return dot(row_times(v, g), w);
}

/// Fraction-free (Bareiss) determinant of an integer matrix.
inline Integer determinant(IntMatrix a) {
  const std::size_t n = a.rows();
  if (n != a.cols()) throw LatticeError("determinant: matrix not square");
  if (n == 0) return 1;
  int sign = 1;
  Integer prev = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (a(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && a(p, k) == 0) ++p;
      if (p == n) return 0;
      a.swap_rows(k, p);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        a(i, j) = a(i, j) * a(k, k) - a(i, k) * a(k, j);
        mpz_divexact(a(i, j).get_mpz_t(), a(i, j).get_mpz_t(), prev.get_mpz_t());
      }
    prev = a(k, k);
  }
  return sign * a(n - 1, n - 1);
}

inline Rational determinant(const RatMatrix& a) {
  auto [d, m] = clear_denominators(a);
  Rational det = determinant(m);
  Integer scale;
  mpz_pow_ui(scale.get_mpz_t(), d.get_mpz_t(), a.rows());
  det /= scale;
  det.canonicalize();
  return det;
}

/// Exact inverse by Gauss-Jordan; throws on singular input.
inline RatMatrix inverse(RatMatrix a) {
  const std::size_t n = a.rows();
  if (n != a.cols()) throw LatticeError("inverse: matrix not square");
  RatMatrix inv = RatMatrix::identity(n);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a(p, c) == 0) ++p;
    if (p == n) throw LatticeError("inverse: singular matrix");
    a.swap_rows(c, p);
    inv.swap_rows(c, p);
    Rational piv = a(c, c);
    for (std::size_t j = 0; j < n; ++j) {
      a(c, j) /= piv;
      inv(c, j) /= piv;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (i == c || a(i, c) == 0) continue;
      Rational f = a(i, c);
      for (std::size_t j = 0; j < n; ++j) {
        a(i, j) -= f * a(c, j);
        inv(i, j) -= f * inv(c, j);
      }
    }
  }
  return inv;
}

/// Rank over Q.
inline std::size_t rank(RatMatrix a) {
  std::size_t r = 0;
  for (std::size_t c = 0; c < a.cols() && r < a.rows(); ++c) {
    std::size_t p = r;
    while (p < a.rows() && a(p, c) == 0) ++p;
    if (p == a.rows()) continue;
    a.swap_rows(r, p);
    for (std::size_t i = r + 1; i < a.rows(); ++i) {
      if (a(i, c) == 0) continue;
      Rational f = a(i, c) / a(r, c);
      for (std::size_t j = c; j < a.cols(); ++j) a(i, j) -= f * a(r, j);
    }
    ++r;
  }
  return r;
}

/// Solves y·B = x for row vectors, where B has full row rank. Precomputes
/// a square nonsingular column subsystem once, so repeated solves are cheap.
class LeftSolver {
 public:
  explicit LeftSolver(const RatMatrix& b) : basis_(b) {
    // Greedily pick independent columns of B.
    RatMatrix t = b.transpose();  // cols(B) as rows
    std::vector<std::vector<Rational>> echelon;
    std::vector<std::size_t> pivots;
    for (std::size_t c = 0; c < t.rows() && columns_.size() < b.rows(); ++c) {
      std::vector<Rational> v = t.row_vector(c);
      for (std::size_t e = 0; e < echelon.size(); ++e) {
        const Rational& lead = v[pivots[e]];
        if (lead == 0) continue;
        Rational f = lead / echelon[e][pivots[e]];
        for (std::size_t j = 0; j < v.size(); ++j) v[j] -= f * echelon[e][j];
      }
      auto it = std::find_if(v.begin(), v.end(), [](const Rational& x) { return x != 0; });
      if (it == v.end()) continue;
      pivots.push_back(static_cast<std::size_t>(it - v.begin()));
      echelon.push_back(std::move(v));
      columns_.push_back(c);
    }
    if (columns_.size() != b.rows()) throw LatticeError("LeftSolver: basis rows are dependent");
    RatMatrix square(b.rows(), b.rows());
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t k = 0; k < columns_.size(); ++k) square(i, k) = b(i, columns_[k]);
    inverse_ = inverse(square);
  }

  /// Returns y with y·B = x, or nullopt if x is outside the row space.
  std::optional<RatVector> solve(std::span<const Rational> x) const {
    if (x.size() != basis_.cols()) throw LatticeError("LeftSolver: width mismatch");
    RatVector sub(columns_.size());
    for (std::size_t k = 0; k < columns_.size(); ++k) sub[k] = x[columns_[k]];
    RatVector y = row_times<Rational>(sub, inverse_);
    RatVector back = row_times<Rational>(y, basis_);
    if (!std::equal(back.begin(), back.end(), x.begin())) return std::nullopt;
    return y;
  }

 private:
  RatMatrix basis_;
  std::vector<std::size_t> columns_;
  RatMatrix inverse_;
};

}  // namespace k3conics
