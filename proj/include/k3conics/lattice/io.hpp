#pragma once

#include "k3conics/lattice/matrix.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace k3conics::lattice {

/// Plain-text matrix format: a "rows cols" line, then one line per row of
/// space-separated entries. Rationals are written as "p/q" (or "p" when q = 1).
template <class T>
void write_matrix(std::ostream& os, const Matrix<T>& m) {
  os << m.rows() << ' ' << m.cols() << '\n';
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) os << (j ? " " : "") << m(i, j).get_str();
    os << '\n';
  }
}

template <class T>
Matrix<T> read_matrix(std::istream& is) {
  std::size_t rows = 0, cols = 0;
  if (!(is >> rows >> cols)) throw LatticeError("read_matrix: missing dimensions");
  Matrix<T> m(rows, cols);
  std::string token;
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      if (!(is >> token)) throw LatticeError("read_matrix: truncated input");
      try {
        m(i, j) = T(token, 10);
      } catch (const std::invalid_argument&) {
        throw LatticeError("read_matrix: bad entry '" + token + "'");
      }
      if constexpr (std::is_same_v<T, Rational>) {
        if (m(i, j).get_den() == 0) throw LatticeError("read_matrix: zero denominator");
        m(i, j).canonicalize();
      }
    }
  return m;
}

inline IntMatrix read_int_matrix(std::istream& is) { return read_matrix<Integer>(is); }
inline RatMatrix read_rat_matrix(std::istream& is) { return read_matrix<Rational>(is); }

}  // namespace k3conics::lattice
