#pragma once

#include "k3conics/lattice/matrix.hpp"
#include "k3conics/lattice/normal_forms.hpp"

#include <optional>
#include <utility>

namespace k3conics::lattice {

/// A lattice given by integer basis rows in an ambient Q-space carrying a
/// rational symmetric form. Leech-coordinate lattices use form I/8; abstract
/// lattices use basis I and form = their Gram matrix.
class Lattice {
 public:
  Lattice() = default;
  Lattice(IntMatrix basis, RatMatrix ambient_form) : basis_(std::move(basis)), form_(std::move(ambient_form)) {
    if (form_.rows() != form_.cols()) throw LatticeError("ambient form not square");
    if (basis_.rows() > 0 && basis_.cols() != form_.rows()) throw LatticeError("basis width != ambient dimension");
    if (basis_.rows() == 0) basis_ = IntMatrix(0, form_.rows());
    if (k3conics::rank(to_rational(basis_)) != basis_.rows()) throw LatticeError("basis rows are dependent");
  }

  /// The lattice Z^n with the given Gram matrix.
  static Lattice abstract(RatMatrix gram) {
    const std::size_t n = gram.rows();
    return Lattice(IntMatrix::identity(n), std::move(gram));
  }

  /// Sublattice of Z^n with form (x·y)/scale.
  static Lattice scaled_euclidean(IntMatrix basis, long scale) {
    const std::size_t n = basis.cols();
    RatMatrix form(n, n);
    for (std::size_t i = 0; i < n; ++i) {
      form(i, i) = Rational(1, scale);
      form(i, i).canonicalize();
    }
    return Lattice(std::move(basis), std::move(form));
  }

  std::size_t rank() const { return basis_.rows(); }
  std::size_t ambient_dimension() const { return form_.rows(); }
  const IntMatrix& basis() const { return basis_; }
  const RatMatrix& ambient_form() const { return form_; }

  RatMatrix gram() const {
    RatMatrix b = to_rational(basis_);
    return b * form_ * b.transpose();
  }

  /// Ambient pairing of two ambient vectors.
  Rational inner(std::span<const Rational> x, std::span<const Rational> y) const {
    return bilinear(x, form_, y);
  }

  /// Basis coordinates of an ambient vector (rational), or nullopt when it
  /// is outside the rational span.
  std::optional<RatVector> rational_coordinates(std::span<const Rational> x) const {
    if (rank() == 0) {
      bool zero = std::all_of(x.begin(), x.end(), [](const Rational& v) { return v == 0; });
      return zero ? std::optional<RatVector>(RatVector{}) : std::nullopt;
    }
    return solver().solve(x);
  }

  /// Integer basis coordinates, or nullopt when x is not a lattice vector.
  std::optional<IntVector> coordinates(std::span<const Rational> x) const {
    auto y = rational_coordinates(x);
    if (!y || !is_integral(*y)) return std::nullopt;
    IntVector out(y->size());
    for (std::size_t i = 0; i < y->size(); ++i) out[i] = (*y)[i].get_num();
    return out;
  }

  bool contains(std::span<const Rational> x) const { return coordinates(x).has_value(); }

  RatVector ambient_vector(std::span<const Rational> coords) const {
    return row_times<Rational>(coords, to_rational(basis_));
  }

  const LeftSolver& solver() const {
    if (!solver_) solver_.emplace(to_rational(basis_));
    return *solver_;
  }

 private:
  IntMatrix basis_;
  RatMatrix form_;
  mutable std::optional<LeftSolver> solver_;
};

/// {x in ambient : x·s = 0 for all s in sub}, a primitive sublattice of
/// `ambient`. Both lattices must live in the same ambient space.
inline Lattice orthogonal_complement(const Lattice& sub, const Lattice& ambient) {
  if (sub.ambient_dimension() != ambient.ambient_dimension())
    throw LatticeError("orthogonal_complement: ambient spaces differ");
  if (sub.rank() == 0) return ambient;
  RatMatrix pairing = to_rational(ambient.basis()) * ambient.ambient_form() * to_rational(sub.basis()).transpose();
  IntMatrix kernel = left_kernel(clear_denominators(pairing).second);
  // Kernel rows are coordinates in the ambient basis; HNF tidies them.
  HermiteForm tidy = hnf(kernel);
  IntMatrix coords = tidy.h.rows_range(0, tidy.rank);
  return Lattice(coords * ambient.basis(), ambient.ambient_form());
}

/// The sublattice spanned by the given ambient vectors inside `ambient`'s space.
inline Lattice span_of(const IntMatrix& vectors, const RatMatrix& ambient_form) {
  RowSpanBuilder b(vectors.cols());
  for (std::size_t i = 0; i < vectors.rows(); ++i) b.add(vectors.row(i));
  return Lattice(b.basis(), ambient_form);
}

struct Signature {
  std::size_t positive = 0;
  std::size_t negative = 0;
  std::size_t zero = 0;
  bool operator==(const Signature&) const = default;
};

/// Exact inertia of a symmetric rational matrix by congruence diagonalization.
inline Signature signature(RatMatrix a) {
  const std::size_t n = a.rows();
  if (n != a.cols()) throw LatticeError("signature: matrix not square");
  Signature sig;
  auto congruent_swap = [&a](std::size_t i, std::size_t j) {
    a.swap_rows(i, j);
    a.swap_cols(i, j);
  };
  for (std::size_t k = 0; k < n; ++k) {
    if (a(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && a(p, p) == 0) ++p;
      if (p < n) {
        congruent_swap(k, p);
      } else {
        std::size_t j = k + 1;
        while (j < n && a(k, j) == 0) ++j;
        if (j == n) {
          ++sig.zero;
          continue;
        }
        // a_kk = 0, a_kj != 0: row/col k += row/col j gives 2*a_kj + a_jj = 2*a_kj.
        for (std::size_t c = 0; c < n; ++c) a(k, c) += a(j, c);
        for (std::size_t r = 0; r < n; ++r) a(r, k) += a(r, j);
      }
    }
    const Rational piv = a(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      if (a(i, k) == 0) continue;
      Rational f = a(i, k) / piv;
      for (std::size_t c = k; c < n; ++c) a(i, c) -= f * a(k, c);
      for (std::size_t r = k; r < n; ++r) a(r, i) = a(i, r);
    }
    (piv > 0 ? sig.positive : sig.negative)++;
  }
  return sig;
}

}  // namespace k3conics::lattice
