#pragma once

#include "k3conics/census.hpp"
#include "k3conics/errors.hpp"
#include "k3conics/lattice/discriminant.hpp"
#include "k3conics/lattice/io.hpp"
#include "k3conics/lattice/lattice.hpp"
#include "k3conics/lattice/short_vectors.hpp"
#include "k3conics/leech.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace k3conics::ns {

using lattice::FiniteQuadraticForm;
using lattice::Lattice;
using leech::Coords;

namespace detail {

inline IntMatrix single_row(const Coords& c) {
  IntMatrix m(1, leech::kDim);
  for (std::size_t j = 0; j < leech::kDim; ++j) m(0, j) = c[j];
  return m;
}

inline RatVector half_difference(const Coords& l, const Coords& hbar) {
  RatVector v(leech::kDim);
  for (std::size_t j = 0; j < leech::kDim; ++j) v[j] = Rational(l[j]) - Rational(hbar[j], 2);
  for (auto& x : v) x.canonicalize();
  return v;
}

inline Integer integer_determinant(const RatMatrix& g) {
  const Rational d = determinant(g);
  if (!is_integral(d)) throw LatticeError("determinant is not an integer");
  return d.get_num();
}

inline bool all_even(const RatVector& v) {
  for (const auto& x : v)
    if (!is_integral(x) || !mpz_even_p(x.get_num_mpz_t())) return false;
  return true;
}

}  // namespace detail

/// Ṽ = ⟨ħ, a, u₁, u₂, u₃⟩ inside the Leech coordinates (form I/8).
inline Lattice build_V(const census::Generators& gens) {
  return Lattice(gens.basis(), leech::ambient_form());
}

/// V̄ = ħ⊥ inside Ṽ, rank 4.
inline Lattice build_V_bar(const census::Generators& gens) {
  const Lattice v = build_V(gens);
  const Lattice hbar(detail::single_row(gens.hbar), leech::ambient_form());
  Lattice out = lattice::orthogonal_complement(hbar, v);
  if (out.rank() != 4) throw ConstructionError("build_V_bar: expected rank 4, got " + std::to_string(out.rank()));
  return out;
}

/// S = V̄⊥ inside Λ: rank 20, primitive, containing ħ.
inline Lattice build_S(const census::Generators& gens, const Lattice& leech_lattice) {
  Lattice s = lattice::orthogonal_complement(build_V_bar(gens), leech_lattice);
  if (s.rank() != 20) throw ConstructionError("build_S: expected rank 20, got " + std::to_string(s.rank()));
  if (!s.contains(leech::to_rational(gens.hbar))) throw ConstructionError("build_S: ħ is not in S");
  return s;
}

/// x·ħ is even for every basis vector x of `s`.
inline bool check_hbar_parity(const Lattice& s, const Coords& hbar) {
  const RatVector h = leech::to_rational(hbar);
  const RatMatrix b = to_rational(s.basis());
  return detail::all_even(row_times<Rational>(h, s.ambient_form() * b.transpose()));
}

/// The index-2 overlattice N of −(ħ⊥_S) ⊕ Zh, described abstractly.
///
/// Coordinates: the orthogonal sum M has basis (k₁..k₁₉, h) where kᵢ is the
/// chosen basis of ħ⊥_S; N's basis is given in M-coordinates and every
/// vector of N (h, conic classes) is stored in N-coordinates.
struct PolarizedLattice {
  Lattice complement;           ///< K = ħ⊥_S in Leech coordinates, rank 19
  RatMatrix sum_gram;           ///< Gram of M = −K ⊕ Zh
  RatMatrix basis_in_sum;       ///< rows: N's basis in M-coordinates
  RatMatrix gram;               ///< Gram of N
  IntVector h;                  ///< h in N-coordinates
  std::vector<IntVector> conic_classes;
  std::size_t glue_conic = 0;   ///< index of the conic whose class was adjoined
  Integer sum_determinant;
  Integer determinant;

  Rational inner(std::span<const Integer> x, std::span<const Integer> y) const {
    return bilinear(to_rational(x), gram, to_rational(y));
  }
  Lattice as_lattice() const { return Lattice::abstract(gram); }
};

namespace detail {

// c(l) = l − ½ħ + ½h in M-coordinates: (y, ½) with y·B_K = l − ½ħ.
inline RatVector conic_in_sum(const Lattice& k, const Coords& l, const Coords& hbar) {
  auto y = k.rational_coordinates(half_difference(l, hbar));
  if (!y) throw ConstructionError("build_N: l − ½ħ is not in the span of ħ⊥_S");
  y->push_back(Rational(1, 2));
  return *y;
}

// HNF basis (in M-coordinates) of M + Z·glue for a half-integral glue vector.
inline RatMatrix extend_by(const RatVector& glue) {
  const std::size_t n = glue.size();
  IntMatrix gen(n + 1, n);
  for (std::size_t i = 0; i < n; ++i) gen(i, i) = 2;
  for (std::size_t j = 0; j < n; ++j) {
    const Rational twice = 2 * glue[j];
    if (!is_integral(twice)) throw ConstructionError("build_N: glue vector is not half-integral");
    gen(n, j) = twice.get_num();
  }
  const auto form = lattice::hnf(gen);
  if (form.rank != n) throw ConstructionError("build_N: extension has wrong rank");
  RatMatrix basis(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      basis(i, j) = Rational(form.h(i, j), 2);
      basis(i, j).canonicalize();
    }
  return basis;
}

}  // namespace detail

/// Builds N from S and the conic with index `glue` (default: the first,
/// i.e. lexicographically least, conic). Throws ConstructionError if the
/// extension is not integral, not index 2, or misses a conic class.
inline PolarizedLattice build_N(const Lattice& s, const census::Generators& gens,
                                const std::vector<census::ConicRecord>& conics, std::size_t glue = 0) {
  if (glue >= conics.size()) throw ConstructionError("build_N: glue conic index out of range");
  const Lattice hbar(detail::single_row(gens.hbar), s.ambient_form());
  Lattice k = lattice::orthogonal_complement(hbar, s);
  if (k.rank() != 19) throw ConstructionError("build_N: ħ⊥_S has rank " + std::to_string(k.rank()));

  PolarizedLattice n{std::move(k), {}, {}, {}, {}, {}, glue, {}, {}};
  const std::size_t dim = 20;
  const RatMatrix gk = n.complement.gram();
  n.sum_gram = RatMatrix(dim, dim);
  for (std::size_t i = 0; i < 19; ++i)
    for (std::size_t j = 0; j < 19; ++j) n.sum_gram(i, j) = -gk(i, j);
  n.sum_gram(19, 19) = 4;
  n.sum_determinant = abs(detail::integer_determinant(n.sum_gram));

  n.basis_in_sum = detail::extend_by(detail::conic_in_sum(n.complement, conics[glue].l.coords, gens.hbar));
  const Rational index = 1 / abs(determinant(n.basis_in_sum));
  if (index != 2) throw ConstructionError("build_N: extension index is not 2");
  n.gram = n.basis_in_sum * n.sum_gram * n.basis_in_sum.transpose();
  if (!is_integral(n.gram)) throw ConstructionError("build_N: extension is not integral");
  for (std::size_t i = 0; i < dim; ++i)
    if (!mpz_even_p(n.gram(i, i).get_num_mpz_t())) throw ConstructionError("build_N: extension is not even");
  n.determinant = abs(detail::integer_determinant(n.gram));
  if (n.determinant * 4 != n.sum_determinant) throw ConstructionError("build_N: |det N| ≠ |det M| / 4");

  const LeftSolver in_n(n.basis_in_sum);
  auto n_coords = [&](const RatVector& m_coords, const char* what) {
    auto y = in_n.solve(m_coords);
    if (!y || !is_integral(*y)) throw ConstructionError(std::string("build_N: ") + what + " is not in N");
    IntVector out(y->size());
    for (std::size_t i = 0; i < y->size(); ++i) out[i] = (*y)[i].get_num();
    return out;
  };
  RatVector h_sum(dim);
  h_sum[19] = 1;
  n.h = n_coords(h_sum, "h");
  n.conic_classes.reserve(conics.size());
  for (const auto& r : conics)
    n.conic_classes.push_back(n_coords(detail::conic_in_sum(n.complement, r.l.coords, gens.hbar), "a conic class"));
  return n;
}

/// Same sublattice of M (equal HNF of the 2×-scaled bases).
inline bool same_extension(const PolarizedLattice& x, const PolarizedLattice& y) {
  auto scaled_hnf = [](const RatMatrix& b) { return lattice::hnf(to_integer(Rational(2) * b)).h; };
  return x.sum_gram == y.sum_gram && scaled_hnf(x.basis_in_sum) == scaled_hnf(y.basis_in_sum);
}

/// h·x is even for every basis vector x of N.
inline bool check_h_parity(const PolarizedLattice& n) {
  return detail::all_even(row_times<Rational>(to_rational(n.h), n.gram));
}

struct ConicClassCheck {
  std::size_t count = 0;
  std::size_t self_norm_ok = 0;  ///< c² = −2
  std::size_t degree_ok = 0;     ///< c·h = 2
  bool pass() const { return count == self_norm_ok && count == degree_ok; }
};

inline ConicClassCheck check_conic_classes(const PolarizedLattice& n) {
  ConicClassCheck r;
  for (const auto& c : n.conic_classes) {
    ++r.count;
    if (n.inner(c, c) == -2) ++r.self_norm_ok;
    if (n.inner(c, n.h) == 2) ++r.degree_ok;
  }
  return r;
}

struct PairSample {
  std::size_t sampled = 0;
  std::size_t agreeing = 0;
  bool pass() const { return sampled == agreeing; }
};

/// cᵢ·cⱼ = 2 − lᵢ·lⱼ on `samples` pseudo-random pairs (fixed seed).
inline PairSample check_pair_products(const PolarizedLattice& n, const census::IntersectionGraph& graph,
                                      std::size_t samples = 1000, std::uint64_t seed = 20240601) {
  PairSample r;
  if (n.conic_classes.size() < 2) return r;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n.conic_classes.size() - 1);
  for (std::size_t s = 0; s < samples; ++s) {
    const std::size_t i = pick(rng), j = pick(rng);
    ++r.sampled;
    if (n.inner(n.conic_classes[i], n.conic_classes[j]) == 2 - graph(i, j)) ++r.agreeing;
  }
  return r;
}

/// Stated forms to compare against.
namespace forms {

inline FiniteQuadraticForm block(std::vector<std::int64_t> orders, const RatMatrix& m) {
  return FiniteQuadraticForm::from_matrix(std::move(orders), m);
}
inline FiniteQuadraticForm cyclic(std::int64_t order, std::int64_t num, std::int64_t den) {
  Rational q(num, den);
  q.canonicalize();
  return FiniteQuadraticForm::cyclic(order, q);
}

/// [1,½;½,1] ⊕ [1/8] ⊕ [2/5]
inline FiniteQuadraticForm v_tilde() {
  Rational half(1, 2);
  return direct_sum(direct_sum(block({2, 2}, RatMatrix{{1, half}, {half, 1}}), cyclic(8, 1, 8)), cyclic(5, 2, 5));
}
/// [5/4] ⊕ [1/8] ⊕ [2/5]
inline FiniteQuadraticForm n_first() { return direct_sum(direct_sum(cyclic(4, 5, 4), cyclic(8, 1, 8)), cyclic(5, 2, 5)); }
/// [−1/4] ⊕ [−5/8] ⊕ [2/5]
inline FiniteQuadraticForm n_second() {
  return direct_sum(direct_sum(cyclic(4, -1, 4), cyclic(8, -5, 8)), cyclic(5, 2, 5));
}

}  // namespace forms

/// T = diag(4, 40), standing in for the transcendental lattice.
inline Lattice transcendental_model() { return Lattice::abstract(RatMatrix{{4, 0}, {0, 40}}); }

struct IsomorphismCheck {
  std::string name;
  std::int64_t source_order = 0;
  std::int64_t target_order = 0;
  std::optional<lattice::FqfIsomorphism> witness;
  bool witness_verified = false;
  bool pass() const { return witness.has_value() && witness_verified; }
};

inline IsomorphismCheck check_isomorphic(std::string name, const FiniteQuadraticForm& src,
                                         const FiniteQuadraticForm& dst) {
  IsomorphismCheck c{std::move(name), src.group_order(), dst.group_order(), lattice::fqf_isomorphism(src, dst), false};
  if (c.witness) c.witness_verified = lattice::verify_isomorphism(src, dst, *c.witness);
  return c;
}

struct DiscriminantReport {
  Integer v_tilde_determinant;
  std::int64_t v_tilde_order = 0;
  std::int64_t n_order = 0;
  std::vector<IsomorphismCheck> checks;
  bool pass() const {
    if (v_tilde_determinant != 160 || v_tilde_order != 160 || n_order != 160) return false;
    for (const auto& c : checks)
      if (!c.pass()) return false;
    return true;
  }
};

/// All discriminant-form identities; every witness is re-verified
/// element by element.
inline DiscriminantReport verify_discriminants(const Lattice& v_tilde, const PolarizedLattice& n,
                                               const Lattice& leech_lattice) {
  DiscriminantReport r;
  r.v_tilde_determinant = detail::integer_determinant(v_tilde.gram());
  const auto dv = lattice::discriminant_form(v_tilde);
  const auto dn = lattice::discriminant_form(n.as_lattice());
  const auto dt = lattice::discriminant_form(transcendental_model());
  r.v_tilde_order = dv.group_order();
  r.n_order = dn.group_order();
  r.checks.push_back(check_isomorphic("discr V~ = [1,1/2;1/2,1]+[1/8]+[2/5]", dv, forms::v_tilde()));
  r.checks.push_back(check_isomorphic("discr N = [5/4]+[1/8]+[2/5]", dn, forms::n_first()));
  r.checks.push_back(check_isomorphic("discr N = [-1/4]+[-5/8]+[2/5]", dn, forms::n_second()));
  r.checks.push_back(check_isomorphic("-discr N = discr T, T = diag(4,40)", -dn, dt));
  const Lattice v_perp = lattice::orthogonal_complement(v_tilde, leech_lattice);
  r.checks.push_back(check_isomorphic("discr(V~ perp in Leech) = -discr V~", lattice::discriminant_form(v_perp), -dv));
  return r;
}

struct BadVectors {
  std::vector<lattice::ShortVector> exceptional;  ///< e² = −2, e·h = 0; coordinates in h⊥
  std::vector<lattice::ShortVector> isotropic;    ///< e² = 0, e·h = 2; coordinates x with e = e₀ + x
  bool empty() const { return exceptional.empty() && isotropic.empty(); }
};

/// Scans a hyperbolic lattice with Gram `gram` and polarization `h` (h² = 4)
/// for exceptional divisors and 2-isotropic vectors. Writing e = (e·h/4)h + f
/// with f ∈ h⊥ ⊗ Q, the first kind is a norm-2 vector of P = −gram(h⊥) and
/// the second a norm-1 vector of P in the coset e₀ − ½h + h⊥, where e₀ is
/// any vector with e₀·h = 2 (none exists when h·N ⊂ 4Z).
inline BadVectors bad_vector_scan(const RatMatrix& gram, const IntVector& h) {
  const std::size_t dim = gram.rows();
  const Lattice whole(IntMatrix::identity(dim), gram);
  IntMatrix h_row(1, dim);
  for (std::size_t j = 0; j < dim; ++j) h_row(0, j) = h[j];
  const Lattice h_lat(h_row, gram);
  if (h_lat.gram()(0, 0) != 4) throw LatticeError("bad_vector_scan: h² must be 4");
  const Lattice perp = lattice::orthogonal_complement(h_lat, whole);
  const RatMatrix p = -perp.gram();

  BadVectors out;
  out.exceptional = lattice::short_vectors(p, 2);

  // e₀: a basis combination with e₀·h = 2, found from h·(basis) by gcd.
  const RatVector hg = row_times<Rational>(to_rational(h), gram);
  IntMatrix col(dim, 1);
  for (std::size_t i = 0; i < dim; ++i) col(i, 0) = hg[i].get_num();
  const auto form = lattice::hnf(col);
  if (form.rank == 0) return out;
  const Integer g = form.h(0, 0);  // gcd of h·bᵢ
  if (2 % g != 0) return out;
  RatVector shift_ambient(dim);
  for (std::size_t j = 0; j < dim; ++j)
    shift_ambient[j] = Rational(Integer(2 / g) * form.u(0, j)) - Rational(h[j], 2);
  for (auto& x : shift_ambient) x.canonicalize();
  auto shift = perp.rational_coordinates(shift_ambient);
  if (!shift) throw LatticeError("bad_vector_scan: e₀ − ½h is not in the span of h⊥");
  out.isotropic = lattice::short_vectors(p, 1, lattice::NormMode::exact, *shift);
  return out;
}

inline BadVectors bad_vector_scan(const PolarizedLattice& n) { return bad_vector_scan(n.gram, n.h); }

/// No vector of true norm 2 in the positive-definite lattice.
inline bool root_free(const Lattice& lat) { return lattice::short_vectors(lat.gram(), 2).empty(); }

/// N's Gram matrix, h, and the 800 class coordinate vectors as three
/// consecutive text matrices.
inline void export_polarized(std::ostream& os, const PolarizedLattice& n) {
  lattice::write_matrix(os, n.gram);
  IntMatrix h(1, n.h.size());
  for (std::size_t j = 0; j < n.h.size(); ++j) h(0, j) = n.h[j];
  lattice::write_matrix(os, h);
  IntMatrix classes(n.conic_classes.size(), n.h.size());
  for (std::size_t i = 0; i < n.conic_classes.size(); ++i)
    for (std::size_t j = 0; j < n.h.size(); ++j) classes(i, j) = n.conic_classes[i][j];
  lattice::write_matrix(os, classes);
}

}  // namespace k3conics::ns
