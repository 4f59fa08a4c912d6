#pragma once

#include "k3conics/lattice/lattice.hpp"
#include "k3conics/lattice/normal_forms.hpp"

#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace k3conics::lattice {

/// x mod m, in [0, m).
inline Rational mod_rational(const Rational& x, const Rational& m) {
  Rational q = x / m;
  Integer f;
  mpz_fdiv_q(f.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  Rational r = x - Rational(f) * m;
  r.canonicalize();
  return r;
}

inline Rational mod2(const Rational& x) { return mod_rational(x, 2); }
inline Rational mod1(const Rational& x) { return mod_rational(x, 1); }

/// A finite abelian group Z/d1 x ... x Z/dk given by generators, with a
/// quadratic form q valued in Q/2Z and its bilinear form b valued in Q/Z.
/// Generator orders need not form an invariant-factor chain.
class FiniteQuadraticForm {
 public:
  using Element = std::vector<std::int64_t>;  // coefficients on the generators

  FiniteQuadraticForm() = default;

  /// `q` holds q(g_i); `b` holds b(g_i, g_j) (diagonal is ignored).
  FiniteQuadraticForm(std::vector<std::int64_t> orders, RatVector q, RatMatrix b)
      : orders_(std::move(orders)), q_(std::move(q)), b_(std::move(b)) {
    const std::size_t k = orders_.size();
    if (q_.size() != k || b_.rows() != k || b_.cols() != k) throw LatticeError("FiniteQuadraticForm: size mismatch");
    for (auto d : orders_)
      if (d < 1) throw LatticeError("FiniteQuadraticForm: generator order must be positive");
    for (std::size_t i = 0; i < k; ++i) {
      q_[i] = mod2(q_[i]);
      for (std::size_t j = 0; j < k; ++j) b_(i, j) = mod1(i == j ? q_[i] : b_(i, j));
    }
  }

  /// The cyclic form [q] on Z/order.
  static FiniteQuadraticForm cyclic(std::int64_t order, Rational q) {
    RatMatrix b(1, 1);
    return FiniteQuadraticForm({order}, {std::move(q)}, b);
  }

  /// The form read off a rational symmetric matrix: generators of the given
  /// orders with q(g_i) = m_ii and b(g_i, g_j) = m_ij.
  static FiniteQuadraticForm from_matrix(std::vector<std::int64_t> orders, const RatMatrix& m) {
    RatVector q(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) q[i] = m(i, i);
    return FiniteQuadraticForm(std::move(orders), std::move(q), m);
  }

  FiniteQuadraticForm operator-() const {
    RatVector q = q_;
    RatMatrix b = b_;
    for (auto& x : q) x = -x;
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t j = 0; j < b.cols(); ++j) b(i, j) = -b(i, j);
    return FiniteQuadraticForm(orders_, q, b);
  }

  friend FiniteQuadraticForm direct_sum(const FiniteQuadraticForm& x, const FiniteQuadraticForm& y) {
    const std::size_t k = x.generator_count() + y.generator_count();
    std::vector<std::int64_t> orders = x.orders_;
    orders.insert(orders.end(), y.orders_.begin(), y.orders_.end());
    RatVector q = x.q_;
    q.insert(q.end(), y.q_.begin(), y.q_.end());
    RatMatrix b(k, k);
    for (std::size_t i = 0; i < x.generator_count(); ++i)
      for (std::size_t j = 0; j < x.generator_count(); ++j) b(i, j) = x.b_(i, j);
    const std::size_t o = x.generator_count();
    for (std::size_t i = 0; i < y.generator_count(); ++i)
      for (std::size_t j = 0; j < y.generator_count(); ++j) b(o + i, o + j) = y.b_(i, j);
    return FiniteQuadraticForm(std::move(orders), std::move(q), std::move(b));
  }

  std::size_t generator_count() const { return orders_.size(); }
  const std::vector<std::int64_t>& orders() const { return orders_; }
  const RatVector& generator_q() const { return q_; }
  const RatMatrix& generator_b() const { return b_; }

  std::int64_t group_order() const {
    return std::accumulate(orders_.begin(), orders_.end(), std::int64_t{1}, std::multiplies<>());
  }

  /// Mixed-radix index <-> element.
  Element element(std::int64_t index) const {
    Element e(orders_.size());
    for (std::size_t i = 0; i < orders_.size(); ++i) {
      e[i] = index % orders_[i];
      index /= orders_[i];
    }
    return e;
  }
  std::int64_t index(const Element& e) const {
    std::int64_t idx = 0;
    for (std::size_t i = orders_.size(); i-- > 0;) idx = idx * orders_[i] + mod(e[i], orders_[i]);
    return idx;
  }

  Element generator(std::size_t i) const {
    Element e(orders_.size());
    e[i] = orders_[i] == 1 ? 0 : 1;
    return e;
  }

  Element add(const Element& x, const Element& y) const {
    Element s(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) s[i] = mod(x[i] + y[i], orders_[i]);
    return s;
  }

  Element scale(const Element& x, std::int64_t k) const {
    Element s(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) s[i] = mod(x[i] * k, orders_[i]);
    return s;
  }

  /// q(Σ a_i g_i) = Σ a_i² q_i + 2 Σ_{i<j} a_i a_j b_ij  (mod 2).
  Rational q(const Element& x) const {
    Rational v = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] == 0) continue;
      v += Rational(x[i] * x[i]) * q_[i];
      for (std::size_t j = i + 1; j < x.size(); ++j)
        if (x[j] != 0) v += Rational(2 * x[i] * x[j]) * b_(i, j);
    }
    return mod2(v);
  }

  Rational b(const Element& x, const Element& y) const {
    Rational v = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] == 0) continue;
      for (std::size_t j = 0; j < y.size(); ++j)
        if (y[j] != 0) v += Rational(x[i] * y[j]) * b_(i, j);
    }
    return mod1(v);
  }

  std::int64_t element_order(const Element& x) const {
    std::int64_t o = 1;
    for (std::size_t i = 0; i < x.size(); ++i) o = std::lcm(o, orders_[i] / std::gcd(orders_[i], x[i]));
    return o;
  }

  std::string to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < orders_.size(); ++i) {
      if (i) os << " + ";
      os << "Z/" << orders_[i] << "[" << q_[i].get_str() << "]";
    }
    return os.str();
  }

 private:
  static std::int64_t mod(std::int64_t a, std::int64_t m) {
    std::int64_t r = a % m;
    return r < 0 ? r + m : r;
  }

  std::vector<std::int64_t> orders_;
  RatVector q_;
  RatMatrix b_;
};

/// Discriminant form L∨/L of a nondegenerate even lattice, on the
/// invariant-factor generators (trivial factors dropped).
inline FiniteQuadraticForm discriminant_form(const Lattice& lat) {
  RatMatrix gram = lat.gram();
  if (!is_integral(gram)) throw LatticeError("discriminant_form: Gram matrix is not integral");
  for (std::size_t i = 0; i < gram.rows(); ++i)
    if (!mpz_even_p(gram(i, i).get_num_mpz_t())) throw LatticeError("discriminant_form: lattice is not even");
  if (determinant(gram) == 0) throw LatticeError("discriminant_form: degenerate Gram matrix");
  if (gram.rows() == 0) return {};

  // Dual vectors in basis coordinates are G⁻¹y, y ∈ Zⁿ; the group is Zⁿ/GZⁿ.
  // With U·G·V = D, the i-th cyclic factor is generated by y = U⁻¹eᵢ.
  SmithForm s = snf(to_integer(gram));
  RatMatrix g_inv = inverse(gram);
  RatMatrix u_inv = inverse(to_rational(s.left));
  RatMatrix gens = (g_inv * u_inv).transpose();  // row i = G⁻¹U⁻¹eᵢ

  std::vector<std::int64_t> orders;
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < s.divisors.size(); ++i)
    if (s.divisors[i] != 1) {
      if (!s.divisors[i].fits_slong_p()) throw LatticeError("discriminant_form: group too large");
      orders.push_back(s.divisors[i].get_si());
      kept.push_back(i);
    }
  const std::size_t k = kept.size();
  RatMatrix values(k, k);
  for (std::size_t a = 0; a < k; ++a)
    for (std::size_t c = 0; c < k; ++c) values(a, c) = bilinear(gens.row(kept[a]), gram, gens.row(kept[c]));
  return FiniteQuadraticForm::from_matrix(std::move(orders), values);
}

/// Images of the generators of the source form.
using FqfIsomorphism = std::vector<FiniteQuadraticForm::Element>;

inline constexpr std::int64_t kMaxIsomorphismGroupOrder = 10000;

/// Exhaustively re-checks that `images` defines an isometry src -> dst:
/// well-defined homomorphism, bijective, and q-preserving on every element.
inline bool verify_isomorphism(const FiniteQuadraticForm& src, const FiniteQuadraticForm& dst,
                               const FqfIsomorphism& images) {
  if (src.group_order() != dst.group_order() || images.size() != src.generator_count()) return false;
  for (std::size_t i = 0; i < images.size(); ++i)
    if (src.orders()[i] % dst.element_order(images[i]) != 0) return false;
  std::vector<char> hit(static_cast<std::size_t>(dst.group_order()), 0);
  for (std::int64_t idx = 0; idx < src.group_order(); ++idx) {
    auto x = src.element(idx);
    FiniteQuadraticForm::Element y(dst.generator_count());
    for (std::size_t i = 0; i < x.size(); ++i) y = dst.add(y, dst.scale(images[i], x[i]));
    auto& h = hit[static_cast<std::size_t>(dst.index(y))];
    if (h) return false;
    h = 1;
    if (src.q(x) != dst.q(y)) return false;
  }
  return true;
}

/// Pruned brute-force search for an isometry f1 -> f2. Throws for groups
/// larger than kMaxIsomorphismGroupOrder.
inline std::optional<FqfIsomorphism> fqf_isomorphism(const FiniteQuadraticForm& f1, const FiniteQuadraticForm& f2) {
  if (f1.group_order() > kMaxIsomorphismGroupOrder || f2.group_order() > kMaxIsomorphismGroupOrder)
    throw LatticeError("fqf_isomorphism: group order exceeds supported size");
  if (f1.group_order() != f2.group_order()) return std::nullopt;

  const std::size_t k = f1.generator_count();
  std::vector<std::vector<FiniteQuadraticForm::Element>> candidates(k);
  for (std::int64_t idx = 0; idx < f2.group_order(); ++idx) {
    auto y = f2.element(idx);
    const auto oy = f2.element_order(y);
    const Rational qy = f2.q(y);
    for (std::size_t i = 0; i < k; ++i) {
      auto g = f1.generator(i);
      if (f1.element_order(g) == oy && f1.generator_q()[i] == qy) candidates[i].push_back(y);
    }
  }
  for (const auto& c : candidates)
    if (c.empty()) return std::nullopt;

  FqfIsomorphism images(k);
  std::function<bool(std::size_t)> search = [&](std::size_t i) -> bool {
    if (i == k) return verify_isomorphism(f1, f2, images);
    for (const auto& y : candidates[i]) {
      bool ok = true;
      for (std::size_t j = 0; j < i && ok; ++j) ok = f2.b(y, images[j]) == f1.generator_b()(i, j);
      if (!ok) continue;
      images[i] = y;
      if (search(i + 1)) return true;
    }
    return false;
  };
  if (!search(0)) return std::nullopt;
  return images;
}

inline bool fqf_isomorphic(const FiniteQuadraticForm& f1, const FiniteQuadraticForm& f2) {
  return fqf_isomorphism(f1, f2).has_value();
}

}  // namespace k3conics::lattice
