#pragma once

#include "k3conics/golay.hpp"
#include "k3conics/lattice/lattice.hpp"

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <ostream>
#include <vector>

namespace k3conics::leech {

using golay::GolayCode;
using golay::Mask;

inline constexpr int kDim = 24;
/// Coordinates are raw integers; the true form is (Σ xᵢyᵢ)/8.
inline constexpr int kFormScale = 8;
inline constexpr int kMinimalRawNorm = 32;

inline constexpr std::size_t kShape31Count = 98304;
inline constexpr std::size_t kShape20Count = 97152;
inline constexpr std::size_t kShape40Count = 1104;
inline constexpr std::size_t kMinimalCount = 196560;

enum class Shape : std::uint8_t { s31, s20, s40 };

inline const char* to_string(Shape s) {
  switch (s) {
    case Shape::s31: return "31";
    case Shape::s20: return "20";
    case Shape::s40: return "40";
  }
  return "?";
}

using Coords = std::array<std::int8_t, kDim>;

struct LeechVector {
  Coords coords{};
  Shape shape = Shape::s31;
  Mask codeword = 0;  ///< inducing codeword (shape 31) or octad support (shape 20)

  std::int8_t operator[](int position) const { return coords[static_cast<std::size_t>(position - 1)]; }
  friend auto operator<=>(const LeechVector& a, const LeechVector& b) { return a.coords <=> b.coords; }
  friend bool operator==(const LeechVector& a, const LeechVector& b) { return a.coords == b.coords; }
};

/// Σ xᵢyᵢ; the true inner product is raw/8.
struct ScaledInnerProduct {
  int raw = 0;
  Rational true_value() const {
    Rational r(raw, kFormScale);
    r.canonicalize();
    return r;
  }
  bool integral() const { return raw % kFormScale == 0; }
  /// Only meaningful when integral().
  int true_integer() const { return raw / kFormScale; }
};

inline ScaledInnerProduct inner(const Coords& x, const Coords& y) {
  int s = 0;
  for (std::size_t i = 0; i < kDim; ++i) s += x[i] * y[i];
  return {s};
}
inline ScaledInnerProduct inner(const LeechVector& x, const LeechVector& y) { return inner(x.coords, y.coords); }

inline Coords make_coords(std::initializer_list<int> leading) {
  Coords c{};
  std::size_t i = 0;
  for (int v : leading) c[i++] = static_cast<std::int8_t>(v);
  return c;
}

/// Shape (∓3, ±1²³): +1 on o, −1 off o, and position k carries −3 if k ∈ o,
/// +3 otherwise. Codeword-major, then position. `first`/`last` select a
/// shard of the (sorted) codeword list.
template <class Sink>
void for_each_shape31(const GolayCode& code, Sink&& sink, std::size_t first = 0,
                      std::size_t last = golay::kCodeSize) {
  const auto& words = code.words();
  for (std::size_t w = first; w < last; ++w) {
    const Mask o = words[w];
    LeechVector v;
    v.shape = Shape::s31;
    v.codeword = o;
    for (int p = 1; p <= kDim; ++p) v.coords[static_cast<std::size_t>(p - 1)] = (o & golay::bit(p)) ? 1 : -1;
    for (int k = 1; k <= kDim; ++k) {
      auto& e = v.coords[static_cast<std::size_t>(k - 1)];
      const std::int8_t saved = e;
      e = static_cast<std::int8_t>(-3 * saved);
      sink(v);
      e = saved;
    }
  }
}

/// Shape (±2⁸, 0¹⁶) on an octad with an even number of +2. Seven free signs
/// walk a Gray code; the eighth is forced by parity.
template <class Sink>
void for_each_shape20(const GolayCode& code, Sink&& sink) {
  for (Mask octad : code.octads()) {
    const auto pos = golay::positions_of(octad);
    LeechVector v;
    v.shape = Shape::s20;
    v.codeword = octad;
    // Start with all −2: zero plus signs, parity even.
    for (int p : pos) v.coords[static_cast<std::size_t>(p - 1)] = -2;
    unsigned plus_bits = 0;
    for (unsigned step = 0; step < 128; ++step) {
      if (step > 0) {
        const unsigned flip = static_cast<unsigned>(std::countr_zero(step));
        plus_bits ^= 1u << flip;
        auto& e = v.coords[static_cast<std::size_t>(pos[flip] - 1)];
        e = static_cast<std::int8_t>(-e);
      }
      const bool odd = std::popcount(plus_bits) % 2 != 0;
      v.coords[static_cast<std::size_t>(pos[7] - 1)] = odd ? 2 : -2;
      sink(v);
    }
  }
}

/// Shape (±4², 0²²): every pair of positions with every sign choice.
template <class Sink>
void for_each_shape40(Sink&& sink) {
  for (int i = 0; i < kDim; ++i)
    for (int j = i + 1; j < kDim; ++j)
      for (int si : {4, -4})
        for (int sj : {4, -4}) {
          LeechVector v;
          v.shape = Shape::s40;
          v.coords[static_cast<std::size_t>(i)] = static_cast<std::int8_t>(si);
          v.coords[static_cast<std::size_t>(j)] = static_cast<std::int8_t>(sj);
          sink(v);
        }
}

/// All 196560 minimal vectors streamed shape by shape (31, 20, 40).
template <class Sink>
void for_each_minimal_vector(const GolayCode& code, Sink&& sink) {
  for_each_shape31(code, sink);
  for_each_shape20(code, sink);
  for_each_shape40(sink);
}

inline std::vector<LeechVector> enumerate_shape31(const GolayCode& code) {
  std::vector<LeechVector> out;
  out.reserve(kShape31Count);
  for_each_shape31(code, [&out](const LeechVector& v) { out.push_back(v); });
  return out;
}

inline std::vector<LeechVector> enumerate_shape20(const GolayCode& code) {
  std::vector<LeechVector> out;
  out.reserve(kShape20Count);
  for_each_shape20(code, [&out](const LeechVector& v) { out.push_back(v); });
  return out;
}

inline std::vector<LeechVector> enumerate_shape40() {
  std::vector<LeechVector> out;
  out.reserve(kShape40Count);
  for_each_shape40([&out](const LeechVector& v) { out.push_back(v); });
  return out;
}

inline std::vector<LeechVector> all_minimal_vectors(const GolayCode& code) {
  std::vector<LeechVector> out;
  out.reserve(kMinimalCount);
  for_each_minimal_vector(code, [&out](const LeechVector& v) { out.push_back(v); });
  return out;
}

inline RatVector to_rational(const Coords& c) {
  RatVector v(kDim);
  for (std::size_t i = 0; i < kDim; ++i) v[i] = c[i];
  return v;
}

inline IntVector to_integer(const Coords& c) {
  IntVector v(kDim);
  for (std::size_t i = 0; i < kDim; ++i) v[i] = c[i];
  return v;
}

/// The ambient form I/8 on Z²⁴.
inline RatMatrix ambient_form() {
  RatMatrix f(kDim, kDim);
  for (std::size_t i = 0; i < kDim; ++i) f(i, i) = Rational(1, kFormScale);
  return f;
}

struct LeechBasis {
  lattice::Lattice lattice;        ///< 24 shape-31 vectors as basis, form I/8
  std::vector<std::size_t> picked; ///< their indices in the input list
  IntMatrix hermite;               ///< HNF basis of the same lattice
};

/// Extracts 24 of the given shape-31 vectors forming a Z-basis of their span.
///
/// The span is first computed by incremental HNF. A greedy pass picks 24
/// independent vectors; while the picked set has index > 1 in the span,
/// any vector v with a coordinate 0 < |cᵢ| < 1 in the picked basis replaces
/// basis vector i, which divides the index by 1/|cᵢ|.
inline LeechBasis leech_basis(const std::vector<LeechVector>& shape31) {
  lattice::RowSpanBuilder span(kDim);
  for (const auto& v : shape31) span.add(v.coords);
  if (span.rank() != kDim) throw ConstructionError("leech_basis: shape-31 vectors span rank < 24");
  IntMatrix hermite = span.basis();
  const Integer target_det = abs(determinant(hermite));

  std::vector<std::size_t> picked;
  RatMatrix rows(0, kDim);
  for (std::size_t i = 0; i < shape31.size() && picked.size() < kDim; ++i) {
    RatMatrix trial = rows;
    trial.append_row(to_rational(shape31[i].coords));
    if (k3conics::rank(trial) == trial.rows()) {
      rows = std::move(trial);
      picked.push_back(i);
    }
  }
  auto index_of = [&]() {
    Rational r = abs(determinant(rows)) / Rational(target_det);
    r.canonicalize();
    return r;
  };
  Rational index = index_of();
  bool progress = true;
  while (index != 1 && progress) {
    progress = false;
    // c = v·rows⁻¹ = (v·adj)/det; adj entries fit comfortably in 128 bits.
    const Rational det = determinant(rows);
    RatMatrix adj_q = det * inverse(rows);
    std::vector<__int128> adj(kDim * kDim);
    for (std::size_t k = 0; k < kDim; ++k)
      for (std::size_t j = 0; j < kDim; ++j) {
        auto e = to_int128(adj_q(k, j).get_num());
        if (!e || mpz_sizeinbase(adj_q(k, j).get_num_mpz_t(), 2) > 100)
          throw ConstructionError("leech_basis: adjugate entries too large");
        adj[k * kDim + j] = *e;
      }
    const __int128 d = *to_int128(Rational(abs(det)).get_num());
    for (std::size_t i = 0; i < shape31.size(); ++i) {
      const auto& v = shape31[i].coords;
      std::optional<std::size_t> best;
      __int128 best_num = 0;
      for (std::size_t j = 0; j < kDim; ++j) {
        __int128 num = 0;
        for (std::size_t k = 0; k < kDim; ++k) num += static_cast<__int128>(v[k]) * adj[k * kDim + j];
        if (num < 0) num = -num;
        if (num != 0 && num < d && (!best || num < best_num)) {
          best = j;
          best_num = num;
        }
      }
      if (!best) continue;
      for (std::size_t j = 0; j < kDim; ++j) rows(*best, j) = v[j];
      picked[*best] = i;
      index = index_of();
      progress = true;
      break;
    }
  }
  if (index != 1) throw ConstructionError("leech_basis: could not extract a basis from the shape-31 vectors");

  IntMatrix basis(kDim, kDim);
  for (std::size_t k = 0; k < kDim; ++k)
    for (std::size_t j = 0; j < kDim; ++j) basis(k, j) = shape31[picked[k]].coords[j];
  lattice::Lattice lat(std::move(basis), ambient_form());
  RatMatrix gram = lat.gram();
  if (!is_integral(gram)) throw ConstructionError("leech_basis: Gram matrix is not integral");
  for (std::size_t i = 0; i < kDim; ++i)
    if (!mpz_even_p(gram(i, i).get_num_mpz_t())) throw ConstructionError("leech_basis: Gram matrix is not even");
  if (determinant(gram) != 1) throw ConstructionError("leech_basis: Gram determinant is not 1");
  return {std::move(lat), std::move(picked), std::move(hermite)};
}

/// 24 space-separated integers per line, sorted lexicographically.
inline void export_vectors(std::ostream& os, std::vector<LeechVector> vectors) {
  std::sort(vectors.begin(), vectors.end());
  for (const auto& v : vectors) {
    for (std::size_t i = 0; i < kDim; ++i) os << (i ? " " : "") << static_cast<int>(v.coords[i]);
    os << '\n';
  }
}

}  // namespace k3conics::leech
