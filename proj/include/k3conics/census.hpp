#pragma once

#include "k3conics/errors.hpp"
#include "k3conics/golay.hpp"
#include "k3conics/leech.hpp"
#include "k3conics/parallel.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace k3conics::census {

using golay::Mask;
using leech::Coords;
using leech::LeechVector;
using leech::Shape;

inline constexpr std::size_t kConicCount = 800;

/// ħ, a, u₁, u₂, u₃ spanning the rank-5 lattice Ṽ ⊂ Λ.
struct Generators {
  Coords hbar = leech::make_coords({4, 4});
  Coords a = leech::make_coords({0, 4, 4});
  Coords u1 = leech::make_coords({0, 0, 4, 4});
  Coords u2 = leech::make_coords({0, 0, 0, 4, 4});
  Coords u3 = leech::make_coords({-2, 2, 0, -2, 2, 2, 2, 2, 2});

  std::array<Coords, 5> all() const { return {hbar, a, u1, u2, u3}; }

  /// True Gram matrix of (ħ, a, u₁, u₂, u₃).
  RatMatrix gram() const {
    const auto g = all();
    RatMatrix m(5, 5);
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < 5; ++j) m(i, j) = leech::inner(g[i], g[j]).true_value();
    return m;
  }

  /// The Gram matrix the generators must reproduce.
  static RatMatrix expected_gram() {
    return RatMatrix{{4, 2, 0, 0, 0}, {2, 4, 2, 0, 1}, {0, 2, 4, 2, -1}, {0, 0, 2, 4, 0}, {0, 1, -1, 0, 4}};
  }

  IntMatrix basis() const {
    IntMatrix b(5, leech::kDim);
    const auto g = all();
    for (std::size_t i = 0; i < 5; ++i)
      for (std::size_t j = 0; j < leech::kDim; ++j) b(i, j) = g[i][j];
    return b;
  }
};

/// Conic condition: (l·ħ, l·a, l·u₁, l·u₂, l·u₃) = (2, 1, 0, 0, 0), raw = 8x.
inline bool is_conic(const Coords& l, const Generators& g) {
  return leech::inner(l, g.hbar).raw == 16 && leech::inner(l, g.a).raw == 8 && leech::inner(l, g.u1).raw == 0 &&
         leech::inner(l, g.u2).raw == 0 && leech::inner(l, g.u3).raw == 0;
}

enum class Pattern : std::uint8_t { p1 = 1, p2 = 2, p3 = 3, p4 = 4 };

inline std::string to_string(Pattern p) { return "#" + std::to_string(static_cast<int>(p)); }

struct Classification {
  Pattern pattern = Pattern::p1;
  /// Starred positions in {6,7,8,9}: the two −1 entries (#1, #2, unordered,
  /// ascending) or (+2 position, −2 position) for #4. Absent for #3.
  std::optional<std::pair<int, int>> movable;
};

struct ConicRecord {
  LeechVector l;
  Pattern pattern = Pattern::p1;
  std::optional<std::pair<int, int>> movable;
  Mask codeword = 0;

  friend bool operator<(const ConicRecord& x, const ConicRecord& y) { return x.l < y.l; }
};

/// Assigns one of the four fixed-part profiles; throws VerificationError
/// when the vector matches none.
inline Classification classify(const LeechVector& l) {
  auto prefix = [&l](std::initializer_list<int> values) {
    int p = 1;
    for (int v : values)
      if (l[p++] != v) return false;
    return true;
  };
  auto movable_positions = [&l](int value) {
    std::vector<int> out;
    for (int p = 6; p <= 9; ++p)
      if (l[p] == value) out.push_back(p);
    return out;
  };

  if (l.shape == Shape::s31 && (prefix({1, 3, -1, 1, -1}) || prefix({3, 1, 1, -1, 1}))) {
    const auto minus = movable_positions(-1);
    if (minus.size() == 2 && movable_positions(1).size() == 2)
      return {l[1] == 1 ? Pattern::p1 : Pattern::p2, std::pair{minus[0], minus[1]}};
  }
  if (l.shape == Shape::s20 && prefix({2, 2, 0, 0, 0})) {
    const auto plus = movable_positions(2), minus = movable_positions(-2), zero = movable_positions(0);
    if (zero.size() == 4) return {Pattern::p3, std::nullopt};
    if (plus.size() == 1 && minus.size() == 1 && zero.size() == 2) return {Pattern::p4, std::pair{plus[0], minus[0]}};
  }
  std::string coords;
  for (int p = 1; p <= 9; ++p) coords += std::to_string(l[p]) + " ";
  throw VerificationError("classify: conic matches no known pattern (first nine coordinates: " + coords + ")");
}

/// Filters the 196560 minimal vectors down to the conics, classifies them,
/// and returns them sorted by coordinates. Shards run on `threads` workers.
inline std::vector<ConicRecord> find_conics(const golay::GolayCode& code, const Generators& gens,
                                            unsigned threads = 1) {
  constexpr std::size_t kWordShards = 16;
  constexpr std::size_t kShards = kWordShards + 2;  // + shape 20 + shape 40
  std::vector<std::vector<LeechVector>> found(kShards);
  parallel_shards(kShards, threads, [&](std::size_t s) {
    auto sink = [&](const LeechVector& v) {
      if (is_conic(v.coords, gens)) found[s].push_back(v);
    };
    if (s < kWordShards) {
      const std::size_t per = golay::kCodeSize / kWordShards;
      leech::for_each_shape31(code, sink, s * per, (s + 1) * per);
    } else if (s == kWordShards) {
      leech::for_each_shape20(code, sink);
    } else {
      leech::for_each_shape40(sink);
    }
  });
  std::vector<ConicRecord> out;
  for (const auto& shard : found)
    for (const auto& v : shard) {
      Classification c = classify(v);
      out.push_back({v, c.pattern, c.movable, v.codeword});
    }
  std::sort(out.begin(), out.end());
  return out;
}

struct PatternCounts {
  std::array<std::size_t, 4> by_pattern{};  // #1..#4
  std::size_t total() const { return by_pattern[0] + by_pattern[1] + by_pattern[2] + by_pattern[3]; }
  std::size_t operator[](Pattern p) const { return by_pattern[static_cast<std::size_t>(p) - 1]; }
  bool operator==(const PatternCounts&) const = default;
};

inline PatternCounts count_patterns(const std::vector<ConicRecord>& conics) {
  PatternCounts c;
  for (const auto& r : conics) ++c.by_pattern[static_cast<std::size_t>(r.pattern) - 1];
  return c;
}

/// For a shape-31 conic, the codeword carrying the −1 entries (the
/// complement of the inducing +1 set); this is the codeword the recount
/// conditions o ∩ Σ = F ∪ {p,q} refer to.
inline Mask lower_sign_codeword(const ConicRecord& r) { return golay::kOmega & ~r.codeword; }

/// Observed link between a shape-31 pattern and a codeword condition
/// o ∩ Σ = F ∪ {p,q}, with o the lower-sign codeword.
struct PatternCorrespondence {
  Pattern pattern = Pattern::p1;
  Mask fixed_part = 0;      ///< o ∩ φ, identical for all conics of the pattern
  std::string pair_role;    ///< "starred" or "unstarred": how {p,q} relates to the starred pair
  std::string table_row;    ///< label of the codeword-condition row it matches
  bool unique = false;
};

struct RecountRow {
  std::string label;
  std::string condition;
  int underlined_expected = 0;
  /// Codeword count per admissible pair (or a single entry for row #3).
  std::vector<std::pair<std::string, std::size_t>> codeword_counts;
  std::size_t multiplier = 0;
  std::size_t combinatorial_total = 0;
  std::size_t filtered_total = 0;
  std::string filtered_pattern;
  bool per_pair_agrees = false;
  bool pass = false;
};

struct RecountReport {
  std::vector<RecountRow> rows;
  std::vector<PatternCorrespondence> correspondence;
  bool pass = false;
};

namespace detail {

inline std::string pair_label(int p, int q, bool ordered) {
  return (ordered ? "(" : "{") + std::to_string(p) + "," + std::to_string(q) + (ordered ? ")" : "}");
}

inline constexpr std::array<std::pair<int, int>, 6> kUnorderedPairs{{{6, 7}, {6, 8}, {6, 9}, {7, 8}, {7, 9}, {8, 9}}};

}  // namespace detail

/// Recomputes the codeword-side counts from the code alone and checks them
/// against the filtered conics, pattern by pattern and pair by pair.
/// Throws VerificationError on any mismatch.
inline RecountReport verify_codeword_recount(const golay::GolayCode& code, const std::vector<ConicRecord>& conics) {
  using golay::bit;
  using golay::mask_of;
  const Mask sigma = golay::Frame::kFixedMask | golay::Frame::kCanonicalOctad;
  const Mask movable = golay::Frame::kMovable;
  RecountReport report;

  // Which codeword-condition row does each shape-31 pattern realize?
  struct Row12 {
    std::string label;
    Mask fixed;
    std::string condition;
  };
  const std::array<Row12, 2> rows12{{{"#1", mask_of({2, 3, 5}), "o∩Σ = {2,3,5,p,q}"},
                                     {"#2", mask_of({1, 4}), "o∩Σ = {1,4,p,q}"}}};
  std::map<Pattern, PatternCorrespondence> corr;
  for (Pattern p : {Pattern::p1, Pattern::p2}) {
    PatternCorrespondence c;
    c.pattern = p;
    bool first = true, consistent = true;
    for (const auto& r : conics) {
      if (r.pattern != p) continue;
      const Mask o = lower_sign_codeword(r);
      const Mask fixed = o & golay::Frame::kFixedMask;
      const Mask starred = bit(r.movable->first) | bit(r.movable->second);
      const Mask on_movable = o & movable;
      const std::string role = on_movable == starred ? "starred" : on_movable == (movable & ~starred) ? "unstarred" : "other";
      if (first) {
        c.fixed_part = fixed;
        c.pair_role = role;
        first = false;
      } else if (fixed != c.fixed_part || role != c.pair_role) {
        consistent = false;
      }
    }
    for (const auto& row : rows12)
      if (row.fixed == c.fixed_part) c.table_row = row.label;
    c.unique = !first && consistent && !c.table_row.empty() && c.pair_role != "other";
    corr[p] = c;
    report.correspondence.push_back(c);
  }

  bool all_ok = true;
  // Rows #1/#2: any-weight codewords, one conic per codeword, pair unordered.
  for (const auto& row : rows12) {
    RecountRow out;
    out.label = row.label;
    out.condition = row.condition + ", {p,q} ⊂ {6,7,8,9} unordered";
    out.underlined_expected = 16;
    out.multiplier = 1;
    std::optional<Pattern> realized;
    for (auto& [p, c] : corr)
      if (c.unique && c.table_row == row.label) realized = p;
    out.filtered_pattern = realized ? to_string(*realized) : "none";
    bool pairs_ok = realized.has_value();
    for (auto [p, q] : detail::kUnorderedPairs) {
      const Mask pattern = row.fixed | bit(p) | bit(q);
      const std::size_t n = golay::codewords_meeting(code, sigma, pattern).size();
      out.codeword_counts.emplace_back(detail::pair_label(p, q, false), n);
      out.combinatorial_total += n * out.multiplier;
      if (n != 16) pairs_ok = false;
      if (realized) {
        const auto filtered = std::count_if(conics.begin(), conics.end(), [&](const ConicRecord& r) {
          return r.pattern == *realized && (lower_sign_codeword(r) & sigma) == pattern;
        });
        if (static_cast<std::size_t>(filtered) != n * out.multiplier) pairs_ok = false;
      }
    }
    if (realized) out.filtered_total = count_patterns(conics)[*realized];
    out.per_pair_agrees = pairs_ok;
    out.pass = pairs_ok && out.combinatorial_total == 96 && out.filtered_total == out.combinatorial_total;
    all_ok = all_ok && out.pass;
    report.rows.push_back(std::move(out));
  }

  // Row #3: octads meeting Σ in {1,2}; 2⁵ sign choices each.
  {
    RecountRow out;
    out.label = "#3";
    out.condition = "octads o∩Σ = {1,2}";
    out.underlined_expected = 10;
    out.multiplier = 32;
    out.filtered_pattern = to_string(Pattern::p3);
    const auto octads = golay::codewords_meeting(code, sigma, mask_of({1, 2}), 8);
    out.codeword_counts.emplace_back("{}", octads.size());
    out.combinatorial_total = octads.size() * out.multiplier;
    bool ok = octads.size() == 10;
    for (Mask o : octads) {
      const auto filtered = std::count_if(conics.begin(), conics.end(),
                                          [&](const ConicRecord& r) { return r.pattern == Pattern::p3 && r.codeword == o; });
      if (static_cast<std::size_t>(filtered) != out.multiplier) ok = false;
    }
    out.filtered_total = count_patterns(conics)[Pattern::p3];
    out.per_pair_agrees = ok;
    out.pass = ok && out.combinatorial_total == 320 && out.filtered_total == out.combinatorial_total;
    all_ok = all_ok && out.pass;
    report.rows.push_back(std::move(out));
  }

  // Row #4: octads meeting Σ in {1,2,p,q}, ordered (p,q); 2³ sign choices.
  {
    RecountRow out;
    out.label = "#4";
    out.condition = "octads o∩Σ = {1,2,p,q}, (p,q) ordered";
    out.underlined_expected = 3;
    out.multiplier = 8;
    out.filtered_pattern = to_string(Pattern::p4);
    bool ok = true;
    for (int p = 6; p <= 9; ++p)
      for (int q = 6; q <= 9; ++q) {
        if (p == q) continue;
        const Mask pattern = mask_of({1, 2}) | bit(p) | bit(q);
        const std::size_t n = golay::codewords_meeting(code, sigma, pattern, 8).size();
        out.codeword_counts.emplace_back(detail::pair_label(p, q, true), n);
        out.combinatorial_total += n * out.multiplier;
        if (n != 3) ok = false;
        const auto filtered = std::count_if(conics.begin(), conics.end(), [&](const ConicRecord& r) {
          return r.pattern == Pattern::p4 && r.movable == std::pair{p, q};
        });
        if (static_cast<std::size_t>(filtered) != n * out.multiplier) ok = false;
      }
    out.filtered_total = count_patterns(conics)[Pattern::p4];
    out.per_pair_agrees = ok;
    out.pass = ok && out.combinatorial_total == 288 && out.filtered_total == out.combinatorial_total;
    all_ok = all_ok && out.pass;
    report.rows.push_back(std::move(out));
  }

  report.pass = all_ok;
  if (!all_ok) throw VerificationError("verify_codeword_recount: combinatorial and filtered conic counts disagree");
  return report;
}

/// Pairwise true products lᵢ·lⱼ of the conics.
struct IntersectionGraph {
  std::size_t size = 0;
  std::vector<std::int8_t> products;         ///< size × size, true values
  std::map<int, std::size_t> histogram;      ///< over unordered pairs i < j
  int max_off_diagonal = -5;

  int operator()(std::size_t i, std::size_t j) const { return products[i * size + j]; }
  bool disjoint(std::size_t i, std::size_t j) const { return i != j && (*this)(i, j) == 2; }
};

/// Throws VerificationError if some pair has lᵢ·lⱼ > 2, i.e. a negative
/// intersection cᵢ·cⱼ = 2 − lᵢ·lⱼ between distinct conic classes.
inline IntersectionGraph intersection_graph(const std::vector<ConicRecord>& conics, unsigned threads = 1) {
  IntersectionGraph g;
  const std::size_t n = conics.size();
  g.size = n;
  g.products.assign(n * n, 0);
  constexpr std::size_t kShards = 32;
  parallel_shards(kShards, threads, [&](std::size_t s) {
    for (std::size_t i = s; i < n; i += kShards)
      for (std::size_t j = 0; j < n; ++j) {
        const auto ip = leech::inner(conics[i].l, conics[j].l);
        if (!ip.integral()) throw VerificationError("intersection_graph: non-integral product");
        g.products[i * n + j] = static_cast<std::int8_t>(ip.true_integer());
      }
  });
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const int v = g(i, j);
      ++g.histogram[v];
      g.max_off_diagonal = std::max(g.max_off_diagonal, v);
    }
  if (n > 1 && g.max_off_diagonal > 2)
    throw VerificationError("intersection_graph: pair with l_i·l_j > 2 (negative intersection of distinct conics)");
  return g;
}

namespace detail {

/// Bitset over graph vertices.
class VertexSet {
 public:
  explicit VertexSet(std::size_t n = 0) : words_((n + 63) / 64, 0) {}
  void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1u; }
  std::size_t count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
  }
  VertexSet operator&(const VertexSet& o) const {
    VertexSet r = *this;
    for (std::size_t k = 0; k < words_.size(); ++k) r.words_[k] &= o.words_[k];
    return r;
  }
  /// Clears all indices <= i.
  void clear_through(std::size_t i) {
    for (std::size_t k = 0; k < i / 64; ++k) words_[k] = 0;
    const std::size_t b = i % 64;
    words_[i / 64] &= b == 63 ? 0 : ~((std::uint64_t{2} << b) - 1);
  }
  template <class Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t k = 0; k < words_.size(); ++k) {
      std::uint64_t w = words_[k];
      while (w) {
        const auto b = static_cast<std::size_t>(std::countr_zero(w));
        if (!fn(k * 64 + b)) return;
        w &= w - 1;
      }
    }
  }

 private:
  std::vector<std::uint64_t> words_;
};

inline std::vector<VertexSet> disjointness_sets(const IntersectionGraph& g) {
  std::vector<VertexSet> adj(g.size, VertexSet(g.size));
  for (std::size_t i = 0; i < g.size; ++i)
    for (std::size_t j = 0; j < g.size; ++j)
      if (g.disjoint(i, j)) adj[i].set(j);
  return adj;
}

// Greedy colouring bound: a clique inside `p` has at most as many vertices
// as the number of colour classes.
inline std::size_t colour_bound(const VertexSet& p, const std::vector<VertexSet>& adj) {
  std::vector<std::size_t> verts;
  p.for_each([&](std::size_t v) {
    verts.push_back(v);
    return true;
  });
  std::vector<std::vector<std::size_t>> classes;
  for (std::size_t v : verts) {
    bool placed = false;
    for (auto& cls : classes) {
      bool independent = std::none_of(cls.begin(), cls.end(), [&](std::size_t u) { return adj[v].test(u); });
      if (independent) {
        cls.push_back(v);
        placed = true;
        break;
      }
    }
    if (!placed) classes.push_back({v});
  }
  return classes.size();
}

}  // namespace detail

struct CliqueResult {
  std::vector<std::size_t> vertices;  ///< indices into the conic list, ascending
  std::size_t extension_candidates = 0;  ///< conics adjacent to every clique member
  bool found() const { return !vertices.empty(); }
};

/// Lexicographically least clique of the given size in the disjointness
/// graph (edges lᵢ·lⱼ = 2), by depth-first search in vertex order with a
/// colouring bound. Throws VerificationError if none exists.
inline CliqueResult find_disjoint_clique(const IntersectionGraph& g, std::size_t size = 16) {
  const auto adj = detail::disjointness_sets(g);
  std::vector<std::size_t> clique;
  std::function<bool(const detail::VertexSet&)> extend = [&](const detail::VertexSet& cand) -> bool {
    if (clique.size() == size) return true;
    if (clique.size() + cand.count() < size) return false;
    if (clique.size() + detail::colour_bound(cand, adj) < size) return false;
    bool done = false;
    cand.for_each([&](std::size_t v) {
      clique.push_back(v);
      detail::VertexSet next = cand & adj[v];
      next.clear_through(v);
      if (extend(next)) {
        done = true;
        return false;
      }
      clique.pop_back();
      return true;
    });
    return done;
  };
  detail::VertexSet all(g.size);
  for (std::size_t i = 0; i < g.size; ++i) all.set(i);
  if (!extend(all)) throw VerificationError("find_disjoint_clique: no clique of the requested size exists");

  CliqueResult r;
  r.vertices = clique;
  for (std::size_t v = 0; v < g.size; ++v) {
    if (std::find(clique.begin(), clique.end(), v) != clique.end()) continue;
    if (std::all_of(clique.begin(), clique.end(), [&](std::size_t u) { return g.disjoint(u, v); }))
      ++r.extension_candidates;
  }
  return r;
}

struct CliqueCount {
  std::size_t count = 0;
  bool completed = false;
};

/// Counts all cliques of the given size, stopping after `budget`.
inline CliqueCount count_disjoint_cliques(const IntersectionGraph& g, std::size_t size,
                                          std::chrono::milliseconds budget) {
  const auto adj = detail::disjointness_sets(g);
  const auto deadline = std::chrono::steady_clock::now() + budget;
  CliqueCount result;
  bool timed_out = false;
  std::size_t depth = 0, ticks = 0;
  std::function<void(const detail::VertexSet&)> extend = [&](const detail::VertexSet& cand) {
    if (timed_out) return;
    if (++ticks % 4096 == 0 && std::chrono::steady_clock::now() > deadline) {
      timed_out = true;
      return;
    }
    if (depth == size) {
      ++result.count;
      return;
    }
    if (depth + cand.count() < size) return;
    if (depth + detail::colour_bound(cand, adj) < size) return;
    cand.for_each([&](std::size_t v) {
      detail::VertexSet next = cand & adj[v];
      next.clear_through(v);
      ++depth;
      extend(next);
      --depth;
      return !timed_out;
    });
  };
  detail::VertexSet all(g.size);
  for (std::size_t i = 0; i < g.size; ++i) all.set(i);
  extend(all);
  result.completed = !timed_out;
  return result;
}

/// One line per conic: 24 coordinates, pattern tag, movable pair, codeword mask.
inline void export_conics(std::ostream& os, const std::vector<ConicRecord>& conics) {
  for (const auto& r : conics) {
    for (std::size_t i = 0; i < leech::kDim; ++i) os << static_cast<int>(r.l.coords[i]) << ' ';
    os << to_string(r.pattern) << ' ';
    if (r.movable)
      os << r.movable->first << ',' << r.movable->second;
    else
      os << '-';
    os << ' ' << r.codeword << '\n';
  }
}

}  // namespace k3conics::census
