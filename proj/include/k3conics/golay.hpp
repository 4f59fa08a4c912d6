#pragma once

#include "k3conics/errors.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace k3conics::golay {

/// A subset of Ω = {1,...,24}; position p is bit p-1.
using Mask = std::uint32_t;

inline constexpr int kLength = 24;
inline constexpr Mask kOmega = (Mask{1} << kLength) - 1;
inline constexpr std::size_t kCodeSize = 4096;

constexpr Mask bit(int position) { return Mask{1} << (position - 1); }

constexpr Mask mask_of(std::initializer_list<int> positions) {
  Mask m = 0;
  for (int p : positions) m |= bit(p);
  return m;
}

constexpr int weight(Mask m) { return std::popcount(m); }

inline std::vector<int> positions_of(Mask m) {
  std::vector<int> out;
  for (int p = 1; p <= kLength; ++p)
    if (m & bit(p)) out.push_back(p);
  return out;
}

/// 24-character 0/1 string, character i for position i+1.
inline std::string to_bitstring(Mask m) {
  std::string s(kLength, '0');
  for (int p = 1; p <= kLength; ++p)
    if (m & bit(p)) s[p - 1] = '1';
  return s;
}

/// Image of each position under a permutation: perm[p] for p in 1..24 (perm[0] unused).
using Permutation = std::array<int, kLength + 1>;

inline Mask apply(const Permutation& perm, Mask m) {
  Mask out = 0;
  for (int p = 1; p <= kLength; ++p)
    if (m & bit(p)) out |= bit(perm[p]);
  return out;
}

/// Generator rows: the 12 cyclic shifts of the generator polynomial
/// g(x) = 1 + x² + x⁴ + x⁵ + x⁶ + x¹⁰ + x¹¹ of the binary quadratic-residue
/// code of length 23, each extended by an overall parity bit (position 24).
inline std::array<Mask, 12> quadratic_residue_generator() {
  constexpr Mask g = (1u << 0) | (1u << 2) | (1u << 4) | (1u << 5) | (1u << 6) | (1u << 10) | (1u << 11);
  std::array<Mask, 12> rows{};
  for (int i = 0; i < 12; ++i) {
    Mask r = g << i;
    if (std::popcount(r) % 2) r |= bit(24);
    rows[static_cast<std::size_t>(i)] = r;
  }
  return rows;
}

/// Counts of codewords of weight 0, 8, 12, 16, 24.
struct WeightDistribution {
  std::size_t w0 = 0, w8 = 0, w12 = 0, w16 = 0, w24 = 0, other = 0;
  bool operator==(const WeightDistribution&) const = default;
};

/// The extended binary Golay code as a sorted list of 4096 masks.
class GolayCode {
 public:
  /// Expands the 2¹² combinations of the generator rows and self-checks.
  static GolayCode build() { return GolayCode(quadratic_residue_generator()); }

  explicit GolayCode(const std::array<Mask, 12>& basis) : basis_(basis) {
    words_.reserve(kCodeSize);
    for (std::uint32_t c = 0; c < kCodeSize; ++c) {
      Mask w = 0;
      for (int i = 0; i < 12; ++i)
        if (c & (1u << i)) w ^= basis_[static_cast<std::size_t>(i)];
      words_.push_back(w);
    }
    std::sort(words_.begin(), words_.end());
    validate();
  }

  const std::vector<Mask>& words() const { return words_; }
  const std::array<Mask, 12>& basis() const { return basis_; }

  bool contains(Mask s) const { return std::binary_search(words_.begin(), words_.end(), s); }

  std::vector<Mask> words_of_weight(int w) const {
    std::vector<Mask> out;
    for (Mask m : words_)
      if (weight(m) == w) out.push_back(m);
    return out;
  }
  std::vector<Mask> octads() const { return words_of_weight(8); }

  WeightDistribution weight_distribution() const {
    WeightDistribution d;
    for (Mask m : words_) switch (weight(m)) {
        case 0: ++d.w0; break;
        case 8: ++d.w8; break;
        case 12: ++d.w12; break;
        case 16: ++d.w16; break;
        case 24: ++d.w24; break;
        default: ++d.other;
      }
    return d;
  }

  /// Relabels coordinates; the result is the same code up to permutation.
  GolayCode permuted(const Permutation& perm) const {
    std::array<Mask, 12> b{};
    for (std::size_t i = 0; i < 12; ++i) b[i] = apply(perm, basis_[i]);
    return GolayCode(b);
  }

 private:
  void validate() const {
    if (words_.size() != kCodeSize || std::adjacent_find(words_.begin(), words_.end()) != words_.end())
      throw ConstructionError("Golay code: generator rows are not independent");
    if (weight_distribution() != WeightDistribution{1, 759, 2576, 759, 1, 0})
      throw ConstructionError("Golay code: weight distribution is not (1, 759, 2576, 759, 1)");
    for (std::size_t i = 0; i < 12; ++i)
      for (std::size_t j = 0; j < 12; ++j)
        if (!contains(basis_[i] ^ basis_[j])) throw ConstructionError("Golay code: not closed under symmetric difference");
  }

  std::array<Mask, 12> basis_;
  std::vector<Mask> words_;
};

/// Codewords o with o ∩ window == pattern (optionally of one weight), sorted by mask.
inline std::vector<Mask> codewords_meeting(const GolayCode& code, Mask window, Mask pattern,
                                           std::optional<int> weight_filter = std::nullopt) {
  if ((pattern & ~window) != 0) throw std::invalid_argument("codewords_meeting: pattern is not inside window");
  std::vector<Mask> out;
  for (Mask m : code.words())
    if ((m & window) == pattern && (!weight_filter || weight(m) == *weight_filter)) out.push_back(m);
  return out;
}

/// Every 5-subset of Ω lies in exactly one of the given octads.
inline bool steiner_check(std::span<const Mask> octads) {
  std::vector<std::uint8_t> cover(std::size_t{1} << kLength, 0);
  for (Mask o : octads) {
    if (weight(o) != 8) return false;
    // All 56 five-subsets of the octad.
    const auto pos = positions_of(o);
    for (int a = 0; a < 8; ++a)
      for (int b = a + 1; b < 8; ++b)
        for (int c = b + 1; c < 8; ++c)
          for (int d = c + 1; d < 8; ++d)
            for (int e = d + 1; e < 8; ++e) {
              auto& n = cover[bit(pos[a]) | bit(pos[b]) | bit(pos[c]) | bit(pos[d]) | bit(pos[e])];
              if (n < 255) ++n;
            }
  }
  // Walk all C(24,5) = 42504 quintuples.
  std::size_t quintuples = 0;
  for (int a = 1; a <= kLength; ++a)
    for (int b = a + 1; b <= kLength; ++b)
      for (int c = b + 1; c <= kLength; ++c)
        for (int d = c + 1; d <= kLength; ++d)
          for (int e = d + 1; e <= kLength; ++e) {
            ++quintuples;
            if (cover[bit(a) | bit(b) | bit(c) | bit(d) | bit(e)] != 1) return false;
          }
  return quintuples == 42504;
}

inline bool steiner_check(const GolayCode& code) {
  const auto o = code.octads();
  return steiner_check(std::span<const Mask>(o));
}

/// The fixed quintuple φ = (1,...,5), the frame octad κ and Σ = φ ∪ κ.
struct Frame {
  std::array<int, 5> fixed{1, 2, 3, 4, 5};
  Mask octad = 0;
  Mask full = 0;

  static constexpr Mask kFixedMask = mask_of({1, 2, 3, 4, 5});
  static constexpr Mask kFixedInOctad = mask_of({1, 2, 4, 5});
  static constexpr Mask kCanonicalOctad = mask_of({1, 2, 4, 5, 6, 7, 8, 9});
  static constexpr Mask kMovable = mask_of({6, 7, 8, 9});
  bool operator==(const Frame&) const = default;
};

struct NormalizedCode {
  GolayCode code;
  Frame frame;
  Permutation permutation;          ///< applied to the input code's coordinates
  std::vector<Mask> candidates;     ///< octads o with o ∩ φ = {1,2,4,5}, sorted
};

namespace detail {

// Applies the given (source, target) pairs; all other sources go to the
// unused targets in increasing order.
inline Permutation relabel(const std::vector<std::pair<int, int>>& fixed_images) {
  Permutation perm{};
  Mask used_src = 0, used_dst = 0;
  for (auto [src, dst] : fixed_images) {
    perm[static_cast<std::size_t>(src)] = dst;
    used_src |= bit(src);
    used_dst |= bit(dst);
  }
  int next = 1;
  for (int p = 1; p <= kLength; ++p) {
    if (used_src & bit(p)) continue;
    while (used_dst & bit(next)) ++next;
    perm[static_cast<std::size_t>(p)] = next++;
  }
  return perm;
}

inline std::vector<Mask> frame_candidates(const GolayCode& code) {
  return codewords_meeting(code, Frame::kFixedMask, Frame::kFixedInOctad, 8);
}

}  // namespace detail

/// Relabels Ω so that φ = (1,...,5) and the frame octad is {1,2,4,5,6,7,8,9}.
///
/// Canonical choice: the least octad o (by mask) with elements e1 < ... < e8
/// is sent e1,e2,e3,e4 -> 1,2,4,5 and e5..e8 -> 6..9, the least non-element
/// goes to 3, and the other 15 positions to 10..24 in increasing order.
/// With `octad_choice` = i, the i-th candidate octad (by mask) of that
/// canonical frame then becomes κ, keeping 1..5 fixed pointwise.
inline NormalizedCode normalize_frame(const GolayCode& code, std::optional<int> octad_choice = std::nullopt) {
  const auto octads = code.octads();
  if (octads.empty()) throw ConstructionError("normalize_frame: code has no octads");
  const auto e = positions_of(octads.front());
  int outside = 1;
  while (octads.front() & bit(outside)) ++outside;
  Permutation perm = detail::relabel({{e[0], 1}, {e[1], 2}, {outside, 3}, {e[2], 4}, {e[3], 5},
                                      {e[4], 6}, {e[5], 7}, {e[6], 8}, {e[7], 9}});
  GolayCode canonical = code.permuted(perm);
  auto candidates = detail::frame_candidates(canonical);
  if (candidates.size() != 4)
    throw ConstructionError("normalize_frame: expected 4 octads meeting φ in {1,2,4,5}, found " +
                            std::to_string(candidates.size()));

  if (octad_choice) {
    if (*octad_choice < 0 || *octad_choice >= 4) throw std::invalid_argument("octad choice must be in 0..3");
    const Mask kappa = candidates[static_cast<std::size_t>(*octad_choice)];
    std::vector<std::pair<int, int>> images = {{1, 1}, {2, 2}, {3, 3}, {4, 4}, {5, 5}};
    int target = 6;
    for (int p : positions_of(kappa & ~Frame::kFixedMask)) images.emplace_back(p, target++);
    Permutation second = detail::relabel(images);
    Permutation composed{};
    for (int p = 1; p <= kLength; ++p) composed[static_cast<std::size_t>(p)] = second[static_cast<std::size_t>(perm[static_cast<std::size_t>(p)])];
    perm = composed;
    canonical = code.permuted(perm);
    candidates = detail::frame_candidates(canonical);
  }
  if (!canonical.contains(Frame::kCanonicalOctad))
    throw ConstructionError("normalize_frame: frame octad missing after relabeling");
  Frame frame;
  frame.octad = Frame::kCanonicalOctad;
  frame.full = Frame::kFixedMask | frame.octad;
  return {std::move(canonical), frame, perm, std::move(candidates)};
}

/// One 24-character 0/1 line per codeword, in lexicographic string order.
inline void export_codewords(std::ostream& os, const GolayCode& code) {
  std::vector<std::string> lines;
  lines.reserve(code.words().size());
  for (Mask m : code.words()) lines.push_back(to_bitstring(m));
  std::sort(lines.begin(), lines.end());
  for (const auto& l : lines) os << l << '\n';
}

inline void export_generator(std::ostream& os, const GolayCode& code) {
  for (Mask m : code.basis()) os << to_bitstring(m) << '\n';
}

}  // namespace k3conics::golay
