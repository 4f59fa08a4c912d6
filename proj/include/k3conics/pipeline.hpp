#pragma once

#include "k3conics/census.hpp"
#include "k3conics/golay.hpp"
#include "k3conics/lattice/short_vectors.hpp"
#include "k3conics/leech.hpp"
#include "k3conics/ns_builder.hpp"
#include "k3conics/parallel.hpp"
#include "k3conics/report.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace k3conics {

enum class CliqueMode { first, all };

struct Options {
  unsigned threads = default_thread_count();
  std::optional<int> octad_choice;  ///< nullopt: canonical (least octad) frame
  bool steiner = true;
  bool heavy = true;
  bool frame_invariance = true;
  CliqueMode clique = CliqueMode::first;
  std::chrono::milliseconds clique_budget{30000};
  std::size_t pair_samples = 1000;

  report::Json to_json() const {
    report::Json j;
    j["octad_choice"] = octad_choice ? report::Json(*octad_choice) : report::Json("lex");
    j["steiner"] = steiner;
    j["heavy"] = heavy;
    j["frame_invariance"] = frame_invariance;
    j["clique"] = clique == CliqueMode::first ? "first" : "all";
    j["pair_samples"] = pair_samples;
    return j;
  }
};

namespace detail {

inline report::Json to_json(const Rational& x) {
  if (is_integral(x) && x.get_num().fits_slong_p()) return x.get_num().get_si();
  return x.get_str();
}

inline report::Json to_json(const Integer& x) {
  if (x.fits_slong_p()) return x.get_si();
  return x.get_str();
}

template <class T>
report::Json to_json(const Matrix<T>& m) {
  report::Json rows = report::Json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    report::Json row = report::Json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline report::Json to_json(const leech::Coords& c) {
  report::Json a = report::Json::array();
  for (auto x : c) a.push_back(static_cast<int>(x));
  return a;
}

inline report::Json to_json(const census::PatternCounts& c) {
  return {c.by_pattern[0], c.by_pattern[1], c.by_pattern[2], c.by_pattern[3]};
}

}  // namespace detail

/// Runs the construction stage by stage, caching intermediate objects.
class Pipeline {
 public:
  explicit Pipeline(Options options = {}) : options_(std::move(options)) {}

  const Options& options() const { return options_; }

  const golay::GolayCode& base_code() {
    if (!base_) base_ = golay::GolayCode::build();
    return *base_;
  }
  const golay::NormalizedCode& normalized() {
    if (!normalized_) normalized_ = golay::normalize_frame(base_code(), options_.octad_choice);
    return *normalized_;
  }
  const census::Generators& generators() const { return generators_; }
  const std::vector<census::ConicRecord>& conics() {
    if (!conics_) conics_ = census::find_conics(normalized().code, generators_, options_.threads);
    return *conics_;
  }
  const census::IntersectionGraph& graph() {
    if (!graph_) graph_ = census::intersection_graph(conics(), options_.threads);
    return *graph_;
  }
  const leech::LeechBasis& leech_basis() {
    if (!leech_basis_) leech_basis_ = leech::leech_basis(leech::enumerate_shape31(normalized().code));
    return *leech_basis_;
  }
  const lattice::Lattice& s_lattice() {
    if (!s_) s_ = ns::build_S(generators_, leech_basis().lattice);
    return *s_;
  }
  const ns::PolarizedLattice& n_lattice() {
    if (!n_) n_ = ns::build_N(s_lattice(), generators_, conics());
    return *n_;
  }

  report::Section golay_section();
  report::Section leech_section();
  report::Section conics_section();
  report::Section ns_section();

  /// All four stages in order.
  report::VerificationReport verify_all() {
    report::Stopwatch total;
    report::VerificationReport r;
    r.config = options_.to_json();
    r.runtime.threads = options_.threads;
    r.sections.push_back(timed(&Pipeline::golay_section));
    r.sections.push_back(timed(&Pipeline::leech_section));
    r.sections.push_back(timed(&Pipeline::conics_section));
    r.sections.push_back(timed(&Pipeline::ns_section));
    r.runtime.total_seconds = total.seconds();
    return r;
  }

  /// One stage wrapped as a report.
  report::VerificationReport single(report::Section (Pipeline::*stage)()) {
    report::Stopwatch total;
    report::VerificationReport r;
    r.config = options_.to_json();
    r.runtime.threads = options_.threads;
    r.sections.push_back(timed(stage));
    r.runtime.total_seconds = total.seconds();
    return r;
  }

 private:
  report::Section timed(report::Section (Pipeline::*stage)()) {
    report::Stopwatch w;
    report::Section s = (this->*stage)();
    s.elapsed_seconds = w.seconds();
    return s;
  }

  Options options_;
  census::Generators generators_;
  std::optional<golay::GolayCode> base_;
  std::optional<golay::NormalizedCode> normalized_;
  std::optional<std::vector<census::ConicRecord>> conics_;
  std::optional<census::IntersectionGraph> graph_;
  std::optional<leech::LeechBasis> leech_basis_;
  std::optional<lattice::Lattice> s_;
  std::optional<ns::PolarizedLattice> n_;
};

inline report::Section Pipeline::golay_section() {
  using namespace report::source;
  report::Section s;
  s.name = "golay";
  const auto& code = base_code();
  s.expect_equal("codeword count", golay::kCodeSize, code.words().size(), kPublished);
  const auto wd = code.weight_distribution();
  s.expect_equal("weight distribution (0,8,12,16,24)", std::vector<std::size_t>{1, 759, 2576, 759, 1},
                 std::vector<std::size_t>{wd.w0, wd.w8, wd.w12, wd.w16, wd.w24}, kPublished);
  s.expect_equal("codewords of other weights", 0, wd.other, kPublished);
  const bool closed = code.contains(golay::kOmega) &&
                      std::all_of(code.words().begin(), code.words().end(),
                                  [&](golay::Mask m) { return code.contains(golay::kOmega & ~m); });
  s.expect_true("closed under complement", closed, kDerived);
  if (options_.steiner) s.expect_true("Steiner system S(5,8,24) on all 42504 quintuples", golay::steiner_check(code), kDerived);

  const auto& n = normalized();
  s.expect_equal("octads meeting {1..5} in {1,2,4,5}", 4, n.candidates.size(), kPublished);
  s.expect_true("frame octad {1,2,4,5,6,7,8,9} is a codeword", n.code.contains(golay::Frame::kCanonicalOctad),
                kDerived);
  if (!options_.octad_choice) {
    const auto again = golay::normalize_frame(n.code);
    s.expect_true("frame normalization is idempotent", again.code.words() == n.code.words(), kProperty);
  }
  report::Json cands = report::Json::array();
  for (auto m : n.candidates) cands.push_back(golay::to_bitstring(m));
  s.details["frame_candidates"] = std::move(cands);
  s.details["permutation"] = std::vector<int>(n.permutation.begin() + 1, n.permutation.end());
  return s;
}

inline report::Section Pipeline::leech_section() {
  using namespace report::source;
  report::Section s;
  s.name = "leech";
  const auto& code = normalized().code;
  auto all = leech::all_minimal_vectors(code);
  std::size_t c31 = 0, c20 = 0, c40 = 0, bad_norm = 0;
  for (const auto& v : all) {
    switch (v.shape) {
      case leech::Shape::s31: ++c31; break;
      case leech::Shape::s20: ++c20; break;
      case leech::Shape::s40: ++c40; break;
    }
    if (leech::inner(v, v).raw != leech::kMinimalRawNorm) ++bad_norm;
  }
  s.expect_equal("shape counts (31, 20, 40)",
                 std::vector<std::size_t>{leech::kShape31Count, leech::kShape20Count, leech::kShape40Count},
                 std::vector<std::size_t>{c31, c20, c40}, kPublished);
  s.expect_equal("minimal vectors", leech::kMinimalCount, all.size(), kPublished);
  s.expect_equal("vectors with norm != 4", 0, bad_norm, kPublished);
  std::vector<leech::Coords> sorted;
  sorted.reserve(all.size());
  for (const auto& v : all) sorted.push_back(v.coords);
  std::sort(sorted.begin(), sorted.end());
  const auto dups = static_cast<std::size_t>(sorted.size() -
                                             static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin()));
  s.expect_equal("duplicate vectors", 0, dups, kDerived);
  std::size_t missing_negatives = 0;
  for (const auto& v : all) {
    leech::Coords neg;
    for (std::size_t i = 0; i < leech::kDim; ++i) neg[i] = static_cast<std::int8_t>(-v.coords[i]);
    if (!std::binary_search(sorted.begin(), sorted.end(), neg)) ++missing_negatives;
  }
  s.expect_equal("vectors whose negative is missing", 0, missing_negatives, kDerived);

  const auto& basis = leech_basis();
  const RatMatrix gram = basis.lattice.gram();
  s.expect_equal("basis Gram determinant", 1, detail::to_json(determinant(gram)), kPublished);
  bool even = is_integral(gram);
  for (std::size_t i = 0; even && i < gram.rows(); ++i) even = mpz_even_p(gram(i, i).get_num_mpz_t()) != 0;
  s.expect_true("basis Gram is even and integral", even, kPublished);
  if (options_.heavy) {
    s.expect_equal("Fincke-Pohst vectors of norm 4", leech::kMinimalCount,
                   lattice::count_short_vectors(gram, 4), kDerived);
    s.expect_equal("Fincke-Pohst vectors of norm 2", 0, lattice::count_short_vectors(gram, 2), kDerived);
  }
  return s;
}

inline report::Section Pipeline::conics_section() {
  using namespace report::source;
  report::Section s;
  s.name = "conics";
  const RatMatrix gram = generators_.gram();
  s.expect_equal("generator Gram matrix", detail::to_json(census::Generators::expected_gram()), detail::to_json(gram),
                 kPublished);
  s.expect_equal("generator Gram determinant", 160, detail::to_json(determinant(gram)), kDerived);

  const auto& cs = conics();
  const auto counts = census::count_patterns(cs);
  s.expect_equal("conic count", census::kConicCount, cs.size(), kPublished);
  s.expect_equal("pattern split (#1, #2, #3, #4)", std::vector<std::size_t>{96, 96, 320, 288},
                 detail::to_json(counts), kPublished);

  const auto recount = census::verify_codeword_recount(normalized().code, cs);
  report::Json rows = report::Json::array();
  for (const auto& row : recount.rows) {
    s.expect_equal("codeword recount row " + row.label + " total", row.filtered_total, row.combinatorial_total,
                   kPublished);
    s.expect_true("codeword recount row " + row.label + " agrees per pair", row.per_pair_agrees, kDerived);
    report::Json per = report::Json::object();
    for (const auto& [pair, n] : row.codeword_counts) per[pair] = n;
    rows.push_back({{"row", row.label},
                    {"condition", row.condition},
                    {"factor", row.underlined_expected},
                    {"multiplier", row.multiplier},
                    {"codewords", per},
                    {"combinatorial_total", row.combinatorial_total},
                    {"filtered_pattern", row.filtered_pattern},
                    {"filtered_total", row.filtered_total}});
  }
  s.details["codeword_recount"] = std::move(rows);
  report::Json corr = report::Json::array();
  for (const auto& c : recount.correspondence) {
    s.expect_true("pattern " + census::to_string(c.pattern) + " maps to a single codeword row", c.unique, kDerived);
    corr.push_back({{"pattern", census::to_string(c.pattern)},
                    {"upper_sign_set_on_fixed", golay::positions_of(c.fixed_part)},
                    {"pair", c.pair_role},
                    {"row", c.table_row}});
  }
  s.details["pattern_to_row"] = std::move(corr);

  if (options_.frame_invariance) {
    report::Json per_choice = report::Json::array();
    bool same = true;
    for (int choice = 0; choice < 4; ++choice) {
      const auto framed = golay::normalize_frame(base_code(), choice);
      const auto other = census::find_conics(framed.code, generators_, options_.threads);
      const auto oc = census::count_patterns(other);
      same = same && oc == counts && other.size() == cs.size();
      per_choice.push_back(detail::to_json(oc));
    }
    s.expect_true("same totals and split for all 4 frame octads", same, kProperty);
    s.details["split_per_octad_choice"] = std::move(per_choice);
  }

  const auto& g = graph();
  report::Json hist = report::Json::object();
  for (const auto& [v, n] : g.histogram) hist[std::to_string(v)] = n;
  s.details["product_histogram"] = std::move(hist);
  s.expect_true("no pair of distinct conics with l_i.l_j > 2", g.max_off_diagonal <= 2, kDerived);

  const auto clique = census::find_disjoint_clique(g, 16);
  std::size_t disjoint_pairs = 0;
  for (std::size_t a = 0; a < clique.vertices.size(); ++a)
    for (std::size_t b = a + 1; b < clique.vertices.size(); ++b) {
      const auto& x = cs[clique.vertices[a]].l;
      const auto& y = cs[clique.vertices[b]].l;
      if (leech::inner(x, y).raw == 2 * leech::kFormScale) ++disjoint_pairs;
    }
  s.expect_equal("16 pairwise disjoint conics", 16, clique.vertices.size(), kPublished);
  s.expect_equal("pairs with l_i.l_j = 2 in the clique", 120, disjoint_pairs, kDerived);
  report::Json members = report::Json::array();
  for (auto v : clique.vertices) members.push_back({{"index", v}, {"l", detail::to_json(cs[v].l.coords)}});
  s.details["disjoint_clique"] = std::move(members);
  s.details["clique_extension_candidates"] = clique.extension_candidates;
  if (options_.clique == CliqueMode::all) {
    const auto count = census::count_disjoint_cliques(g, 16, options_.clique_budget);
    s.details["clique_count"] = {{"completed", count.completed},
                                 {"count", count.completed ? report::Json(count.count) : report::Json(nullptr)}};
  }
  return s;
}

inline report::Section Pipeline::ns_section() {
  using namespace report::source;
  report::Section s;
  s.name = "ns";
  const auto& cs = conics();
  const auto v_tilde = ns::build_V(generators_);
  s.expect_equal("det Gram V~", 160, detail::to_json(determinant(v_tilde.gram())), kDerived);

  const auto& sl = s_lattice();
  s.expect_equal("rank S", 20, sl.rank(), kPublished);
  s.expect_true("hbar in S", sl.contains(leech::to_rational(generators_.hbar)), kPublished);
  const auto in_s = static_cast<std::size_t>(std::count_if(cs.begin(), cs.end(), [&](const census::ConicRecord& r) {
    return sl.contains(leech::to_rational(r.l.coords));
  }));
  s.expect_equal("conics in S", cs.size(), in_s, kPublished);
  s.expect_true("x.hbar even for all x in S", ns::check_hbar_parity(sl, generators_.hbar), kPublished);
  {
    // Swap one basis vector of S for a minimal vector pairing oddly with ħ.
    std::optional<leech::LeechVector> odd;
    leech::for_each_shape31(normalized().code, [&](const leech::LeechVector& v) {
      if (!odd && leech::inner(v.coords, generators_.hbar).raw == leech::kFormScale) odd = v;
    });
    IntMatrix corrupted = sl.basis();
    for (std::size_t j = 0; j < leech::kDim; ++j) corrupted(0, j) = odd->coords[j];
    const lattice::Lattice bad(corrupted, sl.ambient_form());
    s.expect_equal("corrupted S fails the hbar parity check", false, ns::check_hbar_parity(bad, generators_.hbar),
                   kControl);
  }
  s.expect_true("S is root free", ns::root_free(sl), kPublished);

  const auto& n = n_lattice();
  s.expect_equal("rank hbar-perp in S", 19, n.complement.rank(), kPublished);
  s.expect_equal("|det(-K + Zh)|", 640, detail::to_json(n.sum_determinant), kDerived);
  s.expect_equal("index of the extension", 2, detail::to_json(Rational(1) / abs(determinant(n.basis_in_sum))),
                 kPublished);
  s.expect_equal("rank N", 20, n.gram.rows(), kPublished);
  s.expect_equal("|det N|", 160, detail::to_json(n.determinant), kDerived);
  const auto sig = lattice::signature(n.gram);
  s.expect_equal("signature of N", std::vector<std::size_t>{1, 19},
                 std::vector<std::size_t>{sig.positive, sig.negative}, kPublished);
  s.expect_equal("h.h", 4, detail::to_json(n.inner(n.h, n.h)), kPublished);
  s.expect_true("h.x even for all x in N", ns::check_h_parity(n), kPublished);
  const auto classes = ns::check_conic_classes(n);
  s.expect_equal("conic classes in N", cs.size(), classes.count, kPublished);
  s.expect_equal("conic classes with c.c = -2", cs.size(), classes.self_norm_ok, kPublished);
  s.expect_equal("conic classes with c.h = 2", cs.size(), classes.degree_ok, kPublished);
  const std::size_t other_glue = cs.size() / 2;
  const auto rebuilt = ns::build_N(sl, generators_, cs, other_glue);
  s.expect_true("extension independent of the glue conic", ns::same_extension(n, rebuilt), kPublished);
  const auto pairs = ns::check_pair_products(n, graph(), options_.pair_samples);
  s.expect_equal("sampled pairs with c_i.c_j = 2 - l_i.l_j", pairs.sampled, pairs.agreeing, kDerived);

  const auto disc = ns::verify_discriminants(v_tilde, n, leech_basis().lattice);
  s.expect_equal("|discr V~|", 160, disc.v_tilde_order, kPublished);
  s.expect_equal("|discr N|", 160, disc.n_order, kPublished);
  report::Json witnesses = report::Json::array();
  for (const auto& c : disc.checks) {
    s.expect_true(c.name, c.pass(), c.name.rfind("discr(V~ perp", 0) == 0 ? kDerived : kPublished);
    witnesses.push_back({{"name", c.name}, {"generator_images", c.witness ? report::Json(*c.witness) : report::Json()}});
  }
  s.details["isomorphism_witnesses"] = std::move(witnesses);

  const auto bad = ns::bad_vector_scan(n);
  s.expect_equal("exceptional divisors (e.e = -2, e.h = 0)", 0, bad.exceptional.size(), kPublished);
  s.expect_equal("2-isotropic vectors (e.e = 0, e.h = 2)", 0, bad.isotropic.size(), kPublished);
  const auto planted = ns::bad_vector_scan(RatMatrix{{4, 0}, {0, -2}}, IntVector{1, 0});
  s.expect_true("planted exceptional divisor is found in diag(4,-2)", !planted.exceptional.empty(), kControl);
  const auto planted_iso = ns::bad_vector_scan(RatMatrix{{4, 2}, {2, 0}}, IntVector{1, 0});
  s.expect_true("planted 2-isotropic vector is found in [4,2;2,0]", !planted_iso.isotropic.empty(), kControl);
  return s;
}

}  // namespace k3conics
