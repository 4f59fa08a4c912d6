#include "k3conics/census.hpp"

#include <gtest/gtest.h>

#include <set>
#include <sstream>

using namespace k3conics;
using namespace k3conics::census;

namespace {

const golay::GolayCode& code() {
  static const golay::GolayCode c = golay::normalize_frame(golay::GolayCode::build()).code;
  return c;
}

const std::vector<ConicRecord>& conics() {
  static const std::vector<ConicRecord> c = find_conics(code(), Generators{}, 2);
  return c;
}

const IntersectionGraph& graph() {
  static const IntersectionGraph g = intersection_graph(conics(), 2);
  return g;
}

LeechVector vec(std::initializer_list<int> head, Shape shape) {
  LeechVector v;
  v.coords = leech::make_coords(head);
  v.shape = shape;
  return v;
}

}  // namespace

TEST(Census, GeneratorGram) {
  const Generators g;
  EXPECT_EQ(g.gram(), Generators::expected_gram());
  for (const auto& v : g.all()) EXPECT_EQ(leech::inner(v, v).raw, leech::kMinimalRawNorm);
}

TEST(Census, FilterMatchesDirectScan) {
  // Direct rational check of the five conditions over every minimal vector.
  const Generators g;
  const auto gens = g.all();
  const std::array<Rational, 5> target{2, 1, 0, 0, 0};
  std::set<leech::Coords> direct;
  leech::for_each_minimal_vector(code(), [&](const LeechVector& v) {
    for (std::size_t i = 0; i < 5; ++i)
      if (leech::inner(v.coords, gens[i]).true_value() != target[i]) return;
    direct.insert(v.coords);
  });
  std::set<leech::Coords> found;
  for (const auto& r : conics()) found.insert(r.l.coords);
  EXPECT_EQ(found, direct);
  EXPECT_EQ(conics().size(), kConicCount);
}

TEST(Census, PatternSplit) {
  const auto c = count_patterns(conics());
  EXPECT_EQ(c.by_pattern, (std::array<std::size_t, 4>{96, 96, 320, 288}));
  EXPECT_EQ(c.total(), 800u);
}

TEST(Census, ThreadCountDoesNotChangeResult) {
  const auto one = find_conics(code(), Generators{}, 1);
  const auto many = find_conics(code(), Generators{}, 7);
  ASSERT_EQ(one.size(), many.size());
  for (std::size_t i = 0; i < one.size(); ++i) EXPECT_EQ(one[i].l, many[i].l);
}

TEST(Census, ClassifyPatterns) {
  auto p1 = vec({1, 3, -1, 1, -1, -1, 1, -1, 1}, Shape::s31);
  const auto c1 = classify(p1);
  EXPECT_EQ(c1.pattern, Pattern::p1);
  EXPECT_EQ(c1.movable, (std::pair{6, 8}));
  EXPECT_EQ(classify(vec({3, 1, 1, -1, 1, 1, -1, -1, 1}, Shape::s31)).pattern, Pattern::p2);
  EXPECT_EQ(classify(vec({2, 2, 0, 0, 0, 0, 0, 0, 0}, Shape::s20)).pattern, Pattern::p3);
  const auto c4 = classify(vec({2, 2, 0, 0, 0, 0, -2, 2, 0}, Shape::s20));
  EXPECT_EQ(c4.pattern, Pattern::p4);
  EXPECT_EQ(c4.movable, (std::pair{8, 7}));
  EXPECT_THROW(classify(vec({4, 4}, Shape::s40)), VerificationError);
  EXPECT_THROW(classify(vec({1, 3, -1, 1, -1, 1, 1, 1, 1}, Shape::s31)), VerificationError);
}

TEST(Census, ConicConditionsRedundancy) {
  // l1 + l2 = 4, l2 + l3 = 2, l4 = -l3, l5 = l3 (raw coordinates over 2).
  for (const auto& r : conics()) {
    const auto& l = r.l;
    EXPECT_EQ(l[1] + l[2], 4);
    EXPECT_EQ(l[2] + l[3], 2);
    EXPECT_EQ(l[4], -l[3]);
    EXPECT_EQ(l[5], l[3]);
  }
}

TEST(Census, CodewordRecount) {
  const auto r = verify_codeword_recount(code(), conics());
  EXPECT_TRUE(r.pass);
  ASSERT_EQ(r.rows.size(), 4u);
  const std::array<std::size_t, 4> totals{96, 96, 320, 288};
  const std::array<int, 4> factors{16, 16, 10, 3};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(r.rows[i].combinatorial_total, totals[i]);
    EXPECT_EQ(r.rows[i].filtered_total, totals[i]);
    for (const auto& [pair, n] : r.rows[i].codeword_counts) EXPECT_EQ(n, static_cast<std::size_t>(factors[i])) << pair;
  }
  ASSERT_EQ(r.correspondence.size(), 2u);
  for (const auto& c : r.correspondence) {
    EXPECT_TRUE(c.unique);
    EXPECT_EQ(c.table_row, to_string(c.pattern));
    EXPECT_EQ(c.pair_role, "starred");
  }
}

TEST(Census, RecountDetectsMissingConics) {
  auto partial = conics();
  partial.pop_back();
  EXPECT_THROW(verify_codeword_recount(code(), partial), VerificationError);
}

TEST(Census, FrameInvariance) {
  const auto base = golay::GolayCode::build();
  for (int i = 0; i < 4; ++i) {
    const auto other = find_conics(golay::normalize_frame(base, i).code, Generators{}, 2);
    EXPECT_EQ(count_patterns(other), count_patterns(conics())) << "octad choice " << i;
  }
}

TEST(Census, IntersectionGraph) {
  const auto& g = graph();
  std::size_t pairs = 0;
  for (const auto& [v, n] : g.histogram) {
    EXPECT_LE(v, 2);
    pairs += n;
  }
  EXPECT_EQ(pairs, 800u * 799u / 2);
  for (std::size_t i = 0; i < g.size; i += 37) {
    EXPECT_EQ(g(i, i), 4);
    for (std::size_t j = 0; j < g.size; j += 41) EXPECT_EQ(g(i, j), g(j, i));
  }
}

TEST(Census, SixteenDisjointConics) {
  const auto c = find_disjoint_clique(graph(), 16);
  ASSERT_EQ(c.vertices.size(), 16u);
  EXPECT_TRUE(std::is_sorted(c.vertices.begin(), c.vertices.end()));
  for (std::size_t a = 0; a < 16; ++a)
    for (std::size_t b = a + 1; b < 16; ++b)
      EXPECT_EQ(leech::inner(conics()[c.vertices[a]].l, conics()[c.vertices[b]].l).raw, 16);
  EXPECT_THROW(find_disjoint_clique(graph(), 801), VerificationError);
}

TEST(Census, CliqueSearchOnSmallGraph) {
  // Two disjoint triangles plus an isolated vertex; "disjoint" means product 2.
  IntersectionGraph g;
  g.size = 7;
  g.products.assign(49, 0);
  auto join = [&](std::size_t a, std::size_t b) { g.products[a * 7 + b] = g.products[b * 7 + a] = 2; };
  join(0, 1), join(1, 2), join(0, 2), join(3, 4), join(4, 5), join(3, 5);
  const auto c = find_disjoint_clique(g, 3);
  EXPECT_EQ(c.vertices, (std::vector<std::size_t>{0, 1, 2}));
  EXPECT_EQ(count_disjoint_cliques(g, 3, std::chrono::seconds(5)).count, 2u);
  EXPECT_EQ(count_disjoint_cliques(g, 2, std::chrono::seconds(5)).count, 6u);
  EXPECT_THROW(find_disjoint_clique(g, 4), VerificationError);
}

TEST(Census, ExportLines) {
  std::ostringstream os;
  export_conics(os, conics());
  std::istringstream in(os.str());
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    std::string tok;
    std::size_t count = 0;
    while (fields >> tok) ++count;
    EXPECT_EQ(count, 27u);
    ++n;
  }
  EXPECT_EQ(n, 800u);
}
