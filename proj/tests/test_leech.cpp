#include "k3conics/lattice/short_vectors.hpp"
#include "k3conics/leech.hpp"

#include <gtest/gtest.h>

#include <set>
#include <sstream>

using namespace k3conics;
using namespace k3conics::leech;

namespace {

const golay::GolayCode& code() {
  static const golay::GolayCode c = golay::normalize_frame(golay::GolayCode::build()).code;
  return c;
}

const std::vector<LeechVector>& minimal() {
  static const std::vector<LeechVector> v = all_minimal_vectors(code());
  return v;
}

const LeechBasis& basis() {
  static const LeechBasis b = leech_basis(enumerate_shape31(code()));
  return b;
}

}  // namespace

TEST(Leech, ShapeCounts) {
  EXPECT_EQ(enumerate_shape31(code()).size(), kShape31Count);
  EXPECT_EQ(enumerate_shape20(code()).size(), kShape20Count);
  EXPECT_EQ(enumerate_shape40().size(), kShape40Count);
  EXPECT_EQ(minimal().size(), kMinimalCount);
}

TEST(Leech, NormsDistinctAndNegationClosed) {
  std::set<Coords> all;
  for (const auto& v : minimal()) {
    EXPECT_EQ(inner(v, v).raw, kMinimalRawNorm);
    all.insert(v.coords);
  }
  EXPECT_EQ(all.size(), kMinimalCount);
  for (const auto& v : minimal()) {
    Coords n;
    for (std::size_t i = 0; i < 24; ++i) n[i] = static_cast<std::int8_t>(-v.coords[i]);
    ASSERT_TRUE(all.count(n));
  }
}

TEST(Leech, ShapeProfiles) {
  for (const auto& v : enumerate_shape20(code())) {
    int plus = 0, nonzero = 0;
    for (auto x : v.coords) {
      plus += x == 2;
      nonzero += x != 0;
    }
    EXPECT_EQ(nonzero, 8);
    EXPECT_EQ(plus % 2, 0);
  }
  for (const auto& v : enumerate_shape31(code())) {
    int threes = 0;
    for (auto x : v.coords) threes += x == 3 || x == -3;
    EXPECT_EQ(threes, 1);
  }
}

TEST(Leech, ProductsIntegralOnSample) {
  const auto& v = minimal();
  for (std::size_t i = 0; i < v.size(); i += 997)
    for (std::size_t j = 0; j < v.size(); j += 1009) {
      const auto ip = inner(v[i], v[j]);
      EXPECT_TRUE(ip.integral());
      EXPECT_LE(std::abs(ip.true_integer()), 4);
    }
  EXPECT_EQ(ScaledInnerProduct{12}.true_value(), Rational(3, 2));
  EXPECT_FALSE(ScaledInnerProduct{12}.integral());
}

TEST(Leech, BasisIsUnimodularAndSpansMinimalVectors) {
  const auto& b = basis();
  EXPECT_EQ(b.lattice.rank(), 24u);
  EXPECT_EQ(determinant(b.lattice.gram()), 1);
  EXPECT_EQ(abs(determinant(b.hermite)), Integer(1) << 36);
  for (std::size_t i = 0; i < minimal().size(); i += 101)
    EXPECT_TRUE(b.lattice.contains(to_rational(minimal()[i].coords)));
  // Half a minimal vector is not in the lattice.
  RatVector half = to_rational(minimal().front().coords);
  for (auto& x : half) x /= 2;
  EXPECT_FALSE(b.lattice.contains(half));
}

TEST(Leech, ShortVectorsOnBasisGram) {
  const RatMatrix g = basis().lattice.gram();
  EXPECT_EQ(lattice::count_short_vectors(g, 2), 0u);
  EXPECT_EQ(lattice::count_short_vectors(g, 4), kMinimalCount);
}

TEST(Leech, ExportSortedRows) {
  std::ostringstream os;
  export_vectors(os, enumerate_shape40());
  std::istringstream in(os.str());
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    std::istringstream fields(line);
    int x, count = 0;
    while (fields >> x) ++count;
    EXPECT_EQ(count, 24);
    ++n;
  }
  EXPECT_EQ(n, kShape40Count);
}
