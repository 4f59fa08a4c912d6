#include "k3conics/lattice/discriminant.hpp"
#include "k3conics/lattice/io.hpp"
#include "k3conics/lattice/lattice.hpp"
#include "k3conics/lattice/normal_forms.hpp"
#include "k3conics/lattice/short_vectors.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace k3conics;
using namespace k3conics::lattice;

namespace {

RatMatrix v_tilde_gram() {
  return RatMatrix{{4, 2, 0, 0, 0}, {2, 4, 2, 0, 1}, {0, 2, 4, 2, -1}, {0, 0, 2, 4, 0}, {0, 1, -1, 0, 4}};
}

RatMatrix e8_gram() {
  // Cartan matrix of E8.
  RatMatrix g(8, 8);
  for (std::size_t i = 0; i < 8; ++i) g(i, i) = 2;
  auto link = [&](std::size_t a, std::size_t b) { g(a, b) = g(b, a) = -1; };
  for (std::size_t i = 0; i + 1 < 7; ++i) link(i, i + 1);
  link(4, 7);
  return g;
}

IntMatrix random_matrix(std::mt19937& rng, std::size_t r, std::size_t c, int bound) {
  std::uniform_int_distribution<int> d(-bound, bound);
  IntMatrix m(r, c);
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j) m(i, j) = d(rng);
  return m;
}

}  // namespace

TEST(Determinant, MatchesCofactorOracle) {
  EXPECT_EQ(determinant(v_tilde_gram()), 160);
  EXPECT_EQ(oracle::cofactor_determinant(v_tilde_gram()), 160);
  std::mt19937 rng(7);
  for (int t = 0; t < 20; ++t) {
    const IntMatrix m = random_matrix(rng, 5, 5, 9);
    EXPECT_EQ(Rational(determinant(m)), oracle::cofactor_determinant(to_rational(m)));
  }
}

TEST(Hermite, ShapeAndTransform) {
  std::mt19937 rng(11);
  for (int t = 0; t < 20; ++t) {
    const IntMatrix m = random_matrix(rng, 6, 4, 20);
    const auto f = hnf(m);
    EXPECT_EQ(f.u * m, f.h);
    EXPECT_EQ(abs(determinant(f.u)), 1);
    EXPECT_EQ(f.rank, rank(to_rational(m)));
    for (std::size_t i = 0; i < f.rank; ++i) {
      const std::size_t p = f.pivots[i];
      EXPECT_GT(f.h(i, p), 0);
      for (std::size_t k = 0; k < i; ++k) {
        EXPECT_GE(f.h(k, p), 0);
        EXPECT_LT(f.h(k, p), f.h(i, p));
      }
      for (std::size_t j = 0; j < p; ++j) EXPECT_EQ(f.h(i, j), 0);
    }
    for (std::size_t i = f.rank; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) EXPECT_EQ(f.h(i, j), 0);
  }
}

TEST(Hermite, RowSpanBuilderAgreesWithHnf) {
  std::mt19937 rng(3);
  const IntMatrix m = random_matrix(rng, 12, 5, 6);
  RowSpanBuilder b(5);
  for (std::size_t i = 0; i < m.rows(); ++i) b.add(m.row(i));
  const auto f = hnf(m);
  EXPECT_EQ(b.basis(), f.h.rows_range(0, f.rank));
}

TEST(Smith, TransformsAndDivisibility) {
  std::mt19937 rng(5);
  for (int t = 0; t < 20; ++t) {
    const IntMatrix m = random_matrix(rng, 4, 4, 12);
    const auto s = snf(m);
    IntMatrix d = s.left * m * s.right;
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) EXPECT_EQ(d(i, j), i == j ? s.divisors[i] : 0);
    for (std::size_t i = 0; i + 1 < 4; ++i)
      if (s.divisors[i] != 0 && s.divisors[i + 1] != 0) {
        EXPECT_EQ(s.divisors[i + 1] % s.divisors[i], 0);
      }
    EXPECT_EQ(s.divisors, oracle::invariant_factors(m));
  }
}

TEST(Smith, GeneratorGramInvariantFactors) {
  const auto s = snf(to_integer(v_tilde_gram()));
  const std::vector<Integer> expected{1, 1, 2, 2, 40};
  EXPECT_EQ(s.divisors, expected);
  EXPECT_EQ(oracle::invariant_factors(to_integer(v_tilde_gram())), expected);
}

TEST(Kernel, LeftKernelIsSaturated) {
  const IntMatrix m{{2, 4}, {1, 2}, {3, 6}};
  const IntMatrix k = left_kernel(m);
  EXPECT_EQ(k.rows(), 2u);
  const IntMatrix z = k * m;
  for (const auto& x : z.data()) EXPECT_EQ(x, 0);
  const auto s = snf(k);
  for (const auto& d : s.divisors) EXPECT_EQ(d, 1);
}

TEST(LatticeOps, OrthogonalComplementInZ3) {
  const Lattice z3(IntMatrix::identity(3), to_rational(IntMatrix::identity(3)));
  const Lattice v(IntMatrix{{2, 2, 0}}, z3.ambient_form());
  const Lattice c = orthogonal_complement(v, z3);
  EXPECT_EQ(c.rank(), 2u);
  EXPECT_EQ(determinant(c.gram()), 2);  // spanned by (1,-1,0), (0,0,1)
  EXPECT_TRUE(c.contains(RatVector{1, -1, 0}));
  EXPECT_FALSE(c.contains(RatVector{1, 1, 0}));
}

TEST(LatticeOps, Coordinates) {
  const Lattice l(IntMatrix{{2, 0}, {1, 1}}, to_rational(IntMatrix::identity(2)));
  const auto c = l.coordinates(RatVector{3, 1});
  ASSERT_TRUE(c);
  EXPECT_EQ((*c)[0], 1);
  EXPECT_EQ((*c)[1], 1);
  EXPECT_FALSE(l.coordinates(RatVector{1, 0}));
  EXPECT_THROW(Lattice(IntMatrix{{1, 1}, {2, 2}}, to_rational(IntMatrix::identity(2))), LatticeError);
}

TEST(LatticeOps, Signature) {
  EXPECT_EQ(signature(RatMatrix{{0, 1}, {1, 0}}), (Signature{1, 1, 0}));
  EXPECT_EQ(signature(RatMatrix{{4, 0}, {0, -2}}), (Signature{1, 1, 0}));
  EXPECT_EQ(signature(e8_gram()), (Signature{8, 0, 0}));
  EXPECT_EQ(signature(-e8_gram()), (Signature{0, 8, 0}));
  EXPECT_EQ(signature(RatMatrix{{1, 1}, {1, 1}}), (Signature{1, 0, 1}));
}

TEST(Discriminant, SmallLattices) {
  EXPECT_EQ(discriminant_form(Lattice::abstract(e8_gram())).group_order(), 1);
  const auto a2 = discriminant_form(Lattice::abstract(RatMatrix{{2, -1}, {-1, 2}}));
  EXPECT_EQ(a2.group_order(), 3);
  EXPECT_TRUE(fqf_isomorphic(a2, FiniteQuadraticForm::cyclic(3, Rational(2, 3))));
  EXPECT_FALSE(fqf_isomorphic(a2, FiniteQuadraticForm::cyclic(3, Rational(4, 3))));
  EXPECT_THROW(discriminant_form(Lattice::abstract(RatMatrix{{1}})), LatticeError);
}

TEST(Discriminant, GeneratorLatticeOrder) {
  const auto f = discriminant_form(Lattice::abstract(v_tilde_gram()));
  EXPECT_EQ(f.group_order(), 160);
}

TEST(Discriminant, EighthsAgainstExhaustiveSearch) {
  const auto plus = FiniteQuadraticForm::cyclic(8, Rational(1, 8));
  const auto minus = FiniteQuadraticForm::cyclic(8, Rational(-1, 8));
  EXPECT_FALSE(fqf_isomorphic(plus, minus));
  EXPECT_FALSE(oracle::fqf_isomorphic_exhaustive(plus, minus));
  // x -> 3x maps [1/8] to [9/8], an isomorphic form.
  const auto nine = FiniteQuadraticForm::cyclic(8, Rational(9, 8));
  EXPECT_TRUE(fqf_isomorphic(plus, nine));
  EXPECT_TRUE(oracle::fqf_isomorphic_exhaustive(plus, nine));
}

TEST(Discriminant, SearchAgreesWithOracleOnSmallForms) {
  const Rational half(1, 2);
  const auto u = FiniteQuadraticForm::from_matrix({2, 2}, RatMatrix{{0, half}, {half, 0}});
  const auto v = FiniteQuadraticForm::from_matrix({2, 2}, RatMatrix{{1, half}, {half, 1}});
  const auto w = direct_sum(FiniteQuadraticForm::cyclic(2, half), FiniteQuadraticForm::cyclic(2, -half));
  const std::vector<FiniteQuadraticForm> forms{u, v, w};
  for (const auto& a : forms)
    for (const auto& b : forms) EXPECT_EQ(fqf_isomorphic(a, b), oracle::fqf_isomorphic_exhaustive(a, b));
  EXPECT_FALSE(fqf_isomorphic(u, v));
}

TEST(Discriminant, WitnessIsVerified) {
  const auto a = direct_sum(FiniteQuadraticForm::cyclic(4, Rational(5, 4)), FiniteQuadraticForm::cyclic(5, Rational(2, 5)));
  const auto b = direct_sum(FiniteQuadraticForm::cyclic(5, Rational(2, 5)), FiniteQuadraticForm::cyclic(4, Rational(5, 4)));
  const auto w = fqf_isomorphism(a, b);
  ASSERT_TRUE(w);
  EXPECT_TRUE(verify_isomorphism(a, b, *w));
  FqfIsomorphism broken = *w;
  broken[0] = b.add(broken[0], broken[0]);
  EXPECT_FALSE(verify_isomorphism(a, b, broken));
}

TEST(ShortVectors, KnownCounts) {
  EXPECT_EQ(count_short_vectors(e8_gram(), 2), 240u);
  EXPECT_EQ(count_short_vectors(e8_gram(), 4), 2160u);
  EXPECT_EQ(count_short_vectors(RatMatrix{{2, -1}, {-1, 2}}, 2), 6u);
  EXPECT_EQ(count_short_vectors(to_rational(IntMatrix::identity(5)), 1), 10u);
  EXPECT_EQ(count_short_vectors(to_rational(IntMatrix::identity(3)), 2, NormMode::at_most), 1u + 6u + 12u);
  EXPECT_THROW(short_vectors(RatMatrix{{1, 0}, {0, -1}}, 1), LatticeError);
}

TEST(ShortVectors, AgreesWithBoxEnumeration) {
  std::mt19937 rng(17);
  for (int t = 0; t < 10; ++t) {
    // Positive definite: BᵀB + I for random small B.
    const RatMatrix b = to_rational(random_matrix(rng, 3, 3, 2));
    const RatMatrix g = b.transpose() * b + to_rational(IntMatrix::identity(3));
    for (int target = 1; target <= 6; ++target)
      EXPECT_EQ(short_vectors(g, target), oracle::box_vectors(g, target, 6)) << "target " << target;
  }
}

TEST(ShortVectors, CosetShift) {
  const RatMatrix g{{1}};
  const RatVector half{Rational(1, 2)};
  const auto v = short_vectors(g, Rational(1, 4), NormMode::exact, half);
  const std::vector<ShortVector> expected{{-1}, {0}};
  EXPECT_EQ(v, expected);
  const RatMatrix a2{{2, -1}, {-1, 2}};
  const RatVector third{Rational(1, 3), Rational(2, 3)};
  EXPECT_EQ(short_vectors(a2, Rational(2, 3), NormMode::exact, third), oracle::box_vectors(a2, Rational(2, 3), 4, third));
}

TEST(MatrixIo, RoundTrip) {
  const RatMatrix m{{Rational(1, 2), 3}, {-4, Rational(-7, 3)}};
  std::stringstream ss;
  write_matrix(ss, m);
  EXPECT_EQ(ss.str(), "2 2\n1/2 3\n-4 -7/3\n");
  EXPECT_EQ(read_rat_matrix(ss), m);
  std::istringstream bad("2 2\n1 2\n3");
  EXPECT_THROW(read_int_matrix(bad), LatticeError);
  std::istringstream junk("1 1\nx");
  EXPECT_THROW(read_int_matrix(junk), LatticeError);
}
