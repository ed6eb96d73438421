#include "gen.hpp"

#include "tordiss/error.hpp"
#include "tordiss/maps.hpp"
#include "tordiss/propagation.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace tordiss;

namespace {
const IntMatrix kCat = IntMatrix::parse("2,1;1,1");

IntVec mul(const IntMatrix& A, const IntVec& k) {
  IntVec out(k.size(), 0);
  for (int i = 0; i < A.dim(); ++i)
    for (int j = 0; j < A.dim(); ++j) out[static_cast<size_t>(i)] += A(i, j) * k[static_cast<size_t>(j)];
  return out;
}
}  // namespace

TEST(ModeAction, Examples) {
  LinearToralMap cat(kCat);
  EXPECT_EQ(mode_action(cat, ModeIndex{1, 0}, 1).small(), (IntVec{2, 1}));
  EXPECT_EQ(mode_action(cat, ModeIndex{3, -7}, 0).small(), (IntVec{3, -7}));
  EXPECT_EQ(mode_action(LinearToralMap(IntMatrix::parse("2")), ModeIndex{1}, 5).small(), (IntVec{32}));
}

TEST(ModeAction, SemigroupLawAndInjectivity) {
  Gen gen(83);
  for (int trial = 0; trial < 60; ++trial) {
    int d = static_cast<int>(gen.integer(1, 3));
    LinearToralMap map(gen.unimodular(d, 6));
    ModeIndex k = gen.mode(d, 5);
    int64_t m = gen.integer(0, 8), n = gen.integer(0, 8);
    EXPECT_EQ(mode_action(map, k, m + n), mode_action(map, mode_action(map, k, m), n));
    EXPECT_FALSE(mode_action(map, k, m + n).is_zero());
    IntVec oracle(k.begin(), k.end());
    for (int64_t i = 0; i < m; ++i) oracle = mul(map.matrix(), oracle);
    EXPECT_EQ(mode_action(map, k, m), LatticeVector(oracle));
  }
}

TEST(ModeAction, PromotesToBigIntegers) {
  LinearToralMap cat(kCat);
  auto v = mode_action(cat, ModeIndex{1, 0}, 100);
  EXPECT_TRUE(v.is_big());
  // A^n e1 = (F_{2n+1}, F_{2n}) for the Fibonacci numbers
  BigInt a = 0, b = 1;
  for (int i = 0; i < 200; ++i) {
    BigInt c = a + b;
    a = b;
    b = c;
  }
  // now a = F_200, b = F_201
  EXPECT_EQ(v.big()[0], b);
  EXPECT_EQ(v.big()[1], a);
  auto back = mode_action(LinearToralMap(*unimodular_inverse(kCat)), v, 100);
  EXPECT_EQ(back, LatticeVector(IntVec{1, 0}));
}

TEST(Maps, ZeroDeterminantRejected) {
  EXPECT_ANY_THROW(LinearToralMap(IntMatrix::parse("1,2;2,4")));
}

TEST(Expansion, Examples) {
  double phi2 = (3 + std::sqrt(5.0)) / 2;
  auto cat = expansion_profile(LinearToralMap(kCat));
  EXPECT_NEAR(cat.mu, phi2, 1e-12);
  EXPECT_NEAR(cat.df_norm, phi2, 1e-12);
  auto id = expansion_profile(LinearToralMap(IntMatrix::identity(2)));
  EXPECT_NEAR(id.mu, 1.0, 1e-14);
  EXPECT_NEAR(id.df_norm, 1.0, 1e-14);
  auto tr = expansion_profile(TranslationMap({0.3, 0.1}));
  EXPECT_EQ(tr.mu, 1.0);
  EXPECT_EQ(tr.df_norm, 1.0);
}

TEST(Expansion, MuBetweenOneAndDfNorm) {
  Gen gen(89);
  for (int trial = 0; trial < 40; ++trial) {
    auto p = expansion_profile(LinearToralMap(gen.unimodular(static_cast<int>(gen.integer(1, 3)), 5)));
    EXPECT_GE(p.mu, 1.0 - 1e-12);
    EXPECT_LE(p.mu, p.df_norm * (1 + 1e-12));
  }
  auto s = expansion_profile(SampledMap(kCat, 0.05, 64));
  EXPECT_TRUE(s.lower_estimate);
  EXPECT_GE(s.mu, 1.0);
  EXPECT_LE(s.mu, s.df_norm * (1 + 1e-12));
}

TEST(Entropy, Examples) {
  double h = std::log((3 + std::sqrt(5.0)) / 2);
  auto cat = entropy_report(LinearToralMap(kCat));
  EXPECT_NEAR(cat.h, 0.9624236501192069, 1e-14);
  EXPECT_NEAR(cat.h, h, 1e-14);
  ASSERT_EQ(cat.factors.size(), 1u);
  EXPECT_EQ(cat.factors[0].degree, 2);
  EXPECT_NEAR(cat.h_hat, h / 2, 1e-14);
  EXPECT_TRUE(cat.ergodic);
  auto rot = entropy_report(LinearToralMap(IntMatrix::parse("0,1;-1,0")));
  EXPECT_FALSE(rot.ergodic);
  EXPECT_EQ(rot.h, 0.0);
  auto par = entropy_report(LinearToralMap(IntMatrix::parse("1,1;0,1")));
  EXPECT_FALSE(par.ergodic);
  EXPECT_EQ(par.h, 0.0);
}

TEST(Entropy, BlockDiagonalFactorsAndInvariants) {
  // two independent hyperbolic blocks with different entropies
  IntMatrix A(4, {2, 1, 0, 0, 1, 1, 0, 0, 0, 0, 3, 1, 0, 0, 2, 1});
  auto rep = entropy_report(LinearToralMap(A));
  double sum = 0;
  for (const auto& f : rep.factors) sum += f.h;
  EXPECT_NEAR(rep.h, sum, 1e-13);
  EXPECT_LE(rep.h_hat, rep.h);
  EXPECT_EQ(rep.factors.size(), 2u);
  double h2 = std::log(2 + std::sqrt(3.0));
  EXPECT_NEAR(rep.h, std::log((3 + std::sqrt(5.0)) / 2) + h2, 1e-12);
  EXPECT_NEAR(rep.h_hat, std::log((3 + std::sqrt(5.0)) / 2) / 2, 1e-13);
  EXPECT_TRUE(rep.ergodic);
}

TEST(Entropy, FactorizationHint) {
  IntMatrix A(4, {2, 1, 0, 0, 1, 1, 0, 0, 0, 0, 2, 1, 0, 0, 1, 1});
  LinearToralMap map(A);
  IntPoly f(std::vector<BigInt>{1, -3, 1});
  auto rep = entropy_report(map, std::vector<IntPoly>{f, f});
  EXPECT_NEAR(rep.h, 2 * std::log((3 + std::sqrt(5.0)) / 2), 1e-12);
  EXPECT_ANY_THROW(entropy_report(map, std::vector<IntPoly>{f}));
}

TEST(Ergodicity, Examples) {
  EXPECT_TRUE(ergodicity_test(LinearToralMap(kCat)));
  EXPECT_FALSE(ergodicity_test(LinearToralMap(IntMatrix::identity(2))));
  EXPECT_FALSE(ergodicity_test(LinearToralMap(IntMatrix::parse("0,-1;1,0"))));
  EXPECT_FALSE(ergodicity_test(LinearToralMap(IntMatrix::parse("0,-1;1,-1"))));  // order 3
}

TEST(Ergodicity, AgreesWithFiniteOrderOracle) {
  // a unimodular matrix of finite order has A^m = I for some m with phi(m) <= d; those are never ergodic
  Gen gen(97);
  for (int trial = 0; trial < 60; ++trial) {
    int d = static_cast<int>(gen.integer(2, 3));
    IntMatrix A = gen.unimodular(d, 5);
    LinearToralMap map(A);
    bool finite_order = false;
    IntMatrix P = A;
    for (int m = 1; m <= 12 && !finite_order; ++m) {
      if (P.is_identity()) finite_order = true;
      auto next = checked_product(P, A);
      if (!next) break;
      P = *next;
    }
    if (finite_order) EXPECT_FALSE(ergodicity_test(map)) << A.str();
    // eigenvalue oracle: an eigenvalue on the unit circle that is a root of unity
    auto rep = entropy_report(map);
    bool root_of_unity = false;
    for (auto l : rep.eigenvalues)
      for (int m = 1; m <= 12; ++m)
        if (std::abs(std::pow(l, m) - 1.0) < 1e-9) root_of_unity = true;
    EXPECT_EQ(ergodicity_test(map), !root_of_unity) << A.str();
  }
}

TEST(Koopman, IdentityMap) {
  auto grid = make_grid(2, 4);
  auto g = koopman_matrix(SampledMap(IntMatrix::identity(2), 0.0, 16), grid);
  EXPECT_TRUE(g.U.to_dense().isApprox(Eigen::MatrixXcd::Identity(grid->size(), grid->size()), 1e-12));
}

TEST(Koopman, SampledCatMatchesExactModeAction) {
  auto grid = make_grid(2, 4);
  auto g = koopman_matrix(SampledMap(kCat, 0.0, 16), grid);
  LinearToralMap cat(kCat);
  for (int64_t c = 0; c < grid->size(); ++c) {
    auto img = mode_action(cat, grid->mode(c), 1).small();
    int64_t r = grid->index_of(ModeIndex(img.begin(), img.end()));
    Eigen::VectorXcd col = g.U.to_dense().col(c);
    if (r >= 0) {
      EXPECT_NEAR(std::abs(col(r) - 1.0), 0.0, 1e-12);
      EXPECT_NEAR(col.norm(), 1.0, 1e-12);
      EXPECT_NEAR(g.leaked[static_cast<size_t>(c)], 0.0, 1e-12);
    } else {
      EXPECT_NEAR(col.norm(), 0.0, 1e-12);
      EXPECT_NEAR(g.leaked[static_cast<size_t>(c)], 1.0, 1e-12);
    }
  }
  auto exact = exact_koopman(cat, grid);
  EXPECT_TRUE(g.U.to_dense().isApprox(exact.first.to_dense(), 1e-12));
}

TEST(Koopman, AliasingGuard) {
  EXPECT_THROW(koopman_matrix(SampledMap(kCat, 0.01, 16), make_grid(2, 8)), ConfigError);
}

TEST(Koopman, PerturbedMapColumnsAreNearlyUnitary) {
  auto grid = make_grid(2, 4);
  auto g = koopman_matrix(SampledMap(kCat, 0.01, 64), grid);
  // U is an isometry on L^2; columns lose only what lands outside the grid
  Eigen::MatrixXcd U = g.U.to_dense();
  for (int64_t c = 0; c < grid->size(); ++c)
    EXPECT_NEAR(U.col(c).squaredNorm() + g.leaked[static_cast<size_t>(c)], 1.0, 1e-10);
  // oracle: direct quadrature of one entry
  const int64_t N = 64;
  SampledMap F(kCat, 0.01, N);
  ModeIndex j{2, 1}, k{1, 0};
  cplx sum = 0;
  for (int64_t a = 0; a < N; ++a)
    for (int64_t b = 0; b < N; ++b) {
      Eigen::VectorXd x(2);
      x << double(a) / N, double(b) / N;
      Eigen::VectorXd y = F.evaluate(x);
      double ph = (k[0] * y(0) + k[1] * y(1)) - (j[0] * x(0) + j[1] * x(1));
      sum += std::polar(1.0, 2 * std::numbers::pi * ph);
    }
  sum /= double(N * N);
  EXPECT_NEAR(std::abs(U(grid->index_of(j), grid->index_of(k)) - sum), 0.0, 1e-12);
}

TEST(SampledMap, VolumePreservation) {
  Gen gen(101);
  SampledMap F(kCat, 0.05, 32);
  EXPECT_NEAR(F.min_abs_det(), 1.0, 1e-12);
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::VectorXd x(2);
    x << gen.real(0, 1), gen.real(0, 1);
    EXPECT_NEAR(std::abs(F.jacobian(x).determinant()), 1.0, 1e-12);
    Eigen::VectorXd y = F.evaluate(x);
    EXPECT_GE(y.minCoeff(), 0.0);
    EXPECT_LT(y.maxCoeff(), 1.0);
  }
}

TEST(SampledMap, TransportedModeMatchesDeltaZeroPermutation) {
  SampledMap F(kCat, 0.0, 16);
  auto t = transported_mode(F, {1, 0}, 3, 64);
  ASSERT_EQ(t.size(), 1u);
  auto img = mode_action(LinearToralMap(kCat), ModeIndex{1, 0}, 3).small();
  EXPECT_EQ(t[0].first, ModeIndex(img.begin(), img.end()));
  EXPECT_NEAR(std::abs(t[0].second - 1.0), 0.0, 1e-12);
}
