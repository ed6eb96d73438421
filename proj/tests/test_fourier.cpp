#include "gen.hpp"

#include "tordiss/error.hpp"
#include "tordiss/fourier.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

using namespace tordiss;

TEST(Grid, SizeExcludesZero) {
  EXPECT_EQ(make_grid(1, 3)->size(), 6);
  EXPECT_EQ(make_grid(2, 2)->size(), 24);
  EXPECT_EQ(make_grid(3, 1)->size(), 26);
}

TEST(Grid, EnumerationIsABijection) {
  for (int d = 1; d <= 3; ++d)
    for (int64_t K = 1; K <= 3; ++K) {
      auto g = make_grid(d, K);
      std::set<ModeIndex> seen;
      for (int64_t i = 0; i < g->size(); ++i) {
        ModeIndex k = g->mode(i);
        EXPECT_FALSE(std::all_of(k.begin(), k.end(), [](int64_t x) { return x == 0; }));
        EXPECT_EQ(g->index_of(k), i);
        seen.insert(k);
      }
      EXPECT_EQ(static_cast<int64_t>(seen.size()), g->size());
    }
}

TEST(Grid, LexicographicOrder) {
  auto g = make_grid(2, 1);
  EXPECT_EQ(g->mode(0), (ModeIndex{-1, -1}));
  EXPECT_EQ(g->mode(1), (ModeIndex{-1, 0}));
  EXPECT_EQ(g->mode(g->size() - 1), (ModeIndex{1, 1}));
}

TEST(Grid, NegationInvolution) {
  Gen gen(11);
  for (int trial = 0; trial < 50; ++trial) {
    int d = static_cast<int>(gen.integer(1, 3));
    auto g = make_grid(d, gen.integer(1, 4));
    int64_t i = gen.integer(0, g->size() - 1);
    ModeIndex k = g->mode(i), nk = g->mode(g->negated(i));
    for (int j = 0; j < d; ++j) EXPECT_EQ(nk[static_cast<size_t>(j)], -k[static_cast<size_t>(j)]);
  }
}

TEST(Grid, OutsideAndZeroHaveNoIndex) {
  auto g = make_grid(2, 2);
  EXPECT_EQ(g->index_of(ModeIndex{0, 0}), -1);
  EXPECT_EQ(g->index_of(ModeIndex{3, 0}), -1);
}

TEST(Norms, L2Examples) {
  auto g2 = make_grid(2, 2);
  EXPECT_DOUBLE_EQ(l2_norm(FourierVector::mode(g2, {1, 0})), 1.0);
  EXPECT_DOUBLE_EQ(l2_norm(FourierVector(g2)), 0.0);
  auto g1 = make_grid(1, 3);
  FourierVector f(g1);
  f.set({1}, 3.0);
  f.set({2}, 4.0);
  EXPECT_DOUBLE_EQ(l2_norm(f), 5.0);
}

TEST(Norms, SobolevExamples) {
  auto g1 = make_grid(1, 2);
  auto g2 = make_grid(2, 2);
  EXPECT_NEAR(sobolev_norm(FourierVector::mode(g1, {1}), 1.0), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(sobolev_norm(FourierVector::mode(g2, {1, 1}), 2.0), 3.0, 1e-15);
  Gen gen(3);
  FourierVector f = gen.vector(g2);
  EXPECT_NEAR(sobolev_norm(f, 0.0), l2_norm(f), 1e-14);
}

TEST(Norms, ParsevalAndSobolevMonotone) {
  Gen gen(5);
  for (int trial = 0; trial < 30; ++trial) {
    auto g = make_grid(static_cast<int>(gen.integer(1, 3)), gen.integer(1, 3));
    FourierVector f = gen.vector(g);
    double sum = 0;
    for (int64_t i = 0; i < g->size(); ++i) sum += std::norm(f.coeffs()(i));
    EXPECT_NEAR(l2_norm(f) * l2_norm(f), sum, 1e-12 * sum);
    double prev = 0;
    for (double s = 0; s <= 3; s += 0.25) {
      double v = sobolev_norm(f, s);
      EXPECT_GE(v, prev);
      prev = v;
    }
  }
}

TEST(Operators, NormExamples) {
  auto g = make_grid(1, 3);
  EXPECT_NEAR(operator_norm(DenseOperator::identity(g)), 1.0, 1e-12);
  Eigen::VectorXcd diag(g->size());
  for (int64_t i = 0; i < g->size(); ++i) {
    double k = static_cast<double>(g->mode(i)[0]);
    diag(i) = std::exp(-0.25 * k * k);
  }
  EXPECT_NEAR(operator_norm(DenseOperator::diagonal(g, diag)), std::exp(-0.25), 1e-12);
  auto g2 = make_grid(1, 1);
  Eigen::MatrixXcd nil(2, 2);
  nil << 0, 1, 0, 0;
  EXPECT_NEAR(operator_norm(DenseOperator::from_dense(g2, nil)), 1.0, 1e-12);
}

TEST(Operators, SmallestSingularExamples) {
  auto g = make_grid(1, 1);
  EXPECT_NEAR(smallest_singular(DenseOperator(g), 1.0), 1.0, 1e-14);
  Eigen::VectorXcd d(2);
  d << 0.5, 0.2;
  EXPECT_NEAR(smallest_singular(DenseOperator::diagonal(g, d), 1.0), 0.5, 1e-14);
  // nilpotent: singular values of [[r, -1], [0, r]] are (sqrt(4 r^2 + 1) -+ 1) / 2
  Eigen::MatrixXcd nil(2, 2);
  nil << 0, 1, 0, 0;
  for (double r : {0.3, 1.0}) {
    cplx lambda = std::polar(r, 0.7);
    double want = (std::sqrt(4 * r * r + 1) - 1) / 2;
    EXPECT_NEAR(smallest_singular(DenseOperator::from_dense(g, nil), lambda), want, 1e-13);
  }
}

TEST(Operators, NormDominatesColumns) {
  Gen gen(7);
  auto g = make_grid(2, 2);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXcd m = gen.matrix(g->size(), g->size());
    double n = operator_norm(DenseOperator::from_dense(g, m));
    for (Eigen::Index c = 0; c < m.cols(); ++c) EXPECT_GE(n * (1 + 1e-12), m.col(c).norm());
  }
}

TEST(Operators, SmallestSingularTimesInverseNorm) {
  Gen gen(13);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = make_grid(static_cast<int>(gen.integer(1, 2)), gen.integer(1, 3));
    if (g->size() > 50) continue;
    Eigen::MatrixXcd m = gen.matrix(g->size(), g->size());
    cplx lambda = gen.complex();
    double s = smallest_singular(DenseOperator::from_dense(g, m), lambda);
    Eigen::MatrixXcd shifted = lambda * Eigen::MatrixXcd::Identity(g->size(), g->size()) - m;
    Eigen::MatrixXcd inv = shifted.inverse();
    double inv_norm = Eigen::JacobiSVD<Eigen::MatrixXcd>(inv).singularValues()(0);
    EXPECT_NEAR(s * inv_norm, 1.0, 1e-8);
  }
}

TEST(Operators, PowerIterationMatchesSvdAboveLimit) {
  Gen gen(17);
  auto g = make_grid(2, 12);  // 624 modes, above the exact-SVD size
  Eigen::MatrixXcd m = gen.matrix(g->size(), g->size());
  double want = Eigen::BDCSVD<Eigen::MatrixXcd>(m).singularValues()(0);
  EXPECT_NEAR(operator_norm(DenseOperator::from_dense(g, m), 1e-12), want, 1e-9 * want);
}

TEST(Operators, PowerIterationReportsNonConvergence) {
  Gen gen(19);
  auto g = make_grid(2, 12);
  Eigen::MatrixXcd m = gen.matrix(g->size(), g->size());
  try {
    operator_norm(DenseOperator::from_dense(g, m), 1e-15, 1);
    FAIL() << "expected a numerical failure";
  } catch (const NumericalFailure& e) {
    EXPECT_EQ(static_cast<int64_t>(e.last_iterate().size()), g->size());
    EXPECT_GT(e.last_estimate(), 0.0);
  }
}

TEST(Operators, AlgebraExamples) {
  Gen gen(23);
  auto g = make_grid(2, 1);
  Eigen::MatrixXcd m = gen.matrix(g->size(), g->size());
  DenseOperator T = DenseOperator::from_dense(g, m);
  EXPECT_TRUE(power(T, 0).to_dense().isApprox(Eigen::MatrixXcd::Identity(g->size(), g->size())));
  FourierVector f = gen.vector(g);
  EXPECT_TRUE(apply(DenseOperator::identity(g), f).coeffs().isApprox(f.coeffs()));
  Eigen::VectorXcd a = gen.matrix(g->size(), 1), b = gen.matrix(g->size(), 1);
  auto ab = compose(DenseOperator::diagonal(g, a), DenseOperator::diagonal(g, b)).to_dense();
  EXPECT_TRUE(ab.isApprox(Eigen::MatrixXcd(a.cwiseProduct(b).asDiagonal())));
  EXPECT_TRUE(power(T, 3).to_dense().isApprox(m * m * m, 1e-12));
  EXPECT_TRUE(adjoint(T).to_dense().isApprox(m.adjoint()));
}

TEST(Operators, GridMismatchIsADimensionError) {
  auto g1 = make_grid(2, 1), g2 = make_grid(2, 2);
  EXPECT_THROW(compose(DenseOperator::identity(g1), DenseOperator::identity(g2)), DimensionError);
  EXPECT_THROW(apply(DenseOperator::identity(g1), FourierVector(g2)), DimensionError);
}

TEST(Blocked, BlocksReproduceDenseNormAndPowers) {
  Gen gen(29);
  auto g = make_grid(2, 2);
  // block structure from a random permutation-like sparsity pattern
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(g->size(), g->size());
  for (int64_t c = 0; c < g->size(); ++c) m(gen.integer(0, g->size() - 1), c) = gen.complex();
  BlockedOperator B(DenseOperator::from_dense(g, m));
  EXPECT_NEAR(B.norm(), Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues()(0), 1e-12);
  for (int n : {1, 2, 5}) {
    Eigen::MatrixXcd p = m;
    for (int i = 1; i < n; ++i) p = p * m;
    EXPECT_TRUE(B.power(n).to_operator().to_dense().isApprox(p, 1e-12)) << n;
    double want = Eigen::JacobiSVD<Eigen::MatrixXcd>(p).singularValues()(0);
    EXPECT_NEAR(B.top_singular_power(n, nullptr, nullptr).first, want, 1e-12 * std::max(1.0, want));
  }
  cplx lambda(0.3, 0.4);
  Eigen::MatrixXcd shifted = lambda * Eigen::MatrixXcd::Identity(g->size(), g->size()) - m;
  auto sv = Eigen::JacobiSVD<Eigen::MatrixXcd>(shifted).singularValues();
  EXPECT_NEAR(B.smallest_singular(lambda), sv(sv.size() - 1), 1e-12);
}

TEST(Blocked, ImplicitPowerMatchesExplicitOnLargeBlock) {
  Gen gen(31);
  auto g = make_grid(2, 12);
  Eigen::MatrixXcd m = gen.matrix(g->size(), g->size()) / std::sqrt(static_cast<double>(g->size()));
  Eigen::VectorXd l = Eigen::VectorXd::Constant(g->size(), 0.9), r = Eigen::VectorXd::Constant(g->size(), 0.8);
  BlockedOperator B(DenseOperator::from_dense(g, m));
  Eigen::MatrixXcd p = l.asDiagonal() * (m * m) * r.asDiagonal();
  double want = Eigen::BDCSVD<Eigen::MatrixXcd>(p).singularValues()(0);
  NormOptions opt;
  opt.tol = 1e-12;
  EXPECT_NEAR(B.top_singular_power(2, &l, &r, opt).first, want, 1e-9 * want);
}
