#include "gen.hpp"

#include "tordiss/propagation.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace tordiss;

namespace {
const IntMatrix kCat = IntMatrix::parse("2,1;1,1");

// Doubling-map closed forms with Q = I.
double doubling_noisy_log(double eps, double alpha, int n) {
  return -std::pow(eps, alpha) * (std::pow(2.0, n * alpha) - 1) / (1 - std::pow(2.0, -alpha));
}
double doubling_coarse_log(double eps, double alpha, int n) {
  return -std::pow(eps, alpha) * (std::pow(2.0, n * alpha) + 1);
}

// Brute-force noisy norm of a linear map: max over a box of prod_l g(eps A^l k).
double brute_noisy(const IntMatrix& A, const NoiseKernel& g, double eps, int n, int box) {
  double best = 0;
  int d = A.dim();
  IntVec k(static_cast<size_t>(d), -box);
  while (true) {
    if (std::any_of(k.begin(), k.end(), [](int64_t v) { return v != 0; })) {
      IntVec v = k;
      double p = 1;
      for (int l = 1; l <= n; ++l) {
        v = *checked_apply(A, v);
        p *= eigenvalue_on_mode(g, eps, ModeIndex(v.begin(), v.end()));
      }
      best = std::max(best, p);
    }
    int i = 0;
    while (i < d && ++k[static_cast<size_t>(i)] > box) k[static_cast<size_t>(i++)] = -box;
    if (i == d) break;
  }
  return best;
}
}  // namespace

TEST(Lattice, DoublingClosedForms) {
  for (double alpha : {0.5, 1.0, 2.0})
    for (double eps : {0.1, 0.01}) {
      LatticeOrbitEngine e(LinearToralMap(IntMatrix::parse("2")), NoiseKernel::alpha_stable(1, alpha), eps);
      for (int n = 1; n <= 20; ++n) {
        double want = doubling_noisy_log(eps, alpha, n);
        EXPECT_NEAR(static_cast<double>(e.noisy_norm(n).log_value), want, 1e-12 * std::abs(want)) << alpha << ' ' << n;
        double wc = doubling_coarse_log(eps, alpha, n);
        EXPECT_NEAR(static_cast<double>(e.coarse_norm(n).log_value), wc, 1e-12 * std::abs(wc));
      }
    }
  LatticeOrbitEngine e(LinearToralMap(IntMatrix::parse("2")), NoiseKernel::alpha_stable(1, 2.0), 0.01);
  EXPECT_NEAR(e.noisy_norm(1).value, std::exp(-0.0004), 1e-15);
  EXPECT_NEAR(e.noisy_norm(1).value, 0.9996001, 1e-7);
}

TEST(Lattice, TranslationIsPowerOfNoiseNorm) {
  TranslationMap t({0.41421356237309503, 0.7320508075688772});
  for (double alpha : {1.0, 2.0}) {
    LatticeOrbitEngine e(t, NoiseKernel::alpha_stable(2, alpha), 0.1);
    double g = std::exp(-std::pow(0.1, alpha));
    for (int n : {1, 5, 50, 1000}) EXPECT_NEAR(e.noisy_norm(n).value, std::pow(g, n), 1e-13 * std::pow(g, n));
    for (int n : {1, 7, 1000}) EXPECT_NEAR(e.coarse_norm(n).value, g * g, 1e-15);
    EXPECT_TRUE(e.coarse_plateau_proven());
    EXPECT_TRUE(e.non_weakly_mixing());
  }
}

TEST(Lattice, IdentityCoarseIsSquaredNoiseNorm) {
  LatticeOrbitEngine e(LinearToralMap(IntMatrix::identity(2)), NoiseKernel::alpha_stable(2, 2.0), 0.2);
  for (int n : {1, 3, 40}) EXPECT_NEAR(e.coarse_norm(n).value, std::exp(-0.08), 1e-15);
  EXPECT_TRUE(e.coarse_plateau_proven());
}

TEST(Lattice, CatMapExampleAndBruteForce) {
  auto g = NoiseKernel::alpha_stable(2, 2.0);
  LatticeOrbitEngine e(LinearToralMap(kCat), g, 0.1);
  // A is unimodular, so Ak runs over every nonzero lattice vector: A(1,-1) = (1,0) and ||T|| = ||G||
  EXPECT_NEAR(e.noisy_norm(1).value, std::exp(-0.01), 1e-15);
  EXPECT_EQ(mode_action(LinearToralMap(kCat), ModeIndex{1, -1}, 1).small(), (IntVec{1, 0}));
  for (int n = 1; n <= 4; ++n) EXPECT_NEAR(e.noisy_norm(n).value, brute_noisy(kCat, g, 0.1, n, 10), 1e-14) << n;
}

TEST(Lattice, RandomMapsMatchBruteForce) {
  Gen gen(103);
  for (int trial = 0; trial < 20; ++trial) {
    IntMatrix A = gen.unimodular(2, 4);
    auto g = NoiseKernel::alpha_stable(2, gen.real(0.5, 2.0));
    double eps = gen.real(0.05, 0.5);
    LatticeOrbitEngine e(LinearToralMap(A), g, eps);
    int n = static_cast<int>(gen.integer(1, 3));
    double want = brute_noisy(A, g, eps, n, 12);
    EXPECT_NEAR(e.noisy_norm(n).value, want, 1e-13) << A.str() << " n=" << n;
  }
}

TEST(Lattice, BigIntegerOrbitsAtLargeN) {
  LatticeOrbitEngine e(LinearToralMap(kCat), NoiseKernel::alpha_stable(2, 2.0), 1e-10);
  // each factor is e^{-eps^2 |A^l k|^2}; the top mode grows like phi^{2l}
  auto v = e.noisy_norm(60);
  EXPECT_TRUE(std::isfinite(static_cast<double>(v.log_value)));
  EXPECT_LT(v.log_value, -1e10L);
  ASSERT_TRUE(v.argmax.has_value());
}

TEST(Lattice, TimeReversalSymmetry) {
  Gen gen(107);
  for (int trial = 0; trial < 15; ++trial) {
    IntMatrix A = gen.unimodular(2, 5);
    LinearToralMap fwd(A), bwd(*unimodular_inverse(A));
    auto g = NoiseKernel::alpha_stable(2, 2.0);
    double eps = gen.real(0.02, 0.3);
    LatticeOrbitEngine ef(fwd, g, eps), eb(bwd, g, eps);
    for (int n = 1; n <= 6; ++n)
      EXPECT_EQ(ef.coarse_norm(n).log_value, eb.coarse_norm(n).log_value) << A.str() << ' ' << n;
  }
}

TEST(Lattice, NormBoundsAndMonotoneDecrease) {
  Gen gen(109);
  for (int trial = 0; trial < 15; ++trial) {
    int d = static_cast<int>(gen.integer(1, 3));
    IntMatrix A = gen.unimodular(d, 5);
    auto g = NoiseKernel::alpha_stable(d, gen.real(0.5, 2.0));
    double eps = gen.real(0.05, 0.4);
    LatticeOrbitEngine e(LinearToralMap(A), g, eps);
    long double lg = noise_norm(g, eps).log_value;
    long double prev = 0;
    for (int n = 1; n <= 8; ++n) {
      long double v = e.noisy_norm(n).log_value;
      EXPECT_LT(v, prev);
      EXPECT_LE(v, n * lg * (1 - 1e-14L));
      EXPECT_LE(e.coarse_norm(n).log_value, 2 * lg * (1 - 1e-14L));
      prev = v;
    }
  }
}

TEST(Dense, CrossValidatesLatticeEngine) {
  auto g = NoiseKernel::alpha_stable(2, 2.0);
  const double eps = 0.3;
  LatticeOrbitEngine lat(LinearToralMap(kCat), g, eps);
  DenseOptions opt;
  opt.K = 24;
  DenseEngine dense(LinearToralMap(kCat), g, eps, opt);
  for (int n = 1; n <= 3; ++n) {
    auto a = lat.noisy_norm(n), b = dense.noisy_norm(n);
    EXPECT_NEAR(a.value, b.value, 1e-8) << n;
    EXPECT_LT(b.leakage, 1e-6);
    EXPECT_NEAR(lat.coarse_norm(n).value, dense.coarse_norm(n).value, 1e-8) << n;
  }
}

TEST(Dense, DoublingCrossValidation) {
  auto g = NoiseKernel::alpha_stable(1, 2.0);
  DenseOptions opt;
  opt.K = 256;
  LatticeOrbitEngine lat(LinearToralMap(IntMatrix::parse("2")), g, 0.1);
  DenseEngine dense(LinearToralMap(IntMatrix::parse("2")), g, 0.1, opt);
  for (int n = 1; n <= 6; ++n) EXPECT_NEAR(lat.noisy_norm(n).value, dense.noisy_norm(n).value, 1e-8) << n;
}

TEST(Dense, ResolventExamples) {
  auto g = NoiseKernel::alpha_stable(1, 2.0);
  DenseOptions opt;
  opt.K = 4;
  // huge noise kills every mode: T = 0 numerically
  DenseEngine zero(LinearToralMap(IntMatrix::parse("2")), g, 100.0, opt);
  EXPECT_NEAR(resolvent_sigma_min(zero, std::polar(1.0, 0.3)), 1.0, 1e-12);
  TranslationMap t({0.41421356237309503});
  DenseEngine tr(t, g, 0.1, opt);
  // normal operator: sigma_min at lambda equals the distance to the nearest eigenvalue
  Gen gen(113);
  for (int trial = 0; trial < 20; ++trial) {
    cplx lambda = std::polar(1.0, gen.real(0, 2 * std::numbers::pi));
    double want = 1e9;
    for (int k = -4; k <= 4; ++k)
      if (k) want = std::min(want, std::abs(lambda - std::polar(std::exp(-0.01 * k * k), 2 * std::numbers::pi * k * t.theta()[0])));
    EXPECT_NEAR(resolvent_sigma_min(tr, lambda), want, 1e-12);
  }
}

TEST(Dense, CatResolventStabilizesWithK) {
  auto g = NoiseKernel::alpha_stable(2, 2.0);
  DenseOptions a, b;
  a.K = 12;
  b.K = 24;
  DenseEngine ea(LinearToralMap(kCat), g, 0.4, a), eb(LinearToralMap(kCat), g, 0.4, b);
  for (double th : {0.0, 1.0, 2.5}) {
    cplx l = std::polar(1.0, th);
    EXPECT_NEAR(resolvent_sigma_min(ea, l), resolvent_sigma_min(eb, l), 1e-8) << th;
  }
}

TEST(Dense, SampledDeltaZeroEqualsLinear) {
  auto g = NoiseKernel::alpha_stable(2, 2.0);
  DenseOptions opt;
  opt.K = 8;
  DenseEngine lin(LinearToralMap(kCat), g, 0.2, opt);
  DenseEngine smp(SampledMap(kCat, 0.0, 32), g, 0.2, opt);
  for (int n = 1; n <= 3; ++n) EXPECT_NEAR(lin.noisy_norm(n).value, smp.noisy_norm(n).value, 1e-10);
}

TEST(Dense, LeakageReportsTruncation) {
  auto g = NoiseKernel::alpha_stable(2, 2.0);
  DenseOptions opt;
  opt.K = 4;
  DenseEngine e(LinearToralMap(kCat), g, 0.01, opt);
  // weak noise on a tiny grid: no orbit stays inside for 8 steps
  EXPECT_GT(e.noisy_norm(8).leakage, 0.5);
}

TEST(Dense, PropagateMatchesOperatorPower) {
  Gen gen(127);
  auto g = NoiseKernel::alpha_stable(2, 1.0);
  DenseOptions opt;
  opt.K = 5;
  DenseEngine e(SampledMap(kCat, 0.02, 32), g, 0.1, opt);
  FourierVector f = gen.vector(e.grid());
  DenseOperator T = e.transfer();
  EXPECT_TRUE(e.propagate(f, 3, true).coeffs().isApprox(apply(power(T, 3), f).coeffs(), 1e-12));
}

TEST(Curves, StrictlyDecreasingAndConstantPlateau) {
  auto g = NoiseKernel::alpha_stable(2, 2.0);
  LatticeOrbitEngine cat(LinearToralMap(kCat), g, 0.05);
  auto c = norm_curve(cat, 15, Mode::Noisy);
  ASSERT_EQ(c.entries.size(), 15u);
  for (size_t i = 1; i < c.entries.size(); ++i) EXPECT_LT(c.entries[i].log_value, c.entries[i - 1].log_value);
  LatticeOrbitEngine tr(TranslationMap({0.41421356237309503, 0.7320508075688772}), g, 0.05);
  auto p = norm_curve(tr, 20, Mode::Coarse);
  for (const auto& e : p.entries) EXPECT_EQ(e.log_value, p.entries.front().log_value);
  LatticeOrbitEngine dbl(LinearToralMap(IntMatrix::parse("2")), NoiseKernel::alpha_stable(1, 2.0), 1e-3);
  auto d = norm_curve(dbl, 20, Mode::Noisy);
  for (const auto& e : d.entries) {
    double want = doubling_noisy_log(1e-3, 2.0, static_cast<int>(e.n));
    EXPECT_NEAR(static_cast<double>(e.log_value), want, 1e-12 * std::abs(want));
  }
}
