#include "gen.hpp"

#include "tordiss/analysis.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <memory>

using namespace tordiss;

namespace {
const IntMatrix kCat = IntMatrix::parse("2,1;1,1");
const TranslationMap kTranslation({0.41421356237309503, 0.7320508075688772});

// Smallest n with eps^2 (4^n - 1) / (3/4) > 1, in exact integers for eps = 1/m.
int64_t doubling_tau(int64_t m) {
  BigInt four = 1;
  for (int64_t n = 1;; ++n) {
    four *= 4;
    if (4 * (four - 1) > 3 * BigInt(m) * m) return n;
  }
}

// floor(eps^{-2}) + 1 for eps = 1/m, exactly.
int64_t translation_tau(int64_t m) { return m * m + 1; }
}  // namespace

TEST(Threshold, TieRule) {
  EXPECT_FALSE(below_threshold(-1.0L, std::exp(-1.0)));
  EXPECT_FALSE(below_threshold(-1.0L - 1e-16L, std::exp(-1.0)));
  EXPECT_TRUE(below_threshold(-1.0L - 1e-12L, std::exp(-1.0)));
  EXPECT_TRUE(below_threshold(-2.0L, std::exp(-1.0)));
}

TEST(Dissipation, DoublingExamples) {
  auto g = NoiseKernel::alpha_stable(1, 2.0);
  LatticeOrbitEngine e(LinearToralMap(IntMatrix::parse("2")), g, 0.01);
  EXPECT_EQ(dissipation_time(e, Mode::Noisy), TauValue::finite(7));
  for (int64_t m : {3, 10, 100, 1000, 12345}) {
    LatticeOrbitEngine em(LinearToralMap(IntMatrix::parse("2")), g, 1.0 / m);
    EXPECT_EQ(dissipation_time(em, Mode::Noisy).n, doubling_tau(m)) << m;
  }
}

TEST(Dissipation, TranslationExamples) {
  auto g = NoiseKernel::alpha_stable(2, 2.0);
  LatticeOrbitEngine e(kTranslation, g, 0.1);
  EXPECT_EQ(dissipation_time(e, Mode::Noisy), TauValue::finite(101));
  EXPECT_EQ(dissipation_time(e, Mode::Coarse), TauValue::infinite());
  for (int64_t m : {4, 7, 30, 250}) {
    LatticeOrbitEngine em(kTranslation, g, 1.0 / m);
    int64_t tau = dissipation_time(em, Mode::Noisy).n;
    // 1/m is inexact in binary, so the oracle may differ by one at exact ties only
    EXPECT_LE(std::abs(tau - translation_tau(m)), 1) << m;
  }
  // large eps: the coarse norm dips below eta immediately
  LatticeOrbitEngine big(kTranslation, g, 1.0);
  EXPECT_EQ(dissipation_time(big, Mode::Coarse), TauValue::finite(1));
}

TEST(Dissipation, CapIsReported) {
  LatticeOrbitEngine e(kTranslation, NoiseKernel::alpha_stable(2, 2.0), 0.001);
  DissipationOptions opt;
  opt.n_cap = 1000;
  auto t = dissipation_time(e, Mode::Noisy, opt);
  EXPECT_EQ(t.kind, TauValue::Kind::ExceedsCap);
  EXPECT_EQ(t.n, 1000);
}

TEST(Dissipation, MatchesLinearScan) {
  Gen gen(131);
  for (int trial = 0; trial < 20; ++trial) {
    IntMatrix A = gen.unimodular(2, 5);
    LinearToralMap map(A);
    if (!ergodicity_test(map)) continue;
    double eps = std::exp(gen.real(std::log(1e-4), std::log(0.3)));
    LatticeOrbitEngine e(map, NoiseKernel::alpha_stable(2, gen.real(0.5, 2.0)), eps);
    for (Mode mode : {Mode::Noisy, Mode::Coarse}) {
      int64_t n = 1;
      while (!below_threshold(e.norm(n, mode).log_value, std::exp(-1.0))) ++n;
      EXPECT_EQ(dissipation_time(e, mode), TauValue::finite(n)) << A.str() << ' ' << to_string(mode);
    }
  }
}

TEST(Dissipation, NonincreasingInEps) {
  auto g = NoiseKernel::alpha_stable(2, 2.0);
  int64_t prev = 0;
  for (double eps = 0.3; eps > 1e-5; eps /= 1.7) {
    LatticeOrbitEngine e(LinearToralMap(kCat), g, eps);
    int64_t tau = dissipation_time(e, Mode::Noisy).n;
    EXPECT_GE(tau, prev);
    prev = tau;
  }
}

TEST(RateFit, DoublingIsLogarithmic) {
  auto g = NoiseKernel::alpha_stable(1, 2.0);
  std::vector<std::pair<double, TauValue>> pts;
  for (int i = 0; i <= 12; ++i) {
    double eps = std::pow(10.0, -2 - i * 4.0 / 12);
    LatticeOrbitEngine e(LinearToralMap(IntMatrix::parse("2")), g, eps);
    pts.emplace_back(eps, dissipation_time(e, Mode::Noisy));
  }
  auto fit = rate_fit(pts);
  EXPECT_EQ(fit.model, RateFit::Model::Logarithmic);
  EXPECT_NEAR(fit.R_star(), 1 / std::log(2.0), 0.05 / std::log(2.0));
}

TEST(RateFit, TranslationIsPower) {
  auto g = NoiseKernel::alpha_stable(2, 2.0);
  std::vector<std::pair<double, TauValue>> pts;
  for (int i = 0; i <= 9; ++i) {
    double eps = 0.1 * std::pow(0.004 / 0.1, i / 9.0);
    LatticeOrbitEngine e(kTranslation, g, eps);
    pts.emplace_back(eps, dissipation_time(e, Mode::Noisy));
  }
  auto fit = rate_fit(pts);
  EXPECT_EQ(fit.model, RateFit::Model::Power);
  EXPECT_NEAR(fit.beta(), 2.0, 0.04);
}

TEST(RateFit, CatIsLogarithmic) {
  auto g = NoiseKernel::alpha_stable(2, 2.0);
  std::vector<std::pair<double, TauValue>> pts;
  for (int i = 0; i <= 12; ++i) {
    double eps = std::pow(10.0, -2 - i * 4.0 / 12);
    LatticeOrbitEngine e(LinearToralMap(kCat), g, eps);
    pts.emplace_back(eps, dissipation_time(e, Mode::Noisy));
  }
  auto fit = rate_fit(pts);
  EXPECT_EQ(fit.model, RateFit::Model::Logarithmic);
  double want = 2 / std::log((3 + std::sqrt(5.0)) / 2);
  EXPECT_NEAR(fit.R_star(), want, 0.1 * want);
}

TEST(RateFit, InfiniteValuesAreExcluded) {
  std::vector<std::pair<double, TauValue>> pts{{0.1, TauValue::infinite()}, {0.01, TauValue::infinite()}};
  auto fit = rate_fit(pts);
  EXPECT_EQ(fit.model, RateFit::Model::None);
}

TEST(DecayFit, SyntheticSeries) {
  std::vector<int64_t> n;
  std::vector<double> geo, pw;
  for (int64_t i = 1; i <= 20; ++i) {
    n.push_back(i);
    geo.push_back(std::pow(0.5, static_cast<double>(i)));
    pw.push_back(std::pow(static_cast<double>(i), -2.0));
  }
  auto a = decay_fit(n, geo);
  EXPECT_EQ(a.model, DecayFit::Model::Exponential);
  EXPECT_NEAR(a.sigma, 0.5, 1e-12);
  EXPECT_NEAR(a.exponential.r2, 1.0, 1e-12);
  auto b = decay_fit(n, pw);
  EXPECT_EQ(b.model, DecayFit::Model::Power);
  EXPECT_NEAR(b.beta, 2.0, 1e-12);
}

TEST(DecayFit, ScalingInvariance) {
  Gen gen(137);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<int64_t> n;
    std::vector<double> v;
    double s = gen.real(0.1, 0.9), b = gen.real(0.5, 3);
    int kind = static_cast<int>(gen.integer(0, 2));
    for (int64_t i = 1; i <= 15; ++i) {
      n.push_back(i);
      double x = static_cast<double>(i);
      double base = kind == 0 ? std::pow(s, x) : kind == 1 ? std::pow(x, -b) : std::exp(-0.01 * std::exp(0.4 * x));
      v.push_back(base * std::exp(gen.real(-0.05, 0.05)));
    }
    auto a = decay_fit(n, v);
    double c = std::exp(gen.real(-20, 20));
    std::vector<double> w = v;
    for (auto& x : w) x *= c;
    auto z = decay_fit(n, w);
    EXPECT_EQ(a.model, z.model);
    EXPECT_NEAR(a.sigma, z.sigma, 1e-9);
    EXPECT_NEAR(a.beta, z.beta, 1e-9);
    EXPECT_NEAR(a.exponential.r2, z.exponential.r2, 1e-9);
    EXPECT_NEAR(a.power.r2, z.power.r2, 1e-9);
  }
}

TEST(Pseudospectrum, Examples) {
  DenseOptions opt;
  opt.K = 4;
  DenseEngine zero(LinearToralMap(IntMatrix::parse("2")), NoiseKernel::alpha_stable(1, 2.0), 100.0, opt);
  EXPECT_NEAR(pseudospectrum_distance(zero, 1.0).distance, 1.0, 1e-12);
  opt.K = 8;
  for (double eps : {0.3, 0.1, 0.03}) {
    DenseEngine tr(kTranslation, NoiseKernel::alpha_stable(2, 2.0), eps, opt);
    EXPECT_NEAR(pseudospectrum_distance(tr, 1.0).distance, -std::expm1(-eps * eps), 1e-6 * eps * eps) << eps;
  }
}

TEST(Pseudospectrum, DecreasesWithEpsForCat) {
  DenseOptions opt;
  opt.K = 16;
  double prev = 2;
  for (double eps : {0.4, 0.2, 0.1}) {
    DenseEngine e(LinearToralMap(kCat), NoiseKernel::alpha_stable(2, 2.0), eps, opt);
    double d = pseudospectrum_distance(e, 1.0).distance;
    EXPECT_LT(d, prev);
    prev = d;
  }
}

TEST(Observables, Parse) {
  auto f = parse_observable("1,0:1;0,1:0.5-0.5i", 2);
  ASSERT_EQ(f.size(), 2u);
  EXPECT_EQ(f[0].first, (ModeIndex{1, 0}));
  EXPECT_EQ(f[1].second, cplx(0.5, -0.5));
  EXPECT_NEAR(observable_norm(f), std::sqrt(1.5), 1e-15);
  EXPECT_ANY_THROW(parse_observable("1:1", 2));
  EXPECT_ANY_THROW(parse_observable("0,0:1", 2));
}

TEST(Correlations, DoublingVanishes) {
  auto f = parse_observable("1:1;-1:1", 1);
  LatticeOrbitEngine e(LinearToralMap(IntMatrix::parse("2")), NoiseKernel::alpha_stable(1, 2.0), 0.1);
  auto c = correlation_series(e, f, f, 10, false);
  ASSERT_EQ(c.C.size(), 11u);
  EXPECT_EQ(c.C[0], cplx(2.0));
  for (size_t i = 1; i < c.C.size(); ++i) EXPECT_EQ(c.C[i], cplx(0.0));
}

TEST(Correlations, MatchesDirectSum) {
  Gen gen(139);
  auto f = parse_observable("1,0:1;-1,0:1;2,1:0.3", 2);
  auto h = parse_observable("1,1:0.7;-1,-1:0.7;0,1:-0.2i;0,-1:0.2i", 2);
  auto g = NoiseKernel::alpha_stable(2, 2.0);
  LinearToralMap cat(kCat);
  LatticeOrbitEngine e(cat, g, 0.2);
  for (bool noisy : {false, true}) {
    auto c = correlation_series(e, f, h, 6, noisy);
    for (int64_t n = 0; n <= 6; ++n) {
      cplx want = 0;
      for (auto& [k, hv] : h) {
        double w = 1;
        for (int64_t l = 1; l <= n && noisy; ++l) {
          auto v = mode_action(cat, k, l).small();
          w *= eigenvalue_on_mode(g, 0.2, ModeIndex(v.begin(), v.end()));
        }
        auto img = mode_action(cat, k, n).small();
        for (auto& [j, fv] : f)
          if (j[0] == -img[0] && j[1] == -img[1]) want += hv * fv * w;
      }
      EXPECT_NEAR(std::abs(c.C[static_cast<size_t>(n)] - want), 0.0, 1e-15) << n << ' ' << noisy;
    }
  }
}

TEST(Correlations, DenseAgreesWithLattice) {
  auto f = parse_observable("1,0:1;-1,0:1", 2);
  auto h = parse_observable("0,1:1;0,-1:1;1,1:0.5;-1,-1:0.5", 2);
  auto g = NoiseKernel::alpha_stable(2, 2.0);
  LatticeOrbitEngine lat(LinearToralMap(kCat), g, 0.1);
  DenseOptions opt;
  opt.K = 24;
  DenseEngine dense(LinearToralMap(kCat), g, 0.1, opt);
  for (bool noisy : {false, true}) {
    auto a = correlation_series(lat, f, h, 5, noisy), b = correlation_series(dense, f, h, 5, noisy);
    for (size_t i = 0; i < a.C.size(); ++i) EXPECT_NEAR(std::abs(a.C[i] - b.C[i]), 0.0, 1e-12);
  }
}

TEST(Correlations, DominatedByOperatorNorm) {
  Gen gen(149);
  auto g = NoiseKernel::alpha_stable(2, 1.5);
  LatticeOrbitEngine e(LinearToralMap(kCat), g, 0.05);
  for (int trial = 0; trial < 10; ++trial) {
    Observable f, h;
    for (int i = 0; i < 4; ++i) {
      f.emplace_back(gen.mode(2, 3), gen.complex());
      h.emplace_back(gen.mode(2, 3), gen.complex());
    }
    auto c = correlation_series(e, f, h, 10, true);
    for (int64_t n = 1; n <= 10; ++n)
      EXPECT_LE(std::abs(c.C[static_cast<size_t>(n)]),
                observable_norm(f) * observable_norm(h) * e.noisy_norm(n).value * (1 + 1e-12));
  }
}

TEST(Envelope, CatRateIsInverseLambdaToTheS) {
  auto env = correlation_envelope(LinearToralMap(kCat), 12, 1.0, 1.0);
  auto fit = decay_fit(env.n, env.gamma);
  EXPECT_NEAR(fit.sigma, 2 / (3 + std::sqrt(5.0)), 0.05);
  auto dbl = correlation_envelope(LinearToralMap(IntMatrix::parse("2")), 12, 1.0, 0.0);
  for (size_t i = 0; i < dbl.n.size(); ++i) EXPECT_NEAR(dbl.gamma[i], std::pow(0.5, static_cast<double>(dbl.n[i])), 1e-15);
}

TEST(Supexp, CatExampleHolds) {
  auto f = parse_observable("1,0:1", 2);
  auto rep = supexp_bound_check(LinearToralMap(kCat), NoiseKernel::alpha_stable(2, 2.0), 0.1, f, f, 15, 0.5);
  EXPECT_FALSE(rep.skipped);
  ASSERT_FALSE(rep.entries.empty());
  EXPECT_EQ(rep.entries.back().n, 15);
  EXPECT_TRUE(rep.all_ok);
  auto none = supexp_bound_check(LinearToralMap(kCat), NoiseKernel::alpha_stable(2, 2.0), 0.0, f, f, 15, 0.5);
  EXPECT_TRUE(none.skipped);
}

TEST(Bounds, NlnSlope) {
  EXPECT_NEAR(nln_slope(LinearToralMap(kCat), 2.0), 1 / std::log((3 + std::sqrt(5.0)) / 2), 1e-12);
  EXPECT_NEAR(nln_slope(LinearToralMap(kCat), 2.0), 1.0390, 1e-4);
  EXPECT_NEAR(nln_slope(LinearToralMap(kCat), 0.5), 0.5 / std::log((3 + std::sqrt(5.0)) / 2), 1e-12);
  EXPECT_TRUE(std::isinf(nln_slope(kTranslation, 2.0)));
}

TEST(Bounds, SandwichAndWeakMixing) {
  auto g = NoiseKernel::alpha_stable(2, 2.0);
  std::vector<BoundInput> in;
  std::vector<std::unique_ptr<DenseEngine>> dense;
  std::vector<std::unique_ptr<LatticeOrbitEngine>> lat;
  DenseOptions opt;
  opt.K = 8;
  for (double eps : {0.1, 0.05, 0.02}) {
    lat.push_back(std::make_unique<LatticeOrbitEngine>(kTranslation, g, eps));
    dense.push_back(std::make_unique<DenseEngine>(kTranslation, g, eps, opt));
    in.push_back({eps, dissipation_time(*lat.back(), Mode::Noisy), "lattice", dense.back().get()});
  }
  auto rep = bound_report(kTranslation, g, in, BoundOptions{});
  EXPECT_FALSE(rep.violated);
  for (const auto& e : rep.entries) {
    EXPECT_NEAR(e.gb_upper1, 1 / (e.eps * e.eps) + 1, 1e-9 * e.gb_upper1);
    EXPECT_LE(static_cast<double>(e.tau.n), e.gb_upper1 * (1 + 1e-12));
    ASSERT_TRUE(e.gb_lower.has_value());
    EXPECT_LE(*e.gb_lower, static_cast<double>(e.tau.n) * (1 + 1e-12));
    ASSERT_TRUE(e.weakmix_lower.has_value());
    double want = (1 - std::exp(-1.0)) / -std::expm1(-e.eps * e.eps) - 1;
    EXPECT_NEAR(*e.weakmix_lower, want, 1e-9 * want);
    EXPECT_GE(static_cast<double>(e.tau.n), *e.weakmix_lower);
  }
}

TEST(Bounds, CatUpperBoundHolds) {
  auto g = NoiseKernel::alpha_stable(2, 2.0);
  std::vector<BoundInput> in;
  std::vector<std::unique_ptr<LatticeOrbitEngine>> lat;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    lat.push_back(std::make_unique<LatticeOrbitEngine>(LinearToralMap(kCat), g, eps));
    in.push_back({eps, dissipation_time(*lat.back(), Mode::Noisy), "lattice", nullptr});
  }
  auto rep = bound_report(LinearToralMap(kCat), g, in, BoundOptions{});
  EXPECT_FALSE(rep.violated);
  EXPECT_FALSE(rep.entries[0].weakmix_lower.has_value());
}
