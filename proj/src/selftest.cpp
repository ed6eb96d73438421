#include "tordiss/runner.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

namespace tordiss {

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

SelftestCase check(const std::string& name, const std::function<std::string()>& body) {
  SelftestCase c;
  c.name = name;
  try {
    c.detail = body();
    c.passed = c.detail.empty();
  } catch (const std::exception& e) {
    c.detail = std::string("exception: ") + e.what();
  }
  return c;
}

std::string fmt(const char* what, double got, double want) {
  std::ostringstream os;
  os.precision(17);
  os << what << ": got " << got << ", expected " << want;
  return os.str();
}

}  // namespace

std::vector<SelftestCase> run_selftest() {
  std::vector<SelftestCase> out;
  const LinearToralMap doubling(IntMatrix(1, {2}));
  const LinearToralMap cat(IntMatrix::parse("2,1;1,1"));

  out.push_back(check("doubling map noisy norms", [&]() -> std::string {
    for (double alpha : {1.0, 2.0}) {
      LatticeOrbitEngine e(doubling, NoiseKernel::alpha_stable(1, alpha), 0.1);
      for (int n = 1; n <= 12; ++n) {
        double want = std::exp(-std::pow(0.1, alpha) * (std::pow(2.0, n * alpha) - 1) / (1 - std::pow(2.0, -alpha)));
        double got = e.noisy_norm(n).value;
        if (rel(got, want) > 1e-10) return fmt("norm", got, want);
      }
    }
    return "";
  }));

  out.push_back(check("doubling map coarse norms", [&]() -> std::string {
    LatticeOrbitEngine e(doubling, NoiseKernel::alpha_stable(1, 2.0), 0.01);
    for (int n = 1; n <= 12; ++n) {
      double want = std::exp(-1e-4 * (std::pow(4.0, n) + 1));
      double got = e.coarse_norm(n).value;
      if (rel(got, want) > 1e-10) return fmt("norm", got, want);
    }
    return "";
  }));

  out.push_back(check("translation dissipation time", [&]() -> std::string {
    TranslationMap t({std::numbers::sqrt2 - 1, std::numbers::sqrt3 - 1});
    for (double eps : {0.1, 0.05, 0.03}) {
      LatticeOrbitEngine e(t, NoiseKernel::alpha_stable(2, 2.0), eps);
      auto tau = dissipation_time(e, Mode::Noisy);
      // eps^-2 within rounding of an integer counts as that integer, as for the decimal eps
      double x = std::pow(eps, -2.0);
      double r = std::round(x);
      int64_t want = static_cast<int64_t>(std::abs(x - r) <= 1e-12 * r ? r : std::floor(x)) + 1;
      if (!(tau == TauValue::finite(want))) return "tau " + tau.str() + ", expected " + std::to_string(want);
      if (dissipation_time(e, Mode::Coarse).kind != TauValue::Kind::Infinite) return "coarse time should be INFINITE";
    }
    return "";
  }));

  out.push_back(check("noise operator norm", [&]() -> std::string {
    for (double alpha : {0.5, 1.0, 2.0})
      for (double eps : {0.3, 0.01}) {
        auto g = noise_norm(NoiseKernel::alpha_stable(2, alpha), eps);
        double want = std::exp(-std::pow(eps, alpha));
        if (rel(g.value, want) > 1e-14) return fmt("||G||", g.value, want);
      }
    return "";
  }));

  out.push_back(check("sampled cat map is a permutation", [&]() -> std::string {
    SampledMap s(cat.matrix(), 0.0, 32);
    auto grid = make_grid(2, 4);
    auto gm = koopman_matrix(s, grid);
    auto [exact, leak] = exact_koopman(cat, grid);
    Eigen::MatrixXcd diff = gm.U.to_dense() - exact.to_dense();
    double worst = diff.cwiseAbs().maxCoeff();
    if (worst > 1e-10) return fmt("max deviation", worst, 0);
    return "";
  }));

  out.push_back(check("translation pseudospectrum distance", [&]() -> std::string {
    TranslationMap t({std::numbers::sqrt2 - 1});
    DenseOptions opt;
    opt.K = 8;
    for (double eps : {0.2, 0.1}) {
      DenseEngine e(t, NoiseKernel::alpha_stable(1, 2.0), eps, opt);
      double got = pseudospectrum_distance(e, 1.0).distance;
      double want = 1 - std::exp(-eps * eps);
      if (rel(got, want) > 1e-6) return fmt("d(1)", got, want);
    }
    return "";
  }));

  out.push_back(check("cosine constant", [&]() -> std::string {
    double got = cosine_constant(2.0), want = 2 * std::numbers::pi * std::numbers::pi;
    if (rel(got, want) > 1e-12) return fmt("C_2", got, want);
    return "";
  }));

  out.push_back(check("cat map entropy", [&]() -> std::string {
    auto r = entropy_report(cat);
    double want = std::log((3 + std::sqrt(5.0)) / 2);
    if (rel(r.h, want) > 1e-12) return fmt("h", r.h, want);
    if (!r.ergodic) return "cat map should be ergodic";
    return "";
  }));

  out.push_back(check("Poisson summation", [&]() -> std::string {
    auto rep = poisson_sum_check(NoiseKernel::alpha_stable(2, 2.0), {0.5, 0.2, 0.1});
    if (!rep.monotone) return "discrepancy does not shrink";
    if (rep.entries.back().discrepancy > 1e-8) return fmt("discrepancy", rep.entries.back().discrepancy, 0);
    return "";
  }));

  return out;
}

}  // namespace tordiss
