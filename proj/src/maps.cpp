#include "tordiss/maps.hpp"

#include "tordiss/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>
#include <numbers>
#include <sstream>

namespace tordiss {

namespace {

Eigen::MatrixXd to_real(const IntMatrix& A) {
  Eigen::MatrixXd m(A.dim(), A.dim());
  for (int i = 0; i < A.dim(); ++i)
    for (int j = 0; j < A.dim(); ++j) m(i, j) = static_cast<double>(A(i, j));
  return m;
}

double frac(double x) { return x - std::floor(x); }

}  // namespace

LinearToralMap::LinearToralMap(IntMatrix A) : A_(std::move(A)), det_(determinant(A_)) {
  if (det_ == 0) throw std::invalid_argument("toral endomorphism needs det A != 0");
  inverse_ = unimodular_inverse(A_);
}

const IntMatrix& LinearToralMap::inverse() const {
  if (!inverse_) throw std::logic_error("map is not an automorphism");
  return *inverse_;
}

std::string LinearToralMap::describe() const { return "linear A=" + A_.str(); }

TranslationMap::TranslationMap(std::vector<double> theta) : theta_(std::move(theta)) {
  if (theta_.empty()) throw DimensionError("translation vector must be nonempty");
  for (auto& t : theta_) t = frac(t);
}

std::string TranslationMap::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "translation theta=";
  for (size_t i = 0; i < theta_.size(); ++i) os << (i ? "," : "") << theta_[i];
  return os.str();
}

SampledMap::SampledMap(IntMatrix A, double delta, int64_t N) : A_(std::move(A)), delta_(delta), N_(N) {
  const int d = A_.dim();
  if (N < 1) throw std::invalid_argument("sample count must be positive");
  if (delta != 0.0 && d != 2) throw DimensionError("the perturbation family is defined for d = 2");
  if (determinant(A_) == 0) throw std::invalid_argument("linear part must be nonsingular");
  int64_t total = 1;
  for (int i = 0; i < d; ++i) total *= N;
  values_.resize(static_cast<size_t>(total * d));
  jacobians_.resize(static_cast<size_t>(total * d * d));
  IntMatrix At = A_.transpose();
  std::vector<int64_t> n(static_cast<size_t>(d), 0);
  for (int64_t s = 0; s < total; ++s) {
    int64_t r = s;
    for (int i = d - 1; i >= 0; --i) {
      n[static_cast<size_t>(i)] = r % N;
      r /= N;
    }
    if (delta == 0.0) {
      for (int i = 0; i < d; ++i) {
        __int128 acc = 0;
        for (int j = 0; j < d; ++j) acc += static_cast<__int128>(At(i, j)) * n[static_cast<size_t>(j)];
        int64_t m = static_cast<int64_t>(((acc % N) + N) % N);
        values_[static_cast<size_t>(s * d + i)] = static_cast<double>(m) / static_cast<double>(N);
      }
    } else {
      Eigen::VectorXd x(d);
      for (int i = 0; i < d; ++i) x(i) = static_cast<double>(n[static_cast<size_t>(i)]) / static_cast<double>(N);
      Eigen::VectorXd y = evaluate(x);
      for (int i = 0; i < d; ++i) values_[static_cast<size_t>(s * d + i)] = y(i);
    }
    Eigen::MatrixXd J = jacobian(sample_point(s));
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) jacobians_[static_cast<size_t>(s * d * d + i * d + j)] = J(i, j);
    min_abs_det_ = std::min(min_abs_det_, std::abs(J.determinant()));
  }
  if (min_abs_det_ < 1 - 1e-9) throw std::invalid_argument("sampled map fails the volume-preservation check");
}

std::string SampledMap::describe() const {
  std::ostringstream os;
  os << "perturbed A=" << A_.str() << " delta=" << delta_ << " N=" << N_;
  return os.str();
}

Eigen::VectorXd SampledMap::evaluate(const Eigen::VectorXd& x) const {
  constexpr double tau = 2 * std::numbers::pi;
  Eigen::VectorXd y = x;
  if (delta_ != 0.0) {
    y(0) += delta_ * std::sin(tau * y(1));
    y(1) += delta_ * std::sin(tau * y(0));
  }
  Eigen::VectorXd z = to_real(A_).transpose() * y;
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = frac(z(i));
  return z;
}

Eigen::MatrixXd SampledMap::jacobian(const Eigen::VectorXd& x) const {
  constexpr double tau = 2 * std::numbers::pi;
  Eigen::MatrixXd At = to_real(A_).transpose();
  if (delta_ == 0.0) return At;
  Eigen::Matrix2d s1, s2;
  s1 << 1, delta_ * tau * std::cos(tau * x(1)), 0, 1;
  double y0 = x(0) + delta_ * std::sin(tau * x(1));
  s2 << 1, 0, delta_ * tau * std::cos(tau * y0), 1;
  return At * s2 * s1;
}

double SampledMap::phase(const ModeIndex& k, const std::vector<int64_t>& n) const {
  const int d = dim();
  if (delta_ == 0.0) {
    // k . A^t n = (A k) . n, reduced mod N exactly
    __int128 acc = 0;
    for (int i = 0; i < d; ++i) {
      __int128 ak = 0;
      for (int j = 0; j < d; ++j) ak += static_cast<__int128>(A_(i, j)) * k[static_cast<size_t>(j)];
      acc += (ak % N_) * n[static_cast<size_t>(i)];
    }
    int64_t m = static_cast<int64_t>(((acc % N_) + N_) % N_);
    return static_cast<double>(m) / static_cast<double>(N_);
  }
  int64_t s = 0;
  for (int i = 0; i < d; ++i) s = s * N_ + n[static_cast<size_t>(i)];
  double acc = 0;
  for (int i = 0; i < d; ++i) acc += static_cast<double>(k[static_cast<size_t>(i)]) * values_[static_cast<size_t>(s * d + i)];
  return frac(acc);
}

Eigen::VectorXd SampledMap::sample_point(int64_t s) const {
  const int d = dim();
  Eigen::VectorXd x(d);
  for (int i = d - 1; i >= 0; --i) {
    x(i) = static_cast<double>(s % N_) / static_cast<double>(N_);
    s /= N_;
  }
  return x;
}

Eigen::VectorXd SampledMap::image(int64_t s) const {
  const int d = dim();
  Eigen::VectorXd y(d);
  for (int i = 0; i < d; ++i) y(i) = values_[static_cast<size_t>(s * d + i)];
  return y;
}

Eigen::MatrixXd SampledMap::sample_jacobian(int64_t s) const {
  const int d = dim();
  Eigen::MatrixXd J(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) J(i, j) = jacobians_[static_cast<size_t>(s * d * d + i * d + j)];
  return J;
}

int map_dim(const TorusMap& m) {
  return std::visit([](const auto& x) { return x.dim(); }, m);
}

std::string describe(const TorusMap& m) {
  return std::visit([](const auto& x) { return x.describe(); }, m);
}

LatticeVector mode_action(const LinearToralMap& map, const LatticeVector& k, int64_t n) {
  if (n < 0) throw std::invalid_argument("mode_action needs n >= 0");
  if (k.dim() != map.dim()) throw DimensionError("mode dimension mismatch");
  if (k.is_zero()) throw std::invalid_argument("mode_action needs k != 0");
  LatticeVector v = k;
  for (int64_t i = 0; i < n; ++i) v.apply(map.matrix());
  return v;
}

LatticeVector mode_action(const LinearToralMap& map, const ModeIndex& k, int64_t n) {
  return mode_action(map, LatticeVector(IntVec(k.begin(), k.end())), n);
}

ExpansionProfile expansion_profile(const TorusMap& map) {
  ExpansionProfile p;
  if (std::holds_alternative<TranslationMap>(map)) {
    p.df_inverse_norm = 1.0;
    return p;
  }
  if (auto* lin = std::get_if<LinearToralMap>(&map)) {
    Eigen::MatrixXd A = to_real(lin->matrix());
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
    p.df_norm = svd.singularValues()(0);
    p.df_inverse_norm = 1.0 / svd.singularValues()(svd.singularValues().size() - 1);
    Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
    Eigen::VectorXd mods = es.eigenvalues().cwiseAbs();
    p.mu = mods.maxCoeff();
    if (mods.maxCoeff() > 1 + 1e-12) p.lambda_u = mods.maxCoeff();
    if (mods.minCoeff() < 1 - 1e-12) p.lambda_s = mods.minCoeff();
    return p;
  }
  const auto& s = std::get<SampledMap>(map);
  p.lower_estimate = true;
  p.grid_spacing = 1.0 / static_cast<double>(s.samples());
  double inv = 0;
  for (int64_t i = 0; i < s.sample_count(); ++i) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(s.sample_jacobian(i));
    p.df_norm = std::max(p.df_norm, svd.singularValues()(0));
    inv = std::max(inv, 1.0 / svd.singularValues()(svd.singularValues().size() - 1));
  }
  p.df_inverse_norm = inv;
  // growth of ||D F^n|| along orbits from a subset of samples
  const int n = 8;
  const int64_t stride = std::max<int64_t>(1, s.sample_count() / 4096);
  double mu = 1;
  for (int64_t i = 0; i < s.sample_count(); i += stride) {
    Eigen::VectorXd x = s.sample_point(i);
    Eigen::MatrixXd J = Eigen::MatrixXd::Identity(s.dim(), s.dim());
    for (int t = 0; t < n; ++t) {
      J = s.jacobian(x) * J;
      x = s.evaluate(x);
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(J);
    mu = std::max(mu, std::pow(svd.singularValues()(0), 1.0 / n));
  }
  p.mu = std::min(mu, p.df_norm);
  return p;
}

bool ergodicity_test(const LinearToralMap& map) {
  IntPoly P = characteristic_polynomial(map.matrix());
  const int d = map.dim();
  for (int m = 1; m <= 2 * d * d + 2; ++m)
    if (euler_phi(m) <= d && divides(cyclotomic(m), P)) return false;
  return true;
}

EntropyReport entropy_report(const LinearToralMap& map, const std::optional<std::vector<IntPoly>>& hint) {
  EntropyReport rep;
  rep.char_poly = characteristic_polynomial(map.matrix());
  std::vector<IntPoly> factors;
  if (hint) {
    if (!verify_factorization(rep.char_poly, *hint))
      throw std::invalid_argument("factorization hint does not multiply back to the characteristic polynomial");
    factors = *hint;
  } else {
    if (map.dim() > 6) throw UnsupportedError("d > 6 needs a verified factorization hint");
    factors = factor_monic(rep.char_poly);
  }
  // per irreducible factor: simple roots, so the numerics stay accurate
  rep.h_hat = std::numeric_limits<double>::infinity();
  for (auto& f : factors) {
    FactorEntropy fe;
    fe.factor = f;
    fe.degree = f.degree();
    bool cyclotomic_factor = false;
    for (int m = 1; m <= 4 * fe.degree * fe.degree + 2 && !cyclotomic_factor; ++m)
      cyclotomic_factor = euler_phi(m) == fe.degree && cyclotomic(m) == f;
    long double h = 0;
    for (auto& z : roots(f)) {
      rep.eigenvalues.emplace_back(static_cast<double>(z.real()), static_cast<double>(z.imag()));
      if (!cyclotomic_factor && std::abs(z) > 1 + 1e-12L) h += std::log(std::abs(z));
    }
    fe.h = static_cast<double>(h);
    fe.h_hat = fe.h / fe.degree;
    rep.h += fe.h;
    rep.h_hat = std::min(rep.h_hat, fe.h_hat);
    rep.factors.push_back(std::move(fe));
  }
  rep.ergodic = ergodicity_test(map);
  return rep;
}

}  // namespace tordiss
