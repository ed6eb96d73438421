#include "tordiss/propagation.hpp"

#include "tordiss/error.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

namespace tordiss {

std::string to_string(Mode m) { return m == Mode::Noisy ? "noisy" : "coarse"; }

PropagationEngine::PropagationEngine(NoiseKernel kernel, double eps) : kernel_(std::move(kernel)), eps_(eps) {
  if (!(eps > 0)) throw std::invalid_argument("engines need eps > 0");
}

std::vector<NormValue> PropagationEngine::sequence(int64_t n_max, Mode mode) const {
  std::vector<NormValue> out;
  for (int64_t n = 1; n <= n_max; ++n) out.push_back(norm(n, mode));
  return out;
}

namespace {

using LMat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

LMat to_ld(const IntMatrix& A) {
  LMat m(A.dim(), A.dim());
  for (int i = 0; i < A.dim(); ++i)
    for (int j = 0; j < A.dim(); ++j) m(i, j) = static_cast<long double>(A(i, j));
  return m;
}

NormValue from_log(long double lg) {
  NormValue v;
  v.log_value = lg;
  v.value = static_cast<double>(std::exp(lg));
  return v;
}

}  // namespace

LatticeOrbitEngine::LatticeOrbitEngine(TorusMap map, NoiseKernel kernel, double eps, SearchPolicy policy)
    : PropagationEngine(std::move(kernel), eps), map_(std::move(map)), policy_(policy) {
  if (std::holds_alternative<SampledMap>(map_)) throw std::invalid_argument("lattice engine needs a linear map or translation");
  if (map_dim(map_) != kernel_.dim()) throw DimensionError("map and kernel dimensions differ");
  noise_ = noise_norm(kernel_, eps_, policy_);
  if (std::holds_alternative<TranslationMap>(map_)) {
    modulus_preserving_ = true;
    non_weakly_mixing_ = true;
    return;
  }
  const auto& lin = std::get<LinearToralMap>(map_);
  non_weakly_mixing_ = !ergodicity_test(lin);
  if (lin.invertible()) {
    Eigen::MatrixXd A(lin.dim(), lin.dim());
    for (int i = 0; i < lin.dim(); ++i)
      for (int j = 0; j < lin.dim(); ++j) A(i, j) = static_cast<double>(lin.matrix()(i, j));
    Eigen::MatrixXd diff = A.transpose() * kernel_.Q() * A - kernel_.Q();
    modulus_preserving_ = diff.cwiseAbs().maxCoeff() <= 1e-12 * kernel_.Q().cwiseAbs().maxCoeff();
  }
}

int64_t LatticeOrbitEngine::best_shift(int64_t n, Mode mode) const {
  const auto& lin = std::get<LinearToralMap>(map_);
  if (!lin.invertible()) return 0;
  const int d = lin.dim();
  LMat A = to_ld(lin.matrix()), Ai = to_ld(lin.inverse());
  // P[l + n] = (A^l)^T A^l for l in [-n, n]
  std::vector<LMat> P(static_cast<size_t>(2 * n + 1));
  LMat M = LMat::Identity(d, d);
  P[static_cast<size_t>(n)] = M;
  for (int64_t l = 1; l <= n; ++l) {
    M = A * M;
    P[static_cast<size_t>(n + l)] = M.transpose() * M;
  }
  M = LMat::Identity(d, d);
  for (int64_t l = 1; l <= n; ++l) {
    M = Ai * M;
    P[static_cast<size_t>(n - l)] = M.transpose() * M;
  }
  int64_t best_m = 0;
  long double best = -1;
  LMat G;
  for (int64_t m = 0; m <= n; ++m) {
    if (mode == Mode::Noisy) {
      if (m == 0) {
        G = LMat::Zero(d, d);
        for (int64_t l = 1; l <= n; ++l) G += P[static_cast<size_t>(n + l)];
      } else {
        // window slides from {1-(m-1) .. n-(m-1)} to {1-m .. n-m}
        G += P[static_cast<size_t>(n + 1 - m)] - P[static_cast<size_t>(n + n - m + 1)];
      }
    } else {
      G = P[static_cast<size_t>(n - m)] + P[static_cast<size_t>(2 * n - m)];
    }
    Eigen::SelfAdjointEigenSolver<LMat> es(G, Eigen::EigenvaluesOnly);
    long double lmin = es.eigenvalues().minCoeff();
    if (std::isfinite(lmin) && lmin > best) {
      best = lmin;
      best_m = m;
    }
  }
  return best_m;
}

NormValue LatticeOrbitEngine::search(const std::vector<int64_t>& window, int64_t shift) const {
  const auto& lin = std::get<LinearToralMap>(map_);
  const int d = lin.dim();
  const int64_t lo = window.front(), hi = window.back();
  const IntMatrix& A = lin.matrix();
  const IntMatrix* Ainv = lin.invertible() ? &lin.inverse() : nullptr;
  if (lo < 0 && !Ainv) throw std::logic_error("negative exponents need an automorphism");

  // certified smallest eigenvalue of G = sum_l (A^l)^T A^l over the window
  LMat Ald = to_ld(A);
  LMat Mlo = LMat::Identity(d, d);
  if (lo < 0) {
    LMat Aild = to_ld(*Ainv);
    for (int64_t i = 0; i < -lo; ++i) Mlo = Aild * Mlo;
  } else {
    for (int64_t i = 0; i < lo; ++i) Mlo = Ald * Mlo;
  }
  LMat G = LMat::Zero(d, d);
  long double floor_g = 0;
  {
    LMat M = Mlo;
    size_t w = 0;
    for (int64_t e = lo; e <= hi; ++e) {
      if (w < window.size() && window[w] == e) {
        LMat P = M.transpose() * M;
        G += P;
        // integer B with |det B| >= 1: lambda_min(B^T B) >= 1 / tr(B^T B)^{d-1}
        floor_g = std::max(floor_g, e == 0 ? 1.0L : 1.0L / std::pow(P.trace(), static_cast<long double>(d - 1)));
        ++w;
      }
      if (e < hi) M = Ald * M;
    }
  }
  Eigen::SelfAdjointEigenSolver<LMat> es(G, Eigen::EigenvaluesOnly);
  long double g_num = es.eigenvalues().minCoeff() - 1e-12L * G.trace();
  long double g_cert = std::max(floor_g, std::isfinite(g_num) ? g_num : 0.0L);
  const long double W = static_cast<long double>(window.size());

  const long double e = eps_;
  std::function<long double(int64_t)> lb;
  if (kernel_.kind() == KernelKind::AlphaStable) {
    const long double c = static_cast<long double>(kernel_.q_min()) * e * e * g_cert;
    const long double a = kernel_.alpha();
    lb = [c, a](int64_t R) {
      long double r = static_cast<long double>(R + 1);
      return std::pow(c * r * r, a / 2);
    };
  } else {
    if (!kernel_.envelope().present())
      throw ConfigError("noise.envelope", "custom symbols need a decay envelope to certify the lattice supremum");
    const Envelope env = kernel_.envelope();
    const long double s = e * std::sqrt(g_cert / W);
    lb = [env, s](int64_t R) { return env.neg_log(s * static_cast<long double>(R + 1)); };
  }

  long double current_best = std::numeric_limits<long double>::infinity();
  std::vector<long double> xi(static_cast<size_t>(d));
  auto objective = [&](const IntVec& j) -> long double {
    LatticeVector v(j);
    if (lo < 0)
      for (int64_t i = 0; i < -lo; ++i) v.apply(*Ainv);
    else
      for (int64_t i = 0; i < lo; ++i) v.apply(A);
    long double sum = 0;
    size_t w = 0;
    for (int64_t ex = lo; ex <= hi; ++ex) {
      if (w < window.size() && window[w] == ex) {
        auto c = v.to_long_double();
        for (int i = 0; i < d; ++i) xi[static_cast<size_t>(i)] = e * c[static_cast<size_t>(i)];
        sum += kernel_.phi(xi.data());
        if (sum >= current_best) return sum;
        ++w;
      }
      if (ex < hi) v.apply(A);
    }
    current_best = std::min(current_best, sum);
    return sum;
  };
  LatticeMinimum m = lattice_minimize(d, objective, lb, policy_);
  NormValue out = from_log(-m.value);
  // report the maximizing mode in original coordinates: k = A^{-shift} j
  LatticeVector k(m.argmin);
  for (int64_t i = 0; i < shift; ++i) k.apply(*Ainv);
  out.argmax = k;
  return out;
}

NormValue LatticeOrbitEngine::noisy_norm(int64_t n) const {
  if (n < 1) throw std::invalid_argument("noisy_norm needs n >= 1");
  if (modulus_preserving_) {
    NormValue v = from_log(static_cast<long double>(n) * noise_.log_value);
    v.argmax = LatticeVector(noise_.argmax);
    return v;
  }
  int64_t m = best_shift(n, Mode::Noisy);
  std::vector<int64_t> window;
  for (int64_t l = 1; l <= n; ++l) window.push_back(l - m);
  return search(window, m);
}

NormValue LatticeOrbitEngine::coarse_norm(int64_t n) const {
  if (n < 1) throw std::invalid_argument("coarse_norm needs n >= 1");
  if (modulus_preserving_) {
    NormValue v = from_log(2 * noise_.log_value);
    v.argmax = LatticeVector(noise_.argmax);
    return v;
  }
  int64_t m = best_shift(n, Mode::Coarse);
  return search({-m, n - m}, m);
}

std::pair<DenseOperator, std::vector<double>> exact_koopman(const TorusMap& map, const GridPtr& grid) {
  const int64_t size = grid->size();
  std::vector<double> leak(static_cast<size_t>(size), 0.0);
  std::vector<Eigen::Triplet<cplx, int64_t>> t;
  if (auto* tr = std::get_if<TranslationMap>(&map)) {
    if (tr->dim() != grid->dim()) throw DimensionError("grid and map dimensions differ");
    for (int64_t c = 0; c < size; ++c) {
      ModeIndex k = grid->mode(c);
      double ph = 0;
      for (int i = 0; i < tr->dim(); ++i) ph += static_cast<double>(k[static_cast<size_t>(i)]) * tr->theta()[static_cast<size_t>(i)];
      ph -= std::floor(ph);
      t.emplace_back(c, c, std::polar(1.0, 2 * std::numbers::pi * ph));
    }
  } else if (auto* lin = std::get_if<LinearToralMap>(&map)) {
    if (lin->dim() != grid->dim()) throw DimensionError("grid and map dimensions differ");
    for (int64_t c = 0; c < size; ++c) {
      ModeIndex k = grid->mode(c);
      auto ak = checked_apply(lin->matrix(), IntVec(k.begin(), k.end()));
      int64_t r = ak ? grid->index_of(*ak) : -1;
      if (r >= 0) t.emplace_back(r, c, cplx(1.0));
      else leak[static_cast<size_t>(c)] = 1.0;
    }
  } else {
    throw std::invalid_argument("sampled maps are assembled with koopman_matrix");
  }
  SparseC m(size, size);
  m.setFromTriplets(t.begin(), t.end());
  return {DenseOperator(grid, std::move(m)), std::move(leak)};
}

namespace {

BlockedOperator scaled_rows(const BlockedOperator& U, const Eigen::VectorXd& g) {
  std::vector<BlockedOperator::Block> blocks;
  for (auto& b : U.blocks()) {
    Eigen::VectorXd gb(static_cast<Eigen::Index>(b.index.size()));
    for (size_t i = 0; i < b.index.size(); ++i) gb(static_cast<Eigen::Index>(i)) = g(b.index[i]);
    blocks.push_back({b.index, gb.cast<cplx>().asDiagonal() * b.m});
  }
  return BlockedOperator(U.grid(), std::move(blocks));
}

DenseOperator assemble(const TorusMap& map, const GridPtr& grid, unsigned jobs, std::vector<double>& leak) {
  if (auto* s = std::get_if<SampledMap>(&map)) {
    auto gm = koopman_matrix(*s, grid, jobs);
    leak = std::move(gm.leaked);
    return gm.U;
  }
  auto ek = exact_koopman(map, grid);
  leak = std::move(ek.second);
  return ek.first;
}

bool map_non_weakly_mixing(const TorusMap& map) {
  if (std::holds_alternative<TranslationMap>(map)) return true;
  if (auto* lin = std::get_if<LinearToralMap>(&map)) return !ergodicity_test(*lin);
  return false;
}

}  // namespace

DenseEngine::DenseEngine(const TorusMap& map, NoiseKernel kernel, double eps, DenseOptions opt)
    : PropagationEngine(std::move(kernel), eps),
      grid_(make_grid(map_dim(map), opt.K)),
      U_(grid_),
      Ub_(U_),
      T_(U_),
      opt_(opt),
      non_weakly_mixing_(map_non_weakly_mixing(map)) {
  if (map_dim(map) != kernel_.dim()) throw DimensionError("map and kernel dimensions differ");
  U_ = assemble(map, grid_, opt.jobs, leak_);
  init();
}

DenseEngine::DenseEngine(DenseOperator koopman, std::vector<double> column_leak, NoiseKernel kernel, double eps,
                         DenseOptions opt, bool non_weakly_mixing)
    : PropagationEngine(std::move(kernel), eps),
      grid_(koopman.grid()),
      U_(std::move(koopman)),
      leak_(std::move(column_leak)),
      Ub_(U_),
      T_(U_),
      opt_(opt),
      non_weakly_mixing_(non_weakly_mixing) {
  if (grid_->dim() != kernel_.dim()) throw DimensionError("grid and kernel dimensions differ");
  init();
}

void DenseEngine::init() {
  g_ = tordiss::noise_diagonal(kernel_, eps_, *grid_);
  Ub_ = BlockedOperator(U_);
  T_ = scaled_rows(Ub_, g_);
}

DenseOperator DenseEngine::transfer() const { return T_.to_operator(); }

double DenseEngine::leakage_of(const Eigen::VectorXcd& v, int64_t n, Mode mode) const {
  Eigen::VectorXcd w = v;
  if (mode == Mode::Coarse) w = g_.cast<cplx>().cwiseProduct(w);
  double total = 0;
  for (int64_t step = 0; step < n; ++step) {
    double before = w.squaredNorm();
    if (before == 0) break;
    Eigen::VectorXcd u = U_.entries() * w;
    total += std::max(0.0, before - u.squaredNorm()) / before;
    w = mode == Mode::Noisy ? Eigen::VectorXcd(g_.cast<cplx>().cwiseProduct(u)) : u;
  }
  return std::min(1.0, total);
}

NormValue DenseEngine::evaluate(int64_t n, Mode mode) const {
  auto [sigma, v] = mode == Mode::Noisy ? T_.top_singular_power(n, nullptr, nullptr, opt_.norm)
                                        : Ub_.top_singular_power(n, &g_, &g_, opt_.norm);
  NormValue out;
  out.value = sigma;
  out.log_value = sigma > 0 ? std::log(static_cast<long double>(sigma)) : -std::numeric_limits<long double>::infinity();
  out.leakage = sigma > 0 ? leakage_of(v, n, mode) : 1.0;  // all mass lost to truncation
  return out;
}

NormValue DenseEngine::noisy_norm(int64_t n) const {
  if (n < 1) throw std::invalid_argument("noisy_norm needs n >= 1");
  return evaluate(n, Mode::Noisy);
}

NormValue DenseEngine::coarse_norm(int64_t n) const {
  if (n < 1) throw std::invalid_argument("coarse_norm needs n >= 1");
  return evaluate(n, Mode::Coarse);
}

double DenseEngine::resolvent_sigma_min(cplx lambda) const { return T_.smallest_singular(lambda, opt_.norm); }

FourierVector DenseEngine::propagate(const FourierVector& f, int64_t n, bool noisy) const {
  if (!(*f.grid() == *grid_)) throw DimensionError("vector grid differs from engine grid");
  Eigen::VectorXcd w = f.coeffs();
  for (int64_t i = 0; i < n; ++i) {
    w = U_.entries() * w;
    if (noisy) w = g_.cast<cplx>().cwiseProduct(w);
  }
  return FourierVector(grid_, std::move(w));
}

NormValue noisy_norm(const PropagationEngine& engine, int64_t n) { return engine.noisy_norm(n); }
NormValue coarse_norm(const PropagationEngine& engine, int64_t n) { return engine.coarse_norm(n); }

NormCurve norm_curve(const PropagationEngine& engine, int64_t n_max, Mode mode) {
  if (n_max < 1) throw std::invalid_argument("norm_curve needs n_max >= 1");
  NormCurve c;
  c.eps = engine.eps();
  c.mode = mode;
  c.engine = engine.tag();
  auto seq = engine.sequence(n_max, mode);
  for (int64_t n = 1; n <= n_max; ++n) {
    const auto& v = seq[static_cast<size_t>(n - 1)];
    c.entries.push_back({n, v.value, v.log_value, v.leakage});
    c.max_leakage = std::max(c.max_leakage, v.leakage);
  }
  return c;
}

double resolvent_sigma_min(const DenseEngine& engine, cplx lambda) { return engine.resolvent_sigma_min(lambda); }

}  // namespace tordiss
