#include "tordiss/fourier.hpp"

#include "tordiss/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace tordiss {

TruncatedGrid::TruncatedGrid(int d, int64_t K) : d_(d), K_(K) {
  if (d < 1) throw DimensionError("grid dimension must be >= 1");
  if (K < 1) throw DimensionError("grid cutoff must be >= 1");
  side_ = 2 * K + 1;
  int64_t total = 1;
  for (int i = 0; i < d; ++i) {
    if (total > (int64_t{1} << 40) / side_) throw DimensionError("grid too large");
    total *= side_;
  }
  size_ = total - 1;
  zero_pos_ = (total - 1) / 2;
}

ModeIndex TruncatedGrid::mode(int64_t index) const {
  if (index < 0 || index >= size_) throw DimensionError("mode index out of range");
  int64_t p = index < zero_pos_ ? index : index + 1;
  ModeIndex k(static_cast<size_t>(d_));
  for (int i = d_ - 1; i >= 0; --i) {
    k[static_cast<size_t>(i)] = p % side_ - K_;
    p /= side_;
  }
  return k;
}

int64_t TruncatedGrid::index_of(const int64_t* k) const {
  int64_t p = 0;
  for (int i = 0; i < d_; ++i) {
    if (k[i] < -K_ || k[i] > K_) return -1;
    p = p * side_ + (k[i] + K_);
  }
  if (p == zero_pos_) return -1;
  return p < zero_pos_ ? p : p - 1;
}

int64_t TruncatedGrid::index_of(const ModeIndex& k) const {
  if (static_cast<int>(k.size()) != d_) throw DimensionError("mode dimension mismatch");
  return index_of(k.data());
}

GridPtr make_grid(int d, int64_t K) { return std::make_shared<const TruncatedGrid>(d, K); }

FourierVector::FourierVector(GridPtr grid) : grid_(std::move(grid)), c_(Eigen::VectorXcd::Zero(grid_->size())) {}

FourierVector::FourierVector(GridPtr grid, Eigen::VectorXcd coeffs) : grid_(std::move(grid)), c_(std::move(coeffs)) {
  if (c_.size() != grid_->size()) throw DimensionError("coefficient count does not match grid");
}

FourierVector FourierVector::mode(GridPtr grid, const ModeIndex& k, cplx value) {
  FourierVector f(std::move(grid));
  f.set(k, value);
  return f;
}

cplx FourierVector::operator[](const ModeIndex& k) const {
  int64_t i = grid_->index_of(k);
  return i < 0 ? cplx(0) : c_(i);
}

void FourierVector::set(const ModeIndex& k, cplx value) {
  int64_t i = grid_->index_of(k);
  if (i < 0) throw DimensionError("mode outside the grid or zero");
  c_(i) = value;
}

DenseOperator::DenseOperator(GridPtr grid) : grid_(std::move(grid)), m_(grid_->size(), grid_->size()) {}

DenseOperator::DenseOperator(GridPtr grid, SparseC entries) : grid_(std::move(grid)), m_(std::move(entries)) {
  if (m_.rows() != grid_->size() || m_.cols() != grid_->size())
    throw DimensionError("operator dimensions do not match grid");
  m_.makeCompressed();
}

DenseOperator DenseOperator::identity(GridPtr grid) {
  SparseC m(grid->size(), grid->size());
  m.setIdentity();
  return DenseOperator(std::move(grid), std::move(m));
}

DenseOperator DenseOperator::diagonal(GridPtr grid, const Eigen::VectorXcd& diag) {
  if (diag.size() != grid->size()) throw DimensionError("diagonal length does not match grid");
  std::vector<Eigen::Triplet<cplx, int64_t>> t;
  for (int64_t i = 0; i < diag.size(); ++i)
    if (diag(i) != cplx(0)) t.emplace_back(i, i, diag(i));
  SparseC m(grid->size(), grid->size());
  m.setFromTriplets(t.begin(), t.end());
  return DenseOperator(std::move(grid), std::move(m));
}

DenseOperator DenseOperator::from_dense(GridPtr grid, const Eigen::MatrixXcd& d) {
  if (d.rows() != grid->size() || d.cols() != grid->size()) throw DimensionError("matrix does not match grid");
  SparseC m = d.sparseView(cplx(0), 0.0).cast<cplx>();
  return DenseOperator(std::move(grid), std::move(m));
}

namespace {

struct UnionFind {
  std::vector<int64_t> parent;
  explicit UnionFind(int64_t n) : parent(static_cast<size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
  int64_t find(int64_t x) {
    while (parent[static_cast<size_t>(x)] != x) {
      parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
      x = parent[static_cast<size_t>(x)];
    }
    return x;
  }
  void unite(int64_t a, int64_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[static_cast<size_t>(std::max(a, b))] = std::min(a, b);
  }
};

Eigen::VectorXcd start_vector(Eigen::Index n) {
  std::mt19937_64 rng(0x5eedULL + static_cast<uint64_t>(n));
  std::normal_distribution<double> nd;
  Eigen::VectorXcd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x(i) = cplx(nd(rng), nd(rng));
  return x / x.norm();
}

// Block power iteration on M^* M with Rayleigh-Ritz, so nearly equal top singular values
// do not stall convergence of the leading pair. fwd(X) = M X, adj(Y) = M^* Y.
template <class Fwd, class Adj>
std::pair<double, Eigen::VectorXcd> power_top_op(Eigen::Index n, Fwd&& fwd, Adj&& adj, const NormOptions& opt) {
  const Eigen::Index p = std::min<Eigen::Index>(16, n);
  Eigen::MatrixXcd X(n, p);
  X.col(0) = start_vector(n);
  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> normal;
  for (Eigen::Index j = 1; j < p; ++j)
    for (Eigen::Index i = 0; i < n; ++i) X(i, j) = cplx(normal(rng), normal(rng));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(X);
  X = qr.householderQ() * Eigen::MatrixXcd::Identity(n, p);
  double theta = 0;
  Eigen::VectorXcd v = X.col(0);
  for (int it = 0; it < opt.max_iterations; ++it) {
    Eigen::MatrixXcd Z = adj(fwd(X));
    Eigen::MatrixXcd B = X.adjoint() * Z;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (B + B.adjoint()));
    theta = es.eigenvalues()(p - 1);
    if (theta <= 0) return {0.0, X.col(0)};
    Eigen::VectorXcd u = es.eigenvectors().col(p - 1);
    v = X * u;
    double res = (Z * u - theta * v).norm();
    if (res <= opt.tol * theta) return {std::sqrt(theta), v / v.norm()};
    qr.compute(Z);
    X = qr.householderQ() * Eigen::MatrixXcd::Identity(n, p);
  }
  std::vector<cplx> last(v.data(), v.data() + v.size());
  throw NumericalFailure("power iteration did not converge", std::move(last), std::sqrt(theta));
}

std::pair<double, Eigen::VectorXcd> power_top(const Eigen::MatrixXcd& m, const NormOptions& opt) {
  return power_top_op(
      m.cols(), [&](const Eigen::MatrixXcd& X) -> Eigen::MatrixXcd { return m * X; },
      [&](const Eigen::MatrixXcd& Y) -> Eigen::MatrixXcd { return m.adjoint() * Y; }, opt);
}

Eigen::MatrixXcd matrix_power(const Eigen::MatrixXcd& m, int64_t n) {
  Eigen::MatrixXcd result = Eigen::MatrixXcd::Identity(m.rows(), m.cols());
  Eigen::MatrixXcd base = m;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n) base = base * base;
  }
  return result;
}

std::pair<double, Eigen::VectorXcd> svd_top(const Eigen::MatrixXcd& m) {
  if (m.rows() <= 16) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinV);
    return {svd.singularValues()(0), svd.matrixV().col(0)};
  }
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinV);
  return {svd.singularValues()(0), svd.matrixV().col(0)};
}

}  // namespace

double dense_norm(const Eigen::MatrixXcd& m, const NormOptions& opt) {
  if (m.size() == 0) return 0.0;
  if (m.rows() <= opt.svd_limit) {
    if (m.rows() <= 16) return Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues()(0);
    return Eigen::BDCSVD<Eigen::MatrixXcd>(m).singularValues()(0);
  }
  return power_top(m, opt).first;
}

double dense_smallest_singular(const Eigen::MatrixXcd& m, const NormOptions& opt) {
  const Eigen::Index n = m.rows();
  if (n == 0) return std::numeric_limits<double>::infinity();
  if (n == 1) return std::abs(m(0, 0));
  if (n <= opt.smallest_svd_limit) {
    if (n <= 16) return Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues()(n - 1);
    return Eigen::BDCSVD<Eigen::MatrixXcd>(m).singularValues()(n - 1);
  }
  // inverse iteration on (M^* M)^{-1}
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(m);
  if (!(lu.rcond() > 1e-300)) return 0.0;
  Eigen::MatrixXcd mh = m.adjoint();
  Eigen::PartialPivLU<Eigen::MatrixXcd> luh(mh);
  Eigen::VectorXcd x = start_vector(n);
  double nu = 0;
  for (int it = 0; it < opt.max_iterations; ++it) {
    Eigen::VectorXcd y = luh.solve(x);
    Eigen::VectorXcd z = lu.solve(y);
    nu = y.squaredNorm();  // x^* (M^* M)^{-1} x
    double res = (z - nu * x).norm();
    x = z / z.norm();
    if (!std::isfinite(nu)) return 0.0;
    if (res <= opt.tol * nu) return 1.0 / std::sqrt(nu);
  }
  std::vector<cplx> last(x.data(), x.data() + x.size());
  throw NumericalFailure("inverse iteration did not converge", std::move(last), 1.0 / std::sqrt(nu));
}

BlockedOperator::BlockedOperator(const DenseOperator& op) : grid_(op.grid()) {
  const int64_t n = op.size();
  const SparseC& m = op.entries();
  UnionFind uf(n);
  for (int64_t c = 0; c < m.outerSize(); ++c)
    for (SparseC::InnerIterator it(m, c); it; ++it) uf.unite(it.row(), c);
  std::vector<int64_t> block_of(static_cast<size_t>(n), -1);
  for (int64_t i = 0; i < n; ++i) {
    int64_t r = uf.find(i);
    if (block_of[static_cast<size_t>(r)] < 0) {
      block_of[static_cast<size_t>(r)] = static_cast<int64_t>(blocks_.size());
      blocks_.push_back({});
    }
    blocks_[static_cast<size_t>(block_of[static_cast<size_t>(r)])].index.push_back(i);
  }
  std::vector<int64_t> local(static_cast<size_t>(n));
  for (auto& b : blocks_) {
    for (size_t i = 0; i < b.index.size(); ++i) local[static_cast<size_t>(b.index[i])] = static_cast<int64_t>(i);
    b.m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(b.index.size()), static_cast<Eigen::Index>(b.index.size()));
  }
  for (int64_t c = 0; c < m.outerSize(); ++c)
    for (SparseC::InnerIterator it(m, c); it; ++it) {
      auto& b = blocks_[static_cast<size_t>(block_of[static_cast<size_t>(uf.find(c))])];
      b.m(local[static_cast<size_t>(it.row())], local[static_cast<size_t>(c)]) = it.value();
    }
}

BlockedOperator::BlockedOperator(GridPtr grid, std::vector<Block> blocks)
    : grid_(std::move(grid)), blocks_(std::move(blocks)) {}

size_t BlockedOperator::max_block() const {
  size_t s = 0;
  for (auto& b : blocks_) s = std::max(s, b.index.size());
  return s;
}

double BlockedOperator::norm(const NormOptions& opt) const {
  double best = 0;
  for (auto& b : blocks_) {
    if (b.m.cwiseAbs().maxCoeff() == 0.0) continue;
    best = std::max(best, dense_norm(b.m, opt));
  }
  return best;
}

std::pair<double, Eigen::VectorXcd> BlockedOperator::top_singular(const NormOptions& opt) const {
  double best = -1;
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(grid_->size());
  const Block* arg = nullptr;
  Eigen::VectorXcd local;
  for (auto& b : blocks_) {
    if (b.m.cwiseAbs().maxCoeff() == 0.0) continue;
    auto top = static_cast<int64_t>(b.m.rows()) <= opt.svd_limit ? svd_top(b.m) : power_top(b.m, opt);
    if (top.first > best) {
      best = top.first;
      arg = &b;
      local = top.second;
    }
  }
  if (!arg) return {0.0, v};
  for (size_t i = 0; i < arg->index.size(); ++i) v(arg->index[i]) = local(static_cast<Eigen::Index>(i));
  return {best, v};
}

std::pair<double, Eigen::VectorXcd> BlockedOperator::top_singular_power(int64_t n, const Eigen::VectorXd* left,
                                                                     const Eigen::VectorXd* right,
                                                                     const NormOptions& opt) const {
  if (n < 0) throw std::invalid_argument("negative power");
  double best = -1;
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(grid_->size());
  const Block* arg = nullptr;
  Eigen::VectorXcd local;
  for (auto& b : blocks_) {
    if (b.m.cwiseAbs().maxCoeff() == 0.0 && n > 0) continue;
    const Eigen::Index s = b.m.rows();
    Eigen::VectorXcd l = Eigen::VectorXcd::Ones(s), r = Eigen::VectorXcd::Ones(s);
    for (Eigen::Index i = 0; i < s; ++i) {
      if (left) l(i) = (*left)(b.index[static_cast<size_t>(i)]);
      if (right) r(i) = (*right)(b.index[static_cast<size_t>(i)]);
    }
    std::pair<double, Eigen::VectorXcd> top;
    if (static_cast<int64_t>(s) > opt.svd_limit && n * 16 <= static_cast<int64_t>(s)) {
      // products with the block n times are cheaper than forming the power
      auto fwd = [&](const Eigen::MatrixXcd& X) -> Eigen::MatrixXcd {
        Eigen::MatrixXcd Y = r.asDiagonal() * X;
        for (int64_t k = 0; k < n; ++k) Y = b.m * Y;
        return l.asDiagonal() * Y;
      };
      auto adj = [&](const Eigen::MatrixXcd& X) -> Eigen::MatrixXcd {
        Eigen::MatrixXcd Y = l.conjugate().asDiagonal() * X;
        for (int64_t k = 0; k < n; ++k) Y = b.m.adjoint() * Y;
        return r.conjugate().asDiagonal() * Y;
      };
      top = power_top_op(s, fwd, adj, opt);
    } else {
      Eigen::MatrixXcd m = l.asDiagonal() * matrix_power(b.m, n) * r.asDiagonal();
      if (m.cwiseAbs().maxCoeff() == 0.0) continue;
      top = static_cast<int64_t>(s) <= opt.svd_limit ? svd_top(m) : power_top(m, opt);
    }
    if (top.first > best) {
      best = top.first;
      arg = &b;
      local = top.second;
    }
  }
  if (!arg) return {0.0, v};
  for (size_t i = 0; i < arg->index.size(); ++i) v(arg->index[i]) = local(static_cast<Eigen::Index>(i));
  return {best, v};
}

double BlockedOperator::smallest_singular(cplx lambda, const NormOptions& opt) const {
  double best = std::numeric_limits<double>::infinity();
  for (auto& b : blocks_) {
    Eigen::MatrixXcd m = -b.m;
    m.diagonal().array() += lambda;
    best = std::min(best, dense_smallest_singular(m, opt));
  }
  return best;
}

BlockedOperator BlockedOperator::times(const BlockedOperator& other) const {
  if (!(*grid_ == *other.grid_) || blocks_.size() != other.blocks_.size())
    throw DimensionError("block structures differ");
  std::vector<Block> out;
  out.reserve(blocks_.size());
  for (size_t i = 0; i < blocks_.size(); ++i) {
    if (blocks_[i].index != other.blocks_[i].index) throw DimensionError("block structures differ");
    out.push_back({blocks_[i].index, blocks_[i].m * other.blocks_[i].m});
  }
  return BlockedOperator(grid_, std::move(out));
}

BlockedOperator BlockedOperator::power(int64_t n) const {
  if (n < 0) throw std::invalid_argument("negative power");
  std::vector<Block> out;
  out.reserve(blocks_.size());
  for (auto& b : blocks_) out.push_back({b.index, matrix_power(b.m, n)});
  return BlockedOperator(grid_, std::move(out));
}

BlockedOperator BlockedOperator::adjoint() const {
  std::vector<Block> out;
  for (auto& b : blocks_) out.push_back({b.index, b.m.adjoint()});
  return BlockedOperator(grid_, std::move(out));
}

double BlockedOperator::spectral_radius() const {
  double r = 0;
  for (auto& b : blocks_) {
    if (b.m.cwiseAbs().maxCoeff() == 0.0) continue;
    if (b.m.rows() == 1) {
      r = std::max(r, std::abs(b.m(0, 0)));
      continue;
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(b.m, false);
    r = std::max(r, es.eigenvalues().cwiseAbs().maxCoeff());
  }
  return r;
}

std::vector<cplx> BlockedOperator::eigenvalues() const {
  std::vector<cplx> out;
  for (auto& b : blocks_) {
    if (b.m.rows() == 1) {
      out.push_back(b.m(0, 0));
      continue;
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(b.m, false);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i));
  }
  return out;
}

DenseOperator BlockedOperator::to_operator() const {
  std::vector<Eigen::Triplet<cplx, int64_t>> t;
  for (auto& b : blocks_)
    for (Eigen::Index j = 0; j < b.m.cols(); ++j)
      for (Eigen::Index i = 0; i < b.m.rows(); ++i)
        if (b.m(i, j) != cplx(0))
          t.emplace_back(b.index[static_cast<size_t>(i)], b.index[static_cast<size_t>(j)], b.m(i, j));
  SparseC m(grid_->size(), grid_->size());
  m.setFromTriplets(t.begin(), t.end());
  return DenseOperator(grid_, std::move(m));
}

double l2_norm(const FourierVector& f) { return f.coeffs().norm(); }

double sobolev_norm(const FourierVector& f, double s) {
  if (s < 0) throw std::invalid_argument("Sobolev index must be nonnegative");
  const auto& g = *f.grid();
  double acc = 0;
  for (int64_t i = 0; i < g.size(); ++i) {
    cplx c = f.coeffs()(i);
    if (c == cplx(0)) continue;
    double k2 = 0;
    for (auto x : g.mode(i)) k2 += static_cast<double>(x) * static_cast<double>(x);
    acc += std::pow(1.0 + k2, s) * std::norm(c);
  }
  return std::sqrt(acc);
}

double operator_norm(const DenseOperator& T, double tol, int max_iterations) {
  if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
  NormOptions opt;
  opt.tol = tol;
  opt.max_iterations = max_iterations;
  return BlockedOperator(T).norm(opt);
}

double smallest_singular(const DenseOperator& T, cplx lambda) { return BlockedOperator(T).smallest_singular(lambda); }

FourierVector apply(const DenseOperator& T, const FourierVector& f) {
  if (!(*T.grid() == *f.grid())) throw DimensionError("operator and vector grids differ");
  return FourierVector(f.grid(), T.entries() * f.coeffs());
}

DenseOperator compose(const DenseOperator& T, const DenseOperator& S) {
  if (!(*T.grid() == *S.grid())) throw DimensionError("operator grids differ");
  SparseC m = (T.entries() * S.entries()).pruned();
  return DenseOperator(T.grid(), std::move(m));
}

DenseOperator power(const DenseOperator& T, int64_t n) {
  if (n < 0) throw std::invalid_argument("negative power");
  if (n == 0) return DenseOperator::identity(T.grid());
  return BlockedOperator(T).power(n).to_operator();
}

DenseOperator adjoint(const DenseOperator& T) {
  SparseC m = T.entries().adjoint();
  return DenseOperator(T.grid(), std::move(m));
}

}  // namespace tordiss
