#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>
#include <cstdint>
#include <memory>
#include <vector>

namespace tordiss {

using cplx = std::complex<double>;
using ModeIndex = std::vector<int64_t>;

// Nonzero modes of the sup-norm box [-K,K]^d in lexicographic order.
class TruncatedGrid {
public:
  TruncatedGrid(int d, int64_t K);

  int dim() const { return d_; }
  int64_t cutoff() const { return K_; }
  int64_t size() const { return size_; }

  ModeIndex mode(int64_t index) const;
  // -1 when k is zero or outside the box.
  int64_t index_of(const ModeIndex& k) const;
  int64_t index_of(const int64_t* k) const;
  bool contains(const ModeIndex& k) const { return index_of(k) >= 0; }
  // Index of -k; lexicographic order makes this an involution on indices.
  int64_t negated(int64_t index) const { return size_ - 1 - index; }

  bool operator==(const TruncatedGrid& o) const { return d_ == o.d_ && K_ == o.K_; }

private:
  int d_;
  int64_t K_;
  int64_t side_;
  int64_t size_;
  int64_t zero_pos_;
};

using GridPtr = std::shared_ptr<const TruncatedGrid>;
GridPtr make_grid(int d, int64_t K);

class FourierVector {
public:
  explicit FourierVector(GridPtr grid);
  FourierVector(GridPtr grid, Eigen::VectorXcd coeffs);
  static FourierVector mode(GridPtr grid, const ModeIndex& k, cplx value = 1.0);

  const GridPtr& grid() const { return grid_; }
  const Eigen::VectorXcd& coeffs() const { return c_; }
  Eigen::VectorXcd& coeffs() { return c_; }
  cplx operator[](const ModeIndex& k) const;
  void set(const ModeIndex& k, cplx value);

private:
  GridPtr grid_;
  Eigen::VectorXcd c_;
};

using SparseC = Eigen::SparseMatrix<cplx, Eigen::ColMajor, int64_t>;

// Square operator on a truncated grid. Entries are kept in compressed form since the
// maps of interest act on modes almost diagonally in blocks.
class DenseOperator {
public:
  explicit DenseOperator(GridPtr grid);
  DenseOperator(GridPtr grid, SparseC entries);
  static DenseOperator identity(GridPtr grid);
  static DenseOperator diagonal(GridPtr grid, const Eigen::VectorXcd& diag);
  static DenseOperator from_dense(GridPtr grid, const Eigen::MatrixXcd& m);

  const GridPtr& grid() const { return grid_; }
  int64_t size() const { return grid_->size(); }
  const SparseC& entries() const { return m_; }
  cplx operator()(int64_t row, int64_t col) const { return m_.coeff(row, col); }
  Eigen::MatrixXcd to_dense() const { return Eigen::MatrixXcd(m_); }

private:
  GridPtr grid_;
  SparseC m_;
};

struct NormOptions {
  double tol = 1e-10;
  int max_iterations = 10000;
  int64_t svd_limit = 500;             // exact SVD up to this block size
  int64_t smallest_svd_limit = 2000;   // smallest singular value by SVD up to this block size
};

// Connected components of the sparsity graph, each held as a dense block.
class BlockedOperator {
public:
  struct Block {
    std::vector<int64_t> index;
    Eigen::MatrixXcd m;
  };

  explicit BlockedOperator(const DenseOperator& op);
  BlockedOperator(GridPtr grid, std::vector<Block> blocks);

  const GridPtr& grid() const { return grid_; }
  const std::vector<Block>& blocks() const { return blocks_; }
  size_t max_block() const;

  double norm(const NormOptions& opt = {}) const;
  double smallest_singular(cplx lambda, const NormOptions& opt = {}) const;
  // Product with another operator of the same block structure.
  BlockedOperator times(const BlockedOperator& other) const;
  BlockedOperator power(int64_t n) const;
  BlockedOperator adjoint() const;
  // Largest singular value and the matching right singular vector (unit length).
  std::pair<double, Eigen::VectorXcd> top_singular(const NormOptions& opt = {}) const;
  // Same for diag(left) B^n diag(right) without storing the power; null diagonals mean identity.
  std::pair<double, Eigen::VectorXcd> top_singular_power(int64_t n, const Eigen::VectorXd* left,
                                                         const Eigen::VectorXd* right,
                                                         const NormOptions& opt = {}) const;
  double spectral_radius() const;
  std::vector<cplx> eigenvalues() const;
  DenseOperator to_operator() const;

private:
  GridPtr grid_;
  std::vector<Block> blocks_;
};

double l2_norm(const FourierVector& f);
double sobolev_norm(const FourierVector& f, double s);
double operator_norm(const DenseOperator& T, double tol = 1e-10, int max_iterations = 10000);
double smallest_singular(const DenseOperator& T, cplx lambda);
FourierVector apply(const DenseOperator& T, const FourierVector& f);
DenseOperator compose(const DenseOperator& T, const DenseOperator& S);
DenseOperator power(const DenseOperator& T, int64_t n);
DenseOperator adjoint(const DenseOperator& T);

// Dense kernels shared with the block code.
double dense_norm(const Eigen::MatrixXcd& m, const NormOptions& opt);
double dense_smallest_singular(const Eigen::MatrixXcd& m, const NormOptions& opt);

}  // namespace tordiss
