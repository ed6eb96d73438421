#pragma once

#include "tordiss/fourier.hpp"
#include "tordiss/integer.hpp"
#include "tordiss/polynomial.hpp"

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace tordiss {

// x -> A^t x mod 1, so that the Koopman operator sends e_k to e_{Ak}.
class LinearToralMap {
public:
  explicit LinearToralMap(IntMatrix A);

  int dim() const { return A_.dim(); }
  const IntMatrix& matrix() const { return A_; }
  const BigInt& det() const { return det_; }
  bool invertible() const { return inverse_.has_value(); }  // |det A| = 1
  const IntMatrix& inverse() const;
  bool is_identity() const { return A_.is_identity(); }
  std::string describe() const;

private:
  IntMatrix A_;
  BigInt det_;
  std::optional<IntMatrix> inverse_;
};

class TranslationMap {
public:
  explicit TranslationMap(std::vector<double> theta);
  int dim() const { return static_cast<int>(theta_.size()); }
  const std::vector<double>& theta() const { return theta_; }
  std::string describe() const;

private:
  std::vector<double> theta_;
};

// Grid-sampled volume-preserving map from the shipped family
// F = A^t o S2 o S1 with S1(x) = (x1 + delta sin 2 pi x2, x2), S2(y) = (y1, y2 + delta sin 2 pi y1).
// Each shear has unit Jacobian, so F preserves Lebesgue measure exactly for every delta.
// delta = 0 gives the linear map A^t x (any d); delta != 0 needs d = 2.
class SampledMap {
public:
  SampledMap(IntMatrix A, double delta, int64_t N);

  int dim() const { return A_.dim(); }
  int64_t samples() const { return N_; }
  double delta() const { return delta_; }
  const IntMatrix& matrix() const { return A_; }
  std::string describe() const;

  // Exact evaluation anywhere on the torus (result reduced to [0,1)^d).
  Eigen::VectorXd evaluate(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& x) const;
  // Fractional part of k . F(x) at the sample with multi-index n (exact for delta = 0).
  double phase(const ModeIndex& k, const std::vector<int64_t>& n) const;

  int64_t sample_count() const { return static_cast<int64_t>(values_.size()) / dim(); }
  Eigen::VectorXd sample_point(int64_t s) const;
  Eigen::VectorXd image(int64_t s) const;
  Eigen::MatrixXd sample_jacobian(int64_t s) const;
  double min_abs_det() const { return min_abs_det_; }

private:
  IntMatrix A_;
  double delta_;
  int64_t N_;
  std::vector<double> values_;     // N^d images, row-major multi-index
  std::vector<double> jacobians_;  // N^d Jacobians, row-major d x d each
  double min_abs_det_ = 1;
};

using TorusMap = std::variant<LinearToralMap, TranslationMap, SampledMap>;

int map_dim(const TorusMap& m);
std::string describe(const TorusMap& m);

struct ExpansionProfile {
  double df_norm = 1;          // ||DF||_inf
  double mu = 1;               // maximal expansion rate
  std::optional<double> df_inverse_norm;
  std::optional<double> lambda_u, lambda_s;
  bool lower_estimate = false;  // sampled maps: maxima over the sample grid only
  double grid_spacing = 0;
};

struct FactorEntropy {
  IntPoly factor;
  int degree = 0;
  double h = 0;       // sum of ln|lambda| over roots outside the unit circle
  double h_hat = 0;   // h / degree
};

struct EntropyReport {
  double h = 0;
  std::vector<FactorEntropy> factors;
  double h_hat = 0;
  bool ergodic = false;
  IntPoly char_poly;
  std::vector<std::complex<double>> eigenvalues;
};

LatticeVector mode_action(const LinearToralMap& map, const LatticeVector& k, int64_t n);
LatticeVector mode_action(const LinearToralMap& map, const ModeIndex& k, int64_t n);
ExpansionProfile expansion_profile(const TorusMap& map);
bool ergodicity_test(const LinearToralMap& map);
EntropyReport entropy_report(const LinearToralMap& map,
                             const std::optional<std::vector<IntPoly>>& factorization_hint = std::nullopt);

struct GalerkinMatrix {
  DenseOperator U;
  std::vector<double> leaked;   // per column: 1 - retained squared mass
  double max_leak = 0;
};

// Galerkin Koopman matrix U_{jk} = N^{-d} sum_x e^{-2 pi i j.x} e^{2 pi i k.F(x)} by one FFT per column.
GalerkinMatrix koopman_matrix(const SampledMap& map, const GridPtr& grid, unsigned jobs = 1,
                              double drop_tol = 1e-14);

// Fourier coefficients of e_k o F^n on an M^d sample grid (F^n evaluated exactly pointwise),
// returned as (mode, coefficient) pairs above drop_tol.
std::vector<std::pair<ModeIndex, cplx>> transported_mode(const SampledMap& map, const ModeIndex& k, int n,
                                                         int64_t M, double drop_tol = 1e-13);

using TransportVisitor = std::function<void(int n, size_t index, const std::vector<std::pair<ModeIndex, cplx>>&)>;
// transported_mode for every k in ks and every n = 0..n_max, sharing the orbit of the sample grid.
void transported_modes(const SampledMap& map, const std::vector<ModeIndex>& ks, int n_max, int64_t M,
                       const TransportVisitor& visit, double drop_tol = 1e-13);

}  // namespace tordiss
