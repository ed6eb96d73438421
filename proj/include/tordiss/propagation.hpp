#pragma once

#include "tordiss/fourier.hpp"
#include "tordiss/lattice_search.hpp"
#include "tordiss/maps.hpp"
#include "tordiss/noise.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace tordiss {

enum class Mode { Noisy, Coarse };
std::string to_string(Mode m);

struct NormValue {
  double value = 1;
  long double log_value = 0;    // kept separately since values underflow quickly
  double leakage = 0;           // dense engine truncation diagnostic
  std::optional<LatticeVector> argmax;  // lattice engine maximizing mode
};

class PropagationEngine {
public:
  virtual ~PropagationEngine() = default;
  virtual NormValue noisy_norm(int64_t n) const = 0;   // ||T_eps^n||
  virtual NormValue coarse_norm(int64_t n) const = 0;  // ||G U^n G||
  virtual std::string tag() const = 0;
  // The coarse norm provably does not depend on n.
  virtual bool coarse_plateau_proven() const { return false; }
  virtual bool non_weakly_mixing() const { return false; }
  // Norms for n = 1..n_max; engines may share work between consecutive n.
  virtual std::vector<NormValue> sequence(int64_t n_max, Mode mode) const;

  NormValue norm(int64_t n, Mode mode) const { return mode == Mode::Noisy ? noisy_norm(n) : coarse_norm(n); }
  double eps() const { return eps_; }
  const NoiseKernel& kernel() const { return kernel_; }

protected:
  PropagationEngine(NoiseKernel kernel, double eps);
  NoiseKernel kernel_;
  double eps_;
};

// Exact engine for linear maps and translations: T^n e_k = prod_l g(eps A^l k) e_{A^n k}.
class LatticeOrbitEngine : public PropagationEngine {
public:
  LatticeOrbitEngine(TorusMap map, NoiseKernel kernel, double eps, SearchPolicy policy = {});

  NormValue noisy_norm(int64_t n) const override;
  NormValue coarse_norm(int64_t n) const override;
  std::string tag() const override { return "lattice"; }
  bool coarse_plateau_proven() const override { return modulus_preserving_; }
  bool non_weakly_mixing() const override { return non_weakly_mixing_; }

  const TorusMap& map() const { return map_; }
  // g(eps k) for the top mode; sup over k != 0
  const NoiseNorm& noise() const { return noise_; }

private:
  NormValue search(const std::vector<int64_t>& window, int64_t shift) const;
  int64_t best_shift(int64_t n, Mode mode) const;

  TorusMap map_;
  SearchPolicy policy_;
  NoiseNorm noise_;
  bool modulus_preserving_ = false;
  bool non_weakly_mixing_ = false;
};

struct DenseOptions {
  int64_t K = 16;
  unsigned jobs = 1;
  NormOptions norm;
};

// Truncated engine: T = diag(g(eps k)) U_K on the grid |k|_inf <= K.
class DenseEngine : public PropagationEngine {
public:
  DenseEngine(const TorusMap& map, NoiseKernel kernel, double eps, DenseOptions opt);
  // Reuse an assembled Koopman matrix (e.g. one Galerkin assembly for many eps).
  DenseEngine(DenseOperator koopman, std::vector<double> column_leak, NoiseKernel kernel, double eps,
              DenseOptions opt, bool non_weakly_mixing = false);

  NormValue noisy_norm(int64_t n) const override;
  NormValue coarse_norm(int64_t n) const override;
  std::string tag() const override { return "dense"; }
  bool non_weakly_mixing() const override { return non_weakly_mixing_; }

  const GridPtr& grid() const { return grid_; }
  const DenseOperator& koopman() const { return U_; }
  DenseOperator transfer() const;  // T = G U
  const std::vector<double>& column_leak() const { return leak_; }
  const BlockedOperator& blocked_transfer() const { return T_; }
  const Eigen::VectorXd& noise_diagonal() const { return g_; }
  double resolvent_sigma_min(cplx lambda) const;
  double spectral_radius() const { return T_.spectral_radius(); }
  // Apply T (noisy) or U (noiseless) n times to a vector.
  FourierVector propagate(const FourierVector& f, int64_t n, bool noisy) const;

private:
  void init();
  NormValue evaluate(int64_t n, Mode mode) const;
  double leakage_of(const Eigen::VectorXcd& v, int64_t n, Mode mode) const;

  GridPtr grid_;
  DenseOperator U_;
  std::vector<double> leak_;
  Eigen::VectorXd g_;
  BlockedOperator Ub_;
  BlockedOperator T_;
  DenseOptions opt_;
  bool non_weakly_mixing_ = false;
};

struct NormPoint {
  int64_t n = 0;
  double value = 1;
  long double log_value = 0;
  double leakage = 0;
};

struct NormCurve {
  double eps = 0;
  Mode mode = Mode::Noisy;
  std::string engine;
  std::vector<NormPoint> entries;
  double max_leakage = 0;
};

NormValue noisy_norm(const PropagationEngine& engine, int64_t n);
NormValue coarse_norm(const PropagationEngine& engine, int64_t n);
NormCurve norm_curve(const PropagationEngine& engine, int64_t n_max, Mode mode);
double resolvent_sigma_min(const DenseEngine& engine, cplx lambda);

// Exact Koopman matrix of a linear map or translation on the grid, plus per-column leaked mass.
std::pair<DenseOperator, std::vector<double>> exact_koopman(const TorusMap& map, const GridPtr& grid);

}  // namespace tordiss
