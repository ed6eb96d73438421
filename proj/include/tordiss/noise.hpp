#pragma once

#include "tordiss/fourier.hpp"
#include "tordiss/lattice_search.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace tordiss {

enum class KernelKind { AlphaStable, Custom };

// Monotone decay envelope e(r) >= sup_{|xi| >= r} |g(xi)|, capped at 1.
struct Envelope {
  enum class Type { None, Exp, Power };
  Type type = Type::None;
  double c = 0;  // exp: e^{-c r^p}; power: C r^{-p}
  double p = 0;

  bool present() const { return type != Type::None; }
  double operator()(double r) const;
  // -ln e(r), never negative
  long double neg_log(long double r) const;
  static Envelope parse(const std::string& text);  // "exp:c,p" | "power:C,p" | ""
  std::string str() const;
};

class NoiseKernel {
public:
  static NoiseKernel alpha_stable(int d, double alpha, const Eigen::MatrixXd& Q);
  static NoiseKernel alpha_stable(int d, double alpha) { return alpha_stable(d, alpha, Eigen::MatrixXd::Identity(d, d)); }
  // Symbol radial in the Q-norm, tabulated at increasing radii starting at 0, linear in between
  // and zero beyond the last radius. alpha is the small-argument exponent used by the bounds.
  static NoiseKernel custom(int d, double alpha, const Eigen::MatrixXd& Q, std::vector<double> radii,
                            std::vector<double> values, Envelope envelope);
  static NoiseKernel custom_from_file(int d, double alpha, const Eigen::MatrixXd& Q, const std::string& path,
                                      Envelope envelope);

  int dim() const { return d_; }
  double alpha() const { return alpha_; }
  KernelKind kind() const { return kind_; }
  const Eigen::MatrixXd& Q() const { return Q_; }
  double q_min() const { return q_min_; }
  double q_max() const { return q_max_; }
  const Envelope& envelope() const { return env_; }
  bool is_gaussian() const { return kind_ == KernelKind::AlphaStable && alpha_ == 2.0; }
  bool q_is_scalar() const;
  std::string describe() const;

  long double qform(const long double* xi) const;
  double symbol(const double* xi) const;
  // -ln|g(xi)|, +inf where the symbol vanishes
  long double phi(const long double* xi) const;
  // Tabulated symbol as a function of the Q-norm (custom kernels).
  double table_value(double r) const;

private:
  int d_ = 1;
  double alpha_ = 2;
  KernelKind kind_ = KernelKind::AlphaStable;
  Eigen::MatrixXd Q_;
  double q_min_ = 1, q_max_ = 1;
  std::vector<double> radii_, values_;
  Envelope env_;
};

struct NoiseNorm {
  double value = 1;       // sup over nonzero k of |g(eps k)|
  long double log_value = 0;
  IntVec argmax;
  int64_t points = 0;
};

struct MomentEstimate {
  double alpha = 0;
  double M = 0;
  enum class Method { Analytic, Quadrature } method = Method::Analytic;
};

struct MomentCheck {
  double alpha = 0;
  double c_alpha = 0;           // sup (1 - cos 2 pi x) / |x|^alpha
  double M = 0;
  int64_t samples = 0;
  int64_t violations = 0;
  double worst_ratio = 0;       // max (1 - g) / (C M |xi|^alpha) over nonzero samples
  std::vector<std::pair<double, double>> small_xi_ratio;  // (|xi|, (1 - g)/|xi|^2) when alpha = 2
};

struct PoissonEntry {
  double eps = 0;
  double lattice_sum = 0;       // eps^d sum_k g(eps k)^2
  double integral = 0;          // int g^2
  double discrepancy = 0;
  double log10_discrepancy = 0;
  double tail_bound = 0;
};

struct PoissonReport {
  std::vector<PoissonEntry> entries;
  bool monotone = false;        // discrepancy shrinks as eps shrinks
  int digits = 0;
};

double symbol_at(const NoiseKernel& kernel, const std::vector<double>& xi);
double eigenvalue_on_mode(const NoiseKernel& kernel, double eps, const ModeIndex& k);
NoiseNorm noise_norm(const NoiseKernel& kernel, double eps, const SearchPolicy& policy = {});
FourierVector apply_noise(const NoiseKernel& kernel, double eps, const FourierVector& f);
Eigen::VectorXd noise_diagonal(const NoiseKernel& kernel, double eps, const TruncatedGrid& grid);
double smoothing_defect(const NoiseKernel& kernel, double eps, const FourierVector& f);
MomentEstimate moment(const NoiseKernel& kernel, double alpha_prime);
double cosine_constant(double alpha);
MomentCheck moment_fourier_check(const NoiseKernel& kernel, double alpha_prime,
                                 const std::vector<std::vector<double>>& xi_samples);
double poisson_integral(const NoiseKernel& kernel);
PoissonReport poisson_sum_check(const NoiseKernel& kernel, const std::vector<double>& eps_grid);

}  // namespace tordiss
