#include "tordiss/noise.hpp"

#include "tordiss/error.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace tordiss {

double Envelope::operator()(double r) const { return static_cast<double>(std::exp(-neg_log(r))); }

long double Envelope::neg_log(long double r) const {
  switch (type) {
    case Type::Exp:
      return r <= 0 ? 0.0L : static_cast<long double>(c) * std::pow(r, static_cast<long double>(p));
    case Type::Power: {
      if (r <= 0) return 0;
      long double v = static_cast<long double>(p) * std::log(r) - std::log(static_cast<long double>(c));
      return std::max<long double>(0, v);
    }
    case Type::None:
      break;
  }
  return 0;
}

Envelope Envelope::parse(const std::string& text) {
  Envelope e;
  if (text.empty() || text == "none") return e;
  auto colon = text.find(':');
  if (colon == std::string::npos) throw std::invalid_argument("envelope must look like exp:c,p or power:C,p");
  std::string kind = text.substr(0, colon);
  std::string rest = text.substr(colon + 1);
  auto comma = rest.find(',');
  if (comma == std::string::npos) throw std::invalid_argument("envelope needs two parameters");
  e.c = std::stod(rest.substr(0, comma));
  e.p = std::stod(rest.substr(comma + 1));
  if (!(e.c > 0) || !(e.p > 0)) throw std::invalid_argument("envelope parameters must be positive");
  if (kind == "exp") e.type = Type::Exp;
  else if (kind == "power") e.type = Type::Power;
  else throw std::invalid_argument("unknown envelope kind '" + kind + "'");
  return e;
}

std::string Envelope::str() const {
  std::ostringstream os;
  if (type == Type::Exp) os << "exp:" << c << ',' << p;
  else if (type == Type::Power) os << "power:" << c << ',' << p;
  else os << "none";
  return os.str();
}

namespace {

void set_q(const Eigen::MatrixXd& Q, int d, double& qmin, double& qmax) {
  if (Q.rows() != d || Q.cols() != d) throw DimensionError("Q must be d x d");
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-14 * Q.cwiseAbs().maxCoeff())
    throw std::invalid_argument("Q must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q);
  qmin = es.eigenvalues().minCoeff();
  qmax = es.eigenvalues().maxCoeff();
  if (!(qmin > 0)) throw std::invalid_argument("Q must be positive definite");
}

}  // namespace

NoiseKernel NoiseKernel::alpha_stable(int d, double alpha, const Eigen::MatrixXd& Q) {
  if (d < 1) throw DimensionError("kernel dimension must be >= 1");
  if (!(alpha > 0 && alpha <= 2)) throw std::invalid_argument("alpha must lie in (0, 2]");
  NoiseKernel k;
  k.d_ = d;
  k.alpha_ = alpha;
  k.kind_ = KernelKind::AlphaStable;
  k.Q_ = Q;
  set_q(Q, d, k.q_min_, k.q_max_);
  return k;
}

NoiseKernel NoiseKernel::custom(int d, double alpha, const Eigen::MatrixXd& Q, std::vector<double> radii,
                                std::vector<double> values, Envelope envelope) {
  if (d < 1) throw DimensionError("kernel dimension must be >= 1");
  if (!(alpha > 0 && alpha <= 2)) throw std::invalid_argument("alpha must lie in (0, 2]");
  if (radii.size() < 2 || radii.size() != values.size()) throw std::invalid_argument("symbol table needs >= 2 rows");
  if (radii.front() != 0.0 || values.front() != 1.0) throw std::invalid_argument("symbol table must start at (0, 1)");
  for (size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1])) throw std::invalid_argument("symbol table radii must increase");
  for (double v : values)
    if (!(v >= -1 && v <= 1)) throw std::invalid_argument("symbol values must lie in [-1, 1]");
  NoiseKernel k;
  k.d_ = d;
  k.alpha_ = alpha;
  k.kind_ = KernelKind::Custom;
  k.Q_ = Q;
  set_q(Q, d, k.q_min_, k.q_max_);
  k.radii_ = std::move(radii);
  k.values_ = std::move(values);
  k.env_ = envelope;
  return k;
}

NoiseKernel NoiseKernel::custom_from_file(int d, double alpha, const Eigen::MatrixXd& Q, const std::string& path,
                                          Envelope envelope) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read symbol table " + path);
  std::vector<double> r, v;
  std::string line;
  while (std::getline(in, line)) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    for (auto& ch : line)
      if (ch == ',') ch = ' ';
    std::istringstream ls(line);
    double a, b;
    if (ls >> a >> b) {
      r.push_back(a);
      v.push_back(b);
    }
  }
  return custom(d, alpha, Q, std::move(r), std::move(v), envelope);
}

bool NoiseKernel::q_is_scalar() const {
  Eigen::MatrixXd s = Q_(0, 0) * Eigen::MatrixXd::Identity(d_, d_);
  return (Q_ - s).cwiseAbs().maxCoeff() <= 1e-15 * std::abs(Q_(0, 0));
}

std::string NoiseKernel::describe() const {
  std::ostringstream os;
  os << (kind_ == KernelKind::AlphaStable ? "alpha-stable" : "custom") << " d=" << d_ << " alpha=" << alpha_;
  if (kind_ == KernelKind::Custom) os << " envelope=" << env_.str();
  return os.str();
}

long double NoiseKernel::qform(const long double* xi) const {
  long double s = 0;
  for (int i = 0; i < d_; ++i)
    for (int j = 0; j < d_; ++j) s += xi[i] * static_cast<long double>(Q_(i, j)) * xi[j];
  return s;
}

double NoiseKernel::table_value(double r) const {
  if (r >= radii_.back()) return 0.0;
  auto it = std::upper_bound(radii_.begin(), radii_.end(), r);
  size_t i = static_cast<size_t>(it - radii_.begin());
  double t = (r - radii_[i - 1]) / (radii_[i] - radii_[i - 1]);
  return values_[i - 1] + t * (values_[i] - values_[i - 1]);
}

long double NoiseKernel::phi(const long double* xi) const {
  long double q = qform(xi);
  if (kind_ == KernelKind::AlphaStable) {
    if (alpha_ == 2.0) return q;
    return std::pow(q, static_cast<long double>(alpha_) / 2);
  }
  double g = std::abs(table_value(static_cast<double>(std::sqrt(q))));
  if (g == 0.0) return std::numeric_limits<long double>::infinity();
  return -std::log(static_cast<long double>(g));
}

double NoiseKernel::symbol(const double* xi) const {
  std::vector<long double> x(xi, xi + d_);
  if (kind_ == KernelKind::AlphaStable) return static_cast<double>(std::exp(-phi(x.data())));
  return table_value(static_cast<double>(std::sqrt(qform(x.data()))));
}

double symbol_at(const NoiseKernel& kernel, const std::vector<double>& xi) {
  if (static_cast<int>(xi.size()) != kernel.dim()) throw DimensionError("xi dimension mismatch");
  return kernel.symbol(xi.data());
}

double eigenvalue_on_mode(const NoiseKernel& kernel, double eps, const ModeIndex& k) {
  if (eps < 0) throw std::invalid_argument("eps must be nonnegative");
  if (static_cast<int>(k.size()) != kernel.dim()) throw DimensionError("mode dimension mismatch");
  if (eps == 0) return 1.0;
  std::vector<double> xi(k.size());
  for (size_t i = 0; i < k.size(); ++i) xi[i] = eps * static_cast<double>(k[i]);
  return kernel.symbol(xi.data());
}

NoiseNorm noise_norm(const NoiseKernel& kernel, double eps, const SearchPolicy& policy) {
  if (!(eps >= 0)) throw std::invalid_argument("noise norm needs eps >= 0");
  const int d = kernel.dim();
  if (eps == 0) {
    // G_0 is the identity; the supremum is attained at every mode
    NoiseNorm out;
    out.argmax.assign(static_cast<size_t>(d), 0);
    out.argmax[0] = 1;
    return out;
  }
  const long double e = eps;
  std::function<long double(int64_t)> lb;
  if (kernel.kind() == KernelKind::AlphaStable) {
    const long double c = static_cast<long double>(kernel.q_min()) * e * e;
    const long double a = kernel.alpha();
    lb = [c, a](int64_t R) {
      long double r = static_cast<long double>(R + 1);
      return std::pow(c * r * r, a / 2);
    };
  } else {
    if (!kernel.envelope().present())
      throw ConfigError("noise.envelope", "custom symbols need a decay envelope to certify the lattice supremum");
    const Envelope env = kernel.envelope();
    lb = [env, e](int64_t R) { return env.neg_log(e * static_cast<long double>(R + 1)); };
  }
  std::vector<long double> xi(static_cast<size_t>(d));
  auto obj = [&](const IntVec& j) {
    for (int i = 0; i < d; ++i) xi[static_cast<size_t>(i)] = e * static_cast<long double>(j[static_cast<size_t>(i)]);
    return kernel.phi(xi.data());
  };
  auto m = lattice_minimize(d, obj, lb, policy);
  NoiseNorm out;
  out.log_value = -m.value;
  out.value = static_cast<double>(std::exp(-m.value));
  out.argmax = m.argmin;
  out.points = m.points;
  return out;
}

Eigen::VectorXd noise_diagonal(const NoiseKernel& kernel, double eps, const TruncatedGrid& grid) {
  if (grid.dim() != kernel.dim()) throw DimensionError("grid and kernel dimensions differ");
  Eigen::VectorXd g(grid.size());
  for (int64_t i = 0; i < grid.size(); ++i) g(i) = eigenvalue_on_mode(kernel, eps, grid.mode(i));
  return g;
}

FourierVector apply_noise(const NoiseKernel& kernel, double eps, const FourierVector& f) {
  if (eps < 0) throw std::invalid_argument("eps must be nonnegative");
  if (eps == 0) return f;
  Eigen::VectorXd g = noise_diagonal(kernel, eps, *f.grid());
  return FourierVector(f.grid(), f.coeffs().cwiseProduct(g.cast<cplx>()));
}

double smoothing_defect(const NoiseKernel& kernel, double eps, const FourierVector& f) {
  if (eps < 0) throw std::invalid_argument("eps must be nonnegative");
  if (eps == 0) return 0.0;
  Eigen::VectorXd g = noise_diagonal(kernel, eps, *f.grid());
  double acc = 0;
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    double one_minus = 1.0 - g(i);
    acc += one_minus * one_minus * std::norm(f.coeffs()(i));
  }
  return std::sqrt(acc);
}

namespace {

// E|Y|^p for the isotropic stable vector with characteristic function exp(-|t|^alpha) in R^d.
double isotropic_stable_abs_moment(int d, double alpha, double p) {
  if (p == 0) return 1.0;
  if (alpha == 2.0) return std::pow(2.0, p) * std::tgamma((d + p) / 2) / std::tgamma(d / 2.0);
  return std::pow(2.0, p) * std::tgamma((d + p) / 2) * std::tgamma(1 - p / alpha) /
         (std::tgamma(d / 2.0) * std::tgamma(1 - p / 2));
}

}  // namespace

MomentEstimate moment(const NoiseKernel& kernel, double ap) {
  if (!(ap >= 0 && ap <= 2)) throw std::invalid_argument("moment order must lie in [0, 2]");
  MomentEstimate out;
  out.alpha = ap;
  if (ap == 0) {
    out.M = 1.0;
    return out;
  }
  if (kernel.kind() != KernelKind::AlphaStable)
    throw UnsupportedError("moments need a spatial density; tabulated symbols have none");
  const int d = kernel.dim();
  const double a = kernel.alpha();
  if (a < 2 && ap >= a) throw UnsupportedError("moment of order >= alpha diverges for stable kernels");
  constexpr double pi = std::numbers::pi;
  // g(xi) = E exp(-2 pi i xi.X), so X = (2 pi)^{-1} Q^{1/2} Y with Y standard.
  if (kernel.is_gaussian() && d <= 2) {
    out.method = MomentEstimate::Method::Quadrature;
    Eigen::MatrixXd sigma = kernel.Q() / (2 * pi * pi);
    Eigen::MatrixXd prec = sigma.inverse();
    double norm = 1.0 / std::sqrt(std::pow(2 * pi, d) * sigma.determinant());
    double L = 14.0 * std::sqrt(kernel.q_max() / (2 * pi * pi));
    using boost::math::quadrature::gauss_kronrod;
    if (d == 1) {
      double p00 = prec(0, 0);
      auto f = [&](double x) { return std::pow(std::abs(x), ap) * norm * std::exp(-0.5 * p00 * x * x); };
      // split at the origin where |x|^ap is not smooth
      out.M = 2.0 * gauss_kronrod<double, 61>::integrate(f, 0.0, L, 20, 1e-14);
    } else {
      auto inner = [&](double x) {
        auto g = [&](double y) {
          double q = prec(0, 0) * x * x + 2 * prec(0, 1) * x * y + prec(1, 1) * y * y;
          return std::pow(x * x + y * y, ap / 2) * norm * std::exp(-0.5 * q);
        };
        return gauss_kronrod<double, 61>::integrate(g, -L, 0.0, 15, 1e-13) +
               gauss_kronrod<double, 61>::integrate(g, 0.0, L, 15, 1e-13);
      };
      out.M = gauss_kronrod<double, 61>::integrate(inner, -L, 0.0, 15, 1e-12) +
              gauss_kronrod<double, 61>::integrate(inner, 0.0, L, 15, 1e-12);
    }
    return out;
  }
  if (!kernel.q_is_scalar()) throw UnsupportedError("analytic moments need Q proportional to the identity");
  out.method = MomentEstimate::Method::Analytic;
  double scale = std::sqrt(kernel.Q()(0, 0)) / (2 * pi);
  out.M = std::pow(scale, ap) * isotropic_stable_abs_moment(d, a, ap);
  return out;
}

double cosine_constant(double a) {
  constexpr double pi = std::numbers::pi;
  if (!(a > 0 && a <= 2)) throw std::invalid_argument("alpha must lie in (0, 2]");
  if (a == 2.0) return 2 * pi * pi;  // supremum approached as x -> 0
  auto f = [a](double x) { return (1 - std::cos(2 * pi * x)) / std::pow(x, a); };
  double best_x = 0.5, best = f(0.5);
  const int n = 30000;
  for (int i = 1; i <= n; ++i) {
    double x = 3.0 * i / n;
    double v = f(x);
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  double h = 3.0 / n;
  auto r = boost::math::tools::brent_find_minima([&](double x) { return -f(x); }, std::max(1e-12, best_x - h),
                                                 best_x + h, 52);
  return std::max(best, -r.second);
}

MomentCheck moment_fourier_check(const NoiseKernel& kernel, double ap,
                                 const std::vector<std::vector<double>>& xi_samples) {
  MomentCheck out;
  out.alpha = ap;
  out.c_alpha = cosine_constant(ap);
  out.M = moment(kernel, ap).M;
  for (const auto& xi : xi_samples) {
    if (static_cast<int>(xi.size()) != kernel.dim()) throw DimensionError("sample dimension mismatch");
    double r2 = 0;
    for (double x : xi) r2 += x * x;
    double r = std::sqrt(r2);
    std::vector<long double> lx(xi.begin(), xi.end());
    double lhs = kernel.kind() == KernelKind::AlphaStable ? -std::expm1(-static_cast<double>(kernel.phi(lx.data())))
                                                          : 1.0 - kernel.symbol(xi.data());
    double rhs = out.c_alpha * out.M * std::pow(r, ap);
    ++out.samples;
    if (r == 0) {
      if (lhs > 0) ++out.violations;
      continue;
    }
    out.worst_ratio = std::max(out.worst_ratio, lhs / rhs);
    if (lhs > rhs * (1 + 1e-12)) ++out.violations;
    if (ap == 2.0 && r < 1e-2) out.small_xi_ratio.emplace_back(r, lhs / r2);
  }
  return out;
}

namespace {

using boost::multiprecision::cpp_bin_float;
using boost::multiprecision::number;

template <unsigned Digits>
using mpf = number<cpp_bin_float<Digits>>;

template <class F>
F closed_integral(const NoiseKernel& kernel) {
  // int exp(-2 (xi^T Q xi)^{alpha/2}) dxi over R^d
  const int d = kernel.dim();
  const F a = F(kernel.alpha());
  const F pi = boost::math::constants::pi<F>();
  F sphere = 2 * pow(pi, F(d) / 2) / boost::math::tgamma(F(d) / 2);
  F radial = boost::math::tgamma(F(d) / a) / (a * pow(F(2), F(d) / a));
  return sphere * radial / sqrt(F(kernel.Q().determinant()));
}

long double tail_bound(int d, long double c, long double a, int64_t R) {
  // sum_{s > R} #shell(s) exp(-c s^a)
  long double sum = 0;
  for (int64_t s = R + 1;; ++s) {
    long double ls = static_cast<long double>(s);
    long double count = std::pow(2 * ls + 1, d) - std::pow(2 * ls - 1, d);
    long double term = count * std::exp(-c * std::pow(ls, a));
    sum += term;
    if (s > R + 8 && term <= sum * 1e-30L) break;
    if (s > R + 100000000) break;
  }
  return sum;
}

template <unsigned Digits>
PoissonEntry poisson_entry(const NoiseKernel& kernel, double eps, long double target) {
  using F = mpf<Digits>;
  const int d = kernel.dim();
  const long double a = kernel.alpha();
  const long double c = 2 * std::pow(static_cast<long double>(kernel.q_min()) * eps * eps, a / 2);
  int64_t R = 1;
  const long double ed = std::pow(static_cast<long double>(eps), d);
  while (ed * tail_bound(d, c, a, R) > target) R = R + std::max<int64_t>(1, R / 4);
  F e = F(eps);
  F sum = 0;
  std::vector<int64_t> k(static_cast<size_t>(d), -R);
  std::vector<F> q(static_cast<size_t>(d * d));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) q[static_cast<size_t>(i * d + j)] = F(kernel.Q()(i, j));
  const F half_alpha = F(kernel.alpha()) / 2;
  if (kernel.alpha() == 2.0) {
    // along the last coordinate t the terms exp(-2 e^2 (c + 2 b t + q t^2)) have ratios
    // that are themselves geometric, so each row costs two exponentials
    const int last = d - 1;
    const F qll = q[static_cast<size_t>(last * d + last)];
    const F step = exp(-4 * e * e * qll);
    while (true) {
      F c = 0, b = 0;
      for (int i = 0; i < last; ++i) {
        b += q[static_cast<size_t>(i * d + last)] * F(k[static_cast<size_t>(i)]);
        for (int j = 0; j < last; ++j)
          c += F(k[static_cast<size_t>(i)]) * q[static_cast<size_t>(i * d + j)] * F(k[static_cast<size_t>(j)]);
      }
      const F t0 = F(-R);
      F term = exp(-2 * e * e * (c + 2 * b * t0 + qll * t0 * t0));
      F ratio = exp(-2 * e * e * (2 * b + qll * (2 * t0 + 1)));
      for (int64_t t = -R; t <= R; ++t) {
        sum += term;
        term *= ratio;
        ratio *= step;
      }
      int i = last - 1;
      while (i >= 0 && k[static_cast<size_t>(i)] == R) {
        k[static_cast<size_t>(i)] = -R;
        --i;
      }
      if (i < 0) break;
      ++k[static_cast<size_t>(i)];
    }
  }
  while (kernel.alpha() != 2.0) {
    F qf = 0;
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        qf += F(k[static_cast<size_t>(i)]) * q[static_cast<size_t>(i * d + j)] * F(k[static_cast<size_t>(j)]);
    qf *= e * e;
    F expo = kernel.alpha() == 2.0 ? qf : (qf == 0 ? F(0) : F(pow(qf, half_alpha)));
    sum += exp(-2 * expo);
    int i = d - 1;
    while (i >= 0 && k[static_cast<size_t>(i)] == R) {
      k[static_cast<size_t>(i)] = -R;
      --i;
    }
    if (i < 0) break;
    ++k[static_cast<size_t>(i)];
  }
  sum *= pow(e, d);
  F integral = closed_integral<F>(kernel);
  F disc = abs(sum - integral);
  PoissonEntry out;
  out.eps = eps;
  out.lattice_sum = sum.template convert_to<double>();
  out.integral = integral.template convert_to<double>();
  out.discrepancy = disc.template convert_to<double>();
  out.log10_discrepancy = disc == 0 ? -std::numeric_limits<double>::infinity() : log10(disc).template convert_to<double>();
  out.tail_bound = static_cast<double>(ed * tail_bound(d, c, a, R));
  return out;
}

}  // namespace

double poisson_integral(const NoiseKernel& kernel) {
  if (kernel.kind() != KernelKind::AlphaStable) throw UnsupportedError("closed-form integral needs an alpha-stable kernel");
  return closed_integral<mpf<50>>(kernel).convert_to<double>();
}

PoissonReport poisson_sum_check(const NoiseKernel& kernel, const std::vector<double>& eps_grid) {
  if (kernel.kind() != KernelKind::AlphaStable)
    throw UnsupportedError("the Poisson check is implemented for alpha-stable kernels");
  PoissonReport rep;
  // Gaussian discrepancies are super-polynomially small, so they need far more digits.
  const bool gaussian = kernel.is_gaussian();
  rep.digits = gaussian ? 320 : 60;
  for (double eps : eps_grid) {
    if (!(eps > 0)) throw std::invalid_argument("eps must be positive");
    rep.entries.push_back(gaussian ? poisson_entry<320>(kernel, eps, 1e-300L) : poisson_entry<60>(kernel, eps, 1e-45L));
  }
  std::vector<PoissonEntry> sorted = rep.entries;
  std::sort(sorted.begin(), sorted.end(), [](auto& x, auto& y) { return x.eps > y.eps; });
  rep.monotone = sorted.size() >= 2;
  for (size_t i = 1; i < sorted.size(); ++i)
    if (!(sorted[i].log10_discrepancy < sorted[i - 1].log10_discrepancy)) rep.monotone = false;
  return rep;
}

}  // namespace tordiss
