#pragma once

#include "tordiss/maps.hpp"
#include "tordiss/noise.hpp"
#include "tordiss/propagation.hpp"

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tordiss {

struct TauValue {
  enum class Kind { Finite, Infinite, ExceedsCap };
  Kind kind = Kind::Finite;
  int64_t n = 0;  // the dissipation time, or the cap that was reached

  static TauValue finite(int64_t n) { return {Kind::Finite, n}; }
  static TauValue infinite() { return {Kind::Infinite, 0}; }
  static TauValue exceeds(int64_t cap) { return {Kind::ExceedsCap, cap}; }
  bool is_finite() const { return kind == Kind::Finite; }
  std::string str() const;
  bool operator==(const TauValue&) const = default;
};

struct DissipationOptions {
  double eta = std::exp(-1.0);
  int64_t n_cap = 1'000'000;
  int plateau_window = 50;
  double plateau_tol = 1e-12;
};

// True when the norm at log value lg is below eta. Norms within a relative 1e-14 of the
// threshold in the exponent count as not crossed, so exact ties resolve as in exact arithmetic.
bool below_threshold(long double lg, double eta);

TauValue dissipation_time(const PropagationEngine& engine, Mode mode, const DissipationOptions& opt = {});

struct DissipationReport {
  double eps = 0;
  double eta = 0;
  TauValue tau_star;
  TauValue tau_tilde_star;
  std::string engine;
  double leakage = 0;  // dense engine: leakage of the norm at tau_star
  std::optional<NormCurve> noisy_curve, coarse_curve;
};

DissipationReport dissipation_report(const PropagationEngine& engine, const DissipationOptions& opt,
                                     bool noisy = true, bool coarse = true, bool attach_curves = false);

struct LinearFit {
  double slope = 0, intercept = 0, r2 = 0;
  size_t points = 0;
};
LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

struct RateFit {
  enum class Model { Logarithmic, Power, None } model = Model::None;
  LinearFit logarithmic;   // tau = R ln(1/eps) + c
  LinearFit power;         // ln tau = beta ln(1/eps) + ln C
  LinearFit logarithmic_all, power_all;  // every point, for sensitivity to the exclusion
  double eps_min = 0, eps_max = 0;
  size_t excluded = 0;
  std::string notice;

  double R_star() const { return logarithmic.slope; }
  double beta() const { return power.slope; }
  double C() const { return std::exp(power.intercept); }
};
std::string to_string(RateFit::Model m);

RateFit rate_fit(const std::vector<std::pair<double, TauValue>>& points);
RateFit rate_fit(const std::vector<DissipationReport>& reports, Mode mode = Mode::Noisy);

struct PseudospectrumResult {
  double r = 1;
  double distance = 0;  // d_eps(r)
  double angle = 0;     // argmin on the circle
  int64_t evaluations = 0;
};

PseudospectrumResult pseudospectrum_distance(const DenseEngine& engine, double r, int angle_samples = 256,
                                             int rounds = 3);

using Observable = std::vector<std::pair<ModeIndex, cplx>>;
double observable_norm(const Observable& f);
Observable parse_observable(const std::string& text, int d);  // "1,0:1;0,1:0.5-0.5i"
FourierVector to_grid(const Observable& f, const GridPtr& grid);

struct CorrelationSeries {
  bool noisy = false;
  double eps = 0;
  double f_norm = 0, h_norm = 0;
  std::vector<int64_t> n;
  std::vector<cplx> C;
};

// C(n) = m(f U^n h) = sum_k h(k) f(-A^n k); the noisy variant weights by prod_{l<=n} g(eps A^l k).
CorrelationSeries correlation_series(const LatticeOrbitEngine& engine, const Observable& f, const Observable& h,
                                     int64_t n_max, bool noisy);
CorrelationSeries correlation_series(const DenseEngine& engine, const Observable& f, const Observable& h,
                                     int64_t n_max, bool noisy);

// Gamma(n) = max over pure modes e_k (|k|_inf <= radius) and e_j of |<e_j, U^n e_k>| / (|j|^s |k|^s_star).
struct EnvelopeSeries {
  double s = 1, s_star = 1;
  std::vector<int64_t> n;
  std::vector<double> gamma;
};
EnvelopeSeries correlation_envelope(const TorusMap& map, int64_t n_max, double s, double s_star, int64_t radius = 1,
                                    int64_t samples = 2048);

struct DecayFit {
  enum class Model { Exponential, Power, DoubleExponential, Degenerate } model = Model::Degenerate;
  LinearFit exponential;      // ln|C| = n ln sigma + ln C
  LinearFit power;            // ln|C| = -beta ln n + ln C
  LinearFit double_exponential;  // ln(-ln u) = a n + b, u = |C| / max|C|
  double sigma = 0, beta = 0;
  std::string notice;
};
std::string to_string(DecayFit::Model m);
DecayFit decay_fit(const std::vector<int64_t>& n, const std::vector<double>& values);
DecayFit decay_fit(const CorrelationSeries& series);

struct SupexpEntry {
  int64_t n = 0;
  double abs_c = 0;
  double log_bound = 0;  // ln(||f|| ||h||) - eps^2 e^{2(1-delta) h_hat n}
  double margin = 0;     // log_bound - ln|C|, +inf when C = 0
  bool ok = true;
};

struct SupexpReport {
  bool skipped = false;
  double h_hat = 0;
  double delta = 0;
  std::vector<SupexpEntry> entries;
  bool all_ok = true;
};

SupexpReport supexp_bound_check(const LinearToralMap& map, const NoiseKernel& kernel, double eps, const Observable& f,
                                const Observable& h, int64_t n_max, double delta);

struct BoundEntry {
  double eps = 0;
  TauValue tau;                       // reference dissipation time
  std::string tau_engine;
  std::optional<TauValue> tau_dense;  // truncated operator, when a dense engine is given
  std::optional<double> dense_leakage;
  std::optional<double> d1;           // d_eps(1) of the truncated operator
  std::optional<double> gb_lower;
  double gb_upper1 = 0;
  std::optional<double> gb_upper2;
  double noise_cap = 0;               // eps^{-alpha}
  std::optional<double> weakmix_lower;
  std::vector<std::string> violations;
};

struct BoundReport {
  std::vector<BoundEntry> entries;
  double nln_slope = 0;               // +inf when the map does not expand
  std::optional<double> corr_slope;
  double s = 1, s_star = 1;
  std::optional<double> sigma;
  std::string notice;
  bool violated = false;
};

struct BoundInput {
  double eps = 0;
  TauValue tau;
  std::string tau_engine;
  const DenseEngine* dense = nullptr;
};

struct BoundOptions {
  bool upper2 = false;
  int angles = 256;
  double s = 1, s_star = 1;
  std::optional<double> sigma;
  DissipationOptions dissipation;
};

BoundReport bound_report(const TorusMap& map, const NoiseKernel& kernel, const std::vector<BoundInput>& inputs,
                         const BoundOptions& opt);
double nln_slope(const TorusMap& map, double alpha);

}  // namespace tordiss
