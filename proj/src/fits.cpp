#include "tordiss/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tordiss {

std::string to_string(RateFit::Model m) {
  switch (m) {
    case RateFit::Model::Logarithmic: return "logarithmic";
    case RateFit::Model::Power: return "power";
    case RateFit::Model::None: break;
  }
  return "none";
}

std::string to_string(DecayFit::Model m) {
  switch (m) {
    case DecayFit::Model::Exponential: return "exponential";
    case DecayFit::Model::Power: return "power";
    case DecayFit::Model::DoubleExponential: return "double-exponential";
    case DecayFit::Model::Degenerate: break;
  }
  return "degenerate";
}

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  LinearFit f;
  f.points = x.size();
  if (x.size() != y.size() || x.size() < 2) return f;
  const double n = static_cast<double>(x.size());
  double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssr = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    double r = y[i] - (f.slope * x[i] + f.intercept);
    ssr += r * r;
  }
  if (syy == 0) f.r2 = ssr == 0 ? 1.0 : 0.0;
  else f.r2 = std::clamp(1.0 - ssr / syy, 0.0, 1.0);
  return f;
}

namespace {

void fit_both(const std::vector<std::pair<double, double>>& pts, LinearFit& lg, LinearFit& pw) {
  std::vector<double> x, y, ly;
  for (auto& [eps, tau] : pts) {
    x.push_back(std::log(1.0 / eps));
    y.push_back(tau);
    ly.push_back(std::log(tau));
  }
  lg = least_squares(x, y);
  pw = least_squares(x, ly);
}

}  // namespace

RateFit rate_fit(const std::vector<std::pair<double, TauValue>>& points) {
  RateFit fit;
  std::vector<std::pair<double, double>> pts;
  for (auto& [eps, tau] : points)
    if (tau.is_finite()) pts.emplace_back(eps, static_cast<double>(tau.n));
  if (pts.size() < 4) {
    fit.notice = pts.empty() ? "no finite dissipation times" : "fewer than 4 finite dissipation times";
    return fit;
  }
  std::sort(pts.begin(), pts.end(), [](auto& a, auto& b) { return a.first > b.first; });
  fit_both(pts, fit.logarithmic_all, fit.power_all);
  size_t drop = pts.size() / 3;
  if (pts.size() - drop < 4) drop = pts.size() - 4;
  fit.excluded = drop;
  std::vector<std::pair<double, double>> tail(pts.begin() + static_cast<std::ptrdiff_t>(drop), pts.end());
  fit_both(tail, fit.logarithmic, fit.power);
  fit.eps_max = tail.front().first;
  fit.eps_min = tail.back().first;
  fit.model = fit.logarithmic.r2 >= fit.power.r2 ? RateFit::Model::Logarithmic : RateFit::Model::Power;
  return fit;
}

RateFit rate_fit(const std::vector<DissipationReport>& reports, Mode mode) {
  std::vector<std::pair<double, TauValue>> pts;
  for (auto& r : reports) pts.emplace_back(r.eps, mode == Mode::Noisy ? r.tau_star : r.tau_tilde_star);
  return rate_fit(pts);
}

DecayFit decay_fit(const std::vector<int64_t>& n, const std::vector<double>& values) {
  DecayFit fit;
  if (n.size() != values.size()) throw std::invalid_argument("decay_fit: length mismatch");
  double peak = 0;
  size_t nonzero = 0;
  for (double v : values) {
    peak = std::max(peak, std::abs(v));
    if (v != 0) ++nonzero;
  }
  if (peak == 0) {
    fit.notice = "series is identically zero";
    return fit;
  }
  if (nonzero < 6) {
    fit.notice = "fewer than 6 nonzero entries";
    return fit;
  }
  std::vector<double> xe, ye, xp, yp, xd, yd;
  for (size_t i = 0; i < n.size(); ++i) {
    double u = std::abs(values[i]) / peak;  // scale-free
    if (u == 0) continue;
    xe.push_back(static_cast<double>(n[i]));
    ye.push_back(std::log(u));
    if (n[i] >= 1) {
      xp.push_back(std::log(static_cast<double>(n[i])));
      yp.push_back(std::log(u));
    }
    if (u < 1) {
      xd.push_back(static_cast<double>(n[i]));
      yd.push_back(std::log(-std::log(u)));
    }
  }
  fit.exponential = least_squares(xe, ye);
  fit.power = least_squares(xp, yp);
  if (xd.size() >= 3) fit.double_exponential = least_squares(xd, yd);
  fit.sigma = std::exp(fit.exponential.slope);
  fit.beta = -fit.power.slope;
  fit.model = DecayFit::Model::Exponential;
  double best = fit.exponential.r2;
  if (fit.power.r2 > best) {
    best = fit.power.r2;
    fit.model = DecayFit::Model::Power;
  }
  if (fit.double_exponential.r2 > best) fit.model = DecayFit::Model::DoubleExponential;
  return fit;
}

DecayFit decay_fit(const CorrelationSeries& series) {
  std::vector<double> v;
  for (auto& c : series.C) v.push_back(std::abs(c));
  return decay_fit(series.n, v);
}

}  // namespace tordiss
