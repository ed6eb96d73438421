#include "tordiss/analysis.hpp"

#include "tordiss/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

namespace tordiss {

std::string TauValue::str() const {
  switch (kind) {
    case Kind::Finite: return std::to_string(n);
    case Kind::Infinite: return "INFINITE";
    case Kind::ExceedsCap: return "EXCEEDS_CAP(" + std::to_string(n) + ")";
  }
  return "?";
}

bool below_threshold(long double lg, double eta) {
  const long double target = -std::log(static_cast<long double>(eta));
  return -lg > target * (1 + 1e-14L);
}

TauValue dissipation_time(const PropagationEngine& engine, Mode mode, const DissipationOptions& opt) {
  if (!(opt.eta > 0 && opt.eta < 1)) throw std::invalid_argument("eta must lie in (0, 1)");
  if (opt.n_cap < 1) throw std::invalid_argument("n_cap must be >= 1");
  if (mode == Mode::Noisy) {
    // strictly decreasing in n: exponential search, then bisection
    int64_t lo = 0, hi = 1;
    while (!below_threshold(engine.noisy_norm(hi).log_value, opt.eta)) {
      if (hi >= opt.n_cap) return TauValue::exceeds(opt.n_cap);
      lo = hi;
      hi = hi > opt.n_cap / 2 ? opt.n_cap : 2 * hi;
    }
    while (hi - lo > 1) {
      int64_t mid = lo + (hi - lo) / 2;
      if (below_threshold(engine.noisy_norm(mid).log_value, opt.eta)) hi = mid;
      else lo = mid;
    }
    return TauValue::finite(hi);
  }
  if (engine.coarse_plateau_proven()) {
    return below_threshold(engine.coarse_norm(1).log_value, opt.eta) ? TauValue::finite(1) : TauValue::infinite();
  }
  std::vector<double> recent;
  for (int64_t n = 1; n <= opt.n_cap; ++n) {
    NormValue v = engine.coarse_norm(n);
    if (below_threshold(v.log_value, opt.eta)) return TauValue::finite(n);
    if (engine.non_weakly_mixing()) {
      recent.push_back(v.value);
      if (static_cast<int>(recent.size()) > opt.plateau_window) recent.erase(recent.begin());
      if (static_cast<int>(recent.size()) == opt.plateau_window) {
        auto [mn, mx] = std::minmax_element(recent.begin(), recent.end());
        if (*mx - *mn < opt.plateau_tol) return TauValue::infinite();
      }
    }
  }
  return TauValue::exceeds(opt.n_cap);
}

DissipationReport dissipation_report(const PropagationEngine& engine, const DissipationOptions& opt, bool noisy,
                                     bool coarse, bool attach_curves) {
  DissipationReport r;
  r.eps = engine.eps();
  r.eta = opt.eta;
  r.engine = engine.tag();
  r.tau_star = TauValue::exceeds(0);
  r.tau_tilde_star = TauValue::exceeds(0);
  if (noisy) {
    r.tau_star = dissipation_time(engine, Mode::Noisy, opt);
    if (r.tau_star.is_finite()) r.leakage = engine.noisy_norm(r.tau_star.n).leakage;
    if (attach_curves && r.tau_star.is_finite()) r.noisy_curve = norm_curve(engine, r.tau_star.n, Mode::Noisy);
  }
  if (coarse) {
    r.tau_tilde_star = dissipation_time(engine, Mode::Coarse, opt);
    if (attach_curves && r.tau_tilde_star.is_finite())
      r.coarse_curve = norm_curve(engine, r.tau_tilde_star.n, Mode::Coarse);
  }
  return r;
}

PseudospectrumResult pseudospectrum_distance(const DenseEngine& engine, double r, int angle_samples, int rounds) {
  if (!(r > 0)) throw std::invalid_argument("radius must be positive");
  if (angle_samples < 64) throw std::invalid_argument("need at least 64 angle samples");
  constexpr double two_pi = 2 * std::numbers::pi;
  std::map<double, double> samples;  // angle -> sigma_min
  PseudospectrumResult out;
  out.r = r;
  auto eval = [&](double th) {
    th = th - two_pi * std::floor(th / two_pi);
    auto it = samples.find(th);
    if (it != samples.end()) return it->second;
    double v = engine.resolvent_sigma_min(std::polar(r, th));
    ++out.evaluations;
    samples.emplace(th, v);
    return v;
  };
  for (int i = 0; i < angle_samples; ++i) eval(two_pi * i / angle_samples);
  double h = two_pi / angle_samples;
  // eigenvalues nearest the circle seed the refinement; for normal operators the minimum sits at one of them
  std::vector<cplx> eig;
  if (engine.blocked_transfer().max_block() <= 500) eig = engine.blocked_transfer().eigenvalues();
  std::sort(eig.begin(), eig.end(), [&](cplx a, cplx b) {
    double da = std::abs(std::abs(a) - r), db = std::abs(std::abs(b) - r);
    return da != db ? da < db : (a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag());
  });
  std::vector<double> seeds;
  for (size_t i = 0; i < eig.size() && seeds.size() < 8; ++i)
    if (std::abs(eig[i]) > 0) {
      double th = std::arg(eig[i]);
      th -= two_pi * std::floor(th / two_pi);
      eval(th);
      seeds.push_back(th);
    }
  const double golden = (std::sqrt(5.0) - 1) / 2;
  for (int round = 0; round < rounds; ++round) {
    std::vector<std::pair<double, double>> byval;
    for (auto& [th, v] : samples) byval.emplace_back(v, th);
    std::sort(byval.begin(), byval.end());
    std::vector<double> centers;
    if (round == 0) centers = seeds;
    size_t extra = 0;
    for (auto& [v, th] : byval) {
      bool near = false;
      for (double c : centers)
        if (std::abs(std::remainder(th - c, two_pi)) < h) near = true;
      if (!near) centers.push_back(th), ++extra;
      if (extra == 3) break;
    }
    for (double c : centers) {
      double a = c - h, b = c + h;
      double x1 = b - golden * (b - a), x2 = a + golden * (b - a);
      double f1 = eval(x1), f2 = eval(x2);
      for (int it = 0; it < 24; ++it) {
        if (f1 < f2) {
          b = x2;
          x2 = x1;
          f2 = f1;
          x1 = b - golden * (b - a);
          f1 = eval(x1);
        } else {
          a = x1;
          x1 = x2;
          f1 = f2;
          x2 = a + golden * (b - a);
          f2 = eval(x2);
        }
      }
    }
    h /= 8;
  }
  out.distance = std::numeric_limits<double>::infinity();
  for (auto& [th, v] : samples)
    if (v < out.distance) {
      out.distance = v;
      out.angle = th;
    }
  return out;
}

double observable_norm(const Observable& f) {
  double s = 0;
  for (auto& [k, c] : f) s += std::norm(c);
  return std::sqrt(s);
}

namespace {

cplx parse_complex(std::string s) {
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char ch) { return std::isspace(ch); }), s.end());
  if (s.empty()) throw std::invalid_argument("empty coefficient");
  if (s.back() != 'i') return cplx(std::stod(s), 0);
  s.pop_back();
  // split at the last sign that is not an exponent sign
  size_t split = std::string::npos;
  for (size_t i = 1; i < s.size(); ++i)
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') split = i;
  if (split == std::string::npos) {
    if (s.empty() || s == "+") return cplx(0, 1);
    if (s == "-") return cplx(0, -1);
    return cplx(0, std::stod(s));
  }
  std::string re = s.substr(0, split), im = s.substr(split);
  double imv = im == "+" ? 1.0 : im == "-" ? -1.0 : std::stod(im);
  return cplx(std::stod(re), imv);
}

std::map<IntVec, cplx> as_map(const Observable& f) {
  std::map<IntVec, cplx> m;
  for (auto& [k, c] : f) m[IntVec(k.begin(), k.end())] += c;
  return m;
}

}  // namespace

Observable parse_observable(const std::string& text, int d) {
  Observable f;
  std::stringstream ss(text);
  std::string term;
  while (std::getline(ss, term, ';')) {
    if (term.find_first_not_of(" \t") == std::string::npos) continue;
    auto colon = term.find(':');
    std::string modes = colon == std::string::npos ? term : term.substr(0, colon);
    cplx c = colon == std::string::npos ? cplx(1) : parse_complex(term.substr(colon + 1));
    ModeIndex k;
    std::stringstream ms(modes);
    std::string x;
    while (std::getline(ms, x, ',')) k.push_back(std::stoll(x));
    if (static_cast<int>(k.size()) != d) throw DimensionError("observable mode has the wrong dimension");
    bool zero = std::all_of(k.begin(), k.end(), [](int64_t v) { return v == 0; });
    if (zero) throw std::invalid_argument("observables are zero-mean; the zero mode is not allowed");
    f.emplace_back(std::move(k), c);
  }
  return f;
}

FourierVector to_grid(const Observable& f, const GridPtr& grid) {
  FourierVector v(grid);
  for (auto& [k, c] : f) {
    int64_t i = grid->index_of(k);
    if (i < 0) throw DimensionError("observable mode outside the grid");
    v.coeffs()(i) += c;
  }
  return v;
}

CorrelationSeries correlation_series(const LatticeOrbitEngine& engine, const Observable& f, const Observable& h,
                                     int64_t n_max, bool noisy) {
  CorrelationSeries s;
  s.noisy = noisy;
  s.eps = noisy ? engine.eps() : 0.0;
  s.f_norm = observable_norm(f);
  s.h_norm = observable_norm(h);
  auto fm = as_map(f);
  const auto& kernel = engine.kernel();
  const int d = kernel.dim();
  const long double e = engine.eps();
  std::vector<long double> xi(static_cast<size_t>(d));
  for (int64_t n = 0; n <= n_max; ++n) s.n.push_back(n);
  s.C.assign(static_cast<size_t>(n_max + 1), cplx(0));
  for (auto& [k, hk] : as_map(h)) {
    if (auto* tr = std::get_if<TranslationMap>(&engine.map())) {
      IntVec neg(k.size());
      for (size_t i = 0; i < k.size(); ++i) neg[i] = -k[i];
      auto it = fm.find(neg);
      if (it == fm.end()) continue;
      double ph = 0;
      for (int i = 0; i < d; ++i) ph += static_cast<double>(k[static_cast<size_t>(i)]) * tr->theta()[static_cast<size_t>(i)];
      for (int i = 0; i < d; ++i) xi[static_cast<size_t>(i)] = e * static_cast<long double>(k[static_cast<size_t>(i)]);
      long double phi = kernel.phi(xi.data());
      for (int64_t n = 0; n <= n_max; ++n) {
        double turns = std::fmod(static_cast<double>(n) * ph, 1.0);
        cplx w = std::polar(1.0, 2 * std::numbers::pi * turns);
        if (noisy) w *= static_cast<double>(std::exp(-static_cast<long double>(n) * phi));
        s.C[static_cast<size_t>(n)] += hk * w * it->second;
      }
      continue;
    }
    const auto& lin = std::get<LinearToralMap>(engine.map());
    LatticeVector v(k);
    long double acc = 0;  // sum of -ln g(eps A^l k)
    for (int64_t n = 0; n <= n_max; ++n) {
      if (n > 0) {
        v.apply(lin.matrix());
        if (noisy) {
          auto c = v.to_long_double();
          for (int i = 0; i < d; ++i) xi[static_cast<size_t>(i)] = e * c[static_cast<size_t>(i)];
          acc += kernel.phi(xi.data());
        }
      }
      if (v.is_big()) continue;  // far outside any finite support
      IntVec neg(v.small().size());
      for (size_t i = 0; i < neg.size(); ++i) neg[i] = -v.small()[i];
      auto it = fm.find(neg);
      if (it == fm.end()) continue;
      double w = noisy ? static_cast<double>(std::exp(-acc)) : 1.0;
      s.C[static_cast<size_t>(n)] += hk * w * it->second;
    }
  }
  return s;
}

CorrelationSeries correlation_series(const DenseEngine& engine, const Observable& f, const Observable& h,
                                     int64_t n_max, bool noisy) {
  CorrelationSeries s;
  s.noisy = noisy;
  s.eps = noisy ? engine.eps() : 0.0;
  s.f_norm = observable_norm(f);
  s.h_norm = observable_norm(h);
  const auto& grid = engine.grid();
  FourierVector fv = to_grid(f, grid);
  FourierVector w = to_grid(h, grid);
  Eigen::VectorXcd fneg(grid->size());
  for (int64_t i = 0; i < grid->size(); ++i) fneg(i) = fv.coeffs()(grid->negated(i));
  for (int64_t n = 0; n <= n_max; ++n) {
    if (n > 0) w = engine.propagate(w, 1, noisy);
    s.n.push_back(n);
    s.C.push_back((fneg.transpose() * w.coeffs())(0));
  }
  return s;
}

EnvelopeSeries correlation_envelope(const TorusMap& map, int64_t n_max, double s, double s_star, int64_t radius,
                                    int64_t samples) {
  EnvelopeSeries out;
  out.s = s;
  out.s_star = s_star;
  const int d = map_dim(map);
  auto grid = make_grid(d, radius);
  std::vector<ModeIndex> ks;
  std::vector<double> kw;  // |k|^s_star
  // e_{-k} o F^n is the conjugate of e_k o F^n, so half the modes suffice
  for (int64_t c = 0; c < grid->size() / 2; ++c) {
    ks.push_back(grid->mode(c));
    double kn = 0;
    for (auto x : ks.back()) kn += static_cast<double>(x * x);
    kw.push_back(std::pow(std::sqrt(kn), s_star));
  }
  auto jw = [&](const auto& j) {
    long double jn = 0;
    for (auto x : j) jn += static_cast<long double>(x) * static_cast<long double>(x);
    return std::pow(static_cast<double>(std::sqrt(jn)), s);
  };
  out.gamma.assign(static_cast<size_t>(n_max + 1), 0.0);
  for (int64_t n = 0; n <= n_max; ++n) out.n.push_back(n);
  if (auto* sm = std::get_if<SampledMap>(&map)) {
    transported_modes(*sm, ks, static_cast<int>(n_max), samples,
                      [&](int n, size_t i, const std::vector<std::pair<ModeIndex, cplx>>& coeffs) {
                        double& g = out.gamma[static_cast<size_t>(n)];
                        for (auto& [j, val] : coeffs) {
                          bool zero = std::all_of(j.begin(), j.end(), [](int64_t x) { return x == 0; });
                          if (!zero) g = std::max(g, std::abs(val) / (jw(j) * kw[i]));
                        }
                      });
    return out;
  }
  for (size_t i = 0; i < ks.size(); ++i)
    for (int64_t n = 0; n <= n_max; ++n) {
      double g;
      if (auto* lin = std::get_if<LinearToralMap>(&map)) {
        LatticeVector v = n == 0 ? LatticeVector(IntVec(ks[i].begin(), ks[i].end())) : mode_action(*lin, ks[i], n);
        g = 1.0 / (jw(v.to_long_double()) * kw[i]);
      } else {
        g = 1.0 / (jw(ks[i]) * kw[i]);
      }
      out.gamma[static_cast<size_t>(n)] = std::max(out.gamma[static_cast<size_t>(n)], g);
    }
  return out;
}

SupexpReport supexp_bound_check(const LinearToralMap& map, const NoiseKernel& kernel, double eps, const Observable& f,
                                const Observable& h, int64_t n_max, double delta) {
  SupexpReport rep;
  rep.delta = delta;
  if (eps == 0) {
    rep.skipped = true;
    return rep;
  }
  if (!kernel.is_gaussian()) throw std::invalid_argument("the super-exponential bound is stated for Gaussian noise");
  if (!(delta > 0 && delta < 1)) throw std::invalid_argument("delta must lie in (0, 1)");
  EntropyReport ent = entropy_report(map);
  if (!ent.ergodic) throw std::invalid_argument("the super-exponential bound needs an ergodic automorphism");
  rep.h_hat = ent.h_hat;
  LatticeOrbitEngine engine(map, kernel, eps);
  CorrelationSeries cs = correlation_series(engine, f, h, n_max, true);
  const double lognorm = std::log(cs.f_norm * cs.h_norm);
  for (size_t i = 0; i < cs.n.size(); ++i) {
    SupexpEntry e;
    e.n = cs.n[i];
    e.abs_c = std::abs(cs.C[i]);
    e.log_bound = lognorm - eps * eps * std::exp(2 * (1 - delta) * ent.h_hat * static_cast<double>(e.n));
    e.margin = e.abs_c == 0 ? std::numeric_limits<double>::infinity() : e.log_bound - std::log(e.abs_c);
    e.ok = e.margin >= -1e-12;
    rep.all_ok = rep.all_ok && e.ok;
    rep.entries.push_back(e);
  }
  return rep;
}

double nln_slope(const TorusMap& map, double alpha) {
  ExpansionProfile p = expansion_profile(map);
  double L = p.df_norm;
  // diffeomorphisms: the dissipation time is the same for F and its inverse
  bool invertible = true;
  if (auto* lin = std::get_if<LinearToralMap>(&map)) invertible = lin->invertible();
  if (invertible && p.df_inverse_norm) L = std::min(L, *p.df_inverse_norm);
  if (!(L > 1)) return std::numeric_limits<double>::infinity();
  return std::min(alpha, 1.0) / std::log(L);
}

BoundReport bound_report(const TorusMap& map, const NoiseKernel& kernel, const std::vector<BoundInput>& inputs,
                         const BoundOptions& opt) {
  BoundReport rep;
  rep.s = opt.s;
  rep.s_star = opt.s_star;
  rep.sigma = opt.sigma;
  rep.nln_slope = nln_slope(map, kernel.alpha());
  if (opt.sigma && *opt.sigma > 0 && *opt.sigma < 1)
    rep.corr_slope = (map_dim(map) + opt.s + opt.s_star) / std::abs(std::log(*opt.sigma));
  else
    rep.notice = "no correlation decay rate below 1; correlation slope omitted";
  const double one_minus = 1 - std::exp(-1.0);
  // bounds that hold with equality must not be flagged over rounding
  auto above = [](double tau, double bound) { return tau > bound * (1 + 1e-12); };
  auto below = [](double tau, double bound) { return tau < bound * (1 - 1e-12); };
  for (const auto& in : inputs) {
    BoundEntry b;
    b.eps = in.eps;
    b.tau = in.tau;
    b.tau_engine = in.tau_engine;
    NoiseNorm g = noise_norm(kernel, in.eps);
    b.gb_upper1 = 1.0 / std::abs(static_cast<double>(g.log_value)) + 1.0;
    b.noise_cap = std::pow(in.eps, -kernel.alpha());
    if (std::holds_alternative<TranslationMap>(map)) b.weakmix_lower = one_minus / (1.0 - g.value) - 1.0;
    if (in.tau.is_finite() && above(static_cast<double>(in.tau.n), b.gb_upper1))
      b.violations.push_back("tau above 1/|ln||G||| + 1");
    if (in.tau.is_finite() && b.weakmix_lower && below(static_cast<double>(in.tau.n), *b.weakmix_lower))
      b.violations.push_back("tau below the eigenfunction lower bound");
    if (in.dense) {
      DissipationOptions dopt = opt.dissipation;
      TauValue td = dissipation_time(*in.dense, Mode::Noisy, dopt);
      b.tau_dense = td;
      if (td.is_finite()) b.dense_leakage = in.dense->noisy_norm(td.n).leakage;
      auto ps = pseudospectrum_distance(*in.dense, 1.0, opt.angles);
      b.d1 = ps.distance;
      b.gb_lower = one_minus / ps.distance;
      if (td.is_finite() && below(static_cast<double>(td.n), *b.gb_lower))
        b.violations.push_back("truncated tau below (1 - 1/e)/d(1)");
      if (td.is_finite() && above(static_cast<double>(td.n), b.gb_upper1))
        b.violations.push_back("truncated tau above 1/|ln||G||| + 1");
      if (opt.upper2) {
        double r0 = std::max(in.dense->spectral_radius(), 0.01);
        if (r0 < 1) {
          double best = std::numeric_limits<double>::infinity();
          for (int i = 1; i <= 16; ++i) {
            double r = r0 * std::pow(1.0 / r0, i / 17.0);
            auto pr = pseudospectrum_distance(*in.dense, r, opt.angles);
            if (pr.distance > 0) best = std::min(best, std::log(std::exp(1.0) / pr.distance) / std::abs(std::log(r)));
          }
          b.gb_upper2 = best;
          if (td.is_finite() && above(static_cast<double>(td.n), best))
            b.violations.push_back("truncated tau above the pseudospectral upper bound");
        }
      }
    }
    if (!b.violations.empty()) rep.violated = true;
    rep.entries.push_back(std::move(b));
  }
  return rep;
}

}  // namespace tordiss
