#include "tordiss/runner.hpp"

#include "tordiss/error.hpp"
#include "tordiss/parallel.hpp"
#include "tordiss/serialization.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <ostream>
#include <sstream>

namespace tordiss {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

std::optional<Subcommand> parse_subcommand(const std::string& name) {
  static const std::pair<const char*, Subcommand> table[] = {
      {"norms", Subcommand::Norms},         {"dissipation", Subcommand::Dissipation},
      {"pseudospectrum", Subcommand::Pseudospectrum}, {"correlations", Subcommand::Correlations},
      {"bounds", Subcommand::Bounds},       {"sweep", Subcommand::Sweep},
      {"selftest", Subcommand::Selftest},
  };
  for (auto& [n, s] : table)
    if (name == n) return s;
  return std::nullopt;
}

std::string to_string(Subcommand s) {
  switch (s) {
    case Subcommand::Norms: return "norms";
    case Subcommand::Dissipation: return "dissipation";
    case Subcommand::Pseudospectrum: return "pseudospectrum";
    case Subcommand::Correlations: return "correlations";
    case Subcommand::Bounds: return "bounds";
    case Subcommand::Sweep: return "sweep";
    case Subcommand::Selftest: return "selftest";
  }
  return "?";
}

namespace {

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string opt_num(const std::optional<double>& x) { return x ? num(*x) : ""; }

ordered_json jnum(double x) {
  if (std::isfinite(x)) return x;
  return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
}

ordered_json jopt(const std::optional<double>& x) { return x ? jnum(*x) : ordered_json(nullptr); }

class CsvFile {
public:
  CsvFile(const fs::path& path, const ExperimentConfig& c, const std::string& columns) : path_(path) {
    os_ << "# tordiss " << kVersion << " config " << hex_hash(config_hash(c.source)) << "\n";
    os_ << columns << "\n";
  }
  void row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
    os_ << "\n";
  }
  std::string close() {
    std::ofstream f(path_, std::ios::binary);
    if (!f) throw ConfigError("output.dir", "cannot write " + path_.string());
    f << os_.str();
    return path_.string();
  }

private:
  fs::path path_;
  std::ostringstream os_;
};

// Everything a subcommand needs, built once per run.
class Context {
public:
  Context(const ExperimentConfig& c, unsigned jobs) : cfg(c), jobs(jobs), map(c.build_map()), kernel(c.build_kernel()) {
    eps = c.eps_grid();
    dense = c.use_dense();
    if (auto* sm = std::get_if<SampledMap>(&map); sm && sm->delta() == 0) lattice_map = LinearToralMap(sm->matrix());
    else if (!std::holds_alternative<SampledMap>(map)) lattice_map = map;
  }

  const ExperimentConfig& cfg;
  unsigned jobs;
  TorusMap map;
  std::optional<TorusMap> lattice_map;
  NoiseKernel kernel;
  std::vector<double> eps;
  bool dense = false;

  bool non_weakly_mixing() const {
    if (std::holds_alternative<TranslationMap>(map)) return true;
    if (auto* lin = std::get_if<LinearToralMap>(&map)) return !ergodicity_test(*lin);
    return false;
  }

  void assemble_koopman() {
    if (koopman_) return;
    auto grid = make_grid(map_dim(map), cfg.K);
    fs::path cache;
    if (!cfg.cache.empty()) {
      cache = cfg.cache;
      if (cache.is_relative()) cache = fs::path(cfg.base_dir) / cache;
    }
    if (!cache.empty() && fs::exists(cache)) {
      DenseOperator U = load_operator(cache.string());
      if (!(*U.grid() == *grid)) throw ConfigError("dense.cache", "cached operator has a different grid");
      std::vector<double> leak(static_cast<size_t>(grid->size()));
      for (int64_t c = 0; c < grid->size(); ++c)
        leak[static_cast<size_t>(c)] = std::clamp(1.0 - U.entries().col(c).squaredNorm(), 0.0, 1.0);
      koopman_ = std::make_pair(std::move(U), std::move(leak));
      return;
    }
    if (auto* sm = std::get_if<SampledMap>(&map)) {
      auto gm = koopman_matrix(*sm, grid, jobs);
      koopman_ = std::make_pair(std::move(gm.U), std::move(gm.leaked));
    } else {
      koopman_ = exact_koopman(map, grid);
    }
    if (!cache.empty()) save_operator(cache.string(), koopman_->first);
  }

  std::unique_ptr<DenseEngine> make_dense(double e) {
    assemble_koopman();
    DenseOptions opt;
    opt.K = cfg.K;
    opt.jobs = 1;
    return std::make_unique<DenseEngine>(koopman_->first, koopman_->second, kernel, e, opt, non_weakly_mixing());
  }

  std::unique_ptr<PropagationEngine> make_engine(double e) {
    if (dense) return make_dense(e);
    if (!lattice_map) throw ConfigError("run.engine", "the lattice engine needs a linear map or a translation");
    return std::make_unique<LatticeOrbitEngine>(*lattice_map, kernel, e);
  }

  // One engine per grid point, in grid order.
  std::vector<std::unique_ptr<PropagationEngine>> engines() {
    if (dense) assemble_koopman();
    std::vector<std::unique_ptr<PropagationEngine>> out(eps.size());
    parallel_for(static_cast<int64_t>(eps.size()), jobs,
                 [&](int64_t i) { out[static_cast<size_t>(i)] = make_engine(eps[static_cast<size_t>(i)]); });
    return out;
  }

  std::vector<std::unique_ptr<DenseEngine>> dense_engines() {
    assemble_koopman();
    std::vector<std::unique_ptr<DenseEngine>> out(eps.size());
    parallel_for(static_cast<int64_t>(eps.size()), jobs,
                 [&](int64_t i) { out[static_cast<size_t>(i)] = make_dense(eps[static_cast<size_t>(i)]); });
    return out;
  }

  std::vector<Mode> modes() const {
    std::vector<Mode> m;
    if (cfg.noisy) m.push_back(Mode::Noisy);
    if (cfg.coarse) m.push_back(Mode::Coarse);
    return m;
  }

  fs::path out_dir;

  fs::path file(const std::string& stem) const { return out_dir / (stem + "_" + cfg.tag + ".csv"); }

private:
  std::optional<std::pair<DenseOperator, std::vector<double>>> koopman_;
};

struct TauRow {
  double eps;
  Mode mode;
  std::string engine;
  TauValue tau;
  double leakage = 0;
};

std::vector<TauRow> compute_taus(Context& ctx, const std::vector<std::unique_ptr<PropagationEngine>>& engines,
                                 const std::vector<Mode>& modes) {
  const auto opt = ctx.cfg.dissipation_options();
  std::vector<TauRow> rows(ctx.eps.size() * modes.size());
  parallel_for(static_cast<int64_t>(rows.size()), ctx.jobs, [&](int64_t w) {
    size_t i = static_cast<size_t>(w) / modes.size();
    Mode m = modes[static_cast<size_t>(w) % modes.size()];
    const auto& e = *engines[i];
    TauRow r{ctx.eps[i], m, e.tag(), dissipation_time(e, m, opt)};
    if (r.tau.is_finite()) r.leakage = e.norm(r.tau.n, m).leakage;
    rows[static_cast<size_t>(w)] = r;
  });
  return rows;
}

ordered_json fit_json(const RateFit& f) {
  auto lf = [](const LinearFit& l) {
    return ordered_json{{"slope", jnum(l.slope)}, {"intercept", jnum(l.intercept)}, {"r2", jnum(l.r2)},
                        {"points", l.points}};
  };
  return ordered_json{{"model", to_string(f.model)},
                      {"R_star", jnum(f.R_star())},
                      {"beta", jnum(f.beta())},
                      {"C", jnum(f.C())},
                      {"logarithmic", lf(f.logarithmic)},
                      {"power", lf(f.power)},
                      {"logarithmic_all", lf(f.logarithmic_all)},
                      {"power_all", lf(f.power_all)},
                      {"eps_min", jnum(f.eps_min)},
                      {"eps_max", jnum(f.eps_max)},
                      {"excluded", f.excluded},
                      {"notice", f.notice}};
}

ordered_json decay_json(const DecayFit& f) {
  return ordered_json{{"model", to_string(f.model)}, {"sigma", jnum(f.sigma)}, {"beta", jnum(f.beta)},
                      {"exponential_r2", jnum(f.exponential.r2)}, {"power_r2", jnum(f.power.r2)},
                      {"double_exponential_r2", jnum(f.double_exponential.r2)}, {"notice", f.notice}};
}

std::string fit_summary(const RateFit& f) {
  std::ostringstream os;
  os << to_string(f.model);
  if (f.model == RateFit::Model::Logarithmic) os << " R*=" << std::setprecision(5) << f.R_star();
  if (f.model == RateFit::Model::Power) os << " beta=" << std::setprecision(5) << f.beta() << " C=" << f.C();
  return os.str();
}

// s, s_star defaults: s = s_star = 1 for automorphisms, s_star = 0 for expanding maps.
std::pair<double, double> smoothness(const ExperimentConfig& c, const TorusMap& map) {
  double s = c.s.value_or(1.0);
  double def_star = 1.0;
  if (auto* lin = std::get_if<LinearToralMap>(&map); lin && !lin->invertible()) def_star = 0.0;
  return {s, c.s_star.value_or(def_star)};
}

std::optional<double> envelope_sigma(const TorusMap& map, double s, double s_star, ordered_json& report) {
  if (std::holds_alternative<TranslationMap>(map)) {
    report["envelope"] = {{"notice", "translations do not mix"}};
    return std::nullopt;
  }
  int64_t n_max = std::holds_alternative<SampledMap>(map) ? 6 : 12;
  EnvelopeSeries env = correlation_envelope(map, n_max, s, s_star);
  DecayFit fit = decay_fit(env.n, env.gamma);
  ordered_json g = ordered_json::array();
  for (double x : env.gamma) g.push_back(jnum(x));
  report["envelope"] = {{"s", s}, {"s_star", s_star}, {"gamma", g}, {"fit", decay_json(fit)}};
  if (fit.model == DecayFit::Model::Exponential && fit.sigma > 0 && fit.sigma < 1) return fit.sigma;
  if (fit.exponential.slope < 0) return std::exp(fit.exponential.slope);
  return std::nullopt;
}

void print_summary(std::ostream& out, const std::vector<double>& eps, const std::vector<TauRow>& taus,
                   const BoundReport* bounds) {
  out << std::left << std::setw(14) << "eps" << std::setw(16) << "tau*" << std::setw(16) << "tau~*" << std::setw(14)
      << "gb_lower" << std::setw(14) << "gb_upper1" << "\n";
  for (size_t i = 0; i < eps.size(); ++i) {
    std::string t = "-", tc = "-", lo = "-", up = "-";
    for (auto& r : taus)
      if (r.eps == eps[i]) (r.mode == Mode::Noisy ? t : tc) = r.tau.str();
    if (bounds && i < bounds->entries.size()) {
      const auto& b = bounds->entries[i];
      if (b.gb_lower) {
        std::ostringstream os;
        os << std::setprecision(6) << *b.gb_lower;
        lo = os.str();
      }
      std::ostringstream os;
      os << std::setprecision(6) << b.gb_upper1;
      up = os.str();
    }
    std::ostringstream e;
    e << std::setprecision(6) << eps[i];
    out << std::setw(14) << e.str() << std::setw(16) << t << std::setw(16) << tc << std::setw(14) << lo
        << std::setw(14) << up << "\n";
  }
}

class Runner {
public:
  Runner(const ExperimentConfig& c, const RunOptions& o, std::ostream& out)
      : cfg_(c), out_(out), ctx_(c, o.jobs.value_or(c.worker_count())) {
    ctx_.out_dir = o.out_dir.value_or(c.out_dir);
    if (ctx_.out_dir.is_relative() && !o.out_dir) ctx_.out_dir = fs::path(c.base_dir) / ctx_.out_dir;
    fs::create_directories(ctx_.out_dir);
    report_["version"] = kVersion;
    report_["config_hash"] = hex_hash(config_hash(c.source));
    report_["tag"] = c.tag;
    report_["map"] = describe(ctx_.map);
    report_["kernel"] = ctx_.kernel.describe();
    report_["engine"] = ctx_.dense ? "dense" : "lattice";
  }

  RunResult run(Subcommand cmd) {
    report_["subcommand"] = to_string(cmd);
    switch (cmd) {
      case Subcommand::Norms: norms(); break;
      case Subcommand::Dissipation: dissipation(false); break;
      case Subcommand::Pseudospectrum: pseudospectrum(); break;
      case Subcommand::Correlations: correlations(); break;
      case Subcommand::Bounds: bounds(dissipation(true)); break;
      case Subcommand::Sweep: {
        auto taus = dissipation(false);
        if (cfg_.bounds) bounds(taus);
        if (cfg_.correlations) correlations();
        break;
      }
      case Subcommand::Selftest: throw std::logic_error("selftest does not take a config");
    }
    if (!summary_printed_ && !summary_taus_.empty()) flush_summary();
    std::ofstream f(ctx_.out_dir / ("report_" + cfg_.tag + ".json"), std::ios::binary);
    f << report_.dump(2) << "\n";
    result_.files.push_back((ctx_.out_dir / ("report_" + cfg_.tag + ".json")).string());
    return result_;
  }

private:
  void norms() {
    auto engines = ctx_.engines();
    auto modes = ctx_.modes();
    std::vector<NormCurve> curves(ctx_.eps.size() * modes.size());
    parallel_for(static_cast<int64_t>(curves.size()), ctx_.jobs, [&](int64_t w) {
      size_t i = static_cast<size_t>(w) / modes.size();
      curves[static_cast<size_t>(w)] =
          norm_curve(*engines[i], cfg_.norms_n_max, modes[static_cast<size_t>(w) % modes.size()]);
    });
    CsvFile csv(ctx_.file("norms"), cfg_, "eps,mode,engine,n,norm,log_norm,leakage");
    ordered_json j = ordered_json::array();
    for (const auto& c : curves) {
      for (const auto& p : c.entries)
        csv.row({num(c.eps), to_string(c.mode), c.engine, std::to_string(p.n), num(p.value),
                 num(static_cast<double>(p.log_value)), num(p.leakage)});
      j.push_back({{"eps", c.eps}, {"mode", to_string(c.mode)}, {"max_leakage", jnum(c.max_leakage)}});
    }
    report_["norm_curves"] = j;
    result_.files.push_back(csv.close());
    out_ << "norm curves: " << curves.size() << " (n <= " << cfg_.norms_n_max << ")\n";
  }

  std::vector<TauRow> dissipation(bool noisy_only) {
    auto engines = ctx_.engines();
    auto modes = noisy_only ? std::vector<Mode>{Mode::Noisy} : ctx_.modes();
    auto taus = compute_taus(ctx_, engines, modes);
    CsvFile csv(ctx_.file("dissipation"), cfg_, "eps,mode,engine,tau,status,leakage");
    ordered_json rows = ordered_json::array();
    for (const auto& r : taus) {
      std::string status = r.tau.kind == TauValue::Kind::Finite     ? "finite"
                           : r.tau.kind == TauValue::Kind::Infinite ? "infinite"
                                                                   : "exceeds_cap";
      std::string tau = r.tau.kind == TauValue::Kind::Infinite ? "INFINITE" : std::to_string(r.tau.n);
      csv.row({num(r.eps), to_string(r.mode), r.engine, tau, status, num(r.leakage)});
      rows.push_back({{"eps", r.eps}, {"mode", to_string(r.mode)}, {"tau", r.tau.str()}, {"leakage", jnum(r.leakage)}});
    }
    result_.files.push_back(csv.close());
    report_["dissipation"] = rows;
    ordered_json fits;
    for (Mode m : modes) {
      std::vector<std::pair<double, TauValue>> pts;
      for (auto& r : taus)
        if (r.mode == m) pts.emplace_back(r.eps, r.tau);
      RateFit f = rate_fit(pts);
      fits[to_string(m)] = fit_json(f);
      fit_lines_.push_back(to_string(m) + ": " + fit_summary(f) + (f.notice.empty() ? "" : " (" + f.notice + ")"));
    }
    report_["fits"] = fits;
    summary_taus_ = taus;
    // a following bounds step prints the table with its columns filled in
    bool bounds_follow = noisy_only || (cfg_.bounds && report_["subcommand"] == "sweep");
    if (!bounds_follow) flush_summary();
    return taus;
  }

  void flush_summary() {
    print_summary(out_, ctx_.eps, summary_taus_, nullptr);
    for (auto& l : fit_lines_) out_ << "fit " << l << "\n";
    summary_printed_ = true;
  }

  void pseudospectrum() {
    auto engines = ctx_.dense_engines();
    const auto& radii = cfg_.radii;
    std::vector<PseudospectrumResult> res(ctx_.eps.size() * radii.size());
    parallel_for(static_cast<int64_t>(res.size()), ctx_.jobs, [&](int64_t w) {
      size_t i = static_cast<size_t>(w) / radii.size();
      res[static_cast<size_t>(w)] =
          pseudospectrum_distance(*engines[i], radii[static_cast<size_t>(w) % radii.size()], cfg_.angles);
    });
    CsvFile csv(ctx_.file("pseudospectrum"), cfg_, "eps,r,distance,angle,evaluations");
    ordered_json rows = ordered_json::array();
    for (size_t w = 0; w < res.size(); ++w) {
      double e = ctx_.eps[w / radii.size()];
      const auto& p = res[w];
      csv.row({num(e), num(p.r), num(p.distance), num(p.angle), std::to_string(p.evaluations)});
      rows.push_back({{"eps", e}, {"r", p.r}, {"distance", jnum(p.distance)}, {"angle", jnum(p.angle)}});
      out_ << "eps " << std::setprecision(6) << e << "  r " << p.r << "  d=" << std::setprecision(10) << p.distance
           << "\n";
    }
    result_.files.push_back(csv.close());
    report_["pseudospectrum"] = rows;
    summary_printed_ = true;
  }

  void correlations() {
    if (cfg_.f_obs.empty() || cfg_.h_obs.empty())
      throw ConfigError("analysis.f", "correlations need analysis.f and analysis.h");
    const int d = map_dim(ctx_.map);
    Observable f = parse_observable(cfg_.f_obs, d), h = parse_observable(cfg_.h_obs, d);
    // the noiseless series first, then one per grid point
    std::vector<double> eps{0.0};
    eps.insert(eps.end(), ctx_.eps.begin(), ctx_.eps.end());
    std::vector<CorrelationSeries> series(eps.size());
    std::vector<std::vector<double>> norms(eps.size());
    if (ctx_.dense) ctx_.assemble_koopman();
    parallel_for(static_cast<int64_t>(eps.size()), ctx_.jobs, [&](int64_t w) {
      size_t i = static_cast<size_t>(w);
      double e = eps[i] == 0 ? ctx_.eps.front() : eps[i];
      bool noisy = eps[i] != 0;
      auto engine = ctx_.make_engine(e);
      if (auto* de = dynamic_cast<DenseEngine*>(engine.get())) {
        try {
          series[i] = correlation_series(*de, f, h, cfg_.corr_n_max, noisy);
        } catch (const DimensionError& ex) {
          throw ConfigError("analysis.f", std::string(ex.what()) + " (raise dense.K)");
        }
      } else {
        series[i] = correlation_series(static_cast<LatticeOrbitEngine&>(*engine), f, h, cfg_.corr_n_max, noisy);
      }
      norms[i].assign(series[i].n.size(), 1.0);
      if (noisy)
        for (size_t k = 1; k < series[i].n.size(); ++k) norms[i][k] = engine->noisy_norm(series[i].n[k]).value;
    });
    CsvFile csv(ctx_.file("correlations"), cfg_, "eps,n,re,im,abs,bound");
    ordered_json rows = ordered_json::array();
    for (size_t i = 0; i < eps.size(); ++i) {
      const auto& s = series[i];
      for (size_t k = 0; k < s.n.size(); ++k)
        csv.row({num(eps[i]), std::to_string(s.n[k]), num(s.C[k].real()), num(s.C[k].imag()), num(std::abs(s.C[k])),
                 num(s.f_norm * s.h_norm * norms[i][k])});
      rows.push_back({{"eps", eps[i]}, {"fit", decay_json(decay_fit(s))}});
    }
    result_.files.push_back(csv.close());
    report_["correlations"] = rows;
    out_ << "correlations: " << eps.size() << " series, noiseless decay " << to_string(decay_fit(series[0]).model)
         << "\n";
    if (cfg_.supexp_delta > 0) {
      auto* lin = ctx_.lattice_map ? std::get_if<LinearToralMap>(&*ctx_.lattice_map) : nullptr;
      if (!lin) throw ConfigError("analysis.supexp_delta", "the super-exponential check needs a linear map");
      ordered_json sx = ordered_json::array();
      for (double e : ctx_.eps) {
        SupexpReport r = supexp_bound_check(*lin, ctx_.kernel, e, f, h, cfg_.corr_n_max, cfg_.supexp_delta);
        sx.push_back({{"eps", e}, {"h_hat", r.h_hat}, {"all_ok", r.all_ok}});
        out_ << "super-exponential bound at eps " << e << ": " << (r.all_ok ? "holds" : "VIOLATED") << "\n";
        if (!r.all_ok) {
          result_.exit_code = kExitViolation;
          result_.violating_eps.push_back(e);
        }
      }
      report_["supexp"] = sx;
    }
  }

  void bounds(const std::vector<TauRow>& taus) {
    auto [s, s_star] = smoothness(cfg_, ctx_.map);
    BoundOptions opt;
    opt.upper2 = cfg_.upper2;
    opt.angles = cfg_.angles;
    opt.s = s;
    opt.s_star = s_star;
    opt.dissipation = cfg_.dissipation_options();
    opt.sigma = envelope_sigma(ctx_.map, s, s_star, report_);
    std::vector<std::unique_ptr<DenseEngine>> dense;
    if (cfg_.dense_bounds) dense = ctx_.dense_engines();
    std::vector<BoundReport> parts(ctx_.eps.size());
    parallel_for(static_cast<int64_t>(ctx_.eps.size()), ctx_.jobs, [&](int64_t w) {
      size_t i = static_cast<size_t>(w);
      BoundInput in;
      in.eps = ctx_.eps[i];
      for (auto& r : taus)
        if (r.eps == in.eps && r.mode == Mode::Noisy) {
          in.tau = r.tau;
          in.tau_engine = r.engine;
        }
      if (!dense.empty()) in.dense = dense[i].get();
      parts[i] = bound_report(ctx_.map, ctx_.kernel, {in}, opt);
    });
    BoundReport rep = parts.front();
    rep.entries.clear();
    for (auto& p : parts) {
      rep.entries.push_back(p.entries.front());
      rep.violated = rep.violated || p.violated;
    }
    CsvFile csv(ctx_.file("bounds"), cfg_,
                "eps,tau,tau_engine,tau_dense,dense_leakage,d1,gb_lower,gb_upper1,gb_upper2,noise_cap,weakmix_lower,"
                "violations");
    ordered_json rows = ordered_json::array();
    for (const auto& b : rep.entries) {
      std::string viol;
      for (auto& v : b.violations) viol += (viol.empty() ? "" : "; ") + v;
      csv.row({num(b.eps), b.tau.str(), b.tau_engine, b.tau_dense ? b.tau_dense->str() : "", opt_num(b.dense_leakage),
               opt_num(b.d1), opt_num(b.gb_lower), num(b.gb_upper1), opt_num(b.gb_upper2), num(b.noise_cap),
               opt_num(b.weakmix_lower), viol.empty() ? "" : "\"" + viol + "\""});
      ordered_json v = ordered_json::array();
      for (auto& x : b.violations) v.push_back(x);
      rows.push_back({{"eps", b.eps},
                      {"tau", b.tau.str()},
                      {"tau_dense", b.tau_dense ? ordered_json(b.tau_dense->str()) : ordered_json(nullptr)},
                      {"d1", jopt(b.d1)},
                      {"gb_lower", jopt(b.gb_lower)},
                      {"gb_upper1", jnum(b.gb_upper1)},
                      {"gb_upper2", jopt(b.gb_upper2)},
                      {"noise_cap", jnum(b.noise_cap)},
                      {"weakmix_lower", jopt(b.weakmix_lower)},
                      {"violations", v}});
      if (!b.violations.empty()) result_.violating_eps.push_back(b.eps);
    }
    result_.files.push_back(csv.close());
    report_["bounds"] = {{"entries", rows},
                         {"nln_slope", jnum(rep.nln_slope)},
                         {"corr_slope", jopt(rep.corr_slope)},
                         {"s", s},
                         {"s_star", s_star},
                         {"sigma", jopt(opt.sigma)},
                         {"notice", rep.notice}};
    print_summary(out_, ctx_.eps, summary_taus_, &rep);
    for (auto& l : fit_lines_) out_ << "fit " << l << "\n";
    out_ << "slopes: nonlinear lower " << std::setprecision(5) << rep.nln_slope;
    if (rep.corr_slope) out_ << ", correlation upper " << *rep.corr_slope;
    out_ << "\n";
    summary_printed_ = true;
    if (rep.violated) {
      result_.exit_code = kExitViolation;
      for (const auto& b : rep.entries)
        for (const auto& v : b.violations) out_ << "bound violated at eps " << std::setprecision(6) << b.eps << ": " << v << "\n";
    }
  }

  const ExperimentConfig& cfg_;
  std::ostream& out_;
  Context ctx_;
  ordered_json report_;
  RunResult result_;
  std::vector<TauRow> summary_taus_;
  std::vector<std::string> fit_lines_;
  bool summary_printed_ = false;
};

}  // namespace

RunResult run(Subcommand cmd, const ExperimentConfig& config, const RunOptions& options, std::ostream& out) {
  Runner r(config, options, out);
  return r.run(cmd);
}

}  // namespace tordiss
