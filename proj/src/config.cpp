#include "tordiss/config.hpp"

#include "tordiss/error.hpp"
#include "tordiss/parallel.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace tordiss {

namespace pt = boost::property_tree;

namespace {

const std::set<std::string> kKnownKeys = {
    "map.type", "map.matrix", "map.theta", "map.delta", "map.N",
    "noise.kind", "noise.alpha", "noise.Q", "noise.table", "noise.envelope",
    "epsilon.start", "epsilon.stop", "epsilon.count",
    "run.tag", "run.modes", "run.n_cap", "run.eta", "run.engine", "run.jobs", "run.n_max",
    "dense.K", "dense.cache",
    "analysis.bounds", "analysis.dense_bounds", "analysis.upper2", "analysis.angles", "analysis.radii",
    "analysis.correlations", "analysis.f", "analysis.h", "analysis.corr_n_max", "analysis.s",
    "analysis.s_star", "analysis.supexp_delta",
    "output.dir",
};

std::string trim(std::string s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  s = s.substr(b, e - b + 1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

class Reader {
public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  std::optional<std::string> raw(const std::string& key) const {
    auto v = tree_.get_optional<std::string>(pt::ptree::path_type(key, '.'));
    if (!v) return std::nullopt;
    return trim(*v);
  }
  std::string str(const std::string& key, const std::string& def) const { return raw(key).value_or(def); }

  double real(const std::string& key, double def) const {
    auto v = raw(key);
    if (!v) return def;
    return to_double(key, *v);
  }
  int64_t integer(const std::string& key, int64_t def) const {
    auto v = raw(key);
    if (!v) return def;
    try {
      size_t pos = 0;
      long long x = std::stoll(*v, &pos);
      if (pos != v->size()) throw std::invalid_argument("trailing");
      return x;
    } catch (const std::exception&) {
      throw ConfigError(key, "expected an integer, got '" + *v + "'");
    }
  }
  bool boolean(const std::string& key, bool def) const {
    auto v = raw(key);
    if (!v) return def;
    if (*v == "true" || *v == "yes" || *v == "on" || *v == "1") return true;
    if (*v == "false" || *v == "no" || *v == "off" || *v == "0") return false;
    throw ConfigError(key, "expected true or false, got '" + *v + "'");
  }
  std::vector<double> list(const std::string& key) const {
    std::vector<double> out;
    auto v = raw(key);
    if (!v) return out;
    std::stringstream ss(*v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
    return out;
  }

  static double to_double(const std::string& key, const std::string& v) {
    try {
      size_t pos = 0;
      double x = std::stod(v, &pos);
      if (pos != v.size()) throw std::invalid_argument("trailing");
      return x;
    } catch (const std::exception&) {
      throw ConfigError(key, "expected a number, got '" + v + "'");
    }
  }

private:
  const pt::ptree& tree_;
};

Eigen::MatrixXd parse_q(const std::string& key, const std::string& text, int d) {
  if (text.empty()) return Eigen::MatrixXd::Identity(d, d);
  std::vector<std::vector<double>> rows;
  std::stringstream ss(text);
  std::string row;
  while (std::getline(ss, row, ';')) {
    rows.emplace_back();
    std::stringstream rs(row);
    std::string item;
    while (std::getline(rs, item, ',')) rows.back().push_back(Reader::to_double(key, trim(item)));
  }
  if (rows.size() == 1 && rows[0].size() == 1) return rows[0][0] * Eigen::MatrixXd::Identity(d, d);
  if (static_cast<int>(rows.size()) != d) throw ConfigError(key, "Q must be " + std::to_string(d) + "x" + std::to_string(d));
  Eigen::MatrixXd Q(d, d);
  for (int i = 0; i < d; ++i) {
    if (static_cast<int>(rows[static_cast<size_t>(i)].size()) != d) throw ConfigError(key, "ragged Q");
    for (int j = 0; j < d; ++j) Q(i, j) = rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
  }
  if ((Q - Q.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw ConfigError(key, "Q must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q);
  if (es.eigenvalues().minCoeff() <= 0) throw ConfigError(key, "Q must be positive definite");
  return Q;
}

void collect_keys(const pt::ptree& tree, std::vector<std::string>& keys) {
  for (const auto& [section, child] : tree) {
    if (child.empty()) {
      keys.push_back(section);
      continue;
    }
    for (const auto& [key, value] : child) keys.push_back(section + "." + key);
  }
}

}  // namespace

uint64_t config_hash(const std::string& text) {
  uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string hex_hash(uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentConfig parse_config(const std::string& text, const std::string& base_dir) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("line " + std::to_string(e.line()), e.message());
  }
  std::vector<std::string> keys;
  collect_keys(tree, keys);
  for (const auto& k : keys)
    if (!kKnownKeys.count(k)) throw ConfigError(k, "unknown key");

  Reader r(tree);
  ExperimentConfig c;
  c.source = text;
  c.base_dir = base_dir;

  c.map_type = r.str("map.type", "linear");
  if (c.map_type == "linear") {
    auto m = r.raw("map.matrix");
    if (!m) throw ConfigError("map.matrix", "required for linear maps");
    try {
      c.matrix = IntMatrix::parse(*m);
    } catch (const std::exception& e) {
      throw ConfigError("map.matrix", e.what());
    }
  } else if (c.map_type == "translation") {
    c.theta = r.list("map.theta");
    if (c.theta.empty()) throw ConfigError("map.theta", "required for translations");
  } else if (c.map_type == "perturbed_cat") {
    try {
      c.matrix = IntMatrix::parse(r.str("map.matrix", "2,1;1,1"));
    } catch (const std::exception& e) {
      throw ConfigError("map.matrix", e.what());
    }
    c.delta = r.real("map.delta", 0.0);
    c.N = r.integer("map.N", 0);
    if (c.delta != 0 && c.matrix.dim() != 2) throw ConfigError("map.delta", "nonzero delta needs a 2x2 matrix");
    if (!std::isfinite(c.delta)) throw ConfigError("map.delta", "must be finite");
  } else {
    throw ConfigError("map.type", "expected linear, translation or perturbed_cat, got '" + c.map_type + "'");
  }
  if (c.map_type != "translation") {
    BigInt det = determinant(c.matrix);
    if (det == 0) throw ConfigError("map.matrix", "singular matrix");
  }

  c.noise_kind = r.str("noise.kind", "alpha_stable");
  if (c.noise_kind != "alpha_stable" && c.noise_kind != "custom")
    throw ConfigError("noise.kind", "expected alpha_stable or custom");
  c.alpha = r.real("noise.alpha", 2.0);
  if (!(c.alpha > 0 && c.alpha <= 2)) throw ConfigError("noise.alpha", "must lie in (0, 2]");
  c.Q = parse_q("noise.Q", r.str("noise.Q", ""), c.dim());
  c.table = r.str("noise.table", "");
  c.envelope = r.str("noise.envelope", "");
  if (c.noise_kind == "custom" && c.table.empty()) throw ConfigError("noise.table", "required for custom kernels");
  try {
    Envelope::parse(c.envelope);
  } catch (const std::exception& e) {
    throw ConfigError("noise.envelope", e.what());
  }

  c.eps_start = r.real("epsilon.start", c.eps_start);
  c.eps_stop = r.real("epsilon.stop", c.eps_stop);
  c.eps_count = static_cast<int>(r.integer("epsilon.count", c.eps_count));
  if (c.eps_count < 1) throw ConfigError("epsilon.count", "must be at least 1");
  if (!(c.eps_start > 0) || !std::isfinite(c.eps_start)) throw ConfigError("epsilon.start", "must be positive");
  if (c.eps_count > 1 && !(c.eps_stop > 0 && c.eps_stop < c.eps_start))
    throw ConfigError("epsilon.stop", "must be positive and below epsilon.start");

  c.tag = r.str("run.tag", "run");
  if (c.tag.empty() || c.tag.find_first_of("/\\ ") != std::string::npos)
    throw ConfigError("run.tag", "must be a nonempty word");
  std::string modes = r.str("run.modes", "both");
  if (modes == "both") c.noisy = c.coarse = true;
  else if (modes == "noisy") c.noisy = true, c.coarse = false;
  else if (modes == "coarse") c.noisy = false, c.coarse = true;
  else throw ConfigError("run.modes", "expected noisy, coarse or both");
  c.n_cap = r.integer("run.n_cap", c.n_cap);
  if (c.n_cap < 1) throw ConfigError("run.n_cap", "must be at least 1");
  c.eta = r.real("run.eta", 0.0);
  if (c.eta != 0 && !(c.eta > 0 && c.eta < 1)) throw ConfigError("run.eta", "must lie in (0, 1)");
  c.engine = r.str("run.engine", "auto");
  if (c.engine != "auto" && c.engine != "lattice" && c.engine != "dense")
    throw ConfigError("run.engine", "expected auto, lattice or dense");
  if (c.engine == "lattice" && c.map_type == "perturbed_cat" && c.delta != 0)
    throw ConfigError("run.engine", "the lattice engine needs a linear map or a translation");
  int64_t jobs = r.integer("run.jobs", 0);
  if (jobs < 0) throw ConfigError("run.jobs", "must be nonnegative");
  c.jobs = static_cast<unsigned>(jobs);
  c.norms_n_max = r.integer("run.n_max", c.norms_n_max);
  if (c.norms_n_max < 1) throw ConfigError("run.n_max", "must be at least 1");

  c.K = r.integer("dense.K", c.K);
  if (c.K < 1) throw ConfigError("dense.K", "must be at least 1");
  c.cache = r.str("dense.cache", "");
  if (c.map_type == "perturbed_cat") {
    if (c.N < 4 * c.K) throw ConfigError("map.N", "must be at least 4 * dense.K = " + std::to_string(4 * c.K));
  }

  c.bounds = r.boolean("analysis.bounds", c.bounds);
  c.dense_bounds = r.boolean("analysis.dense_bounds", c.dense_bounds);
  c.upper2 = r.boolean("analysis.upper2", c.upper2);
  c.angles = static_cast<int>(r.integer("analysis.angles", c.angles));
  if (c.angles < 64) throw ConfigError("analysis.angles", "must be at least 64");
  if (r.raw("analysis.radii")) c.radii = r.list("analysis.radii");
  for (double x : c.radii)
    if (!(x > 0)) throw ConfigError("analysis.radii", "radii must be positive");
  c.correlations = r.boolean("analysis.correlations", c.correlations);
  c.f_obs = r.str("analysis.f", "");
  c.h_obs = r.str("analysis.h", "");
  c.corr_n_max = r.integer("analysis.corr_n_max", c.corr_n_max);
  if (c.corr_n_max < 1) throw ConfigError("analysis.corr_n_max", "must be at least 1");
  if (r.raw("analysis.s")) c.s = r.real("analysis.s", 1.0);
  if (r.raw("analysis.s_star")) c.s_star = r.real("analysis.s_star", 1.0);
  c.supexp_delta = r.real("analysis.supexp_delta", 0.0);
  if (c.supexp_delta != 0 && !(c.supexp_delta > 0 && c.supexp_delta < 1))
    throw ConfigError("analysis.supexp_delta", "must lie in (0, 1)");
  for (auto [key, text] : {std::pair{"analysis.f", c.f_obs}, std::pair{"analysis.h", c.h_obs}}) {
    if (text.empty()) {
      if (c.correlations) throw ConfigError(key, "required when analysis.correlations is on");
      continue;
    }
    try {
      parse_observable(text, c.dim());
    } catch (const std::exception& e) {
      throw ConfigError(key, e.what());
    }
  }

  c.out_dir = r.str("output.dir", ".");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  auto dir = std::filesystem::path(path).parent_path().string();
  return parse_config(ss.str(), dir.empty() ? "." : dir);
}

int ExperimentConfig::dim() const {
  return map_type == "translation" ? static_cast<int>(theta.size()) : matrix.dim();
}

std::vector<double> ExperimentConfig::eps_grid() const {
  std::vector<double> g;
  if (eps_count == 1) return {eps_start};
  const double ls = std::log(eps_start), le = std::log(eps_stop);
  for (int i = 0; i < eps_count; ++i) {
    if (i == 0) g.push_back(eps_start);
    else if (i == eps_count - 1) g.push_back(eps_stop);
    else g.push_back(std::exp(ls + (le - ls) * i / (eps_count - 1)));
  }
  return g;
}

TorusMap ExperimentConfig::build_map() const {
  if (map_type == "translation") return TranslationMap(theta);
  if (map_type == "perturbed_cat") {
    try {
      return SampledMap(matrix, delta, N);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("map.delta", e.what());
    }
  }
  return LinearToralMap(matrix);
}

NoiseKernel ExperimentConfig::build_kernel() const {
  if (noise_kind == "alpha_stable") return NoiseKernel::alpha_stable(dim(), alpha, Q);
  auto path = std::filesystem::path(table);
  if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
  try {
    return NoiseKernel::custom_from_file(dim(), alpha, Q, path.string(), Envelope::parse(envelope));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("noise.table", e.what());
  }
}

DissipationOptions ExperimentConfig::dissipation_options() const {
  DissipationOptions o;
  if (eta != 0) o.eta = eta;
  o.n_cap = n_cap;
  return o;
}

bool ExperimentConfig::use_dense() const {
  if (engine == "dense") return true;
  if (engine == "lattice") return false;
  return map_type == "perturbed_cat" && delta != 0;
}

unsigned ExperimentConfig::worker_count() const { return jobs ? jobs : default_jobs(); }

}  // namespace tordiss
