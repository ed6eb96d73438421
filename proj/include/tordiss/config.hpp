#pragma once

#include "tordiss/analysis.hpp"
#include "tordiss/maps.hpp"
#include "tordiss/noise.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tordiss {

inline constexpr const char* kVersion = "0.3.0";

// Experiment description read from an INI file with sections
// [map] [noise] [epsilon] [run] [dense] [analysis] [output].
struct ExperimentConfig {
  // [map]
  std::string map_type = "linear";  // linear | translation | perturbed_cat
  IntMatrix matrix;
  std::vector<double> theta;
  double delta = 0;
  int64_t N = 0;

  // [noise]
  std::string noise_kind = "alpha_stable";  // alpha_stable | custom
  double alpha = 2;
  Eigen::MatrixXd Q;
  std::string table;
  std::string envelope;

  // [epsilon]
  double eps_start = 1e-2, eps_stop = 1e-6;
  int eps_count = 9;

  // [run]
  std::string tag = "run";
  bool noisy = true, coarse = true;
  int64_t n_cap = 1'000'000;
  double eta = 0;  // 0 means e^{-1}
  std::string engine = "auto";  // auto | lattice | dense
  unsigned jobs = 0;            // 0 means logical cores
  int64_t norms_n_max = 20;

  // [dense]
  int64_t K = 16;
  std::string cache;

  // [analysis]
  bool bounds = true;
  bool dense_bounds = true;
  bool upper2 = false;
  int angles = 256;
  std::vector<double> radii{1.0};
  bool correlations = false;
  std::string f_obs, h_obs;
  int64_t corr_n_max = 20;
  std::optional<double> s, s_star;
  double supexp_delta = 0;  // 0 disables the check

  // [output]
  std::string out_dir = ".";

  std::string source;  // raw text, hashed into the CSV headers
  std::string base_dir;

  int dim() const;
  std::vector<double> eps_grid() const;
  TorusMap build_map() const;
  NoiseKernel build_kernel() const;
  DissipationOptions dissipation_options() const;
  bool use_dense() const;
  unsigned worker_count() const;
};

ExperimentConfig parse_config(const std::string& text, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);
// FNV-1a of the config text.
uint64_t config_hash(const std::string& text);
std::string hex_hash(uint64_t h);

}  // namespace tordiss
