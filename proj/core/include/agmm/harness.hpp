// Experiment orchestration: config files, seeded parallel Monte Carlo over
// (cell, replicate) tasks, and result-table emission.

#pragma once

#include "agmm/estimators.hpp"
#include "agmm/simgen.hpp"
#include "agmm/sparseobs.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace agmm {

struct ExperimentConfig {
  std::string name = "experiment";
  int example_id = 1;
  std::vector<int> n_list = {200};
  std::vector<int> d_list = {2};
  std::vector<int> m_list;  // per-curve observation counts, example 3 only
  std::vector<Method> methods = {Method::agmm};
  int replicates = 100;
  int L = 5;
  int grid_size = 100;
  BasisKind basis = BasisKind::cosine;
  int noise_dim = 10;
  double response_noise_sd = 1.0;

  std::string j_policy = "cv";  // "cv" | "fixed"
  int j_fixed = 15;
  std::vector<int> j_grid;      // default 5..25
  int j_cv_folds = 10;
  int cls_j = 15;  // basis dimension for the smoothed covariance competitor

  std::string d_policy = "oracle";  // "oracle" | "bootstrap" | "ratio"
  int bootstrap_B = 200;
  double bootstrap_alpha = 0.05;
  int d_max = 10;
  double variance_threshold = 0.90;

  double ridge_rho = 0.0;
  int ridge_M_bar = 0;  // 0 = twice the ratio-selected M

  double obs_noise_sd = 0.5;
  std::vector<double> h_grid_C;  // defaults chosen at run time
  std::vector<double> h_grid_S;
  int h_folds = 10;
  double sparse_ratio_threshold = 0.95;

  std::uint64_t seed = 20170101;
};

struct CellResult {
  int n = 0;
  int d = 0;
  int m = 0;  // 0 for fully observed panels
  Method method = Method::agmm;
  double mise_mean = 0.0;
  double mise_se = 0.0;
  int count = 0;   // successful replicates
  int failed = 0;
  double wall_ms = 0.0;
  bool cell_failed = false;  // more than 5% of replicates failed
};

struct ResultTable {
  std::vector<CellResult> cells;
  bool any_failed() const;
};

// key = value file with one [section] per experiment; lists are
// comma-separated.  Unknown keys are an error.
std::vector<ExperimentConfig> parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, std::vector<ExperimentConfig>* all = nullptr);

// Runs replicates across `workers` threads.  Replicate r of cell c always
// consumes the stream mix(seed, c, r), so results are identical for any
// worker count.
ResultTable run_experiment(const ExperimentConfig& config, int workers = 1);

std::string table_to_csv(const ResultTable& table);
std::string table_to_markdown(const ResultTable& table);
void emit_table(const ResultTable& table, const std::string& path, const std::string& format);
ResultTable parse_table_csv(const std::string& text);

}  // namespace agmm
