#include "agmm/harness.hpp"

#include "agmm/moments.hpp"
#include "agmm/rng.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>
#include <tuple>

namespace agmm {

bool ResultTable::any_failed() const {
  for (const auto& c : cells) {
    if (c.cell_failed) return true;
  }
  return false;
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  for (const auto& item : split_list(s)) out.push_back(std::stoi(item));
  return out;
}

std::vector<double> parse_double_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split_list(s)) out.push_back(std::stod(item));
  return out;
}

void apply_key(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "example") cfg.example_id = std::stoi(value);
  else if (key == "n") cfg.n_list = parse_int_list(value);
  else if (key == "d") cfg.d_list = parse_int_list(value);
  else if (key == "m") cfg.m_list = parse_int_list(value);
  else if (key == "methods") {
    cfg.methods.clear();
    for (const auto& name : split_list(value)) cfg.methods.push_back(method_from_name(name));
  }
  else if (key == "replicates") cfg.replicates = std::stoi(value);
  else if (key == "L") cfg.L = std::stoi(value);
  else if (key == "grid") cfg.grid_size = std::stoi(value);
  else if (key == "noise_dim") cfg.noise_dim = std::stoi(value);
  else if (key == "response_noise_sd") cfg.response_noise_sd = std::stod(value);
  else if (key == "basis") {
    if (value == "cosine") cfg.basis = BasisKind::cosine;
    else if (value == "fourier") cfg.basis = BasisKind::fourier;
    else throw ConfigError("config: unknown basis '" + value + "'");
  }
  else if (key == "j_policy") {
    if (value != "cv" && value != "fixed") throw ConfigError("config: j_policy must be cv or fixed");
    cfg.j_policy = value;
  }
  else if (key == "j") cfg.j_fixed = std::stoi(value);
  else if (key == "j_grid") cfg.j_grid = parse_int_list(value);
  else if (key == "j_cv_folds") cfg.j_cv_folds = std::stoi(value);
  else if (key == "cls_j") cfg.cls_j = std::stoi(value);
  else if (key == "d_policy") {
    if (value != "oracle" && value != "bootstrap" && value != "ratio") {
      throw ConfigError("config: d_policy must be oracle, bootstrap or ratio");
    }
    cfg.d_policy = value;
  }
  else if (key == "bootstrap_B") cfg.bootstrap_B = std::stoi(value);
  else if (key == "bootstrap_alpha") cfg.bootstrap_alpha = std::stod(value);
  else if (key == "d_max") cfg.d_max = std::stoi(value);
  else if (key == "variance_threshold") cfg.variance_threshold = std::stod(value);
  else if (key == "ridge_rho") cfg.ridge_rho = std::stod(value);
  else if (key == "ridge_M_bar") cfg.ridge_M_bar = std::stoi(value);
  else if (key == "obs_noise_sd") cfg.obs_noise_sd = std::stod(value);
  else if (key == "h_grid_C") cfg.h_grid_C = parse_double_list(value);
  else if (key == "h_grid_S") cfg.h_grid_S = parse_double_list(value);
  else if (key == "h_folds") cfg.h_folds = std::stoi(value);
  else if (key == "sparse_ratio_threshold") cfg.sparse_ratio_threshold = std::stod(value);
  else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(std::stoull(value));
  else throw ConfigError("config: unknown key '" + key + "'");
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.replicates < 2) throw ConfigError("config: need at least 2 replicates");
  if (cfg.n_list.empty() || cfg.d_list.empty() || cfg.methods.empty()) {
    throw ConfigError("config: n, d and methods lists must be nonempty");
  }
  if (cfg.example_id == 3) {
    if (cfg.m_list.empty()) throw ConfigError("config: example 3 needs an m list");
    for (Method m : cfg.methods) {
      if (m != Method::sparse_agmm) {
        throw ConfigError("config: example 3 supports only the sparse_agmm method");
      }
    }
  }
}

std::vector<ExperimentConfig> parse_config_stream(std::istream& is) {
  std::vector<ExperimentConfig> out;
  std::string line;
  bool have_section = false;
  ExperimentConfig current;
  while (std::getline(is, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[' && line.back() == ']') {
      if (have_section) {
        validate(current);
        out.push_back(current);
      }
      current = ExperimentConfig();
      current.name = trim(line.substr(1, line.size() - 2));
      have_section = true;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("config: expected key = value, got '" + line + "'");
    if (!have_section) {
      current.name = "experiment";
      have_section = true;
    }
    apply_key(current, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  if (have_section) {
    validate(current);
    out.push_back(current);
  }
  if (out.empty()) throw ConfigError("config: no experiments found");
  return out;
}

}  // namespace

std::vector<ExperimentConfig> parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw DataError("config: cannot open " + path);
  return parse_config_stream(is);
}

ExperimentConfig parse_config_text(const std::string& text, std::vector<ExperimentConfig>* all) {
  std::istringstream is(text);
  auto configs = parse_config_stream(is);
  if (all) *all = configs;
  return configs.front();
}

namespace {

struct Cell {
  int n, d, m;
};

// bandwidth grids centered at the local-linear rate for the available pair
// counts: h_C ~ (n m^2)^(-1/6) for the surface, h_S ~ (n m)^(-1/5) for the
// curve smoother
std::vector<double> default_h_grid(double pilot) {
  std::vector<double> grid;
  for (double c : {0.85, 1.2, 1.7, 2.4}) {
    grid.push_back(std::clamp(c * pilot, 0.02, 0.45));
  }
  return grid;
}

// One fully observed replicate: generate, estimate with every configured
// method, return one integrated squared error per method (NaN = failure).
std::vector<double> run_dense_replicate(const ExperimentConfig& cfg, const Grid& grid,
                                        const Cell& cell, std::uint64_t task_seed) {
  DgpSpec spec;
  spec.example_id = cfg.example_id;
  spec.n = cell.n;
  spec.d = cell.d;
  spec.seed = task_seed;
  spec.noise_dim = cfg.noise_dim;
  spec.response_noise_sd = cfg.response_noise_sd;
  const GeneratedPanel gen = gen_example(spec, grid);
  const int true_d = (cfg.example_id == 5) ? 25 : cell.d;

  const bool need_K = std::any_of(cfg.methods.begin(), cfg.methods.end(), [](Method m) {
    return m == Method::agmm || m == Method::base_agmm || m == Method::base_als ||
           m == Method::ridge_agmm;
  });
  const bool need_basis = std::any_of(cfg.methods.begin(), cfg.methods.end(),
                                      [](Method m) { return m == Method::agmm; });
  const bool need_cls_basis = std::any_of(cfg.methods.begin(), cfg.methods.end(),
                                          [](Method m) { return m == Method::cls; });

  std::optional<MomentSet> moments;
  std::optional<SpectralDecomposition> raw_dec;
  if (need_K) {
    MomentOptions mo;
    mo.L = cfg.L;
    mo.with_CW = false;
    moments = compute_moments(gen.W, mo);
    raw_dec = eigen_raw(moments->K);
  }

  int J = cfg.j_fixed;
  std::optional<BasisSet> basis;
  if (need_basis) {
    if (cfg.j_policy == "cv") {
      std::vector<int> j_grid = cfg.j_grid;
      if (j_grid.empty()) {
        for (int j = 5; j <= 25; ++j) j_grid.push_back(j);
      }
      int pilot_d = true_d;
      if (cfg.d_policy != "oracle") {
        if (!raw_dec) raw_dec = eigen_raw(compute_moments(gen.W, {cfg.L, true, false, false}).K);
        pilot_d = select_M_ratio(raw_dec->theta, 0.95);
      }
      J = select_J_cv(gen.W, pilot_d, j_grid, cfg.j_cv_folds, cfg.basis, cfg.L);
    }
    basis = make_basis(cfg.basis, J, grid);
  }

  std::optional<SpectralDecomposition> basis_dec;
  if (need_K && basis) basis_dec = eigen_basis(moments->K, *basis);
  std::optional<BasisSet> cls_basis;
  if (need_cls_basis) cls_basis = make_basis(cfg.basis, cfg.cls_j, grid);

  // rank for the autocovariance-operator methods
  int k_rank = true_d;
  if (cfg.d_policy == "bootstrap" && need_K) {
    const auto sel = select_d_bootstrap(gen.W, *raw_dec, cfg.bootstrap_B, cfg.bootstrap_alpha,
                                        cfg.d_max, cfg.L, Rng::mix(task_seed, 0xd003));
    k_rank = sel.d_hat;
  }

  const auto rank_for = [&](const SpectralDecomposition& dec) {
    if (cfg.d_policy == "ratio") return select_M_ratio(dec.theta, cfg.variance_threshold);
    return k_rank;
  };

  RankPolicy comp_rank;  // CLS / CGMM follow the variance rule unless oracle
  comp_rank.variance_threshold = cfg.variance_threshold;
  if (cfg.d_policy == "oracle") comp_rank.oracle = true_d;

  std::vector<double> ise(cfg.methods.size(), std::numeric_limits<double>::quiet_NaN());
  for (size_t mi = 0; mi < cfg.methods.size(); ++mi) {
    try {
      SlopeEstimate est = [&]() -> SlopeEstimate {
        switch (cfg.methods[mi]) {
          case Method::base_agmm:
            return agmm_scalar(*moments, *raw_dec, rank_for(*raw_dec));
          case Method::agmm:
            return agmm_scalar(*moments, *basis_dec, rank_for(*basis_dec));
          case Method::base_als:
            return als_scalar(gen.W, *raw_dec, rank_for(*raw_dec));
          case Method::ridge_agmm: {
            const int M = select_M_ratio(raw_dec->theta, cfg.variance_threshold);
            const int M_bar = cfg.ridge_M_bar > 0 ? cfg.ridge_M_bar
                                                  : std::min(2 * M, raw_dec->rank());
            return ridge_agmm(*moments, *raw_dec, M_bar, cfg.ridge_rho);
          }
          case Method::base_cls:
            return cls_scalar(gen.W, comp_rank, nullptr);
          case Method::cls:
            return cls_scalar(gen.W, comp_rank, &*cls_basis);
          case Method::base_cgmm:
            return cgmm_scalar(gen.W, cfg.L, comp_rank);
          default:
            throw ConfigError("method not valid for fully observed panels");
        }
      }();
      ise[mi] = integrated_squared_error(est.beta, gen.beta_true);
    } catch (const std::exception&) {
      // left as NaN; aggregated as a failed replicate for this method
    }
  }
  return ise;
}

std::vector<double> run_sparse_replicate(const ExperimentConfig& cfg, const Grid& grid,
                                         const Cell& cell, std::uint64_t task_seed) {
  SparseDgpSpec sp;
  sp.base.example_id = 2;
  sp.base.n = cell.n;
  sp.base.d = cell.d;
  sp.base.seed = task_seed;
  sp.m_per_curve = cell.m;
  sp.obs_noise_sd = cfg.obs_noise_sd;

  std::vector<double> ise(cfg.methods.size(), std::numeric_limits<double>::quiet_NaN());
  try {
    const auto [spanel, gen] = gen_sparse(sp, grid);
    const double pairs_C = static_cast<double>(cell.n - cfg.L) * cell.m * cell.m;
    const double pairs_S = static_cast<double>(cell.n - cfg.L) * cell.m;
    const auto h_C = cfg.h_grid_C.empty() ? default_h_grid(std::pow(pairs_C, -1.0 / 6.0))
                                          : cfg.h_grid_C;
    const auto h_S = cfg.h_grid_S.empty() ? default_h_grid(std::pow(pairs_S, -1.0 / 5.0))
                                          : cfg.h_grid_S;
    const SmootherSpec spec = select_bandwidths_cv(spanel, h_C, h_S, cfg.h_folds, grid, cfg.L);
    SparseRankRule rule;
    rule.ratio_threshold = cfg.sparse_ratio_threshold;
    if (cfg.d_policy == "oracle") rule.oracle = cell.d;
    const BasisSet basis = make_basis(cfg.basis, std::min(cfg.j_fixed, grid.size()), grid);
    const SlopeEstimate est = sparse_agmm(spanel, spec, cfg.L, rule, grid, &basis);
    const double err = integrated_squared_error(est.beta, gen.beta_true);
    std::fill(ise.begin(), ise.end(), err);
  } catch (const std::exception&) {
  }
  return ise;
}

}  // namespace

ResultTable run_experiment(const ExperimentConfig& cfg, int workers) {
  validate(cfg);
  const Grid grid = Grid::uniform(cfg.grid_size);

  std::vector<Cell> cells;
  for (int n : cfg.n_list) {
    for (int d : cfg.d_list) {
      if (cfg.example_id == 3) {
        for (int m : cfg.m_list) cells.push_back({n, d, m});
      } else {
        cells.push_back({n, d, 0});
      }
    }
  }

  const int R = cfg.replicates;
  const size_t n_methods = cfg.methods.size();
  // ise[cell][rep * n_methods + method]
  std::vector<std::vector<double>> ise(cells.size(),
                                       std::vector<double>(R * n_methods,
                                                           std::numeric_limits<double>::quiet_NaN()));
  std::vector<double> cell_wall_ms(cells.size(), 0.0);
  std::mutex wall_mutex;

  const size_t total_tasks = cells.size() * static_cast<size_t>(R);
  std::atomic<size_t> next{0};
  auto work = [&]() {
    size_t task;
    while ((task = next.fetch_add(1)) < total_tasks) {
      const size_t ci = task / R;
      const int rep = static_cast<int>(task % R);
      // sparse cells that differ only in m share panels, so the observation
      // density comparison is paired
      const std::uint64_t cell_key =
          cfg.example_id == 3
              ? static_cast<std::uint64_t>(cells[ci].n) * 131 + cells[ci].d
              : static_cast<std::uint64_t>(ci);
      const std::uint64_t task_seed = Rng::mix(cfg.seed, cell_key, static_cast<std::uint64_t>(rep));
      const auto t0 = std::chrono::steady_clock::now();
      const std::vector<double> out =
          cfg.example_id == 3 ? run_sparse_replicate(cfg, grid, cells[ci], task_seed)
                              : run_dense_replicate(cfg, grid, cells[ci], task_seed);
      const double ms = std::chrono::duration<double, std::milli>(
                            std::chrono::steady_clock::now() - t0).count();
      for (size_t mi = 0; mi < n_methods; ++mi) ise[ci][rep * n_methods + mi] = out[mi];
      std::lock_guard<std::mutex> lock(wall_mutex);
      cell_wall_ms[ci] += ms;
    }
  };

  const int n_workers = std::max(1, std::min<int>(workers, static_cast<int>(total_tasks)));
  if (n_workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  ResultTable table;
  for (size_t ci = 0; ci < cells.size(); ++ci) {
    for (size_t mi = 0; mi < n_methods; ++mi) {
      std::vector<double> errors;
      errors.reserve(R);
      int failed = 0;
      for (int rep = 0; rep < R; ++rep) {
        const double e = ise[ci][rep * n_methods + mi];
        if (std::isnan(e)) {
          ++failed;
        } else {
          errors.push_back(e);
        }
      }
      const MiseResult mr = mise(errors);
      CellResult cr;
      cr.n = cells[ci].n;
      cr.d = cells[ci].d;
      cr.m = cells[ci].m;
      cr.method = cfg.methods[mi];
      cr.mise_mean = mr.mean;
      cr.mise_se = mr.se;
      cr.count = mr.count;
      cr.failed = failed;
      cr.wall_ms = cell_wall_ms[ci];
      cr.cell_failed = failed > 0.05 * R;
      if (failed > 0) {
        std::cerr << "[agmm] cell n=" << cr.n << " d=" << cr.d
                  << (cr.m > 0 ? " m=" + std::to_string(cr.m) : "") << " method "
                  << method_name(cr.method) << ": " << failed << "/" << R
                  << " replicates failed\n";
      }
      table.cells.push_back(cr);
    }
  }
  return table;
}

namespace {

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string table_to_csv(const ResultTable& table) {
  const bool with_m = std::any_of(table.cells.begin(), table.cells.end(),
                                  [](const CellResult& c) { return c.m > 0; });
  std::string out = with_m ? "n,d,m,method,mise_mean,mise_se\n" : "n,d,method,mise_mean,mise_se\n";
  for (const auto& c : table.cells) {
    out += std::to_string(c.n) + "," + std::to_string(c.d) + ",";
    if (with_m) out += std::to_string(c.m) + ",";
    out += std::string(method_name(c.method)) + "," + fmt17(c.mise_mean) + "," + fmt17(c.mise_se) + "\n";
  }
  return out;
}

std::string table_to_markdown(const ResultTable& table) {
  // one row per (n, d, m) cell, one column per method, Table-1 style
  std::vector<Method> methods;
  std::vector<std::tuple<int, int, int>> keys;
  for (const auto& c : table.cells) {
    if (std::find(methods.begin(), methods.end(), c.method) == methods.end()) {
      methods.push_back(c.method);
    }
    const auto key = std::make_tuple(c.n, c.d, c.m);
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
  }
  const bool with_m = std::any_of(table.cells.begin(), table.cells.end(),
                                  [](const CellResult& c) { return c.m > 0; });
  std::string out = "| n | d |";
  if (with_m) out += " m |";
  for (Method m : methods) out += std::string(" ") + method_name(m) + " |";
  out += "\n|---|---|";
  if (with_m) out += "---|";
  for (size_t i = 0; i < methods.size(); ++i) out += "---|";
  out += "\n";
  char buf[64];
  for (const auto& key : keys) {
    out += "| " + std::to_string(std::get<0>(key)) + " | " + std::to_string(std::get<1>(key)) + " |";
    if (with_m) out += " " + std::to_string(std::get<2>(key)) + " |";
    for (Method m : methods) {
      bool found = false;
      for (const auto& c : table.cells) {
        if (std::make_tuple(c.n, c.d, c.m) == key && c.method == m) {
          std::snprintf(buf, sizeof buf, " %.3f(%.3f) |", c.mise_mean, c.mise_se);
          out += buf;
          found = true;
          break;
        }
      }
      if (!found) out += " - |";
    }
    out += "\n";
  }
  return out;
}

void emit_table(const ResultTable& table, const std::string& path, const std::string& format) {
  std::ofstream os(path);
  if (!os) throw DataError("emit_table: cannot open " + path);
  if (format == "csv") {
    os << table_to_csv(table);
  } else if (format == "markdown") {
    os << table_to_markdown(table);
  } else {
    throw ConfigError("emit_table: unknown format '" + format + "'");
  }
}

ResultTable parse_table_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw DataError("parse_table_csv: empty input");
  const bool with_m = line.find(",m,") != std::string::npos;
  ResultTable table;
  while (std::getline(is, line)) {
    if (trim(line).empty()) continue;
    const auto fields = split_list(line);
    const size_t expect = with_m ? 6 : 5;
    if (fields.size() != expect) throw DataError("parse_table_csv: malformed row '" + line + "'");
    CellResult c;
    size_t i = 0;
    c.n = std::stoi(fields[i++]);
    c.d = std::stoi(fields[i++]);
    if (with_m) c.m = std::stoi(fields[i++]);
    c.method = method_from_name(fields[i++]);
    c.mise_mean = std::stod(fields[i++]);
    c.mise_se = std::stod(fields[i++]);
    table.cells.push_back(c);
  }
  return table;
}

}  // namespace agmm
