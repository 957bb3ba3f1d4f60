#include "agmm/panel.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace agmm {

CurvePanel make_panel(Grid grid, Matrix curves) {
  if (curves.cols() != grid.size()) throw DimensionError("make_panel: curves must have G columns");
  if (!curves.allFinite()) throw DataError("make_panel: non-finite curve values");
  return CurvePanel{std::move(grid), std::move(curves), Vector(), Matrix()};
}

CurvePanel make_panel(Grid grid, Matrix curves, Vector y) {
  CurvePanel p = make_panel(std::move(grid), std::move(curves));
  if (y.size() != p.n()) throw DimensionError("make_panel: response length must equal panel size");
  p.y = std::move(y);
  return p;
}

long SparsePanel::total_observations() const {
  long total = 0;
  for (const auto& c : curves) total += c.m();
  return total;
}

namespace {

// %.17g round-trips IEEE doubles exactly through strtod.
std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

}  // namespace

void write_panel_csv(const CurvePanel& panel, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw DataError("write_panel_csv: cannot open " + path);
  os << "t,grid_index,value\n";
  for (int t = 0; t < panel.n(); ++t) {
    for (int i = 0; i < panel.grid.size(); ++i) {
      os << t << ',' << i << ',' << fmt_double(panel.curves(t, i)) << '\n';
    }
  }
  if (panel.has_scalar_response()) {
    std::ofstream ry(path + ".y");
    ry << "t,y\n";
    for (int t = 0; t < panel.n(); ++t) ry << t << ',' << fmt_double(panel.y[t]) << '\n';
  }
}

std::string function_to_csv(const DiscretizedFunction& f) {
  std::string out = "u,value\n";
  for (int i = 0; i < f.size(); ++i) {
    out += fmt_double(f.grid().point(i)) + "," + fmt_double(f.values()[i]) + "\n";
  }
  return out;
}

void write_function_csv(const DiscretizedFunction& f, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw DataError("write_function_csv: cannot open " + path);
  os << function_to_csv(f);
}

void write_sparse_csv(const SparsePanel& panel, const std::string& obs_path,
                      const std::string& response_path) {
  std::ofstream os(obs_path);
  if (!os) throw DataError("write_sparse_csv: cannot open " + obs_path);
  os << "t,u,z\n";
  for (int t = 0; t < panel.n(); ++t) {
    const auto& c = panel.curves[t];
    for (int i = 0; i < c.m(); ++i) {
      os << t << ',' << fmt_double(c.locations[i]) << ',' << fmt_double(c.values[i]) << '\n';
    }
  }
  std::ofstream ry(response_path);
  if (!ry) throw DataError("write_sparse_csv: cannot open " + response_path);
  ry << "t,y\n";
  for (int t = 0; t < panel.y.size(); ++t) ry << t << ',' << fmt_double(panel.y[t]) << '\n';
}

SparsePanel read_sparse_csv(const std::string& obs_path, const std::string& response_path) {
  std::ifstream is(obs_path);
  if (!is) throw DataError("read_sparse_csv: cannot open " + obs_path);
  std::string line;
  std::getline(is, line);  // header
  std::map<int, std::vector<std::pair<double, double>>> by_curve;
  int max_t = -1;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 3) throw DataError("read_sparse_csv: malformed row '" + line + "'");
    const int t = std::stoi(fields[0]);
    by_curve[t].emplace_back(std::stod(fields[1]), std::stod(fields[2]));
    max_t = std::max(max_t, t);
  }
  SparsePanel panel;
  panel.curves.resize(max_t + 1);
  for (auto& [t, obs] : by_curve) {
    Vector u(obs.size()), z(obs.size());
    for (size_t i = 0; i < obs.size(); ++i) {
      u[i] = obs[i].first;
      z[i] = obs[i].second;
    }
    panel.curves[t] = SparseCurve{std::move(u), std::move(z)};
  }
  std::ifstream ry(response_path);
  if (!ry) throw DataError("read_sparse_csv: cannot open " + response_path);
  std::getline(ry, line);  // header
  std::vector<double> ys;
  while (std::getline(ry, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != 2) throw DataError("read_sparse_csv: malformed response row");
    ys.push_back(std::stod(fields[1]));
  }
  panel.y = Eigen::Map<Vector>(ys.data(), ys.size());
  return panel;
}

}  // namespace agmm
