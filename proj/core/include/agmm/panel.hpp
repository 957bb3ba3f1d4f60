// Panels of curves: fully observed curve time series with optional scalar or
// functional responses, and irregular per-curve observations for the
// partially observed setting.  CSV import/export for both.

#pragma once

#include "agmm/types.hpp"

#include <string>
#include <vector>

namespace agmm {

// Ordered collection of n curves on a shared grid (rows of `curves`), with an
// optional scalar response y (size n or 0) and optional functional response
// yfun (n x G or empty).
struct CurvePanel {
  Grid grid;
  Matrix curves;  // n x G
  Vector y;
  Matrix yfun;

  int n() const { return static_cast<int>(curves.rows()); }
  bool has_scalar_response() const { return y.size() == n() && n() > 0; }
  bool has_functional_response() const { return yfun.rows() == n() && n() > 0; }

  DiscretizedFunction curve(int t) const {
    return DiscretizedFunction(grid, curves.row(t).transpose());
  }
};

CurvePanel make_panel(Grid grid, Matrix curves);
CurvePanel make_panel(Grid grid, Matrix curves, Vector y);

// Irregular observations (U_ti, Z_ti), i = 1..m_t, per curve t, plus the
// scalar responses.
struct SparseCurve {
  Vector locations;  // in [0,1]
  Vector values;
  int m() const { return static_cast<int>(locations.size()); }
};

struct SparsePanel {
  std::vector<SparseCurve> curves;
  Vector y;

  int n() const { return static_cast<int>(curves.size()); }
  long total_observations() const;
};

// Long-format CSV (t, grid_index, value) with a header row; responses in a
// separate (t, y) file when present.
void write_panel_csv(const CurvePanel& panel, const std::string& path);

// (u, value) rows for plotting estimated curves.
std::string function_to_csv(const DiscretizedFunction& f);
void write_function_csv(const DiscretizedFunction& f, const std::string& path);

// Sparse format: columns (t, u, z).  Round-trips bit-exactly.
void write_sparse_csv(const SparsePanel& panel, const std::string& obs_path,
                      const std::string& response_path);
SparsePanel read_sparse_csv(const std::string& obs_path, const std::string& response_path);

}  // namespace agmm
