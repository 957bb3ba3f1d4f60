// Cumulative intraday return utilities: minute-bar CSV input, the CIDR
// transform, and the rolling out-of-sample prediction protocol.

#pragma once

#include "agmm/panel.hpp"

#include <string>
#include <vector>

namespace agmm {

struct CidrPanel {
  std::vector<std::string> dates;  // trading days, in order
  Matrix prices;                   // n x minutes

  int n() const { return static_cast<int>(prices.rows()); }
  int minutes() const { return static_cast<int>(prices.cols()); }
};

// Expects columns (date, minute_index, price) with a header; days are taken
// in file order, minutes sorted by index.
CidrPanel read_minute_bars_csv(const std::string& path);

// r_t(u_j) = 100 [ log P_t(u_j) - log P_t(u_1) ]; the minute axis is mapped
// onto the unit interval.  The scalar response attached to the panel is the
// full-day return r_t(end).
CurvePanel cidr_transform(const CidrPanel& prices);

struct MspeEntry {
  std::string model;  // "agmm", "cls" or "mean"
  double mspe = 0.0;
  int d = 0;  // grid choice achieving the reported error
  int J = 0;
};

// Rolling prediction over the last H days: for each h = H..1 fit on days
// t <= n-h using predictor curves restricted to the first `cut_minutes`
// points, predict y_{n-h+1}, and average the squared errors.  For agmm and
// cls the (d, J) pair with the lowest error over the supplied grids is
// reported; the mean model predicts with the training-response mean.
std::vector<MspeEntry> rolling_mspe(const CurvePanel& panel, const std::vector<std::string>& models,
                                    int H, int cut_minutes, const std::vector<int>& d_grid,
                                    const std::vector<int>& J_grid, int L = 5);

}  // namespace agmm
