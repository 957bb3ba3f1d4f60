// Empirical moment functionals from fully observed panels: lag-k
// autocovariance surfaces, response cross-covariances, and the operator
// kernels K, R, H assembled from them, plus the lag-0 covariance used by
// covariance-based competitors.
//
// All estimators divide by (n - L) for every lag, matching their definitions.

#pragma once

#include "agmm/funcspace.hpp"
#include "agmm/panel.hpp"

#include <optional>
#include <string>
#include <vector>

namespace agmm {

struct MomentSet {
  int L = 5;
  std::vector<KernelSurface> C;        // C[k-1] = lag-k autocovariance
  std::vector<DiscretizedFunction> c;  // c[k-1] = lag-k response cross-covariance
  KernelSurface K;
  DiscretizedFunction R;
  std::optional<KernelSurface> H;      // functional-response analogue of R
  KernelSurface CW;                    // lag-0 covariance of the observed curves

  explicit MomentSet(const Grid& g)
      : K(KernelSurface::zero(g)), R(DiscretizedFunction::zero(g)), CW(KernelSurface::zero(g)) {}

  const Grid& grid() const { return K.grid(); }
};

struct MomentOptions {
  int L = 5;
  bool center = true;
  bool with_H = false;
  bool with_CW = true;
};

// Subtracts the pointwise sample mean curve and the sample mean of the
// responses (scalar and functional).
CurvePanel center_panel(const CurvePanel& panel);

// (1/(n-L)) sum_{t=1}^{n-L} W_t(u) W_{t+k}(v), 1 <= k <= L.
KernelSurface lag_autocov(const CurvePanel& panel, int k, int L);

// (1/(n-L)) sum_{t=1}^{n-L} Y_t W_{t+k}(u).
DiscretizedFunction lag_crosscov(const CurvePanel& panel, int k, int L);

// (1/n) sum_t W_t(u) W_t(v).
KernelSurface lag0_cov(const CurvePanel& panel);

// K(u,v) = sum_k int C_k(u,z) C_k(v,z) dz.
KernelSurface build_K(const std::vector<KernelSurface>& C_hats);

// R(u) = sum_k int C_k(u,z) c_k(z) dz.
DiscretizedFunction build_R(const std::vector<KernelSurface>& C_hats,
                            const std::vector<DiscretizedFunction>& c_hats);

// H(u,v) = sum_k int C_k(u,z) Cov{Y_t(v), W_{t+k}(z)} dz, computed through the
// composed covariances rather than the quadruple sum.
KernelSurface build_H(const CurvePanel& centered_panel, int L);

// One-stop assembly; centers first unless told otherwise.
MomentSet compute_moments(const CurvePanel& panel, const MomentOptions& opts = {});

// Flat binary cache for reuse between harness stages.
void save_moments(const MomentSet& m, const std::string& path);
MomentSet load_moments(const std::string& path);

}  // namespace agmm
