// Estimation from partially observed predictors: local-linear surface and
// curve smoothers for the lagged moment functions, the basis-expansion
// alternative, bandwidth cross-validation, and the assembled sparse
// slope-function estimator.

#pragma once

#include "agmm/estimators.hpp"
#include "agmm/panel.hpp"

#include <vector>

namespace agmm {

enum class KernelType { epanechnikov, triangular };

struct SmootherSpec {
  KernelType kernel = KernelType::epanechnikov;
  double h_C = 0.1;  // surface bandwidth
  double h_S = 0.1;  // curve bandwidth
};

struct SmootherDiagnostics {
  int fallback_nodes = 0;  // nodes where the local design was singular
};

// Local-linear surface estimate of the lag-k autocovariance on the grid.
// Pairs one observation from curve t with one from curve t+k, so no diagonal
// removal is needed.  Singular local designs fall back to a locally constant
// fit.
KernelSurface smooth_autocov(const SparsePanel& panel, int k, const SmootherSpec& spec,
                             const Grid& grid, int L, SmootherDiagnostics* diag = nullptr);

// Local-linear estimate of S_k(u) = Cov(Y_t, W_{t+k}(u)).
DiscretizedFunction smooth_crosscov(const SparsePanel& panel, int k, const SmootherSpec& spec,
                                    const Grid& grid, int L, SmootherDiagnostics* diag = nullptr);

// Tensor-basis least-squares estimates of the same quantities.
KernelSurface basis_autocov(const SparsePanel& panel, int k, const BasisSet& B, int L);
DiscretizedFunction basis_crosscov(const SparsePanel& panel, int k, const BasisSet& B, int L);

// Blockwise cross-validation over curves: bandwidths minimize the held-out
// squared reconstruction error of raw lag-1 products.
SmootherSpec select_bandwidths_cv(const SparsePanel& panel, const std::vector<double>& h_grid_C,
                                  const std::vector<double>& h_grid_S, int folds,
                                  const Grid& grid, int L,
                                  KernelType kernel = KernelType::epanechnikov);

struct SparseRankRule {
  int oracle = 0;               // use this rank when positive
  double ratio_threshold = 0.95;
  // smoothed spectra carry noise eigenvalues the cumulative-variance rule
  // would otherwise invert; components below this fraction of theta_1 are
  // not counted
  double eigenvalue_floor = 0.025;
};

// Assembles K and R from the smoothed moment functions, symmetrizes, clips
// negative eigenvalues, and applies the truncated spectral inverse.  With a
// basis the eigenanalysis runs in basis coordinates, which also keeps the
// cumulative-variance rank rule away from the raw grid's noise directions.
SlopeEstimate sparse_agmm(const SparsePanel& panel, const SmootherSpec& spec, int L,
                          const SparseRankRule& rank_rule, const Grid& grid,
                          const BasisSet* basis = nullptr);

}  // namespace agmm
