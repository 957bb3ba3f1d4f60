// Slope-function estimators: the autocovariance-based GMM estimator in raw
// and basis-smoothed form, its ridge variant, the function-on-function
// version, and the covariance/autocovariance least-squares competitors.

#pragma once

#include "agmm/moments.hpp"
#include "agmm/spectral.hpp"

#include <vector>

namespace agmm {

enum class Method {
  base_cls,
  cls,
  base_cgmm,
  base_als,
  base_agmm,
  agmm,
  ridge_agmm,
  sparse_agmm,
};

const char* method_name(Method m);
Method method_from_name(const std::string& name);

struct SlopeEstimate {
  DiscretizedFunction beta;
  Method method;
  int rank_used = 0;
  Vector theta_used;  // diagnostics
  int J = 0;          // basis dimension when a smoothed eigenanalysis was used
};

struct SurfaceEstimate {
  KernelSurface gamma;
  Method method;
  int rank_used = 0;
};

// Truncated spectral inverse of K applied to R:
// beta(u) = sum_{j<=rank} theta_j^{-1} <psi_j, R> psi_j(u).
// The decomposition's mode decides between the raw and smoothed variants.
SlopeEstimate agmm_scalar(const MomentSet& moments, const SpectralDecomposition& dec, int rank);

// beta(u) = sum_{j<=M_bar} (theta_j + rho)^{-1} <psi_j, R> psi_j(u).
SlopeEstimate ridge_agmm(const MomentSet& moments, const SpectralDecomposition& dec,
                         int M_bar, double rho);

// rank choice for the competitors: a fixed oracle rank when positive,
// otherwise the cumulative-variance rule.
struct RankPolicy {
  int oracle = 0;
  double variance_threshold = 0.90;
};

// Least squares on principal component scores of the lag-0 covariance; the
// smoothed variant passes a basis for the eigenanalysis.
SlopeEstimate cls_scalar(const CurvePanel& panel, const RankPolicy& rank,
                         const BasisSet* basis = nullptr);

// GMM with identity weighting on lag 1..L moment conditions in the score
// space of the lag-0 covariance eigenfunctions.
SlopeEstimate cgmm_scalar(const CurvePanel& panel, int L, const RankPolicy& rank);

// Least squares on scores of the autocovariance operator's eigenfunctions.
SlopeEstimate als_scalar(const CurvePanel& panel, const SpectralDecomposition& dec, int rank);

// gamma(u,v) = sum_{j<=rank} theta_j^{-1} psi_j(u) <psi_j, H(.,v)>.
SurfaceEstimate agmm_functional(const MomentSet& moments, const SpectralDecomposition& dec,
                                int rank);

// int (beta_hat - beta_true)^2 du for one replicate.
double integrated_squared_error(const DiscretizedFunction& beta_hat,
                                const DiscretizedFunction& beta_true);

struct MiseResult {
  double mean = 0.0;
  double se = 0.0;
  int count = 0;
};

// Mean and standard error (sd / sqrt(R)) over per-replicate errors.
MiseResult mise(const std::vector<double>& per_run_errors);
MiseResult mise(const std::vector<DiscretizedFunction>& estimates,
                const DiscretizedFunction& beta_true);

}  // namespace agmm
