// Eigenanalysis of operator estimates on the raw grid and through basis
// expansion, plus the tuning-parameter selectors: residual-resampling
// bootstrap for the signal dimension d, cumulative-variance ratio for the
// truncation M, and blockwise cross-validation for the basis dimension J.

#pragma once

#include "agmm/funcspace.hpp"
#include "agmm/panel.hpp"

#include <cstdint>
#include <vector>

namespace agmm {

enum class SpectralMode { raw, basis };

struct SpectralDecomposition {
  Grid grid;
  Vector theta;   // descending
  Matrix psi;     // rows are eigenfunctions, orthonormal under quadrature
  SpectralMode mode = SpectralMode::raw;
  int J = 0;      // basis dimension when mode == basis
  Matrix delta;   // rows are basis coefficient vectors (basis mode)
  Matrix basis;   // J x G basis function values (basis mode)

  explicit SpectralDecomposition(Grid g) : grid(std::move(g)) {}

  int rank() const { return static_cast<int>(theta.size()); }
  DiscretizedFunction eigenfunction(int j) const {
    return DiscretizedFunction(grid, psi.row(j).transpose());
  }
};

// Solves the weighted eigenproblem int K(u,v) psi(v) dv = theta psi(u) by
// symmetrizing with square-root quadrature weights.  Eigenfunctions come back
// orthonormal under the quadrature inner product, signs fixed so the
// largest-magnitude value of each eigenfunction is positive.
SpectralDecomposition eigen_raw(const KernelSurface& K);

// Projects K onto span(B) and eigen-decomposes the J x J coefficient matrix;
// psi_j = delta_j' B.
SpectralDecomposition eigen_basis(const KernelSurface& K, const BasisSet& B);

struct DimensionSelection {
  int d_hat = 1;
  bool hit_max = false;
  int B = 0;
  double alpha = 0.05;
  std::vector<int> exceed_counts;  // per tested candidate d = 1, 2, ...
  std::vector<double> pvalues;     // share of bootstrap draws with theta* >= theta_hat
};

// Residual-resampling bootstrap test of H0: theta_{d+1} = 0, run sequentially
// from d = 1 until the first non-rejection.  `decomposition` must come from
// the same panel (it supplies eigenfunctions for the projection and the
// reference eigenvalues); its mode decides how the bootstrap operator is
// eigen-decomposed.
DimensionSelection select_d_bootstrap(const CurvePanel& panel,
                                      const SpectralDecomposition& decomposition,
                                      int B, double alpha, int d_max, int L,
                                      std::uint64_t seed);

// Smallest M whose leading eigenvalues explain at least `threshold` of the
// total variation.  Negative eigenvalues are treated as zero.
int select_M_ratio(const Vector& theta, double threshold);

struct JCvPoint {
  int J;
  double cv_error;
};

// diagnostic CSV exports
std::string dimension_selection_to_csv(const DimensionSelection& sel);
std::string j_cv_trace_to_csv(const std::vector<JCvPoint>& trace);

// Blockwise G-fold cross-validation for the basis dimension J: the validation
// operator is compared against its rank-d reconstruction built from training
// eigenvectors.  Returns the J with the smallest mean error.
int select_J_cv(const CurvePanel& panel, int d, const std::vector<int>& J_grid,
                int G_folds, BasisKind kind, int L,
                std::vector<JCvPoint>* trace = nullptr);

}  // namespace agmm
