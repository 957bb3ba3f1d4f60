#include "agmm/spectral.hpp"

#include "agmm/moments.hpp"
#include "agmm/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cstdio>
#include <cmath>

namespace agmm {

namespace {

// Flip rows so the largest-magnitude entry is positive; magnitude ties go to
// the earliest grid point, which keeps the convention deterministic.
void fix_signs(Matrix& psi, Matrix* delta) {
  for (int j = 0; j < psi.rows(); ++j) {
    const double mx = psi.row(j).cwiseAbs().maxCoeff();
    int imax = 0;
    for (int i = 0; i < psi.cols(); ++i) {
      if (std::abs(psi(j, i)) >= mx * (1.0 - 1e-9)) {
        imax = i;
        break;
      }
    }
    if (psi(j, imax) < 0.0) {
      psi.row(j) = -psi.row(j);
      if (delta) delta->row(j) = -delta->row(j);
    }
  }
}

void require_symmetric(const KernelSurface& K, const char* where) {
  if (!K.is_symmetric(1e-8)) {
    throw DataError(std::string(where) + ": surface is asymmetric beyond tolerance (" +
                    std::to_string(K.asymmetry()) + ")");
  }
}

}  // namespace

SpectralDecomposition eigen_raw(const KernelSurface& K) {
  require_symmetric(K, "eigen_raw");
  const int G = K.size();
  const Vector& w = K.grid().weights();
  const Vector sqw = w.cwiseSqrt();
  Matrix S = sqw.asDiagonal() * K.symmetrized().values() * sqw.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(S);
  if (solver.info() != Eigen::Success) throw IllPosedError("eigen_raw: eigensolver failed");

  SpectralDecomposition dec(K.grid());
  dec.mode = SpectralMode::raw;
  dec.theta = solver.eigenvalues().reverse();
  dec.psi.resize(G, G);
  for (int j = 0; j < G; ++j) {
    dec.psi.row(j) = solver.eigenvectors().col(G - 1 - j).cwiseQuotient(sqw).transpose();
  }
  fix_signs(dec.psi, nullptr);
  return dec;
}

SpectralDecomposition eigen_basis(const KernelSurface& K, const BasisSet& B) {
  require_symmetric(K, "eigen_basis");
  require_same_grid(K.grid(), B.grid(), "eigen_basis");
  const int J = B.size();
  const Vector& w = K.grid().weights();
  const Matrix P = B.functions() * w.asDiagonal();  // J x G
  Matrix KB = P * K.values() * P.transpose();
  KB = 0.5 * (KB + KB.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(KB);
  if (solver.info() != Eigen::Success) throw IllPosedError("eigen_basis: eigensolver failed");

  SpectralDecomposition dec(K.grid());
  dec.mode = SpectralMode::basis;
  dec.J = J;
  dec.theta = solver.eigenvalues().reverse();
  dec.delta.resize(J, J);
  for (int j = 0; j < J; ++j) dec.delta.row(j) = solver.eigenvectors().col(J - 1 - j).transpose();
  dec.psi = dec.delta * B.functions();
  dec.basis = B.functions();
  fix_signs(dec.psi, &dec.delta);
  return dec;
}

std::string dimension_selection_to_csv(const DimensionSelection& sel) {
  std::string out = "candidate_d,exceed_count,pvalue\n";
  char buf[64];
  for (size_t i = 0; i < sel.exceed_counts.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%d,%.17g\n", i + 1, sel.exceed_counts[i], sel.pvalues[i]);
    out += buf;
  }
  return out;
}

std::string j_cv_trace_to_csv(const std::vector<JCvPoint>& trace) {
  std::string out = "J,cv_error\n";
  char buf[64];
  for (const auto& p : trace) {
    std::snprintf(buf, sizeof buf, "%d,%.17g\n", p.J, p.cv_error);
    out += buf;
  }
  return out;
}

int select_M_ratio(const Vector& theta, double threshold) {
  if (threshold <= 0.0 || threshold > 1.0) throw ConfigError("select_M_ratio: threshold in (0,1]");
  const Vector pos = theta.cwiseMax(0.0);
  const double total = pos.sum();
  if (total <= 0.0) return 1;
  double cum = 0.0;
  for (int j = 0; j < pos.size(); ++j) {
    cum += pos[j];
    if (cum / total >= threshold) return j + 1;
  }
  return static_cast<int>(pos.size());
}

namespace {

// (d+1)-th eigenvalue of the bootstrap operator, in the decomposition's mode.
double bootstrap_eigenvalue(const KernelSurface& Kstar, const SpectralDecomposition& ref, int d1) {
  if (ref.mode == SpectralMode::basis) {
    const Vector& w = Kstar.grid().weights();
    const Matrix P = ref.basis * w.asDiagonal();
    Matrix KB = P * Kstar.values() * P.transpose();
    KB = 0.5 * (KB + KB.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix> solver(KB, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().reverse()[d1 - 1];
  }
  const Vector sqw = Kstar.grid().weights().cwiseSqrt();
  Matrix S = sqw.asDiagonal() * Kstar.symmetrized().values() * sqw.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(S, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().reverse()[d1 - 1];
}

}  // namespace

DimensionSelection select_d_bootstrap(const CurvePanel& panel,
                                      const SpectralDecomposition& decomposition,
                                      int B, double alpha, int d_max, int L,
                                      std::uint64_t seed) {
  if (B < 100) throw ConfigError("select_d_bootstrap: need B >= 100");
  if (alpha <= 0.0 || alpha >= 1.0) throw ConfigError("select_d_bootstrap: alpha in (0,1)");
  if (d_max < 1 || d_max + 1 > decomposition.rank()) {
    throw ConfigError("select_d_bootstrap: d_max out of range for the decomposition");
  }
  const CurvePanel centered = center_panel(panel);
  const int n = centered.n();
  const Vector& w = centered.grid.weights();

  DimensionSelection sel;
  sel.B = B;
  sel.alpha = alpha;
  const int threshold = static_cast<int>((1.0 - alpha) * B);

  MomentOptions opts;
  opts.L = L;
  opts.center = true;
  opts.with_CW = false;

  for (int d = 1; d <= d_max; ++d) {
    const Matrix psi_d = decomposition.psi.topRows(d);            // d x G
    const Matrix eta = centered.curves * w.asDiagonal() * psi_d.transpose();  // n x d
    const Matrix fitted = eta * psi_d;                            // n x G
    const Matrix residuals = centered.curves - fitted;

    Rng rng(Rng::mix(seed, 0xb007u, static_cast<std::uint64_t>(d)));
    // eigenvalues below numerical rank are noise; without the tolerance the
    // exceedance comparison on an exactly rank-d panel is a coin flip
    const double num_zero = 1e-12 * std::max(decomposition.theta[0], 0.0);
    int exceed = 0;
    for (int b = 0; b < B; ++b) {
      Matrix wstar = fitted;
      for (int t = 0; t < n; ++t) wstar.row(t) += residuals.row(rng.index(n));
      const MomentSet mstar = compute_moments(make_panel(centered.grid, std::move(wstar)), opts);
      const double theta_star = bootstrap_eigenvalue(mstar.K, decomposition, d + 1);
      if (decomposition.theta[d] > theta_star + num_zero) ++exceed;
    }
    sel.exceed_counts.push_back(exceed);
    sel.pvalues.push_back(1.0 - static_cast<double>(exceed) / B);
    if (exceed <= threshold) {  // failed to reject H0: theta_{d+1} = 0
      sel.d_hat = d;
      return sel;
    }
  }
  sel.d_hat = d_max;
  sel.hit_max = true;
  return sel;
}

namespace {

struct FoldPanels {
  CurvePanel train;
  CurvePanel validation;
};

FoldPanels split_fold(const CurvePanel& panel, int fold, int folds) {
  const int n = panel.n();
  const int base = n / folds, extra = n % folds;
  // contiguous blocks, the first `extra` blocks one longer
  int start = 0;
  int len = 0;
  for (int g = 0; g <= fold; ++g) {
    len = base + (g < extra ? 1 : 0);
    if (g < fold) start += len;
  }
  Matrix train(n - len, panel.grid.size());
  train.topRows(start) = panel.curves.topRows(start);
  train.bottomRows(n - len - start) = panel.curves.bottomRows(n - len - start);
  return FoldPanels{make_panel(panel.grid, std::move(train)),
                    make_panel(panel.grid, panel.curves.middleRows(start, len))};
}

}  // namespace

int select_J_cv(const CurvePanel& panel, int d, const std::vector<int>& J_grid,
                int G_folds, BasisKind kind, int L, std::vector<JCvPoint>* trace) {
  if (J_grid.empty()) throw ConfigError("select_J_cv: empty J grid");
  if (G_folds < 2) throw ConfigError("select_J_cv: need at least 2 folds");
  const int n = panel.n();
  if (n / G_folds < 2 * L) {
    throw ConfigError("select_J_cv: folds of " + std::to_string(n / G_folds) +
                      " curves are shorter than 2L = " + std::to_string(2 * L));
  }
  const int J_max = *std::max_element(J_grid.begin(), J_grid.end());
  if (d < 1) throw ConfigError("select_J_cv: d must be positive");
  const BasisSet basis = make_basis(kind, J_max, panel.grid);
  const Vector& w = panel.grid.weights();
  const Matrix P = basis.functions() * w.asDiagonal();  // J_max x G

  MomentOptions opts;
  opts.L = L;
  opts.with_CW = false;

  std::vector<double> cv(J_grid.size(), 0.0);
  for (int g = 0; g < G_folds; ++g) {
    const FoldPanels fp = split_fold(panel, g, G_folds);
    const Matrix K_tr = compute_moments(fp.train, opts).K.values();
    const KernelSurface K_val = compute_moments(fp.validation, opts).K;
    const Matrix KB_tr_full = P * K_tr * P.transpose();
    const Matrix KB_val_full = P * K_val.values() * P.transpose();

    for (size_t ji = 0; ji < J_grid.size(); ++ji) {
      const int J = J_grid[ji];
      const int use_d = std::min(d, J);
      Matrix KB = KB_tr_full.topLeftCorner(J, J);
      KB = 0.5 * (KB + KB.transpose()).eval();
      Eigen::SelfAdjointEigenSolver<Matrix> solver(KB);
      Matrix recon = Matrix::Zero(panel.grid.size(), panel.grid.size());
      for (int l = 0; l < use_d; ++l) {
        const Vector delta = solver.eigenvectors().col(J - 1 - l);
        const double theta_val = delta.transpose() * KB_val_full.topLeftCorner(J, J) * delta;
        const Vector psi = basis.functions().topRows(J).transpose() * delta;
        recon += theta_val * psi * psi.transpose();
      }
      const double dist = hs_distance(K_val, KernelSurface(panel.grid, std::move(recon)));
      cv[ji] += dist * dist;
    }
  }

  size_t best = 0;
  for (size_t ji = 0; ji < J_grid.size(); ++ji) {
    cv[ji] /= G_folds;
    if (trace) trace->push_back({J_grid[ji], cv[ji]});
  }
  for (size_t ji = 1; ji < J_grid.size(); ++ji) {
    // near-ties go to the smaller basis dimension
    if (cv[ji] < cv[best] * (1.0 - 1e-9) ||
        (cv[ji] <= cv[best] * (1.0 + 1e-9) && J_grid[ji] < J_grid[best])) {
      best = ji;
    }
  }
  return J_grid[best];
}

}  // namespace agmm
