#include "agmm/estimators.hpp"

#include <cmath>

namespace agmm {

const char* method_name(Method m) {
  switch (m) {
    case Method::base_cls: return "base_cls";
    case Method::cls: return "cls";
    case Method::base_cgmm: return "base_cgmm";
    case Method::base_als: return "base_als";
    case Method::base_agmm: return "base_agmm";
    case Method::agmm: return "agmm";
    case Method::ridge_agmm: return "ridge_agmm";
    case Method::sparse_agmm: return "sparse_agmm";
  }
  return "unknown";
}

Method method_from_name(const std::string& name) {
  for (Method m : {Method::base_cls, Method::cls, Method::base_cgmm, Method::base_als,
                   Method::base_agmm, Method::agmm, Method::ridge_agmm, Method::sparse_agmm}) {
    if (name == method_name(m)) return m;
  }
  throw ConfigError("unknown method '" + name + "'");
}

namespace {

void check_rank(const SpectralDecomposition& dec, int rank) {
  if (rank < 1 || rank > dec.rank()) {
    throw ConfigError("rank " + std::to_string(rank) + " out of range, decomposition has " +
                      std::to_string(dec.rank()) + " eigenpairs");
  }
  if (dec.theta[rank - 1] <= 1e-12 * std::max(dec.theta[0], 0.0)) {
    throw IllPosedError("eigenvalue " + std::to_string(rank) +
                        " is numerically zero; reduce the rank or use the ridge estimator");
  }
}

Vector quadrature_inner(const Matrix& psi_rows, const Vector& w, const Vector& f) {
  return psi_rows * w.cwiseProduct(f);
}

}  // namespace

SlopeEstimate agmm_scalar(const MomentSet& moments, const SpectralDecomposition& dec, int rank) {
  require_same_grid(moments.grid(), dec.grid, "agmm_scalar");
  check_rank(dec, rank);
  const Vector& w = dec.grid.weights();
  const Matrix psi = dec.psi.topRows(rank);
  const Vector proj = quadrature_inner(psi, w, moments.R.values());
  const Vector coef = proj.cwiseQuotient(dec.theta.head(rank));
  SlopeEstimate est{DiscretizedFunction(dec.grid, psi.transpose() * coef),
                    dec.mode == SpectralMode::basis ? Method::agmm : Method::base_agmm};
  est.rank_used = rank;
  est.theta_used = dec.theta.head(rank);
  est.J = dec.J;
  return est;
}

SlopeEstimate ridge_agmm(const MomentSet& moments, const SpectralDecomposition& dec,
                         int M_bar, double rho) {
  require_same_grid(moments.grid(), dec.grid, "ridge_agmm");
  if (rho < 0.0) throw ConfigError("ridge_agmm: rho must be nonnegative");
  if (M_bar < 1 || M_bar > dec.rank()) throw ConfigError("ridge_agmm: M_bar out of range");
  if (rho == 0.0) check_rank(dec, M_bar);
  const Vector& w = dec.grid.weights();
  const Matrix psi = dec.psi.topRows(M_bar);
  const Vector proj = quadrature_inner(psi, w, moments.R.values());
  const Vector coef = proj.cwiseQuotient(dec.theta.head(M_bar).array().max(0.0).matrix() +
                                         Vector::Constant(M_bar, rho));
  SlopeEstimate est{DiscretizedFunction(dec.grid, psi.transpose() * coef), Method::ridge_agmm};
  est.rank_used = M_bar;
  est.theta_used = dec.theta.head(M_bar);
  est.J = dec.J;
  return est;
}

namespace {

// Shared score-regression step: OLS of y on eta.
Vector ols(const Matrix& eta, const Vector& y) {
  return (eta.transpose() * eta).ldlt().solve(eta.transpose() * y);
}

}  // namespace

SlopeEstimate cls_scalar(const CurvePanel& panel, const RankPolicy& rank, const BasisSet* basis) {
  if (!panel.has_scalar_response()) throw DataError("cls_scalar: panel has no scalar response");
  const CurvePanel p = center_panel(panel);
  const KernelSurface CW = lag0_cov(p);
  const SpectralDecomposition dec = basis ? eigen_basis(CW, *basis) : eigen_raw(CW);
  const int r = rank.oracle > 0 ? rank.oracle : select_M_ratio(dec.theta, rank.variance_threshold);
  check_rank(dec, r);
  const Matrix psi = dec.psi.topRows(r);
  const Matrix eta = p.curves * p.grid.weights().asDiagonal() * psi.transpose();
  const Vector b = ols(eta, p.y);
  SlopeEstimate est{DiscretizedFunction(p.grid, psi.transpose() * b),
                    basis ? Method::cls : Method::base_cls};
  est.rank_used = r;
  est.theta_used = dec.theta.head(r);
  est.J = basis ? basis->size() : 0;
  return est;
}

SlopeEstimate cgmm_scalar(const CurvePanel& panel, int L, const RankPolicy& rank) {
  if (!panel.has_scalar_response()) throw DataError("cgmm_scalar: panel has no scalar response");
  const CurvePanel p = center_panel(panel);
  if (p.n() <= L) throw DataError("cgmm_scalar: n must exceed L");
  const KernelSurface CW = lag0_cov(p);
  const SpectralDecomposition dec = eigen_raw(CW);
  const int r = rank.oracle > 0 ? rank.oracle : select_M_ratio(dec.theta, rank.variance_threshold);
  check_rank(dec, r);
  const Matrix psi = dec.psi.topRows(r);
  const Matrix eta = p.curves * p.grid.weights().asDiagonal() * psi.transpose();  // n x r

  // score-space normal equations: (sum_k A_k' A_k) b = sum_k A_k' c_k
  const int m = p.n() - L;
  Matrix lhs = Matrix::Zero(r, r);
  Vector rhs = Vector::Zero(r);
  for (int k = 1; k <= L; ++k) {
    const Matrix A = eta.middleRows(k, m).transpose() * eta.topRows(m) / m;
    const Vector c = eta.middleRows(k, m).transpose() * p.y.head(m) / m;
    lhs += A.transpose() * A;
    rhs += A.transpose() * c;
  }
  const Vector b = lhs.ldlt().solve(rhs);
  SlopeEstimate est{DiscretizedFunction(p.grid, psi.transpose() * b), Method::base_cgmm};
  est.rank_used = r;
  est.theta_used = dec.theta.head(r);
  return est;
}

SlopeEstimate als_scalar(const CurvePanel& panel, const SpectralDecomposition& dec, int rank) {
  if (!panel.has_scalar_response()) throw DataError("als_scalar: panel has no scalar response");
  require_same_grid(panel.grid, dec.grid, "als_scalar");
  check_rank(dec, rank);
  const CurvePanel p = center_panel(panel);
  const Matrix psi = dec.psi.topRows(rank);
  const Matrix eta = p.curves * p.grid.weights().asDiagonal() * psi.transpose();
  const Vector b = ols(eta, p.y);
  SlopeEstimate est{DiscretizedFunction(p.grid, psi.transpose() * b), Method::base_als};
  est.rank_used = rank;
  est.theta_used = dec.theta.head(rank);
  est.J = dec.J;
  return est;
}

SurfaceEstimate agmm_functional(const MomentSet& moments, const SpectralDecomposition& dec,
                                int rank) {
  if (!moments.H) throw DataError("agmm_functional: moment set has no H surface");
  require_same_grid(moments.grid(), dec.grid, "agmm_functional");
  check_rank(dec, rank);
  const Vector& w = dec.grid.weights();
  const Matrix psi = dec.psi.topRows(rank);
  // gamma = Psi' diag(1/theta) Psi diag(w) H
  const Matrix proj = psi * w.asDiagonal() * moments.H->values();  // rank x G, rows <psi_j, H(.,v)>
  Matrix gamma = psi.transpose() *
                 dec.theta.head(rank).cwiseInverse().asDiagonal() * proj;
  SurfaceEstimate est{KernelSurface(dec.grid, std::move(gamma)),
                      dec.mode == SpectralMode::basis ? Method::agmm : Method::base_agmm};
  est.rank_used = rank;
  return est;
}

double integrated_squared_error(const DiscretizedFunction& beta_hat,
                                const DiscretizedFunction& beta_true) {
  require_same_grid(beta_hat.grid(), beta_true.grid(), "integrated_squared_error");
  const Vector diff = beta_hat.values() - beta_true.values();
  return beta_hat.grid().weights().dot(diff.cwiseAbs2());
}

MiseResult mise(const std::vector<double>& per_run_errors) {
  MiseResult out;
  out.count = static_cast<int>(per_run_errors.size());
  if (out.count == 0) return out;
  double sum = 0.0;
  for (double e : per_run_errors) sum += e;
  out.mean = sum / out.count;
  if (out.count > 1) {
    double ss = 0.0;
    for (double e : per_run_errors) ss += (e - out.mean) * (e - out.mean);
    out.se = std::sqrt(ss / (out.count - 1)) / std::sqrt(static_cast<double>(out.count));
  }
  return out;
}

MiseResult mise(const std::vector<DiscretizedFunction>& estimates,
                const DiscretizedFunction& beta_true) {
  std::vector<double> errors;
  errors.reserve(estimates.size());
  for (const auto& est : estimates) errors.push_back(integrated_squared_error(est, beta_true));
  return mise(errors);
}

}  // namespace agmm
