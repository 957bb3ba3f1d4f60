#include "agmm/sparseobs.hpp"

#include "agmm/funcspace.hpp"
#include "agmm/moments.hpp"

#include <Eigen/Dense>

#include <cmath>

namespace agmm {

namespace {

inline double kernel_value(KernelType k, double x) {
  const double a = std::abs(x);
  if (a >= 1.0) return 0.0;
  return k == KernelType::epanechnikov ? 0.75 * (1.0 - x * x) : 1.0 - a;
}

// Per-curve kernel sums on the grid nodes.  Row t holds, for each node u_g,
//   A0 = sum_i K((U_ti-u_g)/h)
//   A1 = sum_i K(.) (U_ti-u_g)/h          (offsets scaled by h for conditioning)
//   A2 = sum_i K(.) ((U_ti-u_g)/h)^2
//   B0 = sum_i K(.) Z_ti
//   B1 = sum_i K(.) (U_ti-u_g)/h Z_ti
struct CurveSums {
  Matrix A0, A1, A2, B0, B1;
};

CurveSums curve_kernel_sums(const SparsePanel& panel, const Grid& grid, double h, KernelType kt) {
  const int n = panel.n();
  const int G = grid.size();
  CurveSums s;
  s.A0 = Matrix::Zero(n, G);
  s.A1 = Matrix::Zero(n, G);
  s.A2 = Matrix::Zero(n, G);
  s.B0 = Matrix::Zero(n, G);
  s.B1 = Matrix::Zero(n, G);
  const double step = grid.spacing();
  for (int t = 0; t < n; ++t) {
    const auto& c = panel.curves[t];
    for (int i = 0; i < c.m(); ++i) {
      const double u = c.locations[i];
      const double z = c.values[i];
      const int lo = std::max(0, static_cast<int>(std::ceil((u - h) / step)));
      const int hi = std::min(G - 1, static_cast<int>(std::floor((u + h) / step)));
      for (int g = lo; g <= hi; ++g) {
        const double x = (u - grid.point(g)) / h;
        const double kv = kernel_value(kt, x);
        if (kv == 0.0) continue;
        s.A0(t, g) += kv;
        s.A1(t, g) += kv * x;
        s.A2(t, g) += kv * x * x;
        s.B0(t, g) += kv * z;
        s.B1(t, g) += kv * x * z;
      }
    }
  }
  return s;
}

void check_lag(const SparsePanel& panel, int k, int L) {
  if (k < 1 || k > L) throw ConfigError("sparse smoother: lag must satisfy 1 <= k <= L");
  if (panel.n() <= L) throw DataError("sparse smoother: need n > L curves");
}

}  // namespace

KernelSurface smooth_autocov(const SparsePanel& panel, int k, const SmootherSpec& spec,
                             const Grid& grid, int L, SmootherDiagnostics* diag) {
  check_lag(panel, k, L);
  if (spec.h_C <= 0.0) throw ConfigError("smooth_autocov: bandwidth must be positive");
  const int G = grid.size();
  const int m = panel.n() - L;
  const CurveSums s = curve_kernel_sums(panel, grid, spec.h_C, spec.kernel);

  // cross-moment matrices over pairs (t, t+k); entry (g, g') pairs node u_g
  // on curve t with node u_g' on curve t+k
  const auto rows0 = [&](const Matrix& M) { return M.topRows(m); };
  const auto rowsk = [&](const Matrix& M) { return M.middleRows(k, m); };
  const Matrix M00 = rows0(s.A0).transpose() * rowsk(s.A0);
  const Matrix M10 = rows0(s.A1).transpose() * rowsk(s.A0);
  const Matrix M01 = rows0(s.A0).transpose() * rowsk(s.A1);
  const Matrix M20 = rows0(s.A2).transpose() * rowsk(s.A0);
  const Matrix M11 = rows0(s.A1).transpose() * rowsk(s.A1);
  const Matrix M02 = rows0(s.A0).transpose() * rowsk(s.A2);
  const Matrix R00 = rows0(s.B0).transpose() * rowsk(s.B0);
  const Matrix R10 = rows0(s.B1).transpose() * rowsk(s.B0);
  const Matrix R01 = rows0(s.B0).transpose() * rowsk(s.B1);

  Matrix out(G, G);
  int fallbacks = 0;
  Eigen::Matrix3d M;
  Eigen::Vector3d rhs;
  for (int g = 0; g < G; ++g) {
    for (int gp = 0; gp < G; ++gp) {
      const double m00 = M00(g, gp);
      if (m00 <= 0.0) {
        throw DataError("smooth_autocov: no observation pairs near grid node (" +
                        std::to_string(g) + "," + std::to_string(gp) +
                        "); increase the bandwidth");
      }
      M << m00, M10(g, gp), M01(g, gp),
           M10(g, gp), M20(g, gp), M11(g, gp),
           M01(g, gp), M11(g, gp), M02(g, gp);
      rhs << R00(g, gp), R10(g, gp), R01(g, gp);
      Eigen::FullPivLU<Eigen::Matrix3d> lu(M);
      lu.setThreshold(1e-8);
      if (lu.isInvertible()) {
        out(g, gp) = lu.solve(rhs)[0];
      } else {
        out(g, gp) = rhs[0] / m00;  // locally constant fallback
        ++fallbacks;
      }
    }
  }
  if (diag) diag->fallback_nodes += fallbacks;
  return KernelSurface(grid, std::move(out));
}

DiscretizedFunction smooth_crosscov(const SparsePanel& panel, int k, const SmootherSpec& spec,
                                    const Grid& grid, int L, SmootherDiagnostics* diag) {
  check_lag(panel, k, L);
  if (spec.h_S <= 0.0) throw ConfigError("smooth_crosscov: bandwidth must be positive");
  if (panel.y.size() != panel.n()) throw DataError("smooth_crosscov: panel has no responses");
  const int G = grid.size();
  const int m = panel.n() - L;
  const CurveSums s = curve_kernel_sums(panel, grid, spec.h_S, spec.kernel);

  const Vector y = panel.y.head(m);
  const Vector S0 = s.A0.middleRows(k, m).colwise().sum();
  const Vector S1 = s.A1.middleRows(k, m).colwise().sum();
  const Vector S2 = s.A2.middleRows(k, m).colwise().sum();
  const Vector T0 = s.B0.middleRows(k, m).transpose() * y;
  const Vector T1 = s.B1.middleRows(k, m).transpose() * y;

  Vector out(G);
  int fallbacks = 0;
  for (int g = 0; g < G; ++g) {
    if (S0[g] <= 0.0) {
      throw DataError("smooth_crosscov: no observations near grid node " + std::to_string(g) +
                      "; increase the bandwidth");
    }
    const double det = S0[g] * S2[g] - S1[g] * S1[g];
    if (std::abs(det) > 1e-8 * std::max(1.0, S0[g] * S2[g])) {
      out[g] = (T0[g] * S2[g] - T1[g] * S1[g]) / det;
    } else {
      out[g] = T0[g] / S0[g];
      ++fallbacks;
    }
  }
  if (diag) diag->fallback_nodes += fallbacks;
  return DiscretizedFunction(grid, std::move(out));
}

KernelSurface basis_autocov(const SparsePanel& panel, int k, const BasisSet& B, int L) {
  check_lag(panel, k, L);
  const int J = B.size();
  const int n = panel.n();
  const int m = n - L;

  // per-curve basis Grams and weighted sums at the observation points
  std::vector<Matrix> G_t(n, Matrix::Zero(J, J));
  std::vector<Vector> H_t(n, Vector::Zero(J));
  for (int t = 0; t < n; ++t) {
    const auto& c = panel.curves[t];
    for (int i = 0; i < c.m(); ++i) {
      Vector b(J);
      for (int j = 0; j < J; ++j) b[j] = B.function(j).interpolate(c.locations[i]);
      G_t[t] += b * b.transpose();
      H_t[t] += b * c.values[i];
    }
  }

  Matrix gram = Matrix::Zero(J * J, J * J);
  Vector rhs = Vector::Zero(J * J);
  for (int t = 0; t < m; ++t) {
    // kron(G_{t+k}, G_t) accumulated blockwise
    for (int p = 0; p < J; ++p) {
      for (int q = 0; q < J; ++q) {
        gram.block(p * J, q * J, J, J) += G_t[t + k](p, q) * G_t[t];
      }
    }
    Matrix outer = H_t[t] * H_t[t + k].transpose();  // vec over columns => kron(H_{t+k}, H_t)
    rhs += Eigen::Map<Vector>(outer.data(), J * J);
  }

  Eigen::JacobiSVD<Matrix> svd(gram, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double cond = svd.singularValues()[0] / svd.singularValues().tail(1)[0];
  if (!(cond < 1e10)) {
    throw IllPosedError("basis_autocov: tensor design condition number " + std::to_string(cond) +
                        "; reduce J");
  }
  const Vector sigma_vec = svd.solve(rhs);
  const Matrix Sigma = Eigen::Map<const Matrix>(sigma_vec.data(), J, J);
  Matrix surface = B.functions().transpose() * Sigma * B.functions();
  return KernelSurface(B.grid(), std::move(surface));
}

DiscretizedFunction basis_crosscov(const SparsePanel& panel, int k, const BasisSet& B, int L) {
  check_lag(panel, k, L);
  if (panel.y.size() != panel.n()) throw DataError("basis_crosscov: panel has no responses");
  const int J = B.size();
  const int m = panel.n() - L;

  Matrix gram = Matrix::Zero(J, J);
  Vector rhs = Vector::Zero(J);
  for (int t = 0; t < m; ++t) {
    const auto& c = panel.curves[t + k];
    for (int i = 0; i < c.m(); ++i) {
      Vector b(J);
      for (int j = 0; j < J; ++j) b[j] = B.function(j).interpolate(c.locations[i]);
      gram += b * b.transpose();
      rhs += b * (panel.y[t] * c.values[i]);
    }
  }
  Eigen::JacobiSVD<Matrix> svd(gram, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double cond = svd.singularValues()[0] / svd.singularValues().tail(1)[0];
  if (!(cond < 1e10)) {
    throw IllPosedError("basis_crosscov: design condition number " + std::to_string(cond) +
                        "; reduce J");
  }
  const Vector delta = svd.solve(rhs);
  Vector values = B.functions().transpose() * delta;
  return DiscretizedFunction(B.grid(), std::move(values));
}

namespace {

double bilinear(const Matrix& surface, const Grid& grid, double u, double v) {
  const int G = grid.size();
  const auto locate = [&](double x, int& i, double& frac) {
    const double t = std::clamp(x, 0.0, 1.0) * (G - 1);
    i = std::min(static_cast<int>(t), G - 2);
    frac = t - i;
  };
  int i, j;
  double a, b;
  locate(u, i, a);
  locate(v, j, b);
  return (1 - a) * (1 - b) * surface(i, j) + a * (1 - b) * surface(i + 1, j) +
         (1 - a) * b * surface(i, j + 1) + a * b * surface(i + 1, j + 1);
}

SparsePanel subset_panel(const SparsePanel& panel, int start, int len) {
  SparsePanel out;
  out.curves.assign(panel.curves.begin() + start, panel.curves.begin() + start + len);
  if (panel.y.size() == panel.n()) out.y = panel.y.segment(start, len);
  return out;
}

SparsePanel drop_block(const SparsePanel& panel, int start, int len) {
  SparsePanel out;
  out.curves.reserve(panel.n() - len);
  for (int t = 0; t < panel.n(); ++t) {
    if (t >= start && t < start + len) continue;
    out.curves.push_back(panel.curves[t]);
  }
  if (panel.y.size() == panel.n()) {
    out.y.resize(panel.n() - len);
    int idx = 0;
    for (int t = 0; t < panel.n(); ++t) {
      if (t >= start && t < start + len) continue;
      out.y[idx++] = panel.y[t];
    }
  }
  return out;
}

}  // namespace

SmootherSpec select_bandwidths_cv(const SparsePanel& panel, const std::vector<double>& h_grid_C,
                                  const std::vector<double>& h_grid_S, int folds,
                                  const Grid& grid, int L, KernelType kernel) {
  if (h_grid_C.empty() || h_grid_S.empty()) throw ConfigError("select_bandwidths_cv: empty grid");
  if (folds < 2) throw ConfigError("select_bandwidths_cv: need at least 2 folds");
  const int n = panel.n();

  SmootherSpec best;
  best.kernel = kernel;
  if (h_grid_C.size() == 1 && h_grid_S.size() == 1) {
    best.h_C = h_grid_C[0];
    best.h_S = h_grid_S[0];
    return best;
  }

  std::vector<double> loss_C(h_grid_C.size(), 0.0), loss_S(h_grid_S.size(), 0.0);
  const int base = n / folds, extra = n % folds;
  int start = 0;
  for (int g = 0; g < folds; ++g) {
    const int len = base + (g < extra ? 1 : 0);
    const SparsePanel train = drop_block(panel, start, len);
    const SparsePanel val = subset_panel(panel, start, len);
    if (train.n() <= L || val.n() <= 1) {
      start += len;
      continue;
    }
    for (size_t hi = 0; h_grid_C.size() > 1 && hi < h_grid_C.size(); ++hi) {
      SmootherSpec spec{kernel, h_grid_C[hi], h_grid_C[hi]};
      double err = 0.0;
      try {
        const KernelSurface C1 = smooth_autocov(train, 1, spec, grid, 1);
        for (int t = 0; t + 1 < val.n(); ++t) {
          const auto& ca = val.curves[t];
          const auto& cb = val.curves[t + 1];
          for (int i = 0; i < ca.m(); ++i) {
            for (int j = 0; j < cb.m(); ++j) {
              const double pred = bilinear(C1.values(), grid, ca.locations[i], cb.locations[j]);
              const double raw = ca.values[i] * cb.values[j];
              err += (raw - pred) * (raw - pred);
            }
          }
        }
      } catch (const DataError&) {
        err = std::numeric_limits<double>::infinity();  // bandwidth too small for the design
      }
      loss_C[hi] += err;
    }
    if (panel.y.size() == panel.n()) {
      for (size_t hi = 0; h_grid_S.size() > 1 && hi < h_grid_S.size(); ++hi) {
        SmootherSpec spec{kernel, h_grid_S[hi], h_grid_S[hi]};
        double err = 0.0;
        try {
          const DiscretizedFunction S1 = smooth_crosscov(train, 1, spec, grid, 1);
          for (int t = 0; t + 1 < val.n(); ++t) {
            const auto& cb = val.curves[t + 1];
            for (int i = 0; i < cb.m(); ++i) {
              const double pred = S1.interpolate(cb.locations[i]);
              const double raw = val.y[t] * cb.values[i];
              err += (raw - pred) * (raw - pred);
            }
          }
        } catch (const DataError&) {
          err = std::numeric_limits<double>::infinity();
        }
        loss_S[hi] += err;
      }
    }
    start += len;
  }

  size_t bi = 0;
  for (size_t hi = 1; hi < h_grid_C.size(); ++hi) {
    if (loss_C[hi] < loss_C[bi]) bi = hi;
  }
  best.h_C = h_grid_C[bi];
  bi = 0;
  for (size_t hi = 1; hi < h_grid_S.size(); ++hi) {
    if (loss_S[hi] < loss_S[bi]) bi = hi;
  }
  best.h_S = h_grid_S[bi];
  return best;
}

SlopeEstimate sparse_agmm(const SparsePanel& panel, const SmootherSpec& spec, int L,
                          const SparseRankRule& rank_rule, const Grid& grid,
                          const BasisSet* basis) {
  if (panel.y.size() != panel.n()) throw DataError("sparse_agmm: panel has no responses");
  SparsePanel centered = panel;
  centered.y.array() -= centered.y.mean();

  MomentSet moments(grid);
  moments.L = L;
  Matrix K_acc = Matrix::Zero(grid.size(), grid.size());
  Vector R_acc = Vector::Zero(grid.size());
  for (int k = 1; k <= L; ++k) {
    const KernelSurface Ck = smooth_autocov(centered, k, spec, grid, L);
    const DiscretizedFunction Sk = smooth_crosscov(centered, k, spec, grid, L);
    K_acc += compose_kernels(Ck, Ck).values();
    R_acc += apply_kernel(Ck, Sk).values();
    moments.C.push_back(Ck);
    moments.c.push_back(Sk);
  }
  // smoothing noise breaks exact symmetry; eigen routines require it
  moments.K = KernelSurface(grid, 0.5 * (K_acc + K_acc.transpose()));
  moments.R = DiscretizedFunction(grid, std::move(R_acc));

  SpectralDecomposition dec = basis ? eigen_basis(moments.K, *basis) : eigen_raw(moments.K);
  dec.theta = dec.theta.cwiseMax(0.0);
  int rank = rank_rule.oracle;
  if (rank <= 0) {
    rank = select_M_ratio(dec.theta, rank_rule.ratio_threshold);
    int above_floor = 0;
    while (above_floor < dec.rank() &&
           dec.theta[above_floor] > rank_rule.eigenvalue_floor * dec.theta[0]) {
      ++above_floor;
    }
    rank = std::max(1, std::min(rank, above_floor));
  }
  SlopeEstimate est = agmm_scalar(moments, dec, rank);
  est.method = Method::sparse_agmm;
  return est;
}

}  // namespace agmm
