#include "agmm/simgen.hpp"

#include "agmm/funcspace.hpp"
#include "agmm/rng.hpp"

#include <cmath>

namespace agmm {

namespace {

constexpr double kPi = 3.14159265358979323846;

// First-d slope coefficients shared by examples 1-4.
const double kSlopeCoefs[6] = {2.0, 1.6, -1.2, 0.8, -1.0, -0.6};

Matrix cos_basis_rows(int count, const Grid& grid) {
  // sqrt2 cos(pi j u), j = 1..count
  Matrix out(count, grid.size());
  for (int j = 1; j <= count; ++j) {
    out.row(j - 1) = (std::sqrt(2.0) * (kPi * j * grid.points().array()).cos()).matrix().transpose();
  }
  return out;
}

Matrix sin_basis_rows(int count, const Grid& grid) {
  Matrix out(count, grid.size());
  for (int j = 1; j <= count; ++j) {
    out.row(j - 1) = (std::sqrt(2.0) * (kPi * j * grid.points().array()).sin()).matrix().transpose();
  }
  return out;
}

// Paper Fourier family: {sqrt2 cos(2 pi k u), sqrt2 sin(2 pi k u)}, k = 1,...
Matrix fourier_basis_rows(int count, const Grid& grid) {
  Matrix out(count, grid.size());
  for (int j = 0; j < count; ++j) {
    const int k = j / 2 + 1;
    if (j % 2 == 0) {
      out.row(j) = (std::sqrt(2.0) * (2.0 * kPi * k * grid.points().array()).cos()).matrix().transpose();
    } else {
      out.row(j) = (std::sqrt(2.0) * (2.0 * kPi * k * grid.points().array()).sin()).matrix().transpose();
    }
  }
  return out;
}

// Example-2 noise-score variances; depend on the signal dimension d.
Vector example2_noise_variances(int d) {
  Vector sigma2(10);
  for (int j = 1; j <= 10; ++j) {
    if (j <= 6) {
      sigma2[j - 1] = std::pow(0.5, j - 1);
    } else {
      sigma2[j - 1] = (2.6 - 0.1 * j) * std::pow(1.1, d / 2.0 - 3.0);
    }
  }
  return sigma2;
}

Matrix ar_paths(int n, const Vector& coef, const Vector& innovation_sd, Rng& rng, int burn_in) {
  const int d = static_cast<int>(coef.size());
  Matrix out(n, d);
  for (int j = 0; j < d; ++j) {
    const double a = coef[j];
    if (std::abs(a) >= 1.0) {
      throw ConfigError("ar_paths: |coefficient| >= 1 for component " + std::to_string(j + 1));
    }
    const double sd = innovation_sd[j];
    double x;
    if (burn_in > 0) {
      x = 0.0;
      for (int t = 0; t < burn_in; ++t) x = a * x + sd * rng.normal();
    } else {
      x = sd / std::sqrt(1.0 - a * a) * rng.normal();
      x = a * x + sd * rng.normal();
    }
    out(0, j) = x;
    for (int t = 1; t < n; ++t) {
      x = a * x + sd * rng.normal();
      out(t, j) = x;
    }
  }
  return out;
}

}  // namespace

double ar_coefficient(int j, int d) {
  const double a = ((j % 2 == 0) ? 1.0 : -1.0) * (0.9 - 0.5 * j / d);
  return a;
}

double ar_stationary_variance(int j, int d) {
  const double a = ar_coefficient(j, d);
  return 1.0 / (1.0 - a * a);
}

Matrix gen_scores(int n, int d, std::uint64_t seed, int burn_in) {
  if (d < 1) throw ConfigError("gen_scores: d must be positive");
  Vector coef(d), sd = Vector::Ones(d);
  for (int j = 1; j <= d; ++j) coef[j - 1] = ar_coefficient(j, d);
  Rng rng(seed);
  return ar_paths(n, coef, sd, rng, burn_in);
}

ComponentVariances population_component_variances(int d) {
  const int m = std::max(d, 10);
  ComponentVariances cv;
  cv.signal = Vector::Zero(m);
  cv.error = Vector::Zero(m);
  for (int j = 1; j <= d; ++j) cv.signal[j - 1] = ar_stationary_variance(j, d);
  cv.error.head(10) = example2_noise_variances(d);
  cv.total = cv.signal + cv.error;
  return cv;
}

GeneratedPanel gen_example(const DgpSpec& spec, const Grid& grid) {
  if (spec.example_id < 1 || spec.example_id > 5) {
    throw ConfigError("gen_example: unknown example id " + std::to_string(spec.example_id));
  }
  const int d = (spec.example_id == 5) ? 25 : spec.d;
  if (d < 1) throw ConfigError("gen_example: d must be positive");
  if (spec.n < 10) throw ConfigError("gen_example: n must be at least 2*L = 10");
  const int q = spec.noise_dim;
  const int n = spec.n;

  // signal / noise loading functions
  Matrix phi, zeta;
  switch (spec.example_id) {
    case 1:
      phi = cos_basis_rows(d, grid);
      zeta = sin_basis_rows(q, grid);
      break;
    case 2:
    case 3:
    case 4:
      zeta = fourier_basis_rows(q, grid);
      phi = fourier_basis_rows(d, grid);
      break;
    case 5:
      if (spec.basis_scenario == 2) {
        phi = fourier_basis_rows(d, grid);
        zeta = fourier_basis_rows(q, grid);
      } else {
        phi = cos_basis_rows(d, grid);
        zeta = sin_basis_rows(q, grid);
      }
      break;
  }

  // score dynamics
  Vector coef(d), innov_sd(d);
  if (spec.example_id == 5) {
    for (int j = 1; j <= d; ++j) {
      coef[j - 1] = 0.8;
      innov_sd[j - 1] = std::pow(j, -0.375);  // Var = j^{-0.75}
    }
  } else {
    for (int j = 1; j <= d; ++j) {
      coef[j - 1] = ar_coefficient(j, d);
      innov_sd[j - 1] = 1.0;
    }
  }

  // noise-score standard deviations
  Vector nu_sd = Vector::Ones(q);
  if (spec.example_id >= 2 && spec.example_id <= 4) {
    Vector sigma2 = example2_noise_variances(d);
    for (int j = 0; j < q; ++j) nu_sd[j] = std::sqrt(sigma2[std::min(j, 9)]);
  }

  // slope coefficients
  Vector b = Vector::Zero(d);
  if (spec.example_id == 5) {
    for (int j = 1; j <= d; ++j) b[j - 1] = ((j % 2 == 1) ? 1.0 : -1.0) * 2.0 * std::pow(j, -2.0);
  } else {
    for (int j = 1; j <= std::min(d, 6); ++j) b[j - 1] = kSlopeCoefs[j - 1];
    if (spec.example_id == 4) b[d - 1] = 0.0;
  }

  Rng rng(spec.seed);
  const Matrix xi = ar_paths(n, coef, innov_sd, rng, spec.burn_in);
  Matrix nu(n, q);
  for (int t = 0; t < n; ++t) {
    for (int j = 0; j < q; ++j) nu(t, j) = nu_sd[j] * rng.normal();
  }
  const Vector eps = rng.normal_vector(n);

  Matrix X = xi * phi;
  Matrix W = q > 0 ? (X + nu * zeta).eval() : X;
  DiscretizedFunction beta(grid, phi.transpose() * b);

  // Y_t = <X_t, beta> + eps_t, the inner product taken by quadrature so Y
  // matches the discretized model exactly.
  Vector y = X * grid.weights().cwiseProduct(beta.values()) + spec.response_noise_sd * eps;

  GeneratedPanel out{make_panel(grid, std::move(W), std::move(y)),
                     make_panel(grid, std::move(X)), std::move(beta)};
  return out;
}

std::pair<SparsePanel, GeneratedPanel> gen_sparse(const SparseDgpSpec& spec, const Grid& grid) {
  if (spec.m_per_curve < 2) throw ConfigError("gen_sparse: need at least 2 observations per curve");
  DgpSpec base = spec.base;
  base.example_id = 2;
  GeneratedPanel gen = gen_example(base, grid);

  Rng rng(Rng::mix(spec.base.seed, 0x0b5e7e5ULL));
  SparsePanel sp;
  sp.curves.resize(gen.W.n());
  sp.y = gen.W.y;
  for (int t = 0; t < gen.W.n(); ++t) {
    const int m = spec.m_per_curve;
    Vector u(m), z(m);
    DiscretizedFunction wt = gen.W.curve(t);
    for (int i = 0; i < m; ++i) {
      u[i] = rng.uniform();
      z[i] = wt.interpolate(u[i]) + spec.obs_noise_sd * rng.normal();
    }
    sp.curves[t] = SparseCurve{std::move(u), std::move(z)};
  }
  return {std::move(sp), std::move(gen)};
}

CurvePanel gen_functional_response(const CurvePanel& x_panel, const KernelSurface& gamma0,
                                   double noise_sd, std::uint64_t seed) {
  require_same_grid(x_panel.grid, gamma0.grid(), "gen_functional_response");
  const int n = x_panel.n();
  // Y_t(u) = int gamma0(u,v) X_t(v) dv
  Matrix yfun = x_panel.curves * x_panel.grid.weights().asDiagonal() * gamma0.values().transpose();
  if (noise_sd > 0.0) {
    const int q = 10;
    const BasisSet cosb = make_basis(BasisKind::cosine, q, x_panel.grid);
    Rng rng(seed);
    Matrix scores(n, q);
    for (int t = 0; t < n; ++t) {
      for (int j = 0; j < q; ++j) scores(t, j) = noise_sd * rng.normal();
    }
    yfun += scores * cosb.functions();
  }
  CurvePanel out = x_panel;
  out.yfun = std::move(yfun);
  return out;
}

}  // namespace agmm
