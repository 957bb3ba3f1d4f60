#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "agmm/moments.hpp"
#include "agmm/rng.hpp"
#include "agmm/simgen.hpp"
#include "agmm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

using namespace agmm;

namespace {

// independent eigenvalue oracle: cyclic Jacobi rotations on a symmetric matrix
std::vector<double> jacobi_eigenvalues(Matrix A) {
  const int n = static_cast<int>(A.rows());
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) off += A(p, q) * A(p, q);
    }
    if (off < 1e-24) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        if (std::abs(A(p, q)) < 1e-18) continue;
        const double theta = 0.5 * (A(q, q) - A(p, p)) / A(p, q);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int i = 0; i < n; ++i) {
          const double aip = A(i, p), aiq = A(i, q);
          A(i, p) = c * aip - s * aiq;
          A(i, q) = s * aip + c * aiq;
        }
        for (int i = 0; i < n; ++i) {
          const double api = A(p, i), aqi = A(q, i);
          A(p, i) = c * api - s * aqi;
          A(q, i) = s * api + c * aqi;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (int i = 0; i < n; ++i) ev[i] = A(i, i);
  std::sort(ev.begin(), ev.end(), std::greater<>());
  return ev;
}

KernelSurface reconstruction(const SpectralDecomposition& dec, int r) {
  Matrix acc = Matrix::Zero(dec.grid.size(), dec.grid.size());
  for (int j = 0; j < r; ++j) {
    acc += dec.theta[j] * dec.psi.row(j).transpose() * dec.psi.row(j);
  }
  return KernelSurface(dec.grid, std::move(acc));
}

}  // namespace

TEST_CASE("eigen_raw on a rank-1 projector") {
  const Grid g = Grid::uniform(32);
  const BasisSet b = make_basis(BasisKind::cosine, 2, g);
  const Vector phi = b.functions().row(1);
  const KernelSurface K(g, phi * phi.transpose());
  const SpectralDecomposition dec = eigen_raw(K);
  CHECK(dec.theta[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(std::abs(dec.theta[1]) < 1e-8);
  // sign convention resolves to +phi
  CHECK((dec.psi.row(0).transpose() - phi).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("eigen_raw on a diagonal two-component operator") {
  const Grid g = Grid::uniform(32);
  const BasisSet b = make_basis(BasisKind::cosine, 3, g);
  const Vector p1 = b.functions().row(1), p2 = b.functions().row(2);
  const KernelSurface K(g, 2.0 * p1 * p1.transpose() + 1.0 * p2 * p2.transpose());
  const SpectralDecomposition dec = eigen_raw(K);
  CHECK(dec.theta[0] == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(dec.theta[1] == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("eigen_raw matches the Jacobi oracle on a random PSD surface") {
  const Grid g = Grid::uniform(20);
  Rng rng(33);
  Matrix A(20, 20);
  for (int i = 0; i < A.size(); ++i) A.data()[i] = rng.normal();
  const KernelSurface K = compose_kernels(KernelSurface(g, A), KernelSurface(g, A));
  const SpectralDecomposition dec = eigen_raw(K);

  const Vector sqw = g.weights().cwiseSqrt();
  const Matrix S = sqw.asDiagonal() * K.values() * sqw.asDiagonal();
  const auto oracle = jacobi_eigenvalues(S);
  for (int j = 0; j < 20; ++j) {
    CHECK(std::abs(dec.theta[j] - oracle[j]) < 1e-9 * std::max(1.0, oracle[0]));
  }
}

TEST_CASE("eigen_raw orthonormality, ordering and reconstruction") {
  const Grid g = Grid::uniform(40);
  DgpSpec spec;
  spec.example_id = 2;
  spec.n = 200;
  spec.d = 4;
  spec.seed = 5;
  const GeneratedPanel gen = gen_example(spec, g);
  const MomentSet m = compute_moments(gen.W, {});
  const SpectralDecomposition dec = eigen_raw(m.K);

  for (int j = 1; j < dec.rank(); ++j) CHECK(dec.theta[j] <= dec.theta[j - 1] + 1e-12);
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j <= i; ++j) {
      const double target = i == j ? 1.0 : 0.0;
      CHECK(std::abs(inner_product(dec.eigenfunction(i), dec.eigenfunction(j)) - target) < 1e-8);
    }
  }

  double prev = hs_distance(m.K, reconstruction(dec, 1));
  for (int r : {2, 4, 8, 20, 40}) {
    const double err = hs_distance(m.K, reconstruction(dec, r));
    CHECK(err <= prev + 1e-12);
    prev = err;
  }
  CHECK(prev < 1e-8);  // full-rank reconstruction

  SUBCASE("asymmetric input is rejected") {
    Matrix bad = m.K.values();
    bad(3, 7) += 1.0;
    CHECK_THROWS_AS(eigen_raw(KernelSurface(g, bad)), DataError);
  }
}

TEST_CASE("eigen_basis") {
  const Grid g = Grid::uniform(64);

  SUBCASE("operator inside span(B): basis and raw eigenvalues coincide") {
    const BasisSet b = make_basis(BasisKind::cosine, 5, g);
    Matrix Kv = Matrix::Zero(64, 64);
    const double lambda[] = {3.0, 2.0, 1.0, 0.5, 0.25};
    for (int j = 0; j < 5; ++j) {
      Kv += lambda[j] * b.functions().row(j).transpose() * b.functions().row(j);
    }
    const KernelSurface K(g, Kv);
    const SpectralDecomposition raw = eigen_raw(K);
    const SpectralDecomposition bas = eigen_basis(K, b);
    for (int j = 0; j < 5; ++j) {
      CHECK(bas.theta[j] == doctest::Approx(raw.theta[j]).epsilon(1e-8));
      CHECK(bas.theta[j] == doctest::Approx(lambda[j]).epsilon(1e-8));
    }
  }

  SUBCASE("projection contraction: basis eigenvalues never exceed raw ones") {
    DgpSpec spec;
    spec.example_id = 2;
    spec.n = 150;
    spec.d = 4;
    spec.seed = 8;
    const GeneratedPanel gen = gen_example(spec, g);
    const MomentSet m = compute_moments(gen.W, {});
    const SpectralDecomposition raw = eigen_raw(m.K);
    const SpectralDecomposition bas = eigen_basis(m.K, make_basis(BasisKind::fourier, 12, g));
    for (int j = 0; j < 12; ++j) CHECK(bas.theta[j] <= raw.theta[j] + 1e-8);
  }

  SUBCASE("example-1 panel: leading eigenvalues agree with the raw decomposition") {
    const Grid grid = Grid::uniform(100);
    DgpSpec spec;
    spec.example_id = 1;
    spec.n = 800;
    spec.d = 2;
    spec.seed = 9;
    const GeneratedPanel gen = gen_example(spec, grid);
    const MomentSet m = compute_moments(gen.W, {});
    const SpectralDecomposition raw = eigen_raw(m.K);
    const SpectralDecomposition bas = eigen_basis(m.K, make_basis(BasisKind::cosine, 15, grid));
    for (int j = 0; j < 2; ++j) {
      CHECK(bas.theta[j] == doctest::Approx(raw.theta[j]).epsilon(0.02));
    }
    // psi_j = delta_j' B holds on the grid
    const Matrix rebuilt = bas.delta * bas.basis;
    CHECK((rebuilt - bas.psi).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("select_M_ratio") {
  Vector t3(3);
  t3 << 1.0, 0.0, 0.0;
  CHECK(select_M_ratio(t3, 0.9) == 1);
  Vector t4(4);
  t4 << 5.0, 3.0, 1.0, 1.0;
  CHECK(select_M_ratio(t4, 0.80) == 2);
  CHECK(select_M_ratio(t4, 0.81) == 3);
}

TEST_CASE("select_d_bootstrap") {
  const Grid g = Grid::uniform(50);

  SUBCASE("recovers the true rank on noiseless panels") {
    int correct = 0;
    const int reps = 20;
    for (int r = 0; r < reps; ++r) {
      DgpSpec spec;
      spec.example_id = 1;
      spec.n = 300;
      spec.d = 2;
      spec.seed = 100 + r;
      spec.noise_dim = 0;
      const GeneratedPanel gen = gen_example(spec, g);
      const MomentSet m = compute_moments(gen.W, {});
      const SpectralDecomposition dec = eigen_raw(m.K);
      const DimensionSelection sel = select_d_bootstrap(gen.W, dec, 100, 0.05, 6, 5, 1234 + r);
      if (sel.d_hat == 2) ++correct;
    }
    CHECK(correct >= 19);  // >= 95% of 20
  }

  SUBCASE("pure-noise panel stops at d = 1 with high frequency") {
    int stopped_small = 0;
    const int reps = 20;
    for (int r = 0; r < reps; ++r) {
      Rng rng(500 + r);
      const int n = 200;
      Matrix zeta(10, g.size());
      for (int j = 1; j <= 10; ++j) {
        for (int i = 0; i < g.size(); ++i) {
          zeta(j - 1, i) = std::sqrt(2.0) * std::sin(M_PI * j * g.point(i));
        }
      }
      Matrix nu(n, 10);
      for (int i = 0; i < nu.size(); ++i) nu.data()[i] = rng.normal();
      const CurvePanel panel = make_panel(g, nu * zeta);
      const MomentSet m = compute_moments(panel, {});
      const SpectralDecomposition dec = eigen_raw(m.K);
      const DimensionSelection sel = select_d_bootstrap(panel, dec, 100, 0.05, 6, 5, 4321 + r);
      if (sel.d_hat <= 2) ++stopped_small;
    }
    CHECK(stopped_small >= 17);  // >= 1 - alpha - 0.1 of the runs
  }

  SUBCASE("deterministic under a fixed seed") {
    DgpSpec spec;
    spec.example_id = 2;
    spec.n = 150;
    spec.d = 2;
    spec.seed = 77;
    const GeneratedPanel gen = gen_example(spec, g);
    const MomentSet m = compute_moments(gen.W, {});
    const SpectralDecomposition dec = eigen_raw(m.K);
    const DimensionSelection a = select_d_bootstrap(gen.W, dec, 100, 0.05, 6, 5, 555);
    const DimensionSelection b = select_d_bootstrap(gen.W, dec, 100, 0.05, 6, 5, 555);
    CHECK(a.d_hat == b.d_hat);
    CHECK(a.exceed_counts == b.exceed_counts);
  }
}

TEST_CASE("select_J_cv") {
  const Grid g = Grid::uniform(50);

  SUBCASE("singleton grid returns that J") {
    DgpSpec spec;
    spec.example_id = 2;
    spec.n = 120;
    spec.d = 2;
    spec.seed = 3;
    const GeneratedPanel gen = gen_example(spec, g);
    CHECK(select_J_cv(gen.W, 2, {7}, 5, BasisKind::fourier, 5) == 7);
  }

  SUBCASE("prefers the generating dimension over a 3x larger basis") {
    int picked = 0;
    const int reps = 20;
    for (int r = 0; r < reps; ++r) {
      DgpSpec spec;
      spec.example_id = 2;  // curves live exactly in the 10-dim Fourier span
      spec.n = 1000;
      spec.d = 2;
      spec.seed = 40 + r;
      const GeneratedPanel gen = gen_example(spec, g);
      if (select_J_cv(gen.W, 2, {10, 30}, 5, BasisKind::fourier, 5) == 10) ++picked;
    }
    CHECK(picked >= 16);  // >= 80%
  }

  SUBCASE("deterministic and validates folds") {
    DgpSpec spec;
    spec.example_id = 2;
    spec.n = 200;
    spec.d = 2;
    spec.seed = 4;
    const GeneratedPanel gen = gen_example(spec, g);
    const int a = select_J_cv(gen.W, 2, {5, 10, 15}, 5, BasisKind::fourier, 5);
    const int b = select_J_cv(gen.W, 2, {5, 10, 15}, 5, BasisKind::fourier, 5);
    CHECK(a == b);
    CHECK_THROWS_AS(select_J_cv(gen.W, 2, {5}, 50, BasisKind::fourier, 5), ConfigError);
  }
}
