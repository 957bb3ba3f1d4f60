#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "agmm/funcspace.hpp"
#include "agmm/rng.hpp"

#include <cmath>
#include <functional>

using namespace agmm;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Independent quadrature oracle: composite Simpson on a dense grid.
double simpson_oracle(const std::function<double(double)>& f, int intervals = 20000) {
  double acc = f(0.0) + f(1.0);
  for (int i = 1; i < intervals; ++i) {
    acc += f(i / static_cast<double>(intervals)) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return acc / (3.0 * intervals);
}

DiscretizedFunction sample(const Grid& grid, const std::function<double(double)>& f) {
  Vector v(grid.size());
  for (int i = 0; i < grid.size(); ++i) v[i] = f(grid.point(i));
  return DiscretizedFunction(grid, v);
}

Matrix random_matrix(int rows, int cols, Rng& rng) {
  Matrix m(rows, cols);
  for (int i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

}  // namespace

TEST_CASE("grid invariants") {
  const Grid g = Grid::uniform(100);
  CHECK(g.size() == 100);
  CHECK(g.points()[0] == 0.0);
  CHECK(g.points()[99] == 1.0);
  CHECK(g.weights().minCoeff() > 0.0);
  CHECK(g.weights().sum() == doctest::Approx(1.0).epsilon(1e-14));
  for (int i = 1; i < g.size(); ++i) CHECK(g.point(i) > g.point(i - 1));
  CHECK_THROWS_AS(Grid::uniform(4), ConfigError);
}

TEST_CASE("inner product on unit constants") {
  const Grid g = Grid::uniform(100);
  const DiscretizedFunction one(g, Vector::Ones(100));
  CHECK(inner_product(one, one) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("inner product of cos/sin pair against quadrature oracle") {
  const Grid g = Grid::uniform(256);
  const auto cosf = [](double u) { return std::sqrt(2.0) * std::cos(kPi * u); };
  const auto sinf = [](double u) { return std::sqrt(2.0) * std::sin(kPi * u); };
  const double oracle_cross = simpson_oracle([&](double u) { return cosf(u) * sinf(u); });
  const double oracle_self = simpson_oracle([&](double u) { return cosf(u) * cosf(u); });
  CHECK(oracle_cross == doctest::Approx(0.0).epsilon(1e-10));  // closed form 0
  CHECK(oracle_self == doctest::Approx(1.0).epsilon(1e-10));   // closed form 1

  const DiscretizedFunction fc = sample(g, cosf);
  const DiscretizedFunction fs = sample(g, sinf);
  CHECK(std::abs(inner_product(fc, fs) - oracle_cross) < 1e-6);
  CHECK(std::abs(inner_product(fc, fc) - oracle_self) < 1e-6);
}

TEST_CASE("inner product symmetry and positivity over random pairs") {
  const Grid g = Grid::uniform(64);
  Rng rng(31);
  for (int rep = 0; rep < 25; ++rep) {
    const DiscretizedFunction f(g, rng.normal_vector(64));
    const DiscretizedFunction h(g, rng.normal_vector(64));
    CHECK(inner_product(f, h) == doctest::Approx(inner_product(h, f)).epsilon(1e-14));
    CHECK(inner_product(f, f) >= 0.0);
  }
}

TEST_CASE("trapezoid quadrature exact for degree <= 1") {
  const Grid g = Grid::uniform(37);
  const DiscretizedFunction one(g, Vector::Ones(37));
  const DiscretizedFunction lin = sample(g, [](double u) { return 2.0 * u - 0.7; });
  CHECK(inner_product(one, one) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(inner_product(lin, one) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("apply_kernel") {
  const Grid g = Grid::uniform(16);
  Rng rng(17);

  SUBCASE("zero operator") {
    const KernelSurface K = KernelSurface::zero(g);
    const DiscretizedFunction f(g, rng.normal_vector(16));
    CHECK(apply_kernel(K, f).values().cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("rank-1 projector fixed point") {
    const BasisSet b = make_basis(BasisKind::cosine, 2, g);
    const Vector phi = b.functions().row(1);
    const KernelSurface K(g, phi * phi.transpose());
    const DiscretizedFunction f(g, phi);
    const DiscretizedFunction out = apply_kernel(K, f);
    CHECK((out.values() - phi).cwiseAbs().maxCoeff() < 1e-8);
  }

  SUBCASE("matches triple-loop oracle") {
    const Matrix Kv = random_matrix(16, 16, rng);
    const KernelSurface K(g, Kv);
    const Vector fv = rng.normal_vector(16);
    const DiscretizedFunction f(g, fv);
    const DiscretizedFunction out = apply_kernel(K, f);
    for (int i = 0; i < 16; ++i) {
      double acc = 0.0;
      for (int j = 0; j < 16; ++j) acc += g.weight(j) * Kv(i, j) * fv[j];
      CHECK(std::abs(out.values()[i] - acc) < 1e-12);
    }
  }

  SUBCASE("linearity") {
    const Matrix Kv = random_matrix(16, 16, rng);
    const KernelSurface K(g, Kv);
    const Vector fv = rng.normal_vector(16), gv = rng.normal_vector(16);
    const double a = 1.3, b = -0.4;
    const Vector lhs = apply_kernel(K, DiscretizedFunction(g, a * fv + b * gv)).values();
    const Vector rhs = a * apply_kernel(K, DiscretizedFunction(g, fv)).values() +
                       b * apply_kernel(K, DiscretizedFunction(g, gv)).values();
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-12);
  }

  SUBCASE("grid mismatch") {
    const Grid g2 = Grid::uniform(20);
    const KernelSurface K = KernelSurface::zero(g);
    const DiscretizedFunction f = DiscretizedFunction::zero(g2);
    CHECK_THROWS_AS(apply_kernel(K, f), DimensionError);
  }
}

TEST_CASE("compose_kernels") {
  const Grid g = Grid::uniform(12);
  Rng rng(23);

  SUBCASE("zero") {
    const KernelSurface Z = KernelSurface::zero(g);
    CHECK(hs_norm(compose_kernels(Z, Z)) == 0.0);
  }

  SUBCASE("projector idempotence") {
    const BasisSet b = make_basis(BasisKind::cosine, 2, g);
    const Vector phi = b.functions().row(1);
    const KernelSurface P(g, phi * phi.transpose());
    const KernelSurface PP = compose_kernels(P, P);
    CHECK((PP.values() - P.values()).cwiseAbs().maxCoeff() < 1e-8);
  }

  SUBCASE("matches triple-loop oracle") {
    const Matrix A = random_matrix(12, 12, rng);
    const Matrix B = random_matrix(12, 12, rng);
    const KernelSurface C = compose_kernels(KernelSurface(g, A), KernelSurface(g, B));
    for (int i = 0; i < 12; ++i) {
      for (int j = 0; j < 12; ++j) {
        double acc = 0.0;
        for (int z = 0; z < 12; ++z) acc += g.weight(z) * A(i, z) * B(j, z);
        CHECK(std::abs(C.values()(i, j) - acc) < 1e-12);
      }
    }
  }

  SUBCASE("self-composition is symmetric PSD") {
    const Matrix A = random_matrix(12, 12, rng);
    const KernelSurface C = compose_kernels(KernelSurface(g, A), KernelSurface(g, A));
    CHECK(C.is_symmetric());
    // operator eigenvalues of the weight-scaled matrix
    const Vector sqw = g.weights().cwiseSqrt();
    const Matrix S = sqw.asDiagonal() * C.values() * sqw.asDiagonal();
    const Eigen::SelfAdjointEigenSolver<Matrix> es(S);
    CHECK(es.eigenvalues().minCoeff() >= -1e-10);
  }
}

TEST_CASE("make_basis cosine") {
  const Grid g = Grid::uniform(128);

  SUBCASE("J=1 is the constant function") {
    const BasisSet b = make_basis(BasisKind::cosine, 1, g);
    CHECK((b.functions().row(0).array() - 1.0).abs().maxCoeff() < 1e-12);
  }

  SUBCASE("J=3 Gram matrix is the identity") {
    const BasisSet b = make_basis(BasisKind::cosine, 3, g);
    CHECK(b.gram_deviation() < 1e-8);
  }

  SUBCASE("J > G is ill-posed") {
    CHECK_THROWS_AS(make_basis(BasisKind::cosine, 200, g), IllPosedError);
  }
}

TEST_CASE("make_basis fourier reproduces the paired cos/sin family") {
  const Grid g = Grid::uniform(256);
  const BasisSet b = make_basis(BasisKind::fourier, 10, g);
  CHECK(b.gram_deviation() < 1e-8);
  for (int j = 0; j < 10; ++j) {
    const int k = j / 2 + 1;
    Vector analytic(g.size());
    for (int i = 0; i < g.size(); ++i) {
      analytic[i] = j % 2 == 0 ? std::sqrt(2.0) * std::cos(2.0 * kPi * k * g.point(i))
                               : std::sqrt(2.0) * std::sin(2.0 * kPi * k * g.point(i));
    }
    const double residual = norm(DiscretizedFunction(g, b.functions().row(j).transpose() - analytic));
    CHECK(residual < 1e-6);
  }
}

TEST_CASE("kernel surface symmetry flagging") {
  const Grid g = Grid::uniform(8);
  Matrix v = Matrix::Zero(8, 8);
  v(1, 2) = 1.0;
  const KernelSurface K(g, v);
  CHECK_FALSE(K.is_symmetric());
  CHECK(K.symmetrized().is_symmetric());
}
