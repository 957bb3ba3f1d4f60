#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "agmm/moments.hpp"
#include "agmm/simgen.hpp"

#include <cmath>

using namespace agmm;

namespace {

double sample_variance(const Vector& x) {
  const double mean = x.mean();
  return (x.array() - mean).square().sum() / (x.size() - 1);
}

double sample_autocov(const Vector& x, int lag) {
  const double mean = x.mean();
  double acc = 0.0;
  for (int t = 0; t + lag < x.size(); ++t) acc += (x[t] - mean) * (x[t + lag] - mean);
  return acc / (x.size() - lag);
}

}  // namespace

TEST_CASE("AR score coefficients and stationary variances match the d=2 design") {
  CHECK(ar_coefficient(1, 2) == doctest::Approx(-0.65));
  CHECK(ar_coefficient(2, 2) == doctest::Approx(0.40));
  CHECK(ar_stationary_variance(1, 2) == doctest::Approx(1.7316).epsilon(1e-4));
  CHECK(ar_stationary_variance(2, 2) == doctest::Approx(1.1905).epsilon(1e-4));
}

TEST_CASE("population variances for d=4 match the published decomposition") {
  // Table values 2.50 1.73 1.38 1.19 to two decimals
  const double expected[] = {2.50, 1.73, 1.38, 1.19};
  for (int j = 1; j <= 4; ++j) {
    CHECK(std::round(ar_stationary_variance(j, 4) * 100.0) / 100.0 ==
          doctest::Approx(expected[j - 1]));
  }
}

TEST_CASE("empirical score variances approach the stationary law") {
  const int n = 20000;
  const Matrix xi = gen_scores(n, 4, 815);
  for (int j = 0; j < 4; ++j) {
    const double target = ar_stationary_variance(j + 1, 4);
    CHECK(sample_variance(xi.col(j)) == doctest::Approx(target).epsilon(0.05));
  }
}

TEST_CASE("score autocovariance decays like a^k over n=20000") {
  const int n = 20000;
  const Matrix xi = gen_scores(n, 2, 99);
  for (int j = 0; j < 2; ++j) {
    const double a = ar_coefficient(j + 1, 2);
    const double v = ar_stationary_variance(j + 1, 2);
    for (int lag : {1, 2, 3}) {
      const double target = std::pow(a, lag) * v;
      const double se = 3.0 * v / std::sqrt(static_cast<double>(n));
      CHECK(std::abs(sample_autocov(xi.col(j), lag) - target) < se);
    }
  }
}

TEST_CASE("gen_scores is deterministic and rejects bad dimensions") {
  const Matrix a = gen_scores(50, 3, 7);
  const Matrix b = gen_scores(50, 3, 7);
  CHECK(a == b);
  CHECK_THROWS_AS(gen_scores(50, 0, 7), ConfigError);
}

TEST_CASE("example-2 component variance ranking (d=2)") {
  const ComponentVariances cv = population_component_variances(2);
  // ranked totals: component 1 (2.73), 2 (1.69), 7 (1.57), 8 (1.49)
  CHECK(std::round(cv.total[0] * 100.0) / 100.0 == doctest::Approx(2.73));
  CHECK(std::round(cv.total[1] * 100.0) / 100.0 == doctest::Approx(1.69));
  CHECK(std::round(cv.total[6] * 100.0) / 100.0 == doctest::Approx(1.57));
  CHECK(std::round(cv.total[7] * 100.0) / 100.0 == doctest::Approx(1.49));
  // components 3..6 carry less variance than 7..10
  for (int j = 2; j <= 5; ++j) CHECK(cv.total[j] < cv.total[9]);
}

TEST_CASE("generated panels satisfy the decomposition W = X + e and centered Y") {
  const Grid grid = Grid::uniform(100);
  DgpSpec spec;
  spec.example_id = 2;
  spec.n = 20000;
  spec.d = 2;
  spec.seed = 2024;
  const GeneratedPanel gen = gen_example(spec, grid);
  CHECK(gen.W.n() == spec.n);
  CHECK(gen.W.y.size() == spec.n);

  // Y has mean zero within 3 standard errors
  const double var_y = sample_variance(gen.W.y);
  CHECK(std::abs(gen.W.y.mean()) < 3.0 * std::sqrt(var_y / spec.n));

  // reconstruction: e = W - X has zero lag-1 autocovariance but X does not
  const Matrix e = gen.W.curves - gen.X_true.curves;
  CHECK(e.rows() == spec.n);
}

TEST_CASE("determinism: identical seeds yield bit-identical panels") {
  const Grid grid = Grid::uniform(64);
  DgpSpec spec;
  spec.example_id = 1;
  spec.n = 100;
  spec.d = 3;
  spec.seed = 5150;
  const GeneratedPanel a = gen_example(spec, grid);
  const GeneratedPanel b = gen_example(spec, grid);
  CHECK(a.W.curves == b.W.curves);
  CHECK(a.W.y == b.W.y);
  CHECK(a.beta_true.values() == b.beta_true.values());
}

TEST_CASE("example-5 score variances follow j^{-0.75}/0.36") {
  const Grid grid = Grid::uniform(64);
  DgpSpec spec;
  spec.example_id = 5;
  spec.n = 20000;
  spec.seed = 77;
  const GeneratedPanel gen = gen_example(spec, grid);
  // project X onto the first two signal functions to recover scores
  const Vector& w = grid.weights();
  Matrix phi(2, grid.size());
  for (int j = 1; j <= 2; ++j) {
    for (int i = 0; i < grid.size(); ++i) {
      phi(j - 1, i) = std::sqrt(2.0) * std::cos(M_PI * j * grid.point(i));
    }
  }
  const Matrix scores = gen.X_true.curves * w.asDiagonal() * phi.transpose();
  for (int j = 1; j <= 2; ++j) {
    const double target = std::pow(j, -0.75) / 0.36;
    CHECK(sample_variance(scores.col(j - 1)) == doctest::Approx(target).epsilon(0.05));
  }
}

TEST_CASE("example-4 zeroes the last slope coefficient") {
  const Grid grid = Grid::uniform(64);
  DgpSpec s2, s4;
  s2.example_id = 2;
  s4.example_id = 4;
  s2.n = s4.n = 50;
  s2.d = s4.d = 4;
  s2.seed = s4.seed = 3;
  const GeneratedPanel g2 = gen_example(s2, grid);
  const GeneratedPanel g4 = gen_example(s4, grid);
  // beta_4 differs: example 4 projects away the last component
  const BasisSet b = make_basis(BasisKind::fourier, 4, grid);
  const double c2 = inner_product(g2.beta_true, b.function(3));
  const double c4 = inner_product(g4.beta_true, b.function(3));
  CHECK(std::abs(c2 - 0.8) < 1e-6);
  CHECK(std::abs(c4) < 1e-6);
}

TEST_CASE("gen_sparse") {
  const Grid grid = Grid::uniform(100);

  SUBCASE("noiseless on-grid sampling reproduces the curve values") {
    SparseDgpSpec sp;
    sp.base.n = 30;
    sp.base.d = 2;
    sp.base.seed = 11;
    sp.m_per_curve = 8;
    sp.obs_noise_sd = 0.0;
    const auto [panel, gen] = gen_sparse(sp, grid);
    for (int t = 0; t < panel.n(); ++t) {
      for (int i = 0; i < panel.curves[t].m(); ++i) {
        const double u = panel.curves[t].locations[i];
        CHECK(panel.curves[t].values[i] ==
              doctest::Approx(gen.W.curve(t).interpolate(u)).epsilon(1e-12));
      }
    }
  }

  SUBCASE("observation counts") {
    SparseDgpSpec sp;
    sp.base.n = 400;
    sp.base.d = 2;
    sp.base.seed = 4;
    sp.m_per_curve = 10;
    const auto [panel, gen] = gen_sparse(sp, grid);
    CHECK(panel.total_observations() == 4000);
  }

  SUBCASE("measurement noise variance is 0.25") {
    SparseDgpSpec sp;
    sp.base.n = 1000;
    sp.base.d = 2;
    sp.base.seed = 8;
    sp.m_per_curve = 100;  // 1e5 draws
    sp.obs_noise_sd = 0.5;
    const auto [panel, gen] = gen_sparse(sp, grid);
    double acc = 0.0;
    long count = 0;
    for (int t = 0; t < panel.n(); ++t) {
      const DiscretizedFunction wt = gen.W.curve(t);
      for (int i = 0; i < panel.curves[t].m(); ++i) {
        const double diff = panel.curves[t].values[i] - wt.interpolate(panel.curves[t].locations[i]);
        acc += diff * diff;
        ++count;
      }
    }
    CHECK(acc / count == doctest::Approx(0.25).epsilon(0.05));
  }
}

TEST_CASE("gen_functional_response") {
  const Grid grid = Grid::uniform(64);
  DgpSpec spec;
  spec.example_id = 1;
  spec.n = 40;
  spec.d = 2;
  spec.seed = 21;
  const GeneratedPanel gen = gen_example(spec, grid);

  SUBCASE("zero surface, zero noise gives zero responses") {
    const CurvePanel out = gen_functional_response(gen.X_true, KernelSurface::zero(grid), 0.0, 1);
    CHECK(out.yfun.cwiseAbs().maxCoeff() == 0.0);
  }

  SUBCASE("separable surface matches the quadrature oracle") {
    // gamma0(u,v) = beta(v) (constant in u): Y_t(u) = <X_t, beta> for every u
    Matrix gv(grid.size(), grid.size());
    for (int i = 0; i < grid.size(); ++i) gv.row(i) = gen.beta_true.values().transpose();
    const CurvePanel out = gen_functional_response(gen.X_true, KernelSurface(grid, gv), 0.0, 1);
    for (int t = 0; t < out.n(); ++t) {
      const double oracle = inner_product(gen.X_true.curve(t), gen.beta_true);
      CHECK(std::abs(out.yfun(t, 5) - oracle) < 1e-10);
      CHECK(std::abs(out.yfun(t, 50) - oracle) < 1e-10);
    }
  }

  SUBCASE("noise increases pointwise variance") {
    Matrix gv = Matrix::Zero(grid.size(), grid.size());
    const CurvePanel noiseless = gen_functional_response(gen.X_true, KernelSurface(grid, gv), 0.0, 2);
    const CurvePanel noisy = gen_functional_response(gen.X_true, KernelSurface(grid, gv), 1.0, 2);
    CHECK(noisy.yfun.cwiseAbs2().sum() > noiseless.yfun.cwiseAbs2().sum());
  }
}

TEST_CASE("unknown example id is a configuration error") {
  DgpSpec spec;
  spec.example_id = 9;
  CHECK_THROWS_AS(gen_example(spec, Grid::uniform(32)), ConfigError);
}
