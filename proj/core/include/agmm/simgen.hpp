// Data-generating processes for the five simulation designs: serially
// dependent functional predictors contaminated by functional white noise,
// scalar/functional responses, and the irregular-sampling observer.

#pragma once

#include "agmm/panel.hpp"

#include <cstdint>

namespace agmm {

struct DgpSpec {
  int example_id = 1;  // 1..5
  int n = 200;
  int d = 2;           // signal dimension; example 5 forces d = 25
  int noise_dim = 10;  // 0 turns the contamination off
  std::uint64_t seed = 1;
  int burn_in = 0;     // 0 = initialize AR paths from the stationary law
  int basis_scenario = 1;       // example 5 only: 1 = cos/sin bases, 2 = Fourier bases
  double response_noise_sd = 1.0;
};

struct SparseDgpSpec {
  DgpSpec base;            // example 2 curve dynamics
  int m_per_curve = 10;    // observations per curve
  double obs_noise_sd = 0.5;
};

struct GeneratedPanel {
  CurvePanel W;       // observed curves; W.y holds the scalar responses
  CurvePanel X_true;  // latent signal curves
  DiscretizedFunction beta_true;
};

// AR(1) score paths, column j with coefficient (-1)^j (0.9 - 0.5 j / d) and
// unit-variance innovations.  n x d, stationary start (or burn-in if > 0).
Matrix gen_scores(int n, int d, std::uint64_t seed, int burn_in = 0);

GeneratedPanel gen_example(const DgpSpec& spec, const Grid& grid);

// Observes the example-2 curves at m_t uniform random locations with
// N(0, sd^2) measurement error: Z_ti = W_t(U_ti) + eta_ti.
std::pair<SparsePanel, GeneratedPanel> gen_sparse(const SparseDgpSpec& spec, const Grid& grid);

// Function-on-function responses Y_t(u) = int X_t(v) gamma0(u,v) dv + eps_t(u)
// with independent N(0, noise_sd^2) scores on the first 10 cosine basis
// functions.  Returns a copy of the panel with yfun attached.
CurvePanel gen_functional_response(const CurvePanel& x_panel, const KernelSurface& gamma0,
                                   double noise_sd, std::uint64_t seed);

// AR(1) coefficient and stationary variance of score j (1-based) at signal
// dimension d, for the shared score dynamics of examples 1-4.
double ar_coefficient(int j, int d);
double ar_stationary_variance(int j, int d);

// Analytic per-component variance decomposition for the example-2 family
// (signal and noise share one orthonormal basis, so the decomposition is
// exact).  Vectors are indexed by component 1..max(d, 10).
struct ComponentVariances {
  Vector signal;
  Vector error;
  Vector total;
};
ComponentVariances population_component_variances(int d);

}  // namespace agmm
