// Function-space operations: quadrature inner products, integral operator
// application and composition, and orthonormal basis construction.

#pragma once

#include "agmm/types.hpp"

namespace agmm {

// <f,g> = int f(u) g(u) du by trapezoid quadrature.
double inner_product(const DiscretizedFunction& f, const DiscretizedFunction& g);

double norm(const DiscretizedFunction& f);

// (K f)(u) = int K(u,v) f(v) dv.
DiscretizedFunction apply_kernel(const KernelSurface& K, const DiscretizedFunction& f);

// (u,v) -> int A(u,z) B(v,z) dz.  With A == B the result is symmetric and
// positive semi-definite as an operator.
KernelSurface compose_kernels(const KernelSurface& A, const KernelSurface& B);

// Hilbert-Schmidt norm ||A||_S = sqrt( int int A(u,v)^2 du dv ).
double hs_norm(const KernelSurface& A);
double hs_distance(const KernelSurface& A, const KernelSurface& B);

enum class BasisKind { fourier, cosine };

// Orthonormal basis on the grid.  cosine: {1, sqrt2 cos(pi k u), ...};
// fourier: {sqrt2 cos(2 pi k u), sqrt2 sin(2 pi k u)} pairs for k = 1, 2, ...
// Discretely re-orthonormalized so the Gram matrix is the identity at finite G.
BasisSet make_basis(BasisKind kind, int J, const Grid& grid);

}  // namespace agmm
