#include "agmm/funcspace.hpp"

#include <cmath>

namespace agmm {

Grid Grid::uniform(int size) {
  if (size < 8) throw ConfigError("Grid::uniform: need at least 8 points, got " + std::to_string(size));
  auto data = std::make_shared<Data>();
  data->points = Vector::LinSpaced(size, 0.0, 1.0);
  const double h = 1.0 / (size - 1);
  data->weights = Vector::Constant(size, h);
  data->weights[0] = h / 2.0;
  data->weights[size - 1] = h / 2.0;
  return Grid(std::move(data));
}

bool Grid::same_as(const Grid& other) const {
  if (data_ == other.data_) return true;
  if (size() != other.size()) return false;
  return points().isApprox(other.points(), 1e-14);
}

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
  if (!a.same_as(b)) {
    throw DimensionError(std::string(where) + ": arguments live on different grids (" +
                         std::to_string(a.size()) + " vs " + std::to_string(b.size()) + " points)");
  }
}

DiscretizedFunction::DiscretizedFunction(Grid grid, Vector values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw DimensionError("DiscretizedFunction: " + std::to_string(values_.size()) +
                         " values on a grid of " + std::to_string(grid_.size()) + " points");
  }
  if (!values_.allFinite()) throw DataError("DiscretizedFunction: non-finite values");
}

DiscretizedFunction DiscretizedFunction::zero(const Grid& grid) {
  return DiscretizedFunction(grid, Vector::Zero(grid.size()));
}

double DiscretizedFunction::interpolate(double u) const {
  const int G = size();
  if (u <= 0.0) return values_[0];
  if (u >= 1.0) return values_[G - 1];
  const double x = u * (G - 1);
  const int i = std::min(static_cast<int>(x), G - 2);
  const double frac = x - i;
  return (1.0 - frac) * values_[i] + frac * values_[i + 1];
}

KernelSurface::KernelSurface(Grid grid, Matrix values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.rows() != grid_.size() || values_.cols() != grid_.size()) {
    throw DimensionError("KernelSurface: values must be G x G on the grid");
  }
  if (!values_.allFinite()) throw DataError("KernelSurface: non-finite values");
}

KernelSurface KernelSurface::zero(const Grid& grid) {
  return KernelSurface(grid, Matrix::Zero(grid.size(), grid.size()));
}

double KernelSurface::asymmetry() const {
  return (values_ - values_.transpose()).cwiseAbs().maxCoeff();
}

bool KernelSurface::is_symmetric(double rel_tol) const {
  const double scale = values_.cwiseAbs().maxCoeff();
  if (scale == 0.0) return true;
  return asymmetry() <= rel_tol * scale;
}

KernelSurface KernelSurface::symmetrized() const {
  return KernelSurface(grid_, 0.5 * (values_ + values_.transpose()));
}

KernelSurface KernelSurface::transposed() const {
  return KernelSurface(grid_, values_.transpose());
}

BasisSet::BasisSet(Grid grid, Matrix functions)
    : grid_(std::move(grid)), functions_(std::move(functions)) {
  if (functions_.cols() != grid_.size()) {
    throw DimensionError("BasisSet: functions must be sampled on the grid");
  }
}

DiscretizedFunction BasisSet::function(int j) const {
  return DiscretizedFunction(grid_, functions_.row(j).transpose());
}

BasisSet BasisSet::head(int J) const {
  if (J < 1 || J > size()) throw ConfigError("BasisSet::head: J out of range");
  return BasisSet(grid_, functions_.topRows(J));
}

double BasisSet::gram_deviation() const {
  const Matrix gram = functions_ * grid_.weights().asDiagonal() * functions_.transpose();
  return (gram - Matrix::Identity(size(), size())).cwiseAbs().maxCoeff();
}

double inner_product(const DiscretizedFunction& f, const DiscretizedFunction& g) {
  require_same_grid(f.grid(), g.grid(), "inner_product");
  return f.grid().weights().dot(f.values().cwiseProduct(g.values()));
}

double norm(const DiscretizedFunction& f) {
  return std::sqrt(std::max(0.0, inner_product(f, f)));
}

DiscretizedFunction apply_kernel(const KernelSurface& K, const DiscretizedFunction& f) {
  require_same_grid(K.grid(), f.grid(), "apply_kernel");
  Vector out = K.values() * f.grid().weights().cwiseProduct(f.values());
  return DiscretizedFunction(K.grid(), std::move(out));
}

KernelSurface compose_kernels(const KernelSurface& A, const KernelSurface& B) {
  require_same_grid(A.grid(), B.grid(), "compose_kernels");
  Matrix out = A.values() * A.grid().weights().asDiagonal() * B.values().transpose();
  return KernelSurface(A.grid(), std::move(out));
}

double hs_norm(const KernelSurface& A) {
  const Vector& w = A.grid().weights();
  const double s = (w.asDiagonal() * A.values().cwiseAbs2() * w.asDiagonal()).sum();
  return std::sqrt(std::max(0.0, s));
}

double hs_distance(const KernelSurface& A, const KernelSurface& B) {
  require_same_grid(A.grid(), B.grid(), "hs_distance");
  return hs_norm(KernelSurface(A.grid(), A.values() - B.values()));
}

namespace {

// Modified Gram-Schmidt under the quadrature inner product.
void reorthonormalize(Matrix& funcs, const Vector& w) {
  const int J = static_cast<int>(funcs.rows());
  for (int j = 0; j < J; ++j) {
    for (int i = 0; i < j; ++i) {
      const double proj = (funcs.row(j).cwiseProduct(funcs.row(i)) * w.asDiagonal()).sum();
      funcs.row(j) -= proj * funcs.row(i);
    }
    const double nrm = std::sqrt((funcs.row(j).cwiseAbs2() * w.asDiagonal()).sum());
    if (nrm < 1e-12) throw IllPosedError("make_basis: basis functions collapse under re-orthonormalization");
    funcs.row(j) /= nrm;
  }
}

}  // namespace

BasisSet make_basis(BasisKind kind, int J, const Grid& grid) {
  if (J < 1) throw ConfigError("make_basis: J must be positive");
  const int G = grid.size();
  if (J > G) throw IllPosedError("make_basis: J = " + std::to_string(J) +
                                 " exceeds grid size " + std::to_string(G));
  const Vector& u = grid.points();
  Matrix funcs(J, G);
  const double pi = std::acos(-1.0);
  const double sqrt2 = std::sqrt(2.0);
  if (kind == BasisKind::cosine) {
    for (int j = 0; j < J; ++j) {
      if (j == 0) {
        funcs.row(j).setOnes();
      } else {
        funcs.row(j) = (sqrt2 * (pi * j * u.array()).cos()).matrix().transpose();
      }
    }
  } else {
    // pairs {sqrt2 cos(2 pi k u), sqrt2 sin(2 pi k u)}, k = 1, 2, ...
    for (int j = 0; j < J; ++j) {
      const int k = j / 2 + 1;
      if (j % 2 == 0) {
        funcs.row(j) = (sqrt2 * (2.0 * pi * k * u.array()).cos()).matrix().transpose();
      } else {
        funcs.row(j) = (sqrt2 * (2.0 * pi * k * u.array()).sin()).matrix().transpose();
      }
    }
  }
  reorthonormalize(funcs, grid.weights());
  return BasisSet(grid, std::move(funcs));
}

}  // namespace agmm
