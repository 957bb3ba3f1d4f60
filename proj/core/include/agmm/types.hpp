// Core value types shared across the library: grids on [0,1], discretized
// functions, bivariate kernel surfaces and orthonormal basis sets.
//
// Everything is immutable after construction and safe to share across threads.

#pragma once

#include <Eigen/Dense>

#include <memory>
#include <stdexcept>
#include <string>

namespace agmm {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Thrown when two objects that must live on the same grid do not.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Invalid parameter combinations (unknown example id, |a|>=1 AR coefficient, ...).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Problems with the data itself (nonpositive price, too few observations, ...).
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Numerically meaningless requests (rank beyond numerical rank, J > G, ...).
struct IllPosedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Uniform grid on [0,1] with trapezoid quadrature weights.  Weights sum to 1
// (the length of the interval).  Cheap to copy; shared internally.
class Grid {
 public:
  static Grid uniform(int size);

  int size() const { return static_cast<int>(data_->points.size()); }
  const Vector& points() const { return data_->points; }
  const Vector& weights() const { return data_->weights; }
  double point(int i) const { return data_->points[i]; }
  double weight(int i) const { return data_->weights[i]; }
  double spacing() const { return data_->points[1] - data_->points[0]; }

  bool same_as(const Grid& other) const;

 private:
  struct Data {
    Vector points;
    Vector weights;
  };
  explicit Grid(std::shared_ptr<const Data> data) : data_(std::move(data)) {}
  std::shared_ptr<const Data> data_;
};

void require_same_grid(const Grid& a, const Grid& b, const char* where);

// A real function on [0,1] stored by value on a shared grid.
class DiscretizedFunction {
 public:
  DiscretizedFunction(Grid grid, Vector values);
  static DiscretizedFunction zero(const Grid& grid);

  const Grid& grid() const { return grid_; }
  const Vector& values() const { return values_; }
  int size() const { return static_cast<int>(values_.size()); }

  // Linear interpolation for off-grid points; clamps to [0,1].
  double interpolate(double u) const;

 private:
  Grid grid_;
  Vector values_;
};

// A bivariate function on [0,1]^2, values[i][j] = K(u_i, u_j).
class KernelSurface {
 public:
  KernelSurface(Grid grid, Matrix values);
  static KernelSurface zero(const Grid& grid);

  const Grid& grid() const { return grid_; }
  const Matrix& values() const { return values_; }
  int size() const { return static_cast<int>(values_.rows()); }

  double asymmetry() const;  // max |K(u,v) - K(v,u)|
  bool is_symmetric(double rel_tol = 1e-10) const;
  KernelSurface symmetrized() const;
  KernelSurface transposed() const;

 private:
  Grid grid_;
  Matrix values_;
};

// J orthonormal functions under the quadrature inner product, stored as rows.
class BasisSet {
 public:
  BasisSet(Grid grid, Matrix functions);

  const Grid& grid() const { return grid_; }
  int size() const { return static_cast<int>(functions_.rows()); }
  const Matrix& functions() const { return functions_; }
  DiscretizedFunction function(int j) const;

  // Leading J functions; valid because construction is sequential.
  BasisSet head(int J) const;

  double gram_deviation() const;  // max_ij |<B_i,B_j> - delta_ij|

 private:
  Grid grid_;
  Matrix functions_;  // J x G
};

}  // namespace agmm
