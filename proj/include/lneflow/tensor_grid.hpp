// Copyright 2026 The lneflow Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

namespace lneflow::diffgeo {

/// Periodic lattice in 2 or 3 dimensions. Axis 0 varies slowest in the flat
/// index; unused axes have extent 1.
class GridShape {
 public:
  GridShape(int dim, std::array<int, 3> extent, std::array<double, 3> spacing);
  /// Uniform grid with `points` points per axis covering [0, length)^dim.
  static GridShape cube(int dim, int points, double length);

  int dim() const { return dim_; }
  int extent(int axis) const { return extent_[axis]; }
  double spacing(int axis) const { return spacing_[axis]; }
  double min_spacing() const;
  std::size_t size() const { return size_; }
  /// Volume element h_0 h_1 ... h_{dim-1}.
  double cell_volume() const;

  std::array<int, 3> coords(std::size_t flat) const;
  std::size_t flat(std::array<int, 3> c) const;
  /// Flat index of the periodic neighbour `offset` steps along `axis`.
  std::size_t shift(std::size_t flat, int axis, int offset) const;
  /// Physical coordinate of a point along each used axis.
  std::array<double, 3> position(std::size_t flat) const;

  bool operator==(const GridShape&) const = default;

 private:
  int dim_;
  std::array<int, 3> extent_;
  std::array<double, 3> spacing_;
  std::array<std::size_t, 3> stride_;
  std::size_t size_;
};

/// Number of stored components of a symmetric dim x dim tensor.
constexpr int sym_components(int dim) { return dim * (dim + 1) / 2; }
/// Storage slot of (i, j): lower triangle, row-major.
constexpr int sym_index(int i, int j) {
  return i >= j ? i * (i + 1) / 2 + j : j * (j + 1) / 2 + i;
}

/// A symmetric 2-tensor at every point of a periodic grid. Only the lower
/// triangle is stored, so symmetry holds by construction.
class SymTensorGrid {
 public:
  explicit SymTensorGrid(GridShape shape);

  const GridShape& shape() const { return shape_; }
  int dim() const { return shape_.dim(); }
  int components() const { return ncomp_; }

  double operator()(std::size_t point, int i, int j) const {
    return values_[point * ncomp_ + sym_index(i, j)];
  }
  double& operator()(std::size_t point, int i, int j) {
    return values_[point * ncomp_ + sym_index(i, j)];
  }
  /// Raw storage: components() values per point in flat-index order.
  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  Eigen::MatrixXd at(std::size_t point) const;
  void set(std::size_t point, const Eigen::MatrixXd& m);

  bool all_finite() const;
  /// Pointwise Frobenius norm (off-diagonal entries counted twice).
  double frobenius_at(std::size_t point) const;

  bool operator==(const SymTensorGrid&) const = default;

 private:
  GridShape shape_;
  int ncomp_;
  std::vector<double> values_;
};

/// Writes one CSV row per point: flat index, coordinates, then the tensor
/// components in storage order.
void write_grid_csv(std::ostream& os, const SymTensorGrid& grid);

inline constexpr double kDegeneracyThreshold = 1e-10;

/// Full metric g = delta + gamma over a flat Cartesian background.
class MetricGrid {
 public:
  explicit MetricGrid(SymTensorGrid perturbation);

  const GridShape& shape() const { return gamma_.shape(); }
  int dim() const { return gamma_.dim(); }
  const SymTensorGrid& perturbation() const { return gamma_; }
  SymTensorGrid& perturbation() { return gamma_; }

  Eigen::MatrixXd metric_at(std::size_t point) const;
  /// Smallest eigenvalue of g over all points.
  double min_eigenvalue() const;
  /// Throws DegenerateMetric at the first point whose smallest eigenvalue is
  /// below kDegeneracyThreshold (or non-finite).
  void check_nondegenerate() const;

 private:
  SymTensorGrid gamma_;
};

}  // namespace lneflow::diffgeo
