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

#include "lneflow/tensor_grid.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include <Eigen/Eigenvalues>

#include "lneflow/csv.hpp"
#include "lneflow/error.hpp"

namespace lneflow::diffgeo {

GridShape::GridShape(int dim, std::array<int, 3> extent,
                     std::array<double, 3> spacing)
    : dim_(dim), extent_(extent), spacing_(spacing) {
  require(dim == 2 || dim == 3, "GridShape: manifold dimension must be 2 or 3");
  for (int a = 0; a < 3; ++a) {
    if (a >= dim) {
      extent_[a] = 1;
      spacing_[a] = 1.0;
      continue;
    }
    // Central differences need distinct +/-1 neighbours.
    require(extent_[a] >= 3, "GridShape: at least 3 points per axis");
    require(spacing_[a] > 0.0 && std::isfinite(spacing_[a]),
            "GridShape: spacing must be positive");
  }
  stride_[2] = 1;
  stride_[1] = static_cast<std::size_t>(extent_[2]);
  stride_[0] = stride_[1] * static_cast<std::size_t>(extent_[1]);
  size_ = stride_[0] * static_cast<std::size_t>(extent_[0]);
}

GridShape GridShape::cube(int dim, int points, double length) {
  const double h = length / points;
  return GridShape(dim, {points, points, points}, {h, h, h});
}

double GridShape::min_spacing() const {
  double h = spacing_[0];
  for (int a = 1; a < dim_; ++a) h = std::min(h, spacing_[a]);
  return h;
}

double GridShape::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim_; ++a) v *= spacing_[a];
  return v;
}

std::array<int, 3> GridShape::coords(std::size_t flat) const {
  std::array<int, 3> c{};
  for (int a = 0; a < 3; ++a) {
    c[a] = static_cast<int>(flat / stride_[a]);
    flat %= stride_[a];
  }
  return c;
}

std::size_t GridShape::flat(std::array<int, 3> c) const {
  std::size_t f = 0;
  for (int a = 0; a < 3; ++a) f += static_cast<std::size_t>(c[a]) * stride_[a];
  return f;
}

std::size_t GridShape::shift(std::size_t flat, int axis, int offset) const {
  const int n = extent_[axis];
  const int c = static_cast<int>((flat / stride_[axis]) % n);
  const int moved = ((c + offset) % n + n) % n;
  return flat + (static_cast<std::ptrdiff_t>(moved) - c) *
                    static_cast<std::ptrdiff_t>(stride_[axis]);
}

std::array<double, 3> GridShape::position(std::size_t flat) const {
  const auto c = coords(flat);
  std::array<double, 3> x{};
  for (int a = 0; a < dim_; ++a) x[a] = c[a] * spacing_[a];
  return x;
}

SymTensorGrid::SymTensorGrid(GridShape shape)
    : shape_(shape),
      ncomp_(sym_components(shape.dim())),
      values_(shape.size() * static_cast<std::size_t>(ncomp_), 0.0) {}

Eigen::MatrixXd SymTensorGrid::at(std::size_t point) const {
  const int n = dim();
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = (*this)(point, i, j);
  return m;
}

void SymTensorGrid::set(std::size_t point, const Eigen::MatrixXd& m) {
  require(m.rows() == dim() && m.cols() == dim(), "SymTensorGrid::set: shape mismatch");
  for (int i = 0; i < dim(); ++i)
    for (int j = 0; j <= i; ++j) (*this)(point, i, j) = m(i, j);
}

bool SymTensorGrid::all_finite() const {
  for (double v : values_)
    if (!std::isfinite(v)) return false;
  return true;
}

double SymTensorGrid::frobenius_at(std::size_t point) const {
  double s = 0.0;
  for (int i = 0; i < dim(); ++i) {
    for (int j = 0; j <= i; ++j) {
      const double v = (*this)(point, i, j);
      s += (i == j ? 1.0 : 2.0) * v * v;
    }
  }
  return std::sqrt(s);
}

void write_grid_csv(std::ostream& os, const SymTensorGrid& grid) {
  static constexpr const char* kAxes[] = {"x", "y", "z"};
  CsvWriter csv(os);
  csv.field(std::string_view("index"));
  for (int a = 0; a < grid.dim(); ++a) csv.field(std::string_view(kAxes[a]));
  for (int i = 0; i < grid.dim(); ++i)
    for (int j = 0; j <= i; ++j)
      csv.field(std::string_view("g" + std::to_string(i) + std::to_string(j)));
  csv.end_row();
  const int nc = grid.components();
  for (std::size_t p = 0; p < grid.shape().size(); ++p) {
    csv.field(static_cast<long long>(p));
    const auto x = grid.shape().position(p);
    for (int a = 0; a < grid.dim(); ++a) csv.field(x[a]);
    for (int c = 0; c < nc; ++c) csv.field(grid.values()[p * nc + c]);
    csv.end_row();
  }
}

MetricGrid::MetricGrid(SymTensorGrid perturbation) : gamma_(std::move(perturbation)) {}

Eigen::MatrixXd MetricGrid::metric_at(std::size_t point) const {
  Eigen::MatrixXd g = gamma_.at(point);
  g.diagonal().array() += 1.0;
  return g;
}

double MetricGrid::min_eigenvalue() const {
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t p = 0; p < shape().size(); ++p) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(metric_at(p),
                                                      Eigen::EigenvaluesOnly);
    const double l = es.eigenvalues().minCoeff();
    if (!std::isfinite(l)) return std::numeric_limits<double>::quiet_NaN();
    lo = std::min(lo, l);
  }
  return lo;
}

void MetricGrid::check_nondegenerate() const {
  for (std::size_t p = 0; p < shape().size(); ++p) {
    const Eigen::MatrixXd g = metric_at(p);
    if (!g.allFinite())
      throw DegenerateMetric("non-finite metric at point " + std::to_string(p));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
    const double l = es.eigenvalues().minCoeff();
    if (!(l >= kDegeneracyThreshold)) {
      throw DegenerateMetric("metric smallest eigenvalue " + std::to_string(l) +
                             " at point " + std::to_string(p));
    }
  }
}

}  // namespace lneflow::diffgeo
