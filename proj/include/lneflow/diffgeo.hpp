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

// Curvature of a metric g = delta + gamma sampled on a periodic grid.
//
// All derivatives are second-order central differences with periodic wrap.
// Pointwise operators evaluate only the stencil they need; the *_field
// functions sweep the whole grid once and are what the flow integrator uses.
// Every operator returns exact zeros on the flat metric.

#include <array>
#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "lneflow/tensor_grid.hpp"

namespace lneflow::diffgeo {

/// Gamma^k_ij, symmetric in (i, j).
struct Christoffel {
  int dim = 0;
  std::array<double, 27> v{};

  double operator()(int k, int i, int j) const { return v[(k * 3 + i) * 3 + j]; }
  double& operator()(int k, int i, int j) { return v[(k * 3 + i) * 3 + j]; }
};

/// R^l_ijk = d_i Gamma^l_jk - d_j Gamma^l_ik + Gamma^p_jk Gamma^l_ip
///           - Gamma^p_ik Gamma^l_jp.
struct Riemann {
  int dim = 0;
  std::array<double, 81> v{};

  double operator()(int l, int i, int j, int k) const {
    return v[((l * 3 + i) * 3 + j) * 3 + k];
  }
  double& operator()(int l, int i, int j, int k) {
    return v[((l * 3 + i) * 3 + j) * 3 + k];
  }
  /// Frobenius norm over all components.
  double norm() const;
};

Christoffel christoffel(const MetricGrid& g, std::size_t point);
Riemann riemann(const MetricGrid& g, std::size_t point);
/// R_ij = R^p_{pij}, symmetrized.
Eigen::MatrixXd ricci(const MetricGrid& g, std::size_t point);
double scalar_curvature(const MetricGrid& g, std::size_t point);
/// W^k = g^{pq} Gamma^k_pq relative to the flat Cartesian background.
Eigen::VectorXd deturck_vector(const MetricGrid& g, std::size_t point);

/// Componentwise 5-point (2D) / 7-point (3D) Laplacian. On the flat
/// background the Lichnerowicz operator reduces to this.
SymTensorGrid lichnerowicz_apply(const SymTensorGrid& d);

/// Frobenius inner product summed over grid points (no volume factor).
double inner_product(const SymTensorGrid& a, const SymTensorGrid& b);

struct CurvatureFields {
  SymTensorGrid ricci;
  std::vector<double> scalar;
  /// max over points of the Riemann Frobenius norm.
  double sup_riemann = 0.0;
};

/// Ricci, scalar curvature and sup |Rm| over the whole grid.
CurvatureFields curvature_fields(const MetricGrid& g);

struct DeTurckRhs {
  SymTensorGrid rhs;
  double sup_riemann = 0.0;
};

/// -2 Ric(g) + nabla_i W_j + nabla_j W_i over the whole grid, where the
/// covariant derivatives use the full Christoffel symbols of g.
DeTurckRhs deturck_rhs(const MetricGrid& g);

}  // namespace lneflow::diffgeo
