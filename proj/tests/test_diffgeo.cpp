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

#include "lneflow/diffgeo.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "lneflow/error.hpp"
#include "lneflow/rng.hpp"
#include "test_util.hpp"

namespace lneflow::diffgeo {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

using ScalarField = std::function<double(double, double)>;

// g = exp(2 f) delta on a 2D periodic grid.
MetricGrid conformal(int n, const ScalarField& f) {
  const auto shape = GridShape::cube(2, n, kTwoPi);
  SymTensorGrid gamma(shape);
  for (std::size_t p = 0; p < shape.size(); ++p) {
    const auto x = shape.position(p);
    const double e = std::exp(2.0 * f(x[0], x[1])) - 1.0;
    gamma(p, 0, 0) = e;
    gamma(p, 1, 1) = e;
  }
  return MetricGrid(std::move(gamma));
}

SymTensorGrid random_field(const GridShape& shape, std::uint64_t seed, double scale) {
  RandomStream rng(seed);
  SymTensorGrid g(shape);
  for (double& v : g.values()) v = scale * rng.uniform(-1.0, 1.0);
  return g;
}

TEST(GridShapeTest, FlatIndexRoundTripAndPeriodicShift) {
  const GridShape s({3, {4, 5, 6}, {0.1, 0.2, 0.3}});
  EXPECT_EQ(s.size(), 120u);
  for (std::size_t p = 0; p < s.size(); ++p) EXPECT_EQ(s.flat(s.coords(p)), p);
  const std::size_t origin = s.flat({0, 0, 0});
  EXPECT_EQ(s.shift(origin, 0, -1), s.flat({3, 0, 0}));
  EXPECT_EQ(s.shift(origin, 2, 6), origin);
  EXPECT_DOUBLE_EQ(s.cell_volume(), 0.1 * 0.2 * 0.3);
  EXPECT_DOUBLE_EQ(s.min_spacing(), 0.1);
  EXPECT_THROW(GridShape(4, {2, 2, 2}, {1, 1, 1}), ContractViolation);
  EXPECT_THROW(GridShape(2, {2, 0, 1}, {1, 1, 1}), ContractViolation);
}

TEST(SymTensorGridTest, SymmetricAccessAndDenseRoundTrip) {
  EXPECT_EQ(sym_index(0, 1), sym_index(1, 0));
  EXPECT_EQ(sym_components(3), 6);
  SymTensorGrid g(GridShape::cube(3, 4, 1.0));
  Eigen::Matrix3d m;
  m << 1, 2, 3, 2, 4, 5, 3, 5, 6;
  g.set(7, m);
  EXPECT_EQ(g.at(7), Eigen::MatrixXd(m));
  EXPECT_EQ(g(7, 2, 1), 5.0);
  EXPECT_NEAR(g.frobenius_at(7), m.norm(), 1e-14);
  EXPECT_TRUE(g.all_finite());
  g(3, 0, 0) = NAN;
  EXPECT_FALSE(g.all_finite());
}

TEST(SymTensorGridTest, CsvLayout) {
  SymTensorGrid g(GridShape::cube(2, 3, 1.0));
  g(1, 1, 0) = 0.25;
  std::ostringstream os;
  write_grid_csv(os, g);
  std::istringstream is(os.str());
  std::string header, row0, row1;
  std::getline(is, header);
  std::getline(is, row0);
  std::getline(is, row1);
  EXPECT_EQ(header, "index,x,y,g00,g10,g11");
  EXPECT_EQ(row1.substr(row1.size() - 6), "0.25,0");
}

TEST(MetricGridTest, DegeneracyIsDetected) {
  SymTensorGrid gamma(GridShape::cube(2, 8, 1.0));
  MetricGrid ok(gamma);
  EXPECT_NO_THROW(ok.check_nondegenerate());
  EXPECT_DOUBLE_EQ(ok.min_eigenvalue(), 1.0);
  gamma(5, 0, 0) = -1.0;
  EXPECT_THROW(MetricGrid(gamma).check_nondegenerate(), DegenerateMetric);
  gamma(5, 0, 0) = NAN;
  EXPECT_THROW(MetricGrid(gamma).check_nondegenerate(), DegenerateMetric);
}

TEST(MetricGridTest, MinEigenvalueMatchesEigenSolver) {
  for (int dim : {2, 3}) {
    const MetricGrid g(random_field(GridShape::cube(dim, 4, 1.0), 3 + dim, 0.3));
    double expected = 1e300;
    for (std::size_t p = 0; p < g.shape().size(); ++p) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.metric_at(p));
      expected = std::min(expected, es.eigenvalues()[0]);
    }
    EXPECT_NEAR(g.min_eigenvalue(), expected, 1e-12);
  }
}

TEST(FlatMetricTest, EveryOperatorVanishesExactly) {
  for (int dim : {2, 3}) {
    const MetricGrid g(SymTensorGrid(GridShape::cube(dim, 6, kTwoPi)));
    for (std::size_t p = 0; p < g.shape().size(); p += 7) {
      const Christoffel c = christoffel(g, p);
      for (double v : c.v) EXPECT_EQ(v, 0.0);
      EXPECT_EQ(riemann(g, p).norm(), 0.0);
      EXPECT_EQ(ricci(g, p).cwiseAbs().maxCoeff(), 0.0);
      EXPECT_EQ(scalar_curvature(g, p), 0.0);
      EXPECT_EQ(deturck_vector(g, p).cwiseAbs().maxCoeff(), 0.0);
    }
    const CurvatureFields f = curvature_fields(g);
    EXPECT_EQ(f.sup_riemann, 0.0);
    for (double v : f.scalar) EXPECT_EQ(v, 0.0);
    const DeTurckRhs rhs = deturck_rhs(g);
    for (double v : rhs.rhs.values()) EXPECT_EQ(v, 0.0);
  }
}

TEST(ChristoffelTest, SymmetricInLowerIndices) {
  const MetricGrid g(random_field(GridShape::cube(3, 5, 1.0), 11, 0.1));
  for (std::size_t p = 0; p < g.shape().size(); p += 5) {
    const Christoffel c = christoffel(g, p);
    for (int k = 0; k < 3; ++k)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) EXPECT_EQ(c(k, i, j), c(k, j, i));
  }
}

TEST(ChristoffelTest, ConformalClosedFormConvergesSecondOrder) {
  // Gamma^k_ij = delta_ik d_j f + delta_jk d_i f - delta_ij d_k f.
  const double a = 0.05;
  const ScalarField f = [a](double x, double y) { return a * std::sin(x) * std::cos(y); };
  double prev = 0.0;
  for (int n : {32, 64}) {
    const MetricGrid g = conformal(n, f);
    double err = 0.0;
    for (std::size_t p = 0; p < g.shape().size(); ++p) {
      const auto x = g.shape().position(p);
      const double df[2] = {a * std::cos(x[0]) * std::cos(x[1]), -a * std::sin(x[0]) * std::sin(x[1])};
      const Christoffel c = christoffel(g, p);
      for (int k = 0; k < 2; ++k)
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) {
            const double exact = (i == k) * df[j] + (j == k) * df[i] - (i == j) * df[k];
            err = std::max(err, std::abs(c(k, i, j) - exact));
          }
    }
    if (prev > 0) EXPECT_GE(std::log2(prev / err), 1.8);
    prev = err;
  }
}

TEST(RiemannTest, AntisymmetricInDerivativePair) {
  const MetricGrid g(random_field(GridShape::cube(3, 5, 1.0), 12, 0.05));
  for (std::size_t p = 0; p < g.shape().size(); p += 9) {
    const Riemann r = riemann(g, p);
    for (int l = 0; l < 3; ++l)
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          for (int k = 0; k < 3; ++k) EXPECT_NEAR(r(l, i, j, k), -r(l, j, i, k), 1e-12);
  }
}

TEST(RicciTest, SymmetricAndContractsFromRiemann) {
  const MetricGrid g(random_field(GridShape::cube(3, 5, 1.0), 13, 0.05));
  for (std::size_t p = 0; p < g.shape().size(); p += 11) {
    const Riemann r = riemann(g, p);
    Eigen::Matrix3d contracted = Eigen::Matrix3d::Zero();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int q = 0; q < 3; ++q) contracted(i, j) += r(q, q, i, j);
    const Eigen::MatrixXd ric = ricci(g, p);
    EXPECT_EQ(ric, ric.transpose());
    const Eigen::Matrix3d sym = 0.5 * (contracted + contracted.transpose());
    EXPECT_LT((ric - sym).cwiseAbs().maxCoeff(), 1e-12);
    const double s = (g.metric_at(p).inverse().cwiseProduct(ric)).sum();
    EXPECT_NEAR(scalar_curvature(g, p), s, 1e-12);
  }
}

TEST(ScalarCurvatureTest, ConformalOracleConvergesSecondOrder) {
  // R = -2 exp(-2 f) lap f.
  const double a = 0.01;
  const ScalarField f = [a](double x, double y) { return a * std::sin(x) * std::sin(y); };
  double prev = 0.0;
  for (int n : {64, 128}) {
    const MetricGrid g = conformal(n, f);
    const CurvatureFields fields = curvature_fields(g);
    double err = 0.0;
    for (std::size_t p = 0; p < g.shape().size(); ++p) {
      const auto x = g.shape().position(p);
      const double fv = f(x[0], x[1]);
      const double exact = -2.0 * std::exp(-2.0 * fv) * (-2.0 * fv);
      err = std::max(err, std::abs(fields.scalar[p] - exact));
      if (p % 97 == 0) EXPECT_NEAR(scalar_curvature(g, p), fields.scalar[p], 1e-12);
    }
    if (prev > 0) EXPECT_GE(std::log2(prev / err), 1.8);
    prev = err;
  }
}

TEST(RicciTest, TwoDimensionalEinsteinIdentity) {
  // In 2D, Ric = (R / 2) g holds for the continuum metric; the discrete
  // defect must vanish at second order.
  const double a = 0.1;
  const ScalarField f = [a](double x, double y) { return a * std::cos(x + 2 * y); };
  double prev = 0.0;
  for (int n : {32, 64}) {
    SymTensorGrid gamma = conformal(n, f).perturbation();
    // Break conformality so the identity is not trivially diagonal.
    for (std::size_t p = 0; p < gamma.shape().size(); ++p) {
      const auto x = gamma.shape().position(p);
      gamma(p, 0, 1) = 0.05 * std::sin(x[0]) * std::cos(x[1]);
    }
    const MetricGrid g(std::move(gamma));
    double defect = 0.0, scale = 0.0;
    for (std::size_t p = 0; p < g.shape().size(); ++p) {
      const Eigen::MatrixXd ric = ricci(g, p);
      defect = std::max(defect, (ric - 0.5 * scalar_curvature(g, p) * g.metric_at(p)).cwiseAbs().maxCoeff());
      scale = std::max(scale, ric.cwiseAbs().maxCoeff());
    }
    EXPECT_LT(defect, 0.05 * scale);
    if (prev > 0) EXPECT_GE(std::log2(prev / defect), 1.8);
    prev = defect;
  }
}

TEST(DeTurckVectorTest, IsTraceOfChristoffel) {
  for (int dim : {2, 3}) {
    const MetricGrid g(random_field(GridShape::cube(dim, 5, 1.0), 14 + dim, 0.1));
    for (std::size_t p = 0; p < g.shape().size(); p += 3) {
      const Christoffel c = christoffel(g, p);
      const Eigen::MatrixXd ginv = g.metric_at(p).inverse();
      const Eigen::VectorXd w = deturck_vector(g, p);
      for (int k = 0; k < dim; ++k) {
        double expected = 0.0;
        for (int i = 0; i < dim; ++i)
          for (int j = 0; j < dim; ++j) expected += ginv(i, j) * c(k, i, j);
        EXPECT_NEAR(w[k], expected, 1e-12);
      }
    }
  }
}

TEST(LichnerowiczTest, FourierModeMatchesDiscreteSymbol) {
  for (int dim : {2, 3}) {
    const int n = 16;
    const auto shape = GridShape::cube(dim, n, kTwoPi);
    const double h = shape.spacing(0);
    for (int k : {1, 3, 7}) {
      SymTensorGrid d(shape);
      for (std::size_t p = 0; p < shape.size(); ++p) d(p, 0, 1) = std::cos(k * shape.position(p)[0]);
      const SymTensorGrid ld = lichnerowicz_apply(d);
      const double symbol = -(2.0 / (h * h)) * (1.0 - std::cos(k * h));
      for (std::size_t p = 0; p < shape.size(); ++p) {
        EXPECT_NEAR(ld(p, 0, 1), symbol * d(p, 0, 1), 1e-10);
        EXPECT_EQ(ld(p, 0, 0), 0.0);
      }
    }
  }
}

TEST(LichnerowiczTest, NonPositiveOnRandomFields) {
  for (int dim : {2, 3}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const SymTensorGrid d = random_field(GridShape::cube(dim, 8, kTwoPi), 100 + seed, 1.0);
      EXPECT_LE(inner_product(lichnerowicz_apply(d), d), 0.0);
    }
  }
}

TEST(DeTurckRhsTest, RejectsNonFiniteMetric) {
  SymTensorGrid gamma = random_field(GridShape::cube(2, 8, kTwoPi), 20, 1e-3);
  gamma(10, 0, 0) = NAN;
  EXPECT_THROW(deturck_rhs(MetricGrid(gamma)), DegenerateMetric);
  gamma(10, 0, 0) = INFINITY;
  EXPECT_THROW(deturck_rhs(MetricGrid(gamma)), DegenerateMetric);
}

TEST(DeTurckRhsTest, SupRiemannMatchesPointwise) {
  const MetricGrid g(random_field(GridShape::cube(3, 5, 1.0), 21, 0.05));
  double sup = 0.0;
  for (std::size_t p = 0; p < g.shape().size(); ++p) sup = std::max(sup, riemann(g, p).norm());
  EXPECT_NEAR(deturck_rhs(g).sup_riemann, sup, 1e-12 * sup);
  EXPECT_NEAR(curvature_fields(g).sup_riemann, sup, 1e-12 * sup);
}

}  // namespace
}  // namespace lneflow::diffgeo
