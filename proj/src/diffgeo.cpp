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

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "lneflow/error.hpp"

namespace lneflow::diffgeo {

namespace {

template <int D>
using Mat = Eigen::Matrix<double, D, D>;
template <int D>
using Vec = Eigen::Matrix<double, D, 1>;

template <int D>
struct Gam {
  std::array<double, D * D * D> v{};
  double operator()(int k, int i, int j) const { return v[(k * D + i) * D + j]; }
  double& operator()(int k, int i, int j) { return v[(k * D + i) * D + j]; }
};

template <int D>
struct Riem {
  std::array<double, D * D * D * D> v{};
  double operator()(int l, int i, int j, int k) const {
    return v[((l * D + i) * D + j) * D + k];
  }
  double& operator()(int l, int i, int j, int k) {
    return v[((l * D + i) * D + j) * D + k];
  }
};

template <int D>
Mat<D> perturbation(const SymTensorGrid& gamma, std::size_t p) {
  const double* s = gamma.values().data() + p * gamma.components();
  Mat<D> m;
  for (int i = 0; i < D; ++i)
    for (int j = 0; j <= i; ++j) m(i, j) = m(j, i) = s[sym_index(i, j)];
  return m;
}

template <int D>
Mat<D> metric(const SymTensorGrid& gamma, std::size_t p) {
  return Mat<D>::Identity() + perturbation<D>(gamma, p);
}

template <int D>
double smallest_eigenvalue(const Mat<D>& g) {
  if constexpr (D == 2) {
    const double half_tr = 0.5 * (g(0, 0) + g(1, 1));
    const double half_diff = 0.5 * (g(0, 0) - g(1, 1));
    return half_tr - std::hypot(half_diff, g(0, 1));
  } else {
    Eigen::SelfAdjointEigenSolver<Mat<D>> es;
    es.computeDirect(g, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
  }
}

template <int D>
Mat<D> checked_inverse(const Mat<D>& g, std::size_t p) {
  const double lmin = smallest_eigenvalue<D>(g);
  if (!(lmin >= kDegeneracyThreshold) || !g.allFinite()) {
    throw DegenerateMetric("metric degenerate at point " + std::to_string(p) +
                           " (smallest eigenvalue " + std::to_string(lmin) + ")");
  }
  return g.inverse();
}

// Central difference of the metric along each axis: dg[l] = d_l g.
template <int D>
std::array<Mat<D>, D> metric_derivatives(const SymTensorGrid& gamma, std::size_t p) {
  const GridShape& s = gamma.shape();
  std::array<Mat<D>, D> dg;
  for (int l = 0; l < D; ++l) {
    const double inv2h = 1.0 / (2.0 * s.spacing(l));
    dg[l] = (perturbation<D>(gamma, s.shift(p, l, 1)) -
             perturbation<D>(gamma, s.shift(p, l, -1))) *
            inv2h;
  }
  return dg;
}

template <int D>
Gam<D> christoffel_from(const Mat<D>& ginv, const std::array<Mat<D>, D>& dg) {
  // Lowered symbols first: G_lij = (d_i g_jl + d_j g_il - d_l g_ij) / 2.
  std::array<double, D * D * D> low{};
  for (int l = 0; l < D; ++l)
    for (int i = 0; i < D; ++i)
      for (int j = 0; j <= i; ++j) {
        const double v = 0.5 * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        low[(l * D + i) * D + j] = v;
        low[(l * D + j) * D + i] = v;
      }
  Gam<D> gam;
  for (int k = 0; k < D; ++k)
    for (int i = 0; i < D; ++i)
      for (int j = 0; j <= i; ++j) {
        double s = 0.0;
        for (int l = 0; l < D; ++l) s += ginv(k, l) * low[(l * D + i) * D + j];
        gam(k, i, j) = s;
        gam(k, j, i) = s;
      }
  return gam;
}

template <int D>
Gam<D> christoffel_at(const SymTensorGrid& gamma, std::size_t p) {
  const Mat<D> ginv = checked_inverse<D>(metric<D>(gamma, p), p);
  return christoffel_from<D>(ginv, metric_derivatives<D>(gamma, p));
}

// `plus[a]`, `minus[a]`: Christoffels at the neighbours along axis a.
template <int D>
Riem<D> riemann_from(const Gam<D>& c, const std::array<const Gam<D>*, D>& plus,
                     const std::array<const Gam<D>*, D>& minus, const GridShape& s) {
  std::array<Gam<D>, D> dc;
  for (int a = 0; a < D; ++a) {
    const double inv2h = 1.0 / (2.0 * s.spacing(a));
    for (std::size_t q = 0; q < dc[a].v.size(); ++q)
      dc[a].v[q] = (plus[a]->v[q] - minus[a]->v[q]) * inv2h;
  }
  Riem<D> r;
  for (int l = 0; l < D; ++l)
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j)
        for (int k = 0; k < D; ++k) {
          double v = dc[i](l, j, k) - dc[j](l, i, k);
          for (int q = 0; q < D; ++q) v += c(q, j, k) * c(l, i, q) - c(q, i, k) * c(l, j, q);
          r(l, i, j, k) = v;
        }
  return r;
}

template <int D>
double riemann_norm(const Riem<D>& r) {
  double s = 0.0;
  for (double v : r.v) s += v * v;
  return std::sqrt(s);
}

template <int D>
Mat<D> ricci_from(const Riem<D>& r) {
  Mat<D> ric;
  for (int i = 0; i < D; ++i)
    for (int j = 0; j < D; ++j) {
      double s = 0.0;
      for (int q = 0; q < D; ++q) s += r(q, q, i, j);
      ric(i, j) = s;
    }
  return 0.5 * (ric + ric.transpose());
}

template <int D>
Riem<D> riemann_at(const SymTensorGrid& gamma, std::size_t p) {
  const GridShape& s = gamma.shape();
  const Gam<D> c = christoffel_at<D>(gamma, p);
  std::array<Gam<D>, D> gp, gm;
  std::array<const Gam<D>*, D> pp, pm;
  for (int a = 0; a < D; ++a) {
    gp[a] = christoffel_at<D>(gamma, s.shift(p, a, 1));
    gm[a] = christoffel_at<D>(gamma, s.shift(p, a, -1));
    pp[a] = &gp[a];
    pm[a] = &gm[a];
  }
  return riemann_from<D>(c, pp, pm, s);
}

template <int D>
Christoffel to_public(const Gam<D>& g) {
  Christoffel out;
  out.dim = D;
  for (int k = 0; k < D; ++k)
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j) out(k, i, j) = g(k, i, j);
  return out;
}

template <int D>
Riemann to_public(const Riem<D>& r) {
  Riemann out;
  out.dim = D;
  for (int l = 0; l < D; ++l)
    for (int i = 0; i < D; ++i)
      for (int j = 0; j < D; ++j)
        for (int k = 0; k < D; ++k) out(l, i, j, k) = r(l, i, j, k);
  return out;
}

template <int D>
Vec<D> deturck_from(const Mat<D>& ginv, const Gam<D>& c) {
  Vec<D> w;
  for (int k = 0; k < D; ++k) {
    double s = 0.0;
    for (int p = 0; p < D; ++p)
      for (int q = 0; q < D; ++q) s += ginv(p, q) * c(k, p, q);
    w(k) = s;
  }
  return w;
}

// Whole-grid sweep shared by curvature_fields and deturck_rhs. Christoffels
// and the lowered DeTurck field are cached for every point, then each point
// differences its neighbours' caches.
template <int D>
struct GridSweep {
  explicit GridSweep(const MetricGrid& g) : shape(g.shape()) {
    const SymTensorGrid& gamma = g.perturbation();
    const std::size_t n = shape.size();
    gam.resize(n);
    ginv.resize(n);
    w_low.resize(n);
    for (std::size_t p = 0; p < n; ++p) {
      const Mat<D> gp = metric<D>(gamma, p);
      ginv[p] = checked_inverse<D>(gp, p);
      gam[p] = christoffel_from<D>(ginv[p], metric_derivatives<D>(gamma, p));
      w_low[p] = gp * deturck_from<D>(ginv[p], gam[p]);
    }
  }

  Riem<D> riemann(std::size_t p) const {
    std::array<const Gam<D>*, D> pp, pm;
    for (int a = 0; a < D; ++a) {
      pp[a] = &gam[shape.shift(p, a, 1)];
      pm[a] = &gam[shape.shift(p, a, -1)];
    }
    return riemann_from<D>(gam[p], pp, pm, shape);
  }

  GridShape shape;
  std::vector<Gam<D>> gam;
  std::vector<Mat<D>> ginv;
  std::vector<Vec<D>> w_low;
};

template <int D>
CurvatureFields curvature_fields_impl(const MetricGrid& g) {
  const GridSweep<D> sweep(g);
  CurvatureFields out{SymTensorGrid(g.shape()), std::vector<double>(g.shape().size()), 0.0};
  for (std::size_t p = 0; p < g.shape().size(); ++p) {
    const Riem<D> r = sweep.riemann(p);
    out.sup_riemann = std::max(out.sup_riemann, riemann_norm<D>(r));
    const Mat<D> ric = ricci_from<D>(r);
    for (int i = 0; i < D; ++i)
      for (int j = 0; j <= i; ++j) out.ricci(p, i, j) = ric(i, j);
    out.scalar[p] = (sweep.ginv[p].cwiseProduct(ric)).sum();
  }
  return out;
}

template <int D>
DeTurckRhs deturck_rhs_impl(const MetricGrid& g) {
  const GridSweep<D> sweep(g);
  const GridShape& s = g.shape();
  DeTurckRhs out{SymTensorGrid(s), 0.0};
  double* dst = out.rhs.values().data();
  constexpr int nc = sym_components(D);
  for (std::size_t p = 0; p < s.size(); ++p) {
    const Riem<D> r = sweep.riemann(p);
    const double rn = riemann_norm<D>(r);
    // std::max would drop a NaN; keep it so the integrator sees it.
    if (!std::isnan(out.sup_riemann) && !(rn <= out.sup_riemann)) out.sup_riemann = rn;
    const Mat<D> ric = ricci_from<D>(r);
    // dw(i, j) = d_i W_j
    Mat<D> dw;
    for (int i = 0; i < D; ++i) {
      const double inv2h = 1.0 / (2.0 * s.spacing(i));
      dw.row(i) = ((sweep.w_low[s.shift(p, i, 1)] - sweep.w_low[s.shift(p, i, -1)]) * inv2h)
                      .transpose();
    }
    const Gam<D>& c = sweep.gam[p];
    const Vec<D>& w = sweep.w_low[p];
    for (int i = 0; i < D; ++i)
      for (int j = 0; j <= i; ++j) {
        double cw = 0.0;
        for (int k = 0; k < D; ++k) cw += c(k, i, j) * w(k);
        dst[p * nc + sym_index(i, j)] = -2.0 * ric(i, j) + dw(i, j) + dw(j, i) - 2.0 * cw;
      }
  }
  return out;
}

template <typename F2, typename F3>
auto dispatch(int dim, F2&& f2, F3&& f3) {
  if (dim == 2) return f2();
  return f3();
}

}  // namespace

double Riemann::norm() const {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

Christoffel christoffel(const MetricGrid& g, std::size_t point) {
  const auto& gamma = g.perturbation();
  return dispatch(
      g.dim(), [&] { return to_public<2>(christoffel_at<2>(gamma, point)); },
      [&] { return to_public<3>(christoffel_at<3>(gamma, point)); });
}

Riemann riemann(const MetricGrid& g, std::size_t point) {
  const auto& gamma = g.perturbation();
  return dispatch(
      g.dim(), [&] { return to_public<2>(riemann_at<2>(gamma, point)); },
      [&] { return to_public<3>(riemann_at<3>(gamma, point)); });
}

Eigen::MatrixXd ricci(const MetricGrid& g, std::size_t point) {
  const auto& gamma = g.perturbation();
  return dispatch(
      g.dim(),
      [&] { return Eigen::MatrixXd(ricci_from<2>(riemann_at<2>(gamma, point))); },
      [&] { return Eigen::MatrixXd(ricci_from<3>(riemann_at<3>(gamma, point))); });
}

double scalar_curvature(const MetricGrid& g, std::size_t point) {
  const Eigen::MatrixXd ric = ricci(g, point);
  const Eigen::MatrixXd ginv = g.metric_at(point).inverse();
  return ginv.cwiseProduct(ric).sum();
}

Eigen::VectorXd deturck_vector(const MetricGrid& g, std::size_t point) {
  const auto& gamma = g.perturbation();
  return dispatch(
      g.dim(),
      [&] {
        const Mat<2> ginv = checked_inverse<2>(metric<2>(gamma, point), point);
        return Eigen::VectorXd(deturck_from<2>(ginv, christoffel_at<2>(gamma, point)));
      },
      [&] {
        const Mat<3> ginv = checked_inverse<3>(metric<3>(gamma, point), point);
        return Eigen::VectorXd(deturck_from<3>(ginv, christoffel_at<3>(gamma, point)));
      });
}

SymTensorGrid lichnerowicz_apply(const SymTensorGrid& d) {
  const GridShape& s = d.shape();
  const int nc = d.components();
  SymTensorGrid out(s);
  const auto& in = d.values();
  auto& dst = out.values();
  for (std::size_t p = 0; p < s.size(); ++p) {
    for (int a = 0; a < s.dim(); ++a) {
      const double inv_h2 = 1.0 / (s.spacing(a) * s.spacing(a));
      const std::size_t up = s.shift(p, a, 1), dn = s.shift(p, a, -1);
      for (int c = 0; c < nc; ++c) {
        dst[p * nc + c] +=
            (in[up * nc + c] - 2.0 * in[p * nc + c] + in[dn * nc + c]) * inv_h2;
      }
    }
  }
  return out;
}

double inner_product(const SymTensorGrid& a, const SymTensorGrid& b) {
  require(a.shape() == b.shape(), "inner_product: grid mismatch");
  double s = 0.0;
  for (std::size_t p = 0; p < a.shape().size(); ++p)
    for (int i = 0; i < a.dim(); ++i)
      for (int j = 0; j <= i; ++j) s += (i == j ? 1.0 : 2.0) * a(p, i, j) * b(p, i, j);
  return s;
}

CurvatureFields curvature_fields(const MetricGrid& g) {
  return dispatch(
      g.dim(), [&] { return curvature_fields_impl<2>(g); },
      [&] { return curvature_fields_impl<3>(g); });
}

DeTurckRhs deturck_rhs(const MetricGrid& g) {
  return dispatch(
      g.dim(), [&] { return deturck_rhs_impl<2>(g); }, [&] { return deturck_rhs_impl<3>(g); });
}

}  // namespace lneflow::diffgeo
