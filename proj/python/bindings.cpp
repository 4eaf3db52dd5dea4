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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "lneflow/error.hpp"
#include "lneflow/lne_geometry.hpp"
#include "lneflow/lne_optimizer.hpp"
#include "lneflow/ricci_flow.hpp"
#include "lneflow/strong_approx.hpp"

namespace py = pybind11;
namespace geo = lneflow::geometry;

namespace {

geo::CoordPoint point(const Eigen::VectorXd& xi, double tau) { return geo::CoordPoint(xi, tau); }

py::dict run_fourier_flow(int points, double epsilon, int wavenumber, double t_max, double tol) {
  lneflow::flow::FlowConfig cfg;
  cfg.points = points;
  cfg.epsilon = epsilon;
  cfg.profile.wavenumber = wavenumber;
  cfg.t_max = t_max;
  cfg.tol = tol;
  auto state = lneflow::flow::init_perturbation(cfg);
  const auto result = lneflow::flow::run(state, cfg);
  std::vector<double> t, l2, linf, sup_rm;
  for (const auto& r : state.history()) {
    t.push_back(r.t);
    l2.push_back(r.l2);
    linf.push_back(r.linf);
    sup_rm.push_back(r.sup_rm);
  }
  py::dict out;
  out["verdict"] = lneflow::flow::to_string(result.verdict);
  out["t"] = t;
  out["l2"] = l2;
  out["linf"] = linf;
  out["sup_rm"] = sup_rm;
  out["dt"] = state.dt();
  return out;
}

py::dict train_toy(std::uint64_t seed, int steps, double tau, double learning_rate,
                   const std::string& dataset) {
  lneflow::optim::TrainConfig cfg;
  cfg.seed = seed;
  cfg.steps = steps;
  cfg.tau = tau;
  cfg.learning_rate = learning_rate;
  cfg.dataset = lneflow::data::dataset_from_string(dataset);
  const auto r = lneflow::optim::train(cfg);
  std::vector<double> loss, acc, radius;
  for (const auto& row : r.rows) {
    loss.push_back(row.train_loss);
    acc.push_back(row.test_acc);
    radius.push_back(row.radius);
  }
  py::dict out;
  out["train_loss"] = loss;
  out["test_acc"] = acc;
  out["radius"] = radius;
  out["final_test_acc"] = r.final_test_acc;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "LNE geometry, Ricci-DeTurck flow and natural-gradient training";

  py::register_exception<lneflow::ContractViolation>(m, "ContractViolation", PyExc_ValueError);
  py::register_exception<lneflow::NotPositiveDefinite>(m, "NotPositiveDefinite", PyExc_ArithmeticError);
  py::register_exception<lneflow::DegenerateMetric>(m, "DegenerateMetric", PyExc_ArithmeticError);

  m.def("potential", [](const Eigen::VectorXd& xi, double tau) { return geo::potential(point(xi, tau)); },
        py::arg("xi"), py::arg("tau") = geo::kDefaultTau);
  m.def("divergence",
        [](const Eigen::VectorXd& xi_prime, const Eigen::VectorXd& xi, double tau) {
          return geo::divergence(point(xi_prime, tau), point(xi, tau));
        },
        py::arg("xi_prime"), py::arg("xi"), py::arg("tau") = geo::kDefaultTau);
  m.def("lne_metric",
        [](const Eigen::VectorXd& xi, double tau) { return geo::lne_metric(point(xi, tau)).dense(); },
        py::arg("xi"), py::arg("tau") = geo::kDefaultTau,
        "Dense I - u u^T with u = tanh(tau xi).");
  m.def("natural_grad_exact",
        [](const Eigen::VectorXd& xi, const Eigen::VectorXd& grad, double tau, double eps_guard) {
          return geo::natural_grad_exact(point(xi, tau), grad, geo::DomainGuard{eps_guard});
        },
        py::arg("xi"), py::arg("grad"), py::arg("tau") = geo::kDefaultTau,
        py::arg("eps_guard") = 1e-6);
  m.def("natural_grad_weak",
        [](const Eigen::VectorXd& xi, const Eigen::VectorXd& grad, double tau) {
          return geo::natural_grad_weak(point(xi, tau), grad);
        },
        py::arg("xi"), py::arg("grad"), py::arg("tau") = geo::kDefaultTau);
  m.def("is_strictly_diag_dominant",
        [](const Eigen::VectorXd& u) { return geo::is_strictly_diag_dominant(geo::LneMetric(u)); },
        py::arg("u"));
  m.def("ball_radius",
        [](const Eigen::VectorXd& xi, const Eigen::VectorXd& dxi, double tau) {
          return geo::ball_radius(geo::lne_metric(point(xi, tau)), dxi);
        },
        py::arg("xi"), py::arg("dxi"), py::arg("tau") = geo::kDefaultTau);
  m.def("hessian_fd",
        [](const Eigen::VectorXd& xi, double tau, double step) {
          return geo::hessian_fd(point(xi, tau), step);
        },
        py::arg("xi"), py::arg("tau") = geo::kDefaultTau, py::arg("step") = 1e-4);

  m.def("inverse_loss", &lneflow::strong::inverse_loss, py::arg("g"), py::arg("g_tilde"));
  m.def("decompose",
        [](const Eigen::MatrixXd& g) {
          const auto e = lneflow::strong::decompose(g);
          return py::make_tuple(e.lower, e.diag);
        },
        py::arg("matrix"), "Returns (P, A): strict lower triangle and diagonal.");
  m.def("combine",
        [](const Eigen::VectorXd& lower, const Eigen::VectorXd& diag) {
          return lneflow::strong::combine({static_cast<int>(diag.size()), lower, diag});
        },
        py::arg("lower"), py::arg("diag"));

  m.def("run_fourier_flow", &run_fourier_flow, py::arg("points") = 32, py::arg("epsilon") = 1e-3,
        py::arg("wavenumber") = 1, py::arg("t_max") = 50.0, py::arg("tol") = 1e-8,
        "Ricci-DeTurck flow of a 2D Fourier-mode perturbation; returns the norm history.");
  m.def("train_toy", &train_toy, py::arg("seed") = 0, py::arg("steps") = 200,
        py::arg("tau") = geo::kDefaultTau, py::arg("learning_rate") = 0.1,
        py::arg("dataset") = "blobs");

  m.attr("__version__") = "0.1.0";
}
