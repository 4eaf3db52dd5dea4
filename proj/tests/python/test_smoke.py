# Copyright 2026 The lneflow Authors. All Rights Reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math

import numpy as np
import pytest

import lneflow


def test_potential_and_divergence():
    assert lneflow.potential(np.array([0.5]), tau=1.0) == pytest.approx(math.log(math.cosh(0.5)), abs=1e-15)
    rng = np.random.default_rng(0)
    for _ in range(100):
        a, b = rng.uniform(-3, 3, 4), rng.uniform(-3, 3, 4)
        assert lneflow.divergence(a, b, tau=0.5) >= 0.0
    assert lneflow.divergence(a, a) == 0.0


def test_natural_gradients_against_numpy():
    rng = np.random.default_rng(1)
    xi = rng.uniform(-3, 3, 6)
    grad = rng.normal(size=6)
    g = lneflow.lne_metric(xi, tau=0.1)
    u = np.tanh(0.1 * xi)
    np.testing.assert_allclose(g, np.eye(6) - np.outer(u, u), atol=1e-15)
    np.testing.assert_allclose(lneflow.natural_grad_exact(xi, grad, tau=0.1), np.linalg.solve(g, grad), rtol=1e-12)
    np.testing.assert_allclose(lneflow.natural_grad_weak(xi, grad, tau=0.1), grad + u * (u @ grad), rtol=1e-14)
    with pytest.raises(lneflow.NotPositiveDefinite):
        lneflow.natural_grad_exact(np.full(2, 5.0), np.ones(2), tau=1.0)


def test_ball_radius_and_diag_dominance():
    assert lneflow.ball_radius(np.zeros(3), np.array([0.0, 2.0, 0.0])) == pytest.approx(2.0)
    assert lneflow.is_strictly_diag_dominant(np.array([0.1, 0.1]))
    assert not lneflow.is_strictly_diag_dominant(np.array([0.9, 0.9]))
    with pytest.raises(lneflow.ContractViolation):
        lneflow.ball_radius(np.zeros(2), np.zeros(2))


def test_strong_approximation_helpers():
    m = np.array([[1.0, 2.0, 4.0], [2.0, 3.0, 5.0], [4.0, 5.0, 6.0]])
    lower, diag = lneflow.decompose(m)
    np.testing.assert_array_equal(lower, [2.0, 4.0, 5.0])
    np.testing.assert_array_equal(lneflow.combine(lower, diag), m)
    assert lneflow.inverse_loss(np.eye(3), 2 * np.eye(3)) == pytest.approx(3.0)


def test_fourier_flow_decays():
    out = lneflow.run_fourier_flow(points=16, epsilon=1e-3, tol=1e-6)
    assert out["verdict"] == "Converged"
    l2 = np.array(out["l2"])
    assert np.all(np.diff(l2[5:]) <= 0.0)


def test_train_toy_runs():
    out = lneflow.train_toy(seed=1, steps=50)
    assert out["final_test_acc"] >= 0.9
    assert all(0.0 <= r <= 1.0 for r in out["radius"])
