"""One-class SVM against a dense QP oracle and the nu-property bounds."""

import numpy as np
import pytest

from aeroshm.errors import ConfigError, NumericalError
from aeroshm.ocsvm import OcsvmModel, predict_labels, rbf_kernel, rbf_matrix, score, train_ocsvm


def qp_oracle(points, nu, gamma):
    """Interior-point solution of the one-class dual via cvxopt."""
    from cvxopt import matrix, solvers

    solvers.options["show_progress"] = False
    solvers.options["abstol"] = 1e-10
    solvers.options["reltol"] = 1e-10
    m = len(points)
    upper = 1.0 / (nu * m)
    K = rbf_matrix(points, points, gamma)
    P = matrix(K)
    q = matrix(np.zeros(m))
    G = matrix(np.vstack([-np.eye(m), np.eye(m)]))
    h = matrix(np.concatenate([np.zeros(m), np.full(m, upper)]))
    A = matrix(np.ones((1, m)))
    b = matrix(np.ones(1))
    sol = solvers.qp(P, q, G, h, A, b)
    alpha = np.asarray(sol["x"]).ravel()
    grad = K @ alpha
    free = (alpha > 1e-7 * upper) & (alpha < upper * (1 - 1e-7))
    rho = grad[free].mean() if np.any(free) else np.median(grad)
    return alpha, rho


def test_rbf_kernel_values():
    assert rbf_kernel([1.0, 2.0], [1.0, 2.0], 0.7) == 1.0
    x = np.array([0.0, 0.0])
    y = np.array([1.0, 1.0])  # squared distance 2
    assert rbf_kernel(x, y, 0.5) == pytest.approx(np.exp(-1.0), rel=1e-12)


def test_rbf_kernel_symmetric_on_random_pairs():
    rng = np.random.default_rng(0)
    for _ in range(20):
        x, y = rng.standard_normal((2, 4))
        g = rng.uniform(0.1, 3.0)
        assert rbf_kernel(x, y, g) == pytest.approx(rbf_kernel(y, x, g), rel=0, abs=0)


def test_rbf_kernel_validation():
    with pytest.raises(ConfigError):
        rbf_kernel([1.0], [1.0, 2.0], 1.0)
    with pytest.raises(ConfigError):
        rbf_kernel([1.0], [2.0], 0.0)


# Free support vectors score 0 at the exact optimum; at KKT tolerance 1e-6
# they land anywhere in (-1e-6, 1e-6), so margin errors are counted strictly
# beyond the solver resolution.
MARGIN = -1e-5


def test_nu_bounds_training_outliers():
    rng = np.random.default_rng(1)
    pts = rng.standard_normal((100, 2))
    model = train_ocsvm(pts, nu=0.05, gamma=0.5)
    negative = np.sum(score(model, pts) < MARGIN)
    assert negative <= 5


def test_nu_property_on_random_cases():
    rng = np.random.default_rng(2)
    for _ in range(25):
        m = int(rng.integers(10, 80))
        nu = float(rng.uniform(0.05, 0.6))
        if nu * m < 1.0:
            continue
        pts = rng.standard_normal((m, int(rng.integers(1, 4))))
        model = train_ocsvm(pts, nu=nu, gamma=float(rng.uniform(0.2, 2.0)))
        margin_errors = np.sum(score(model, pts) < MARGIN)
        assert margin_errors <= nu * m + 1e-9
        assert model.n_support >= nu * m - 1e-9


def test_duplicate_points_all_score_non_negative():
    pts = np.tile([[2.0, -1.0]], (12, 1))
    model = train_ocsvm(pts, nu=0.25, gamma=1.0)
    assert np.all(score(model, pts) >= -1e-12)


def test_alpha_offset_and_scores_match_qp_oracle():
    rng = np.random.default_rng(3)
    pts = rng.standard_normal((20, 2))
    nu, gamma = 0.2, 0.8
    model = train_ocsvm(pts, nu=nu, gamma=gamma, tol=1e-8)
    alpha_oracle, rho_oracle = qp_oracle(pts, nu, gamma)

    alpha_full = np.zeros(20)
    # recover dense alpha from the stored support vectors
    sv_idx = [np.argmin(np.sum((pts - sv) ** 2, axis=1)) for sv in model.support_vectors]
    alpha_full[sv_idx] = model.dual_coefs
    np.testing.assert_allclose(alpha_full, alpha_oracle, atol=1e-5)
    assert model.offset == pytest.approx(rho_oracle, abs=1e-5)

    probes = rng.standard_normal((100, 2))
    oracle_scores = rbf_matrix(probes, pts, gamma) @ alpha_oracle - rho_oracle
    np.testing.assert_allclose(score(model, probes), oracle_scores, atol=1e-5)


def test_dual_feasibility_after_training():
    rng = np.random.default_rng(4)
    pts = rng.standard_normal((40, 3))
    model = train_ocsvm(pts, nu=0.15, gamma=0.6)
    upper = 1.0 / (0.15 * 40)
    assert np.all(model.dual_coefs >= 0.0)
    assert np.all(model.dual_coefs <= upper + 1e-12)
    assert abs(model.dual_coefs.sum() - 1.0) <= 1e-8


def test_scores_invariant_under_training_permutation():
    rng = np.random.default_rng(5)
    pts = rng.standard_normal((50, 2))
    probes = rng.standard_normal((100, 2))
    model_a = train_ocsvm(pts, nu=0.1, gamma=1.1)
    model_b = train_ocsvm(pts[rng.permutation(50)], nu=0.1, gamma=1.1)
    np.testing.assert_allclose(score(model_a, probes), score(model_b, probes), atol=1e-5)


def test_cluster_centre_positive_far_point_negative():
    rng = np.random.default_rng(6)
    pts = rng.standard_normal((60, 2)) * 0.3 + [1.0, -2.0]
    model = train_ocsvm(pts, nu=0.1, gamma=1.0)
    assert score(model, np.array([1.0, -2.0])) > 0.0
    radius = np.abs(pts).max()
    assert score(model, np.array([100.0 * radius, 100.0 * radius])) < 0.0
    assert predict_labels(model, [[1.0, -2.0], [100.0 * radius, 100.0 * radius]]) == [
        "healthy",
        "damaged",
    ]


def test_nonconvergence_reports_kkt_violation():
    rng = np.random.default_rng(7)
    pts = rng.standard_normal((30, 2))
    with pytest.raises(NumericalError, match="KKT"):
        train_ocsvm(pts, nu=0.2, gamma=0.5, max_steps=1)


def test_training_input_validation():
    pts = np.zeros((5, 2))
    with pytest.raises(ConfigError):
        train_ocsvm(pts, nu=1.5, gamma=1.0)
    with pytest.raises(ConfigError):
        train_ocsvm(pts, nu=0.1, gamma=1.0)  # nu*m < 1
    with pytest.raises(ConfigError):
        train_ocsvm(pts[:1], nu=0.9, gamma=1.0)


def test_score_dimension_mismatch_rejected():
    rng = np.random.default_rng(8)
    model = train_ocsvm(rng.standard_normal((10, 2)), nu=0.3, gamma=1.0)
    with pytest.raises(ConfigError):
        score(model, np.ones(3))
