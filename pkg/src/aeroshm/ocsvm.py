"""One-class support vector machine with an RBF kernel.

Training solves the dual

    min 0.5 a' K a   s.t.   0 <= a_i <= 1/(nu m),  sum(a) = 1

by pairwise coordinate (SMO) updates; nu upper-bounds the training
outlier fraction and lower-bounds the support-vector fraction. The
decision value of a point is sum_i a_i k(x_i, x) - offset, positive
inside the learned high-density region.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from aeroshm import kernels
from aeroshm.errors import ConfigError, NumericalError


def rbf_kernel(x, y, gamma: float) -> float:
    """exp(-gamma * ||x - y||^2) for a single pair."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ConfigError("rbf_kernel arguments must share a dimension")
    if gamma <= 0.0:
        raise ConfigError("gamma must be positive")
    d = x - y
    return float(np.exp(-gamma * np.dot(d, d)))


def rbf_matrix(a: np.ndarray, b: np.ndarray, gamma: float) -> np.ndarray:
    """Pairwise RBF similarities between the rows of a and b."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    sq = (
        np.sum(a**2, axis=1)[:, None]
        + np.sum(b**2, axis=1)[None, :]
        - 2.0 * (a @ b.T)
    )
    return np.exp(-gamma * np.maximum(sq, 0.0))


@dataclass(frozen=True)
class OcsvmModel:
    """Trained one-class SVM: support vectors, dual weights, and offset."""

    support_vectors: np.ndarray
    dual_coefs: np.ndarray
    offset: float
    gamma: float
    nu: float
    train_size: int

    @property
    def n_support(self) -> int:
        return len(self.dual_coefs)


def train_ocsvm(
    points: np.ndarray,
    nu: float,
    gamma: float,
    tol: float = 1e-6,
    max_steps: int | None = None,
) -> OcsvmModel:
    """Fit the one-class SVM on healthy points by SMO to KKT tolerance tol."""
    x = np.atleast_2d(np.asarray(points, dtype=float))
    m = x.shape[0]
    if m < 2:
        raise ConfigError("need at least two training points")
    if not 0.0 < nu < 1.0:
        raise ConfigError(f"nu must be in (0, 1), got {nu}")
    if nu * m < 1.0:
        raise ConfigError(f"nu * m = {nu * m:.3f} < 1; the dual box is infeasible")
    if gamma <= 0.0:
        raise ConfigError("gamma must be positive")

    upper = 1.0 / (nu * m)
    gram = rbf_matrix(x, x, gamma)
    if max_steps is None:
        max_steps = max(20_000, 500 * m)
    alpha, gap, steps = kernels.smo_solve(gram, upper, tol, max_steps)
    if gap > tol:
        raise NumericalError(
            f"SMO did not converge in {steps} steps; final KKT violation {gap:.3e}"
        )

    grad = gram @ alpha
    eps = 1e-9 * upper
    free = (alpha > eps) & (alpha < upper - eps)
    if np.any(free):
        offset = float(grad[free].mean())
    else:
        at_upper = grad[alpha >= upper - eps]
        at_zero = grad[alpha <= eps]
        hi = at_upper.max() if len(at_upper) else grad.min()
        lo = at_zero.min() if len(at_zero) else grad.max()
        offset = 0.5 * float(hi + lo)

    keep = alpha > eps
    return OcsvmModel(
        support_vectors=x[keep].copy(),
        dual_coefs=alpha[keep].copy(),
        offset=offset,
        gamma=gamma,
        nu=nu,
        train_size=m,
    )


def score(model: OcsvmModel, points: np.ndarray):
    """Signed decision values; positive means inside the healthy region."""
    pts = np.asarray(points, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    if pts.shape[1] != model.support_vectors.shape[1]:
        raise ConfigError(
            f"point dimension {pts.shape[1]} does not match model dimension "
            f"{model.support_vectors.shape[1]}"
        )
    values = rbf_matrix(pts, model.support_vectors, model.gamma) @ model.dual_coefs - model.offset
    return float(values[0]) if single else values


def predict_labels(model: OcsvmModel, points: np.ndarray) -> list[str]:
    """Map decision values onto health labels (damage is the outlier side)."""
    values = np.atleast_1d(score(model, points))
    return ["healthy" if v >= 0.0 else "damaged" for v in values]
