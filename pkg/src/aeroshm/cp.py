"""CP tensor decomposition by alternating least squares, plus the
incremental projection of new frontal slices onto a trained factor pair.

Unfolding follows the convention that makes the ALS identities hold for an
exact CP tensor:

    unfold(X, 1) = A @ khatri_rao(C, B).T
    unfold(X, 2) = B @ khatri_rao(C, A).T
    unfold(X, 3) = C @ khatri_rao(B, A).T

Each ALS sweep solves the three linear subproblems through the Gram-matrix
normal equations (Hadamard product identity), renormalises factor columns
into the weight vector, and records the relative reconstruction error.
New events never re-run the decomposition: their mode-3 rows come from the
least-squares projection against the fixed khatri_rao(B, A).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from aeroshm.errors import ConfigError, NumericalError


def khatri_rao(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Column-wise Kronecker product: column k is a_k (x) b_k."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[1]:
        raise ConfigError("khatri_rao needs two matrices with equal column counts")
    i, r = a.shape
    j = b.shape[0]
    return (a[:, None, :] * b[None, :, :]).reshape(i * j, r)


def unfold(tensor: np.ndarray, mode: int) -> np.ndarray:
    """Mode-n unfolding (modes are 1-based)."""
    x = np.asarray(tensor)
    if x.ndim != 3:
        raise ConfigError("unfold expects a three-way tensor")
    if mode not in (1, 2, 3):
        raise ConfigError(f"mode must be 1, 2, or 3, got {mode}")
    return np.reshape(np.moveaxis(x, mode - 1, 0), (x.shape[mode - 1], -1), order="F")


def refold(matrix: np.ndarray, mode: int, shape: tuple[int, int, int]) -> np.ndarray:
    """Inverse of unfold for the given full tensor shape."""
    if mode not in (1, 2, 3):
        raise ConfigError(f"mode must be 1, 2, or 3, got {mode}")
    rest = [s for i, s in enumerate(shape) if i != mode - 1]
    stacked = np.reshape(np.asarray(matrix), (shape[mode - 1], *rest), order="F")
    return np.moveaxis(stacked, 0, mode - 1)


@dataclass(frozen=True)
class CPFactors:
    """Normalised factor matrices with weights and the ALS fit history.

    Columns of a, b, c have unit Euclidean norm; weights are non-negative
    and sorted descending; fit_history holds the relative reconstruction
    error after each sweep (non-increasing by the ALS construction).
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    weights: np.ndarray
    fit_history: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def rank(self) -> int:
        return len(self.weights)

    def reconstruct(self) -> np.ndarray:
        return np.einsum("r,ir,jr,kr->ijk", self.weights, self.a, self.b, self.c)

    def frontal_slice(self, k: int) -> np.ndarray:
        """Slice k via the diagonal-core identity A diag(w * c_k) B^T."""
        return self.a @ np.diag(self.weights * self.c[k]) @ self.b.T


def _normalise(factors):
    """Pull column norms out of each factor into the weight vector."""
    weights = np.ones(factors[0].shape[1])
    out = []
    for f in factors:
        norms = np.linalg.norm(f, axis=0)
        safe = np.where(norms > 0.0, norms, 1.0)
        out.append(f / safe)
        weights = weights * norms
    return out, weights


def _canonicalise(a, b, c, weights):
    """Sort by descending weight; make each a-column's first nonzero positive."""
    order = np.argsort(-weights)
    a, b, c, weights = a[:, order], b[:, order], c[:, order], weights[order]
    for r in range(a.shape[1]):
        nz = np.nonzero(a[:, r])[0]
        if len(nz) and a[nz[0], r] < 0.0:
            a[:, r] = -a[:, r]
            b[:, r] = -b[:, r]
    return a, b, c, weights


def _solve_normal(gram: np.ndarray, rhs: np.ndarray, ridge: float) -> np.ndarray:
    """Solve factor @ gram = rhs for factor, with a ridge fallback."""
    try:
        cond = np.linalg.cond(gram)
    except np.linalg.LinAlgError:
        cond = np.inf
    if not np.isfinite(cond) or cond > 1e12:
        warnings.warn(
            f"rank-deficient ALS normal equations (cond={cond:.2e}); adding ridge {ridge:g}",
            stacklevel=3,
        )
        gram = gram + ridge * np.eye(gram.shape[0])
    return np.linalg.solve(gram.T, rhs.T).T


def cp_als(
    tensor: np.ndarray,
    rank: int,
    tol: float = 1e-8,
    max_iter: int = 500,
    seed: int | None = None,
    n_restarts: int = 5,
    ridge: float = 1e-12,
) -> CPFactors:
    """Rank-R CP decomposition by alternating least squares.

    Runs n_restarts seeded random initialisations and keeps the best
    final fit. Stops a sweep loop when the relative fit change drops
    below tol or max_iter is reached.
    """
    x = np.asarray(tensor, dtype=float)
    if x.ndim != 3:
        raise ConfigError("cp_als expects a three-way tensor")
    if not np.all(np.isfinite(x)):
        raise ConfigError("tensor contains non-finite entries")
    if rank < 1:
        raise ConfigError("rank must be >= 1")

    x1, x2, x3 = unfold(x, 1), unfold(x, 2), unfold(x, 3)
    norm_x = np.linalg.norm(x)
    if norm_x == 0.0:
        zero = np.zeros
        i, j, k = x.shape
        return CPFactors(
            a=zero((i, rank)), b=zero((j, rank)), c=zero((k, rank)),
            weights=zero(rank), fit_history=np.array([0.0]), meta={"rank": rank},
        )

    seeds = np.random.SeedSequence(seed).spawn(n_restarts)
    best = None
    for restart, ss in enumerate(seeds):
        rng = np.random.default_rng(ss)
        a = rng.uniform(size=(x.shape[0], rank))
        b = rng.uniform(size=(x.shape[1], rank))
        c = rng.uniform(size=(x.shape[2], rank))
        history = []
        for _ in range(max_iter):
            a = _solve_normal((c.T @ c) * (b.T @ b), x1 @ khatri_rao(c, b), ridge)
            b = _solve_normal((c.T @ c) * (a.T @ a), x2 @ khatri_rao(c, a), ridge)
            c = _solve_normal((b.T @ b) * (a.T @ a), x3 @ khatri_rao(b, a), ridge)
            (a, b, c), weights = _normalise([a, b, c])
            recon = np.einsum("r,ir,jr,kr->ijk", weights, a, b, c)
            history.append(float(np.linalg.norm(x - recon) / norm_x))
            if len(history) > 1 and abs(history[-2] - history[-1]) < tol:
                break
        a, b, c, weights = _canonicalise(a, b, c, weights)
        candidate = CPFactors(
            a=a, b=b, c=c, weights=weights,
            fit_history=np.asarray(history),
            meta={"rank": rank, "restart": restart, "final_error": history[-1]},
        )
        if best is None or history[-1] < best.fit_history[-1]:
            best = candidate
    return best


def project_new(
    slices: np.ndarray,
    a: np.ndarray,
    b: np.ndarray,
    cond_threshold: float = 1e12,
) -> np.ndarray:
    """Project new frontal slices onto the row space of the trained factors.

    Solves min_z || vec(slice) - khatri_rao(b, a) z || per slice, the
    least-squares analogue of appending rows to the mode-3 factor without
    re-decomposing. Returns (n_slices, R).
    """
    x = np.asarray(slices, dtype=float)
    single = x.ndim == 2
    if single:
        x = x[None]
    if x.shape[1:] != (a.shape[0], b.shape[0]):
        raise ConfigError(
            f"slice shape {x.shape[1:]} does not match factors ({a.shape[0]}, {b.shape[0]})"
        )
    kr = khatri_rao(b, a)
    cond = np.linalg.cond(kr)
    if not np.isfinite(cond) or cond > cond_threshold:
        raise NumericalError(f"khatri_rao(b, a) is ill-conditioned (cond={cond:.3e})")
    x3 = x.reshape(x.shape[0], -1, order="F")
    rows, *_ = np.linalg.lstsq(kr, x3.T, rcond=None)
    rows = rows.T
    return rows[0] if single else rows


def to_event_space(factors: CPFactors, slices: np.ndarray) -> np.ndarray:
    """Map new slices into the same space as the training rows of c.

    project_new solves against unit-norm factors, so its rows carry the
    weight scaling; dividing by the weights lands them next to the
    training c rows.
    """
    rows = np.atleast_2d(project_new(slices, factors.a, factors.b))
    safe = np.where(factors.weights > 0.0, factors.weights, 1.0)
    return rows / safe
