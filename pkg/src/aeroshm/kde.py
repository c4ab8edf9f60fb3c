"""Gaussian kernel density estimation and artificial-negative generation.

The estimator is the standard equi-weighted isotropic Gaussian mixture

    p(x) = (1/N) sum_n (2 pi h^2)^(-D/2) exp(-||x - x_n||^2 / (2 h^2)).

Artificial negatives are drawn by rejection sampling: uniform candidates
from the (margin-expanded) data bounding box are kept where the estimated
density falls below a low quantile of the training densities, which places
them in the sparse shell around and between the healthy clusters.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from aeroshm.errors import ConfigError, NumericalError


def scott_bandwidth(points: np.ndarray) -> float:
    """Scott's rule with a pooled standard deviation across dimensions."""
    pts = np.atleast_2d(points)
    n, d = pts.shape
    pooled = float(np.sqrt(pts.var(axis=0, ddof=1).mean())) if n > 1 else 1.0
    if pooled == 0.0:
        pooled = 1.0
    return pooled * n ** (-1.0 / (d + 4))


@dataclass(frozen=True)
class KdeModel:
    """Reference points plus an isotropic Gaussian bandwidth."""

    points: np.ndarray
    bandwidth: float

    def __post_init__(self):
        object.__setattr__(self, "points", np.atleast_2d(np.asarray(self.points, dtype=float)))
        if self.bandwidth <= 0.0:
            raise ConfigError("bandwidth must be positive")

    @property
    def dim(self) -> int:
        return self.points.shape[1]


def fit_kde(points: np.ndarray, bandwidth: float | None = None) -> KdeModel:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    return KdeModel(points=pts, bandwidth=bandwidth if bandwidth is not None else scott_bandwidth(pts))


def kde_density(model: KdeModel, x: np.ndarray):
    """Estimated density at one point (float) or many points (array)."""
    pts = np.asarray(x, dtype=float)
    single = pts.ndim <= 1
    pts = np.atleast_2d(pts)
    if pts.shape[1] != model.dim:
        raise ConfigError("query dimension does not match the KDE")
    h2 = model.bandwidth**2
    norm = (2.0 * np.pi * h2) ** (-model.dim / 2.0)
    sq = (
        np.sum(pts**2, axis=1)[:, None]
        + np.sum(model.points**2, axis=1)[None, :]
        - 2.0 * pts @ model.points.T
    )
    dens = norm * np.exp(-np.maximum(sq, 0.0) / (2.0 * h2)).mean(axis=1)
    return float(dens[0]) if single else dens


def bounding_box(model: KdeModel, margin: float) -> tuple[np.ndarray, np.ndarray]:
    """Data bounding box expanded by margin * range per dimension."""
    lo = model.points.min(axis=0)
    hi = model.points.max(axis=0)
    pad = margin * np.maximum(hi - lo, 1e-12)
    return lo - pad, hi + pad


def generate_negatives(
    model: KdeModel,
    n: int,
    density_quantile: float = 0.1,
    box_margin: float = 0.25,
    seed: int = 0,
    min_probe: int = 50_000,
) -> np.ndarray:
    """Rejection-sample n low-density points around the training data.

    Candidates are uniform over the expanded bounding box; a candidate is
    accepted while its density sits below the density_quantile of the
    training-point densities. Raises when the acceptance rate stays under
    0.1% after min_probe candidates (bandwidth or threshold misconfigured).
    """
    if n < 1:
        raise ConfigError("n must be >= 1")
    rng = np.random.default_rng(seed)
    threshold = float(np.quantile(kde_density(model, model.points), density_quantile))
    lo, hi = bounding_box(model, box_margin)

    accepted = []
    drawn = 0
    kept = 0
    batch = max(4 * n, 1024)
    while kept < n:
        cand = rng.uniform(lo, hi, size=(batch, model.dim))
        dens = kde_density(model, cand)
        good = cand[dens < threshold]
        accepted.append(good)
        drawn += batch
        kept += len(good)
        if drawn >= min_probe and kept < 0.001 * drawn:
            raise NumericalError(
                f"negative-sample acceptance rate {kept / drawn:.2e} below 0.1%; "
                "raise density_quantile or box_margin"
            )
    return np.concatenate(accepted)[:n]
