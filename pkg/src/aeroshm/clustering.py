"""Seeded k-means over event-space points and per-cluster one-class models.

Event-space points form sensor-driven clusters once the inputs are large
enough; a single global boundary straddles the gaps between them, so each
cluster gets its own one-class SVM. Each cluster is attributed to the
sensor whose per-event feature energy correlates most with membership.
New points route to the nearest centroid's model by default; majority
voting and distance-weighted averaging are available as alternatives.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from aeroshm.errors import ConfigError, NumericalError
from aeroshm.ocsvm import OcsvmModel, score, train_ocsvm


def _kmeans_plus_plus(points: np.ndarray, k: int, rng) -> np.ndarray:
    n = points.shape[0]
    centers = np.empty((k, points.shape[1]))
    centers[0] = points[rng.integers(n)]
    dist2 = np.sum((points - centers[0]) ** 2, axis=1)
    for c in range(1, k):
        total = dist2.sum()
        if total <= 0.0:
            centers[c:] = points[rng.integers(n, size=k - c)]
            break
        probs = dist2 / total
        centers[c] = points[rng.choice(n, p=probs)]
        dist2 = np.minimum(dist2, np.sum((points - centers[c]) ** 2, axis=1))
    return centers


def _lloyd(points: np.ndarray, centers: np.ndarray, max_iter: int = 100):
    labels = None
    for _ in range(max_iter):
        dists = np.sum((points[:, None, :] - centers[None, :, :]) ** 2, axis=2)
        new_labels = np.argmin(dists, axis=1)
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for c in range(centers.shape[0]):
            members = points[labels == c]
            if len(members):
                centers[c] = members.mean(axis=0)
    dists = np.sum((points[:, None, :] - centers[None, :, :]) ** 2, axis=2)
    labels = np.argmin(dists, axis=1)
    inertia = float(dists[np.arange(len(points)), labels].sum())
    return labels, centers, inertia


def kmeans(points: np.ndarray, k: int, seed: int, n_restarts: int = 50):
    """Best-of-n_restarts seeded k-means with k-means++ initialisation."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if k < 1:
        raise ConfigError("k must be >= 1")
    if len(pts) < k:
        raise ConfigError(f"cannot split {len(pts)} points into {k} clusters")
    best = None
    for ss in np.random.SeedSequence(seed).spawn(n_restarts):
        rng = np.random.default_rng(ss)
        labels, centers, inertia = _lloyd(pts, _kmeans_plus_plus(pts, k, rng))
        if best is None or inertia < best[2]:
            best = (labels, centers, inertia)
    return best


@dataclass(frozen=True)
class ClusterSet:
    """Cluster assignments, centroids, per-cluster models, and attribution."""

    labels: np.ndarray
    centroids: np.ndarray
    models: dict = field(default_factory=dict)
    attribution: dict = field(default_factory=dict)
    routing: str = "nearest"

    @property
    def k(self) -> int:
        return self.centroids.shape[0]

    def assign(self, points: np.ndarray) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        dists = np.sum((pts[:, None, :] - self.centroids[None, :, :]) ** 2, axis=2)
        return np.argmin(dists, axis=1)

    def score(self, points: np.ndarray, routing: str | None = None) -> np.ndarray:
        """Decision values for new points under the configured routing rule."""
        routing = routing or self.routing
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        per_cluster = np.column_stack([score(self.models[c], pts) for c in range(self.k)])
        if routing == "nearest":
            owners = self.assign(pts)
            return per_cluster[np.arange(len(pts)), owners]
        if routing == "vote":
            votes = (per_cluster >= 0.0).sum(axis=1)
            magnitude = np.abs(per_cluster).max(axis=1)
            return np.where(votes * 2 > self.k, magnitude, -magnitude)
        if routing == "weighted":
            dists = np.sqrt(
                np.sum((pts[:, None, :] - self.centroids[None, :, :]) ** 2, axis=2)
            )
            w = 1.0 / (dists + 1e-12)
            w = w / w.sum(axis=1, keepdims=True)
            return (w * per_cluster).sum(axis=1)
        raise ConfigError(f"unknown routing {routing!r}")


def attribute_clusters(labels: np.ndarray, sensor_energy: np.ndarray, sensor_ids) -> dict:
    """Attribute each cluster to the sensor most correlated with membership."""
    out = {}
    k = int(labels.max()) + 1
    for c in range(k):
        member = (labels == c).astype(float)
        if member.std() == 0.0:
            out[c] = None
            continue
        best, best_corr = None, -np.inf
        for j, sid in enumerate(sensor_ids):
            energy = sensor_energy[:, j]
            if energy.std() == 0.0:
                continue
            corr = float(np.corrcoef(member, energy)[0, 1])
            if corr > best_corr:
                best, best_corr = sid, corr
        out[c] = best
    return out


def cluster_split(
    points: np.ndarray,
    k: int,
    seed: int,
    nu: float,
    gamma: float,
    sensor_energy: np.ndarray | None = None,
    sensor_ids=None,
    routing: str = "nearest",
    retry_cap: int = 5,
) -> ClusterSet:
    """Partition healthy points and train one boundary per cluster.

    Empty clusters trigger a re-run with a bumped seed; after retry_cap
    attempts the split is abandoned. Clusters smaller than 1/nu get their
    nu floored at 1/m to keep the dual box feasible.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    labels = centroids = None
    for attempt in range(retry_cap):
        labels, centroids, _ = kmeans(pts, k, seed + attempt)
        if len(np.unique(labels)) == k:
            break
    else:
        raise NumericalError(f"k-means produced an empty cluster {retry_cap} times")

    models = {}
    for c in range(k):
        members = pts[labels == c]
        if len(members) < 2:
            raise NumericalError(f"cluster {c} has fewer than two points")
        nu_eff = max(nu, 1.0 / len(members))
        models[c] = train_ocsvm(members, nu_eff, gamma)

    attribution = {}
    if sensor_energy is not None:
        ids = sensor_ids if sensor_ids is not None else list(range(sensor_energy.shape[1]))
        attribution = attribute_clusters(labels, np.asarray(sensor_energy, dtype=float), ids)
    return ClusterSet(
        labels=labels,
        centroids=centroids,
        models=models,
        attribution=attribution,
        routing=routing,
    )
