"""k-means splitting, sensor attribution, and per-cluster model routing."""

import numpy as np
import pytest

from aeroshm.clustering import ClusterSet, attribute_clusters, cluster_split, kmeans
from aeroshm.errors import ConfigError, NumericalError
from aeroshm.ocsvm import score


def two_blobs(n=60, separation=10.0, seed=0):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, 2)) * 0.5
    b = rng.standard_normal((n, 2)) * 0.5 + [separation, 0.0]
    return np.vstack([a, b]), np.concatenate([np.zeros(n, dtype=int), np.ones(n, dtype=int)])


def test_single_cluster_holds_everything():
    pts, _ = two_blobs()
    cs = cluster_split(pts, k=1, seed=0, nu=0.1, gamma=0.5)
    assert cs.k == 1
    assert np.all(cs.labels == 0)


def test_two_blobs_split_exactly():
    pts, truth = two_blobs()
    labels, centers, _ = kmeans(pts, 2, seed=1)
    # identical partition up to label permutation
    same = np.mean(labels == truth)
    assert same in (0.0, 1.0)
    assert centers.shape == (2, 2)


def test_nearest_centroid_routing_uses_owner_model():
    pts, _ = two_blobs()
    cs = cluster_split(pts, k=2, seed=2, nu=0.1, gamma=0.5)
    probe = np.array([[0.1, -0.2], [9.8, 0.3]])
    owners = cs.assign(probe)
    routed = cs.score(probe)
    for i, owner in enumerate(owners):
        assert routed[i] == pytest.approx(score(cs.models[int(owner)], probe[i]), rel=1e-12)


def test_alternative_routing_modes_run():
    pts, _ = two_blobs()
    cs = cluster_split(pts, k=2, seed=3, nu=0.1, gamma=0.5)
    probe = np.array([[0.0, 0.0], [30.0, 30.0]])
    for mode in ("vote", "weighted"):
        values = cs.score(probe, routing=mode)
        assert values.shape == (2,)
        assert values[1] < values[0]
    with pytest.raises(ConfigError):
        cs.score(probe, routing="nonsense")


def test_blob_members_accepted_by_their_model():
    pts, truth = two_blobs()
    cs = cluster_split(pts, k=2, seed=4, nu=0.1, gamma=0.5)
    decisions = cs.score(pts)
    assert np.mean(decisions >= -1e-9) > 0.85


def test_attribution_tracks_correlated_sensor():
    pts, truth = two_blobs(n=40)
    # sensor 3 energetic exactly on blob 1, sensor 7 on blob 0
    energy = np.zeros((80, 2))
    energy[truth == 1, 0] = 1.0
    energy[truth == 0, 1] = 1.0
    cs = cluster_split(pts, k=2, seed=5, nu=0.1, gamma=0.5, sensor_energy=energy, sensor_ids=[3, 7])
    blob_of_cluster = [int(np.round(truth[cs.labels == c].mean())) for c in range(2)]
    for c in range(2):
        expected = 3 if blob_of_cluster[c] == 1 else 7
        assert cs.attribution[c] == expected


def test_attribution_handles_flat_energy():
    labels = np.array([0, 0, 1, 1])
    energy = np.ones((4, 2))
    out = attribute_clusters(labels, energy, [1, 2])
    assert out == {0: None, 1: None}


def test_degenerate_points_exhaust_retries():
    pts = np.tile([[1.0, 1.0]], (10, 1))
    with pytest.raises(NumericalError):
        cluster_split(pts, k=2, seed=6, nu=0.2, gamma=1.0, retry_cap=3)


def test_small_cluster_nu_floor_keeps_training_feasible():
    rng = np.random.default_rng(7)
    pts = np.vstack([rng.standard_normal((3, 2)) * 0.1, rng.standard_normal((50, 2)) * 0.1 + 20.0])
    cs = cluster_split(pts, k=2, seed=8, nu=0.05, gamma=1.0)
    assert set(cs.models) == {0, 1}


def test_kmeans_validation():
    with pytest.raises(ConfigError):
        kmeans(np.ones((3, 2)), 0, seed=0)
    with pytest.raises(ConfigError):
        kmeans(np.ones((2, 2)), 5, seed=0)
