"""KDE density values, normalisation, and artificial-negative sampling."""

import numpy as np
import pytest

from aeroshm.errors import ConfigError, NumericalError
from aeroshm.kde import KdeModel, bounding_box, fit_kde, generate_negatives, kde_density, scott_bandwidth


def test_single_point_gaussian_peak():
    model = KdeModel(points=np.array([[0.3]]), bandwidth=1.0)
    assert kde_density(model, np.array([0.3])) == pytest.approx(1.0 / np.sqrt(2.0 * np.pi), abs=1e-12)


def test_density_translation_invariant():
    rng = np.random.default_rng(0)
    pts = rng.standard_normal((30, 2))
    x = rng.standard_normal(2)
    shift = np.array([5.0, -3.0])
    m1 = KdeModel(points=pts, bandwidth=0.4)
    m2 = KdeModel(points=pts + shift, bandwidth=0.4)
    assert kde_density(m1, x) == pytest.approx(kde_density(m2, x + shift), rel=1e-12)


def test_density_non_negative_everywhere():
    rng = np.random.default_rng(1)
    model = fit_kde(rng.standard_normal((50, 3)))
    queries = rng.uniform(-10, 10, size=(200, 3))
    assert np.all(kde_density(model, queries) >= 0.0)


def test_monte_carlo_normalisation_within_two_percent():
    rng = np.random.default_rng(2)
    model = fit_kde(rng.standard_normal((200, 2)))
    lo, hi = np.full(2, -7.0), np.full(2, 7.0)
    volume = np.prod(hi - lo)
    samples = rng.uniform(lo, hi, size=(400_000, 2))
    integral = volume * kde_density(model, samples).mean()
    assert integral == pytest.approx(1.0, abs=0.02)


def test_scott_bandwidth_positive_and_shrinks_with_n():
    rng = np.random.default_rng(3)
    small = scott_bandwidth(rng.standard_normal((20, 2)))
    large = scott_bandwidth(rng.standard_normal((2000, 2)))
    assert small > 0.0
    assert large < small


def test_negatives_fall_below_density_threshold():
    rng = np.random.default_rng(4)
    pts = rng.standard_normal((100, 2))
    model = fit_kde(pts)
    negatives = generate_negatives(model, 50, density_quantile=0.2, box_margin=0.3, seed=9)
    assert negatives.shape == (50, 2)
    threshold = np.quantile(kde_density(model, pts), 0.2)
    assert np.all(kde_density(model, negatives) < threshold)


def test_negatives_stay_inside_expanded_box():
    rng = np.random.default_rng(5)
    model = fit_kde(rng.standard_normal((80, 2)))
    lo, hi = bounding_box(model, 0.25)
    negatives = generate_negatives(model, 100, box_margin=0.25, seed=1)
    assert np.all(negatives >= lo) and np.all(negatives <= hi)


def test_negatives_deterministic_given_seed():
    rng = np.random.default_rng(6)
    model = fit_kde(rng.standard_normal((60, 2)))
    a = generate_negatives(model, 30, seed=7)
    b = generate_negatives(model, 30, seed=7)
    np.testing.assert_array_equal(a, b)


def test_negatives_fill_the_gap_between_blobs():
    rng = np.random.default_rng(7)
    blob_a = rng.standard_normal((80, 2)) * 0.4
    blob_b = rng.standard_normal((80, 2)) * 0.4 + [8.0, 0.0]
    model = fit_kde(np.vstack([blob_a, blob_b]), bandwidth=0.5)
    negatives = generate_negatives(model, 400, density_quantile=0.3, box_margin=0.1, seed=2)
    between = negatives[(negatives[:, 0] > 2.5) & (negatives[:, 0] < 5.5)]
    assert len(between) > 0


def test_hopeless_acceptance_rate_raises():
    # reference points at the box corners with a huge bandwidth: the corners
    # are the lowest-density points of the box, so quantile 0 rejects every
    # interior candidate
    corners = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
    model = KdeModel(points=corners, bandwidth=10.0)
    with pytest.raises(NumericalError):
        generate_negatives(model, 10, density_quantile=0.0, box_margin=0.0, seed=3, min_probe=5000)


def test_kde_validation():
    with pytest.raises(ConfigError):
        KdeModel(points=np.ones((3, 2)), bandwidth=0.0)
    model = fit_kde(np.ones((3, 2)))
    with pytest.raises(ConfigError):
        kde_density(model, np.ones(5))
    with pytest.raises(ConfigError):
        generate_negatives(model, 0)
