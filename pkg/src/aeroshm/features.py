"""Event segmentation, spectral feature extraction, and tensor assembly.

Each (event, sensor) window becomes a feature vector: mean removal, an
optional Hann taper, energy-preserving one-sided magnitude spectrum, then
averaging into log-spaced frequency bands. Stacking over sensors and
events yields the dense (feature x location x event) tensor consumed by
the decomposition stage.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from aeroshm.errors import ConfigError
from aeroshm.simulate import SensorRecordings


def segment_events(recordings: SensorRecordings) -> np.ndarray:
    """Split recordings into per-event, per-sensor windows.

    Returns (n_events, n_sensors, window) with all windows truncated to
    the shortest event so the array is rectangular.
    """
    counts = np.bincount(recordings.event_index)
    if len(counts) == 0 or counts.min() == 0:
        raise ConfigError("recordings contain an empty event")
    width = int(counts.min())
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    n_events = len(counts)
    n_sensors = recordings.signals.shape[0]
    windows = np.empty((n_events, n_sensors, width))
    for e, s0 in enumerate(starts):
        windows[e] = recordings.signals[:, s0 : s0 + width]
    return windows


def band_edges(n_freq: int, n_bins: int) -> np.ndarray:
    """Log-spaced rfft-bin edges covering indices [1, n_freq].

    Edges are strictly increasing integers so every band holds at least
    one spectral line; requires n_freq >= n_bins.
    """
    if n_freq < n_bins:
        raise ConfigError(f"window too short for {n_bins} bands ({n_freq} spectral lines)")
    edges = np.unique(np.rint(np.geomspace(1, n_freq + 1, n_bins + 1)).astype(int))
    for i in range(1, len(edges)):
        edges[i] = max(edges[i], edges[i - 1] + 1)
    if len(edges) < n_bins + 1:
        extra = np.arange(edges[-1] + 1, edges[-1] + 1 + (n_bins + 1 - len(edges)))
        edges = np.concatenate([edges, extra])
    edges = np.minimum(edges, n_freq + 1)
    for i in range(len(edges) - 2, -1, -1):
        edges[i] = min(edges[i], edges[i + 1] - 1)
    if edges[0] < 1:
        raise ConfigError("window too short for the requested band count")
    return edges[: n_bins + 1]


def magnitude_spectrum(window: np.ndarray, taper: str = "hann") -> np.ndarray:
    """Energy-preserving one-sided magnitude spectrum of a detrended window.

    The window is mean-removed and optionally Hann-tapered; scaling is
    chosen so that sum(mag**2) equals the time-domain energy of the
    (detrended, tapered) window.
    """
    x = np.asarray(window, dtype=float)
    if not np.all(np.isfinite(x)):
        raise ConfigError("non-finite sample in window")
    x = x - x.mean()
    if taper == "hann":
        x = x * np.hanning(len(x))
    elif taper != "rectangular":
        raise ConfigError(f"unknown taper {taper!r}")
    spec = np.abs(np.fft.rfft(x))
    scale = np.full(spec.shape, np.sqrt(2.0))
    scale[0] = 1.0
    if len(x) % 2 == 0:
        scale[-1] = 1.0
    return spec * scale / np.sqrt(len(x))


def spectral_features(window: np.ndarray, n_bins: int, taper: str = "hann") -> np.ndarray:
    """Average the magnitude spectrum into n_bins log-spaced bands."""
    window = np.asarray(window, dtype=float)
    if len(window) < 2 * n_bins:
        raise ConfigError("window length must be at least 2 * n_bins")
    mag = magnitude_spectrum(window, taper=taper)
    n_freq = len(mag) - 1  # lines 1..n_freq, DC excluded
    edges = band_edges(n_freq, n_bins)
    out = np.empty(n_bins)
    for b in range(n_bins):
        out[b] = mag[edges[b] : edges[b + 1]].mean()
    return out


@dataclass(frozen=True)
class FeatureTensor:
    """Dense (feature x location x event) array with mode labels."""

    data: np.ndarray
    feature_labels: tuple[str, ...]
    sensor_ids: tuple[int, ...]
    event_labels: tuple[str, ...]
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.data.ndim != 3:
            raise ConfigError("feature tensor must be three-way")
        i, j, k = self.data.shape
        if not np.all(np.isfinite(self.data)):
            raise ConfigError("feature tensor contains non-finite entries")
        if len(self.feature_labels) != i or len(self.sensor_ids) != j or len(self.event_labels) != k:
            raise ConfigError("mode label lengths do not match tensor shape")

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.data.shape

    def sensor_energy(self) -> np.ndarray:
        """Per-(event, sensor) feature energy, used for cluster attribution."""
        return np.transpose((self.data**2).sum(axis=0))


def build_tensor(
    feature_rows: np.ndarray,
    sensor_ids,
    event_labels,
    provenance: dict | None = None,
) -> FeatureTensor:
    """Assemble (n_events, n_sensors, n_features) rows into a FeatureTensor."""
    arr = np.asarray(feature_rows, dtype=float)
    if arr.ndim != 3:
        raise ConfigError("expected (events, sensors, features) input")
    data = np.transpose(arr, (2, 1, 0))
    labels = tuple(f"band_{i + 1}" for i in range(data.shape[0]))
    return FeatureTensor(
        data=data,
        feature_labels=labels,
        sensor_ids=tuple(int(s) for s in sensor_ids),
        event_labels=tuple(event_labels),
        provenance=provenance or {},
    )


def featurize(recordings: SensorRecordings, n_bins: int = 16, taper: str = "hann") -> FeatureTensor:
    """Full path from recordings to the feature tensor."""
    windows = segment_events(recordings)
    n_events, n_sensors, _ = windows.shape
    rows = np.empty((n_events, n_sensors, n_bins))
    for e in range(n_events):
        for s in range(n_sensors):
            rows[e, s] = spectral_features(windows[e, s], n_bins, taper=taper)
    labels = [recordings.label] * n_events
    return build_tensor(rows, recordings.sensor_ids, labels, provenance={"n_bins": n_bins, "taper": taper})
