"""Confusion matrices and F1 with damage as the positive class."""

from __future__ import annotations

from dataclasses import dataclass

from aeroshm.errors import ConfigError

LABELS = ("healthy", "damaged")


@dataclass(frozen=True)
class ConfusionMatrix:
    """Counts with the convention: damaged = positive, healthy = negative."""

    tn: int
    fp: int
    fn: int
    tp: int

    def __post_init__(self):
        if min(self.tn, self.fp, self.fn, self.tp) < 0:
            raise ConfigError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tn + self.fp + self.fn + self.tp

    def as_dict(self) -> dict:
        return {"tn": self.tn, "fp": self.fp, "fn": self.fn, "tp": self.tp}


def confusion(labels, predictions) -> ConfusionMatrix:
    """Count agreement between true health labels and predicted ones."""
    labels = list(labels)
    predictions = list(predictions)
    if len(labels) != len(predictions):
        raise ConfigError("labels and predictions must have equal length")
    counts = {"tn": 0, "fp": 0, "fn": 0, "tp": 0}
    for truth, pred in zip(labels, predictions):
        if truth not in LABELS:
            raise ConfigError(f"unknown label {truth!r}")
        if pred not in LABELS:
            raise ConfigError(f"unknown prediction {pred!r}")
        if truth == "damaged":
            counts["tp" if pred == "damaged" else "fn"] += 1
        else:
            counts["fp" if pred == "damaged" else "tn"] += 1
    return ConfusionMatrix(**counts)


def f1(cm: ConfusionMatrix) -> float:
    """F1 of the damage class: 2 TP / (2 TP + FP + FN)."""
    denom = 2 * cm.tp + cm.fp + cm.fn
    if denom == 0:
        raise ConfigError("F1 undefined: no positives in labels or predictions")
    return 2.0 * cm.tp / denom
