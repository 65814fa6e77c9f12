"""Weighted decision fusion, simplex grid search, subject decisions and metrics."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

CENTER = (1 / 3, 1 / 3, 1 / 3)


@dataclass(frozen=True)
class FusionWeights:
    a1: float
    a2: float
    a3: float

    def __post_init__(self):
        w = self.as_tuple()
        if any(not (0.0 <= v <= 1.0) for v in w):
            raise ValueError(f"weights must lie in [0, 1], got {w}")
        if abs(sum(w) - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {sum(w)!r}")

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.a1, self.a2, self.a3)

    @classmethod
    def equal(cls) -> "FusionWeights":
        return cls(*CENTER)


def fuse(scores: Sequence[float], w: FusionWeights) -> float:
    s1, s2, s3 = scores
    return w.a1 * s1 + w.a2 * s2 + w.a3 * s3


def decide(value: float) -> int:
    """Label 1 iff strictly positive; ties go to 0."""
    return 1 if value > 0 else 0


def simplex_lattice(step: float) -> list[FusionWeights]:
    """All weight triples on the simplex with spacing ``step`` (1/step must be an integer)."""
    n = round(1 / step)
    if n < 1 or abs(n * step - 1) > 1e-9:
        raise ValueError(f"grid step {step} does not divide 1")
    out = []
    for i in range(n + 1):
        for j in range(n + 1 - i):
            a1, a2 = i / n, j / n
            out.append(FusionWeights(a1, a2, (n - i - j) / n if i + j < n else 0.0))
    return out


def grid_search_weights(channel_scores, labels, step: float = 0.1) -> FusionWeights:
    """Pick the lattice point with the best tuning accuracy.

    ``channel_scores`` is (subjects x 3). Ties: nearest to the simplex center,
    then lexicographically smallest.
    """
    S = np.asarray(channel_scores, dtype=float).reshape(-1, 3)
    y = np.asarray(labels, dtype=int)
    if len(S) == 0:
        return FusionWeights.equal()
    best_key, best = None, None
    for w in simplex_lattice(step):
        fused = S @ np.array(w.as_tuple())
        acc = int(np.sum((fused > 0).astype(int) == y))
        dist = math.dist(w.as_tuple(), CENTER)
        key = (-acc, round(dist, 12), w.as_tuple())
        if best_key is None or key < best_key:
            best_key, best = key, w
    return best


def subject_decision(sample_scores) -> tuple[int, float]:
    s = np.asarray(sample_scores, dtype=float)
    if s.size == 0:
        raise ValueError("no scores")
    m = float(s.mean())
    return decide(m), m


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise ValueError("counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @classmethod
    def from_labels(cls, y_true, y_pred) -> "ConfusionCounts":
        t = np.asarray(y_true, dtype=int)
        p = np.asarray(y_pred, dtype=int)
        return cls(int(np.sum((t == 1) & (p == 1))), int(np.sum((t == 0) & (p == 1))),
                   int(np.sum((t == 0) & (p == 0))), int(np.sum((t == 1) & (p == 0))))


def compute_metrics(c: ConfusionCounts) -> tuple[float, float | None, float | None]:
    """(accuracy, sensitivity, specificity) as fractions; an undefined rate is None."""
    if c.total == 0:
        raise ValueError("no decided units")
    acc = (c.tp + c.tn) / c.total
    sens = c.tp / (c.tp + c.fn) if c.tp + c.fn else None
    spec = c.tn / (c.fp + c.tn) if c.fp + c.tn else None
    return acc, sens, spec
