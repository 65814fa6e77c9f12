"""Type A operator: collapse a block of samples into six envelope rows.

Rows, in order: mean, median, 25% trimmed mean, standard deviation,
interquartile distance, mean absolute deviation from the mean. Order
statistics are taken per feature.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .dataset import DatasetError, SubjectSegment, TransformedDataset

ENVELOPE_ROWS = ("mean", "median", "trimmed_mean", "std", "iqr", "mad")
TRIM_MODES = ("retained", "full")


def round_index(x: float) -> int:
    """Round half up (6.5 -> 7, 2.25 -> 2)."""
    if x < 0:
        raise ValueError("round_index expects x >= 0")
    return int(math.floor(x + 0.5))


def _clamp(i: int, n: int) -> int:
    return min(max(i, 1), n)


def trim_ranks(n: int) -> tuple[int, int]:
    """1-based inclusive rank range kept by the 25% trimmed mean."""
    k = round_index(0.25 * n)
    lo, hi = _clamp(k, n), _clamp(n - k, n)
    if n <= 2 or hi < lo:
        return 1, n
    return lo, hi


def quartile_ranks(n: int) -> tuple[int, int]:
    """1-based (lower, upper) ranks used for the interquartile distance."""
    return _clamp(round_index(0.25 * n), n), _clamp(round_index(0.75 * n), n)


@dataclass(frozen=True)
class EnvelopeStats:
    mean: np.ndarray
    median: np.ndarray
    trimmed_mean: np.ndarray
    std: np.ndarray
    iqr: np.ndarray
    mad: np.ndarray

    def as_matrix(self) -> np.ndarray:
        return np.vstack([getattr(self, name) for name in ENVELOPE_ROWS])


def envelope_stats(rows, trim_denominator: str = "retained") -> EnvelopeStats:
    if isinstance(rows, SubjectSegment):
        rows = rows.rows
    X = np.asarray(rows, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    n = X.shape[0]
    if n == 0:
        raise DatasetError("envelope of an empty segment")
    if trim_denominator not in TRIM_MODES:
        raise ValueError(f"trim_denominator must be one of {TRIM_MODES}")

    srt = np.sort(X, axis=0)
    mean = X.sum(axis=0) / n
    if n % 2:
        median = srt[(n + 1) // 2 - 1].copy()
    else:
        median = (srt[n // 2 - 1] + srt[n // 2]) / 2

    lo, hi = trim_ranks(n)
    denom = (hi - lo + 1) if trim_denominator == "retained" else n
    trimmed = srt[lo - 1:hi].sum(axis=0) / denom

    dev = X - mean
    std = np.sqrt((dev * dev).sum(axis=0) / (n - 1)) if n > 1 else np.zeros_like(mean)
    q1, q3 = quartile_ranks(n)
    iqr = srt[q3 - 1] - srt[q1 - 1]
    mad = np.abs(dev).sum(axis=0) / n
    return EnvelopeStats(mean, median, trimmed, std, iqr, mad)


def envelope_matrix(rows, trim_denominator: str = "retained") -> np.ndarray:
    """6 x N matrix of :func:`envelope_stats`."""
    return envelope_stats(rows, trim_denominator).as_matrix()


def transform_type_a(segments: Sequence[SubjectSegment], trim_denominator: str = "retained") -> TransformedDataset:
    if not segments:
        raise DatasetError("no segments to transform")
    return TransformedDataset(
        "ef",
        tuple(s.subject_id for s in segments),
        tuple(s.label for s in segments),
        tuple(envelope_matrix(s.rows, trim_denominator) for s in segments),
    )
