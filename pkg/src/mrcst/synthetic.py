"""Synthetic subject-grouped data shaped like the UCI speech sets.

Each subject has a latent offset (label effect plus subject noise); every
sample slot ("recording type") is shared across subjects and carries the
label effect with its own strength, so single samples are weak evidence while
a subject's whole segment is strong evidence.
"""
from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .dataset import SubjectSegment


def make_segments(n_subjects: int = 40, n_samples=26, n_features: int = 26, n_positive: int | None = None,
                  effect: float = 0.6, subject_noise: float = 0.5, sample_noise: float = 1.5,
                  seed: int = 0) -> list[SubjectSegment]:
    """``n_samples`` may be an int or a (low, high) inclusive range for ragged segments."""
    rng = np.random.default_rng(seed)
    n_positive = n_subjects // 2 if n_positive is None else n_positive
    labels = np.array([1] * n_positive + [0] * (n_subjects - n_positive))
    rng.shuffle(labels)
    max_g = n_samples if isinstance(n_samples, int) else n_samples[1]
    direction = rng.normal(size=n_features)
    direction /= np.linalg.norm(direction) / np.sqrt(n_features)
    slot_bias = rng.normal(scale=1.0, size=(max_g, n_features))
    slot_strength = rng.uniform(0.0, 1.0, size=max_g)
    segments = []
    for i, lab in enumerate(labels):
        g = n_samples if isinstance(n_samples, int) else int(rng.integers(n_samples[0], n_samples[1] + 1))
        subj = subject_noise * rng.normal(size=n_features)
        shift = (1 if lab else -1) * effect * direction
        rows = (slot_bias[:g] + subj + slot_strength[:g, None] * shift
                + sample_noise * rng.normal(size=(g, n_features)))
        segments.append(SubjectSegment(f"S{i + 1:02d}", int(lab), rows))
    return segments


def write_sakar_format(path, segments) -> None:
    """Headerless ``id,f1..fN,label`` rows, as in the Sakar training file."""
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        for s in segments:
            for row in s.rows:
                w.writerow([s.subject_id, *[format(float(v), ".17g") for v in row], s.label])


def write_maxlittle_format(path, segments) -> None:
    """Header row, ``name`` = ``<subject>_<k>``, ``status`` label column after the 16th feature."""
    n_feat = segments[0].n_features
    names = [f"feat{i + 1}" for i in range(n_feat)]
    cut = min(16, n_feat)
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["name", *names[:cut], "status", *names[cut:]])
        for s in segments:
            for k, row in enumerate(s.rows, start=1):
                vals = [format(float(v), ".17g") for v in row]
                w.writerow([f"{s.subject_id}_{k}", *vals[:cut], s.label, *vals[cut:]])
