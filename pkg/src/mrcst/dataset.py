"""Subject-grouped sample sets: loaders, CSV writer, normalization and LOSO splits."""
from __future__ import annotations

import csv
import logging
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

log = logging.getLogger(__name__)

SAKAR_FEATURES = 26
MAXLITTLE_FEATURES = 22


class DatasetError(ValueError):
    """Raised for malformed input files or violated dataset invariants."""


@dataclass(frozen=True)
class RawSample:
    subject_id: str
    features: np.ndarray
    label: int


@dataclass(frozen=True)
class SubjectSegment:
    """All samples recorded from one subject, in file order."""

    subject_id: str
    label: int
    rows: np.ndarray = field(repr=False)

    def __post_init__(self):
        rows = np.array(self.rows, dtype=float, ndmin=2)
        if rows.shape[0] < 1:
            raise DatasetError(f"subject {self.subject_id!r} has no samples")
        if self.label not in (0, 1):
            raise DatasetError(f"subject {self.subject_id!r}: label must be 0 or 1, got {self.label!r}")
        rows.setflags(write=False)
        object.__setattr__(self, "rows", rows)

    @property
    def n_samples(self) -> int:
        return self.rows.shape[0]

    @property
    def n_features(self) -> int:
        return self.rows.shape[1]


@dataclass(frozen=True)
class TransformedDataset:
    """Derived samples grouped by subject (one block of rows per subject)."""

    name: str
    subject_ids: tuple
    labels: tuple
    blocks: tuple = field(repr=False)

    def __post_init__(self):
        if not (len(self.subject_ids) == len(self.labels) == len(self.blocks)):
            raise DatasetError("subject_ids, labels and blocks must have equal length")
        frozen = []
        for b in self.blocks:
            b = np.array(b, dtype=float, ndmin=2)
            b.setflags(write=False)
            frozen.append(b)
        object.__setattr__(self, "blocks", tuple(frozen))
        object.__setattr__(self, "subject_ids", tuple(self.subject_ids))
        object.__setattr__(self, "labels", tuple(int(v) for v in self.labels))

    @property
    def X(self) -> np.ndarray:
        return np.vstack(self.blocks)

    @property
    def y(self) -> np.ndarray:
        return np.concatenate([np.full(len(b), lab, dtype=int) for b, lab in zip(self.blocks, self.labels)])

    @property
    def row_subjects(self) -> list[str]:
        return [sid for sid, b in zip(self.subject_ids, self.blocks) for _ in range(len(b))]

    def __len__(self) -> int:
        return sum(len(b) for b in self.blocks)

    def block(self, subject_id: str) -> np.ndarray:
        return self.blocks[self.subject_ids.index(subject_id)]

    def subset(self, subject_ids: Iterable[str]) -> "TransformedDataset":
        keep = set(subject_ids)
        idx = [i for i, s in enumerate(self.subject_ids) if s in keep]
        return TransformedDataset(
            self.name,
            tuple(self.subject_ids[i] for i in idx),
            tuple(self.labels[i] for i in idx),
            tuple(self.blocks[i] for i in idx),
        )


def as_dataset(segments: Sequence[SubjectSegment], name: str = "raw") -> TransformedDataset:
    """View raw segments as a dataset (the untransformed baseline channel)."""
    return TransformedDataset(
        name,
        tuple(s.subject_id for s in segments),
        tuple(s.label for s in segments),
        tuple(s.rows for s in segments),
    )


# ----------------------------------------------------------------------------
# loaders

def _read_rows(path) -> list[tuple[int, list[str]]]:
    path = Path(path)
    with path.open(newline="") as fh:
        rows = [(i, [c.strip() for c in r]) for i, r in enumerate(csv.reader(fh), start=1)
                if r and any(c.strip() for c in r)]
    if not rows:
        raise DatasetError(f"{path}: empty file")
    return rows


def _floats(cells: Sequence[str], lineno: int, path) -> list[float]:
    out = []
    for c in cells:
        try:
            v = float(c)
        except ValueError:
            raise DatasetError(f"{path}:{lineno}: non-numeric value {c!r}") from None
        if not math.isfinite(v):
            raise DatasetError(f"{path}:{lineno}: non-finite value {c!r}")
        out.append(v)
    return out


def _label(cell: str, lineno: int, path) -> int:
    try:
        v = float(cell)
    except ValueError:
        raise DatasetError(f"{path}:{lineno}: non-numeric label {cell!r}") from None
    if v not in (0.0, 1.0):
        raise DatasetError(f"{path}:{lineno}: label must be 0 or 1, got {cell!r}")
    return int(v)


def group_samples(samples: Iterable[RawSample], source="<samples>") -> list[SubjectSegment]:
    """Group samples by subject id, keeping first-appearance order of subjects and rows."""
    order: list[str] = []
    rows: dict[str, list[np.ndarray]] = {}
    labels: dict[str, int] = {}
    for s in samples:
        if s.subject_id not in rows:
            order.append(s.subject_id)
            rows[s.subject_id] = []
            labels[s.subject_id] = s.label
        elif labels[s.subject_id] != s.label:
            raise DatasetError(f"{source}: subject {s.subject_id!r} has inconsistent labels")
        rows[s.subject_id].append(s.features)
    return [SubjectSegment(sid, labels[sid], np.vstack(rows[sid])) for sid in order]


def load_sakar(path) -> list[SubjectSegment]:
    """Load the Sakar et al. multiple-recordings training file.

    One row per sample: subject id, 26 features, class label. The UCI copy
    carries an extra UPDRS column before the label; it is accepted and dropped.
    """
    samples = []
    for lineno, cells in _read_rows(path):
        if len(cells) not in (SAKAR_FEATURES + 2, SAKAR_FEATURES + 3):
            raise DatasetError(
                f"{path}:{lineno}: expected {SAKAR_FEATURES + 2} columns, got {len(cells)}")
        feats = _floats(cells[1:1 + SAKAR_FEATURES], lineno, path)
        samples.append(RawSample(cells[0], np.array(feats), _label(cells[-1], lineno, path)))
    segments = group_samples(samples, path)
    n_rows = sum(s.n_samples for s in segments)
    if len(segments) != 40 or n_rows != 1040:
        log.warning("%s: %d subjects / %d rows (canonical file has 40 / 1040)", path, len(segments), n_rows)
    return segments


_RECORDING = re.compile(r"^(.*)_\d+$")


def maxlittle_subject(name: str) -> str:
    """``phon_R01_S01_1`` -> ``phon_R01_S01``."""
    m = _RECORDING.match(name)
    return m.group(1) if m else name


def load_maxlittle(path) -> list[SubjectSegment]:
    """Load the Little et al. ``parkinsons.data`` file (header row, ``status`` label column)."""
    rows = _read_rows(path)
    _, header = rows[0]
    if "status" not in header:
        raise DatasetError(f"{path}: missing 'status' column")
    status = header.index("status")
    feature_cols = [i for i in range(1, len(header)) if i != status]
    samples = []
    for lineno, cells in rows[1:]:
        if len(cells) != len(header):
            raise DatasetError(f"{path}:{lineno}: expected {len(header)} columns, got {len(cells)}")
        feats = _floats([cells[i] for i in feature_cols], lineno, path)
        samples.append(RawSample(maxlittle_subject(cells[0]), np.array(feats),
                                 _label(cells[status], lineno, path)))
    if not samples:
        raise DatasetError(f"{path}: no data rows")
    segments = group_samples(samples, path)
    if len(segments) != 31 or len(feature_cols) != MAXLITTLE_FEATURES:
        log.warning("%s: %d subjects / %d features (canonical file has 31 / 22)",
                    path, len(segments), len(feature_cols))
    return segments


def _is_header(cells: Sequence[str]) -> bool:
    try:
        _ = [float(c) for c in cells[1:]]
    except ValueError:
        return True
    return False


def load_generic_csv(path) -> list[SubjectSegment]:
    """Subject id in column 1, label in the last column, numeric features between.

    With a header row, a column literally named ``label`` is used instead of the
    last one, so files produced by :func:`write_generic_csv` load back unchanged.
    """
    rows = _read_rows(path)
    label_col = -1
    if _is_header(rows[0][1]):
        header = rows.pop(0)[1]
        if "label" in header[1:]:
            label_col = header.index("label")
        if not rows:
            raise DatasetError(f"{path}: header but no data rows")
    width = len(rows[0][1])
    if width < 3:
        raise DatasetError(f"{path}:{rows[0][0]}: need at least subject, one feature and label")
    label_idx = label_col % width
    feat_idx = [i for i in range(1, width) if i != label_idx]
    samples = []
    for lineno, cells in rows:
        if len(cells) != width:
            raise DatasetError(f"{path}:{lineno}: expected {width} columns, got {len(cells)}")
        feats = _floats([cells[i] for i in feat_idx], lineno, path)
        samples.append(RawSample(cells[0], np.array(feats), _label(cells[label_idx], lineno, path)))
    return group_samples(samples, path)


LOADERS = {"sakar": load_sakar, "maxlittle": load_maxlittle, "csv": load_generic_csv}


def load(path, fmt: str) -> list[SubjectSegment]:
    try:
        loader = LOADERS[fmt]
    except KeyError:
        raise DatasetError(f"unknown format {fmt!r}; choose from {sorted(LOADERS)}") from None
    return loader(path)


def write_generic_csv(path, data) -> int:
    """Write segments or a TransformedDataset as ``subject_id,label,f1..fN``; returns row count."""
    if isinstance(data, TransformedDataset):
        groups = list(zip(data.subject_ids, data.labels, data.blocks))
    else:
        groups = [(s.subject_id, s.label, s.rows) for s in data]
    if not groups:
        raise DatasetError("nothing to write")
    n_feat = groups[0][2].shape[1]
    n = 0
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["subject_id", "label"] + [f"f{i + 1}" for i in range(n_feat)])
        for sid, label, block in groups:
            for row in block:
                w.writerow([sid, label] + [format(float(v), ".17g") for v in row])
                n += 1
    return n


# ----------------------------------------------------------------------------
# normalization

@dataclass(frozen=True)
class Normalizer:
    method: str
    offset: np.ndarray
    scale: np.ndarray  # 0 marks a constant training feature

    def __call__(self, data):
        return apply_normalizer(self, data)


def fit_normalizer(train, method: str = "minmax") -> Normalizer:
    X = train.X if isinstance(train, TransformedDataset) else np.asarray(train, dtype=float)
    if X.ndim != 2 or X.shape[0] == 0:
        raise DatasetError("cannot fit a normalizer on an empty training set")
    if method == "minmax":
        offset = X.min(axis=0)
        scale = X.max(axis=0) - offset
    elif method == "zscore":
        offset = X.mean(axis=0)
        scale = X.std(axis=0)
    else:
        raise DatasetError(f"unknown normalization {method!r}")
    offset, scale = offset.copy(), scale.copy()
    offset.setflags(write=False)
    scale.setflags(write=False)
    return Normalizer(method, offset, scale)


def apply_normalizer(norm: Normalizer, data):
    if isinstance(data, TransformedDataset):
        return TransformedDataset(data.name, data.subject_ids, data.labels,
                                  tuple(apply_normalizer(norm, b) for b in data.blocks))
    X = np.asarray(data, dtype=float)
    constant = norm.scale == 0
    out = (X - norm.offset) / np.where(constant, 1.0, norm.scale)
    out[..., constant] = 0.0
    return out


# ----------------------------------------------------------------------------
# splitting

def split_loso(segments) -> list[tuple[list[str], str]]:
    """One fold per subject: (training subject ids, held-out subject id)."""
    ids = [s.subject_id if isinstance(s, SubjectSegment) else str(s) for s in segments]
    if len(set(ids)) != len(ids):
        raise DatasetError("duplicate subject ids")
    if len(ids) < 2:
        raise DatasetError("leave-one-subject-out needs at least 2 subjects")
    return [([s for s in ids if s != held], held) for held in ids]
