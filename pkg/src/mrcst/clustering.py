"""Type B operator: iterative mean clustering of a segment, then the envelope of each cluster."""
from __future__ import annotations

import zlib
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dataset import DatasetError, SubjectSegment, TransformedDataset
from .envelope import envelope_matrix

MAX_ITER = 100
CENTER_TOL = 1e-9


def distance(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    d = a - b
    return float(np.sqrt(d @ d))


def _sq_dists(X: np.ndarray, C: np.ndarray) -> np.ndarray:
    diff = X[:, None, :] - C[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def sse(X, centers, assignment) -> float:
    X = np.asarray(X, dtype=float)
    d = X - np.asarray(centers)[assignment]
    return float(np.einsum("ij,ij->", d, d))


@dataclass(frozen=True)
class ClusterModel:
    centers: np.ndarray
    assignment: np.ndarray
    sse: float
    n_iter: int
    sse_trace: tuple = field(default=(), repr=False)


def _plus_plus_init(X: np.ndarray, q: int, rng: np.random.Generator) -> np.ndarray:
    n = len(X)
    chosen = [int(rng.integers(n))]
    closest = _sq_dists(X, X[chosen]).min(axis=1)
    for _ in range(1, q):
        total = closest.sum()
        if total > 0:
            idx = int(rng.choice(n, p=closest / total))
        else:
            # every row coincides with a chosen center
            free = np.setdiff1d(np.arange(n), chosen)
            idx = int(rng.choice(free))
        chosen.append(idx)
        closest = np.minimum(closest, _sq_dists(X, X[[idx]])[:, 0])
    return X[chosen].copy()


def _repair_empty(X, centers, assignment, q):
    """Give each empty cluster the row farthest from its current center."""
    counts = np.bincount(assignment, minlength=q)
    for k in np.flatnonzero(counts == 0):
        d = np.einsum("ij,ij->i", X - centers[assignment], X - centers[assignment])
        donors = counts[assignment] > 1
        d = np.where(donors, d, -1.0)
        i = int(np.argmax(d))
        counts[assignment[i]] -= 1
        assignment[i] = k
        counts[k] = 1
        centers[k] = X[i]
    return assignment


def _update_centers(X, assignment, q):
    return np.vstack([X[assignment == k].mean(axis=0) for k in range(q)])


def _lloyd(X, q, rng):
    centers = _plus_plus_init(X, q, rng)
    assignment = np.argmin(_sq_dists(X, centers), axis=1)
    assignment = _repair_empty(X, centers, assignment, q)
    trace = []
    n_iter = 0
    for n_iter in range(1, MAX_ITER + 1):
        new_centers = _update_centers(X, assignment, q)
        shift = float(np.abs(new_centers - centers).max())
        centers = new_centers
        trace.append(sse(X, centers, assignment))
        new_assignment = np.argmin(_sq_dists(X, centers), axis=1)
        new_assignment = _repair_empty(X, centers.copy(), new_assignment, q)
        if np.array_equal(new_assignment, assignment) or shift < CENTER_TOL:
            if not np.array_equal(new_assignment, assignment):
                assignment = new_assignment
                centers = _update_centers(X, assignment, q)
                trace.append(sse(X, centers, assignment))
            break
        assignment = new_assignment
    else:
        centers = _update_centers(X, assignment, q)
    return ClusterModel(centers, assignment, sse(X, centers, assignment), n_iter, tuple(trace))


def kmeans(rows, q: int, seed=0, restarts: int = 1) -> ClusterModel:
    """Lloyd's algorithm with k-means++ seeding; the lowest-SSE restart wins."""
    X = np.asarray(rows, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    if q <= 0:
        raise ValueError("number of clusters must be positive")
    if q > len(X):
        raise ValueError(f"cannot form {q} clusters from {len(X)} rows")
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(max(1, restarts)):
        model = _lloyd(X, q, rng)
        if best is None or model.sse < best.sse:
            best = model
    return best


@dataclass(frozen=True)
class ClusteredSegment:
    subject_id: str
    label: int
    clusters: tuple = field(repr=False)
    model: ClusterModel | None = field(default=None, repr=False)

    @property
    def q(self) -> int:
        return len(self.clusters)


def iterative_mean_clustering(segment, q: int, depth: int = 1, seed=0, restarts: int = 1) -> ClusteredSegment:
    """Cluster a segment; each further layer re-clusters the previous layer's centers.

    Clusters are returned ordered by their first member row, members kept in
    input order.
    """
    if isinstance(segment, SubjectSegment):
        sid, label, X = segment.subject_id, segment.label, segment.rows
    else:
        sid, label, X = "", 0, np.asarray(segment, dtype=float)
    if depth < 1:
        raise ValueError("depth must be >= 1")
    rng = np.random.default_rng(seed)
    layer = np.asarray(X, dtype=float)
    model = None
    for d in range(1, depth + 1):
        if q > len(layer):
            raise ValueError(f"layer {d}: cannot form {q} clusters from {len(layer)} rows")
        model = kmeans(layer, q, seed=rng, restarts=restarts)
        if d < depth:
            layer = model.centers
    order = sorted(range(q), key=lambda k: int(np.flatnonzero(model.assignment == k)[0]))
    clusters = tuple(layer[model.assignment == k] for k in order)
    return ClusteredSegment(sid, label, clusters, model)


def subject_seed(master_seed: int, subject_id: str, *extra: int) -> np.random.SeedSequence:
    """Per-subject seed that does not depend on processing order."""
    return np.random.SeedSequence([int(master_seed), *map(int, extra), zlib.crc32(subject_id.encode())])


def transform_type_b(segments: Sequence[SubjectSegment], q: int, depth: int = 1, seed: int = 0,
                     trim_denominator: str = "retained", restarts: int = 1, run: int = 0):
    """Returns (E_s, Y): per subject the 6*Q envelope rows, and the clustered segments."""
    if not segments:
        raise DatasetError("no segments to transform")
    Y = [iterative_mean_clustering(s, q, depth, subject_seed(seed, s.subject_id, run), restarts)
         for s in segments]
    es = TransformedDataset(
        "es",
        tuple(c.subject_id for c in Y),
        tuple(c.label for c in Y),
        tuple(np.vstack([envelope_matrix(part, trim_denominator) for part in c.clusters]) for c in Y),
    )
    return es, Y
