"""Type C operator: combine each cluster's rows with that cluster's envelope rows.

For a cluster X (I x N) and its envelope T (M x N) the operator yields an
M x N block whose row m is T[m] multiplied element-wise by the column sums
of X. Two routes are provided: the literal index loop and the block-diagonal
matrix product. They must agree.
"""
from __future__ import annotations

from typing import Sequence

import numpy as np

from .clustering import ClusteredSegment
from .dataset import DatasetError, TransformedDataset
from .envelope import ENVELOPE_ROWS


def _check_pair(X, T):
    X = np.asarray(X, dtype=float)
    T = np.asarray(T, dtype=float)
    if X.ndim != 2 or T.ndim != 2:
        raise ValueError("X and T must be 2-D")
    if X.shape[0] < 1:
        raise ValueError("X needs at least one row")
    if T.shape[0] < 1:
        raise ValueError("T needs at least one row")
    if X.shape[1] != T.shape[1]:
        raise ValueError(f"feature count mismatch: X has {X.shape[1]}, T has {T.shape[1]}")
    return X, T


def convolve_loop(X, T) -> np.ndarray:
    X, T = _check_pair(X, T)
    n_rows, n_feat = X.shape
    out = np.zeros((T.shape[0], n_feat))
    for m in range(T.shape[0]):
        for n in range(n_feat):
            acc = 0.0
            for i in range(n_rows):
                acc += T[m, n] * X[i, n]
            out[m, n] = acc
    return out


def extend_matrix(t_row, n_rows: int) -> np.ndarray:
    """Stack ``n_rows`` copies of a 1 x N row."""
    t_row = np.asarray(t_row, dtype=float).reshape(1, -1)
    return np.repeat(t_row, n_rows, axis=0)


def block_operator(t_row, n_rows: int) -> np.ndarray:
    """(I*N) x N block-diagonal matrix; block n is column n of the extended row."""
    ext = extend_matrix(t_row, n_rows)
    n_feat = ext.shape[1]
    u = np.zeros((n_rows * n_feat, n_feat))
    for n in range(n_feat):
        u[n * n_rows:(n + 1) * n_rows, n] = ext[:, n]
    return u


def convolve_matrix(X, T) -> np.ndarray:
    X, T = _check_pair(X, T)
    n_rows, n_feat = X.shape
    x_flat = X.T.reshape(1, -1)  # columns of X laid end to end
    U = np.hstack([block_operator(t, n_rows) for t in T])
    return (x_flat @ U).reshape(T.shape[0], n_feat)


def transform_type_c(Y: Sequence[ClusteredSegment], es: TransformedDataset) -> TransformedDataset:
    """E_t: per subject and cluster, combine the cluster rows with its E_s envelope block."""
    m = len(ENVELOPE_ROWS)
    if tuple(c.subject_id for c in Y) != es.subject_ids:
        raise DatasetError("clustered segments and E_s cover different subjects")
    blocks = []
    for c, env in zip(Y, es.blocks):
        if env.shape[0] != m * c.q:
            raise DatasetError(
                f"subject {c.subject_id!r}: {c.q} clusters but {env.shape[0]} envelope rows")
        blocks.append(np.vstack([convolve_matrix(part, env[k * m:(k + 1) * m])
                                 for k, part in enumerate(c.clusters)]))
    return TransformedDataset("et", es.subject_ids, es.labels, tuple(blocks))
