import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mrcst.fusion import (ConfusionCounts, FusionWeights, compute_metrics, decide, fuse, grid_search_weights,
                          simplex_lattice, subject_decision)
from oracles import lattice_oracle

weights = st.builds(lambda a, b: (a, b), st.integers(0, 10), st.integers(0, 10)).filter(
    lambda t: t[0] + t[1] <= 10).map(lambda t: FusionWeights(t[0] / 10, t[1] / 10, (10 - t[0] - t[1]) / 10))


@given(weights)
def test_fuse_convex(w):
    assert fuse((1, 1, 1), w) == pytest.approx(1, abs=1e-12)


def test_fuse_single_channel():
    assert fuse((0.37, -0.9, 0.2), FusionWeights(1, 0, 0)) == 0.37


def test_fuse_example():
    v = fuse((1, -1, 1), FusionWeights(0.5, 0.3, 0.2))
    assert v == pytest.approx(0.4, abs=1e-15)
    assert decide(v) == 1


def test_invalid_weights():
    with pytest.raises(ValueError):
        FusionWeights(0.5, 0.5, 0.5)
    with pytest.raises(ValueError):
        FusionWeights(1.2, -0.2, 0.0)


@pytest.mark.parametrize("step, count", [(0.5, 6), (0.1, 66), (0.25, 15), (1.0, 3)])
def test_lattice_size(step, count):
    lat = simplex_lattice(step)
    assert len(lat) == count
    assert sorted(w.as_tuple() for w in lat) == pytest.approx(sorted(lattice_oracle(step)))
    assert all(abs(sum(w.as_tuple()) - 1) <= 1e-12 for w in lat)


def test_lattice_bad_step():
    with pytest.raises(ValueError):
        simplex_lattice(0.3)


def test_empty_tuning_set():
    assert grid_search_weights([], []) == FusionWeights.equal()


def test_identical_channels_pick_center():
    rng = np.random.default_rng(0)
    s = rng.uniform(-1, 1, size=12)
    S = np.c_[s, s, s]
    y = (rng.random(12) < 0.5).astype(int)
    w = grid_search_weights(S, y, step=1 / 3)
    assert w.as_tuple() == pytest.approx((1 / 3, 1 / 3, 1 / 3), abs=1e-15)
    # (1/3, 1/3, 1/3) is off the 0.1 lattice; the nearest points tie and the lexicographic rule decides
    assert grid_search_weights(S, y, step=0.1).as_tuple() == pytest.approx((0.3, 0.3, 0.4))


def _oracle_accuracy(S, y, w):
    hits = 0
    for row, lab in zip(S, y):
        v = w[0] * row[0] + w[1] * row[1] + w[2] * row[2]
        hits += int((1 if v > 0 else 0) == lab)
    return hits


def test_perfect_channel_dominates():
    rng = np.random.default_rng(5)
    y = (rng.random(30) < 0.5).astype(int)
    perfect = np.where(y == 1, 0.6, -0.6)
    S = np.c_[perfect, rng.uniform(-1, 1, 30), rng.uniform(-1, 1, 30)]
    w = grid_search_weights(S, y, step=0.1)
    best = max(_oracle_accuracy(S, y, c) for c in lattice_oracle(0.1))
    assert _oracle_accuracy(S, y, w.as_tuple()) == best == 30
    assert w.a1 >= max(w.a2, w.a3)


@given(st.integers(0, 2**32 - 1), st.integers(1, 25))
def test_grid_search_against_exhaustive_oracle(seed, n):
    rng = np.random.default_rng(seed)
    S = rng.uniform(-1, 1, size=(n, 3))
    y = rng.integers(0, 2, size=n)
    w = grid_search_weights(S, y, step=0.1)
    cands = lattice_oracle(0.1)
    best = max(_oracle_accuracy(S, y, c) for c in cands)
    tied = [c for c in cands if _oracle_accuracy(S, y, c) == best]
    dmin = min(math.dist(c, (1 / 3,) * 3) for c in tied)
    near = sorted(c for c in tied if math.dist(c, (1 / 3,) * 3) <= dmin + 1e-12)
    assert w.as_tuple() == pytest.approx(near[0], abs=1e-12)
    assert abs(sum(w.as_tuple()) - 1) <= 1e-12


@pytest.mark.parametrize("scores, label, value", [([0.2, 0.4], 1, 0.3), ([-1], 0, -1.0), ([-0.5, 0.5], 0, 0.0)])
def test_subject_decision(scores, label, value):
    lab, v = subject_decision(scores)
    assert lab == label and v == pytest.approx(value, abs=1e-15)


def test_metrics_reference_row():
    acc, sens, spec = compute_metrics(ConfusionCounts(tp=18, fp=3, tn=17, fn=2))
    assert (acc, sens, spec) == pytest.approx((0.875, 0.90, 0.85), abs=1e-12)


@pytest.mark.parametrize("c, want", [(ConfusionCounts(10, 0, 10, 0), (1.0, 1.0, 1.0)),
                                     (ConfusionCounts(0, 10, 0, 10), (0.0, 0.0, 0.0))])
def test_metrics_extremes(c, want):
    assert compute_metrics(c) == want


def test_metrics_undefined_rates():
    acc, sens, spec = compute_metrics(ConfusionCounts(tp=3, fn=1))
    assert acc == 0.75 and sens == 0.75 and spec is None
    with pytest.raises(ValueError):
        compute_metrics(ConfusionCounts())


def test_counts_from_labels():
    c = ConfusionCounts.from_labels([1, 1, 0, 0, 1], [1, 0, 0, 1, 1])
    assert (c.tp, c.fn, c.tn, c.fp) == (2, 1, 1, 1)
    assert c.total == 5
