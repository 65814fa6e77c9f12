"""Base classifiers (polynomial-kernel SVM, random forest) behind one train/score contract.

Scores live in [-1, 1]; the predicted label is 1 iff the score is strictly positive.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
from sklearn.ensemble import RandomForestClassifier
from sklearn.svm import SVC

KINDS = ("svm", "rf")


@dataclass(frozen=True)
class ClassifierSpec:
    kind: str = "svm"
    # svm
    C: float = 10.0
    gamma: float = 0.005
    degree: int = 3
    coef0: float = 1.0
    tol: float = 1e-3
    max_iter: int = 1_000_000
    # rf
    n_trees: int = 50
    max_depth: int | None = None
    max_features: str = "sqrt"
    bootstrap: bool = True
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if not self.C > 0:
            raise ValueError("C must be > 0")
        if not self.gamma > 0:
            raise ValueError("gamma must be > 0")
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")

    def to_dict(self) -> dict:
        d = asdict(self)
        keep = ("C", "gamma", "degree", "coef0", "tol", "max_iter") if self.kind == "svm" else (
            "n_trees", "max_depth", "max_features", "bootstrap", "seed")
        return {"kind": self.kind, **{k: d[k] for k in keep}}


@dataclass(frozen=True)
class TrainedModel:
    spec: ClassifierSpec
    n_features: int
    estimator: object

    @property
    def alphas(self) -> np.ndarray:
        """Lagrange multipliers of the support vectors (SVM only)."""
        return np.abs(self.estimator.dual_coef_[0])

    @property
    def alpha_y(self) -> np.ndarray:
        return self.estimator.dual_coef_[0].copy()


def _as_pm1(y) -> np.ndarray:
    y = np.asarray(y).astype(int)
    if not np.isin(y, (0, 1)).all():
        raise ValueError("labels must be 0 or 1")
    return np.where(y == 1, 1, -1)


def train(spec: ClassifierSpec, X, y, seed: int | None = None) -> TrainedModel:
    """Fit ``spec`` on (X, y); ``seed`` overrides the forest seed."""
    X = np.asarray(X, dtype=float)
    y = _as_pm1(y)
    if X.ndim != 2 or len(X) != len(y):
        raise ValueError("X must be 2-D with one label per row")
    if len(np.unique(y)) < 2:
        raise ValueError("training set must contain both classes")
    if spec.kind == "svm":
        est = SVC(C=spec.C, kernel="poly", gamma=spec.gamma, degree=spec.degree, coef0=spec.coef0,
                  tol=spec.tol, max_iter=spec.max_iter, shrinking=True, cache_size=200)
    else:
        est = RandomForestClassifier(
            n_estimators=spec.n_trees, criterion="gini", max_depth=spec.max_depth,
            max_features=spec.max_features, bootstrap=spec.bootstrap, min_samples_leaf=1,
            random_state=int(spec.seed if seed is None else seed), n_jobs=1)
    est.fit(X, y)
    return TrainedModel(spec, X.shape[1], est)


def decision_function(model: TrainedModel, X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != model.n_features:
        raise ValueError(f"expected {model.n_features} features, got {X.shape[1]}")
    if model.spec.kind == "svm":
        return model.estimator.decision_function(X)
    return tree_votes(model, X)


def tree_votes(model: TrainedModel, X) -> np.ndarray:
    """Fraction of trees voting for class 1."""
    est = model.estimator
    pos = int(np.flatnonzero(est.classes_ == 1)[0])
    votes = np.zeros(len(X))
    for tree in est.estimators_:
        votes += np.argmax(tree.predict_proba(X), axis=1) == pos
    return votes / len(est.estimators_)


def score(model: TrainedModel, X) -> np.ndarray | float:
    """tanh of the SVM decision value, or 2 * (PD vote fraction) - 1 for the forest."""
    single = np.ndim(X) == 1
    raw = decision_function(model, X)
    s = np.tanh(raw) if model.spec.kind == "svm" else 2.0 * raw - 1.0
    return float(s[0]) if single else s


def predict(model: TrainedModel, X):
    return (np.asarray(score(model, X)) > 0).astype(int)


def dump_model(model: TrainedModel, path) -> None:
    """Plain-text parameter dump for debugging, one value per line."""
    lines = [f"kind {model.spec.kind}", f"n_features {model.n_features}"]
    est = model.estimator
    if model.spec.kind == "svm":
        lines.append(f"bias {float(est.intercept_[0])!r}")
        for ay, sv in zip(est.dual_coef_[0], est.support_vectors_):
            lines.append(f"alpha_y {float(ay)!r}")
            lines.extend(f"sv {float(v)!r}" for v in sv)
    else:
        for t, tree in enumerate(est.estimators_):
            tr = tree.tree_
            lines.append(f"tree {t} nodes {tr.node_count}")
            for i in range(tr.node_count):
                lines.append(f"node {i} {tr.feature[i]} {float(tr.threshold[i])!r} "
                             f"{tr.children_left[i]} {tr.children_right[i]} {int(np.argmax(tr.value[i][0]))}")
    Path(path).write_text("\n".join(lines) + "\n")
