"""Leave-one-subject-out evaluation of the reconstruction channels and their fusion.

Protocol per run and held-out subject h:

* every subject is transformed on its own (types A, B, C), with a clustering
  seed derived from (master seed, run, subject id);
* each channel gets a normalizer and a classifier fitted on the other subjects;
* fusion weights are tuned by an inner leave-one-subject-out over the
  training subjects only;
* the held-out subject's sample scores are averaged per channel, fused and
  thresholded at 0, giving one decision per subject.

A model trained without subjects {a, b} is the same whichever of them is the
outer fold, so inner models are keyed by the excluded set and shared.
"""
from __future__ import annotations

import csv
import hashlib
import json
import logging
import zlib
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import classifiers as clf
from .clustering import transform_type_b
from .config import RunConfig, to_dict
from .convolution import transform_type_c
from .dataset import (DatasetError, SubjectSegment, TransformedDataset, apply_normalizer, as_dataset,
                      fit_normalizer, split_loso)
from .envelope import transform_type_a
from .fusion import (ConfusionCounts, FusionWeights, compute_metrics, decide, fuse, grid_search_weights,
                     subject_decision)

log = logging.getLogger(__name__)

CHANNELS = ("ef", "es", "et")
CHANNEL_INDEX = {"none": 0, "ef": 1, "es": 2, "et": 3}


# ----------------------------------------------------------------------------
# transforms

def build_channels(segments: Sequence[SubjectSegment], cfg: RunConfig, run: int,
                   names: Sequence[str] = ("none", *CHANNELS)) -> dict[str, TransformedDataset]:
    out = {}
    trim = cfg.operators.trim
    if "none" in names:
        out["none"] = as_dataset(segments)
    if "ef" in names:
        out["ef"] = transform_type_a(segments, trim)
    if "es" in names or "et" in names:
        es, Y = transform_type_b(segments, cfg.q, cfg.operators.depth, cfg.seed, trim,
                                 cfg.operators.restarts, run)
        out["es"] = es
        out["et"] = transform_type_c(Y, es)
    return {k: out[k] for k in names}


def channels_for(method: str) -> tuple[str, ...]:
    return CHANNELS if method == "mrcst" else (method,)


# ----------------------------------------------------------------------------
# fitting

def model_seed(master: int, run: int, channel: str, exclude) -> int:
    ss = np.random.SeedSequence([int(master), int(run), CHANNEL_INDEX[channel],
                                 *sorted(zlib.crc32(s.encode()) for s in exclude)])
    return int(ss.generate_state(1)[0])


@dataclass(frozen=True)
class ChannelFit:
    normalizer: object
    model: clf.TrainedModel


def fit_channel(data: TransformedDataset, exclude, spec: clf.ClassifierSpec, norm: str,
                seed: int) -> ChannelFit:
    exclude = set(exclude)
    train = data.subset(s for s in data.subject_ids if s not in exclude)
    if len(set(train.labels)) < 2:
        raise DatasetError(f"training set without subjects {sorted(exclude)} lost a class")
    normalizer = fit_normalizer(train, norm)
    model = clf.train(spec, apply_normalizer(normalizer, train.X), train.y, seed=seed)
    return ChannelFit(normalizer, model)


def sample_scores(fit: ChannelFit, rows) -> np.ndarray:
    return np.asarray(clf.score(fit.model, apply_normalizer(fit.normalizer, rows)), dtype=float)


def channel_subject_score(samples: np.ndarray, mode: str) -> float:
    if mode == "label":
        samples = np.where(samples > 0, 1.0, -1.0)
    return subject_decision(samples)[1]


def _fit_and_score(args):
    data, spec, norm, jobs = args
    out = []
    for exclude, seed in jobs:
        fit = fit_channel(data, exclude, spec, norm, seed)
        out.append({s: sample_scores(fit, data.block(s)) for s in exclude})
    return out


def _digest(data: TransformedDataset) -> str:
    h = hashlib.sha1()
    for sid, lab, b in zip(data.subject_ids, data.labels, data.blocks):
        h.update(sid.encode() + b"\0" + bytes([lab]))
        h.update(np.ascontiguousarray(b).tobytes())
    return h.hexdigest()


class ScoreBook:
    """Memo of per-sample held-out scores keyed by (channel data, classifier, excluded subjects)."""

    def __init__(self):
        self._scores: dict = {}
        self._digests: dict = {}
        self.transforms: dict = {}

    def digest(self, data: TransformedDataset) -> str:
        hit = self._digests.get(id(data))
        if hit is None or hit[0] is not data:
            hit = self._digests[id(data)] = (data, _digest(data))
        return hit[1]

    def key(self, data, spec, norm, seed, exclude):
        return (self.digest(data), repr(spec.to_dict()), norm, seed, frozenset(exclude))

    def fill(self, channel: str, data: TransformedDataset, cfg: RunConfig, run: int,
             excludes: Sequence[frozenset]) -> None:
        spec = cfg.classifiers[cfg.classifier]
        digest = self.digest(data)
        spec_key = repr(spec.to_dict())
        todo: dict[str, list] = {}
        for ex in excludes:
            seed = model_seed(cfg.seed, run, channel, ex) if spec.kind == "rf" else 0
            k = (digest, spec_key, cfg.normalization, seed, ex)
            if k in self._scores:
                continue
            # group by the first excluded subject so each task owns one outer fold
            owner = min(ex, key=data.subject_ids.index)
            todo.setdefault(owner, []).append((k, ex, seed))
        if not todo:
            return
        owners = sorted(todo, key=data.subject_ids.index)
        tasks = [(data, spec, cfg.normalization, [(ex, seed) for _, ex, seed in todo[o]]) for o in owners]
        if cfg.jobs > 1 and len(tasks) > 1:
            with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
                results = list(pool.map(_fit_and_score, tasks))
        else:
            results = [_fit_and_score(t) for t in tasks]
        for o, res in zip(owners, results):
            for (k, _, _), scores in zip(todo[o], res):
                self._scores[k] = scores

    def get(self, channel, data, cfg, run, exclude, subject) -> np.ndarray:
        spec = cfg.classifiers[cfg.classifier]
        seed = model_seed(cfg.seed, run, channel, exclude) if spec.kind == "rf" else 0
        return self._scores[self.key(data, spec, cfg.normalization, seed, exclude)][subject]


# ----------------------------------------------------------------------------
# reports

@dataclass
class FoldRecord:
    run: int
    subject_id: str
    true_label: int
    channel_scores: dict
    fused_score: float
    predicted: int
    weights: tuple | None = None


@dataclass
class EvaluationReport:
    config: dict
    method: str
    classifier: str
    folds: list = field(default_factory=list)
    per_run: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    dataset_info: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "config": self.config,
            "method": self.method,
            "classifier": self.classifier,
            **self.summary,
            "weights_per_fold": [list(f.weights) if f.weights is not None else None for f in self.folds],
            "folds": [
                {"run": f.run, "subject_id": f.subject_id, "true_label": f.true_label,
                 "channel_scores": f.channel_scores, "fused_score": f.fused_score,
                 "predicted": f.predicted,
                 "weights": list(f.weights) if f.weights is not None else None}
                for f in self.folds],
            "per_run": self.per_run,
            "dataset": self.dataset_info,
            "protocol": PROTOCOL,
        }

    def write(self, out_dir) -> None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(json.dumps(self.to_json(), indent=2, sort_keys=False) + "\n")
        write_folds_csv(out / "folds.csv", self)


PROTOCOL = ("subject-level leave-one-subject-out; per-fold train-only normalization; inner "
            "leave-one-subject-out grid search for fusion weights; subject score = mean sample score, "
            "label 1 iff > 0; metrics in percent, mean and population std over runs")


def write_folds_csv(path, report: EvaluationReport) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["run", "subject_id", "true_label", "score_none", "score_ef", "score_es", "score_et",
                    "fused_score", "predicted", "w1", "w2", "w3"])
        for f in report.folds:
            cs = [f.channel_scores.get(c) for c in ("none", *CHANNELS)]
            ws = list(f.weights) if f.weights is not None else ["", "", ""]
            w.writerow([f.run, f.subject_id, f.true_label,
                        *["" if v is None else repr(v) for v in cs],
                        repr(f.fused_score), f.predicted, *[repr(v) if v != "" else "" for v in ws]])


def summarize(folds: Sequence[FoldRecord], runs: int) -> tuple[list, dict]:
    per_run = []
    for r in range(runs):
        recs = [f for f in folds if f.run == r]
        counts = ConfusionCounts.from_labels([f.true_label for f in recs], [f.predicted for f in recs])
        acc, sens, spec = compute_metrics(counts)
        per_run.append({"run": r, "tp": counts.tp, "fp": counts.fp, "tn": counts.tn, "fn": counts.fn,
                        "accuracy": 100 * acc,
                        "sensitivity": None if sens is None else 100 * sens,
                        "specificity": None if spec is None else 100 * spec})
    summary = {}
    for m in ("accuracy", "sensitivity", "specificity"):
        vals = [p[m] for p in per_run if p[m] is not None]
        summary[f"{m}_mean"] = float(np.mean(vals)) if vals else None
        summary[f"{m}_std"] = float(np.std(vals)) if vals else None
    return per_run, summary


# ----------------------------------------------------------------------------
# driver

def _check_input(segments):
    split_loso(segments)
    if len({s.label for s in segments}) < 2:
        raise DatasetError("evaluation needs subjects of both classes")


def _run_channels(segments, cfg, run, book: ScoreBook, names):
    key = ("transform", run, cfg.seed, cfg.q, cfg.operators.depth, cfg.operators.trim,
           cfg.operators.restarts, tuple(s.subject_id for s in segments))
    cached = book.transforms.get(key, {})
    missing = [n for n in names if n not in cached]
    if missing:
        cached = {**cached, **build_channels(segments, cfg, run, missing)}
        book.transforms[key] = cached
    return {n: cached[n] for n in names}


def run_loso(segments: Sequence[SubjectSegment], cfg: RunConfig, book: ScoreBook | None = None) -> EvaluationReport:
    cfg.validate()
    _check_input(segments)
    book = book if book is not None else ScoreBook()
    ids = [s.subject_id for s in segments]
    labels = {s.subject_id: s.label for s in segments}
    names = channels_for(cfg.method)
    fixed = FusionWeights(*cfg.fusion.weights) if cfg.fusion.weights is not None else None
    mode = cfg.fusion.mode
    tune = cfg.method == "mrcst" and fixed is None

    folds = []
    for run in range(cfg.runs):
        channels = _run_channels(segments, cfg, run, book, names)
        excludes = [frozenset([h]) for h in ids]
        if tune:
            excludes += [frozenset([a, b]) for i, a in enumerate(ids) for b in ids[i + 1:]]
        for name in names:
            book.fill(name, channels[name], cfg, run, excludes)

        def subj_score(name, exclude, subject):
            return channel_subject_score(book.get(name, channels[name], cfg, run, exclude, subject), mode)

        for h in ids:
            scores = {n: subj_score(n, {h}, h) for n in names}
            weights = None
            if cfg.method == "mrcst":
                if fixed is not None:
                    w = fixed
                else:
                    inner = [j for j in ids if j != h]
                    S = [[subj_score(n, {h, j}, j) for n in CHANNELS] for j in inner]
                    w = grid_search_weights(S, [labels[j] for j in inner], cfg.fusion.grid_step)
                fused = fuse([scores[n] for n in CHANNELS], w)
                weights = w.as_tuple()
            else:
                fused = scores[cfg.method]
            folds.append(FoldRecord(run, h, labels[h], scores, float(fused), decide(fused), weights))
        log.info("run %d/%d done", run + 1, cfg.runs)

    per_run, summary = summarize(folds, cfg.runs)
    info = {"n_subjects": len(segments), "n_rows": int(sum(s.n_samples for s in segments)),
            "n_features": int(segments[0].n_features),
            "n_positive": int(sum(s.label for s in segments))}
    return EvaluationReport(to_dict(cfg.resolved()), cfg.method, cfg.classifier, folds, per_run, summary, info)


def fold_artifacts(segments: Sequence[SubjectSegment], cfg: RunConfig, held_out: str, run: int = 0) -> dict:
    """Everything fitted for one outer fold, computed directly (no memo).

    Returns ``{"fits": {channel: ChannelFit}, "weights": FusionWeights | None}``.
    """
    cfg.validate()
    names = channels_for(cfg.method)
    channels = build_channels(segments, cfg, run, names)
    spec = cfg.classifiers[cfg.classifier]
    ids = [s.subject_id for s in segments]

    def seed(name, ex):
        return model_seed(cfg.seed, run, name, ex) if spec.kind == "rf" else 0

    fits = {n: fit_channel(channels[n], {held_out}, spec, cfg.normalization, seed(n, {held_out}))
            for n in names}
    weights = None
    if cfg.method == "mrcst":
        if cfg.fusion.weights is not None:
            weights = FusionWeights(*cfg.fusion.weights)
        else:
            inner = [j for j in ids if j != held_out]
            S = []
            for j in inner:
                row = []
                for n in CHANNELS:
                    fit = fit_channel(channels[n], {held_out, j}, spec, cfg.normalization, seed(n, {held_out, j}))
                    row.append(channel_subject_score(sample_scores(fit, channels[n].block(j)), cfg.fusion.mode))
                S.append(row)
            labels = {s.subject_id: s.label for s in segments}
            weights = grid_search_weights(S, [labels[j] for j in inner], cfg.fusion.grid_step)
    return {"fits": fits, "weights": weights}


ABLATION_CELLS = [(m, c) for m in ("none", "ef", "es", "et", "mrcst") for c in ("svm", "rf")]


def run_ablation(segments, cfg: RunConfig, cells=ABLATION_CELLS) -> list[EvaluationReport]:
    book = ScoreBook()
    reports = []
    for method, kind in cells:
        sub = cfg.resolved()
        sub.method, sub.classifier = method, kind
        reports.append(run_loso(segments, sub, book))
        log.info("ablation cell %s/%s: accuracy %.2f", method, kind, reports[-1].summary["accuracy_mean"])
    return reports
