"""Run configuration: nested dataclasses, JSON round trip and validation."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .classifiers import ClassifierSpec
from .envelope import TRIM_MODES

METHODS = ("none", "ef", "es", "et", "mrcst")
FORMATS = ("sakar", "maxlittle", "csv")
NORMS = ("minmax", "zscore")
FUSION_MODES = ("score", "label")
DEFAULT_Q = {"sakar": 3, "maxlittle": 2, "csv": 2}


class ConfigError(ValueError):
    def __init__(self, path: str, msg: str):
        super().__init__(f"{path}: {msg}")
        self.path = path


@dataclass
class DatasetConfig:
    path: str | None = None
    format: str = "csv"


@dataclass
class OperatorConfig:
    q: int | None = None
    depth: int = 1
    trim: str = "retained"
    restarts: int = 1


@dataclass
class FusionConfig:
    grid_step: float = 0.1
    mode: str = "score"
    weights: list | None = None  # fixed (a1, a2, a3); skips the grid search


@dataclass
class RunConfig:
    dataset: DatasetConfig = field(default_factory=DatasetConfig)
    operators: OperatorConfig = field(default_factory=OperatorConfig)
    normalization: str = "minmax"
    classifiers: dict = field(default_factory=lambda: {"svm": ClassifierSpec("svm"),
                                                       "rf": ClassifierSpec("rf")})
    method: str = "mrcst"
    classifier: str = "svm"
    fusion: FusionConfig = field(default_factory=FusionConfig)
    runs: int = 10
    seed: int = 0
    out: str = "out"
    jobs: int = 1

    @property
    def q(self) -> int:
        return self.operators.q if self.operators.q is not None else DEFAULT_Q[self.dataset.format]

    def resolved(self) -> "RunConfig":
        """Copy with defaults that depend on other fields filled in."""
        cfg = from_dict(to_dict(self))
        cfg.operators.q = self.q
        return cfg

    def validate(self) -> "RunConfig":
        def check(ok, path, msg):
            if not ok:
                raise ConfigError(path, msg)

        check(self.dataset.format in FORMATS, "dataset.format", f"must be one of {FORMATS}")
        q = self.operators.q
        check(q is None or (isinstance(q, int) and q >= 1), "operators.q", "must be an integer >= 1")
        check(isinstance(self.operators.depth, int) and self.operators.depth >= 1,
              "operators.depth", "must be an integer >= 1")
        check(self.operators.trim in TRIM_MODES, "operators.trim", f"must be one of {TRIM_MODES}")
        check(isinstance(self.operators.restarts, int) and self.operators.restarts >= 1,
              "operators.restarts", "must be an integer >= 1")
        check(self.normalization in NORMS, "normalization", f"must be one of {NORMS}")
        check(self.method in METHODS, "method", f"must be one of {METHODS}")
        check(self.classifier in ("svm", "rf"), "classifier", "must be 'svm' or 'rf'")
        check(self.classifier in self.classifiers, f"classifiers.{self.classifier}", "missing")
        step = self.fusion.grid_step
        check(isinstance(step, (int, float)) and 0 < step <= 1 and abs(round(1 / step) * step - 1) < 1e-9,
              "fusion.grid_step", "must be in (0, 1] and divide 1")
        check(self.fusion.mode in FUSION_MODES, "fusion.mode", f"must be one of {FUSION_MODES}")
        w = self.fusion.weights
        if w is not None:
            check(len(w) == 3 and all(0 <= v <= 1 for v in w) and abs(sum(w) - 1) <= 1e-12,
                  "fusion.weights", "must be three values in [0, 1] summing to 1")
        check(isinstance(self.runs, int) and self.runs >= 1, "runs", "must be an integer >= 1")
        check(isinstance(self.seed, int) and self.seed >= 0, "seed", "must be a non-negative integer")
        check(isinstance(self.jobs, int) and self.jobs >= 1, "jobs", "must be an integer >= 1")
        return self


def to_dict(cfg: RunConfig) -> dict:
    d = asdict(cfg)
    d["classifiers"] = {k: v.to_dict() for k, v in cfg.classifiers.items()}
    return d


def _build(cls, data, path):
    if not isinstance(data, dict):
        raise ConfigError(path, "expected an object")
    names = {f.name for f in fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigError(f"{path}.{unknown[0]}" if path else unknown[0], "unknown field")
    return data


def from_dict(data: dict, base: RunConfig | None = None) -> RunConfig:
    """Overlay ``data`` on ``base`` (defaults when omitted)."""
    cfg = base if base is not None else RunConfig()
    _build(RunConfig, data, "")
    for name, sub_cls in (("dataset", DatasetConfig), ("operators", OperatorConfig), ("fusion", FusionConfig)):
        if name in data:
            sub = _build(sub_cls, data[name], name)
            current = asdict(getattr(cfg, name))
            current.update(sub)
            setattr(cfg, name, sub_cls(**current))
    if "classifiers" in data:
        specs = dict(cfg.classifiers)
        if not isinstance(data["classifiers"], dict):
            raise ConfigError("classifiers", "expected an object")
        for kind, params in data["classifiers"].items():
            if kind not in ("svm", "rf"):
                raise ConfigError(f"classifiers.{kind}", "unknown classifier")
            _build(ClassifierSpec, params, f"classifiers.{kind}")
            merged = asdict(specs.get(kind, ClassifierSpec(kind)))
            merged.update(params)
            merged["kind"] = kind
            try:
                specs[kind] = ClassifierSpec(**merged)
            except (TypeError, ValueError) as e:
                raise ConfigError(f"classifiers.{kind}", str(e)) from None
        cfg.classifiers = specs
    for name in ("normalization", "method", "classifier", "runs", "seed", "out", "jobs"):
        if name in data:
            setattr(cfg, name, data[name])
    return cfg


def load_config(path, base: RunConfig | None = None) -> RunConfig:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ConfigError(str(path), f"invalid JSON ({e})") from None
    return from_dict(data, base)
