import csv
import json

import pytest

from mrcst.cli import main
from mrcst.synthetic import make_segments, write_sakar_format


@pytest.fixture
def sakar_file(tmp_path):
    p = tmp_path / "train_data.txt"
    write_sakar_format(p, make_segments(40, 26, 26, seed=0))
    return p


@pytest.fixture
def small_file(tmp_path, small_segments):
    p = tmp_path / "small.txt"
    write_sakar_format(p, [s for s in small_segments])
    return p


def _small_args(path, out):
    # the small fixture has 5 features, so load it through the generic reader
    return ["--input", str(path), "--format", "csv", "--out", str(out)]


def test_transform_counts_and_determinism(tmp_path, sakar_file):
    out1, out2 = tmp_path / "a", tmp_path / "b"
    for out in (out1, out2):
        assert main(["transform", "--input", str(sakar_file), "--format", "sakar", "--q", "3",
                     "--seed", "4", "--out", str(out)]) == 0
    manifest = json.loads((out1 / "manifest.json").read_text())
    assert manifest["rows"] == {"ef": 240, "es": 720, "et": 720}
    assert manifest["config"]["operators"]["q"] == 3 and manifest["seed"] == 4
    for name in ("ef.csv", "es.csv", "et.csv"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()
    other = json.loads((out2 / "manifest.json").read_text())
    manifest["config"].pop("out"), other["config"].pop("out")
    assert manifest == other
    with (out1 / "ef.csv").open() as fh:
        assert next(csv.reader(fh))[:3] == ["subject_id", "label", "f1"]


def test_transform_global_normalized(tmp_path, sakar_file):
    assert main(["transform", "--input", str(sakar_file), "--format", "sakar", "--out", str(tmp_path),
                 "--normalized", "global"]) == 0
    rows = list(csv.reader((tmp_path / "et.csv").open()))[1:]
    vals = [float(v) for r in rows for v in r[2:]]
    assert min(vals) == 0.0 and max(vals) == 1.0


def test_missing_input(tmp_path, capsys):
    missing = tmp_path / "nope.txt"
    assert main(["transform", "--input", str(missing), "--format", "sakar", "--out", str(tmp_path)]) == 2
    assert str(missing) in capsys.readouterr().err


def test_malformed_input_is_runtime_error(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("1,2,3\n")
    assert main(["transform", "--input", str(p), "--format", "sakar", "--out", str(tmp_path)]) == 1


def test_unknown_method(tmp_path, small_file):
    assert main(["evaluate", *_small_args(small_file, tmp_path), "--method", "magic"]) == 2


def test_unknown_format_rejected_by_parser(tmp_path, small_file):
    with pytest.raises(SystemExit) as e:
        main(["evaluate", "--input", str(small_file), "--format", "xls"])
    assert e.value.code == 2


def test_config_field_path_reported(tmp_path, small_file, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"operators": {"q": 0}}))
    assert main(["evaluate", *_small_args(small_file, tmp_path), "--config", str(cfg)]) == 2
    assert "operators.q" in capsys.readouterr().err
    cfg.write_text(json.dumps({"fusion": {"stepsize": 0.1}}))
    assert main(["evaluate", *_small_args(small_file, tmp_path), "--config", str(cfg)]) == 2
    assert "fusion.stepsize" in capsys.readouterr().err


def test_flags_override_config(tmp_path, small_file):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"runs": 3, "method": "es", "seed": 9,
                               "classifiers": {"svm": {"C": 5.0}}}))
    assert main(["evaluate", *_small_args(small_file, tmp_path / "o"), "--config", str(cfg), "--runs", "1"]) == 0
    rep = json.loads((tmp_path / "o" / "report.json").read_text())
    assert rep["config"]["runs"] == 1 and rep["config"]["seed"] == 9 and rep["method"] == "es"
    assert rep["config"]["classifiers"]["svm"]["C"] == 5.0
    assert len(rep["folds"]) == 8


def test_evaluate_ef_equals_forced_mrcst(tmp_path, small_file):
    a, b = tmp_path / "ef", tmp_path / "mrcst"
    assert main(["evaluate", *_small_args(small_file, a), "--method", "ef", "--runs", "2"]) == 0
    assert main(["evaluate", *_small_args(small_file, b), "--method", "mrcst", "--runs", "2",
                 "--weights", "1", "0", "0"]) == 0
    ra = json.loads((a / "report.json").read_text())
    rb = json.loads((b / "report.json").read_text())
    assert [f["predicted"] for f in ra["folds"]] == [f["predicted"] for f in rb["folds"]]
    assert ra["accuracy_mean"] == rb["accuracy_mean"]


def test_ablation_table(tmp_path, tiny_segments):
    p = tmp_path / "tiny.csv"
    from mrcst.dataset import write_generic_csv
    write_generic_csv(p, tiny_segments)
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"classifiers": {"rf": {"n_trees": 5}}}))
    assert main(["ablation", "--input", str(p), "--format", "csv", "--runs", "1", "--config", str(cfg),
                 "--out", str(tmp_path / "abl")]) == 0
    rows = list(csv.reader((tmp_path / "abl" / "ablation.csv").open()))
    assert rows[0] == ["method", "classifier", "accuracy", "sensitivity", "specificity"]
    assert [(r[0], r[1]) for r in rows[1:]] == [(m, c) for m in ("none", "ef", "es", "et", "mrcst")
                                                for c in ("svm", "rf")]
    assert all("±" in r[2] for r in rows[1:])
    meta = json.loads((tmp_path / "abl" / "ablation.json").read_text())
    assert meta["config"]["classifiers"]["rf"]["n_trees"] == 5 and len(meta["cells"]) == 10
