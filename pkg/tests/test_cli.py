import csv
import json

import pytest

from barrier_spectra.cli import run
from barrier_spectra.config import ExperimentConfig, build_config, read_config_file
from barrier_spectra.core import in_gamma_strip
from barrier_spectra.errors import ValidationError


def test_config_file_and_overrides(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text("# sweep settings\npotential = box:A=1,Q=1\nR_list = 25, 50\ngamma = 2  # strength\n")
    assert read_config_file(path) == {"potential": "box:A=1,Q=1", "R_list": (25.0, 50.0), "gamma": 2.0}
    cfg = build_config(path, {"gamma": 0.5, "R_list": None, "seed": 3})
    assert cfg.gamma == 0.5 and cfg.R_list == (25.0, 50.0) and cfg.seed == 3


@pytest.mark.parametrize("text,param", [("foo = 1\n", "foo"), ("gamma = -1\n", "gamma"), ("gamma 1\n", "gamma"),
                                        ("R_list = 25, 0.5\n", "R_list"), ("potential = box:A=1\n", "Q")])
def test_config_errors_name_culprit(tmp_path, text, param):
    path = tmp_path / "bad.cfg"
    path.write_text(text)
    with pytest.raises(ValidationError) as info:
        build_config(path)
    assert info.value.param == param


def test_config_defaults():
    cfg = ExperimentConfig()
    assert cfg.R_list == (25.0, 50.0, 100.0, 200.0)
    assert cfg.workers >= 1
    assert cfg.as_dict()["R_list"] == [25.0, 50.0, 100.0, 200.0]


def read_rows(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_eigs_rows_lie_in_strip(tmp_path, capsys):
    assert run(["eigs", "--R", "20", "--out", str(tmp_path)]) == 0
    rows = read_rows(tmp_path / "eigs.csv")
    assert len(rows) == 29
    assert list(rows[0]) == ["R", "re_lambda", "im_lambda", "re_z", "im_z", "multiplicity", "residual"]
    assert all(in_gamma_strip(complex(float(r["re_lambda"]), float(r["im_lambda"])), 1.0) for r in rows)
    assert json.loads(capsys.readouterr().out)["count"] == 29


def test_error_exit(tmp_path, capsys):
    assert run(["eigs", "--potential", "box:A=1,Z=2", "--out", str(tmp_path)]) == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "ValidationError" and err["param"] == "Z" and err["schema"] == 1


def test_sweep_monotone_and_bounded(tmp_path):
    assert run(["sweep", "--R-list", "25,50", "--threads", "1", "--out", str(tmp_path)]) == 0
    report = json.loads((tmp_path / "sweep_report.json").read_text())
    per_r = report["per_R"]
    assert [p["count"] for p in per_r] == [42, 139]
    assert all(p["count"] <= p["count_bound_compact"] for p in per_r)
    assert report["onset"]["count_compact"] == 25.0
    rows = read_rows(tmp_path / "sweep_eigs.csv")
    assert len(rows) == 42 + 139


def test_baselines_csv(tmp_path):
    assert run(["baselines", "--R-list", "25", "--threads", "1", "--out", str(tmp_path)]) == 0
    (row,) = read_rows(tmp_path / "baselines.csv")
    assert int(row["count"]) <= float(row["count_bound"]) <= float(row["count_baseline"])


def test_jensen_demo_json(tmp_path):
    assert run(["jensen-demo", "--potential", "box:A=1,Q=1", "--R", "30", "--out", str(tmp_path)]) == 0
    out = json.loads((tmp_path / "jensen_demo.json").read_text())
    assert out["ok"] and out["bound"] >= out["winding_count"] == out["eigenvalue_count"]


@pytest.mark.slow
def test_verify_rerun_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(["verify", "--seed", "42", "--out", str(a)]) == 0
    assert run(["verify", "--seed", "42", "--out", str(b)]) == 0
    ja = json.loads((a / "verify.json").read_text())
    jb = json.loads((b / "verify.json").read_text())
    ja["config"].pop("out"), jb["config"].pop("out")
    assert ja == jb and ja["passed"]
