import csv
import json

import pytest

from tactile_grasp import cli
from tactile_grasp.harness import (BatchReport, FingerDropSpec, HarnessConfig, InputError, ObjectRow,
                                   OutputError, config_from_dict, dataset_to_yaml, export_trace,
                                   load_config, load_dataset, run_batch, trial_seed)
from tactile_grasp.kinematics import DEG, Digit
from tactile_grasp.trial import TRACE_COLUMNS, TrialResult, run_grasp
from tactile_grasp.world import SimConfig


def _result(success=True, name="o"):
    return TrialResult(name, 0, success, "none" if success else "dropped", {}, 0.0, 0.0)


@pytest.fixture(scope="module")
def small_batch(tmp_path_factory):
    out = tmp_path_factory.mktemp("batch")
    ds = load_dataset()[:2]
    return run_batch(ds, HarnessConfig(), 2, seed=7, out_dir=out), out


def test_default_dataset():
    ds = load_dataset()
    assert len(ds) == 10
    assert ds[0].name == "Bottle" and ds[-1].name == "Soft Toy"


def test_dataset_roundtrip(tmp_path):
    ds = load_dataset()
    p = tmp_path / "d.yaml"
    p.write_text(dataset_to_yaml(ds))
    assert load_dataset(p) == ds


def test_dataset_errors(tmp_path):
    p = tmp_path / "empty.yaml"
    p.write_text("objects: []\n")
    with pytest.raises(InputError):
        load_dataset(p)
    with pytest.raises(InputError):
        load_dataset(tmp_path / "missing.yaml")
    p.write_text("objects:\n  - {name: a, shape: box}\n")
    with pytest.raises(InputError):
        load_dataset(p)


def test_config_overrides_and_degrees():
    cfg = config_from_dict({"controller": {"base_step_deg": 2.0, "easing": {"kappa1": 3.5}},
                            "slip": {"theta_slip": 1.0}, "sim": {"physics_dt": 0.002}})
    assert cfg.controller.base_step == pytest.approx(2 * DEG)
    assert cfg.controller.easing.kappa1 == 3.5
    assert cfg.controller.slip.theta_slip == 1.0
    assert cfg.sim.substeps == 5


def test_config_errors(tmp_path):
    with pytest.raises(InputError):
        config_from_dict({"controller": {"bogus": 1}})
    with pytest.raises(InputError):
        config_from_dict({"nope": {}})
    with pytest.raises(InputError):
        config_from_dict({"controller": {"easing": {"a1": 0.3, "a2": 0.3}}})
    assert load_config(None) == HarnessConfig()


def test_drop_spec_parse():
    spec = FingerDropSpec.parse("RF,LF@5.0")
    assert spec.digits == (Digit.RF, Digit.LF) and spec.t == 5.0
    with pytest.raises(InputError):
        FingerDropSpec.parse("RF LF")
    with pytest.raises(InputError):
        FingerDropSpec.parse("XX@1")


def test_trial_seed_xor():
    assert trial_seed(5, 3) == 6
    assert trial_seed(0, 199) == 199


def test_trial_result_invariant():
    with pytest.raises(ValueError):
        TrialResult("o", 0, True, "dropped", {}, 0.0, 0.0)
    with pytest.raises(ValueError):
        TrialResult("o", 0, False, "exploded", {}, 0.0, 0.0)


def test_overall_is_per_trial_mean():
    rows = [ObjectRow("a", 1, 1), ObjectRow("b", 3, 0)]
    results = [_result(True, "a")] + [_result(False, "b")] * 3
    rep = BatchReport(rows, results, 0, 1)
    assert rep.overall_pct == pytest.approx(25.0)
    assert rep.overall_pct != pytest.approx((100.0 + 0.0) / 2)


def test_batch_counts_and_files(small_batch):
    rep, out = small_batch
    assert rep.total_trials == 4
    assert [r.trials for r in rep.rows] == [2, 2]
    assert rep.overall_pct == pytest.approx(100.0 * rep.successes / 4)
    data = json.loads((out / "report.json").read_text())
    assert data["overall"]["trials"] == 4
    assert [t["seed"] for t in data["trials"]] == [7 ^ i for i in range(4)]
    table = (out / "report.md").read_text().splitlines()
    assert "synthetic" in table[0]
    assert table[2].startswith("| Objects") and table[-1].startswith("| Overall")
    assert len(table) == 2 + 2 + 2 + 1
    assert len(list((out / "traces").glob("*.csv"))) == 4


def test_trace_schema(small_batch):
    rep, out = small_batch
    r = rep.results[0]
    rows = list(csv.reader(open(out / r.trace_path)))
    assert rows[0] == TRACE_COLUMNS and len(TRACE_COLUMNS) == 31
    body = rows[1:]
    assert len(body) == round(r.duration / 0.01)
    assert all(len(x) == 31 for x in body)
    fsr_cols = [i for i, c in enumerate(TRACE_COLUMNS) if c.endswith("_fsr_n")]
    pre = [x for x in body if x[1] in ("PreGrasp", "Taring")]
    assert pre and all(float(x[i]) == 0.0 for x in pre for i in fsr_cols)


def test_export_trace_unwritable(tmp_path, box):
    r = run_grasp(box, sim=SimConfig(seed=0))
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OutputError):
        export_trace(r, blocker / "trace.csv")
    p = export_trace(r, tmp_path / "ok.csv")
    assert len(p.read_text().splitlines()) == len(r.trace) + 1


def test_cli_exit_codes(tmp_path):
    empty = tmp_path / "empty.yaml"
    empty.write_text("objects: []\n")
    assert cli.main(["run", "--dataset", str(empty), "--out", str(tmp_path / "o")]) == 2
    assert cli.main(["run", "--config", str(tmp_path / "nope.yaml"), "--out", str(tmp_path / "o")]) == 2
    blocker = tmp_path / "blocker"
    blocker.write_text("x")
    one = tmp_path / "one.yaml"
    one.write_text(dataset_to_yaml(load_dataset()[:1]))
    assert cli.main(["run", "--dataset", str(one), "--trials", "1", "--out", str(blocker / "o")]) == 3


def test_cli_run_plot_replay(tmp_path, capsys):
    one = tmp_path / "one.yaml"
    one.write_text(dataset_to_yaml(load_dataset()[6:7]))
    out = tmp_path / "out"
    assert cli.main(["run", "--dataset", str(one), "--trials", "1", "--seed", "3", "--out", str(out),
                     "--drop-fingers", "RF,LF@5.0"]) == 0
    trace = next((out / "traces").glob("*.csv"))
    svg = tmp_path / "fig.svg"
    assert cli.main(["plot", "--trace", str(trace), "--out", str(svg)]) == 0
    text = svg.read_text()
    assert text.lstrip().startswith("<?xml") and text.count('<g id="axes_') == 3
    capsys.readouterr()
    assert cli.main(["replay-slip", "--trace", str(trace)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "t_s,digit,slope,delta_slope,severity,slipping"
    assert len(lines) > 1


def test_cli_plot_bad_traces(tmp_path):
    header_only = tmp_path / "h.csv"
    header_only.write_text(",".join(TRACE_COLUMNS) + "\n")
    assert cli.main(["plot", "--trace", str(header_only), "--out", str(tmp_path / "a.svg")]) == 2
    bad = tmp_path / "b.csv"
    bad.write_text("a,b\n1,2\n")
    assert cli.main(["plot", "--trace", str(bad), "--out", str(tmp_path / "b.svg")]) == 2
    empty = tmp_path / "e.csv"
    empty.write_text("")
    assert cli.main(["plot", "--trace", str(empty), "--out", str(tmp_path / "c.svg")]) == 2
    assert cli.main(["replay-slip", "--trace", str(bad)]) == 2
