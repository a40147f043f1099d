import csv
import io
import json

import pytest

from adhs_sim.cli import main, reproduce_fig3
from adhs_sim.reporting import TRACE_COLUMNS


def read_csv(path):
    with open(path) as fh:
        return list(csv.DictReader(fh))


def test_run_writes_outputs(tmp_path, capsys):
    out = tmp_path / "o"
    assert main(["run", "--preset", "fig3", "--out", str(out), "--hierarchy"]) == 0
    with open(out / "trace.csv") as fh:
        assert fh.readline().strip() == ",".join(TRACE_COLUMNS)
    rows = read_csv(out / "trace.csv")
    assert len(rows) == 8 * 17
    assert {r["role"] for r in rows} == {"CH", "NCH"}
    assert {r["action"] for r in rows if r["role"] == "NCH"} == {"Transmit"}
    s = json.loads((out / "summary.json").read_text())
    assert s["symbolic_before"]["E_p"] == 21.0
    m = json.loads((out / "manifest.json").read_text())
    assert m["adhs"]["t_threshold"] == 15.0 and m["seed"] == 0
    h = json.loads((out / "hierarchy.json").read_text())
    assert len(h["nodes"]) == 18 and len(h["clusters"]) == 5


def test_dump_hierarchy(tmp_path):
    assert main(["dump-hierarchy", "--preset", "fig3", "--out", str(tmp_path)]) == 0
    h = json.loads((tmp_path / "hierarchy.json").read_text())
    assert h["uplink"]["1"] == 0 and h["k"] == 4


def test_reproduce_fig3_output_and_exit():
    buf = io.StringIO()
    assert reproduce_fig3(buf) == 0
    text = buf.getvalue()
    assert "16 E_r + 21 E_p + 5 αE_t" in text
    assert "16 E_r + 14.5 E_p + 5 αE_t" in text
    assert "30.95%" in text
    assert main(["reproduce-fig3"]) == 0


def test_reproduce_fig3_mismatch_is_nonzero():
    # capped at L=1 no CH ever refines, so the "after" total is missing
    assert reproduce_fig3(io.StringIO(), overrides=["L=1"]) == 1


def test_literal_mode_reproduces_with_l1():
    assert reproduce_fig3(io.StringIO(), overrides=["literal_mode=true", "L=1"]) == 0


def test_config_errors_exit_2(tmp_path, capsys):
    assert main(["run", "--preset", "fig3", "--set", "T=-1", "--out", str(tmp_path)]) == 2
    assert "adhs.t_threshold" in capsys.readouterr().err
    assert main(["run", "--config", str(tmp_path / "nope.yaml"), "--out", str(tmp_path)]) == 2
    assert main(["run", "--preset", "fig3", "--set", "comm_range=1", "--out", str(tmp_path)]) == 2
    assert "unreachable" in capsys.readouterr().err


def test_sweep_threshold_nonincreasing(tmp_path):
    assert main(["sweep", "--preset", "fig3", "--param", "T", "--values", "0,15,1e9", "--set", "rounds=40", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "sweep.csv")
    e = [float(r["e_tot"]) for r in rows]
    assert [r["value"] for r in rows] == ["0", "15", "1e9"]
    assert e[0] >= e[1] >= e[2] and e[0] > e[2]


def test_single_value_sweep_equals_run(tmp_path):
    assert main(["sweep", "--preset", "fig3", "--param", "L", "--values", "2", "--out", str(tmp_path / "s")]) == 0
    assert main(["run", "--preset", "fig3", "--out", str(tmp_path / "r")]) == 0
    row = read_csv(tmp_path / "s" / "sweep.csv")
    s = json.loads((tmp_path / "r" / "summary.json").read_text())
    assert len(row) == 1
    assert float(row[0]["e_tot"]) == s["energy"]["total"]
    assert float(row[0]["mean_abs_error"]) == s["fidelity"]["mean_abs_error"]


def test_sweep_limit_tracks_duty_cycle(tmp_path):
    # constant field: per round, CH processing tends to sum over CHs of (n_i/L + 1) E_p
    rounds = 600
    assert main(["sweep", "--preset", "fig3", "--param", "L", "--values", "1,2,4",
                 "--set", "field.regions=[]", "--set", f"rounds={rounds}", "--out", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "sweep.csv")
    n_children = [4, 3, 3, 3, 3]
    for r in rows:
        lim = int(r["value"])
        want = sum(n / lim + 1 for n in n_children) * 5e-9
        assert float(r["e_process_per_round"]) == pytest.approx(want, rel=0.02)


def test_unsweepable_param_rejected(tmp_path):
    with pytest.raises(SystemExit):
        main(["sweep", "--preset", "fig3", "--param", "bogus", "--values", "1", "--out", str(tmp_path)])
