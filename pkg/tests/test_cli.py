import csv
import io
import json
import math
import subprocess
import sys

import pytest

from hamperc import cli
from hamperc.branching.laws import BandViolation
from hamperc.estimators import run_trial
from hamperc.model import binomial_lower_tail_bound, derive_params, second_component_bound
from hamperc.sweep import SweepConfig, cell_stream_id


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def body(text):
    return [ln for ln in text.splitlines() if not ln.startswith("#")]


def kv(text):
    rows = csv.DictReader(io.StringIO("\n".join(body(text))))
    return {r["key"]: r["value"] for r in rows}


def tables(text):
    """Split a multi-table CSV into {name: [row dicts]}."""
    out, name, chunk = {}, None, []
    for ln in text.splitlines() + ["# table: <end>"]:
        if ln.startswith("# table: "):
            if name is not None:
                out[name] = list(csv.DictReader(io.StringIO("\n".join(chunk))))
            name, chunk = ln[len("# table: "):], []
        elif not ln.startswith("#"):
            chunk.append(ln)
    return out


# -- percolate -------------------------------------------------------------------


def test_percolate_complete_graph(capsys):
    code, out, _ = run(capsys, "percolate", "--n", "2", "--epsilon", "1")
    assert code == 0
    d = kv(out)
    assert d["c1"] == "4" and d["c2"] == "0" and d["edge_count"] == "4"
    assert out.startswith("# hamperc ")


def test_percolate_deterministic(capsys):
    a = run(capsys, "percolate", "--n", "300", "--epsilon", "0.2", "--seed", "5")[1]
    b = run(capsys, "percolate", "--n", "300", "--epsilon", "0.2", "--seed", "5")[1]
    c = run(capsys, "percolate", "--n", "300", "--epsilon", "0.2", "--seed", "6")[1]
    assert a == b and a != c


def test_percolate_giant_scale(capsys):
    d = kv(run(capsys, "percolate", "--n", "1000", "--epsilon", "0.1", "--seed", "42")[1])
    target = 2 * 0.1 * 1000**2
    assert 0.5 * target <= int(d["c1"]) <= 1.5 * target
    assert float(d["giant_target"]) == pytest.approx(target)


def test_percolate_json_and_dump(capsys, tmp_path):
    out = tmp_path / "r.json"
    dump = tmp_path / "edges.txt"
    code, _, _ = run(capsys, "percolate", "--n", "20", "--epsilon", "0.5", "--format", "json", "--out", str(out), "--dump", str(dump))
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["meta"]["command"] == "percolate"
    d = {r["key"]: r["value"] for r in doc["result"]}
    header, *lines = dump.read_text().splitlines()
    assert header.startswith("n=20 ")
    assert len(lines) == d["edge_count"]


# -- exit codes ------------------------------------------------------------------


def test_exit_domain_error(capsys):
    code, _, err = run(capsys, "percolate", "--n", "1", "--epsilon", "0.1")
    assert code == 2 and "error" in err


def test_exit_regime_error(capsys):
    code, _, err = run(capsys, "bounds", "--n", "100", "--epsilon", "0.01")
    assert code == 3 and "regime" in err


def test_exit_bad_flag():
    with pytest.raises(SystemExit) as exc:
        cli.main(["percolate", "--n", "x", "--epsilon", "0.1"])
    assert exc.value.code == 2


def test_exit_assertion(capsys, monkeypatch):
    def boom(args):
        raise BandViolation("draw outside band")

    monkeypatch.setattr(cli, "cmd_bounds", boom)
    code, _, err = run(capsys, "bounds", "--n", "100", "--epsilon", "0.1")
    assert code == 4 and "assertion" in err


def test_exit_missing_config(capsys, tmp_path):
    code, _, _ = run(capsys, "sweep", "--config", str(tmp_path / "missing.json"))
    assert code == 2


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "hamperc", "bounds", "--n", "1000", "--epsilon", "0.1"], capture_output=True, text=True)
    assert r.returncode == 0 and "second_component_bound" in r.stdout


# -- bp --------------------------------------------------------------------------


def test_bp_solve_only(capsys):
    code, out, _ = run(capsys, "bp", "--n", "1000", "--epsilon", "0.1", "--solve-only")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO("\n".join(body(out)))))
    assert len(rows) == 1 and rows[0]["law"] == "lower"
    assert 0.878 <= float(rows[0]["extinction"]) <= 0.922


def test_bp_constant_upper_matches_upper_law(capsys):
    args = ["--n", "200", "--epsilon", "0.2", "--trials", "400", "--cap", "5000", "--seed", "3"]
    a = tables(run(capsys, "bp", *args, "--policy", "constant-upper")[1])
    b = tables(run(capsys, "bp", *args, "--law", "upper")[1])
    assert a["simulation"] == b["simulation"]


def test_bp_alpha_monotone(capsys):
    out = run(capsys, "bp", "--n", "1000", "--epsilon", "0.2", "--policy", "uniform", "--trials", "2000", "--alpha", "4,8,16", "--cap", "20000")[1]
    est = [float(r["estimate"]) for r in tables(out)["progeny"]]
    assert est == sorted(est, reverse=True)


def test_bp_lemma_c_changes_envelope(capsys):
    base = ["bp", "--n", "1000", "--epsilon", "0.2", "--trials", "50", "--alpha", "4", "--cap", "2000"]
    e3 = float(tables(run(capsys, *base)[1])["progeny"][0]["envelope"])
    e6 = float(tables(run(capsys, *base, "--lemma-c", "envelope=6")[1])["progeny"][0]["envelope"])
    assert e6 == pytest.approx(2 * e3)


def test_bp_cap_too_small(capsys):
    code, _, _ = run(capsys, "bp", "--n", "1000", "--epsilon", "0.1", "--alpha", "4", "--cap", "100", "--trials", "5")
    assert code == 2


# -- oracle ----------------------------------------------------------------------


def test_oracle_quarter_cycle(capsys):
    out = run(capsys, "oracle", "--n", "2", "--p", "1/2")[1]
    c1 = {r["c1"]: r["exact"] for r in tables(out)["c1"]}
    assert c1["4"] == "5/16"


def test_oracle_p_one(capsys):
    out = run(capsys, "oracle", "--n", "3", "--p", "1")[1]
    joint = tables(out)["joint"]
    assert len(joint) == 1 and joint[0]["c1"] == "9" and float(joint[0]["probability"]) == 1.0


def test_oracle_compare(capsys):
    out = run(capsys, "oracle", "--n", "2", "--p", "0.3", "--compare", "20000", "--seed", "1")[1]
    assert float(tables(out)["comparison"][0]["p_value"]) > 1e-6


def test_oracle_bad_n(capsys):
    assert run(capsys, "oracle", "--n", "5", "--p", "0.5")[0] == 2


# -- bounds ----------------------------------------------------------------------


def test_bounds_values(capsys):
    d = kv(run(capsys, "bounds", "--n", "1000", "--epsilon", "0.1", "--k", "100", "--p", "0.5", "--t", "5")[1])
    assert int(d["omega"]) == 1998
    assert float(d["second_component_bound"]) == pytest.approx(second_component_bound(derive_params(1000, 0.1)))
    assert float(d["tail_bound"]) == pytest.approx(binomial_lower_tail_bound(100, 0.5, 5))
    assert d["in_theorem_regime"] == "true"


def test_bounds_partial_tail_args(capsys):
    assert run(capsys, "bounds", "--n", "1000", "--epsilon", "0.1", "--k", "10")[0] == 2


# -- sweep -----------------------------------------------------------------------


def test_sweep_empty_grid(capsys):
    code, out, _ = run(capsys, "sweep")
    assert code == 0
    lines = body(out)
    assert len(lines) == 1 and lines[0].startswith("n,epsilon,trials")


def test_sweep_single_trial_matches_record(capsys, tmp_path):
    out = tmp_path / "s.csv"
    code, _, _ = run(capsys, "sweep", "--n", "300", "--epsilon", "0.3", "--trials", "1", "--seed", "11", "--out", str(out))
    assert code == 0
    summary = list(csv.DictReader(io.StringIO("\n".join(body(out.read_text())))))
    trials = list(csv.DictReader(io.StringIO("\n".join(body((tmp_path / "s.trials.csv").read_text())))))
    cfg = SweepConfig(grid=[(300, 0.3)], trials=1, seed=11)
    rec = run_trial(derive_params(300, 0.3), 11, cell_stream_id(300, 0.3, 0), cfg.window(300, 0.3))
    assert int(summary[0]["trials"]) == 1
    assert float(summary[0]["mean_c1"]) == rec.c1 and float(summary[0]["mean_c2"]) == rec.c2
    assert int(trials[0]["c1"]) == rec.c1 and int(trials[0]["edge_count"]) == rec.edge_count
    assert trials[0]["runtime"] == ""


def test_sweep_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"grid": [[200, 0.3]], "trials": 3, "seed": 2}))
    out = run(capsys, "sweep", "--config", str(cfg), "--trials", "2", "--summary-only", "--format", "json")[1]
    doc = json.loads(out)
    assert doc["meta"]["config"]["trials"] == 2
    assert doc["summary"][0]["trials"] == 2 and "trials" not in {k for k in doc if k != "summary" and k != "meta"}


def test_sweep_config_unknown_key(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"grid": [], "trails": 3}))
    assert run(capsys, "sweep", "--config", str(cfg))[0] == 2


def test_sweep_lemma_c(capsys):
    out = run(capsys, "sweep", "--n", "200", "--epsilon", "0.3", "--trials", "1", "--lemma-c", "middle=6", "--format", "json")[1]
    doc = json.loads(out)
    assert doc["meta"]["config"]["lemma_c"]["middle"] == 6.0
    assert doc["summary"][0]["middle_bound"] == pytest.approx(6 * (0.3 * math.exp(-20 / 256) + 200.0**-6))
    with pytest.raises(SystemExit):
        cli.main(["sweep", "--lemma-c", "bogus=1"])


def test_sweep_grid_needs_both_axes(capsys):
    assert run(capsys, "sweep", "--n", "200")[0] == 2


def test_sweep_json_has_trials(capsys):
    doc = json.loads(run(capsys, "sweep", "--n", "100,150", "--epsilon", "0.4", "--trials", "2", "--format", "json")[1])
    assert [r["n"] for r in doc["summary"]] == [100, 150]
    assert [(r["n"], r["trial"]) for r in doc["trials"]] == [(100, 0), (100, 1), (150, 0), (150, 1)]


def test_sweep_timing_flag(capsys):
    doc = json.loads(run(capsys, "sweep", "--n", "100", "--epsilon", "0.4", "--trials", "2", "--format", "json", "--timing")[1])
    assert doc["summary"][0]["wall_time"] > 0
