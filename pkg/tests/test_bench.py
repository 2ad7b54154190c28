import json
import shlex
import sys

import pytest

from ncsat.bench import HEADER, BenchConfig, dump_csv, run_grid, summarize, trial_seed
from ncsat.errors import InputError
from ncsat.sat import encode
from ncsat.synth import GenConfig, generate


def small(**kw):
    base = dict(n_criteria=[4], n_classes=[2], n_alternatives=[16], trials=3, seed=1,
                err_samples=2000)
    base.update(kw)
    return BenchConfig(**base)


def test_sat_cell_all_succeed():
    rows = run_grid(small())
    assert len(rows) == 3
    assert all(r["success"] and r["extends"] and r["failure"] == "" for r in rows)
    assert all(0.0 <= r["err_rate"] <= 1.0 for r in rows)


def test_missing_mip_solver():
    rows = run_grid(small(methods=["sat", "mip-o", "sat-external"]))
    kinds = [(r["method"], r["failure"]) for r in rows]
    assert kinds[:3] == [("sat", ""), ("mip-o", "no-solver"), ("sat-external", "no-solver")]


def test_csv_byte_identical_without_timings():
    cfg = small(timings=False, n_classes=[2, 3])
    a = dump_csv(run_grid(cfg), timings=False)
    b = dump_csv(run_grid(cfg), timings=False)
    assert a == b
    assert a.splitlines()[0] == ",".join(HEADER)


def test_csv_with_timings_has_numbers():
    text = dump_csv(run_grid(small(trials=1)))
    fields = dict(zip(HEADER, text.splitlines()[1].split(",")))
    assert float(fields["solve_ms"]) >= 0 and fields["success"] == "true"


def test_seeds_replay_single_rows():
    cfg = small(trials=2)
    rows = run_grid(cfg)
    for r in rows:
        assert r["seed"] == trial_seed(cfg.seed, 4, 2, 16, r["trial"])
        _, data = generate(GenConfig(4, 2, 16, r["seed"]))
        assert len(encode(data).clauses) == r["n_clauses"]


def test_worker_pool_same_rows():
    cfg = small(timings=False, trials=2)
    assert dump_csv(run_grid(cfg), False) == dump_csv(run_grid(small(timings=False, trials=2, workers=2)), False)


def test_external_sat_rows():
    cmd = f"{shlex.quote(sys.executable)} -m ncsat.solver"
    rows = run_grid(small(trials=2, methods=["sat-external"], sat_cmd=cmd))
    assert all(r["success"] and r["extends"] for r in rows)


def test_broken_external_solver_recorded(tmp_path):
    script = tmp_path / "broken.py"
    script.write_text("print('nonsense')\n")
    cmd = f"{shlex.quote(sys.executable)} {shlex.quote(str(script))}"
    rows = run_grid(small(trials=1, methods=["sat-external"], sat_cmd=cmd))
    assert rows[0]["failure"] == "bridge" and not rows[0]["success"]


def test_budget_failure_recorded(monkeypatch):
    from ncsat import bench

    def starved(*a, **kw):
        raise bench.BudgetExceeded("out of conflicts")

    monkeypatch.setattr(bench, "solve", starved)
    rows = run_grid(small(trials=1))
    assert rows[0]["failure"] == "budget" and rows[0]["err_rate"] is None


def test_config_validation_and_json():
    with pytest.raises(InputError):
        BenchConfig(trials=0)
    with pytest.raises(InputError):
        BenchConfig(methods=["magic"])
    with pytest.raises(InputError):
        BenchConfig.from_dict({"bogus": 1})
    cfg = BenchConfig.from_json(json.dumps({"n_criteria": [4], "trials": 2}))
    assert cfg.n_criteria == [4] and cfg.n_classes == [2, 3]
    assert BenchConfig.from_json(cfg.to_json()) == cfg


def test_summary():
    out = summarize(run_grid(small()))
    assert out[0]["runs"] == 3 and out[0]["failures"] == 0
