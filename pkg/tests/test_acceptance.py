"""Acceptance criteria 1-8.  Each test records a PASS/FAIL line (printed in the
terminal summary) before asserting, so a failing criterion still reports its
measured numbers."""

import math
import os
import statistics
import time

import numpy as np
import pytest

from ncsat import mip
from ncsat.bench import BenchConfig, run_grid, trial_seed
from ncsat.core import Alternative, CriteriaSpec, LearningSet, dominates, extends
from ncsat.evaluate import brute_force_representable, default_sample_size
from ncsat.sat import decode, encode, model_to_assignment, verify
from ncsat.solver import solve
from ncsat.synth import GenConfig, gen_mrsort, generate

from conftest import ACCEPTANCE

GRID4 = (0.0, 1 / 3, 2 / 3, 1.0)


def record(key, ok, detail):
    ACCEPTANCE[key] = (bool(ok), detail)
    print(f"criterion {key}: {'PASS' if ok else 'FAIL'} - {detail}")
    assert ok, detail


def learn_sat(data):
    cnf = encode(data)
    res = solve(cnf)
    return decode(cnf.vocab, res.assignment) if res.sat else None


def test_criterion_1_sat_round_trip():
    count, bad, worst = 0, [], 0.0
    for n in range(4, 9):
        for p in (2, 3, 4):
            for k in (16, 32, 64, 128):
                for trial in range(4):
                    seed = trial_seed(101, n, p, k, trial)
                    _, data = generate(GenConfig(n, p, k, seed))
                    t0 = time.perf_counter()
                    model = learn_sat(data)
                    ok = model is not None and extends(model, data) == []
                    worst = max(worst, time.perf_counter() - t0)
                    count += 1
                    if not ok:
                        bad.append((n, p, k, seed))
    record(1, not bad and worst < 5.0 and count >= 200,
           f"{count - len(bad)}/{count} instances restored, slowest {worst:.2f}s (limit 5s)")


def test_criterion_2_oracle_equivalence():
    rng = np.random.default_rng(2)
    crit = CriteriaSpec.default(3)
    total, agree, n_sat = 0, 0, 0
    for _ in range(600):
        p = int(rng.integers(2, 4))
        size = int(rng.integers(1, 7))
        alts = tuple(
            Alternative(f"a{j}", tuple(float(GRID4[g]) for g in rng.integers(0, 4, 3)), int(rng.integers(1, p + 1)))
            for j in range(size)
        )
        data = LearningSet(crit, p, alts)
        sat = solve(encode(data)).sat
        found = brute_force_representable(data) is not None
        total += 1
        agree += sat == found
        n_sat += sat
    record(2, agree == total >= 500,
           f"{agree}/{total} agree ({n_sat} representable, {total - n_sat} not)")


def test_criterion_3_dominance_violations_unsat():
    rng = np.random.default_rng(3)
    total, unsat = 0, 0
    for trial in range(300):
        n = int(rng.integers(1, 6))
        p = int(rng.integers(2, 5))
        _, data = generate(GenConfig(n, p, int(rng.integers(0, 30)), seed=trial))
        x = rng.random(n)
        y = x - rng.random(n) * x  # weakly dominated by x
        cx = int(rng.integers(1, p))
        cy = int(rng.integers(cx + 1, p + 1))
        assert dominates(tuple(x), tuple(y))
        alts = data.alternatives + (Alternative("x", tuple(map(float, x)), cx),
                                    Alternative("y", tuple(map(float, y)), cy))
        total += 1
        unsat += not solve(encode(LearningSet(data.criteria, p, alts))).sat
    record(3, unsat == total, f"{unsat}/{total} instances with a dominance violation are UNSAT")


def test_criterion_4_terry_golden(terry, terry_model):
    cnf = encode(terry)
    fam = tuple(cnf.family_counts[k] for k in ("3a", "3b", "3c", "3d", "3e"))
    image_ok = verify(cnf, model_to_assignment(terry_model, cnf.vocab)) == []
    model = learn_sat(terry)
    restored = model is not None and extends(model, terry) == []
    ok = (cnf.num_vars, cnf.num_clauses, fam) == (58, 231, (34, 21, 32, 80, 64)) and image_ok and restored
    record(4, ok, f"{cnf.num_vars} vars, {cnf.num_clauses} clauses, families {fam}, "
                  f"reference model satisfies CNF: {image_ok}, learned model restores 6/6: {restored}")


def _example_clauses(data):
    f = encode(data).family_counts
    return f["3d"] + f["3e"]


def test_criterion_5_scaling_law():
    # exact counts: each non-extreme alternative adds 2 * 2^n clauses, each extreme one 2^n
    laws = True
    for n in range(2, 7):
        for p in (2, 3, 4):
            _, data = generate(GenConfig(n, p, 40, seed=n * 10 + p))
            middle = sum(1 for a in data.alternatives if 1 < a.category < p)
            laws &= _example_clauses(data) == 2**n * (len(data) + middle)
            wider = LearningSet(CriteriaSpec.default(n + 1), p, tuple(
                Alternative(a.id, a.profile + (0.5,), a.category) for a in data.alternatives))
            laws &= _example_clauses(wider) == 2 * _example_clauses(data)
            half = LearningSet(data.criteria, p, data.alternatives[:20])
            mid_half = sum(1 for a in half.alternatives if 1 < a.category < p)
            laws &= _example_clauses(half) == 2**n * (20 + mid_half)

    sizes = (16, 32, 64, 128)
    xs, ys, cells, per_cell = [], [], [], {}
    for p in (2, 3):
        for n in range(4, 9):
            meds = []
            for k in sizes:
                times = []
                for trial in range(20):
                    _, data = generate(GenConfig(n, p, k, trial_seed(5, n, p, k, trial)))
                    cnf = encode(data)
                    t0 = time.perf_counter()
                    solve(cnf)
                    times.append(time.perf_counter() - t0)
                meds.append(statistics.median(times))
            per_cell[(n, p)] = np.polyfit(np.log(sizes), np.log(meds), 1)[0]
            xs += list(np.log(sizes))
            ys += list(np.log(meds))
            cells += [(n, p)] * len(sizes)
    # common slope, one intercept per (n, p) cell
    keys = sorted(per_cell)
    design = np.zeros((len(xs), 1 + len(keys)))
    design[:, 0] = xs
    for row, c in enumerate(cells):
        design[row, 1 + keys.index(c)] = 1.0
    slope = float(np.linalg.lstsq(design, np.array(ys), rcond=None)[0][0])
    shown = " ".join(f"N{n}p{p}={s:.2f}" for (n, p), s in sorted(per_cell.items()))
    record(5, laws and abs(slope - 1.0) <= 0.5,
           f"count laws exact: {laws}; pooled log-log slope {slope:.2f} (1.0 +/- 0.5); per cell {shown}")


def test_criterion_6_generalization_trend():
    cfg = BenchConfig(n_criteria=[4], n_classes=[3], n_alternatives=[16, 32, 64, 128],
                      trials=50, seed=2024, timings=False)
    rows = run_grid(cfg)
    meds = [statistics.median(r["err_rate"] for r in rows if r["n_alts"] == k) for k in cfg.n_alternatives]
    ok = all(r["success"] and r["extends"] for r in rows) and all(a > b for a, b in zip(meds, meds[1:]))
    record(6, ok, "median err_rate " + ", ".join(
        f"{k}: {m:.4f}" for k, m in zip(cfg.n_alternatives, meds)) + f" ({default_sample_size(4)} samples each)")


def _external_mip_clause(cmd):
    solved = restored = 0
    for n in (2, 3, 4, 5):
        for p in (2, 3):
            for k in (16, 32):
                for trial in range(2):
                    _, data = generate(GenConfig(n, p, k, trial_seed(7, n, p, k, trial)))
                    for variant in (mip.MIP_O, mip.MIP_D):
                        m = mip.encode_raw(data, variant, eps=1e-4)
                        values = mip.solve_mip_external(m, cmd, timeout=120)
                        if mip.unrepresentable(m, values):
                            continue
                        solved += 1
                        try:
                            restored += extends(mip.decode_mrsort(m, values), data) == []
                        except Exception:
                            pass
    return solved, restored


def test_criterion_7_mip_emission(terry):
    o = mip.encode_raw(terry, mip.MIP_O)
    d = mip.encode_raw(terry, mip.MIP_D)
    norm = (sum(c.name == "normalize" for c in o.constraints), sum(c.name == "normalize" for c in d.constraints))
    deltas = (o.count(mip.BINARY), d.count(mip.BINARY))
    micro = mip.encode_mip_o(LearningSet(CriteriaSpec.default(1), 2, (Alternative("a1", (0.7,), 2),)))
    hand = {"alpha": 0.5, "lambda": 0.5, "b_1_1": 0.2, "w_1": 1.0,
            "x_a1": 0.5, "c_a1_1_1": 1.0, "d_a1_1_1": 1.0}
    hand_ok = (micro.eps, mip.BIG_M) == (1e-6, 2.0) and set(hand) == set(micro.variables) \
        and micro.violations(hand, tol=0.0) == []
    ok = norm == (1, 0) and deltas == (36, 36) and hand_ok
    detail = f"normalization rows O/D {norm}, binaries O/D {deltas}, hand point feasible: {hand_ok}"
    cmd = os.environ.get("NCS_MIP_CMD")
    if cmd:
        solved, restored = _external_mip_clause(cmd)
        ok = ok and solved > 0 and restored == solved
        detail += f"; external solver: {restored}/{solved} decoded models restore their sets"
    else:
        detail += "; external clause skipped (NCS_MIP_CMD unset)"
    record(7, ok, detail)


def test_criterion_8_generator():
    bad = []
    for seed in range(10_000):
        cfg = GenConfig(2 + seed % 12, 2 + seed % 4, 0, seed)
        m = gen_mrsort(cfg, cfg.streams()[0])
        if abs(math.fsum(m.weights) - 1.0) > 1e-12 or not 0.5 < m.threshold < 1.0 \
                or min(m.weights) < 0 \
                or any(a > b for lo, hi in zip(m.frontiers, m.frontiers[1:]) for a, b in zip(lo, hi)):
            bad.append(seed)
    sizes = tuple(default_sample_size(n) for n in (9, 5, 13))
    record(8, not bad and sizes == (262144, 10000, 300000),
           f"{10_000 - len(bad)}/10000 seeds conform; sample sizes {sizes}")
