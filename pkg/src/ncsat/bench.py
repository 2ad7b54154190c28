"""Grid experiments: generate ground truths, learn them back, record one CSV row per run.

Every trial seed is derived from the master seed and the cell coordinates, so
any single row can be replayed alone.  Failures are recorded in the
``failure`` column (``budget``, ``bridge``, ``infeasible``, ``unsat``,
``decode``, ``no-solver``) and never stop the grid.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import mip
from .core import extends
from .errors import BridgeError, BudgetExceeded, DecodeError, FaithfulnessError, InputError
from .evaluate import default_sample_size, err_rate
from .sat import decode, encode
from .solver import solve, solve_external
from .synth import GenConfig, generate

METHODS = ("sat", "sat-external", "mip-o", "mip-d")
HEADER = (
    "method,n_criteria,n_classes,n_alts,trial,seed,n_vars,n_clauses,"
    "encode_ms,solve_ms,total_ms,success,extends,err_rate,failure"
).split(",")


@dataclass
class BenchConfig:
    n_criteria: list = field(default_factory=lambda: [4, 5, 6, 7, 8])
    n_classes: list = field(default_factory=lambda: [2, 3])
    n_alternatives: list = field(default_factory=lambda: [16, 32, 64, 128])
    trials: int = 20
    seed: int = 0
    methods: list = field(default_factory=lambda: ["sat"])
    time_limit: float = 600.0  # seconds per solve
    max_conflicts: int = 10**7
    sat_cmd: str | None = None
    mip_cmd: str | None = None
    mip_eps: float = mip.EPS
    err_samples: int | None = None  # None: default_sample_size(n_criteria)
    timings: bool = True  # False leaves timing columns empty for byte-stable output
    workers: int = 1

    def __post_init__(self):
        for name in ("n_criteria", "n_classes", "n_alternatives", "methods"):
            if not getattr(self, name):
                raise InputError(f"bench grid '{name}' must not be empty")
        if self.trials < 1:
            raise InputError("trials must be at least 1")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise InputError(f"unknown methods {sorted(unknown)}; choose from {METHODS}")
        if any(p < 2 for p in self.n_classes):
            raise InputError("every grid value of n_classes must be at least 2")

    @classmethod
    def from_dict(cls, doc: dict) -> "BenchConfig":
        known = set(cls.__dataclass_fields__)
        extra = set(doc) - known
        if extra:
            raise InputError(f"unknown bench config keys: {sorted(extra)}")
        return cls(**doc)

    @classmethod
    def from_json(cls, text: str) -> "BenchConfig":
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise InputError(f"bench config is not valid JSON: {exc}") from None

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2) + "\n"


def trial_seed(master: int, n: int, p: int, n_alts: int, trial: int) -> int:
    ss = np.random.SeedSequence([master, n, p, n_alts, trial])
    return int(ss.generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def eval_rng(seed: int) -> np.random.Generator:
    # third child of the trial seed; the first two feed the generator
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed).spawn(3)[2]))


def _run_method(method, cfg: BenchConfig, truth, data, seed):
    row = {"n_vars": 0, "n_clauses": 0, "encode_ms": 0.0, "solve_ms": 0.0,
           "success": False, "extends": False, "err_rate": None, "failure": ""}
    learned = None
    if method in ("sat", "sat-external"):
        if method == "sat-external" and not cfg.sat_cmd:
            row["failure"] = "no-solver"
            return row
        t0 = time.perf_counter()
        cnf = encode(data)
        row["encode_ms"] = (time.perf_counter() - t0) * 1000
        row["n_vars"], row["n_clauses"] = cnf.num_vars, len(cnf.clauses)
        t0 = time.perf_counter()
        try:
            if method == "sat":
                res = solve(cnf, max_conflicts=cfg.max_conflicts, time_limit=cfg.time_limit)
            else:
                res = solve_external(cnf, cfg.sat_cmd, timeout=cfg.time_limit)
        except BudgetExceeded:
            row["failure"] = "budget"
        except BridgeError:
            row["failure"] = "bridge"
        row["solve_ms"] = (time.perf_counter() - t0) * 1000
        if not row["failure"]:
            if res.sat:
                learned = decode(cnf.vocab, res.assignment)
            else:
                row["failure"] = "unsat"
    else:
        if not cfg.mip_cmd:
            row["failure"] = "no-solver"
            return row
        variant = mip.MIP_O if method == "mip-o" else mip.MIP_D
        t0 = time.perf_counter()
        m = mip.encode_raw(data, variant, cfg.mip_eps)
        row["encode_ms"] = (time.perf_counter() - t0) * 1000
        row["n_vars"], row["n_clauses"] = len(m.variables), len(m.constraints)
        t0 = time.perf_counter()
        try:
            values = mip.solve_mip_external(m, cfg.mip_cmd, timeout=cfg.time_limit)
        except BridgeError:
            row["failure"] = "bridge"
            values = None
        row["solve_ms"] = (time.perf_counter() - t0) * 1000
        if not row["failure"]:
            if mip.unrepresentable(m, values):
                row["failure"] = "infeasible"
            else:
                try:
                    learned = mip.decode_mrsort(m, values)
                except (DecodeError, FaithfulnessError):
                    row["failure"] = "decode"
    if learned is not None:
        row["success"] = True
        row["extends"] = not extends(learned, data)
        samples = cfg.err_samples or default_sample_size(data.criteria.count)
        row["err_rate"] = err_rate(truth, learned, samples, eval_rng(seed))
    return row


def run_trial(cfg: BenchConfig, n: int, p: int, n_alts: int, trial: int) -> list[dict]:
    """Rows for every configured method on one generated instance."""
    seed = trial_seed(cfg.seed, n, p, n_alts, trial)
    truth, data = generate(GenConfig(n, p, n_alts, seed))
    rows = []
    for method in cfg.methods:
        row = {"method": method, "n_criteria": n, "n_classes": p, "n_alts": n_alts,
               "trial": trial, "seed": seed}
        row.update(_run_method(method, cfg, truth, data, seed))
        row["total_ms"] = row["encode_ms"] + row["solve_ms"]
        rows.append(row)
    return rows


def _cells(cfg: BenchConfig):
    return list(itertools.product(cfg.n_criteria, cfg.n_classes, cfg.n_alternatives,
                                  range(cfg.trials)))


def _trial_star(args):
    return run_trial(*args)


def run_grid(cfg: BenchConfig, progress=None) -> list[dict]:
    """Run every (cell, trial, method); rows come back in grid order whatever ``workers`` is."""
    jobs = [(cfg, *c) for c in _cells(cfg)]
    rows = []
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            for chunk in pool.map(_trial_star, jobs):
                rows.extend(chunk)
                if progress:
                    progress(chunk)
    else:
        for job in jobs:
            chunk = run_trial(*job)
            rows.extend(chunk)
            if progress:
                progress(chunk)
    return rows


def _cell(key, v, timings):
    if key in ("encode_ms", "solve_ms", "total_ms"):
        return f"{v:.3f}" if timings else ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def dump_csv(rows, timings: bool = True) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for r in rows:
        w.writerow([_cell(k, r[k], timings) for k in HEADER])
    return buf.getvalue()


def write_csv(rows, path, timings: bool = True) -> None:
    Path(path).write_text(dump_csv(rows, timings))


def summarize(rows) -> list[dict]:
    """Per (method, cell) medians of solve time and err_rate plus failure counts."""
    groups = {}
    for r in rows:
        key = (r["method"], r["n_criteria"], r["n_classes"], r["n_alts"])
        groups.setdefault(key, []).append(r)
    out = []
    for (method, n, p, k), rs in groups.items():
        errs = [r["err_rate"] for r in rs if r["err_rate"] is not None]
        out.append({
            "method": method, "n_criteria": n, "n_classes": p, "n_alts": k,
            "runs": len(rs),
            "failures": sum(1 for r in rs if r["failure"]),
            "median_solve_ms": statistics.median(r["solve_ms"] for r in rs),
            "median_err_rate": statistics.median(errs) if errs else None,
        })
    return out
