"""Command-line front end: ``ncsat <subcommand> ...``.

Artifacts go to files (``-o``); standard output only carries summaries.
Exit status: 0 on success, 1 when the data cannot be represented (or a check
finds misassigned alternatives), 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import bench, mip
from .core import ABOVE_ALL, MrSortModel, as_uncs, extends
from .errors import NcsError
from .evaluate import brute_force_representable, default_sample_size, err_rate
from .formats import (
    dump_learning_set,
    dump_model,
    read_learning_set,
    read_model,
)
from .sat import decode, encode, write_dimacs
from .solver import BACKEND, solve, solve_external
from .synth import GenConfig, gen_learning_set, gen_mrsort

UNREPRESENTABLE = "UNREPRESENTABLE"


class UsageError(Exception):
    pass


def _names(text):
    return tuple(s.strip() for s in text.split(",") if s.strip()) if text else ()


def _load_data(args):
    return read_learning_set(args.data, classes=args.classes, minimize=_names(args.minimize))


def _write(path, text):
    if path:
        Path(path).write_text(text)


def describe_model(model) -> str:
    crit = model.criteria
    lines = [f"{model.classes} classes over {crit.count} criteria"]
    for h, b in enumerate(model.frontiers, start=1):
        shown = ["-" if v == ABOVE_ALL else f"{v:g}" for v in crit.display(b)]
        cells = ", ".join(
            f"{n}: never" if v == "-" else f"{n}>={v}" if d == "max" else f"{n}<={v}"
            for n, d, v in zip(crit.names, crit.directions, shown)
        )
        lines.append(f"  frontier {h}: {cells}")
    if isinstance(model, MrSortModel):
        ws = ", ".join(f"{n}={w:.6g}" for n, w in zip(crit.names, model.weights))
        lines.append(f"  weights: {ws}; lambda={model.threshold:.6g}")
    minimal = as_uncs(model).sufficient.minimal()
    shown = ["{" + ", ".join(crit.coalition_names(m)) + "}" for m in minimal]
    lines.append(f"  minimal sufficient coalitions: {' '.join(shown) or '(none)'}")
    return "\n".join(lines)


def cmd_gen_model(args):
    cfg = GenConfig(args.criteria, args.classes, 0, args.seed)
    model = gen_mrsort(cfg, cfg.streams()[0])
    _write(args.output, dump_model(model))
    print(describe_model(model))
    return 0


def cmd_gen_data(args):
    model = read_model(args.model)
    cfg = GenConfig(model.criteria.count, model.classes, args.count, args.seed)
    data = gen_learning_set(model, args.count, cfg.streams()[1])
    _write(args.output, dump_learning_set(data))
    counts = np.bincount([a.category for a in data.alternatives], minlength=model.classes + 1)[1:]
    print(f"{len(data)} alternatives; per class: {' '.join(map(str, counts))}")
    return 0


def cmd_encode(args):
    data = _load_data(args)
    if args.format == "dimacs":
        cnf = encode(data)
        _write(args.output, write_dimacs(cnf))
        fam = " ".join(f"{k}={v}" for k, v in cnf.family_counts.items())
        print(f"p cnf {cnf.num_vars} {len(cnf.clauses)}  ({fam})")
    else:
        variant = mip.MIP_O if args.format == "lp-o" else mip.MIP_D
        m = mip.encode_raw(data, variant, args.eps)
        _write(args.output, mip.write_lp(m))
        print(f"{variant}: {len(m.variables)} variables ({m.count(mip.BINARY)} binary), "
              f"{len(m.constraints)} constraints")
    return 0


def _learn(args, data):
    if args.method in ("sat", "sat-external"):
        cnf = encode(data)
        if args.method == "sat":
            res = solve(cnf, max_conflicts=args.max_conflicts, time_limit=args.time_limit)
        else:
            cmd = args.solver_cmd or os.environ.get("NCS_SAT_CMD")
            if not cmd:
                raise UsageError("sat-external needs --solver-cmd or NCS_SAT_CMD")
            res = solve_external(cnf, cmd, timeout=args.time_limit)
        return decode(cnf.vocab, res.assignment) if res.sat else None
    cmd = args.mip_cmd or os.environ.get("NCS_MIP_CMD")
    if not cmd:
        raise UsageError(f"{args.method} needs --mip-cmd or NCS_MIP_CMD (template with {{lp}} and {{sol}})")
    variant = mip.MIP_O if args.method == "mip-o" else mip.MIP_D
    m = mip.encode_raw(data, variant, args.eps)
    values = mip.solve_mip_external(m, cmd, timeout=args.time_limit)
    return None if mip.unrepresentable(m, values) else mip.decode_mrsort(m, values)


def cmd_learn(args):
    data = _load_data(args)
    model = _learn(args, data)
    if model is None:
        print(UNREPRESENTABLE)
        return 1
    _write(args.output, dump_model(model))
    print(describe_model(model))
    return 0


def cmd_check(args):
    model = read_model(args.model)
    data = read_learning_set(args.data, classes=model.classes, criteria=model.criteria)
    wrong = extends(model, data)
    if not wrong:
        print(f"OK: all {len(data)} alternatives restored")
        return 0
    for aid, expected, got in wrong:
        print(f"{aid}: expected class {expected}, model assigns {got}")
    print(f"{len(wrong)} of {len(data)} alternatives misassigned")
    return 1


def cmd_eval(args):
    a, b = read_model(args.model), read_model(args.other)
    n = args.samples or default_sample_size(a.criteria.count)
    rate = err_rate(a, b, n, np.random.default_rng(args.seed))
    print(f"err_rate {rate!r} over {n} samples")
    return 0


def cmd_oracle(args):
    data = _load_data(args)
    model = brute_force_representable(data)
    if model is None:
        print(UNREPRESENTABLE)
        return 1
    _write(args.output, dump_model(model))
    print(describe_model(model))
    return 0


def cmd_bench(args):
    cfg = bench.BenchConfig.from_json(Path(args.config).read_text()) if args.config else bench.BenchConfig()
    overrides = {
        "trials": args.trials, "seed": args.seed, "workers": args.workers,
        "methods": _names(args.methods) or None, "time_limit": args.time_limit,
    }
    doc = {**bench.asdict(cfg), **{k: v for k, v in overrides.items() if v is not None}}
    doc["sat_cmd"] = doc["sat_cmd"] or os.environ.get("NCS_SAT_CMD")
    doc["mip_cmd"] = doc["mip_cmd"] or os.environ.get("NCS_MIP_CMD")
    if args.no_timings:
        doc["timings"] = False
    cfg = bench.BenchConfig.from_dict(doc)
    rows = bench.run_grid(cfg)
    _write(args.output, bench.dump_csv(rows, cfg.timings))
    for s in bench.summarize(rows):
        err = "-" if s["median_err_rate"] is None else f"{s['median_err_rate']:.4f}"
        t = f"{s['median_solve_ms']:.1f}ms" if cfg.timings else "-"
        print(f"{s['method']:<12} N={s['n_criteria']} p={s['n_classes']} X*={s['n_alts']:<4} "
              f"runs={s['runs']} failures={s['failures']} median solve={t} median err={err}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ncsat", description="Learn non-compensatory sorting models from examples.")
    ap.add_argument("--version", action="version", version=f"%(prog)s (solver kernel: {BACKEND})")
    sub = ap.add_subparsers(dest="command", required=True)

    def data_opts(p):
        p.add_argument("--data", required=True, help="learning-set CSV")
        p.add_argument("--minimize", default="", help="comma-separated criteria to minimize")
        p.add_argument("--classes", type=int, default=None, help="number of classes (default: largest present)")

    p = sub.add_parser("gen-model", help="draw a random MR-Sort model")
    p.add_argument("--criteria", type=int, required=True)
    p.add_argument("--classes", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen_model)

    p = sub.add_parser("gen-data", help="draw a learning set labelled by a model")
    p.add_argument("--model", required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen_data)

    p = sub.add_parser("encode", help="write the SAT or MIP formulation of a learning set")
    data_opts(p)
    p.add_argument("--format", choices=("dimacs", "lp-o", "lp-d"), default="dimacs")
    p.add_argument("--eps", type=float, default=mip.EPS, help="strict-margin epsilon for LP output")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("learn", help="learn a model restoring a learning set")
    data_opts(p)
    p.add_argument("--method", choices=bench.METHODS, default="sat")
    p.add_argument("--solver-cmd", help="external DIMACS solver command (default: $NCS_SAT_CMD)")
    p.add_argument("--mip-cmd", help="external MIP command template (default: $NCS_MIP_CMD)")
    p.add_argument("--eps", type=float, default=mip.EPS)
    p.add_argument("--time-limit", type=float, default=600.0)
    p.add_argument("--max-conflicts", type=int, default=10**7)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("check", help="verify that a model restores a learning set")
    p.add_argument("--model", required=True)
    p.add_argument("--data", required=True)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("eval", help="disagreement rate of two models on random profiles")
    p.add_argument("--model", required=True)
    p.add_argument("--other", required=True)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("oracle", help="brute-force representability check (tiny instances)")
    data_opts(p)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("bench", help="run a grid experiment")
    p.add_argument("--config", help="bench config JSON")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--methods", help="comma-separated subset of " + ",".join(bench.METHODS))
    p.add_argument("--workers", type=int)
    p.add_argument("--time-limit", type=float)
    p.add_argument("--no-timings", action="store_true", help="leave timing columns empty")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_bench)
    return ap


def run(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"ncsat {args.command}: {exc}", file=sys.stderr)
        return 2
    except (NcsError, OSError, ValueError) as exc:
        print(f"ncsat {args.command}: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())
