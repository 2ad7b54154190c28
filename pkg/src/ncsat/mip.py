"""Mixed-integer formulations for learning an MR-Sort model (MIP-O and MIP-D).

Both formulations work on criterion values rescaled affinely into ``[0, 1]``
(:func:`normalize`).  The strict inequality separating accepted from rejected
values is realized with a margin ``eps`` (default ``EPS``); ``BIG_M`` only needs to exceed the
range of ``a_i - b_i``.

Variable names are derived from semantic indices: ``b_<h>_<i>`` (frontier,
criterion), ``w_<i>``, ``lambda``, ``alpha``, ``x_a<j>`` / ``y_a<j>`` (slack of
the j-th alternative at its lower / upper frontier), ``c_a<j>_<i>_<k>`` and
``d_a<j>_<i>_<k>`` (vote and binary indicator of criterion ``i`` at frontier
``k``).  Indices are 1-based.
"""

from __future__ import annotations

import math
import os
import re
import shlex
import subprocess
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from .core import (
    ABOVE_ALL,
    Alternative,
    LearningSet,
    MrSortModel,
    extends,
)
from .errors import BridgeError, DecodeError, FaithfulnessError, InputError, ParseError

BIG_M = 2.0
EPS = 1e-6
FRONTIER_UB = 1.5  # headroom above 1 lets a frontier reject the value 1
FEAS_TOL = 1e-6
WEIGHT_CAP = 1000.0  # MIP-D weight bound; the vote linearization needs one

MIP_O = "MIP-O"
MIP_D = "MIP-D"

CONTINUOUS = "continuous"
BINARY = "binary"


@dataclass(frozen=True)
class Var:
    name: str
    kind: str = CONTINUOUS
    lb: float = 0.0
    ub: float = math.inf


@dataclass(frozen=True)
class Constraint:
    name: str
    terms: tuple  # ((var name, coefficient), ...)
    sense: str  # "<=", ">=" or "="
    rhs: float

    def activity(self, values) -> float:
        return math.fsum(c * values[v] for v, c in self.terms)

    def violation(self, values) -> float:
        lhs = self.activity(values)
        if self.sense == "<=":
            return max(0.0, lhs - self.rhs)
        if self.sense == ">=":
            return max(0.0, self.rhs - lhs)
        return abs(lhs - self.rhs)


@dataclass
class MipModel:
    variant: str = ""
    variables: dict = field(default_factory=dict)  # name -> Var, in declaration order
    constraints: list = field(default_factory=list)
    objective: tuple = ()  # minimized
    data: LearningSet | None = None  # normalized learning set
    source: LearningSet | None = None  # learning set as given
    index: dict = field(default_factory=dict)  # (alt position, criterion, frontier) -> d name
    eps: float = EPS

    def add_var(self, name, kind=CONTINUOUS, lb=0.0, ub=math.inf) -> str:
        if name in self.variables:
            raise InputError(f"duplicate variable {name}")
        self.variables[name] = Var(name, kind, lb, ub)
        return name

    def add(self, name, terms, sense, rhs) -> None:
        for v, _ in terms:
            if v not in self.variables:
                raise InputError(f"constraint {name} uses undeclared variable {v}")
        self.constraints.append(Constraint(name, tuple(terms), sense, float(rhs)))

    def count(self, kind: str) -> int:
        return sum(1 for v in self.variables.values() if v.kind == kind)

    def violations(self, values, tol: float = FEAS_TOL) -> list[str]:
        """Descriptions of every bound, integrality or row violated by ``values``."""
        out = []
        for v in self.variables.values():
            x = values[v.name]
            if x < v.lb - tol or x > v.ub + tol:
                out.append(f"{v.name}={x} outside [{v.lb}, {v.ub}]")
            if v.kind == BINARY and min(abs(x), abs(x - 1)) > tol:
                out.append(f"{v.name}={x} not binary")
        for c in self.constraints:
            if c.violation(values) > tol:
                out.append(f"{c.name}: {c.activity(values)} {c.sense} {c.rhs}")
        return out


def normalize(data: LearningSet) -> tuple[LearningSet, tuple]:
    """Rescale every criterion affinely onto ``[0, 1]``; also return ``(low, span)`` pairs."""
    scales = []
    for i in range(data.criteria.count):
        vals = data.values(i)
        lo = vals[0] if vals else 0.0
        span = vals[-1] - lo if vals else 0.0
        scales.append((lo, span))
    alts = tuple(
        Alternative(
            a.id,
            tuple((v - lo) / span if span > 0 else 0.0 for v, (lo, span) in zip(a.profile, scales)),
            a.category,
        )
        for a in data.alternatives
    )
    return LearningSet(data.criteria, data.classes, alts), tuple(scales)


def _frontiers_of(category: int, p: int) -> list[int]:
    return [k for k in (category - 1, category) if 1 <= k <= p - 1]


def _build(data: LearningSet, variant: str, eps: float, cap: float = 1.0) -> MipModel:
    for a in data.alternatives:
        if any(not 0.0 <= v <= 1.0 for v in a.profile):
            raise InputError(
                f"alternative {a.id!r} has values outside [0, 1]; call normalize() first"
            )
    n, p = data.criteria.count, data.classes
    if not 0.0 < eps < 1.0:
        raise InputError(f"margin eps must lie in (0, 1), got {eps}")
    m = MipModel(variant=variant, data=data, eps=eps)
    if variant == MIP_O:
        m.add_var("alpha")
    # with weights summing to 1 a threshold above 1 only empties the upset, which
    # frontiers above every value already express; the cap keeps alpha bounded
    m.add_var("lambda", ub=1.0 if variant == MIP_O else math.inf)
    for h in range(1, p):
        for i in range(1, n + 1):
            m.add_var(f"b_{h}_{i}", ub=FRONTIER_UB)
    for i in range(1, n + 1):
        m.add_var(f"w_{i}", ub=cap)

    for j, a in enumerate(data.alternatives, start=1):
        ks = _frontiers_of(a.category, p)
        if a.category >= 2:
            m.add_var(f"x_a{j}")
        if a.category <= p - 1:
            m.add_var(f"y_a{j}")
        for k in ks:
            for i in range(1, n + 1):
                m.add_var(f"c_a{j}_{i}_{k}")
                m.index[(j, i, k)] = m.add_var(f"d_a{j}_{i}_{k}", BINARY, 0.0, 1.0)

    for j, a in enumerate(data.alternatives, start=1):
        for k in _frontiers_of(a.category, p):
            for i in range(1, n + 1):
                ai = a.profile[i - 1]
                b, d, c, w = f"b_{k}_{i}", f"d_a{j}_{i}_{k}", f"c_a{j}_{i}_{k}", f"w_{i}"
                tag = f"a{j}_{i}_{k}"
                # M (d - 1) <= a_i - b  and  a_i - b <= M d - eps
                m.add(f"accept_{tag}", ((b, -1.0), (d, -BIG_M)), ">=", -BIG_M - ai)
                m.add(f"reject_{tag}", ((b, -1.0), (d, -BIG_M)), "<=", -eps - ai)
                m.add(f"votecap_{tag}", ((c, 1.0), (w, -1.0)), "<=", 0.0)
                # c = w * d, exact because 0 <= w <= cap
                m.add(f"voteind_{tag}", ((c, 1.0), (d, -cap)), "<=", 0.0)
                m.add(f"votefloor_{tag}", ((c, 1.0), (d, -cap), (w, -1.0)), ">=", -cap)

    for h in range(2, p):
        for i in range(1, n + 1):
            m.add(f"nest_{h}_{i}", ((f"b_{h}_{i}", 1.0), (f"b_{h - 1}_{i}", -1.0)), ">=", 0.0)

    if variant == MIP_O:
        m.add("normalize", tuple((f"w_{i}", 1.0) for i in range(1, n + 1)), "=", 1.0)

    for j, a in enumerate(data.alternatives, start=1):
        if a.category >= 2:
            k = a.category - 1
            votes = tuple((f"c_a{j}_{i}_{k}", 1.0) for i in range(1, n + 1))
            m.add(f"lower_a{j}", votes + (("lambda", -1.0), (f"x_a{j}", -1.0)), "=", 0.0)
        if a.category <= p - 1:
            k = a.category
            votes = tuple((f"c_a{j}_{i}_{k}", 1.0) for i in range(1, n + 1))
            m.add(f"upper_a{j}", votes + (("lambda", -1.0), (f"y_a{j}", 1.0)), "=", 0.0)

    for j, a in enumerate(data.alternatives, start=1):
        for s, present in (("x", a.category >= 2), ("y", a.category <= p - 1)):
            if not present:
                continue
            if variant == MIP_O:
                m.add(f"alpha_{s}_a{j}", (("alpha", 1.0), (f"{s}_a{j}", -1.0)), "<=", 0.0)
            else:
                m.add(f"slack_{s}_a{j}", ((f"{s}_a{j}", 1.0),), ">=", 1.0)

    if variant == MIP_O:
        m.objective = (("alpha", -1.0),)
    return m


def encode_mip_o(data: LearningSet, eps: float = EPS) -> MipModel:
    """MIP-O: maximize the minimal vote margin ``alpha`` (emitted as minimize ``-alpha``)."""
    return _build(data, MIP_O, eps)


def encode_mip_d(data: LearningSet, eps: float = EPS, weight_cap: float = WEIGHT_CAP) -> MipModel:
    """MIP-D: feasibility version with unnormalized weights and unit vote margins.

    Weights are bounded by ``weight_cap``, which also replaces the unit bound
    in ``c <= d``: with votes capped at 1, a one-vote gap on both sides of
    ``lambda`` could only be met by weights above 1 that the cap forbids.
    """
    if weight_cap < 1.0:
        raise InputError(f"weight_cap must be at least 1, got {weight_cap}")
    return _build(data, MIP_D, eps, weight_cap)


def encode_raw(data: LearningSet, variant: str, eps: float = EPS) -> MipModel:
    """Normalize ``data`` and encode it; decoding then maps back to ``data``'s scales."""
    if variant not in (MIP_O, MIP_D):
        raise InputError(f"unknown MIP variant {variant!r}")
    norm, _ = normalize(data)
    m = encode_mip_o(norm, eps) if variant == MIP_O else encode_mip_d(norm, eps)
    m.source = data
    return m


def _num(x: float) -> str:
    return repr(float(x))


def _terms(terms) -> str:
    parts = []
    for v, c in terms:
        parts.append(f"{'-' if c < 0 else '+'} {_num(abs(c))} {v}")
    return " ".join(parts) if parts else "0"


def write_lp(m: MipModel) -> str:
    """CPLEX LP text: Minimize / Subject To / Bounds / Binaries / End."""
    lines = ["Minimize", f" obj: {_terms(m.objective)}", "Subject To"]
    for c in m.constraints:
        lines.append(f" {c.name}: {_terms(c.terms)} {c.sense} {_num(c.rhs)}")
    bounds = []
    for v in m.variables.values():
        if v.kind == BINARY:
            continue
        if v.lb == -math.inf and v.ub == math.inf:
            bounds.append(f" {v.name} free")
        elif v.ub == math.inf:
            bounds.append(f" {v.name} >= {_num(v.lb)}")
        else:
            bounds.append(f" {_num(v.lb)} <= {v.name} <= {_num(v.ub)}")
    if bounds:
        lines.append("Bounds")
        lines.extend(bounds)
    binaries = [v.name for v in m.variables.values() if v.kind == BINARY]
    if binaries:
        lines.append("Binaries")
        lines.extend(f" {b}" for b in binaries)
    lines.append("End")
    return "\n".join(lines) + "\n"


_ROW = re.compile(r"^\s*(?:(?P<name>[^:\s]+)\s*:)?\s*(?P<body>.*?)\s*(?P<sense><=|>=|=)\s*(?P<rhs>\S+)\s*$")


def _parse_terms(body: str) -> list:
    toks = body.split()
    if toks == ["0"] or not toks:
        return []
    terms = []
    k = 0
    while k < len(toks):
        sign = 1.0
        if toks[k] in "+-":
            sign = -1.0 if toks[k] == "-" else 1.0
            k += 1
        coef = 1.0
        try:
            coef = float(toks[k])
            k += 1
        except (ValueError, IndexError):
            pass
        if k >= len(toks):
            raise ParseError(f"dangling coefficient in {body!r}")
        terms.append((toks[k], sign * coef))
        k += 1
    return terms


def read_lp(text: str) -> MipModel:
    """Parse LP text as produced by :func:`write_lp` (one row per line)."""
    m = MipModel()
    section = None
    rows = []
    bounds = {}
    binaries = []
    seen = []
    for raw in text.splitlines():
        line = raw.split("\\", 1)[0].strip()
        if not line:
            continue
        low = line.lower()
        if low in ("minimize", "maximize", "subject to", "bounds", "binaries", "binary", "end"):
            section = low
            if low == "maximize":
                raise ParseError("only Minimize objectives are supported")
            continue
        if section == "minimize":
            name, _, body = line.partition(":")
            terms = _parse_terms(body if _ else name)
            m.objective = tuple(terms)
            seen.extend(v for v, _ in terms)
        elif section == "subject to":
            match = _ROW.match(line)
            if not match:
                raise ParseError(f"cannot parse constraint {line!r}")
            terms = _parse_terms(match["body"])
            seen.extend(v for v, _ in terms)
            rows.append((match["name"] or f"r{len(rows) + 1}", terms, match["sense"], float(match["rhs"])))
        elif section == "bounds":
            toks = line.split()
            if len(toks) == 2 and toks[1].lower() == "free":
                bounds[toks[0]] = (-math.inf, math.inf)
            elif len(toks) == 3 and toks[1] == ">=":
                bounds[toks[0]] = (float(toks[2]), math.inf)
            elif len(toks) == 3 and toks[1] == "<=":
                bounds[toks[0]] = (0.0, float(toks[2]))
            elif len(toks) == 5 and toks[1] == toks[3] == "<=":
                bounds[toks[2]] = (float(toks[0]), float(toks[4]))
            else:
                raise ParseError(f"cannot parse bound {line!r}")
            seen.append(toks[2] if len(toks) == 5 else toks[0])
        elif section in ("binaries", "binary"):
            binaries.extend(line.split())
            seen.extend(line.split())
        else:
            raise ParseError(f"text outside any section: {line!r}")
    if section != "end":
        raise ParseError("missing End")
    for name in dict.fromkeys(seen):
        if name in binaries:
            m.add_var(name, BINARY, 0.0, 1.0)
        else:
            lb, ub = bounds.get(name, (0.0, math.inf))
            m.add_var(name, CONTINUOUS, lb, ub)
    for name, terms, sense, rhs in rows:
        m.add(name, terms, sense, rhs)
    return m


def read_solution(text: str) -> dict | None:
    """Parse ``name value`` lines; ``None`` if the file declares ``status infeasible``."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if toks[0].lower() == "status":
            if len(toks) > 1 and toks[1].lower() == "infeasible":
                return None
            continue
        if len(toks) != 2:
            raise ParseError(f"line {lineno}: expected 'name value', got {line!r}")
        try:
            values[toks[0]] = float(toks[1])
        except ValueError:
            raise ParseError(f"line {lineno}: bad number {toks[1]!r}") from None
    return values


def write_solution(values: dict | None) -> str:
    if values is None:
        return "status infeasible\n"
    return "".join(f"{k} {_num(v)}\n" for k, v in values.items())


def unrepresentable(m: MipModel, values: dict | None, tol: float = FEAS_TOL) -> bool:
    """Whether a solver answer means no MR-Sort model restores the data.

    MIP-O is always feasible with ``alpha = 0`` (everything rejected, zero
    threshold), so only a strictly positive optimal margin certifies a model.
    """
    if values is None:
        return True
    return m.variant == MIP_O and values.get("alpha", 0.0) <= tol


def _snap(norm_vals, raw_vals, b, tol):
    # smallest reference value accepted by threshold b
    best = ABOVE_ALL
    for nv, rv in zip(norm_vals, raw_vals):
        if nv >= b - tol and rv < best:
            best = rv
    return best


def decode_mrsort(m: MipModel, values: dict) -> MrSortModel:
    """MR-Sort model read off a feasible solution of ``m``.

    Frontiers are mapped back to the learning set's own scale by taking, per
    criterion, the smallest reference value the solution accepts (which
    changes nothing for the reference alternatives).  Raises
    :class:`DecodeError` for partial or infeasible solutions and
    :class:`FaithfulnessError` if the model fails to restore the learning set.
    """
    if m.data is None:
        raise DecodeError("MIP model carries no learning set")
    missing = [v for v in m.variables if v not in values]
    if missing:
        raise DecodeError(f"solution lacks {len(missing)} variables, e.g. {missing[:3]}")
    bad = m.violations(values, min(FEAS_TOL, m.eps / 10))
    if bad:
        raise DecodeError(f"solution violates {len(bad)} constraints, e.g. {bad[:3]}")
    data, source = m.data, m.source or m.data
    n, p = data.criteria.count, data.classes
    frontiers = []
    for h in range(1, p):
        row = []
        for i in range(n):
            norm_vals = [a.profile[i] for a in data.alternatives]
            raw_vals = [a.profile[i] for a in source.alternatives]
            row.append(_snap(norm_vals, raw_vals, values[f"b_{h}_{i + 1}"], m.eps / 2))
        frontiers.append(tuple(row))
    weights = tuple(max(0.0, values[f"w_{i}"]) for i in range(1, n + 1))
    model = MrSortModel(source.criteria, p, tuple(frontiers), weights, max(0.0, values["lambda"]))
    wrong = extends(model, source)
    if wrong:
        raise FaithfulnessError(
            f"decoded MR-Sort model misassigns {len(wrong)} alternatives, e.g. {wrong[:3]}; "
            f"check eps={m.eps} and BIG_M={BIG_M} against the solver's feasibility tolerance"
        )
    return model


def solve_mip_external(m: MipModel, command: str, timeout: float | None = None) -> dict | None:
    """Run an external MIP solver and return its ``name -> value`` solution.

    ``command`` is a template with ``{lp}`` and ``{sol}`` placeholders; the
    solver must read the LP file and write ``name value`` lines to the
    solution path (or ``status infeasible``).  Returns ``None`` if infeasible.
    """
    if "{lp}" not in command or "{sol}" not in command:
        raise BridgeError("MIP command template needs {lp} and {sol} placeholders")
    with tempfile.TemporaryDirectory(prefix="ncsat-mip-") as tmp:
        lp, sol = os.path.join(tmp, "model.lp"), os.path.join(tmp, "model.sol")
        Path(lp).write_text(write_lp(m))
        argv = [t.replace("{lp}", lp).replace("{sol}", sol) for t in shlex.split(command)]
        try:
            proc = subprocess.run(argv, capture_output=True, text=True, timeout=timeout)
        except (OSError, subprocess.SubprocessError) as exc:
            raise BridgeError(f"could not run {argv[0]!r}: {exc}") from exc
        if not os.path.exists(sol):
            tail = (proc.stderr or proc.stdout or "").strip().splitlines()[-1:] or [""]
            raise BridgeError(f"{argv[0]!r} wrote no solution (exit {proc.returncode}) {tail[0]}")
        try:
            return read_solution(Path(sol).read_text())
        except ParseError as exc:
            raise BridgeError(f"unusable solution from {argv[0]!r}: {exc}") from exc
