"""Complete CNF decision procedure plus a bridge to external DIMACS solvers.

The search kernel is compiled from ``_csolver.pyx`` when available; otherwise,
or when ``NCS_PURE_PYTHON`` is set in the environment, the pure-Python kernel
in ``_pysolver`` is used.  Both implement the same algorithm and return the
same answers.
"""

from __future__ import annotations

import os
import shlex
import subprocess
import tempfile
import time
from dataclasses import dataclass, field

from ..errors import BridgeError, BudgetExceeded, ParseError
from ..sat import CnfInstance, TruthAssignment, parse_solver_output, verify, write_dimacs
from . import _pysolver

if os.environ.get("NCS_PURE_PYTHON"):
    _kernel = _pysolver
    BACKEND = "python"
else:
    try:
        from . import _csolver as _kernel
        BACKEND = "cython"
    except ImportError:  # extension not built
        _kernel = _pysolver
        BACKEND = "python"

SAT = "SAT"
UNSAT = "UNSAT"

DEFAULT_MAX_CONFLICTS = 10**7
DEFAULT_TIME_LIMIT = 600.0


def kernels() -> dict:
    """Available search kernels by name (used by the backend benchmark)."""
    out = {"python": _pysolver}
    try:
        from . import _csolver
        out["cython"] = _csolver
    except ImportError:
        pass
    return out


@dataclass(frozen=True)
class SolveResult:
    status: str
    assignment: TruthAssignment | None = None
    decisions: int = 0
    propagations: int = 0
    conflicts: int = 0
    wall_ms: float = 0.0
    fixed: tuple = field(default=(), repr=False)

    @property
    def sat(self) -> bool:
        return self.status == SAT


def solve(
    cnf: CnfInstance,
    *,
    learning: bool = True,
    heuristic: str = "vsids",
    restarts: bool = True,
    max_conflicts: int = DEFAULT_MAX_CONFLICTS,
    time_limit: float = DEFAULT_TIME_LIMIT,
    backend: str | None = None,
) -> SolveResult:
    """Decide ``cnf``.

    With ``learning`` (the default) the search learns first-UIP clauses,
    backjumps and, with ``restarts``, restarts on the Luby schedule.  Without
    it, the search is plain DPLL with chronological backtracking.

    ``heuristic="ordered"`` decides the lowest-indexed unassigned variable,
    ``False`` first.  ``"vsids"`` (learning only) ranks variables by conflict
    activity with saved phases; ties go to the lowest index, so the first
    decisions coincide with the ordered heuristic.  Both are deterministic.

    Raises :class:`BudgetExceeded` when ``max_conflicts`` or ``time_limit``
    (seconds) runs out.
    """
    if heuristic not in ("vsids", "ordered"):
        raise ValueError(f"unknown decision heuristic {heuristic!r}")
    kernel = _kernel if backend is None else kernels()[backend]
    t0 = time.perf_counter()
    status, model, dec, props, confl, fixed = kernel.run(
        cnf.num_vars, cnf.clauses, learning, heuristic == "vsids", restarts,
        max_conflicts, time_limit,
    )
    wall = (time.perf_counter() - t0) * 1000.0
    if status < 0:
        raise BudgetExceeded(
            f"gave up after {confl} conflicts and {wall / 1000:.1f} s "
            f"(limits: {max_conflicts} conflicts, {time_limit} s)"
        )
    if status == 0:
        return SolveResult(UNSAT, None, dec, props, confl, wall, tuple(fixed))
    return SolveResult(SAT, TruthAssignment(model[1:]), dec, props, confl, wall, tuple(fixed))


def solve_external(cnf: CnfInstance, command: str, timeout: float | None = None) -> SolveResult:
    """Run an external solver on ``cnf`` written to a temporary DIMACS file.

    ``command`` is split like a shell command line and receives the file path
    as its last argument (or in place of a ``{}`` token).  Exit codes are
    ignored; the ``s`` status line decides.  A SAT answer is re-checked against
    every clause before it is returned.
    """
    fd, path = tempfile.mkstemp(suffix=".cnf", prefix="ncsat-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(write_dimacs(cnf, comments=False))
        argv = shlex.split(command)
        if not argv:
            raise BridgeError("empty solver command")
        argv = [path if a == "{}" else a for a in argv] if "{}" in argv else [*argv, path]
        t0 = time.perf_counter()
        try:
            proc = subprocess.run(argv, capture_output=True, text=True, timeout=timeout)
        except (OSError, subprocess.SubprocessError) as exc:
            raise BridgeError(f"could not run {argv[0]!r}: {exc}") from exc
        wall = (time.perf_counter() - t0) * 1000.0
    finally:
        os.unlink(path)
    try:
        sol = parse_solver_output(proc.stdout, cnf.num_vars)
    except ParseError as exc:
        tail = (proc.stderr or "").strip().splitlines()[-1:] or [""]
        raise BridgeError(
            f"unusable output from {argv[0]!r} (exit {proc.returncode}): {exc} {tail[0]}".rstrip()
        ) from exc
    if sol is None:
        return SolveResult(UNSAT, None, wall_ms=wall)
    bad = verify(cnf, sol)
    if bad:
        raise BridgeError(
            f"external solver reported SAT but its assignment falsifies {len(bad)} clauses "
            f"(first: {cnf.clauses[bad[0]]})"
        )
    return SolveResult(SAT, sol, wall_ms=wall)
