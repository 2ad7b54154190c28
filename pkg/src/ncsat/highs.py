"""LP-file adapter around scipy's HiGHS MILP solver.

``python -m ncsat.highs MODEL.lp SOLUTION.sol`` reads an LP file written by
:func:`ncsat.mip.write_lp` and writes ``name value`` lines (or
``status infeasible``).  Any other failure (unbounded, time limit without
an incumbent) exits with status 1 and writes nothing.  It lets ``NCS_MIP_CMD`` point at a solver that ships
with scipy:

    NCS_MIP_CMD="python3 -m ncsat.highs {lp} {sol}"
"""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np

from .mip import BINARY, MipModel, read_lp, write_solution


class HighsFailure(Exception):
    pass


def solve_highs(m: MipModel, time_limit: float | None = None) -> dict | None:
    """Solution values, ``None`` if proven infeasible; raises HighsFailure otherwise."""
    from scipy.optimize import Bounds, LinearConstraint, milp
    from scipy.sparse import lil_matrix

    names = list(m.variables)
    col = {v: k for k, v in enumerate(names)}
    c = np.zeros(len(names))
    for v, coef in m.objective:
        c[col[v]] += coef
    A = lil_matrix((len(m.constraints), len(names)))
    lo = np.full(len(m.constraints), -np.inf)
    hi = np.full(len(m.constraints), np.inf)
    for r, con in enumerate(m.constraints):
        for v, coef in con.terms:
            A[r, col[v]] += coef
        if con.sense in ("<=", "="):
            hi[r] = con.rhs
        if con.sense in (">=", "="):
            lo[r] = con.rhs
    var = [m.variables[v] for v in names]
    integrality = np.array([1 if v.kind == BINARY else 0 for v in var])
    bounds = Bounds([v.lb for v in var], [v.ub for v in var])
    options = {"time_limit": time_limit} if time_limit else {}
    cons = [LinearConstraint(A.tocsr(), lo, hi)] if m.constraints else []
    res = milp(c, constraints=cons, integrality=integrality, bounds=bounds, options=options)
    if res.x is None:
        if res.status == 2:  # infeasible
            return None
        raise HighsFailure(f"HiGHS status {res.status}: {res.message}")
    return {v: float(x) for v, x in zip(names, res.x)}


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 2:
        print("usage: python -m ncsat.highs MODEL.lp SOLUTION.sol", file=sys.stderr)
        return 2
    m = read_lp(Path(argv[0]).read_text())
    try:
        values = solve_highs(m)
    except HighsFailure as exc:
        print(exc, file=sys.stderr)
        return 1
    Path(argv[1]).write_text(write_solution(values))
    return 0


if __name__ == "__main__":
    sys.exit(main())
