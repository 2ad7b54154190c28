"""Minimal DIMACS front end: ``python -m ncsat.solver FILE.cnf``.

Prints SAT-competition output, so the embedded engine can also stand in as an
"external" solver behind :func:`ncsat.solver.solve_external`.
"""

import sys

from ..sat import read_dimacs
from . import solve


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 1:
        print("usage: python -m ncsat.solver FILE.cnf", file=sys.stderr)
        return 2
    with open(argv[0]) as fh:
        cnf = read_dimacs(fh.read())
    res = solve(cnf)
    if not res.sat:
        print("s UNSATISFIABLE")
        return 20
    print("s SATISFIABLE")
    lits = res.assignment.literals()
    for k in range(0, len(lits), 16):
        print("v " + " ".join(map(str, lits[k:k + 16])))
    print("v 0")
    return 10


if __name__ == "__main__":
    sys.exit(main())
