"""Boolean encoding of U-NCS representability and decoding of its solutions.

Variables:

* ``x[i, h, k]`` is true when reference value ``k`` of criterion ``i`` reaches
  frontier ``h``;
* ``y[B]`` is true when coalition ``B`` is sufficient.

Clause families, in emission order:

* ``3a`` ascending scales, consecutive reference values only;
* ``3b`` nested frontiers, consecutive frontiers only;
* ``3c`` upward-closed coalitions, covering pairs only;
* ``3d`` an alternative of class ``h`` must not pass frontier ``h``;
* ``3e`` an alternative of class ``h + 1`` must pass frontier ``h``.
"""

from __future__ import annotations

import bisect
import json
import logging
from dataclasses import dataclass, field
from typing import Sequence

from .core import ABOVE_ALL, Alternative, LearningSet, UncsModel, UpSet, as_uncs
from .errors import InputError, ParseError

log = logging.getLogger(__name__)

FAMILIES = ("3a", "3b", "3c", "3d", "3e")


@dataclass(frozen=True)
class Vocabulary:
    """Mapping between variable ids and their meaning for one learning set."""

    criteria: object
    classes: int
    values: tuple  # values[i] = sorted distinct reference values on criterion i
    offsets: tuple  # offsets[i] = id of x[i, 1, values[i][0]] minus one
    y_base: int  # id of y[empty coalition] minus one

    @property
    def n_x(self) -> int:
        return self.y_base

    @property
    def n_y(self) -> int:
        return 1 << self.criteria.count

    @property
    def num_vars(self) -> int:
        return self.y_base + self.n_y

    def x(self, i: int, h: int, rank: int) -> int:
        """Id of the variable for criterion ``i``, frontier ``h`` (1-based), value rank."""
        return self.offsets[i] + (h - 1) * len(self.values[i]) + rank + 1

    def x_value(self, i: int, h: int, value: float) -> int:
        vals = self.values[i]
        rank = bisect.bisect_left(vals, value)
        if rank == len(vals) or vals[rank] != value:
            raise InputError(f"{value} is not a reference value of criterion {i}")
        return self.x(i, h, rank)

    def y(self, mask: int) -> int:
        return self.y_base + mask + 1

    def describe(self, var: int):
        """Semantic tuple of a variable id: ``('x', name, h, value)`` or ``('y', mask)``."""
        if not 1 <= var <= self.num_vars:
            raise InputError(f"variable {var} out of range 1..{self.num_vars}")
        if var > self.y_base:
            return ("y", var - self.y_base - 1)
        for i in range(self.criteria.count):
            width = len(self.values[i])
            span = (self.classes - 1) * width
            rel = var - self.offsets[i] - 1
            if 0 <= rel < span:
                h, rank = divmod(rel, width)
                return ("x", self.criteria.names[i], h + 1, self.values[i][rank])
        raise AssertionError("unreachable")  # pragma: no cover

    def to_json(self) -> str:
        return json.dumps(
            {str(v): list(self.describe(v)) for v in range(1, self.num_vars + 1)}, indent=1
        )


def build_vocabulary(data: LearningSet) -> Vocabulary:
    n = data.criteria.count
    values = tuple(tuple(data.values(i)) for i in range(n))
    offsets = []
    nxt = 0
    for i in range(n):
        offsets.append(nxt)
        nxt += (data.classes - 1) * len(values[i])
    return Vocabulary(data.criteria, data.classes, values, tuple(offsets), nxt)


@dataclass
class CnfInstance:
    num_vars: int
    clauses: list
    vocab: Vocabulary | None = None
    family_counts: dict = field(default_factory=dict)

    def __post_init__(self):
        for c in self.clauses:
            if not c:
                raise InputError("empty clause")
            for lit in c:
                if lit == 0 or abs(lit) > self.num_vars:
                    raise InputError(f"literal {lit} out of range 1..{self.num_vars}")
            if len(c) > 1 and len({abs(lit) for lit in c}) < len(set(c)):
                raise InputError(f"clause {c} contains a literal and its negation")

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)


class TruthAssignment:
    """Total assignment of variables ``1..num_vars``."""

    __slots__ = ("values",)

    def __init__(self, values: Sequence[bool]):
        # values[0] is a placeholder so that ids index directly
        self.values = (False, *(bool(v) for v in values))

    @classmethod
    def from_literals(cls, num_vars: int, literals) -> "TruthAssignment":
        vals = [False] * num_vars
        for lit in literals:
            if lit == 0 or abs(lit) > num_vars:
                raise InputError(f"literal {lit} out of range 1..{num_vars}")
            vals[abs(lit) - 1] = lit > 0
        return cls(vals)

    def __getitem__(self, var: int) -> bool:
        return self.values[var]

    def __len__(self):
        return len(self.values) - 1

    def __eq__(self, other):
        return isinstance(other, TruthAssignment) and self.values == other.values

    def __repr__(self):
        return f"TruthAssignment({list(self.values[1:])})"

    def literals(self) -> list[int]:
        return [v if self.values[v] else -v for v in range(1, len(self.values))]


def unique_alternatives(data: LearningSet) -> list[Alternative]:
    """Drop repeated (profile, class) pairs; warn about contradictory duplicates."""
    seen: dict = {}
    out = []
    for a in data.alternatives:
        prev = seen.get(a.profile)
        if prev is None:
            seen[a.profile] = {a.category}
            out.append(a)
        elif a.category not in prev:
            prev.add(a.category)
            out.append(a)
            log.warning(
                "profile %s appears with classes %s: the learning set is not representable",
                a.profile, sorted(prev),
            )
    return out


def conflicting_profiles(data: LearningSet) -> list:
    classes: dict = {}
    for a in data.alternatives:
        classes.setdefault(a.profile, set()).add(a.category)
    return [p for p, c in classes.items() if len(c) > 1]


def encode(data: LearningSet) -> CnfInstance:
    """Clauses satisfiable exactly when some U-NCS model extends ``data``."""
    p = data.classes
    if p < 2:
        raise InputError(f"at least two classes are required, got {p}")
    voc = build_vocabulary(data)
    n = data.criteria.count
    full = (1 << n) - 1
    fams: dict[str, list] = {f: [] for f in FAMILIES}

    for i in range(n):
        width = len(voc.values[i])
        for h in range(1, p):
            for r in range(width - 1):
                fams["3a"].append([voc.x(i, h, r + 1), -voc.x(i, h, r)])
        for h in range(1, p - 1):
            for r in range(width):
                fams["3b"].append([voc.x(i, h, r), -voc.x(i, h + 1, r)])

    for mask in range(1 << n):
        for i in range(n):
            if not mask >> i & 1:
                fams["3c"].append([voc.y(mask | 1 << i), -voc.y(mask)])

    alts = unique_alternatives(data)
    ranks = [
        [bisect.bisect_left(voc.values[i], a.profile[i]) for i in range(n)] for a in alts
    ]
    members = [[i for i in range(n) if mask >> i & 1] for mask in range(1 << n)]
    for h in range(1, p):
        below = [r for a, r in zip(alts, ranks) if a.category == h]
        above = [r for a, r in zip(alts, ranks) if a.category == h + 1]
        for r in below:
            xs = [voc.x(i, h, r[i]) for i in range(n)]
            for mask in range(1 << n):
                fams["3d"].append([-xs[i] for i in members[mask]] + [-voc.y(mask)])
        for r in above:
            xs = [voc.x(i, h, r[i]) for i in range(n)]
            for mask in range(1 << n):
                fams["3e"].append([xs[i] for i in members[mask]] + [voc.y(full ^ mask)])

    clauses = [c for f in FAMILIES for c in fams[f]]
    return CnfInstance(
        voc.num_vars, clauses, voc, {f: len(fams[f]) for f in FAMILIES}
    )


def model_to_assignment(model, vocab: Vocabulary) -> TruthAssignment:
    """Truth assignment induced by a model: value above threshold, coalition sufficient."""
    model = as_uncs(model)
    vals = [False] * vocab.num_vars
    for i, vs in enumerate(vocab.values):
        for h in range(1, vocab.classes):
            b = model.frontiers[h - 1][i]
            for r, k in enumerate(vs):
                vals[vocab.x(i, h, r) - 1] = k >= b
    for mask in range(vocab.n_y):
        vals[vocab.y(mask) - 1] = mask in model.sufficient
    return TruthAssignment(vals)


def decode(vocab: Vocabulary, sol: TruthAssignment) -> UncsModel:
    """Model read off a satisfying assignment.

    Frontier ``h`` on criterion ``i`` is the smallest reference value whose
    variable is true (``ABOVE_ALL`` if none is); sufficient coalitions are the
    ``y`` variables set to true.
    """
    if len(sol) < vocab.num_vars:
        raise InputError(f"assignment covers {len(sol)} of {vocab.num_vars} variables")
    n = vocab.criteria.count
    frontiers = []
    for h in range(1, vocab.classes):
        b = []
        for i in range(n):
            b.append(next(
                (k for r, k in enumerate(vocab.values[i]) if sol[vocab.x(i, h, r)]),
                ABOVE_ALL,
            ))
        frontiers.append(tuple(b))
    upset = UpSet(n, (sol[vocab.y(m)] for m in range(vocab.n_y)))
    return UncsModel(vocab.criteria, vocab.classes, tuple(frontiers), upset)


def verify(cnf: CnfInstance, sol: TruthAssignment) -> list[int]:
    """Indices of clauses left unsatisfied by ``sol`` (independent of any solver)."""
    vals = sol.values
    if len(sol) < cnf.num_vars:
        raise InputError(f"assignment covers {len(sol)} of {cnf.num_vars} variables")
    return [
        idx
        for idx, c in enumerate(cnf.clauses)
        if not any(vals[lit] if lit > 0 else not vals[-lit] for lit in c)
    ]


def write_dimacs(cnf: CnfInstance, comments: bool = True) -> str:
    lines = [f"p cnf {cnf.num_vars} {cnf.num_clauses}"]
    voc = cnf.vocab
    if comments and voc is not None:
        for f, c in cnf.family_counts.items():
            lines.append(f"c family {f} {c}")
        for var in range(1, voc.num_vars + 1):
            kind, *rest = voc.describe(var)
            if kind == "x":
                name, h, value = rest
                lines.append(f"c x {var} {name} {h} {value!r}")
            else:
                lines.append(f"c y {var} {rest[0]}")
    lines.extend(" ".join(map(str, c)) + " 0" for c in cnf.clauses)
    return "\n".join(lines) + "\n"


def read_dimacs(text: str) -> CnfInstance:
    """Parse DIMACS CNF; clauses may span lines and comments may appear anywhere."""
    num_vars = num_clauses = None
    clauses = []
    current: list[int] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf" or num_vars is not None:
                raise ParseError(f"line {lineno}: bad problem line {line!r}")
            try:
                num_vars, num_clauses = int(parts[2]), int(parts[3])
            except ValueError:
                raise ParseError(f"line {lineno}: bad problem line {line!r}") from None
            continue
        if num_vars is None:
            raise ParseError(f"line {lineno}: clause before problem line")
        try:
            lits = [int(t) for t in line.split()]
        except ValueError:
            raise ParseError(f"line {lineno}: non-integer literal in {line!r}") from None
        for lit in lits:
            if lit == 0:
                clauses.append(current)
                current = []
            else:
                current.append(lit)
    if num_vars is None:
        raise ParseError("missing problem line")
    if current:
        clauses.append(current)
    if len(clauses) != num_clauses:
        raise ParseError(f"header announces {num_clauses} clauses, found {len(clauses)}")
    try:
        return CnfInstance(num_vars, clauses)
    except InputError as exc:
        raise ParseError(str(exc)) from None


def parse_solver_output(text: str, num_vars: int | None = None) -> TruthAssignment | None:
    """Read SAT-competition solver output.

    Returns ``None`` for ``s UNSATISFIABLE`` and a :class:`TruthAssignment`
    for ``s SATISFIABLE`` (variables absent from the ``v`` lines are false).
    """
    status = None
    lits: list[int] = []
    for line in text.splitlines():
        line = line.strip()
        if line.startswith("s "):
            word = line[2:].strip()
            if word == "UNSATISFIABLE":
                status = False
            elif word == "SATISFIABLE":
                status = True
            else:
                raise ParseError(f"unsupported status line {line!r}")
        elif line.startswith("v ") or line == "v":
            try:
                lits.extend(int(t) for t in line[1:].split())
            except ValueError:
                raise ParseError(f"bad value line {line!r}") from None
    if status is None:
        raise ParseError("no status line in solver output")
    if not status:
        return None
    lits = [lit for lit in lits if lit != 0]
    top = max((abs(lit) for lit in lits), default=0)
    if num_vars is None:
        num_vars = top
    elif top > num_vars:
        raise ParseError(f"literal {top} out of range 1..{num_vars}")
    return TruthAssignment.from_literals(num_vars, lits)
