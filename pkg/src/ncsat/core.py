"""Domain types and exact semantics of non-compensatory ordinal sorting.

Every scale is stored in "more is better" orientation: values of criteria to be
minimized are negated when a profile is ingested through :class:`CriteriaSpec`,
so all comparisons below are plain ``>=`` on floats.

Coalitions of criteria are integer bit masks (bit ``i`` set means criterion ``i``
belongs to the coalition).  Frontier ``h`` (1-based) separates class ``h``
(below) from class ``h + 1`` (above).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import InputError, ModelError

ABOVE_ALL = math.inf
"""Frontier entry exceeding every scale value: no value is satisfactory."""

MAXIMIZE = "max"
MINIMIZE = "min"

Profile = tuple  # tuple[float, ...], oriented so that larger is better
Coalition = int


@dataclass(frozen=True)
class CriteriaSpec:
    names: tuple[str, ...]
    directions: tuple[str, ...] = ()

    def __post_init__(self):
        names = tuple(self.names)
        directions = tuple(self.directions) or (MAXIMIZE,) * len(names)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "directions", directions)
        if not names:
            raise InputError("at least one criterion is required")
        if len(set(names)) != len(names):
            raise InputError(f"criterion names must be unique: {names}")
        if len(directions) != len(names):
            raise InputError("one direction per criterion is required")
        for d in directions:
            if d not in (MAXIMIZE, MINIMIZE):
                raise InputError(f"unknown direction {d!r} (expected 'max' or 'min')")

    @classmethod
    def default(cls, count: int) -> "CriteriaSpec":
        return cls(tuple(f"c{i + 1}" for i in range(count)))

    @property
    def count(self) -> int:
        return len(self.names)

    @property
    def full(self) -> Coalition:
        return (1 << self.count) - 1

    def orient(self, raw: Sequence[float]) -> Profile:
        """Convert values in display units into the internal ascending orientation."""
        if len(raw) != self.count:
            raise InputError(f"expected {self.count} values, got {len(raw)}")
        out = []
        for v, d in zip(raw, self.directions):
            v = float(v)
            out.append(-v if d == MINIMIZE and v != ABOVE_ALL else v)
        return tuple(out)

    def display(self, values: Sequence[float]) -> tuple:
        """Inverse of :meth:`orient`; ``ABOVE_ALL`` is passed through unchanged."""
        return tuple(
            v if v == ABOVE_ALL or d == MAXIMIZE else -v
            for v, d in zip(values, self.directions)
        )

    def coalition_names(self, mask: Coalition) -> list[str]:
        return [n for i, n in enumerate(self.names) if mask >> i & 1]


def _check_lengths(x, y):
    if len(x) != len(y):
        raise InputError(f"profile length mismatch: {len(x)} != {len(y)}")


def favorable_coalition(x: Profile, b: Profile) -> Coalition:
    """Coalition of criteria on which ``x`` is at least as good as ``b``."""
    _check_lengths(x, b)
    mask = 0
    for i, (xi, bi) in enumerate(zip(x, b)):
        if xi >= bi:
            mask |= 1 << i
    return mask


def dominates(x: Profile, y: Profile) -> bool:
    """Weak Pareto dominance of ``x`` over ``y``."""
    return favorable_coalition(x, y) == (1 << len(x)) - 1


class UpSet:
    """Upward-closed family of coalitions over ``n`` criteria.

    Stored as a boolean membership table indexed by bit mask.
    """

    __slots__ = ("n", "table")

    def __init__(self, n: int, table: Iterable[bool]):
        table = tuple(bool(t) for t in table)
        if len(table) != 1 << n:
            raise ModelError(f"upset table must have {1 << n} entries, got {len(table)}")
        for mask, member in enumerate(table):
            if not member:
                continue
            for i in range(n):
                if not table[mask | 1 << i]:
                    raise ModelError(
                        f"not upward closed: {mask:#b} is a member but {mask | 1 << i:#b} is not"
                    )
        self.n = n
        self.table = table

    @classmethod
    def from_members(cls, n: int, members: Iterable[Coalition]) -> "UpSet":
        table = [False] * (1 << n)
        for m in members:
            if not 0 <= m < 1 << n:
                raise ModelError(f"coalition mask {m} out of range for {n} criteria")
            table[m] = True
        return cls(n, table)

    @classmethod
    def generated_by(cls, n: int, minimal: Iterable[Coalition]) -> "UpSet":
        """Smallest upset containing every coalition in ``minimal``."""
        minimal = list(minimal)
        for m in minimal:
            if not 0 <= m < 1 << n:
                raise ModelError(f"coalition mask {m} out of range for {n} criteria")
        table = [any(mask & m == m for m in minimal) for mask in range(1 << n)]
        return cls(n, table)

    def __contains__(self, mask: Coalition) -> bool:
        return self.table[mask]

    def __eq__(self, other):
        if not isinstance(other, UpSet):
            return NotImplemented
        return self.n == other.n and self.table == other.table

    def __hash__(self):
        return hash((self.n, self.table))

    def __repr__(self):
        return f"UpSet(n={self.n}, minimal={self.minimal()})"

    def members(self) -> list[Coalition]:
        return [m for m, t in enumerate(self.table) if t]

    def minimal(self) -> list[Coalition]:
        """Members none of whose proper subsets are members."""
        return [
            m
            for m, t in enumerate(self.table)
            if t and not any(m >> i & 1 and self.table[m & ~(1 << i)] for i in range(self.n))
        ]

    def __len__(self):
        return sum(self.table)


def mr_upset(weights: Sequence[float], threshold: float) -> UpSet:
    """Coalitions whose total weight reaches ``threshold`` (majority rule)."""
    if any(w < 0 for w in weights):
        raise InputError(f"weights must be non-negative: {tuple(weights)}")
    if threshold < 0:
        raise InputError(f"threshold must be non-negative: {threshold}")
    n = len(weights)
    # fsum is correctly rounded, hence monotone under adding non-negative terms;
    # naive left-to-right sums can break upward closure by one ulp.
    table = [
        math.fsum(weights[i] for i in range(n) if mask >> i & 1) >= threshold
        for mask in range(1 << n)
    ]
    return UpSet(n, table)


def _check_frontiers(criteria: CriteriaSpec, classes: int, frontiers) -> tuple:
    if classes < 2:
        raise ModelError(f"at least two classes are required, got {classes}")
    frontiers = tuple(tuple(float(v) for v in b) for b in frontiers)
    if len(frontiers) != classes - 1:
        raise ModelError(f"expected {classes - 1} frontiers, got {len(frontiers)}")
    for h, b in enumerate(frontiers):
        if len(b) != criteria.count:
            raise ModelError(f"frontier {h + 1} has {len(b)} entries, expected {criteria.count}")
        if any(math.isnan(v) or v == -math.inf for v in b):
            raise ModelError(f"frontier {h + 1} has a non-comparable entry: {b}")
    for h in range(1, len(frontiers)):
        lo, hi = frontiers[h - 1], frontiers[h]
        for i in range(criteria.count):
            if lo[i] > hi[i]:
                raise ModelError(
                    f"frontiers not nested on criterion {criteria.names[i]!r}: "
                    f"b{h}={lo[i]} > b{h + 1}={hi[i]}"
                )
    return frontiers


@dataclass(frozen=True)
class UncsModel:
    """Sorting model with nested frontiers and one family of sufficient coalitions."""

    criteria: CriteriaSpec
    classes: int
    frontiers: tuple
    sufficient: UpSet

    def __post_init__(self):
        object.__setattr__(
            self, "frontiers", _check_frontiers(self.criteria, self.classes, self.frontiers)
        )
        if not isinstance(self.sufficient, UpSet) or self.sufficient.n != self.criteria.count:
            raise ModelError("sufficient coalitions must be an UpSet over the model's criteria")

    def assign(self, x: Profile) -> int:
        return assign(self, x)


@dataclass(frozen=True)
class MrSortModel:
    criteria: CriteriaSpec
    classes: int
    frontiers: tuple
    weights: tuple
    threshold: float

    def __post_init__(self):
        object.__setattr__(
            self, "frontiers", _check_frontiers(self.criteria, self.classes, self.frontiers)
        )
        weights = tuple(float(w) for w in self.weights)
        if len(weights) != self.criteria.count:
            raise ModelError(f"expected {self.criteria.count} weights, got {len(weights)}")
        if any(w < 0 for w in weights) or self.threshold < 0:
            raise ModelError("weights and threshold must be non-negative")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "threshold", float(self.threshold))

    @property
    def upset(self) -> UpSet:
        return mr_upset(self.weights, self.threshold)

    def to_uncs(self) -> UncsModel:
        return UncsModel(self.criteria, self.classes, self.frontiers, self.upset)

    def assign(self, x: Profile) -> int:
        return assign(self.to_uncs(), x)


def as_uncs(model) -> UncsModel:
    if isinstance(model, MrSortModel):
        return model.to_uncs()
    if isinstance(model, UncsModel):
        return model
    raise ModelError(f"not a sorting model: {type(model).__name__}")


def assign(model: UncsModel, x: Profile) -> int:
    """Class index in ``1..p`` assigned to profile ``x``."""
    model = as_uncs(model)
    table = model.sufficient.table
    return 1 + sum(1 for b in model.frontiers if table[favorable_coalition(x, b)])


@dataclass(frozen=True)
class Alternative:
    id: str
    profile: Profile
    category: int


@dataclass(frozen=True)
class LearningSet:
    criteria: CriteriaSpec
    classes: int
    alternatives: tuple = field(default_factory=tuple)

    def __post_init__(self):
        alts = tuple(
            a if isinstance(a, Alternative) else Alternative(a[0], tuple(a[1]), a[2])
            for a in self.alternatives
        )
        object.__setattr__(self, "alternatives", alts)
        if self.classes < 2:
            raise InputError(f"at least two classes are required, got {self.classes}")
        seen = set()
        for a in alts:
            if a.id in seen:
                raise InputError(f"duplicate alternative identifier {a.id!r}")
            seen.add(a.id)
            if len(a.profile) != self.criteria.count:
                raise InputError(
                    f"alternative {a.id!r} has {len(a.profile)} values, "
                    f"expected {self.criteria.count}"
                )
            if any(not math.isfinite(v) for v in a.profile):
                raise InputError(f"alternative {a.id!r} has a non-finite value")
            if not 1 <= a.category <= self.classes:
                raise InputError(
                    f"alternative {a.id!r} has class {a.category} outside 1..{self.classes}"
                )

    @classmethod
    def from_raw(cls, criteria: CriteriaSpec, classes: int, rows) -> "LearningSet":
        """Build from ``(id, values in display units, class)`` rows."""
        return cls(
            criteria,
            classes,
            tuple(Alternative(str(i), criteria.orient(v), int(c)) for i, v, c in rows),
        )

    def __len__(self):
        return len(self.alternatives)

    def values(self, i: int) -> list[float]:
        """Sorted distinct values taken on criterion ``i`` by the reference alternatives."""
        return sorted({a.profile[i] for a in self.alternatives})


def extends(model, data: LearningSet) -> list[tuple[str, int, int]]:
    """``(id, expected, computed)`` for every alternative the model misassigns."""
    model = as_uncs(model)
    if model.criteria.count != data.criteria.count or model.classes != data.classes:
        raise InputError(
            f"model ({model.criteria.count} criteria, {model.classes} classes) does not match "
            f"data ({data.criteria.count} criteria, {data.classes} classes)"
        )
    out = []
    for a in data.alternatives:
        got = assign(model, a.profile)
        if got != a.category:
            out.append((a.id, a.category, got))
    return out
