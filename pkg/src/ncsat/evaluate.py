"""Model agreement on random profiles and a brute-force representability oracle.

The oracle shares nothing with the SAT encoding: it walks every upset of the
coalition lattice and every nested choice of frontier values, so it can be
used to cross-check the encoder and solver on tiny instances.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

from .core import ABOVE_ALL, LearningSet, UncsModel, UpSet, as_uncs
from .errors import InputError

MAX_ORACLE_CRITERIA = 4
MAX_ORACLE_TUPLES = 1_000_000


def default_sample_size(n_criteria: int) -> int:
    if n_criteria < 1:
        raise InputError("need at least one criterion")
    return max(min(4**n_criteria, 300_000), 10_000)


def assign_many(model, profiles: np.ndarray) -> np.ndarray:
    """Classes of the rows of ``profiles`` (already oriented), vectorized."""
    m = as_uncs(model)
    n = m.criteria.count
    table = np.array([mask in m.sufficient for mask in range(1 << n)], dtype=bool)
    bits = 1 << np.arange(n, dtype=np.int64)
    out = np.ones(len(profiles), dtype=np.int64)
    for b in m.frontiers:
        masks = ((profiles >= np.asarray(b, dtype=float)) * bits).sum(axis=1)
        out += table[masks]
    return out


def err_rate(a, b, sample_count: int, rng: np.random.Generator) -> float:
    """Share of uniform profiles on ``[0, 1]^n`` that ``a`` and ``b`` classify differently.

    Raw values are drawn on the unit cube and oriented with the shared
    criteria directions before assignment.
    """
    ua, ub = as_uncs(a), as_uncs(b)
    if ua.criteria != ub.criteria or ua.classes != ub.classes:
        raise InputError("models differ in criteria or number of classes")
    if sample_count < 1:
        raise InputError("sample_count must be positive")
    raw = rng.random((sample_count, ua.criteria.count))
    signs = np.array([1.0 if d == "max" else -1.0 for d in ua.criteria.directions])
    pts = raw * signs
    return float(np.mean(assign_many(ua, pts) != assign_many(ub, pts)))


def enumerate_upsets(n: int) -> list[UpSet]:
    """Every upset of the subsets of ``n`` criteria, one per antichain of minimal sets."""
    if n > MAX_ORACLE_CRITERIA:
        raise InputError(f"upset enumeration is limited to {MAX_ORACLE_CRITERIA} criteria")
    size = 1 << n
    out = []

    def grow(start, chosen):
        out.append(UpSet.generated_by(n, chosen))
        for m in range(start, size):
            # masks come in increasing order, so m can only contain earlier ones
            if all(m & c != c for c in chosen):
                grow(m + 1, chosen + [m])

    grow(0, [])
    return out


def _table_bits(up: UpSet, n: int) -> int:
    return sum(1 << m for m in range(1 << n) if m in up)


def brute_force_representable(data: LearningSet) -> UncsModel | None:
    """First U-NCS model (in enumeration order) that restores ``data``, or ``None``.

    Frontier values range over each criterion's reference values plus
    ``ABOVE_ALL``; only nested tuples are generated.  Refuses instances beyond
    4 criteria or 10^6 nested frontier tuples.
    """
    crit, p = data.criteria, data.classes
    n = crit.count
    if n > MAX_ORACLE_CRITERIA:
        raise InputError(f"oracle is limited to {MAX_ORACLE_CRITERIA} criteria, got {n}")
    alts = data.alternatives
    upsets = enumerate_upsets(n)
    per_crit = []
    for i in range(n):
        cands = sorted(set(data.values(i))) + [ABOVE_ALL]
        per_crit.append(list(itertools.combinations_with_replacement(cands, p - 1)))
    work = math.prod(len(c) for c in per_crit)
    if work > MAX_ORACLE_TUPLES:
        raise InputError(f"oracle refuses: {work} frontier tuples exceed {MAX_ORACLE_TUPLES}")
    tables = [(_table_bits(u, n), u) for u in upsets]

    # accept[i][t] = bit set of alternatives whose value on i reaches threshold t
    def accepted(i, t):
        return sum(1 << j for j, a in enumerate(alts) if a.profile[i] >= t)

    acc = [{t: accepted(i, t) for t in set(itertools.chain(*per_crit[i]))} for i in range(n)]
    for combo in itertools.product(*per_crit):
        need_in = need_out = 0
        for h in range(p - 1):
            sets = [acc[i][combo[i][h]] for i in range(n)]
            for j, a in enumerate(alts):
                mask = 0
                for i in range(n):
                    if sets[i] >> j & 1:
                        mask |= 1 << i
                if a.category > h + 1:
                    need_in |= 1 << mask
                else:
                    need_out |= 1 << mask
        if need_in & need_out:
            continue
        for bits, up in tables:
            if need_in & ~bits == 0 and need_out & bits == 0:
                frontiers = tuple(tuple(combo[i][h] for i in range(n)) for h in range(p - 1))
                return UncsModel(crit, p, frontiers, up)
    return None
