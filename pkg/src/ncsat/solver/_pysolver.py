"""Pure-Python search kernel; mirrors ``_csolver.pyx`` statement for statement.

Literals are coded as ``2 * var + sign`` (sign 1 for a negated literal), so the
complement of a code is ``code ^ 1``.  ``assigns[var]`` is -1 (unassigned),
0 (false) or 1 (true).
"""

import time

SAT, UNSAT, BUDGET = 1, 0, -1
VAR_DECAY = 0.95
RESTART_UNIT = 100


def luby(i):
    """``i``-th element (0-based) of the Luby restart sequence."""
    size, seq = 1, 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i = i % size
    return 1 << seq


class _Heap:
    """Max-heap of variables keyed by activity; ties go to the lower index."""

    def __init__(self, activity):
        self.act = activity
        self.heap = []
        self.pos = [-1] * len(activity)

    def _before(self, a, b):
        aa, ab = self.act[a], self.act[b]
        return aa > ab or (aa == ab and a < b)

    def _up(self, i):
        h, pos = self.heap, self.pos
        v = h[i]
        while i > 0:
            parent = (i - 1) >> 1
            if not self._before(v, h[parent]):
                break
            h[i] = h[parent]
            pos[h[i]] = i
            i = parent
        h[i] = v
        pos[v] = i

    def _down(self, i):
        h, pos = self.heap, self.pos
        v = h[i]
        n = len(h)
        while True:
            child = 2 * i + 1
            if child >= n:
                break
            if child + 1 < n and self._before(h[child + 1], h[child]):
                child += 1
            if not self._before(h[child], v):
                break
            h[i] = h[child]
            pos[h[i]] = i
            i = child
        h[i] = v
        pos[v] = i

    def insert(self, v):
        if self.pos[v] < 0:
            self.heap.append(v)
            self._up(len(self.heap) - 1)

    def increased(self, v):
        if self.pos[v] >= 0:
            self._up(self.pos[v])

    def pop(self):
        h = self.heap
        top = h[0]
        last = h.pop()
        self.pos[top] = -1
        if h:
            h[0] = last
            self.pos[last] = 0
            self._down(0)
        return top


def run(num_vars, clauses, learn=True, vsids=True, restarts=True,
        max_conflicts=10**7, time_limit=600.0):
    """Decide a CNF given as lists of signed DIMACS literals.

    Returns ``(status, model, decisions, propagations, conflicts, fixed)``
    where ``model`` is a list of booleans indexed by variable (index 0 unused)
    and ``fixed`` lists the DIMACS literals implied at decision level zero.
    Without ``learn`` the search is DPLL with chronological backtracking and
    the lowest-index decision order.
    """
    start = time.perf_counter()
    nv = num_vars
    vsids = vsids and learn
    restarts = restarts and learn
    assigns = [-1] * (nv + 1)
    level = [0] * (nv + 1)
    reason = [-1] * (nv + 1)
    phase = [0] * (nv + 1)
    activity = [0.0] * (nv + 1)
    heap = _Heap(activity)
    trail = []
    trail_lim = []
    flipped = []
    db = []
    watches = [[] for _ in range(2 * nv + 2)]
    seen = [False] * (nv + 1)
    decisions = propagations = conflicts = 0
    qhead = 0
    next_var = 1
    var_inc = 1.0
    if vsids:
        for v in range(1, nv + 1):
            heap.insert(v)

    def value(code):
        a = assigns[code >> 1]
        if a < 0:
            return -1
        return a ^ (code & 1)

    def enqueue(code, why):
        v = code >> 1
        assigns[v] = 1 - (code & 1)
        level[v] = len(trail_lim)
        reason[v] = why
        trail.append(code)

    def finish(status, model=None):
        fixed = []
        for code in trail[: trail_lim[0] if trail_lim else len(trail)]:
            fixed.append(-(code >> 1) if code & 1 else code >> 1)
        return status, model, decisions, propagations, conflicts, fixed

    for c in clauses:
        codes = []
        taut = False
        for lit in c:
            code = 2 * lit if lit > 0 else -2 * lit + 1
            if code ^ 1 in codes:
                taut = True
                break
            if code not in codes:
                codes.append(code)
        if taut:
            continue
        if not codes:
            return finish(UNSAT)
        if len(codes) == 1:
            val = value(codes[0])
            if val == 0:
                return finish(UNSAT)
            if val < 0:
                enqueue(codes[0], -1)
            continue
        ci = len(db)
        db.append(codes)
        watches[codes[0]].append(ci)
        watches[codes[1]].append(ci)

    def propagate():
        nonlocal qhead, propagations
        while qhead < len(trail):
            p = trail[qhead]
            qhead += 1
            propagations += 1
            false_lit = p ^ 1
            ws = watches[false_lit]
            i = j = 0
            n_ws = len(ws)
            while i < n_ws:
                ci = ws[i]
                i += 1
                c = db[ci]
                if c[0] == false_lit:
                    c[0] = c[1]
                    c[1] = false_lit
                first = c[0]
                if value(first) == 1:
                    ws[j] = ci
                    j += 1
                    continue
                for k in range(2, len(c)):
                    if value(c[k]) != 0:
                        c[1] = c[k]
                        c[k] = false_lit
                        watches[c[1]].append(ci)
                        break
                else:
                    ws[j] = ci
                    j += 1
                    if value(first) == 0:
                        while i < n_ws:
                            ws[j] = ws[i]
                            j += 1
                            i += 1
                        del ws[j:]
                        qhead = len(trail)
                        return ci
                    enqueue(first, ci)
            del ws[j:]
        return -1

    def cancel_until(lvl):
        nonlocal qhead, next_var
        if len(trail_lim) > lvl:
            stop = trail_lim[lvl]
            for k in range(len(trail) - 1, stop - 1, -1):
                v = trail[k] >> 1
                if vsids:
                    phase[v] = assigns[v]
                    heap.insert(v)
                assigns[v] = -1
                reason[v] = -1
                if v < next_var:
                    next_var = v
            del trail[stop:]
            del trail_lim[lvl:]
            del flipped[lvl:]
            qhead = len(trail)

    def bump(v):
        nonlocal var_inc
        activity[v] += var_inc
        if activity[v] > 1e100:
            for u in range(1, nv + 1):
                activity[u] *= 1e-100
            var_inc *= 1e-100
        heap.increased(v)

    def analyze(confl):
        learnt = [0]
        counter = 0
        p = -1
        idx = len(trail) - 1
        cur = len(trail_lim)
        while True:
            c = db[confl]
            for k in range(0 if p < 0 else 1, len(c)):
                q = c[k]
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    seen[v] = True
                    if vsids:
                        bump(v)
                    if level[v] >= cur:
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            confl = reason[p >> 1]
            seen[p >> 1] = False
            counter -= 1
            if counter == 0:
                break
        learnt[0] = p ^ 1
        bt = 0
        if len(learnt) > 1:
            best = 1
            for k in range(2, len(learnt)):
                if level[learnt[k] >> 1] > level[learnt[best] >> 1]:
                    best = k
            learnt[1], learnt[best] = learnt[best], learnt[1]
            bt = level[learnt[1] >> 1]
        for q in learnt:
            seen[q >> 1] = False
        return learnt, bt

    restart_idx = 0
    restart_at = RESTART_UNIT * luby(0)
    since_restart = 0

    while True:
        confl = propagate()
        if confl >= 0:
            conflicts += 1
            since_restart += 1
            if not trail_lim:
                return finish(UNSAT)
            if conflicts >= max_conflicts or (
                conflicts & 255 == 0 and time.perf_counter() - start > time_limit
            ):
                return finish(BUDGET)
            if learn:
                learnt, bt = analyze(confl)
                cancel_until(bt)
                if len(learnt) == 1:
                    enqueue(learnt[0], -1)
                else:
                    ci = len(db)
                    db.append(learnt)
                    watches[learnt[0]].append(ci)
                    watches[learnt[1]].append(ci)
                    enqueue(learnt[0], ci)
                var_inc /= VAR_DECAY
                if restarts and since_restart >= restart_at:
                    restart_idx += 1
                    restart_at = RESTART_UNIT * luby(restart_idx)
                    since_restart = 0
                    cancel_until(0)
            else:
                # chronological backtracking: flip the deepest untried decision
                d = len(trail_lim)
                while d > 0 and flipped[d - 1]:
                    d -= 1
                if d == 0:
                    return finish(UNSAT)
                dec = trail[trail_lim[d - 1]]
                cancel_until(d - 1)
                trail_lim.append(len(trail))
                flipped.append(True)
                enqueue(dec ^ 1, -1)
            continue
        nxt = 0
        if vsids:
            while heap.heap:
                v = heap.pop()
                if assigns[v] < 0:
                    nxt = v
                    break
        else:
            while next_var <= nv and assigns[next_var] >= 0:
                next_var += 1
            if next_var <= nv:
                nxt = next_var
        if nxt == 0:
            model = [False] + [assigns[v] == 1 for v in range(1, nv + 1)]
            return finish(SAT, model)
        decisions += 1
        if decisions & 1023 == 0 and time.perf_counter() - start > time_limit:
            return finish(BUDGET)
        trail_lim.append(len(trail))
        flipped.append(False)
        enqueue(2 * nxt + (0 if phase[nxt] == 1 else 1), -1)
