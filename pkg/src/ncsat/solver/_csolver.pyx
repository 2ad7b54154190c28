# distutils: language = c++
# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled search kernel; same algorithm and interface as ``_pysolver.run``."""

from libcpp.vector cimport vector

import time

cdef enum:
    SAT = 1
    UNSAT = 0
    BUDGET = -1

cdef double VAR_DECAY = 0.95
cdef long RESTART_UNIT = 100


cdef long _luby(long i) nogil:
    cdef long size = 1, seq = 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i = i % size
    return (<long>1) << seq


def luby(long i):
    return _luby(i)


cdef class _Kernel:
    cdef int nv
    cdef bint vsids
    cdef vector[int] assigns
    cdef vector[int] level
    cdef vector[int] reason
    cdef vector[int] phase
    cdef vector[double] activity
    cdef vector[int] heap
    cdef vector[int] heap_pos
    cdef double var_inc
    cdef vector[int] trail
    cdef vector[int] trail_lim
    cdef vector[char] flipped
    cdef vector[vector[int]] db
    cdef vector[vector[int]] watches
    cdef vector[char] seen
    cdef vector[int] learnt
    cdef long decisions, propagations, conflicts
    cdef size_t qhead
    cdef int next_var
    cdef bint empty

    def __init__(self, int num_vars, bint vsids):
        cdef int v
        self.nv = num_vars
        self.vsids = vsids
        self.assigns.assign(num_vars + 1, -1)
        self.level.assign(num_vars + 1, 0)
        self.reason.assign(num_vars + 1, -1)
        self.phase.assign(num_vars + 1, 0)
        self.activity.assign(num_vars + 1, 0.0)
        self.heap_pos.assign(num_vars + 1, -1)
        self.seen.assign(num_vars + 1, 0)
        self.watches.resize(2 * num_vars + 2)
        self.var_inc = 1.0
        self.decisions = self.propagations = self.conflicts = 0
        self.qhead = 0
        self.next_var = 1
        self.empty = False
        if vsids:
            for v in range(1, num_vars + 1):
                self.heap_insert(v)

    # activity heap: max activity first, ties to the lower index

    cdef inline bint before(self, int a, int b) nogil:
        cdef double aa = self.activity[a], ab = self.activity[b]
        return aa > ab or (aa == ab and a < b)

    cdef void heap_up(self, size_t i) nogil:
        cdef int v = self.heap[i]
        cdef size_t parent
        while i > 0:
            parent = (i - 1) >> 1
            if not self.before(v, self.heap[parent]):
                break
            self.heap[i] = self.heap[parent]
            self.heap_pos[self.heap[i]] = <int>i
            i = parent
        self.heap[i] = v
        self.heap_pos[v] = <int>i

    cdef void heap_down(self, size_t i) nogil:
        cdef int v = self.heap[i]
        cdef size_t n = self.heap.size(), child
        while True:
            child = 2 * i + 1
            if child >= n:
                break
            if child + 1 < n and self.before(self.heap[child + 1], self.heap[child]):
                child += 1
            if not self.before(self.heap[child], v):
                break
            self.heap[i] = self.heap[child]
            self.heap_pos[self.heap[i]] = <int>i
            i = child
        self.heap[i] = v
        self.heap_pos[v] = <int>i

    cdef inline void heap_insert(self, int v) nogil:
        if self.heap_pos[v] < 0:
            self.heap.push_back(v)
            self.heap_up(self.heap.size() - 1)

    cdef int heap_pop(self) nogil:
        cdef int top = self.heap[0]
        cdef int last = self.heap.back()
        self.heap.pop_back()
        self.heap_pos[top] = -1
        if self.heap.size():
            self.heap[0] = last
            self.heap_pos[last] = 0
            self.heap_down(0)
        return top

    cdef void bump(self, int v) nogil:
        cdef int u
        self.activity[v] += self.var_inc
        if self.activity[v] > 1e100:
            for u in range(1, self.nv + 1):
                self.activity[u] *= 1e-100
            self.var_inc *= 1e-100
        if self.heap_pos[v] >= 0:
            self.heap_up(self.heap_pos[v])

    # assignment trail

    cdef inline int value(self, int code) nogil:
        cdef int a = self.assigns[code >> 1]
        if a < 0:
            return -1
        return a ^ (code & 1)

    cdef inline void enqueue(self, int code, int why) nogil:
        cdef int v = code >> 1
        self.assigns[v] = 1 - (code & 1)
        self.level[v] = <int>self.trail_lim.size()
        self.reason[v] = why
        self.trail.push_back(code)

    cdef add_clause(self, c):
        cdef vector[int] codes
        cdef int lit, code, val, ci
        cdef size_t k
        cdef bint dup
        for lit in c:
            code = 2 * lit if lit > 0 else -2 * lit + 1
            dup = False
            for k in range(codes.size()):
                if codes[k] == (code ^ 1):
                    return
                if codes[k] == code:
                    dup = True
                    break
            if not dup:
                codes.push_back(code)
        if codes.size() == 0:
            self.empty = True
            return
        if codes.size() == 1:
            val = self.value(codes[0])
            if val == 0:
                self.empty = True
            elif val < 0:
                self.enqueue(codes[0], -1)
            return
        ci = <int>self.db.size()
        self.db.push_back(codes)
        self.watches[codes[0]].push_back(ci)
        self.watches[codes[1]].push_back(ci)

    cdef int propagate(self) nogil:
        cdef int p, false_lit, ci, first
        cdef size_t i, j, n_ws, k, clen
        cdef bint found
        cdef vector[int]* ws
        cdef vector[int]* c
        while self.qhead < self.trail.size():
            p = self.trail[self.qhead]
            self.qhead += 1
            self.propagations += 1
            false_lit = p ^ 1
            ws = &self.watches[false_lit]
            i = 0
            j = 0
            n_ws = ws.size()
            while i < n_ws:
                ci = ws[0][i]
                i += 1
                c = &self.db[ci]
                if c[0][0] == false_lit:
                    c[0][0] = c[0][1]
                    c[0][1] = false_lit
                first = c[0][0]
                if self.value(first) == 1:
                    ws[0][j] = ci
                    j += 1
                    continue
                found = False
                clen = c.size()
                for k in range(2, clen):
                    if self.value(c[0][k]) != 0:
                        c[0][1] = c[0][k]
                        c[0][k] = false_lit
                        # c[0][1] != false_lit, so ws is not reallocated
                        self.watches[c[0][1]].push_back(ci)
                        found = True
                        break
                if found:
                    continue
                ws[0][j] = ci
                j += 1
                if self.value(first) == 0:
                    while i < n_ws:
                        ws[0][j] = ws[0][i]
                        j += 1
                        i += 1
                    ws.resize(j)
                    self.qhead = self.trail.size()
                    return ci
                self.enqueue(first, ci)
            ws.resize(j)
        return -1

    cdef void cancel_until(self, size_t lvl) nogil:
        cdef size_t stop, k
        cdef int v
        if self.trail_lim.size() > lvl:
            stop = self.trail_lim[lvl]
            k = self.trail.size()
            while k > stop:
                k -= 1
                v = self.trail[k] >> 1
                if self.vsids:
                    self.phase[v] = self.assigns[v]
                    self.heap_insert(v)
                self.assigns[v] = -1
                self.reason[v] = -1
                if v < self.next_var:
                    self.next_var = v
            self.trail.resize(stop)
            self.trail_lim.resize(lvl)
            self.flipped.resize(lvl)
            self.qhead = self.trail.size()

    cdef int analyze(self, int confl) nogil:
        """Fill ``self.learnt`` with the first-UIP clause; return the backjump level."""
        cdef int counter = 0, p = -1, q, v, cur, best, tmp, bt = 0
        cdef long idx = <long>self.trail.size() - 1
        cdef size_t k, start
        cdef vector[int]* c
        cur = <int>self.trail_lim.size()
        self.learnt.clear()
        self.learnt.push_back(0)
        while True:
            c = &self.db[confl]
            start = 0 if p < 0 else 1
            for k in range(start, c.size()):
                q = c[0][k]
                v = q >> 1
                if not self.seen[v] and self.level[v] > 0:
                    self.seen[v] = 1
                    if self.vsids:
                        self.bump(v)
                    if self.level[v] >= cur:
                        counter += 1
                    else:
                        self.learnt.push_back(q)
            while not self.seen[self.trail[idx] >> 1]:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            confl = self.reason[p >> 1]
            self.seen[p >> 1] = 0
            counter -= 1
            if counter == 0:
                break
        self.learnt[0] = p ^ 1
        if self.learnt.size() > 1:
            best = 1
            for k in range(2, self.learnt.size()):
                if self.level[self.learnt[k] >> 1] > self.level[self.learnt[best] >> 1]:
                    best = <int>k
            tmp = self.learnt[1]
            self.learnt[1] = self.learnt[best]
            self.learnt[best] = tmp
            bt = self.level[self.learnt[1] >> 1]
        for k in range(self.learnt.size()):
            self.seen[self.learnt[k] >> 1] = 0
        return bt

    cdef list fixed(self):
        cdef size_t stop = self.trail_lim[0] if self.trail_lim.size() else self.trail.size()
        cdef size_t k
        cdef int code
        out = []
        for k in range(stop):
            code = self.trail[k]
            out.append(-(code >> 1) if code & 1 else code >> 1)
        return out

    cdef tuple finish(self, int status, model=None):
        return (status, model, self.decisions, self.propagations, self.conflicts, self.fixed())

    cdef tuple search(self, bint learn, bint restarts, long max_conflicts,
                      double time_limit, double start):
        cdef int confl, bt, ci, d, dec, v, nxt
        cdef long restart_idx = 0, since_restart = 0
        cdef long restart_at = RESTART_UNIT * _luby(0)
        while True:
            with nogil:
                confl = self.propagate()
            if confl >= 0:
                self.conflicts += 1
                since_restart += 1
                if self.trail_lim.size() == 0:
                    return self.finish(UNSAT)
                if self.conflicts >= max_conflicts or (
                    (self.conflicts & 255) == 0 and time.perf_counter() - start > time_limit
                ):
                    return self.finish(BUDGET)
                if learn:
                    bt = self.analyze(confl)
                    self.cancel_until(bt)
                    if self.learnt.size() == 1:
                        self.enqueue(self.learnt[0], -1)
                    else:
                        ci = <int>self.db.size()
                        self.db.push_back(self.learnt)
                        self.watches[self.learnt[0]].push_back(ci)
                        self.watches[self.learnt[1]].push_back(ci)
                        self.enqueue(self.learnt[0], ci)
                    self.var_inc /= VAR_DECAY
                    if restarts and since_restart >= restart_at:
                        restart_idx += 1
                        restart_at = RESTART_UNIT * _luby(restart_idx)
                        since_restart = 0
                        self.cancel_until(0)
                else:
                    # chronological backtracking: flip the deepest untried decision
                    d = <int>self.trail_lim.size()
                    while d > 0 and self.flipped[d - 1]:
                        d -= 1
                    if d == 0:
                        return self.finish(UNSAT)
                    dec = self.trail[self.trail_lim[d - 1]]
                    self.cancel_until(d - 1)
                    self.trail_lim.push_back(<int>self.trail.size())
                    self.flipped.push_back(1)
                    self.enqueue(dec ^ 1, -1)
                continue
            nxt = 0
            if self.vsids:
                while self.heap.size():
                    v = self.heap_pop()
                    if self.assigns[v] < 0:
                        nxt = v
                        break
            else:
                while self.next_var <= self.nv and self.assigns[self.next_var] >= 0:
                    self.next_var += 1
                if self.next_var <= self.nv:
                    nxt = self.next_var
            if nxt == 0:
                model = [False]
                for v in range(1, self.nv + 1):
                    model.append(self.assigns[v] == 1)
                return self.finish(SAT, model)
            self.decisions += 1
            if (self.decisions & 1023) == 0 and time.perf_counter() - start > time_limit:
                return self.finish(BUDGET)
            self.trail_lim.push_back(<int>self.trail.size())
            self.flipped.push_back(0)
            self.enqueue(2 * nxt + (0 if self.phase[nxt] == 1 else 1), -1)


def run(int num_vars, clauses, learn=True, vsids=True, restarts=True,
        max_conflicts=10**7, time_limit=600.0):
    start = time.perf_counter()
    learn = bool(learn)
    cdef _Kernel k = _Kernel(num_vars, bool(vsids) and learn)
    for c in clauses:
        k.add_clause(c)
        if k.empty:
            return k.finish(UNSAT)
    return k.search(learn, bool(restarts) and learn, int(max_conflicts), float(time_limit), start)
