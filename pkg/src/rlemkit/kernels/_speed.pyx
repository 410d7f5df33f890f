# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of kernels.pure: same API, same semantics, C loops.

Permutation ranks use int64, which caps the compiled path at permutations of
20 items; the facade in kernels/__init__.py routes larger tables to the pure
implementation.
"""

from itertools import permutations

from cpython.mem cimport PyMem_Free, PyMem_Malloc


cdef long long FACT[21]
cdef int _fi
FACT[0] = 1
for _fi in range(1, 21):
    FACT[_fi] = FACT[_fi - 1] * _fi


def rank_permutation(entries):
    cdef int n = len(entries)
    cdef int i, j, d, navail
    cdef long long r = 0
    cdef int avail[20]
    cdef int ent[20]
    if n > 20:
        raise OverflowError("compiled ranking handles up to 20 items")
    for i in range(n):
        avail[i] = i
        ent[i] = entries[i]
    navail = n
    for i in range(n):
        d = 0
        for j in range(navail):
            if avail[j] == ent[i]:
                d = j
                break
        r += d * FACT[n - 1 - i]
        for j in range(d, navail - 1):
            avail[j] = avail[j + 1]
        navail -= 1
    return r


def unrank_permutation(int n, long long serial):
    cdef int i, j, d
    cdef long long r = serial
    cdef int avail[20]
    cdef int out[20]
    if n > 20:
        raise OverflowError("compiled ranking handles up to 20 items")
    for i in range(n):
        avail[i] = i
    for i in range(n):
        d = <int>(r // FACT[n - 1 - i])
        r = r % FACT[n - 1 - i]
        out[i] = avail[d]
        for j in range(d, n - i - 1):
            avail[j] = avail[j + 1]
    return tuple([out[i] for i in range(n)])


def apply_renaming(entries, int k, swap, in_perm, out_perm):
    cdef int n = 2 * k
    cdef int j, c, q, s, q2, g
    cdef int sw = 1 if swap else 0
    cdef int ent[20]
    cdef int pin[10]
    cdef int pout[10]
    cdef int out[20]
    for j in range(n):
        ent[j] = entries[j]
    for j in range(k):
        pin[j] = in_perm[j]
        pout[j] = out_perm[j]
    for j in range(n):
        c = ent[j]
        q = j // k
        s = j - q * k
        q2 = c // k
        g = c - q2 * k
        if sw:
            q = 1 - q
            q2 = 1 - q2
        out[q * k + pin[s]] = q2 * k + pout[g]
    return tuple([out[j] for j in range(n)])


def orbit_serials(entries, int k):
    cdef int n = 2 * k
    cdef int nperm, a, b, sw, j, c, q, s, q2, g, i, d, navail
    cdef long long r
    cdef int ent[20]
    cdef int out[20]
    cdef int avail[20]
    if n > 20:
        raise OverflowError("compiled ranking handles up to 20 items")
    perms = list(permutations(range(k)))
    nperm = len(perms)
    flat_py = [x for p in perms for x in p]
    cdef int flen = len(flat_py)
    cdef int* flat = <int*> PyMem_Malloc(flen * sizeof(int))
    if flat == NULL:
        raise MemoryError()
    try:
        for j in range(flen):
            flat[j] = flat_py[j]
        for j in range(n):
            ent[j] = entries[j]
        seen = set()
        for sw in range(2):
            for a in range(nperm):
                for b in range(nperm):
                    for j in range(n):
                        c = ent[j]
                        q = j // k
                        s = j - q * k
                        q2 = c // k
                        g = c - q2 * k
                        if sw:
                            q = 1 - q
                            q2 = 1 - q2
                        out[q * k + flat[a * k + s]] = \
                            q2 * k + flat[b * k + g]
                    # inline Lehmer rank of out[]
                    for i in range(n):
                        avail[i] = i
                    navail = n
                    r = 0
                    for i in range(n):
                        d = 0
                        for j in range(navail):
                            if avail[j] == out[i]:
                                d = j
                                break
                        r += d * FACT[n - 1 - i]
                        for j in range(d, navail - 1):
                            avail[j] = avail[j + 1]
                        navail -= 1
                    seen.add(r)
    finally:
        PyMem_Free(flat)
    return tuple(sorted(seen))


def run_token(packed, states, long long u, long long max_steps):
    cdef long long n_in = packed[0]
    cdef long long n_out = packed[1]
    cdef long long[:] wire_next = packed[2]
    cdef long long[:] v_elem = packed[4]
    cdef long long[:] v_port = packed[5]
    cdef long long[:] tbl = packed[8]
    cdef long long[:] tbl_base = packed[9]
    cdef long long[:] kin = packed[12]
    cdef long long[:] kout = packed[13]
    cdef long long[:] ob = packed[15]
    cdef long long[:] st = states
    cdef long long steps = 0
    cdef long long v, idx, e, code
    while True:
        v = wire_next[u]
        if v < n_out:
            return v, steps
        if steps >= max_steps:
            return -1, steps
        idx = v - n_out
        e = v_elem[idx]
        code = tbl[tbl_base[e] + st[e] * kin[e] + v_port[idx]]
        st[e] = code // kout[e]
        u = n_in + ob[e] + code % kout[e]
        steps += 1


cdef class _CSolver:
    """Compiled mirror of search_core.SearchSolver: same branch order, same
    trail discipline, same first result; the per-trajectory token state is a
    mutate-and-restore array instead of copied dicts."""

    cdef int k, cap, nparts, pmax, ntraj, ecount, max_steps, tr_top
    cdef long long nodes
    cdef int[:] target, pkk, toff, ptbl
    cdef int[:] wire_u2v, used_v, etype, val, linked, cur, curset
    cdef int[:] tr_kind, tr_a, tr_b
    cdef object result
    cdef list _bufs

    def __init__(self, int target_k, target_entries, parts, int cap,
                 int max_steps):
        import array as _array
        cdef int i, j
        self.k = target_k
        self.cap = cap
        self.nparts = len(parts)
        self.max_steps = max_steps
        self.ntraj = 2 * target_k
        self.nodes = 0
        self.ecount = 0
        self.tr_top = 0
        self.result = None
        self._bufs = []

        def buf(values):
            a = _array.array("i", values)
            self._bufs.append(a)
            return a

        self.target = buf(target_entries)
        self.pkk = buf([p[0] for p in parts])
        self.pmax = max(p[0] for p in parts)
        offs, flat = [], []
        for pk_, pe in parts:
            offs.append(len(flat))
            flat.extend(pe)
        self.toff = buf(offs)
        self.ptbl = buf(flat)
        cdef int nv = self.k + cap * self.pmax
        self.wire_u2v = buf([-1] * nv)
        self.used_v = buf([0] * nv)
        self.etype = buf([0] * max(cap, 1))
        self.val = buf([-1] * (2 * max(cap, 1)))
        self.linked = buf([0] * max(cap, 1))
        self.cur = buf([0] * (self.ntraj * max(cap, 1)))
        self.curset = buf([0] * (self.ntraj * max(cap, 1)))
        cdef int tcap = self.ntraj * (max_steps + 3) * 2 \
            + self.ntraj * (cap + 2) + 64
        self.tr_kind = buf([0] * tcap)
        self.tr_a = buf([0] * tcap)
        self.tr_b = buf([0] * tcap)

    # trail ------------------------------------------------------------------

    cdef inline void _push(self, int kind, int a, int b):
        self.tr_kind[self.tr_top] = kind
        self.tr_a[self.tr_top] = a
        self.tr_b[self.tr_top] = b
        self.tr_top += 1

    cdef inline void _undo(self, int mark):
        cdef int kind, a, b, q
        while self.tr_top > mark:
            self.tr_top -= 1
            kind = self.tr_kind[self.tr_top]
            a = self.tr_a[self.tr_top]
            b = self.tr_b[self.tr_top]
            if kind == 0:
                self.wire_u2v[a] = -1
                self.used_v[b] = 0
            elif kind == 1:
                for q in range(2):
                    if b & (1 << q):
                        self.val[q * self.cap + a] = -1
            else:
                self.linked[a] = 0
                if b:
                    self.val[(b - 1) * self.cap + a] = -1

    cdef inline void _wire(self, int u, int v):
        self.wire_u2v[u] = v
        self.used_v[v] = 1
        self._push(0, u, v)

    cdef inline int _assign(self, int q, int e, int b):
        cdef int idx = q * self.cap + e
        cdef int mask
        if self.val[idx] != -1:
            return self.val[idx] == b
        self.val[idx] = b
        mask = 1 << q
        if self.linked[e] and self.val[(1 - q) * self.cap + e] == -1:
            self.val[(1 - q) * self.cap + e] = b
            mask |= 1 << (1 - q)
        self._push(1, e, mask)
        return 1

    cdef inline int _link(self, int e):
        cdef int a, b, spread
        if self.linked[e]:
            return 1
        a = self.val[e]
        b = self.val[self.cap + e]
        if a != -1 and b != -1:
            return a == b
        self.linked[e] = 1
        spread = 0
        if a != -1:
            self.val[self.cap + e] = a
            spread = 2
        elif b != -1:
            self.val[e] = b
            spread = 1
        self._push(2, e, spread)
        return 1

    # search -----------------------------------------------------------------

    cdef int _next_traj(self, int ti):
        if ti == self.ntraj:
            return self._complete()
        return self._walk(ti, ti % self.k, 0)

    cdef int _walk(self, int ti, int u, int steps):
        cdef int q, s, goal, v, e, j, t, m
        self.nodes += 1
        if self.wire_u2v[u] != -1:
            return self._land(ti, self.wire_u2v[u], steps)
        q = ti // self.k
        s = ti - q * self.k
        goal = self.target[q * self.k + s] % self.k
        if not self.used_v[goal]:
            m = self.tr_top
            self._wire(u, goal)
            if self._land(ti, goal, steps):
                self._undo(m)
                return 1
            self._undo(m)
        for e in range(self.ecount):
            for j in range(self.pkk[self.etype[e]]):
                v = self.k + e * self.pmax + j
                if self.used_v[v]:
                    continue
                m = self.tr_top
                self._wire(u, v)
                if self._land(ti, v, steps):
                    self._undo(m)
                    return 1
                self._undo(m)
        if self.ecount < self.cap:
            e = self.ecount
            for t in range(self.nparts):
                self.etype[e] = t
                self.ecount += 1
                for j in range(self.pkk[t]):
                    v = self.k + e * self.pmax + j
                    m = self.tr_top
                    self._wire(u, v)
                    if self._land(ti, v, steps):
                        self._undo(m)
                        self.ecount -= 1
                        return 1
                    self._undo(m)
                self.ecount -= 1
        return 0

    cdef int _land(self, int ti, int v, int steps):
        cdef int q, s, e, j, b, m, st
        q = ti // self.k
        s = ti - q * self.k
        if v < self.k:
            if v != self.target[q * self.k + s] % self.k:
                return 0
            return self._seal(ti)
        e = (v - self.k) // self.pmax
        j = (v - self.k) - e * self.pmax
        if steps >= self.max_steps:
            return 0
        if self.curset[ti * self.cap + e]:
            return self._through(ti, e, j, self.cur[ti * self.cap + e], steps)
        st = self.val[q * self.cap + e]
        if st != -1:
            return self._through(ti, e, j, st, steps)
        for b in range(2):
            m = self.tr_top
            if self._assign(q, e, b):
                if self._through(ti, e, j, b, steps):
                    self._undo(m)
                    return 1
            self._undo(m)
        return 0

    cdef int _through(self, int ti, int e, int j, int state, int steps):
        cdef int pk_, code, idx, had, old, found
        pk_ = self.pkk[self.etype[e]]
        code = self.ptbl[self.toff[self.etype[e]] + state * pk_ + j]
        idx = ti * self.cap + e
        had = self.curset[idx]
        old = self.cur[idx]
        self.curset[idx] = 1
        self.cur[idx] = code // pk_
        found = self._walk(ti, self.k + e * self.pmax + code % pk_, steps + 1)
        self.curset[idx] = had
        self.cur[idx] = old
        return found

    cdef int _seal(self, int ti):
        cdef int q, s, q2, e, m, ok, found
        q = ti // self.k
        s = ti - q * self.k
        q2 = self.target[q * self.k + s] // self.k
        m = self.tr_top
        ok = 1
        for e in range(self.ecount):
            if self.curset[ti * self.cap + e]:
                ok = self._assign(q2, e, self.cur[ti * self.cap + e])
            elif self.val[q * self.cap + e] != -1:
                ok = self._assign(q2, e, self.val[q * self.cap + e])
            elif self.val[q2 * self.cap + e] != -1:
                ok = self._assign(q, e, self.val[q2 * self.cap + e])
            else:
                ok = self._link(e)
            if not ok:
                break
        found = 0
        if ok:
            found = self._next_traj(ti + 1)
        self._undo(m)
        return found

    cdef int _complete(self):
        cdef int n = self.ecount
        cdef int e, a, b
        cdef int differs = 0
        for e in range(n):
            a = self.val[e]
            b = self.val[self.cap + e]
            if a != -1 and b != -1 and a != b:
                differs = 1
                break
        extra = {}
        if not differs:
            free_e = -1
            for e in range(n):
                if not self.linked[e] and (self.val[e] == -1
                                           or self.val[self.cap + e] == -1):
                    free_e = e
                    break
            if free_e == -1:
                return 0
            a = self.val[free_e]
            b = self.val[self.cap + free_e]
            if a == -1 and b == -1:
                extra = {(0, free_e): 0, (1, free_e): 1}
            elif a == -1:
                extra = {(0, free_e): 1 - b}
            else:
                extra = {(1, free_e): 1 - a}
        etype = [self.etype[e] for e in range(n)]
        wiring = {}
        cdef int u, v
        for u in range(self.k + self.cap * self.pmax):
            v = self.wire_u2v[u]
            if v == -1:
                continue
            uu = ("in", u) if u < self.k else \
                ("eout", (u - self.k) // self.pmax,
                 (u - self.k) % self.pmax)
            vv = ("out", v) if v < self.k else \
                ("ein", (v - self.k) // self.pmax,
                 (v - self.k) % self.pmax)
            wiring[uu] = vv
        v0 = {}
        v1 = {}
        for e in range(n):
            a = self.val[e]
            b = self.val[self.cap + e]
            v0[e] = extra.get((0, e), a if a != -1 else 0)
            v1[e] = extra.get((1, e), b if b != -1 else 0)
        self.result = (etype, wiring, v0, v1)
        return 1

    def run(self):
        self._next_traj(0)
        return self.result, self.nodes


def solve_search(target_k, target_entries, parts, cap, max_steps):
    solver = _CSolver(target_k, tuple(target_entries),
                      [(pk, tuple(pe)) for pk, pe in parts], cap, max_steps)
    return solver.run()


def run_token_back(packed, states, long long v, long long max_steps):
    cdef long long n_in = packed[0]
    cdef long long n_out = packed[1]
    cdef long long[:] wire_prev = packed[3]
    cdef long long[:] u_elem = packed[6]
    cdef long long[:] u_port = packed[7]
    cdef long long[:] inv = packed[10]
    cdef long long[:] inv_base = packed[11]
    cdef long long[:] kin = packed[12]
    cdef long long[:] kout = packed[13]
    cdef long long[:] ib = packed[14]
    cdef long long[:] st = states
    cdef long long steps = 0
    cdef long long u, idx, e, code
    while True:
        u = wire_prev[v]
        if u < n_in:
            return u, steps
        if steps >= max_steps:
            return -1, steps
        idx = u - n_in
        e = u_elem[idx]
        code = inv[inv_base[e] + st[e] * kout[e] + u_port[idx]]
        if code < 0:
            return -2, steps
        st[e] = code // kin[e]
        v = n_out + ib[e] + code % kin[e]
        steps += 1
