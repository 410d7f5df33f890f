"""Reference implementation of the exhaustive simulation-circuit solver.

Self-contained (plain ints and tuples) so the compiled twin in
``kernels._speed`` can mirror it exactly; the two must explore the same tree
in the same order and return identical results.

The solver replays the target's transitions with everything lazy: a wire is
chosen only when the token actually needs it, an element's part type only
when the token first enters it, an initial state only when first read.
Branch order is fixed (the goal output, existing element inputs by index,
then one fresh element per part type), which makes the first solution found
under a given element cap a deterministic function of the inputs.  Element
re-indexing symmetry is broken by activating fresh elements in index order.

Vertices here are tuples: ("in", s) / ("out", g) for the circuit boundary,
("ein", e, j) / ("eout", e, j) for element ports -- e is the element slot,
j the port index.
"""


class SearchSolver:
    def __init__(self, target_k, target_entries, parts, max_steps):
        self.k = target_k
        self.target = tuple(target_entries)
        self.parts = [(pk, tuple(pe)) for pk, pe in parts]
        self.max_steps = max_steps
        self.trans = [(q, s) for q in range(2) for s in range(self.k)]
        self.nodes = 0

    def solve(self, cap):
        self.cap = cap
        self.wiring = {}
        self.used_v = set()
        self.etype = []
        self.val = [{}, {}]
        self.linked = set()
        self.trail = []
        self.result = None
        self._next_trajectory(0)
        return self.result

    # -- trail ----------------------------------------------------------------

    def _mark(self):
        return len(self.trail)

    def _undo(self, mark):
        while len(self.trail) > mark:
            kind, a, b = self.trail.pop()
            if kind == "w":
                del self.wiring[a]
                self.used_v.discard(b)
            elif kind == "v":
                for q in b:
                    del self.val[q][a]
            else:
                self.linked.discard(a)
                if b is not None:
                    del self.val[b][a]

    def _wire(self, u, v):
        self.wiring[u] = v
        self.used_v.add(v)
        self.trail.append(("w", u, v))

    def _assign(self, q, e, b):
        if e in self.val[q]:
            return self.val[q][e] == b
        self.val[q][e] = b
        touched = [q]
        if e in self.linked and e not in self.val[1 - q]:
            self.val[1 - q][e] = b
            touched.append(1 - q)
        self.trail.append(("v", e, tuple(touched)))
        return True

    def _link(self, e):
        if e in self.linked:
            return True
        a, b = self.val[0].get(e), self.val[1].get(e)
        if a is not None and b is not None:
            return a == b
        self.linked.add(e)
        spread = None
        if a is not None:
            self.val[1][e] = a
            spread = 1
        elif b is not None:
            self.val[0][e] = b
            spread = 0
        self.trail.append(("l", e, spread))
        return True

    # -- search ---------------------------------------------------------------

    def _next_trajectory(self, ti):
        if self.result is not None:
            return
        if ti == len(self.trans):
            self._complete()
            return
        q, s = self.trans[ti]
        self._walk(ti, ("in", s), {}, 0)

    def _walk(self, ti, u, cur, steps):
        if self.result is not None:
            return
        self.nodes += 1
        if u in self.wiring:
            self._land(ti, self.wiring[u], cur, steps)
            return
        q, s = self.trans[ti]
        goal = self.target[q * self.k + s] % self.k
        v = ("out", goal)
        if v not in self.used_v:
            m = self._mark()
            self._wire(u, v)
            self._land(ti, v, cur, steps)
            self._undo(m)
            if self.result is not None:
                return
        for e in range(len(self.etype)):
            for j in range(self.parts[self.etype[e]][0]):
                v = ("ein", e, j)
                if v in self.used_v:
                    continue
                m = self._mark()
                self._wire(u, v)
                self._land(ti, v, cur, steps)
                self._undo(m)
                if self.result is not None:
                    return
        if len(self.etype) < self.cap:
            e = len(self.etype)
            for t in range(len(self.parts)):
                self.etype.append(t)
                for j in range(self.parts[t][0]):
                    m = self._mark()
                    self._wire(u, ("ein", e, j))
                    self._land(ti, ("ein", e, j), cur, steps)
                    self._undo(m)
                    if self.result is not None:
                        self.etype.pop()
                        return
                self.etype.pop()

    def _land(self, ti, v, cur, steps):
        q, s = self.trans[ti]
        if v[0] == "out":
            if v[1] != self.target[q * self.k + s] % self.k:
                return
            self._seal(ti, cur)
            return
        _, e, j = v
        if steps >= self.max_steps:
            return
        if e in cur:
            self._through(ti, e, j, cur[e], cur, steps)
        elif e in self.val[q]:
            self._through(ti, e, j, self.val[q][e], cur, steps)
        else:
            for b in (0, 1):
                m = self._mark()
                if self._assign(q, e, b):
                    self._through(ti, e, j, b, cur, steps)
                self._undo(m)
                if self.result is not None:
                    return

    def _through(self, ti, e, j, state, cur, steps):
        pk, tbl = self.parts[self.etype[e]]
        code = tbl[state * pk + j]
        nxt = dict(cur)
        nxt[e] = code // pk
        self._walk(ti, ("eout", e, code % pk), nxt, steps + 1)

    def _seal(self, ti, cur):
        q, s = self.trans[ti]
        q2 = self.target[q * self.k + s] // self.k
        m = self._mark()
        ok = True
        for e in range(len(self.etype)):
            if e in cur:
                ok = self._assign(q2, e, cur[e])
            elif e in self.val[q]:
                ok = self._assign(q2, e, self.val[q][e])
            elif e in self.val[q2]:
                ok = self._assign(q, e, self.val[q2][e])
            else:
                ok = self._link(e)
            if not ok:
                break
        if ok:
            self._next_trajectory(ti + 1)
        self._undo(m)

    def _complete(self):
        n = len(self.etype)
        differs = any(
            self.val[0].get(e) is not None and self.val[1].get(e) is not None
            and self.val[0][e] != self.val[1][e] for e in range(n))
        extra = {}
        if not differs:
            free = [e for e in range(n) if e not in self.linked and (
                self.val[0].get(e) is None or self.val[1].get(e) is None)]
            if not free:
                return          # both target states collapse to one config
            e = free[0]
            a, b = self.val[0].get(e), self.val[1].get(e)
            if a is None and b is None:
                extra = {(0, e): 0, (1, e): 1}
            elif a is None:
                extra = {(0, e): 1 - b}
            else:
                extra = {(1, e): 1 - a}
        v0 = {e: extra.get((0, e), self.val[0].get(e, 0)) for e in range(n)}
        v1 = {e: extra.get((1, e), self.val[1].get(e, 0)) for e in range(n)}
        self.result = (list(self.etype), dict(self.wiring), v0, v1)


def solve_search(target_k, target_entries, parts, cap, max_steps):
    """One exhaustive pass at the given element cap.

    Returns (result, nodes) where result is None or a tuple
    (etype list, wiring dict, v0 dict, v1 dict).
    """
    solver = SearchSolver(target_k, target_entries, parts, max_steps)
    got = solver.solve(cap)
    return got, solver.nodes
