"""Pure-Python compute kernels.

These are the reference implementations of the hot loops; the Cython module
``_speed`` mirrors this API exactly and is preferred at import time when it
compiled.  Keep both in lockstep -- the test suite cross-checks them.
"""

from itertools import permutations
from math import factorial

from ..search_core import solve_search  # noqa: F401  (re-exported kernel)


def rank_permutation(entries):
    """Lexicographic (Lehmer) rank of a permutation of 0..n-1."""
    n = len(entries)
    avail = list(range(n))
    r = 0
    for i, e in enumerate(entries):
        d = avail.index(e)
        r += d * factorial(n - 1 - i)
        del avail[d]
    return r


def unrank_permutation(n, serial):
    """Permutation of 0..n-1 with lexicographic rank ``serial``."""
    avail = list(range(n))
    out = []
    r = serial
    for i in range(n):
        f = factorial(n - 1 - i)
        d, r = divmod(r, f)
        out.append(avail.pop(d))
    return tuple(out)


def apply_renaming(entries, k, swap, in_perm, out_perm):
    """Rename states/symbols of a 2-state k-symbol move table.

    Position q*k+s holds code q2*k+g; the renamed table maps the renamed
    (state, input) to the renamed (state, output).
    """
    out = [0] * (2 * k)
    for j, c in enumerate(entries):
        q, s = divmod(j, k)
        q2, g = divmod(c, k)
        if swap:
            q, q2 = 1 - q, 1 - q2
        out[q * k + in_perm[s]] = q2 * k + out_perm[g]
    return tuple(out)


def orbit_serials(entries, k):
    """Sorted serials of every table reachable by renaming (the orbit)."""
    seen = set()
    perms = list(permutations(range(k)))
    for swap in (0, 1):
        for pin in perms:
            for pout in perms:
                seen.add(rank_permutation(apply_renaming(entries, k, swap, pin, pout)))
    return tuple(sorted(seen))


def run_token(packed, states, u, max_steps):
    """Propagate a single token forward from U-vertex id ``u``.

    Returns (exit_vertex_id, steps); exit is -1 when the element-transition
    budget ran out.  ``states`` is mutated in place.
    """
    (n_in, n_out, wire_next, wire_prev, v_elem, v_port, u_elem, u_port,
     tbl, tbl_base, inv, inv_base, kin, kout, ib, ob) = packed
    steps = 0
    while True:
        v = wire_next[u]
        if v < n_out:
            return v, steps
        if steps >= max_steps:
            return -1, steps
        idx = v - n_out
        e = v_elem[idx]
        code = tbl[tbl_base[e] + states[e] * kin[e] + v_port[idx]]
        states[e] = code // kout[e]
        u = n_in + ob[e] + code % kout[e]
        steps += 1


def run_token_back(packed, states, v, max_steps):
    """Inverse of run_token: walk a token backwards from V-vertex id ``v``.

    Returns (entry_vertex_id, steps); -1 on step limit, -2 if the walk hits
    a (state, output) pair outside the move function's image.
    """
    (n_in, n_out, wire_next, wire_prev, v_elem, v_port, u_elem, u_port,
     tbl, tbl_base, inv, inv_base, kin, kout, ib, ob) = packed
    steps = 0
    while True:
        u = wire_prev[v]
        if u < n_in:
            return u, steps
        if steps >= max_steps:
            return -1, steps
        idx = u - n_in
        e = u_elem[idx]
        code = inv[inv_base[e] + states[e] * kout[e] + u_port[idx]]
        if code < 0:
            return -2, steps
        states[e] = code // kin[e]
        v = n_out + ib[e] + code % kin[e]
        steps += 1
