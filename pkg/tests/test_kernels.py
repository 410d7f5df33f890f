"""Pure and compiled kernels must agree exactly."""

import random
from array import array
from itertools import permutations
from math import factorial

import pytest

from rlemkit import kernels
from rlemkit.kernels import pure

compiled = pytest.importorskip("rlemkit.kernels._speed",
                               reason="compiled kernel not built")


def test_backend_reports_compiled():
    import os
    if not os.environ.get("RLEMKIT_PURE"):
        assert kernels.backend_name() == "compiled"


def test_rank_unrank_agree():
    rng = random.Random(5)
    for n in (2, 4, 6, 8):
        for _ in range(200):
            serial = rng.randrange(factorial(n))
            assert compiled.unrank_permutation(n, serial) == \
                pure.unrank_permutation(n, serial)
            perm = list(range(n))
            rng.shuffle(perm)
            assert compiled.rank_permutation(tuple(perm)) == \
                pure.rank_permutation(tuple(perm))


def test_apply_renaming_agrees():
    rng = random.Random(6)
    for k in (2, 3, 4):
        perms = list(permutations(range(k)))
        for _ in range(100):
            entries = list(range(2 * k))
            rng.shuffle(entries)
            entries = tuple(entries)
            swap = rng.randrange(2)
            pin = rng.choice(perms)
            pout = rng.choice(perms)
            assert compiled.apply_renaming(entries, k, swap, pin, pout) == \
                pure.apply_renaming(entries, k, swap, pin, pout)


def test_orbit_serials_agree():
    rng = random.Random(7)
    for k in (2, 3, 4):
        for _ in range(20):
            entries = list(range(2 * k))
            rng.shuffle(entries)
            assert compiled.orbit_serials(tuple(entries), k) == \
                pure.orbit_serials(tuple(entries), k)


def test_run_token_agrees_on_random_circuits():
    from conftest import random_circuit

    rng = random.Random(8)
    for _ in range(150):
        net = random_circuit(rng, rng.randrange(1, 6))
        packed = net._packed()
        states0 = [rng.randrange(2) for _ in net.elements]
        u = rng.randrange(len(net.inputs))

        s1 = array("q", states0)
        r1 = pure.run_token(packed.arrays, s1, u, 10 ** 5)
        s2 = array("q", states0)
        r2 = compiled.run_token(packed.arrays, s2, u, 10 ** 5)
        assert r1 == tuple(r2) or r1 == r2
        assert list(s1) == list(s2)

        if r1[0] >= 0:
            b1 = array("q", s1)
            k1 = pure.run_token_back(packed.arrays, b1, r1[0], 10 ** 5)
            b2 = array("q", s1)
            k2 = compiled.run_token_back(packed.arrays, b2, r1[0], 10 ** 5)
            assert k1 == tuple(k2) or k1 == k2
            assert list(b1) == list(b2) == states0


def test_solver_parity_with_reference():
    # identical exploration: same result, same node count, for found and
    # exhausted cases alike
    from rlemkit.search_core import solve_search as pure_solve
    from rlemkit.elements import table

    cases = [
        (table(3, 10), [table(2, 3), table(2, 4)], 2),   # found
        (table(2, 3), [table(2, 2)], 2),                 # exhausted
        (table(2, 2), [table(2, 3)], 3),                 # exhausted at 3
        (table(2, 2), [table(2, 3)], 4),                 # found at 4
        (table(2, 4), [table(2, 4)], 1),                 # identity embedding
        (table(3, 7), [table(2, 3), table(2, 17)], 2),
    ]
    for target, parts, cap in cases:
        pt = [(p.k, p.entries) for p in parts]
        for c in range(1, cap + 1):
            a = pure_solve(target.k, target.entries, pt, c, 10 ** 4)
            b = compiled.solve_search(target.k, target.entries, pt, c, 10 ** 4)
            assert a == b, (target.name, c)


def test_solver_parity_random_targets():
    rng = random.Random(31337)
    from rlemkit.search_core import solve_search as pure_solve
    from rlemkit.elements import table

    for _ in range(25):
        tk = rng.choice((2, 3))
        target = table(tk, rng.randrange(factorial(2 * tk)))
        parts = [(2, table(2, rng.randrange(24)).entries)]
        cap = rng.randrange(1, 3)
        a = pure_solve(tk, target.entries, parts, cap, 2000)
        b = compiled.solve_search(tk, target.entries, parts, cap, 2000)
        assert a == b
