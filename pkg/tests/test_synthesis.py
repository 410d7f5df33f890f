"""Machine-to-circuit compilation and the exhaustive simulation search."""

import itertools

import pytest

from rlemkit.circuits import (Configuration, Netlist, validate,
                              verify_simulation)
from rlemkit.elements import (ROTARY_ELEMENT, MoveTable, RlemError, Rsm,
                              table)
from rlemkit.synthesis import (ChainReport, Exhausted, SearchResult,
                               search_circuit, synthesize_rsm,
                               universality_chain)
from conftest import m0


# -- machine compilation --------------------------------------------------------

def test_m0_synthesis_layout():
    built = synthesize_rsm(m0())
    # three columns of two rows plus a bottom element each
    assert len(built.netlist.elements) == 9
    assert validate(built.netlist) == []
    columns = {q: [eid for eid, (col, _) in built.layout.items() if col == q]
               for q in ("q1", "q2", "q3")}
    assert all(len(v) == 3 for v in columns.values())
    # every element is a rotary element
    assert all(e.behavior == ROTARY_ELEMENT for e in built.netlist.elements)


def test_m0_state_encoding_unique_bottom():
    built = synthesize_rsm(m0())
    for q, config in built.state_map.items():
        h_elems = [eid for eid, st in config.states.items() if st == 0]
        assert len(h_elems) == 1
        assert built.layout[h_elems[0]] == (q, "bottom")


def test_m0_walked_transition():
    # state q1, input a2: output b2 and the circuit now encodes q3
    built = synthesize_rsm(m0())
    from rlemkit.circuits import inject
    r = inject(built.netlist, built.state_map["q1"], built.in_map["a2"])
    assert r.output == built.out_map["b2"]
    assert r.configuration == built.state_map["q3"]


def test_m0_full_verification():
    built = synthesize_rsm(m0())
    assert built.verify() is None


def test_one_state_identity_machine():
    m = Rsm(("q",), ("x", "y"), ("u", "v"),
            {("q", "x"): ("q", "u"), ("q", "y"): ("q", "v")})
    built = synthesize_rsm(m)
    assert built.verify() is None


def test_more_outputs_than_inputs():
    m = Rsm(("p", "q"), ("x",), ("u", "v"),
            {("p", "x"): ("q", "v"), ("q", "x"): ("p", "u")})
    built = synthesize_rsm(m)
    assert built.verify() is None


def test_nonreversible_machine_rejected():
    m = Rsm(("p", "q"), ("x",), ("u",),
            {("p", "x"): ("p", "u"), ("q", "x"): ("p", "u")})
    with pytest.raises(RlemError):
        synthesize_rsm(m)


def test_synthesized_rotary_element_circuit():
    built = synthesize_rsm(ROTARY_ELEMENT)
    assert built.verify() is None
    assert len(built.netlist.elements) == 2 * 5    # 2 states x (4 rows + bottom)


# -- search -----------------------------------------------------------------------

def test_identity_embedding_found_at_one_element():
    t = table(2, 3)
    got = search_circuit(t, [t], 1)
    assert isinstance(got, SearchResult)
    assert got.element_count == 1


def test_search_finds_3_10_from_2_3_and_2_4():
    got = search_circuit(table(3, 10), [table(2, 3), table(2, 4)], 4)
    assert isinstance(got, SearchResult)
    assert got.element_count == 2
    bad = verify_simulation(got.netlist, table(3, 10), got.state_map,
                            got.in_map, got.out_map)
    assert bad is None


def test_search_two_two_cannot_build_2_3_within_two():
    got = search_circuit(table(2, 3), [table(2, 2)], 2)
    assert got == Exhausted(2, got.nodes)


def test_search_deterministic():
    a = search_circuit(table(3, 10), [table(2, 3), table(2, 4)], 3)
    b = search_circuit(table(3, 10), [table(2, 3), table(2, 4)], 3)
    assert isinstance(a, SearchResult)
    assert a.netlist == b.netlist
    assert a.state_map == b.state_map


def test_search_monotone_in_bound():
    small = search_circuit(table(3, 10), [table(2, 3), table(2, 4)], 2)
    large = search_circuit(table(3, 10), [table(2, 3), table(2, 4)], 4)
    assert isinstance(small, SearchResult)
    assert isinstance(large, SearchResult)
    assert small.netlist == large.netlist


def brute_force_exists(target, parts, m, max_steps=300):
    """Independent oracle: enumerate every wiring/state map explicitly."""
    tk = target.k
    for types in itertools.product(range(len(parts)), repeat=m):
        chosen = [parts[t] for t in types]
        us = [("in", s) for s in range(tk)]
        vs = [("out", g) for g in range(tk)]
        for e, p in enumerate(chosen):
            us += [("eo", e, j) for j in range(p.k)]
            vs += [("ei", e, j) for j in range(p.k)]
        for perm in itertools.permutations(range(len(vs))):
            wiring = {us[i]: vs[j] for i, j in enumerate(perm)}
            for v0 in itertools.product((0, 1), repeat=m):
                for v1 in itertools.product((0, 1), repeat=m):
                    if v0 == v1:
                        continue
                    if _simulates(target, chosen, wiring, v0, v1, max_steps):
                        return True
    return False


def _simulates(target, chosen, wiring, v0, v1, max_steps):
    vecs = {0: v0, 1: v1}
    for q in (0, 1):
        for s in range(target.k):
            q2, g = target.move(q, s)
            st = list(vecs[q])
            u = ("in", s)
            for _ in range(max_steps):
                v = wiring[u]
                if v[0] == "out":
                    break
                _, e, j = v
                q_e, g_e = chosen[e].move(st[e], j)
                st[e] = q_e
                u = ("eo", e, g_e)
            else:
                return False
            if v[1] != g or tuple(st) != vecs[q2]:
                return False
    return True


@pytest.mark.parametrize("target,parts,bound", [
    (2, [3], 2), (3, [2], 2), (2, [17], 2),
])
def test_search_agrees_with_brute_force(target, parts, bound):
    tt = table(2, target)
    pp = [table(2, p) for p in parts]
    for m in range(1, bound + 1):
        got = search_circuit(tt, pp, m)
        assert isinstance(got, SearchResult) == brute_force_exists(tt, pp, m)
        if isinstance(got, SearchResult):
            break


# -- universality chains -----------------------------------------------------------

def test_chain_for_4_symbol_element():
    rep = universality_chain(table(4, 289))
    assert isinstance(rep, ChainReport)
    assert [l.k for l in rep.links] == [4, 3]
    assert rep.links[1].feedback is not None


def test_chain_trivial_at_3_symbols():
    rep = universality_chain(table(3, 10))
    assert [l.k for l in rep.links] == [3]


def test_chain_rejects_degenerate():
    with pytest.raises(RlemError):
        universality_chain(table(3, 3))
