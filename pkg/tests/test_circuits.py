"""Netlist validation, token simulation, reversibility, text format."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rlemkit.circuits import (Configuration, Element, Netlist, StepLimitError,
                              backward_step, format_netlist, inject,
                              parse_netlist, run_sequence,
                              single_element_netlist, validate,
                              verify_simulation)
from rlemkit.elements import (ROTARY_ELEMENT, ParseError, RlemId,
                              serial_to_table, table)


def rotary_netlist(init=0):
    return single_element_netlist(
        ROTARY_ELEMENT, init, input_names=("n", "e", "s", "w"),
        output_names=("np", "ep", "sp", "wp"))


# -- validation ----------------------------------------------------------------

def test_single_rotary_netlist_is_valid():
    assert validate(rotary_netlist()) == []


def test_fan_in_detected():
    n = rotary_netlist()
    wiring = dict(n.wiring)
    wiring[("in", "e")] = ("ein", "e0", 0)     # second wire into in0
    bad = Netlist(n.elements, n.inputs, n.outputs, wiring)
    problems = validate(bad)
    assert any("not injective" in p for p in problems)


def test_dangling_output_detected():
    n = rotary_netlist()
    wiring = dict(n.wiring)
    del wiring[("eout", "e0", 2)]
    bad = Netlist(n.elements, n.inputs, n.outputs, wiring)
    problems = validate(bad)
    assert any("not total" in p for p in problems)
    assert any("dangling" in p for p in problems)


# -- single-element semantics ---------------------------------------------------

def test_rotary_orthogonal_turn():
    n = rotary_netlist(init=0)                     # state H
    r = inject(n, n.initial_configuration(), "n")
    assert r.output == "wp"
    assert r.configuration.states["e0"] == 1       # now V


def test_rotary_parallel_pass():
    n = rotary_netlist(init=0)
    r = inject(n, n.initial_configuration(), "w")
    assert r.output == "ep"
    assert r.configuration.states["e0"] == 0       # still H


def test_two_three_produces_s_then_t():
    n = single_element_netlist(table(2, 3), 0)
    r = run_sequence(n, n.initial_configuration(), ["b", "b"])
    assert r.outputs == ("s", "t")
    assert r.configuration.states["e0"] == 0


def test_two_four_ba_gives_tt():
    n = single_element_netlist(table(2, 4), 0)
    r = run_sequence(n, n.initial_configuration(), ["b", "a"])
    assert r.outputs == ("t", "t")


def test_two_seventeen_bb_gives_st_from_one_state():
    n = single_element_netlist(table(2, 17))
    hits = []
    for q in (0, 1):
        r = run_sequence(n, Configuration({"e0": q}), ["b", "b", "b", "b"])
        if r.outputs == ("s", "t", "s", "t"):
            hits.append(q)
    assert len(hits) == 1       # exactly one start state shows the pattern


def test_empty_input_sequence():
    n = rotary_netlist()
    r = run_sequence(n, n.initial_configuration(), [])
    assert r.outputs == ()


# -- reversibility ---------------------------------------------------------------

def test_backward_inverts_forward_on_rotary():
    n = rotary_netlist()
    for q in (0, 1):
        for port in n.inputs:
            start = Configuration({"e0": q})
            r = inject(n, start, port)
            back_config, back_port = backward_step(n, r.configuration, r.output)
            assert back_config == start
            assert back_port == port


def test_backward_from_table_row():
    # state V, output wp: the unique predecessor is state H, input n
    n = rotary_netlist()
    config, port = backward_step(n, Configuration({"e0": 1}), "wp")
    assert config == Configuration({"e0": 0})
    assert port == "n"


from conftest import random_circuit


def test_forward_backward_round_trip_random_circuits():
    rng = random.Random(20250341)
    for trial in range(100):
        net = random_circuit(rng, rng.randrange(1, 6))
        config = Configuration({e.ident: rng.randrange(2)
                                for e in net.elements})
        port = rng.choice(net.inputs)
        r = inject(net, config, port, max_steps=10 ** 5)
        back_config, back_port = backward_step(net, r.configuration, r.output,
                                               max_steps=10 ** 5)
        assert back_config == config
        assert back_port == port


def test_single_token_conservation():
    rng = random.Random(7)
    net = random_circuit(rng, 4)
    config = Configuration({e.ident: 0 for e in net.elements})
    r = inject(net, config, net.inputs[0], max_steps=10 ** 5)
    assert r.configuration.signal is None
    touched = {s.element for s in r.trace.steps}
    for e in net.elements:
        if e.ident not in touched:
            assert r.configuration.states[e.ident] == config.states[e.ident]


@settings(deadline=None, max_examples=30)
@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 12), st.integers(0, 12))
def test_run_sequence_is_fold_of_inject(seed, total, split_at):
    rng = random.Random(seed)
    net = random_circuit(rng, rng.randrange(1, 5))
    config = net.initial_configuration()
    word = [rng.choice(net.inputs) for _ in range(total)]
    cut = min(split_at, total)
    whole = run_sequence(net, config, word, max_steps=10 ** 5)
    first = run_sequence(net, config, word[:cut], max_steps=10 ** 5)
    second = run_sequence(net, first.configuration, word[cut:],
                          max_steps=10 ** 5)
    assert whole.outputs == first.outputs + second.outputs
    assert whole.configuration == second.configuration


def test_determinism():
    rng = random.Random(99)
    net = random_circuit(rng, 5)
    config = net.initial_configuration()
    word = [rng.choice(net.inputs) for _ in range(20)]
    a = run_sequence(net, config, word, max_steps=10 ** 5)
    b = run_sequence(net, config, word, max_steps=10 ** 5)
    assert a.outputs == b.outputs and a.configuration == b.configuration


def test_step_limit_raised_with_index():
    # injectivity forbids true loops, so the limit only ever cuts a long
    # finite walk short; a budget of zero cuts the very first transition
    net = parse_netlist("""
in x
out y
elem e0 rlem k=1 perm=0,1 init=0
wire x -> e0.in0
wire e0.out0 -> y
""")
    assert validate(net) == []
    with pytest.raises(StepLimitError) as exc:
        run_sequence(net, net.initial_configuration(), ["x", "x"], max_steps=0)
    assert exc.value.input_index == 0
    r = run_sequence(net, net.initial_configuration(), ["x", "x"], max_steps=5)
    assert r.outputs == ("y", "y")


# -- verify_simulation -----------------------------------------------------------

def test_verify_identity_embedding():
    t = table(2, 3)
    n = single_element_netlist(t)
    state_map = {0: Configuration({"e0": 0}), 1: Configuration({"e0": 1})}
    in_map = {0: "a", 1: "b"}
    out_map = {0: "s", 1: "t"}
    assert verify_simulation(n, t, state_map, in_map, out_map) is None


def test_verify_detects_swapped_states():
    t = table(2, 3)
    n = single_element_netlist(t)
    state_map = {0: Configuration({"e0": 1}), 1: Configuration({"e0": 0})}
    bad = verify_simulation(n, t, state_map, {0: "a", 1: "b"},
                            {0: "s", 1: "t"})
    assert bad is not None


# -- text format -----------------------------------------------------------------

ROTARY_TEXT = """\
# single rotary element
in n
in e
in s
in w
out np
out ep
out sp
out wp
elem re rlem k=4 perm=7,3,5,1,6,0,4,2 init=H
wire n -> re.in0
wire e -> re.in1
wire s -> re.in2
wire w -> re.in3
wire re.out0 -> np
wire re.out1 -> ep
wire re.out2 -> sp
wire re.out3 -> wp
"""


def test_parse_serialize_round_trip():
    n1 = parse_netlist(ROTARY_TEXT)
    n2 = parse_netlist(format_netlist(n1))
    assert n1 == n2
    assert format_netlist(n1) == format_netlist(n2)


def test_init_aliases():
    n = parse_netlist(ROTARY_TEXT)
    assert n.element("re").init_state == 0       # H
    assert n.element("re").behavior == ROTARY_ELEMENT


def test_duplicate_wire_endpoint_is_parse_error():
    text = ROTARY_TEXT + "wire re.out0 -> np\n"
    with pytest.raises(ParseError) as exc:
        parse_netlist(text)
    assert exc.value.line is not None


def test_parse_error_carries_line():
    with pytest.raises(ParseError) as exc:
        parse_netlist("in a\nwire a -> nowhere.in9x\n")
    assert exc.value.line == 2
