"""Netlists of reversible elements and single-token simulation.

A netlist wires circuit inputs and element outputs (the set U) onto circuit
outputs and element inputs (the set V) through one bijection, so fan-out is
impossible by construction.  Exactly one token ever exists; it enters at a
circuit input, hops wires, transforms element states as it passes through
them, and leaves at a circuit output.  Because every element's move function
is injective the walk is reversible: `backward_step` undoes `inject` exactly.

Vertices are tuples: ("in", name) / ("out", name) for circuit ports and
("ein", elem, j) / ("eout", elem, j) for element ports.  The text format is
line oriented::

    # comment
    in a
    out s
    elem x 2-3 init=0        # or: elem x rlem k=2 perm=0,2,3,1 init=V
    wire a -> x.in0
    wire x.out0 -> s

``init`` accepts 0/1 or the rotary-element aliases H (0) and V (1).
"""

from __future__ import annotations

import re
from array import array
from dataclasses import dataclass
from typing import Mapping, Optional, Union

from . import kernels
from .elements import (MoveTable, ParseError, RlemError, Rsm,
                       format_table, parse_table)

Vertex = tuple


class StepLimitError(RlemError):
    """The element-transition budget ran out (feedback circuits may loop)."""

    def __init__(self, steps, configuration=None, input_index=None):
        self.steps = steps
        self.configuration = configuration
        self.input_index = input_index
        at = "" if input_index is None else f" at input #{input_index}"
        super().__init__(f"step limit reached after {steps} transitions{at}")


DEFAULT_MAX_STEPS = 10 ** 6


@dataclass(frozen=True)
class Element:
    ident: str
    behavior: Union[MoveTable, Rsm]
    init_state: int = 0

    @property
    def n_inputs(self) -> int:
        b = self.behavior
        return b.k if isinstance(b, MoveTable) else len(b.inputs)

    @property
    def n_outputs(self) -> int:
        b = self.behavior
        return b.k if isinstance(b, MoveTable) else len(b.outputs)

    @property
    def n_states(self) -> int:
        b = self.behavior
        return 2 if isinstance(b, MoveTable) else len(b.states)


@dataclass(frozen=True)
class Netlist:
    elements: tuple[Element, ...]
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    wiring: Mapping[Vertex, Vertex]

    def __post_init__(self):
        object.__setattr__(self, "wiring", dict(self.wiring))

    def __eq__(self, other):
        if not isinstance(other, Netlist):
            return NotImplemented
        return (self.elements, self.inputs, self.outputs, self.wiring) == \
            (other.elements, other.inputs, other.outputs, other.wiring)

    def __hash__(self):
        return hash((self.elements, self.inputs, self.outputs,
                     tuple(sorted(self.wiring.items()))))

    def element(self, ident: str) -> Element:
        for e in self.elements:
            if e.ident == ident:
                return e
        raise KeyError(ident)

    def initial_configuration(self) -> "Configuration":
        return Configuration({e.ident: e.init_state for e in self.elements})

    # -- packed form (cached) ------------------------------------------------

    def _packed(self) -> "_Packed":
        cached = self.__dict__.get("_packed_cache")
        if cached is None:
            cached = _Packed(self)
            object.__setattr__(self, "_packed_cache", cached)
        return cached


@dataclass(frozen=True)
class Configuration:
    """States of all elements plus (transiently) the token's vertex."""

    states: Mapping[str, int]
    signal: Optional[Vertex] = None

    def __post_init__(self):
        object.__setattr__(self, "states", dict(self.states))

    def __eq__(self, other):
        if not isinstance(other, Configuration):
            return NotImplemented
        return self.states == other.states and self.signal == other.signal

    def __hash__(self):
        return hash((tuple(sorted(self.states.items())), self.signal))

    def with_states(self, **changes) -> "Configuration":
        st = dict(self.states)
        st.update(changes)
        return Configuration(st, self.signal)


@dataclass(frozen=True)
class TraceStep:
    element: str
    in_port: int
    out_port: int
    state_before: int
    state_after: int


@dataclass(frozen=True)
class Trace:
    entry: Vertex
    exit: Vertex
    steps: tuple[TraceStep, ...]

    @property
    def step_count(self) -> int:
        return len(self.steps)

    @property
    def visited(self) -> tuple[Vertex, ...]:
        out = [self.entry]
        for s in self.steps:
            out.append(("ein", s.element, s.in_port))
            out.append(("eout", s.element, s.out_port))
        out.append(self.exit)
        return tuple(out)


def _behavior_tables(behavior) -> tuple[int, int, int, list[int], list[int]]:
    """(n_states, k_in, k_out, flat move table, flat inverse table)."""
    if isinstance(behavior, MoveTable):
        k = behavior.k
        tbl = list(behavior.entries)
        inv = [-1] * (2 * k)
        for pos, code in enumerate(behavior.entries):
            inv[code] = pos
        return 2, k, k, tbl, inv
    ns, ki, ko = len(behavior.states), len(behavior.inputs), len(behavior.outputs)
    qidx = {q: i for i, q in enumerate(behavior.states)}
    sidx = {s: i for i, s in enumerate(behavior.inputs)}
    gidx = {g: i for i, g in enumerate(behavior.outputs)}
    tbl = [0] * (ns * ki)
    inv = [-1] * (ns * ko)
    for (q, s), (q2, g) in behavior.move.items():
        tbl[qidx[q] * ki + sidx[s]] = qidx[q2] * ko + gidx[g]
        inv[qidx[q2] * ko + gidx[g]] = qidx[q] * ki + sidx[s]
    return ns, ki, ko, tbl, inv


class _Packed:
    """Integer-array form of a netlist for the run-loop kernels."""

    def __init__(self, n: Netlist):
        self.netlist = n
        self.n_in = len(n.inputs)
        self.n_out = len(n.outputs)
        self.in_id = {name: i for i, name in enumerate(n.inputs)}
        self.out_id = {name: i for i, name in enumerate(n.outputs)}
        self.eidx = {e.ident: i for i, e in enumerate(n.elements)}

        kin, kout, tbl_base, inv_base, ib, ob = [], [], [], [], [], []
        tbl, inv = [], []
        for e in n.elements:
            ns, ki, ko, t, v = _behavior_tables(e.behavior)
            kin.append(ki)
            kout.append(ko)
            tbl_base.append(len(tbl))
            inv_base.append(len(inv))
            ib.append(sum(kin[:-1]))
            ob.append(sum(kout[:-1]))
            tbl.extend(t)
            inv.extend(v)
        total_in, total_out = sum(kin), sum(kout)
        self._kin, self._kout, self._ib, self._ob = kin, kout, ib, ob

        v_elem = [0] * total_in
        v_port = [0] * total_in
        u_elem = [0] * total_out
        u_port = [0] * total_out
        for i, e in enumerate(n.elements):
            for j in range(kin[i]):
                v_elem[ib[i] + j] = i
                v_port[ib[i] + j] = j
            for j in range(kout[i]):
                u_elem[ob[i] + j] = i
                u_port[ob[i] + j] = j

        wire_next = [-1] * (self.n_in + total_out)
        wire_prev = [-1] * (self.n_out + total_in)
        for u, v in n.wiring.items():
            ui = self.u_id(u)
            vi = self.v_id(v)
            wire_next[ui] = vi
            wire_prev[vi] = ui

        # int64 buffers shared by the pure and compiled run loops
        self.arrays = (self.n_in, self.n_out,
                       array("q", wire_next), array("q", wire_prev),
                       array("q", v_elem), array("q", v_port),
                       array("q", u_elem), array("q", u_port),
                       array("q", tbl), array("q", tbl_base),
                       array("q", inv), array("q", inv_base),
                       array("q", kin), array("q", kout),
                       array("q", ib), array("q", ob))

    def u_id(self, u: Vertex) -> int:
        if u[0] == "in":
            return self.in_id[u[1]]
        if u[0] == "eout":
            i = self.eidx[u[1]]
            return self.n_in + self._ob[i] + u[2]
        raise RlemError(f"not a source vertex: {u}")

    def v_id(self, v: Vertex) -> int:
        if v[0] == "out":
            return self.out_id[v[1]]
        if v[0] == "ein":
            i = self.eidx[v[1]]
            return self.n_out + self._ib[i] + v[2]
        raise RlemError(f"not a sink vertex: {v}")

    def states_of(self, config: Configuration):
        return array("q", (config.states[e.ident]
                           for e in self.netlist.elements))

    def config_of(self, states) -> Configuration:
        return Configuration({e.ident: states[i]
                              for i, e in enumerate(self.netlist.elements)})


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def _all_u(n: Netlist):
    for name in n.inputs:
        yield ("in", name)
    for e in n.elements:
        for j in range(e.n_outputs):
            yield ("eout", e.ident, j)


def _all_v(n: Netlist):
    for name in n.outputs:
        yield ("out", name)
    for e in n.elements:
        for j in range(e.n_inputs):
            yield ("ein", e.ident, j)


def validate(n: Netlist) -> list[str]:
    """Structural checks; an empty list means the netlist is well formed."""
    problems = []
    idents = [e.ident for e in n.elements]
    if len(set(idents)) != len(idents):
        problems.append("duplicate element ids")
    if len(set(n.inputs)) != len(n.inputs) or len(set(n.outputs)) != len(n.outputs):
        problems.append("duplicate port names")
    if set(n.inputs) & set(n.outputs):
        problems.append("a name is used both as input and output port")
    for e in n.elements:
        if not 0 <= e.init_state < e.n_states:
            problems.append(f"element {e.ident}: init state {e.init_state} "
                            f"out of range")
    us = set(_all_u(n))
    vs = set(_all_v(n))
    for u, v in n.wiring.items():
        if u not in us:
            problems.append(f"wire source {_vertex_str(u)} is not a circuit "
                            f"input or element output")
        if v not in vs:
            problems.append(f"wire target {_vertex_str(v)} is not a circuit "
                            f"output or element input")
    sources = list(n.wiring.keys())
    targets = list(n.wiring.values())
    if len(set(targets)) != len(targets):
        dup = sorted({_vertex_str(v) for v in targets if targets.count(v) > 1})
        problems.append(f"not injective: multiple wires into {', '.join(dup)}")
    missing_u = us - set(sources)
    if missing_u:
        names = ", ".join(sorted(_vertex_str(u) for u in missing_u))
        problems.append(f"not total: dangling source(s) {names}")
    missing_v = vs - set(targets)
    if missing_v:
        names = ", ".join(sorted(_vertex_str(v) for v in missing_v))
        problems.append(f"not onto: dangling target(s) {names}")
    return problems


def validated(n: Netlist) -> Netlist:
    problems = validate(n)
    if problems:
        raise RlemError("invalid netlist: " + "; ".join(problems))
    return n


# ---------------------------------------------------------------------------
# Simulation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InjectResult:
    configuration: Configuration
    output: str
    trace: Trace


def inject(n: Netlist, config: Configuration, port: str,
           max_steps: int = DEFAULT_MAX_STEPS, want_trace: bool = True
           ) -> InjectResult:
    """Drop a token on circuit input ``port`` and run it to an output.

    Raises StepLimitError when the transition budget is exhausted.
    """
    if config.signal is not None:
        raise RlemError("a token is already present")
    if port not in n.inputs:
        raise RlemError(f"no such input port: {port}")
    p = n._packed()
    if want_trace:
        return _inject_traced(n, p, config, port, max_steps)
    states = p.states_of(config)
    exit_v, steps = kernels.run_token(p.arrays, states, p.in_id[port], max_steps)
    if exit_v < 0:
        raise StepLimitError(steps, p.config_of(states))
    out_name = n.outputs[exit_v]
    return InjectResult(p.config_of(states), out_name,
                        Trace(("in", port), ("out", out_name), ()))


def _inject_traced(n, p, config, port, max_steps):
    states = p.states_of(config)
    (n_in, n_out, wire_next, _wp, v_elem, v_port, _ue, _up,
     tbl, tbl_base, _inv, _ib2, kin, kout, ib, ob) = p.arrays
    steps = []
    u = p.in_id[port]
    while True:
        v = wire_next[u]
        if v < n_out:
            out_name = n.outputs[v]
            return InjectResult(
                p.config_of(states), out_name,
                Trace(("in", port), ("out", out_name), tuple(steps)))
        if len(steps) >= max_steps:
            raise StepLimitError(len(steps), p.config_of(states))
        idx = v - n_out
        e = v_elem[idx]
        j = v_port[idx]
        before = states[e]
        code = tbl[tbl_base[e] + before * kin[e] + j]
        after, g = code // kout[e], code % kout[e]
        states[e] = after
        steps.append(TraceStep(n.elements[e].ident, j, g, before, after))
        u = n_in + ob[e] + g


def backward_step(n: Netlist, config: Configuration, port: str,
                  max_steps: int = DEFAULT_MAX_STEPS
                  ) -> tuple[Configuration, str]:
    """Exact inverse of inject: from the output port and the configuration
    after a run, recover the configuration before it and the entry port."""
    if config.signal is not None:
        raise RlemError("a token is already present")
    if port not in n.outputs:
        raise RlemError(f"no such output port: {port}")
    p = n._packed()
    states = p.states_of(config)
    entry_u, steps = kernels.run_token_back(p.arrays, states,
                                            p.out_id[port], max_steps)
    if entry_u == -1:
        raise StepLimitError(steps, p.config_of(states))
    if entry_u == -2:
        raise RlemError("backward walk left the move function's image "
                        "(configuration unreachable from this output)")
    return p.config_of(states), n.inputs[entry_u]


@dataclass(frozen=True)
class RunResult:
    outputs: tuple[str, ...]
    configuration: Configuration
    traces: tuple[Trace, ...]


def run_sequence(n: Netlist, config: Configuration, inputs,
                 max_steps: int = DEFAULT_MAX_STEPS,
                 want_trace: bool = False) -> RunResult:
    """Fold of inject over an input word; outputs are concatenated."""
    outs = []
    traces = []
    for i, port in enumerate(inputs):
        try:
            r = inject(n, config, port, max_steps, want_trace=want_trace)
        except StepLimitError as err:
            raise StepLimitError(err.steps, err.configuration,
                                 input_index=i) from None
        config = r.configuration
        outs.append(r.output)
        if want_trace:
            traces.append(r.trace)
    return RunResult(tuple(outs), config, tuple(traces))


# ---------------------------------------------------------------------------
# Simulation verification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Counterexample:
    state: object
    symbol: object
    reason: str
    observed_output: Optional[str] = None
    observed_states: Optional[Configuration] = None

    def __str__(self):
        return (f"({self.state}, {self.symbol}): {self.reason}"
                + (f" (token left at {self.observed_output})"
                   if self.observed_output else ""))


def _transitions(target):
    """Target transitions with keys matching the caller's map convention:
    integer states/symbols for a MoveTable, names for an Rsm."""
    if isinstance(target, MoveTable):
        states = (0, 1)
        moves = {(q, s): target.move(q, s)
                 for q in states for s in range(target.k)}
        return states, moves
    return target.states, dict(target.move)


def verify_simulation(n: Netlist, target, state_map, in_map, out_map,
                      max_steps: int = DEFAULT_MAX_STEPS
                      ) -> Optional[Counterexample]:
    """Check that ``n`` implements every transition of ``target``.

    For each target transition (q, s) -> (q2, g): injecting in_map[s] into
    the configuration state_map[q] must exit at out_map[g] leaving exactly
    state_map[q2].  Returns None if all transitions check out, otherwise the
    first counterexample (a step-limit overrun is reported distinctly).
    """
    states, moves = _transitions(target)
    if len({tuple(sorted(state_map[q].states.items())) for q in states}) \
            != len(states):
        raise RlemError("state_map must be injective")
    for (q, s), (q2, g) in sorted(moves.items(), key=lambda kv: str(kv[0])):
        config = state_map[q]
        try:
            r = inject(n, config, in_map[s], max_steps, want_trace=False)
        except StepLimitError:
            return Counterexample(q, s, "step limit during transition")
        if r.output != out_map[g]:
            return Counterexample(q, s, f"expected output {out_map[g]}",
                                  r.output, r.configuration)
        if r.configuration != state_map[q2]:
            return Counterexample(q, s, f"final configuration does not encode "
                                  f"{q2}", r.output, r.configuration)
    return None


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------

_ID = r"[A-Za-z_][A-Za-z0-9_]*"
_PORT_RE = re.compile(rf"({_ID})\.(in|out)(\d+)")


def _vertex_str(v: Vertex) -> str:
    if v[0] in ("in", "out"):
        return v[1]
    kind = "in" if v[0] == "ein" else "out"
    return f"{v[1]}.{kind}{v[2]}"


def _parse_endpoint(tok: str, lineno: int) -> Vertex:
    m = _PORT_RE.fullmatch(tok)
    if m:
        return ("ein" if m.group(2) == "in" else "eout",
                m.group(1), int(m.group(3)))
    if re.fullmatch(_ID, tok):
        return ("port", tok)          # resolved to in/out after the scan
    raise ParseError(f"bad wire endpoint {tok!r}", lineno)


def parse_netlist(text: str) -> Netlist:
    inputs, outputs, elements, wires = [], [], [], []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        kind = parts[0]
        if kind == "in" and len(parts) == 2:
            inputs.append(parts[1])
        elif kind == "out" and len(parts) == 2:
            outputs.append(parts[1])
        elif kind == "elem":
            m = re.fullmatch(rf"elem\s+({_ID})\s+(.*?)\s+init=(\S+)", line)
            if not m:
                raise ParseError("bad elem line (want: elem <id> <table> "
                                 "init=<state>)", lineno)
            ident, spec, init = m.groups()
            init_aliases = {"H": 0, "V": 1}
            if init in init_aliases:
                state = init_aliases[init]
            elif init.isdigit():
                state = int(init)
            else:
                raise ParseError(f"bad init state {init!r}", lineno)
            try:
                tbl = parse_table(spec)
            except (ParseError, RlemError) as err:
                raise ParseError(f"bad element table: {err}", lineno) from None
            elements.append(Element(ident, tbl, state))
        elif kind == "wire":
            m = re.fullmatch(r"wire\s+(\S+)\s*->\s*(\S+)", line)
            if not m:
                raise ParseError("bad wire line (want: wire <from> -> <to>)",
                                 lineno)
            wires.append((_parse_endpoint(m.group(1), lineno),
                          _parse_endpoint(m.group(2), lineno), lineno))
        else:
            raise ParseError(f"unknown directive {kind!r}", lineno)

    inset, outset = set(inputs), set(outputs)
    wiring = {}
    for u, v, lineno in wires:
        if u[0] == "port":
            if u[1] not in inset:
                raise ParseError(f"wire source {u[1]!r} is not a declared "
                                 f"input", lineno)
            u = ("in", u[1])
        if v[0] == "port":
            if v[1] not in outset:
                raise ParseError(f"wire target {v[1]!r} is not a declared "
                                 f"output", lineno)
            v = ("out", v[1])
        if u in wiring:
            raise ParseError(f"duplicate wire from {_vertex_str(u)}", lineno)
        if v in wiring.values():
            raise ParseError(f"duplicate wire into {_vertex_str(v)}", lineno)
        wiring[u] = v
    return Netlist(tuple(elements), tuple(inputs), tuple(outputs), wiring)


def format_netlist(n: Netlist) -> str:
    """Canonical text: declaration order preserved, wires in vertex order."""
    lines = []
    for name in n.inputs:
        lines.append(f"in {name}")
    for name in n.outputs:
        lines.append(f"out {name}")
    for e in n.elements:
        if isinstance(e.behavior, MoveTable):
            spec = format_table(e.behavior)
        else:
            raise RlemError("only move-table elements have a text form")
        lines.append(f"elem {e.ident} {spec} init={e.init_state}")
    order = {u: i for i, u in enumerate(_all_u(n))}
    for u in sorted(n.wiring, key=order.get):
        lines.append(f"wire {_vertex_str(u)} -> {_vertex_str(n.wiring[u])}")
    return "\n".join(lines) + "\n"


def single_element_netlist(t: MoveTable, init_state: int = 0,
                           ident: str = "e0",
                           input_names=None, output_names=None) -> Netlist:
    """Wrap one element: input i -> e0.in i, e0.out j -> output j."""
    from .elements import _input_names, _output_names
    ins = tuple(input_names) if input_names else _input_names(t.k)
    outs = tuple(output_names) if output_names else _output_names(t.k)
    wiring = {}
    for i, name in enumerate(ins):
        wiring[("in", name)] = ("ein", ident, i)
    for j, name in enumerate(outs):
        wiring[("eout", ident, j)] = ("out", name)
    return Netlist((Element(ident, t, init_state),), ins, outs, wiring)
