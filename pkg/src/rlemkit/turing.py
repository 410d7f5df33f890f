"""Reversible Turing machines: quintuple form, interpretation, decomposition
into a chain of reversible sequential machines, and compilation to circuits
made only of rotary elements.

A quintuple [p, s, s', d, q] means: in state p reading s, write s', move the
head d, enter q.  Determinism forbids two quintuples sharing (p, s);
reversibility requires that quintuples entering the same state share their
direction and differ in the written symbol.

The decomposition encodes the head as a travelling message rather than a
resting flag: ``shift q`` arriving at a cell means "the head lands here in
state q".  The cell then executes q's quintuple on its own symbol and hands
the head to a neighbour.  Reversibility of the machine is exactly what makes
each cell's move function injective: quintuples into the same state write
distinct symbols, so the (new symbol, outgoing message) pairs never collide,
and because all quintuples into q share a direction, "shift q" only ever
travels one way and arrival sides never need disambiguation.  The head only
comes to rest when the machine halts (or gets stuck), which raises the
cell's head flag and floats a terminal message back to the controller.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .circuits import (Configuration, Element, Netlist, StepLimitError,
                       inject, validated)
from .elements import ParseError, RlemError, Rsm, is_reversible
from .synthesis import SynthesizedRsm, synthesize_rsm


@dataclass(frozen=True)
class Quintuple:
    state: str
    read: str
    write: str
    direction: str          # "L" | "R"
    target: str

    def __post_init__(self):
        if self.direction not in ("L", "R"):
            raise RlemError(f"direction must be L or R, got {self.direction!r}")

    def __str__(self):
        return f"[{self.state} {self.read} {self.write} " \
               f"{self.direction} {self.target}]"


@dataclass(frozen=True)
class Rtm:
    initial: str
    accept: str
    reject: str
    blank: str
    quintuples: tuple[Quintuple, ...]

    @property
    def states(self) -> tuple[str, ...]:
        seen = dict.fromkeys([self.initial, self.accept, self.reject])
        for t in self.quintuples:
            seen.setdefault(t.state)
            seen.setdefault(t.target)
        return tuple(seen)

    @property
    def alphabet(self) -> tuple[str, ...]:
        seen = dict.fromkeys([self.blank])
        for t in self.quintuples:
            seen.setdefault(t.read)
            seen.setdefault(t.write)
        return tuple(seen)

    @property
    def rules(self) -> dict:
        return {(t.state, t.read): t for t in self.quintuples}

    def is_halting(self, state: str) -> bool:
        return state in (self.accept, self.reject)


def check_rtm(m: Rtm) -> list[str]:
    """Determinism and backward-determinism violations (empty = ok)."""
    problems = []
    seen = {}
    for t in m.quintuples:
        key = (t.state, t.read)
        if key in seen:
            problems.append(f"not deterministic: {seen[key]} and {t} both "
                            f"fire on ({t.state}, {t.read})")
        seen[key] = t
    quints = list(m.quintuples)
    for i, a in enumerate(quints):
        for b in quints[i + 1:]:
            if a.target != b.target:
                continue
            if a.direction != b.direction:
                problems.append(f"not reversible: {a} and {b} enter "
                                f"{a.target} from different directions")
            if a.write == b.write:
                problems.append(f"not reversible: {a} and {b} enter "
                                f"{a.target} writing the same symbol")
    return problems


def checked(m: Rtm) -> Rtm:
    problems = check_rtm(m)
    if problems:
        raise RlemError("invalid machine: " + "; ".join(problems))
    return m


# ---------------------------------------------------------------------------
# Interpreter
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TapeWindow:
    cells: tuple[str, ...]
    head: int


@dataclass(frozen=True)
class RtmOutcome:
    kind: str               # accept | reject | stuck | leftedge | running
    state: str
    tape: TapeWindow
    steps: int

    @property
    def halted(self) -> bool:
        return self.kind in ("accept", "reject")


def interpret(m: Rtm, input_word: str | Sequence[str], fuel: int) -> RtmOutcome:
    """Run the machine; the head starts on blank cell 0, input from cell 1."""
    for sym in input_word:
        if sym not in m.alphabet:
            raise RlemError(f"input symbol {sym!r} not in the tape alphabet")
    tape = [m.blank] + [str(s) for s in input_word]
    head = 0
    state = m.initial
    rules = m.rules
    steps = 0
    while steps < fuel:
        if state == m.accept:
            return RtmOutcome("accept", state, TapeWindow(tuple(tape), head), steps)
        if state == m.reject:
            return RtmOutcome("reject", state, TapeWindow(tuple(tape), head), steps)
        rule = rules.get((state, tape[head]))
        if rule is None:
            return RtmOutcome("stuck", state, TapeWindow(tuple(tape), head), steps)
        tape[head] = rule.write
        head += 1 if rule.direction == "R" else -1
        state = rule.target
        steps += 1
        if head < 0:
            return RtmOutcome("leftedge", state,
                              TapeWindow(tuple(tape), head), steps)
        if head >= len(tape):
            tape.append(m.blank)
    return RtmOutcome("running", state, TapeWindow(tuple(tape), head), steps)


# ---------------------------------------------------------------------------
# Decomposition into sequential machines
# ---------------------------------------------------------------------------

def _entry_directions(m: Rtm) -> dict:
    dirs = {}
    for t in m.quintuples:
        prev = dirs.setdefault(t.target, t.direction)
        if prev != t.direction:
            raise RlemError("machine failed reversibility check (directions)")
    if dirs.get(m.initial, "R") != "R":
        raise RlemError(
            f"initial state {m.initial} is entered by left-moving "
            f"quintuples; the begin token cannot arrive from the left. "
            f"Rename the start state so it is not re-entered leftward.")
    dirs[m.initial] = "R"
    return dirs


def _complete_rsm(states, inputs, outputs, move) -> Rsm:
    """Pad a partial injective move function to a bijective total one."""
    outputs = list(outputs)
    while len(outputs) < len(inputs):
        outputs.append(f"pad{len(outputs)}")
    used = set(move.values())
    free = [(q, g) for q in states for g in outputs if (q, g) not in used]
    free.reverse()
    full = dict(move)
    for q in states:
        for s in inputs:
            if (q, s) not in full:
                full[(q, s)] = free.pop()
    return Rsm(tuple(states), tuple(inputs), tuple(outputs), full)


@dataclass(frozen=True)
class RsmNetwork:
    machine: Rtm
    control: Rsm
    cell: Rsm
    netlist: Netlist
    window: int
    right_msgs: tuple[str, ...]
    left_msgs: tuple[str, ...]

    def cell_state(self, symbol: str, head: int) -> str:
        return f"{symbol}.{head}"

    def initial_configuration(self, input_word: str | Sequence[str]
                              ) -> Configuration:
        word = [str(s) for s in input_word]
        if len(word) + 1 > self.window:
            raise RlemError(f"input needs {len(word) + 1} cells but the "
                            f"window is {self.window}")
        tape = [self.machine.blank] + word
        tape += [self.machine.blank] * (self.window - len(tape))
        cidx = {q: i for i, q in enumerate(self.cell.states)}
        states = {"ctrl": 0}
        for i in range(self.window):
            states[f"cell{i}"] = cidx[self.cell_state(tape[i], 0)]
        return Configuration(states)

    def run(self, input_word, max_steps: int = 10 ** 6) -> "NetworkOutcome":
        config = self.initial_configuration(input_word)
        r = inject(self.netlist, config, "begin", max_steps, want_trace=False)
        return _network_outcome(self, r.output, r.configuration)


@dataclass(frozen=True)
class NetworkOutcome:
    kind: str           # accept | reject | stuck | leftedge | window_exceeded
    state: Optional[str]
    configuration: Configuration
    tape: Optional[TapeWindow]

    @property
    def halted(self) -> bool:
        return self.kind in ("accept", "reject")


def _network_outcome(net: RsmNetwork, port: str, config) -> NetworkOutcome:
    tape = _read_tape(net, config)
    if port == "accept":
        return NetworkOutcome("accept", net.machine.accept, config, tape)
    if port == "reject":
        return NetworkOutcome("reject", net.machine.reject, config, tape)
    for prefix, kind in (("stuck_", "stuck"), ("leftedge_", "leftedge"),
                         ("overflow_", "window_exceeded")):
        if port.startswith(prefix):
            return NetworkOutcome(kind, port[len(prefix):], config, tape)
    return NetworkOutcome("stuck", None, config, tape)


def _read_tape(net: RsmNetwork, config) -> TapeWindow:
    syms = []
    head = -1
    for i in range(net.window):
        state = net.cell.states[config.states[f"cell{i}"]]
        sym, h = state.rsplit(".", 1)
        syms.append(sym)
        if h == "1":
            head = i
    return TapeWindow(tuple(syms), head)


def decompose(m: Rtm, window: int) -> RsmNetwork:
    """Formalize the machine as one controller plus ``window`` identical
    tape-cell machines, wired in a chain.  Both components are reversible."""
    problems = check_rtm(m)
    if problems:
        raise RlemError("invalid machine: " + "; ".join(problems))
    if window < 1:
        raise RlemError("window must be >= 1")
    dirs = _entry_directions(m)
    rules = m.rules
    alpha = m.alphabet

    shift_r = [q for q in m.states if dirs.get(q) == "R"]
    shift_l = [q for q in m.states if dirs.get(q) == "L"]
    halts = [q for q in (m.accept, m.reject) if q in dirs]
    stucks = sorted({q for q in m.states
                     if not m.is_halting(q) and q in dirs
                     for s in alpha if (q, s) not in rules})
    right_msgs = [f"sR_{q}" for q in shift_r]
    left_msgs = [f"sL_{q}" for q in shift_l] + [f"halt_{q}" for q in halts] \
        + [f"stuck_{q}" for q in stucks]

    # the shared tape-cell machine
    cell_states = [f"{s}.{h}" for s in alpha for h in (0, 1)]
    cell_inputs = list(right_msgs) + list(left_msgs)
    cell_outputs = list(right_msgs) + list(left_msgs)
    cmove = {}
    for s in alpha:
        at_rest = f"{s}.0"
        for q in shift_r + shift_l:
            msg = f"sR_{q}" if dirs[q] == "R" else f"sL_{q}"
            rule = rules.get((q, s))
            if rule is not None:
                out = f"sR_{rule.target}" if rule.direction == "R" \
                    else f"sL_{rule.target}"
                cmove[(at_rest, msg)] = (f"{rule.write}.0", out)
            elif m.is_halting(q):
                cmove[(at_rest, msg)] = (f"{s}.1", f"halt_{q}")
            else:
                cmove[(at_rest, msg)] = (f"{s}.1", f"stuck_{q}")
        for term in left_msgs:
            if term.startswith(("halt_", "stuck_")):
                cmove[(at_rest, term)] = (at_rest, term)
    cell = _complete_rsm(cell_states, cell_inputs, cell_outputs, cmove)
    assert is_reversible(cell), "cell machine must be reversible"

    # the controller
    ctl_inputs = ["begin"] + list(left_msgs)
    terminal = ["accept", "reject"] + [f"leftedge_{q}" for q in shift_l] \
        + [f"stuck_{q}" for q in stucks]
    ctl_outputs = list(right_msgs) + terminal
    tmove = {("idle", "begin"): ("idle", f"sR_{m.initial}")}
    for q in shift_l:
        tmove[("idle", f"sL_{q}")] = ("done", f"leftedge_{q}")
    for q in halts:
        tmove[("idle", f"halt_{q}")] = \
            ("done", "accept" if q == m.accept else "reject")
    for q in stucks:
        tmove[("idle", f"stuck_{q}")] = ("done", f"stuck_{q}")
    control = _complete_rsm(["idle", "done"], ctl_inputs, ctl_outputs, tmove)
    assert is_reversible(control), "controller must be reversible"

    # the chain netlist
    elements = [Element("ctrl", control, 0)]
    for i in range(window):
        elements.append(Element(f"cell{i}", cell, 0))
    cin = {msg: j for j, msg in enumerate(cell.inputs)}
    cout = {msg: j for j, msg in enumerate(cell.outputs)}
    tin = {msg: j for j, msg in enumerate(control.inputs)}
    tout = {msg: j for j, msg in enumerate(control.outputs)}

    wiring = {("in", "begin"): ("ein", "ctrl", tin["begin"])}
    inputs = ["begin"]
    outputs = []
    for msg in right_msgs:
        wiring[("eout", "ctrl", tout[msg])] = ("ein", "cell0", cin[msg])
    for name in control.outputs:
        if name in right_msgs:
            continue
        wiring[("eout", "ctrl", tout[name])] = ("out", name)
        outputs.append(name)
    for i in range(window):
        me = f"cell{i}"
        for msg in right_msgs:
            if i + 1 < window:
                wiring[("eout", me, cout[msg])] = ("ein", f"cell{i+1}", cin[msg])
            else:
                port = f"overflow_{msg[3:]}"
                wiring[("eout", me, cout[msg])] = ("out", port)
                outputs.append(port)
        for msg in left_msgs:
            if i == 0:
                wiring[("eout", me, cout[msg])] = ("ein", "ctrl", tin[msg])
            else:
                wiring[("eout", me, cout[msg])] = ("ein", f"cell{i-1}", cin[msg])
        for name in cell.outputs:
            if name in right_msgs or name in left_msgs:
                continue
            port = f"{me}_{name}"                 # pad outputs, never emitted
            wiring[("eout", me, cout[name])] = ("out", port)
            outputs.append(port)
    last = f"cell{window-1}"
    for msg in left_msgs:
        port = f"edge_{msg}"
        wiring[("in", port)] = ("ein", last, cin[msg])
        inputs.append(port)

    netlist = validated(Netlist(tuple(elements), tuple(inputs),
                                tuple(outputs), wiring))
    return RsmNetwork(m, control, cell, netlist, window,
                      tuple(right_msgs), tuple(left_msgs))


# ---------------------------------------------------------------------------
# Compilation to rotary elements
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CompiledRtm:
    machine: Rtm
    network: RsmNetwork
    netlist: Netlist
    control_circuit: SynthesizedRsm
    cell_circuit: SynthesizedRsm

    def initial_configuration(self, input_word) -> Configuration:
        word = [str(s) for s in input_word]
        tape = [self.machine.blank] + word
        tape += [self.machine.blank] * (self.network.window - len(tape))
        states = {}
        for eid, st in self.control_circuit.state_map["idle"].states.items():
            states[f"ctrl_{eid}"] = st
        for i in range(self.network.window):
            cfg = self.cell_circuit.state_map[f"{tape[i]}.0"]
            for eid, st in cfg.states.items():
                states[f"cell{i}_{eid}"] = st
        return Configuration(states)

    def run(self, input_word, max_steps: int = 10 ** 6) -> NetworkOutcome:
        config = self.initial_configuration(input_word)
        r = inject(self.netlist, config, "begin", max_steps, want_trace=False)
        return _network_outcome_compiled(self, r.output, r.configuration)


def _network_outcome_compiled(c: CompiledRtm, port, config) -> NetworkOutcome:
    net = c.network
    kind_state = _port_kind(port)
    tape = _read_tape_compiled(c, config)
    return NetworkOutcome(kind_state[0], kind_state[1], config, tape)


def _port_kind(port):
    if port == "accept":
        return ("accept", None)
    if port == "reject":
        return ("reject", None)
    for prefix, kind in (("stuck_", "stuck"), ("leftedge_", "leftedge"),
                         ("overflow_", "window_exceeded")):
        if port.startswith(prefix):
            return (kind, port[len(prefix):])
    return ("stuck", None)


def _read_tape_compiled(c: CompiledRtm, config) -> Optional[TapeWindow]:
    by_state = {}
    for q, cfg in c.cell_circuit.state_map.items():
        key = tuple(sorted(cfg.states.items()))
        by_state[key] = q
    syms = []
    head = -1
    for i in range(c.network.window):
        prefix = f"cell{i}_"
        local = tuple(sorted((k[len(prefix):], v)
                             for k, v in config.states.items()
                             if k.startswith(prefix)))
        q = by_state.get(local)
        if q is None:
            return None
        sym, h = q.rsplit(".", 1)
        syms.append(sym)
        if h == "1":
            head = i
    return TapeWindow(tuple(syms), head)


def compile_to_re(m: Rtm, window: int) -> CompiledRtm:
    """Replace the controller and every cell by its rotary-element circuit
    and splice the chains together; ports match the network's."""
    net = decompose(m, window)
    cell_circ = synthesize_rsm(net.cell)
    ctl_circ = synthesize_rsm(net.control)
    instances = [("ctrl", ctl_circ)]
    for i in range(window):
        instances.append((f"cell{i}", cell_circ))

    elements = []
    wiring = {}
    entry = {}          # (inst, port) -> internal sink vertex
    exit_ = {}          # (inst, port) -> internal source vertex
    for inst, circ in instances:
        sub = circ.netlist
        for e in sub.elements:
            elements.append(Element(f"{inst}_{e.ident}", e.behavior,
                                    e.init_state))
        for u, v in sub.wiring.items():
            if u[0] == "in":
                entry[(inst, u[1])] = _prefix_vertex(inst, v)
                continue
            if v[0] == "out":
                exit_[(inst, v[1])] = _prefix_vertex(inst, u)
                continue
            wiring[_prefix_vertex(inst, u)] = _prefix_vertex(inst, v)

    circ_of = dict(instances)
    inputs, outputs = [], []
    # splice every wire of the abstract network through the sub-circuits
    for u, v in net.netlist.wiring.items():
        if u[0] == "in":
            name = u[1]
            inputs.append(name)
            src = ("in", name)
        else:
            _, inst, j = u
            symbol = net.netlist.element(inst).behavior.outputs[j]
            src = exit_[(inst, circ_of[inst].out_map[symbol])]
        if v[0] == "out":
            outputs.append(v[1])
            dst = ("out", v[1])
        else:
            _, inst, j = v
            symbol = net.netlist.element(inst).behavior.inputs[j]
            dst = entry[(inst, circ_of[inst].in_map[symbol])]
        wiring[src] = dst
    # sub-circuit pad inputs that the network never drives
    for (inst, port), sink in sorted(entry.items()):
        name = f"{inst}__{port}"
        if sink in wiring.values():
            continue
        wiring[("in", name)] = sink
        inputs.append(name)
    for (inst, port), src in sorted(exit_.items()):
        if src in wiring:
            continue
        name = f"{inst}__{port}"
        wiring[src] = ("out", name)
        outputs.append(name)

    netlist = validated(Netlist(tuple(elements), tuple(inputs),
                                tuple(outputs), wiring))
    return CompiledRtm(m, net, netlist, ctl_circ, cell_circ)


def _prefix_vertex(inst, v):
    if v[0] in ("ein", "eout"):
        return (v[0], f"{inst}_{v[1]}", v[2])
    raise RlemError(f"unexpected boundary vertex {v}")


# ---------------------------------------------------------------------------
# Cross validation: interpreter vs network vs compiled circuit
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CrossRow:
    input_word: str
    interpreter: str
    network: str
    compiled: str

    @property
    def agree(self) -> bool:
        return self.interpreter == self.network == self.compiled


@dataclass(frozen=True)
class CrossReport:
    rows: tuple[CrossRow, ...]

    @property
    def all_agree(self) -> bool:
        return all(r.agree for r in self.rows)

    @property
    def mismatches(self) -> tuple[CrossRow, ...]:
        return tuple(r for r in self.rows if not r.agree)


def _outcome_label(kind, state) -> str:
    if kind in ("accept", "reject"):
        return kind
    return f"{kind}({state})" if state else kind


def cross_validate(m: Rtm, inputs: Sequence[str], window: int,
                   fuel: int) -> CrossReport:
    """Run every input at all three levels and compare the outcomes."""
    net = decompose(m, window)
    compiled = compile_to_re(m, window)
    rows = []
    for word in inputs:
        ref = interpret(m, word, fuel)
        a = _outcome_label(ref.kind, ref.state if ref.kind != "running" else "")
        try:
            no = net.run(word, max_steps=max(fuel * 4, 10 ** 4))
            b = _outcome_label(no.kind, no.state)
        except (StepLimitError, RlemError) as err:
            b = f"error({err})"
        try:
            co = compiled.run(word, max_steps=10 ** 6)
            ccc = _outcome_label(co.kind, co.state)
        except (StepLimitError, RlemError) as err:
            ccc = f"error({err})"
        rows.append(CrossRow(str(word), a, b, ccc))
    return CrossReport(tuple(rows))


# ---------------------------------------------------------------------------
# Text format
# ---------------------------------------------------------------------------

def parse_rtm(text: str) -> Rtm:
    init = accept = reject = None
    blank = "0"
    quintuples = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "init" and len(parts) == 2:
            init = parts[1]
        elif parts[0] == "accept" and len(parts) == 2:
            accept = parts[1]
        elif parts[0] == "reject" and len(parts) == 2:
            reject = parts[1]
        elif parts[0] == "blank" and len(parts) == 2:
            blank = parts[1]
        elif len(parts) == 5:
            p, s, s2, d, q = parts
            if d not in ("L", "R"):
                raise ParseError(f"direction must be L or R, got {d!r}", lineno)
            quintuples.append(Quintuple(p, s, s2, d, q))
        else:
            raise ParseError(f"bad line {raw!r} (want a header or "
                             f"'p s s2 d q')", lineno)
    if init is None or accept is None or reject is None:
        raise ParseError("missing init/accept/reject header")
    return Rtm(init, accept, reject, blank, tuple(quintuples))


def format_rtm(m: Rtm) -> str:
    lines = [f"init {m.initial}", f"accept {m.accept}", f"reject {m.reject}",
             f"blank {m.blank}"]
    for t in m.quintuples:
        lines.append(f"{t.state} {t.read} {t.write} {t.direction} {t.target}")
    return "\n".join(lines) + "\n"


#: The even-length-unary acceptor used throughout the tests.
PARITY = Rtm("q0", "qacc", "qrej", "0", (
    Quintuple("q0", "0", "1", "R", "q1"),
    Quintuple("q1", "0", "1", "L", "qacc"),
    Quintuple("q1", "1", "0", "R", "q2"),
    Quintuple("q2", "0", "1", "L", "qrej"),
    Quintuple("q2", "1", "0", "R", "q1"),
))
