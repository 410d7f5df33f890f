"""Why circuits of element 2-2 cannot simulate the other two-symbol
non-degenerate elements: the crossing-budget argument, executable.

Element 2-2 reads like a one-bit latch: the output names the state it was in
(q0 emits s, q1 emits t) and the input names the state it enters (a sets q0,
b sets q1).  For a circuit of 2-2s with ports a, b / s, t, grow the least
vertex set W that contains the input a and is closed under (i) following a
wire and (ii) jumping from an element's first input to its first output and
from its second input to its second output.  W is fixed by the wiring alone.
Wires never leave W, the other circuit input b never joins it, and exactly
one of the two circuit outputs lands in it.  An element with one input port
on each side of the partition is a boundary element; a token can change
sides only by passing through one, doing so toggles that element, and the
toggle direction is gated by its state.  Each full traversal that enters on
one side and exits on the other therefore burns one boundary element's
ability to cross that way, and the supply |boundary| is finite.  Driving the
circuit with the target's distinguishing input word (bb... for 2-3 and 2-17,
baba... for 2-4) forces one side-crossing exit per period, so the circuit
must diverge from the target within |boundary| + 1 periods.  That bound and
the observed divergence step form the refutation certificate.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional, Sequence, Union

from .circuits import Configuration, Netlist, Trace, inject, validate
from .elements import (MoveTable, RlemError, RlemId, canonical_serial,
                       classify_degeneracy, Degeneracy, serial_to_table,
                       table)

TWO_TWO_ENTRIES = (0, 2, 1, 3)          # element 2-2


class InvariantViolation(RlemError):
    """A property that is a theorem failed on a concrete circuit: always an
    implementation bug, never silently acceptable."""


# ---------------------------------------------------------------------------
# The side partition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CrossingPartition:
    w_vertices: frozenset
    inside: tuple[str, ...]       # both element inputs on the W side
    outside: tuple[str, ...]      # both on the complement
    boundary: tuple[str, ...]     # one on each: the crossing budget

    @property
    def budget(self) -> int:
        return len(self.boundary)

    def side(self, vertex) -> bool:
        return vertex in self.w_vertices

    def w_output(self) -> str:
        return "s" if ("out", "s") in self.w_vertices else "t"


def _check_two_two(n: Netlist):
    for e in n.elements:
        b = e.behavior
        if not isinstance(b, MoveTable) or b.entries != TWO_TWO_ENTRIES:
            raise RlemError(
                f"element {e.ident} is not a copy of 2-2; the crossing "
                f"argument only covers 2-2 circuits")
    if set(n.inputs) != {"a", "b"} or set(n.outputs) != {"s", "t"}:
        raise RlemError("circuit ports must be a, b / s, t")


def crossing_partition(n: Netlist) -> CrossingPartition:
    """Least set W: a is in W; wires stay in W; input port j of an element
    pulls output port j in with it.  Depends only on the wiring."""
    _check_two_two(n)
    problems = validate(n)
    if problems:
        raise RlemError("invalid netlist: " + "; ".join(problems))
    w = set()
    work = [("in", "a")]
    while work:
        x = work.pop()
        if x in w:
            continue
        w.add(x)
        if x[0] in ("in", "eout"):           # a U vertex: follow its wire
            work.append(n.wiring[x])
        elif x[0] == "ein":                  # element input pulls the paired output
            work.append(("eout", x[1], x[2]))
    inside, outside, boundary = [], [], []
    for e in n.elements:
        a_in = ("ein", e.ident, 0) in w
        b_in = ("ein", e.ident, 1) in w
        if a_in and b_in:
            inside.append(e.ident)
        elif not a_in and not b_in:
            outside.append(e.ident)
        else:
            boundary.append(e.ident)
    part = CrossingPartition(frozenset(w), tuple(inside), tuple(outside),
                             tuple(boundary))
    _escalate_structural(n, part)
    return part


def _escalate_structural(n: Netlist, part: CrossingPartition):
    if ("in", "b") in part.w_vertices:
        raise InvariantViolation("input b ended up on the W side")
    outs_in_w = (("out", "s") in part.w_vertices) + \
        (("out", "t") in part.w_vertices)
    if outs_in_w != 1:
        raise InvariantViolation(
            f"expected exactly one of s, t on the W side, found {outs_in_w}")
    for u, v in n.wiring.items():
        if part.side(u) != part.side(v):
            raise InvariantViolation(f"wire {u} -> {v} crosses the partition")


# ---------------------------------------------------------------------------
# Replaying traces against the four crossing claims
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClaimReport:
    ok: bool
    violations: tuple[str, ...]
    traversals: int
    crossings: int


def check_trace_claims(n: Netlist, part: CrossingPartition, trace: Trace
                       ) -> list[str]:
    """Violations of the four claims in one entry-to-exit traversal."""
    violations = []
    boundary = set(part.boundary)
    to_w = from_w = 0
    for step in trace.steps:
        side_in = part.side(("ein", step.element, step.in_port))
        side_out = part.side(("eout", step.element, step.out_port))
        crossing = side_in != side_out
        toggled = step.state_before != step.state_after
        if crossing:
            if step.element not in boundary:
                violations.append(
                    f"claim 1: crossing at non-boundary element {step.element}")
            if side_in and not side_out:
                from_w += 1
            else:
                to_w += 1
        if step.element in boundary:
            # state q0 emits output port 0, q1 emits port 1; the side of that
            # port fixes which crossing direction the state permits
            gate_side = part.side(("eout", step.element, step.state_before))
            if side_out != gate_side:
                violations.append(
                    f"claim 2: {step.element} in q{step.state_before} exited "
                    f"on the side its state forbids")
            if crossing != toggled:
                violations.append(
                    f"claim 3: {step.element} crossed={crossing} but "
                    f"toggled={toggled}")
    entry_w = part.side(trace.entry)
    exit_w = part.side(trace.exit)
    want_diff = (1 if entry_w and not exit_w else
                 -1 if not entry_w and exit_w else 0)
    if from_w - to_w != want_diff:
        violations.append(
            f"claim 4: {from_w} crossings out of W vs {to_w} into W on a "
            f"{'W' if entry_w else 'not-W'} -> {'W' if exit_w else 'not-W'} "
            f"traversal")
    return violations


def check_claims(n: Netlist, init: Configuration, inputs: Sequence[str],
                 max_steps: int = 10 ** 5) -> ClaimReport:
    """Drive the circuit and replay every traversal against the claims."""
    part = crossing_partition(n)
    config = init
    violations = []
    crossings = 0
    for i, port in enumerate(inputs):
        r = inject(n, config, port, max_steps, want_trace=True)
        bad = check_trace_claims(n, part, r.trace)
        violations += [f"input #{i} ({port}): {v}" for v in bad]
        crossings += sum(
            1 for s in r.trace.steps
            if part.side(("ein", s.element, s.in_port))
            != part.side(("eout", s.element, s.out_port)))
        config = r.configuration
    return ClaimReport(not violations, tuple(violations), len(inputs),
                       crossings)


# ---------------------------------------------------------------------------
# Refutation certificates
# ---------------------------------------------------------------------------

REFUTABLE_TARGETS = (3, 4, 17)


@dataclass(frozen=True)
class NotApplicable:
    reason: str


@dataclass(frozen=True)
class Divergence:
    start_state: int
    step: int               # first input index where outputs differ
    expected: str
    observed: str


@dataclass(frozen=True)
class Refutation:
    target: RlemId
    partition: CrossingPartition
    budget: int
    witness_inputs: tuple[int, ...]      # symbol indices driven into the circuit
    divergences: tuple[Divergence, ...]  # one per claimed start state

    @property
    def witness_length(self) -> int:
        return len(self.witness_inputs)


def driving_word(target_serial: int, periods: int) -> list[int]:
    """The input word whose required outputs alternate sides forever."""
    if target_serial in (3, 17):
        return [1, 1] * periods              # b b b b ...
    if target_serial == 4:
        return [1, 0] * periods              # b a b a ...
    raise RlemError(f"no driving word recorded for 2-{target_serial}")


def refute(n: Netlist, target: Union[MoveTable, int],
           state_map: Mapping[int, Configuration],
           in_map: Optional[Mapping[int, str]] = None,
           out_map: Optional[Mapping[int, str]] = None,
           max_steps: int = 10 ** 5
           ) -> Union[Refutation, NotApplicable]:
    """Certificate that the 2-2 circuit ``n`` does not simulate ``target``.

    The budget argument gives the bound; the certificate also carries an
    executed confirmation: from every claimed start state the circuit's
    outputs deviate from the target's within the witness word.  A claimed
    simulation surviving the witness would contradict the counting theorem
    and is escalated.
    """
    if isinstance(target, int):
        target = table(2, target)
    serial = target.serial
    if serial not in REFUTABLE_TARGETS:
        raise RlemError(f"refutation covers targets 2-3, 2-4, 2-17; "
                        f"got {target.name}")
    in_map = dict(in_map) if in_map else {0: "a", 1: "b"}
    out_map = dict(out_map) if out_map else {0: "s", 1: "t"}
    if set(in_map) != {0, 1} or set(out_map) != {0, 1}:
        return NotApplicable("input/output maps must cover symbols 0 and 1")
    if set(in_map.values()) != set(n.inputs) or \
            set(out_map.values()) != set(n.outputs):
        return NotApplicable("maps do not cover the circuit ports")
    if set(state_map) != {0, 1}:
        return NotApplicable("state map must cover target states 0 and 1")

    part = crossing_partition(n)
    budget = part.budget
    # budget + 1 crossing-consuming periods force the contradiction, plus one
    # period for the crossing-free transient a 2-4 run can open with
    word = driving_word(serial, budget + 2)
    out_names = {v: g for g, v in out_map.items()}

    divergences = []
    for q in (0, 1):
        expected = _element_outputs(target, q, word)
        config = state_map[q]
        div = None
        for i, sym in enumerate(word):
            r = inject(n, config, in_map[sym], max_steps, want_trace=False)
            config = r.configuration
            if out_names[r.output] != expected[i]:
                div = Divergence(q, i, out_map[expected[i]], r.output)
                break
        if div is None:
            raise InvariantViolation(
                f"circuit matched 2-{serial} from state {q} for "
                f"{len(word)} inputs, beyond the crossing budget {budget}")
        divergences.append(div)
    return Refutation(RlemId(2, serial), part, budget, tuple(word),
                      tuple(divergences))


def _element_outputs(t: MoveTable, state: int, word) -> list[int]:
    out = []
    for sym in word:
        state, g = t.move(state, sym)
        out.append(g)
    return out


# ---------------------------------------------------------------------------
# The recorded simulation/universality hierarchy
# ---------------------------------------------------------------------------

YES, NO, UNKNOWN = "yes", "no", "unknown"

_SIMULATES = {
    (3, 2): YES, (4, 2): YES, (17, 2): YES,     # 2-2 is the weakest
    (2, 3): NO, (2, 4): NO, (2, 17): NO,        # crossing-budget refutation
    (3, 4): NO, (3, 17): NO,                    # recorded results
    (4, 3): NO, (4, 17): NO,
}

_PAIR_UNIVERSAL = {frozenset({3, 4}), frozenset({3, 17}), frozenset({4, 17})}


@dataclass(frozen=True)
class HierarchyAnswer:
    verdict: str
    reason: str


class Hierarchy:
    """Recorded capability relations among 2-state elements.

    Facts combine the theorems this toolkit can re-check (census,
    feedback descent, refutation certificates) with recorded results on the
    four 2-symbol non-degenerate elements.
    """

    def universal(self, rid: Union[RlemId, str]) -> HierarchyAnswer:
        rid = RlemId.parse(rid) if isinstance(rid, str) else rid
        t = serial_to_table(rid)
        label = classify_degeneracy(t)
        canon = canonical_serial(t).serial
        if label.kind == Degeneracy.WIRES:
            return HierarchyAnswer(NO, "equivalent to plain wires: it has no "
                                       "usable state")
        if label.kind == Degeneracy.SMALLER:
            inner = self.universal(RlemId(label.reduced_k, label.reduced_serial))
            return HierarchyAnswer(inner.verdict,
                                   f"equivalent to {label.reduced_k}-"
                                   f"{label.reduced_serial}: {inner.reason}")
        if t.k >= 3:
            return HierarchyAnswer(YES, "non-degenerate with more than two "
                                        "symbols: universal by feedback descent")
        if canon in (2, 3, 4):
            return HierarchyAnswer(NO, f"2-{canon} is one of the three "
                                       f"non-universal 2-symbol elements")
        if canon == 17:
            return HierarchyAnswer(UNKNOWN, "universality of 2-17 is open")
        return HierarchyAnswer(UNKNOWN, "no fact recorded")

    def simulates(self, a: Union[RlemId, str], b: Union[RlemId, str]
                  ) -> HierarchyAnswer:
        a = RlemId.parse(a) if isinstance(a, str) else a
        b = RlemId.parse(b) if isinstance(b, str) else b
        ca = canonical_serial(serial_to_table(a))
        cb = canonical_serial(serial_to_table(b))
        if (ca.k, ca.serial) == (cb.k, cb.serial):
            return HierarchyAnswer(YES, "same element up to renaming")
        ua = self.universal(ca)
        if ua.verdict == YES:
            return HierarchyAnswer(YES, f"{ca} is universal, so it realizes "
                                        f"every reversible sequential machine")
        if ca.k == 2 and cb.k == 2:
            v = _SIMULATES.get((ca.serial, cb.serial))
            if v is not None:
                reason = {
                    YES: f"recorded: 2-{cb.serial} is buildable from "
                         f"2-{ca.serial}",
                    NO: f"recorded: no circuit of 2-{ca.serial} simulates "
                        f"2-{cb.serial}",
                }[v]
                return HierarchyAnswer(v, reason)
        return HierarchyAnswer(UNKNOWN, "no fact recorded for this pair")

    def pair_universal(self, a: Union[RlemId, str], b: Union[RlemId, str]
                       ) -> HierarchyAnswer:
        a = RlemId.parse(a) if isinstance(a, str) else a
        b = RlemId.parse(b) if isinstance(b, str) else b
        ca = canonical_serial(serial_to_table(a)).serial
        cb = canonical_serial(serial_to_table(b)).serial
        if a.k == b.k == 2 and frozenset({ca, cb}) in _PAIR_UNIVERSAL:
            return HierarchyAnswer(YES, "recorded: any two distinct elements "
                                        "of 2-3, 2-4, 2-17 are universal "
                                        "together")
        return HierarchyAnswer(UNKNOWN, "no fact recorded for this pair")

    def facts(self) -> list[tuple[str, str, str]]:
        """All recorded pairwise facts as (a, b, verdict) rows."""
        rows = [(f"2-{a}", f"2-{b}", v) for (a, b), v in
                sorted(_SIMULATES.items())]
        return rows


def hierarchy() -> Hierarchy:
    return Hierarchy()


# ---------------------------------------------------------------------------
# Random 2-2 circuits (for the statistical claim checks)
# ---------------------------------------------------------------------------

def random_two_two_circuit(rng, n_elements: int) -> Netlist:
    """A uniformly random valid 2-2 circuit with ports a, b / s, t."""
    from .circuits import Element
    two_two = table(2, 2)
    elements = tuple(Element(f"e{i}", two_two, rng.randrange(2))
                     for i in range(n_elements))
    us = [("in", "a"), ("in", "b")]
    vs = [("out", "s"), ("out", "t")]
    for e in elements:
        us += [("eout", e.ident, 0), ("eout", e.ident, 1)]
        vs += [("ein", e.ident, 0), ("ein", e.ident, 1)]
    shuffled = list(vs)
    rng.shuffle(shuffled)
    wiring = dict(zip(us, shuffled))
    return Netlist(elements, ("a", "b"), ("s", "t"), wiring)
