"""Two-state reversible logic elements with memory, and general reversible
sequential machines.

A 2-state k-symbol element is a bijection on the 2k (state, symbol) pairs.
Domain position ``q*k + s`` encodes "in state q, input symbol s"; the stored
code ``q2*k + g`` encodes "go to state q2, emit output symbol g".  Elements
are numbered by the lexicographic rank of that code sequence, written
``k-N`` (so the table (0,1,4,5,2,3,7,6) is 4-289).  Two elements are
equivalent when one is a renaming of the other (swap the states and/or
permute input and output symbols); the class representative is the smallest
serial in the class.

Degenerate elements are those equivalent to plain connecting wires, or to an
element with fewer symbols once pass-through lines are stripped; everything
else is non-degenerate.  Census of the classes for k = 2, 3, 4 gives
8/24/82 classes of which 4/14/55 are non-degenerate.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import permutations
from math import factorial
from typing import Iterator, Mapping, Optional, Union

from . import kernels


class RlemError(Exception):
    """Base for all toolkit errors."""


class RangeError(RlemError):
    pass


class ArityError(RlemError):
    pass


class ParseError(RlemError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = "" if line is None else f" (line {line}" + (
            "" if column is None else f", column {column}") + ")"
        super().__init__(message + where)


# ---------------------------------------------------------------------------
# Reversible sequential machines
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Rsm:
    """A Mealy machine (Q, Sigma, Gamma, move); reversible iff move is injective.

    ``move`` must be total on Q x Sigma.  Construction rejects partial or
    ill-typed tables; injectivity is a separate query (`is_reversible`)
    because non-reversible machines are still useful as counterexamples.
    """

    states: tuple[str, ...]
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    move: Mapping[tuple[str, str], tuple[str, str]]

    def __post_init__(self):
        if len(set(self.states)) != len(self.states):
            raise RlemError("duplicate state names")
        if len(set(self.inputs)) != len(self.inputs) or \
                len(set(self.outputs)) != len(self.outputs):
            raise RlemError("duplicate symbol names")
        need = {(q, s) for q in self.states for s in self.inputs}
        if set(self.move) != need:
            missing = sorted(need - set(self.move))[:3]
            extra = sorted(set(self.move) - need)[:3]
            raise RlemError(
                f"move function not total on Q x Sigma (missing {missing}, "
                f"stray {extra})")
        for (q, s), (q2, g) in self.move.items():
            if q2 not in self.states or g not in self.outputs:
                raise RlemError(f"move({q},{s}) -> ({q2},{g}) leaves the machine")
        object.__setattr__(self, "move", dict(self.move))

    def __hash__(self):
        return hash((self.states, self.inputs, self.outputs,
                     tuple(sorted(self.move.items()))))

    def __eq__(self, other):
        if not isinstance(other, Rsm):
            return NotImplemented
        return (self.states, self.inputs, self.outputs, self.move) == \
            (other.states, other.inputs, other.outputs, other.move)


def is_reversible(machine: Rsm) -> bool:
    """True iff no two (state, input) pairs share a (state, output) image."""
    images = list(machine.move.values())
    return len(set(images)) == len(images)


# ---------------------------------------------------------------------------
# Move tables (2-state k-symbol elements)
# ---------------------------------------------------------------------------

def _input_names(k: int) -> tuple[str, ...]:
    if k <= 4:
        return tuple("abcd"[:k])
    return tuple(f"a{i + 1}" for i in range(k))


def _output_names(k: int) -> tuple[str, ...]:
    if k <= 4:
        return tuple("stuv"[:k])
    return tuple(f"s{i + 1}" for i in range(k))


@dataclass(frozen=True)
class MoveTable:
    """A 2-state k-symbol element as a permutation of 0..2k-1."""

    k: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.k < 1:
            raise RlemError("symbol count must be >= 1")
        object.__setattr__(self, "entries", tuple(self.entries))
        if sorted(self.entries) != list(range(2 * self.k)):
            raise RlemError(
                f"entries must be a permutation of 0..{2 * self.k - 1}, "
                f"got {self.entries}")

    def move(self, state: int, symbol: int) -> tuple[int, int]:
        code = self.entries[state * self.k + symbol]
        return divmod(code, self.k)

    def inverse_move(self, state: int, symbol: int) -> tuple[int, int]:
        code = self.entries.index(state * self.k + symbol)
        return divmod(code, self.k)

    @property
    def serial(self) -> int:
        return kernels.rank_permutation(self.entries)

    @property
    def name(self) -> str:
        return f"{self.k}-{self.serial}"

    def changes_state(self, state: int, symbol: int) -> bool:
        return self.move(state, symbol)[0] != state

    def to_rsm(self) -> Rsm:
        ins, outs = _input_names(self.k), _output_names(self.k)
        move = {}
        for q in range(2):
            for s in range(self.k):
                q2, g = self.move(q, s)
                move[(f"q{q}", ins[s])] = (f"q{q2}", outs[g])
        return Rsm(("q0", "q1"), ins, outs, move)


@dataclass(frozen=True)
class RlemId:
    """Element number ``k-serial`` under the lexicographic table ordering."""

    k: int
    serial: int

    def __post_init__(self):
        if self.k < 1:
            raise RangeError("symbol count must be >= 1")
        if not 0 <= self.serial < factorial(2 * self.k):
            raise RangeError(
                f"serial {self.serial} out of range for k={self.k} "
                f"(must be < {factorial(2 * self.k)})")

    def __str__(self):
        return f"{self.k}-{self.serial}"

    @classmethod
    def parse(cls, text: str) -> "RlemId":
        m = re.fullmatch(r"(\d+)-(\d+)", text.strip())
        if not m:
            raise ParseError(f"not an element id: {text!r} (expected K-N)")
        return cls(int(m.group(1)), int(m.group(2)))


def serial_to_table(rlem_id: Union[RlemId, tuple[int, int]]) -> MoveTable:
    """Table whose entry sequence has lexicographic rank ``serial``."""
    if isinstance(rlem_id, tuple):
        rlem_id = RlemId(*rlem_id)
    return MoveTable(rlem_id.k, kernels.unrank_permutation(2 * rlem_id.k,
                                                           rlem_id.serial))


def table_to_serial(table: MoveTable) -> RlemId:
    return RlemId(table.k, kernels.rank_permutation(table.entries))


def table(k: int, serial: int) -> MoveTable:
    """Shorthand: the move table of element k-serial."""
    return serial_to_table(RlemId(k, serial))


#: The rotary element: 2 states H (0) and V (1); ports in order n,e,s,w.
#: A token parallel to the bar passes straight through; an orthogonal one
#: turns right and rotates the bar.  Equivalent to element 4-289.
ROTARY_ELEMENT = MoveTable(4, (7, 3, 5, 1, 6, 0, 4, 2))

ROTARY_INPUTS = ("n", "e", "s", "w")
ROTARY_OUTPUTS = ("n'", "e'", "s'", "w'")


# ---------------------------------------------------------------------------
# Renamings (the equivalence group, order 2 * (k!)^2)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Renaming:
    """Swap the two states and/or permute input and output symbols."""

    state_swap: bool
    input_perm: tuple[int, ...]
    output_perm: tuple[int, ...]

    def __post_init__(self):
        k = len(self.input_perm)
        if sorted(self.input_perm) != list(range(k)) or \
                sorted(self.output_perm) != list(range(k)):
            raise RlemError("renaming permutations must cover 0..k-1")

    @classmethod
    def identity(cls, k: int) -> "Renaming":
        return cls(False, tuple(range(k)), tuple(range(k)))

    def inverse(self) -> "Renaming":
        k = len(self.input_perm)
        inv_in = [0] * k
        inv_out = [0] * k
        for i, p in enumerate(self.input_perm):
            inv_in[p] = i
        for i, p in enumerate(self.output_perm):
            inv_out[p] = i
        return Renaming(self.state_swap, tuple(inv_in), tuple(inv_out))

    def compose(self, first: "Renaming") -> "Renaming":
        """Renaming equal to applying ``first`` then ``self``."""
        return Renaming(
            self.state_swap != first.state_swap,
            tuple(self.input_perm[p] for p in first.input_perm),
            tuple(self.output_perm[p] for p in first.output_perm))


def apply_renaming(renaming: Renaming, t: MoveTable) -> MoveTable:
    if len(renaming.input_perm) != t.k:
        raise ArityError("renaming arity differs from table arity")
    return MoveTable(t.k, kernels.apply_renaming(
        t.entries, t.k, renaming.state_swap,
        renaming.input_perm, renaming.output_perm))


def all_renamings(k: int) -> Iterator[Renaming]:
    """The full renaming group in a fixed deterministic order."""
    perms = list(permutations(range(k)))
    for swap in (False, True):
        for pin in perms:
            for pout in perms:
                yield Renaming(swap, pin, pout)


def find_renaming(t1: MoveTable, t2: MoveTable) -> Optional[Renaming]:
    """A renaming taking t1 to t2, or None; first match in group order."""
    if t1.k != t2.k:
        raise ArityError(f"cannot compare a {t1.k}-symbol table with a "
                         f"{t2.k}-symbol one")
    for r in all_renamings(t1.k):
        if apply_renaming(r, t1).entries == t2.entries:
            return r
    return None


def canonical_serial(t: MoveTable) -> RlemId:
    """Smallest serial over the renaming orbit of ``t``."""
    return RlemId(t.k, kernels.orbit_serials(t.entries, t.k)[0])


# ---------------------------------------------------------------------------
# Degeneracy
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Degeneracy:
    """Classification: non-degenerate, wire-equivalent, or reducible to a
    smaller element (with the residual's symbol count and canonical serial)."""

    kind: str                      # "nondegenerate" | "wires" | "smaller"
    reduced_k: Optional[int] = None
    reduced_serial: Optional[int] = None

    NONDEGENERATE = "nondegenerate"
    WIRES = "wires"
    SMALLER = "smaller"

    @classmethod
    def nondegenerate(cls):
        return cls(cls.NONDEGENERATE)

    @classmethod
    def wires(cls):
        return cls(cls.WIRES)

    @classmethod
    def smaller(cls, k: int, serial: int):
        return cls(cls.SMALLER, k, serial)

    def __str__(self):
        if self.kind == self.SMALLER:
            return f"eq-to-{self.reduced_k}-{self.reduced_serial}"
        return {self.NONDEGENERATE: "non-degenerate",
                self.WIRES: "eq-to-wires"}[self.kind]


def _never_changes_state(entries, k):
    return all(c // k == j // k for j, c in enumerate(entries))


def _states_indistinguishable(entries, k):
    # 2 states: Mealy-equivalent iff the output rows agree on every input
    # (any successor pair then lies inside the candidate class).
    return all(entries[s] % k == entries[k + s] % k for s in range(k))


def _wire_lines(entries, k):
    """Pass-through lines: input s always emits g without a state change."""
    lines = []
    for s in range(k):
        c0, c1 = entries[s], entries[k + s]
        if c0 // k == 0 and c1 // k == 1 and c0 % k == c1 % k:
            lines.append((s, c0 % k))
    return lines


def _strip_wires(entries, k):
    lines = _wire_lines(entries, k)
    if not lines:
        return entries, k
    keep_in = [s for s in range(k) if s not in {s for s, _ in lines}]
    keep_out = [g for g in range(k) if g not in {g for _, g in lines}]
    k2 = len(keep_in)
    omap = {g: i for i, g in enumerate(keep_out)}
    out = []
    for q in range(2):
        for s in keep_in:
            c = entries[q * k + s]
            out.append((c // k) * k2 + omap[c % k])
    return tuple(out), k2


def classify_degeneracy(t: MoveTable) -> Degeneracy:
    """Wire-equivalence, reduction to fewer symbols, or non-degeneracy.

    The label is a class invariant: every test here is preserved by
    renaming, and residuals of renamed tables are renamings of each other.
    """
    e, k = t.entries, t.k
    if _never_changes_state(e, k) or _states_indistinguishable(e, k):
        return Degeneracy.wires()
    res, k2 = _strip_wires(e, k)
    if k2 <= 1:
        return Degeneracy.wires()
    if _never_changes_state(res, k2) or _states_indistinguishable(res, k2):
        return Degeneracy.wires()
    if k2 < k:
        ser = canonical_serial(MoveTable(k2, res)).serial
        return Degeneracy.smaller(k2, ser)
    return Degeneracy.nondegenerate()


# ---------------------------------------------------------------------------
# Census
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Census:
    k: int
    total: int
    class_serials: tuple[int, ...]          # canonical representative serials
    nondegenerate_serials: tuple[int, ...]

    @property
    def class_count(self) -> int:
        return len(self.class_serials)

    @property
    def nondegenerate_count(self) -> int:
        return len(self.nondegenerate_serials)


def census(k: int) -> Census:
    """Partition all (2k)! tables into renaming classes and classify them.

    Each class is generated once from its least unvisited serial by applying
    the whole renaming group, so the cost is #classes * 2*(k!)^2 ranks.
    """
    total = factorial(2 * k)
    seen = bytearray(total)
    reps = []
    nondeg = []
    for serial in range(total):
        if seen[serial]:
            continue
        t = serial_to_table(RlemId(k, serial))
        for s in kernels.orbit_serials(t.entries, k):
            seen[s] = 1
        reps.append(serial)
        if classify_degeneracy(t).kind == Degeneracy.NONDEGENERATE:
            nondeg.append(serial)
    return Census(k, total, tuple(reps), tuple(nondeg))


def nondegenerate_representatives(k: int) -> tuple[MoveTable, ...]:
    return tuple(serial_to_table(RlemId(k, s))
                 for s in census(k).nondegenerate_serials)


# ---------------------------------------------------------------------------
# Feedback reduction (k-symbol element -> (k-1)-symbol element)
# ---------------------------------------------------------------------------

class _Divergent:
    """Outcome of a feedback loop that re-feeds forever."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "DIVERGENT"


DIVERGENT = _Divergent()


@dataclass(frozen=True)
class FeedbackSpec:
    """Connect output line ``out_index`` back into input line ``in_index``."""

    out_index: int
    in_index: int


def feedback_reduce(t: MoveTable, fb: FeedbackSpec):
    """Close one output onto one input, yielding a (k-1)-symbol table.

    Whenever the fed-back output is emitted the token is re-injected on the
    fed-back input.  With two states a re-feed chain longer than two visits
    must revisit a state, which means it never leaves the loop: the whole
    reduction is then DIVERGENT.
    """
    k = t.k
    if k < 2:
        raise RangeError("feedback reduction needs at least 2 symbols")
    if not (0 <= fb.out_index < k and 0 <= fb.in_index < k):
        raise RangeError(f"feedback indices out of range for k={k}")
    keep_in = [s for s in range(k) if s != fb.in_index]
    keep_out = [g for g in range(k) if g != fb.out_index]
    omap = {g: i for i, g in enumerate(keep_out)}
    k2 = k - 1
    entries = [0] * (2 * k2)
    for q in range(2):
        for pos, s in enumerate(keep_in):
            state, sym = q, s
            refed = set()
            while True:
                state, g = t.move(state, sym)
                if g != fb.out_index:
                    break
                if state in refed:
                    return DIVERGENT
                refed.add(state)
                sym = fb.in_index
            entries[q * k2 + pos] = state * k2 + omap[g]
    # reversibility of the source forces the residual to stay a bijection
    assert sorted(entries) == list(range(2 * k2)), \
        f"feedback residual is not a permutation: {entries}"
    return MoveTable(k2, tuple(entries))


def feedback_survey(t: MoveTable) -> list[tuple[FeedbackSpec, object]]:
    """Classify the residual of every one of the k*k feedback choices.

    Entries are (spec, Degeneracy) or (spec, DIVERGENT).  For every
    non-degenerate input with k > 2 at least one entry is non-degenerate;
    the test suite enforces that guarantee over all representatives.
    """
    if t.k < 3:
        raise RangeError("survey needs at least 3 symbols")
    out = []
    for o in range(t.k):
        for i in range(t.k):
            spec = FeedbackSpec(o, i)
            red = feedback_reduce(t, spec)
            if red is DIVERGENT:
                out.append((spec, DIVERGENT))
            else:
                out.append((spec, classify_degeneracy(red)))
    return out


# ---------------------------------------------------------------------------
# Text form
# ---------------------------------------------------------------------------

def parse_table(text: str) -> MoveTable:
    """Parse ``rlem k=<k> perm=<c0>,...`` or the short form ``K-N``."""
    text = text.strip()
    m = re.fullmatch(r"rlem\s+k=(\d+)\s+perm=([\d,]+)", text)
    if m:
        k = int(m.group(1))
        entries = tuple(int(x) for x in m.group(2).split(","))
        if len(entries) != 2 * k:
            raise ParseError(f"expected {2 * k} codes, got {len(entries)}")
        return MoveTable(k, entries)
    if re.fullmatch(r"\d+-\d+", text):
        return serial_to_table(RlemId.parse(text))
    raise ParseError(f"not a move table: {text!r}")


def format_table(t: MoveTable) -> str:
    return f"rlem k={t.k} perm=" + ",".join(str(c) for c in t.entries)


def parse_rsm(text: str) -> Rsm:
    """Line format: ``states``/``inputs``/``outputs`` headers, then one
    ``move q a -> q2 b`` line per transition."""
    states = inputs = outputs = None
    move = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if parts[0] == "states":
            states = tuple(parts[1:])
        elif parts[0] == "inputs":
            inputs = tuple(parts[1:])
        elif parts[0] == "outputs":
            outputs = tuple(parts[1:])
        elif parts[0] == "move":
            m = re.fullmatch(r"move\s+(\S+)\s+(\S+)\s*->\s*(\S+)\s+(\S+)", line)
            if not m:
                raise ParseError("bad move line (want: move q a -> q2 b)",
                                 lineno)
            move[(m.group(1), m.group(2))] = (m.group(3), m.group(4))
        else:
            raise ParseError(f"unknown directive {parts[0]!r}", lineno)
    if not (states and inputs and outputs):
        raise ParseError("missing states/inputs/outputs header")
    try:
        return Rsm(states, inputs, outputs, move)
    except RlemError as err:
        raise ParseError(str(err)) from None


def format_rsm(m: Rsm) -> str:
    lines = ["states " + " ".join(m.states),
             "inputs " + " ".join(m.inputs),
             "outputs " + " ".join(m.outputs)]
    for q in m.states:
        for s in m.inputs:
            q2, g = m.move[(q, s)]
            lines.append(f"move {q} {s} -> {q2} {g}")
    return "\n".join(lines) + "\n"


def render_table(t: MoveTable) -> str:
    """ASCII rendering: one block per state; '=>' marks a state change
    (solid line), '->' a transition that keeps the state (dotted line)."""
    ins, outs = _input_names(t.k), _output_names(t.k)
    lines = [f"element {t.name}  ({format_table(t)})"]
    for q in range(2):
        lines.append(f"state q{q}:")
        for s in range(t.k):
            q2, g = t.move(q, s)
            arrow = "=>" if q2 != q else "->"
            lines.append(f"  {ins[s]} {arrow} {outs[g]}"
                         + (f"  [to q{q2}]" if q2 != q else ""))
    return "\n".join(lines)
