"""Compiling sequential machines into rotary-element circuits, and exhaustive
search for small element-to-element simulation circuits.

The compiler follows the classic column layout: one column per machine state,
one rotary element per output row plus a "bottom" element per column.  The
machine is in state q exactly when the bottom element of q's column holds H
and every other element holds V.  An input token probes columns left to
right (descend the column, bounce off an inactive bottom, restore, step
east); at the active column it erases the bottom, rides back up, and leaves
on a wire unique to that (state, input) crossing.  Because the move function
is completed to a bijection, each crossing wire feeds exactly one (state,
output) delivery point, which re-marks the target row, sets the target
bottom to H, and sends the token east to the output rail.

The search solver assigns wires, element types and initial states lazily
while replaying the target's transitions, so wirings that fail are abandoned
at the first divergence; exhausting the tree really does exhaust every
bijective wiring up to re-indexing of interchangeable elements.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from . import kernels
from .circuits import (Configuration, Counterexample, Element, Netlist,
                       validated, verify_simulation)
from .elements import (DIVERGENT, ROTARY_ELEMENT, Degeneracy, FeedbackSpec,
                       MoveTable, RangeError, RlemError, Rsm,
                       classify_degeneracy, feedback_reduce, is_reversible,
                       table_to_serial)

H, V = 0, 1
_N, _E, _S, _W = 0, 1, 2, 3      # rotary port order: n, e, s, w


# ---------------------------------------------------------------------------
# Machine -> rotary-element circuit
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SynthesizedRsm:
    netlist: Netlist
    state_map: dict
    in_map: dict
    out_map: dict
    layout: dict          # element id -> (column state, row label)
    source: Rsm

    def verify(self, max_steps=10 ** 6) -> Optional[Counterexample]:
        return verify_simulation(self.netlist, self.source, self.state_map,
                                 self.in_map, self.out_map, max_steps)


def _complete_to_bijection(m: Rsm):
    """Extend the move function to a bijection Q x padded-inputs -> Q x Gamma.

    Reversibility makes the set of unused (state, output) pairs exactly as
    large as the padding, so a greedy fill works.
    """
    rows = len(m.outputs)
    pad_inputs = list(m.inputs) + [f"_pad{i}" for i in range(rows - len(m.inputs))]
    used = set(m.move.values())
    free = [(q, g) for q in m.states for g in m.outputs
            if (q, g) not in used]
    free.reverse()
    full = dict(m.move)
    for q in m.states:
        for s in pad_inputs:
            if (q, s) not in full:
                full[(q, s)] = free.pop()
    return pad_inputs, full


def synthesize_rsm(m: Union[Rsm, MoveTable]) -> SynthesizedRsm:
    """Build a rotary-element-only circuit simulating the machine.

    Requires a reversible machine with |inputs| <= |outputs|.
    """
    if isinstance(m, MoveTable):
        m = m.to_rsm()
    if not is_reversible(m):
        raise RlemError("machine is not reversible; cannot synthesize")
    if len(m.inputs) > len(m.outputs):
        raise RlemError("|inputs| > |outputs| contradicts reversibility")

    rows = len(m.outputs)
    cols = len(m.states)
    pad_inputs, full = _complete_to_bijection(m)
    sidx = {s: i for i, s in enumerate(pad_inputs)}
    gidx = {g: i for i, g in enumerate(m.outputs)}
    # port names: the machine's symbols, prefixed when the alphabets overlap
    if set(pad_inputs) & set(m.outputs):
        in_port = {s: f"i_{s}" for s in pad_inputs}
        out_port = {g: f"o_{g}" for g in m.outputs}
    else:
        in_port = {s: s for s in pad_inputs}
        out_port = {g: g for g in m.outputs}

    def rid(j, i):
        return f"c{j}r{i}"

    def bid(j):
        return f"c{j}b"

    elements = []
    layout = {}
    for j, q in enumerate(m.states):
        for i in range(rows):
            elements.append(Element(rid(j, i), ROTARY_ELEMENT, V))
            layout[rid(j, i)] = (q, m.outputs[i])
        elements.append(Element(bid(j), ROTARY_ELEMENT, V))
        layout[bid(j)] = (q, "bottom")

    wiring = {}
    for j in range(cols):
        # down rail, up rail, bounce loop, found-return, top-exit-to-bottom
        for i in range(rows - 1):
            wiring[("eout", rid(j, i), _S)] = ("ein", rid(j, i + 1), _N)
            wiring[("eout", rid(j, i + 1), _N)] = ("ein", rid(j, i), _S)
        wiring[("eout", rid(j, rows - 1), _S)] = ("ein", bid(j), _N)
        wiring[("eout", bid(j), _N)] = ("ein", rid(j, rows - 1), _S)
        wiring[("eout", bid(j), _S)] = ("ein", bid(j), _S)
        wiring[("eout", bid(j), _W)] = ("ein", rid(j, 0), _N)
        wiring[("eout", rid(j, 0), _N)] = ("ein", bid(j), _E)
        wiring[("eout", bid(j), _E)] = ("ein", bid(j), _W)   # dead pair
    # row rails: probe west-to-east, then out
    input_ports = tuple(in_port[s] for s in pad_inputs)
    output_ports = tuple(out_port[g] for g in m.outputs)
    for i in range(rows):
        wiring[("in", input_ports[i])] = ("ein", rid(0, i), _W)
        for j in range(cols - 1):
            wiring[("eout", rid(j, i), _E)] = ("ein", rid(j + 1, i), _W)
        wiring[("eout", rid(cols - 1, i), _E)] = ("out", output_ports[i])
    # crossing (state j, input s) -> delivery at (state of image, output row)
    qidx = {q: j for j, q in enumerate(m.states)}
    for (q, s), (q2, g) in full.items():
        wiring[("eout", rid(qidx[q], sidx[s]), _W)] = \
            ("ein", rid(qidx[q2], gidx[g]), _E)

    netlist = validated(Netlist(tuple(elements), input_ports,
                                output_ports, wiring))

    def config_for(q):
        st = {e.ident: V for e in elements}
        st[bid(qidx[q])] = H
        return Configuration(st)

    built = SynthesizedRsm(
        netlist=netlist,
        state_map={q: config_for(q) for q in m.states},
        in_map={s: in_port[s] for s in m.inputs},
        out_map={g: out_port[g] for g in m.outputs},
        layout=layout,
        source=m,
    )
    bad = built.verify()
    assert bad is None, f"synthesis self-check failed: {bad}"
    return built


# ---------------------------------------------------------------------------
# Exhaustive search for simulation circuits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Exhausted:
    bound: int
    nodes: int = 0


@dataclass(frozen=True)
class SearchResult:
    netlist: Netlist
    state_map: dict
    in_map: dict
    out_map: dict
    element_count: int
    nodes: int


def _result_netlist(target_k, parts, etype, wiring, v0, v1):
    ins = tuple(f"x{s}" for s in range(target_k))
    outs = tuple(f"y{g}" for g in range(target_k))
    elements = tuple(Element(f"e{e}", parts[t], v0[e])
                     for e, t in enumerate(etype))
    full = {}
    for u, v in wiring.items():
        uu = ("in", ins[u[1]]) if u[0] == "in" else ("eout", f"e{u[1]}", u[2])
        vv = ("out", outs[v[1]]) if v[0] == "out" else ("ein", f"e{v[1]}", v[2])
        full[uu] = vv
    # pair leftover ports (never visited by any verified trajectory)
    used_u = set(full)
    used_v = set(full.values())
    spare_u = [("in", nm) for nm in ins if ("in", nm) not in used_u]
    spare_u += [("eout", el.ident, j) for el in elements
                for j in range(el.n_outputs)
                if ("eout", el.ident, j) not in used_u]
    spare_v = [("out", nm) for nm in outs if ("out", nm) not in used_v]
    spare_v += [("ein", el.ident, j) for el in elements
                for j in range(el.n_inputs)
                if ("ein", el.ident, j) not in used_v]
    for u, v in zip(spare_u, spare_v):
        full[u] = v
    net = validated(Netlist(elements, ins, outs, full))
    state_map = {
        0: Configuration({f"e{e}": v0[e] for e in range(len(etype))}),
        1: Configuration({f"e{e}": v1[e] for e in range(len(etype))}),
    }
    in_map = {s: ins[s] for s in range(target_k)}
    out_map = {g: outs[g] for g in range(target_k)}
    return net, state_map, in_map, out_map


def search_circuit(target: MoveTable, parts: Sequence[MoveTable],
                   max_elems: int, max_steps: int = 10 ** 4
                   ) -> Union[SearchResult, Exhausted]:
    """Smallest circuit of ``parts`` simulating ``target``, or Exhausted.

    Exhaustive and deterministic: element caps are tried in ascending order
    and the solver's branch order fixes which circuit is reported first.
    Every returned netlist has passed verify_simulation.
    """
    if max_elems < 1:
        raise RangeError("max_elems must be >= 1")
    if not parts:
        raise RlemError("no part types given")
    part_tuples = [(p.k, p.entries) for p in parts]
    pmax = max(p.k for p in parts)
    total_nodes = 0
    for cap in range(1, max_elems + 1):
        # a token never revisits a (configuration, vertex) pair, so no valid
        # trajectory outruns this structural bound; clamping keeps the
        # compiled solver's trail finite without changing any outcome
        structural = (1 << min(cap, 20)) * (2 * target.k + cap * pmax) + 2
        eff_steps = min(max_steps, structural)
        got, nodes = kernels.solve_search(target.k, target.entries,
                                          part_tuples, cap, eff_steps)
        total_nodes += nodes
        if got is None:
            continue
        etype, wiring, v0, v1 = got
        net, state_map, in_map, out_map = _result_netlist(
            target.k, list(parts), etype, wiring, v0, v1)
        bad = verify_simulation(net, target, state_map, in_map, out_map,
                                max_steps)
        assert bad is None, f"search returned a non-verifying circuit: {bad}"
        return SearchResult(net, state_map, in_map, out_map,
                            len(etype), total_nodes)
    return Exhausted(max_elems, total_nodes)


# ---------------------------------------------------------------------------
# Universality chains (feedback descent towards 3 symbols, then the library)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChainLink:
    k: int
    serial: int
    feedback: Optional[FeedbackSpec]      # spec used to reach this link


@dataclass(frozen=True)
class ChainReport:
    links: tuple[ChainLink, ...]
    base_verified: bool                   # simulation down to the rotary element
    base_note: str


class ChainError(RlemError):
    """A non-degenerate element yielded no non-degenerate residual: that
    contradicts the descent guarantee and is always an implementation bug."""


def universality_chain(t: MoveTable,
                       constructions_dir: Optional[str] = None) -> ChainReport:
    """Witness chain of feedback reductions from ``t`` down to 3 symbols.

    Rejects degenerate or 2-symbol inputs.  The final hop to the rotary
    element is reported verified only when a stored construction for the
    terminal 3-symbol element exists and checks out.
    """
    if t.k < 3:
        raise RangeError("universality chain needs k >= 3")
    if classify_degeneracy(t).kind != Degeneracy.NONDEGENERATE:
        raise RlemError(f"element {t.name} is degenerate; the descent "
                        "guarantee does not apply")
    links = [ChainLink(t.k, table_to_serial(t).serial, None)]
    cur = t
    while cur.k > 3:
        found = None
        for o in range(cur.k):
            for i in range(cur.k):
                spec = FeedbackSpec(o, i)
                red = feedback_reduce(cur, spec)
                if red is not DIVERGENT and \
                        classify_degeneracy(red).kind == Degeneracy.NONDEGENERATE:
                    found = (spec, red)
                    break
            if found:
                break
        if not found:
            raise ChainError(f"no non-degenerate residual for {cur.name}")
        spec, cur = found
        links.append(ChainLink(cur.k, table_to_serial(cur).serial, spec))
    verified, note = _base_link_status(cur, constructions_dir)
    return ChainReport(tuple(links), verified, note)


def _base_link_status(t3: MoveTable, constructions_dir):
    name = t3.name
    if constructions_dir:
        path = _construction_path(constructions_dir, "4-289", [name])
        if os.path.exists(path):
            try:
                net, maps = load_construction(path)
                bad = verify_simulation(net, ROTARY_ELEMENT, *maps)
                if bad is None:
                    return True, f"rotary element built from {name} " \
                                 f"({os.path.basename(path)})"
                return False, f"stored construction {path} fails: {bad}"
            except RlemError as err:
                return False, f"stored construction unreadable: {err}"
    return False, (f"descent ends at non-degenerate {name}; no stored "
                   f"simulation of the rotary element by {name}")


# ---------------------------------------------------------------------------
# Construction library (netlists persisted by the search, or user supplied)
# ---------------------------------------------------------------------------

def _construction_path(directory, target_name, part_names):
    fname = f"{target_name}__from__{'_'.join(part_names)}.ckt"
    return os.path.join(directory, fname)


def save_construction(directory: str, target: MoveTable,
                      parts: Sequence[MoveTable], result: SearchResult) -> str:
    """Persist a found circuit with its maps as comments + netlist text."""
    from .circuits import format_netlist
    os.makedirs(directory, exist_ok=True)
    path = _construction_path(directory, target.name,
                              [p.name for p in parts])
    lines = [f"# target {target.name}",
             f"# parts {' '.join(p.name for p in parts)}"]
    for q, cfg in sorted(result.state_map.items()):
        enc = ",".join(f"{k}={v}" for k, v in sorted(cfg.states.items()))
        lines.append(f"# state {q} {enc}")
    body = format_netlist(result.netlist)
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n" + body)
    return path


def load_construction(path: str):
    """Read a stored construction; returns (netlist, (state_map, in_map, out_map))."""
    from .circuits import parse_netlist
    with open(path) as fh:
        text = fh.read()
    states = {}
    target_name = None
    for line in text.splitlines():
        if line.startswith("# state "):
            _, _, q, enc = line.split(None, 3)
            states[int(q)] = Configuration(
                {kv.split("=")[0]: int(kv.split("=")[1])
                 for kv in enc.split(",")})
        elif line.startswith("# target "):
            target_name = line.split()[2]
    net = parse_netlist(text)
    if not states:
        raise RlemError(f"{path}: no state map comments")
    k = len(net.inputs)
    in_map = {s: net.inputs[s] for s in range(k)}
    out_map = {g: net.outputs[g] for g in range(len(net.outputs))}
    return net, (states, in_map, out_map)
