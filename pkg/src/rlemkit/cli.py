"""Command-line interface.

Every command prints a line-oriented ``key: value`` report.  ``--format
records`` strips it to the bare payload (byte-identical across runs);
``plain`` adds the elapsed time.  Exit status 0 means the domain result was
a success (verification passed, a circuit was found, the certificate was
produced); 1 a legitimate negative result; 2 a usage or input error.
"""

from __future__ import annotations

import argparse
import sys
import time

from . import __version__
from .analysis import NotApplicable, hierarchy, refute
from .circuits import (Configuration, format_netlist, parse_netlist,
                       run_sequence, verify_simulation)
from .elements import (DIVERGENT, MoveTable, ParseError, RlemError, census,
                       classify_degeneracy, feedback_survey, find_renaming,
                       format_rsm, format_table, parse_rsm, parse_table,
                       render_table)
from .kernels import backend_name
from .synthesis import (Exhausted, save_construction, search_circuit,
                        synthesize_rsm)
from .turing import (check_rtm, compile_to_re, cross_validate, format_rtm,
                     interpret, parse_rtm)


class _Report:
    def __init__(self, command, params):
        self.command = command
        self.params = params
        self.rows = []
        self.status = 0

    def add(self, key, value):
        self.rows.append((key, value))

    def emit(self, fmt, elapsed):
        lines = []
        if fmt == "plain":
            lines.append(f"command: {self.command}")
            if self.params:
                lines.append(f"parameters: {self.params}")
        for k, v in self.rows:
            lines.append(f"{k}: {v}")
        if fmt == "plain":
            lines.append(f"elapsed_ms: {elapsed:.1f}")
            lines.append(f"version: {__version__} ({backend_name()} kernels)")
        print("\n".join(lines))
        return self.status


def _read(path):
    with open(path) as fh:
        return fh.read()


def _load_circuit(path):
    text = _read(path)
    net = parse_netlist(text)
    state_maps = _state_comments(text)
    return net, state_maps


def _state_comments(text):
    maps = {}
    for line in text.splitlines():
        if line.startswith("# state "):
            _, _, q, enc = line.split(None, 3)
            maps[q] = Configuration({kv.split("=")[0]: int(kv.split("=")[1])
                                     for kv in enc.split(",")})
    return maps


def _target_table(spec) -> MoveTable:
    return parse_table(spec)


# -- commands ----------------------------------------------------------------

def cmd_census(args, rep):
    c = census(args.k)
    rep.add("k", c.k)
    rep.add("total", c.total)
    rep.add("classes", c.class_count)
    rep.add("nondegenerate", c.nondegenerate_count)
    rep.add("nondegenerate_serials",
            " ".join(str(s) for s in c.nondegenerate_serials))
    if args.list_classes:
        rep.add("class_serials", " ".join(str(s) for s in c.class_serials))


def cmd_show(args, rep):
    t = _target_table(args.element)
    rep.add("element", t.name)
    rep.add("table", format_table(t))
    for line in render_table(t).splitlines():
        rep.add("render", line)


def cmd_equiv(args, rep):
    t1, t2 = _target_table(args.a), _target_table(args.b)
    r = find_renaming(t1, t2)
    rep.add("a", t1.name)
    rep.add("b", t2.name)
    rep.add("equivalent", "yes" if r else "no")
    if r:
        rep.add("state_swap", r.state_swap)
        rep.add("input_perm", ",".join(map(str, r.input_perm)))
        rep.add("output_perm", ",".join(map(str, r.output_perm)))
    else:
        rep.status = 1


def cmd_classify(args, rep):
    t = _target_table(args.element)
    label = classify_degeneracy(t)
    rep.add("element", t.name)
    rep.add("classification", str(label))
    from .elements import canonical_serial
    rep.add("canonical", str(canonical_serial(t)))


def cmd_feedback(args, rep):
    t = _target_table(args.element)
    rep.add("element", t.name)
    best = None
    for spec, label in feedback_survey(t):
        if label is DIVERGENT:
            desc = "divergent"
        else:
            desc = str(label)
            if label.kind == label.NONDEGENERATE and best is None:
                best = spec
        rep.add(f"feedback out={spec.out_index} in={spec.in_index}", desc)
    rep.add("nondegenerate_residual_exists", "yes" if best else "no")


def cmd_synth_rsm(args, rep):
    m = parse_rsm(_read(args.file))
    built = synthesize_rsm(m)
    rep.add("states", len(m.states))
    rep.add("inputs", len(m.inputs))
    rep.add("outputs", len(m.outputs))
    rep.add("elements", len(built.netlist.elements))
    rep.add("verified", "yes")
    if args.output:
        body = format_netlist(built.netlist)
        head = []
        for q in m.states:
            enc = ",".join(f"{k}={v}" for k, v in
                           sorted(built.state_map[q].states.items()))
            head.append(f"# state {q} {enc}")
        with open(args.output, "w") as fh:
            fh.write("\n".join(head) + "\n" + body)
        rep.add("written", args.output)


def cmd_run(args, rep):
    net, _ = _load_circuit(args.circuit)
    config = net.initial_configuration()
    word = args.inputs.split(",") if args.inputs else []
    r = run_sequence(net, config, word, max_steps=args.max_steps)
    rep.add("inputs", ",".join(word))
    rep.add("outputs", ",".join(r.outputs))
    enc = ",".join(f"{k}={v}" for k, v in sorted(r.configuration.states.items()))
    rep.add("final_states", enc or "none")


def cmd_verify(args, rep):
    net, maps = _load_circuit(args.circuit)
    target = _target_table(args.target)
    if not maps:
        rep.add("error", "circuit file carries no '# state' comments")
        rep.status = 2
        return
    state_map = {int(q): cfg for q, cfg in maps.items()}
    in_map = {s: net.inputs[s] for s in range(target.k)}
    out_map = {g: net.outputs[g] for g in range(target.k)}
    bad = verify_simulation(net, target, state_map, in_map, out_map,
                            max_steps=args.max_steps)
    rep.add("target", target.name)
    rep.add("verified", "yes" if bad is None else "no")
    if bad is not None:
        rep.add("counterexample", str(bad))
        rep.status = 1


def cmd_search(args, rep):
    target = _target_table(args.target)
    parts = [_target_table(p) for p in args.parts.split(",")]
    got = search_circuit(target, parts, args.max_elems,
                         max_steps=args.max_steps)
    rep.add("target", target.name)
    rep.add("parts", " ".join(p.name for p in parts))
    rep.add("bound", args.max_elems)
    if isinstance(got, Exhausted):
        rep.add("result", f"exhausted({got.bound})")
        rep.add("nodes", got.nodes)
        rep.status = 1
        return
    rep.add("result", "found")
    rep.add("elements", got.element_count)
    rep.add("nodes", got.nodes)
    if not args.no_save:
        path = save_construction(args.save, target, parts, got)
        rep.add("saved", path)


def cmd_rtm_check(args, rep):
    m = parse_rtm(_read(args.file))
    problems = check_rtm(m)
    rep.add("states", len(m.states))
    rep.add("quintuples", len(m.quintuples))
    rep.add("reversible", "yes" if not problems else "no")
    for p in problems:
        rep.add("violation", p)
    if problems:
        rep.status = 1


def cmd_rtm_run(args, rep):
    m = parse_rtm(_read(args.file))
    out = interpret(m, args.input, args.fuel)
    rep.add("input", args.input)
    rep.add("result", out.kind.capitalize() if out.kind in ("accept", "reject")
            else f"{out.kind}({out.state})")
    rep.add("steps", out.steps)
    rep.add("tape", "".join(out.tape.cells))
    rep.add("head", out.tape.head)


def cmd_rtm_compile(args, rep):
    m = parse_rtm(_read(args.file))
    compiled = compile_to_re(m, args.window)
    rep.add("window", args.window)
    rep.add("cell_elements", len(compiled.cell_circuit.netlist.elements))
    rep.add("total_elements", len(compiled.netlist.elements))
    from .circuits import validate
    rep.add("valid", "yes" if not validate(compiled.netlist) else "no")
    if args.cross_validate:
        words = args.cross_validate.split(",")
        report = cross_validate(m, words, args.window, args.fuel)
        for row in report.rows:
            rep.add(f"agree[{row.input_word}]",
                    f"{row.interpreter}/{row.network}/{row.compiled}"
                    + ("" if row.agree else " MISMATCH"))
        rep.add("all_agree", "yes" if report.all_agree else "no")
        if not report.all_agree:
            rep.status = 1
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(format_netlist(compiled.netlist))
        rep.add("written", args.output)


def cmd_refute(args, rep):
    net, maps = _load_circuit(args.circuit)
    target = _target_table(args.target)
    state_map = {int(q): cfg for q, cfg in maps.items()} if maps else \
        {0: net.initial_configuration(), 1: net.initial_configuration()}
    got = refute(net, target, state_map)
    rep.add("target", target.name)
    if isinstance(got, NotApplicable):
        rep.add("result", f"not applicable: {got.reason}")
        rep.status = 1
        return
    rep.add("result", "refuted")
    part = got.partition
    w_named = sorted(
        ("" .join(map(str, v[1:])) if v[0] in ("in", "out")
         else f"{v[1]}.{'in' if v[0] == 'ein' else 'out'}{v[2]}")
        for v in part.w_vertices)
    rep.add("w_side", " ".join(w_named))
    rep.add("inside_elements", " ".join(part.inside) or "-")
    rep.add("outside_elements", " ".join(part.outside) or "-")
    rep.add("boundary_elements", " ".join(part.boundary) or "-")
    rep.add("budget", got.budget)
    rep.add("witness_inputs",
            "".join("ab"[s] for s in got.witness_inputs))
    for d in got.divergences:
        rep.add(f"divergence_from_state_{d.start_state}",
                f"input #{d.step}: expected {d.expected}, observed {d.observed}")


def cmd_hierarchy(args, rep):
    h = hierarchy()
    if args.simulates:
        a, b = args.simulates
        ans = h.simulates(a, b)
        rep.add("query", f"{a} simulates {b}")
        rep.add("verdict", ans.verdict)
        rep.add("reason", ans.reason)
    elif args.universal:
        ans = h.universal(args.universal)
        rep.add("query", f"{args.universal} universal?")
        rep.add("verdict", ans.verdict)
        rep.add("reason", ans.reason)
    elif args.pair:
        a, b = args.pair
        ans = h.pair_universal(a, b)
        rep.add("query", f"{a}+{b} universal together?")
        rep.add("verdict", ans.verdict)
        rep.add("reason", ans.reason)
    else:
        for a, b, v in h.facts():
            rep.add(f"{a} -> {b}", v)
        for name in ("2-2", "2-3", "2-4", "2-17", "4-289"):
            ans = h.universal(name)
            rep.add(f"universal {name}", ans.verdict)


def cmd_roundtrip(args, rep):
    text = _read(args.file)
    kind, err = _roundtrip(text)
    rep.add("file", args.file)
    if err is None:
        rep.add("grammar", kind)
        rep.add("roundtrip", "ok")
    else:
        rep.add("roundtrip", f"failed: {err}")
        rep.status = 1


def _roundtrip(text):
    attempts = []
    stripped = text.strip()
    if stripped.startswith("rlem") or __import__("re").fullmatch(
            r"\d+-\d+", stripped):
        attempts.append(("rlem", parse_table, format_table))
    if "init " in text or "accept " in text:
        attempts.append(("rtm", parse_rtm, format_rtm))
    if "states " in text:
        attempts.append(("rsm", parse_rsm, format_rsm))
    attempts.append(("netlist", parse_netlist, format_netlist))
    last = None
    for kind, parse, fmt in attempts:
        try:
            v1 = parse(text)
            v2 = parse(fmt(v1))
            if v1 != v2:
                return kind, "reparse differs from the original value"
            return kind, None
        except (ParseError, RlemError) as e:
            last = str(e)
    return "?", last or "no grammar matched"


# -- dispatch ----------------------------------------------------------------

def build_parser():
    ap = argparse.ArgumentParser(
        prog="rlemkit",
        description="reversible logic elements with memory: enumerate, "
                    "simulate, synthesize, refute")
    ap.add_argument("--format", choices=("plain", "records"), default="plain")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("plain", "records"),
                        default=argparse.SUPPRESS)
    sub = ap.add_subparsers(dest="command", required=True,
                            parser_class=lambda **kw: argparse.ArgumentParser(
                                parents=[common], **kw))

    p = sub.add_parser("census", help="count equivalence classes for one k")
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--list-classes", action="store_true")
    p.set_defaults(fn=cmd_census)

    p = sub.add_parser("show", help="render an element's move table")
    p.add_argument("element")
    p.set_defaults(fn=cmd_show)

    p = sub.add_parser("equiv", help="find a renaming between two elements")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(fn=cmd_equiv)

    p = sub.add_parser("classify", help="degeneracy classification")
    p.add_argument("element")
    p.set_defaults(fn=cmd_classify)

    p = sub.add_parser("feedback", help="survey all feedback reductions")
    p.add_argument("element")
    p.set_defaults(fn=cmd_feedback)

    p = sub.add_parser("synth-rsm", help="compile a sequential machine to "
                                         "rotary elements")
    p.add_argument("file")
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_synth_rsm)

    p = sub.add_parser("run", help="drive a circuit with an input word")
    p.add_argument("circuit")
    p.add_argument("--inputs", default="")
    p.add_argument("--max-steps", type=int, default=10 ** 6)
    p.set_defaults(fn=cmd_run)

    p = sub.add_parser("verify", help="check a circuit against a target "
                                      "element")
    p.add_argument("circuit")
    p.add_argument("--target", required=True)
    p.add_argument("--max-steps", type=int, default=10 ** 6)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("search", help="exhaustive simulation-circuit search")
    p.add_argument("--target", required=True)
    p.add_argument("--parts", required=True,
                   help="comma-separated element specs")
    p.add_argument("--max-elems", type=int, required=True)
    p.add_argument("--max-steps", type=int, default=10 ** 4)
    p.add_argument("--save", default="constructions")
    p.add_argument("--no-save", action="store_true")
    p.set_defaults(fn=cmd_search)

    p = sub.add_parser("rtm-check", help="determinism/reversibility check")
    p.add_argument("file")
    p.set_defaults(fn=cmd_rtm_check)

    p = sub.add_parser("rtm-run", help="interpret a reversible Turing machine")
    p.add_argument("file")
    p.add_argument("--input", default="")
    p.add_argument("--fuel", type=int, default=10 ** 5)
    p.set_defaults(fn=cmd_rtm_run)

    p = sub.add_parser("rtm-compile", help="compile a machine to a rotary-"
                                           "element circuit")
    p.add_argument("file")
    p.add_argument("--window", type=int, required=True)
    p.add_argument("--fuel", type=int, default=10 ** 4)
    p.add_argument("--cross-validate", metavar="WORDS",
                   help="comma-separated inputs to check at all three levels")
    p.add_argument("-o", "--output")
    p.set_defaults(fn=cmd_rtm_compile)

    p = sub.add_parser("refute", help="crossing-budget certificate against a "
                                      "claimed 2-2 simulation")
    p.add_argument("circuit")
    p.add_argument("--target", required=True)
    p.set_defaults(fn=cmd_refute)

    p = sub.add_parser("hierarchy", help="recorded capability relations")
    p.add_argument("--simulates", nargs=2, metavar=("A", "B"))
    p.add_argument("--universal", metavar="X")
    p.add_argument("--pair", nargs=2, metavar=("A", "B"))
    p.set_defaults(fn=cmd_hierarchy)

    p = sub.add_parser("roundtrip", help="parse -> serialize -> parse check")
    p.add_argument("file")
    p.set_defaults(fn=cmd_roundtrip)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    params = " ".join(a for a in (argv if argv is not None else sys.argv[1:])
                      if a != args.command)
    rep = _Report(args.command, params)
    t0 = time.perf_counter()
    try:
        args.fn(args, rep)
    except (RlemError, OSError) as err:
        rep.add("error", str(err))
        rep.status = 2
    elapsed = (time.perf_counter() - t0) * 1000
    return rep.emit(args.format, elapsed)


if __name__ == "__main__":
    sys.exit(main())
