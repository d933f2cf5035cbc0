"""Command-line interface: ``linweb <command> ...``.

Exit codes: 0 affirmative verdict or success, 1 negative verdict, 2 error.
Any term, graph, derivation or flow argument may be given as ``@path`` to
read it from a file.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Callable, Sequence

from . import flows as fl
from .graphlogic import chain_search, rel_and, rel_or
from .inference import (
    Derivation,
    Inference,
    critical_chains,
    check_increasing_measure,
    is_sound,
    remove_trivialities,
    trivial_at,
)
from .reduction import reduce_tautology
from .rewriting import (
    DEFAULT_MAX_NODES,
    default_budget,
    enumerate_linear_terms,
    is_minimal,
    load_rules,
    medial_preorder,
    reachable,
)
from .semantics import (
    ENTAIL_METHODS,
    MonotoneFunction,
    clique_maxterms,
    clique_minterms,
    entails,
    is_read_once,
    maxterms,
    maxterms_by_table,
    minterms,
    minterms_by_table,
)
from .terms import base_names, parse_term, render
from .webs import LabelledGraph, edge_counts, is_p4_free, to_dot, web_of

YES, NO, ERROR = 0, 1, 2


class CliError(Exception):
    pass


def _read(arg: str) -> str:
    if arg.startswith("@"):
        try:
            return Path(arg[1:]).read_text().strip()
        except OSError as exc:
            raise CliError(f"cannot read {arg[1:]}: {exc.strerror}") from exc
    return arg


def _term(arg: str):
    return parse_term(_read(arg))


def _json_arg(arg: str):
    text = _read(arg)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CliError(f"invalid JSON: {exc.msg}") from exc


def _graph(arg: str) -> LabelledGraph:
    """JSON web, or ``v,w,x:rgg`` with r/g labels over pairs in lexicographic order."""
    text = _read(arg)
    if text.lstrip().startswith("{"):
        return LabelledGraph.from_json(text)
    if ":" in text:
        names, labels = text.split(":", 1)
        return LabelledGraph.from_labels([n.strip() for n in names.split(",")], labels.strip())
    return web_of(parse_term(text))


def _budget(args) -> int | None:
    if getattr(args, "budget", None) is not None:
        return args.budget
    env = os.environ.get("LINWEB_BUDGET")
    if env:
        try:
            return int(env)
        except ValueError as exc:
            raise CliError("LINWEB_BUDGET must be an integer") from exc
    return None


class Output:
    def __init__(self, args):
        self.json = getattr(args, "json", False)
        self.dot = getattr(args, "dot", False)

    def emit(self, data: dict, text: str, dot: str | None = None) -> None:
        if self.dot and dot is not None:
            print(dot, end="")
        elif self.json:
            print(json.dumps(data, indent=2, sort_keys=True))
        else:
            print(text)


def _families_text(fam) -> str:
    return "\n".join(fam.lines()) if fam.sets else "(none)"


# -- commands ---------------------------------------------------------------


def cmd_web(args, out: Output) -> int:
    t = _term(args.term)
    w = web_of(t)
    e_and, e_or = edge_counts(w)
    data = {**w.to_json(), "e_and": e_and, "e_or": e_or}
    lines = [f"{x} {y}: {w.label(x, y)}" for x, y in w.pairs()]
    lines.append(f"e_and={e_and} e_or={e_or}")
    out.emit(data, "\n".join(lines), to_dot(w))
    return YES


def _terms_cmd(which: str):
    def run(args, out: Output) -> int:
        t = _term(args.term)
        ground = sorted(base_names(t))
        if args.method == "inductive":
            fam = minterms(t, ground) if which == "min" else maxterms(t, ground)
        elif args.method == "clique":
            w = web_of(t)
            fam = clique_minterms(w) if which == "min" else clique_maxterms(w)
        else:
            fam = minterms_by_table(t, ground) if which == "min" else maxterms_by_table(t, ground)
        out.emit(fam.to_json(), _families_text(fam))
        return YES

    return run


def cmd_readonce(args, out: Output) -> int:
    if args.minterms is not None:
        sets = [s.split() for s in _read(args.minterms).split(";")]
        ground = args.ground.split(",") if args.ground else sorted({x for s in sets for x in s})
        f = MonotoneFunction.from_minterms(ground, sets)
    elif args.term is not None:
        f = MonotoneFunction.from_term(_term(args.term))
    else:
        raise CliError("give a term or --minterms")
    v = is_read_once(f)
    data = {"read_once": v.read_once, "witness": render(v.witness) if v.witness is not None else None}
    if v.violation is not None:
        data["violation"] = [sorted(s) for s in v.violation]
    text = f"read-once: {render(v.witness)}" if v else f"not read-once: {data.get('violation')}"
    out.emit(data, text)
    return YES if v else NO


def cmd_entails(args, out: Output) -> int:
    ok = entails(_term(args.lhs), _term(args.rhs), method=args.method)
    out.emit({"entails": ok}, "entails" if ok else "does not entail")
    return YES if ok else NO


def _inference(args) -> Inference:
    return Inference(_term(args.lhs), _term(args.rhs))


def cmd_sound(args, out: Output) -> int:
    ok = is_sound(_inference(args))
    out.emit({"sound": ok}, "sound" if ok else "unsound")
    return YES if ok else NO


def cmd_trivial(args, out: Output) -> int:
    inf = _inference(args)
    names = [args.var] if args.var else list(inf.ground)
    found = [x for x in names if trivial_at(inf, x, args.method)]
    text = f"trivial at: {', '.join(found)}" if found else "nontrivial"
    out.emit({"trivial_at": found}, text)
    return YES if found else NO


def cmd_detriv(args, out: Output) -> int:
    r = remove_trivialities(_inference(args), budget=_budget(args))
    show = lambda t: "-" if t is None else render(t)  # noqa: E731
    text = "\n".join(
        [
            f"s' = {show(r.s_prime)}",
            f"t' = {show(r.t_prime)}",
            f"u  = {show(r.u)}",
            f"moved: {', '.join(r.moved) or '-'}",
            f"status: {r.status}" + (" (degenerate)" if r.degenerate else ""),
        ]
    )
    out.emit(r.to_json(), text)
    return YES


def cmd_derive(args, out: Output) -> int:
    rs = load_rules(args.rules, args.modulo)
    s, t = _term(args.lhs), _term(args.rhs)
    depth = _budget(args)
    if depth is None and not args.unbounded:
        depth = default_budget(len(base_names(s) | base_names(t)))
    res = reachable(s, t, rs, max_depth=depth, max_nodes=args.max_nodes, prune=args.prune)
    if isinstance(res, Derivation):
        lines = [f"   {render(res.lines[0])}"]
        for step, line in zip(res.steps, res.lines[1:]):
            lines.append(f"-> {render(line)}    [{step.rule} at {list(step.position)}]")
        lines.append(f"length {len(res)}")
        out.emit(res.to_json(), "\n".join(lines))
        return YES
    data = {"reached": False, "exhausted": res.exhausted, "explored": res.explored}
    reason = "search space exhausted" if res.exhausted else "budget exceeded"
    out.emit(data, f"not reached ({reason}, {res.explored} terms)")
    return NO


def cmd_chains(args, out: Output) -> int:
    d = Derivation.from_json(_json_arg(args.derivation))
    ch = critical_chains(d)
    if not ch:
        out.emit({"trivial_at": ch.variable}, f"endpoints trivial at {ch.variable}")
        return NO
    rep = check_increasing_measure(d, ch)
    data = {
        "minterm_chains": {x: [sorted(s) for s in c] for x, c in ch.minterm_chains.items()},
        "maxterm_chains": {x: [sorted(s) for s in c] for x, c in ch.maxterm_chains.items()},
        "measure": rep.to_json(),
    }
    text = f"mu = {[m.mu for m in rep.values]}\ne_and = {[m.e_and for m in rep.values]}\n" + (
        "measure strictly increasing" if rep.ok else f"violations at steps {rep.violations}"
    )
    out.emit(data, text)
    return YES if rep.ok else NO


def cmd_medialpre(args, out: Output) -> int:
    ok = medial_preorder(_term(args.lhs), _term(args.rhs))
    out.emit({"medial_preorder": ok}, "holds" if ok else "fails")
    return YES if ok else NO


def cmd_minimal(args, out: Output) -> int:
    v = is_minimal(_inference(args), cap=args.cap)
    data = {"minimal": v.minimal, "intermediate": render(v.intermediate) if v.intermediate else None}
    out.emit(data, "minimal" if v else f"not minimal, e.g. {render(v.intermediate)}")
    return YES if v else NO


def cmd_reduce(args, out: Output) -> int:
    r = reduce_tautology(_term(args.formula))
    text = f"s' = {render(r.s_prime)}\nt' = {render(r.t_prime)}"
    out.emit(r.to_json(), text)
    return YES


def cmd_enumerate(args, out: Output) -> int:
    names = args.variables.split(",") if "," in args.variables else list(args.variables)
    terms = enumerate_linear_terms(names, cap=args.cap)
    if args.count:
        out.emit({"count": len(terms)}, str(len(terms)))
    else:
        out.emit({"terms": [render(t) for t in terms]}, "\n".join(render(t) for t in terms))
    return YES


def _flow_text(f: fl.AtomicFlow) -> str:
    counts = ", ".join(f"{k}={v}" for k, v in f.kind_counts().items())
    up, low = f.interface()
    return f"nodes: {counts}\nupper: {' '.join(up)}\nlower: {' '.join(low)}"


def cmd_flow(args, out: Output) -> int:
    if args.action == "extract":
        f = fl.extract_flow(Derivation.from_json(_json_arg(args.input)))
        out.emit(f.to_json(), _flow_text(f), f.to_dot())
        return YES
    f = fl.AtomicFlow.from_json(_json_arg(args.input))
    if args.action == "norm":
        tr = fl.rewrite_flow(f)
        out.emit(tr.result.to_json(), _flow_text(tr.result) + f"\nsteps: {len(tr)}", tr.result.to_dot())
        return YES
    if args.action == "loops":
        loop = fl.has_contraction_loop(f)
        if loop is None:
            out.emit({"loop": None}, "no contraction loop")
            return NO
        data = {"loop": {"top": loop.top, "bottom": loop.bottom, "paths": [list(loop.first), list(loop.second)]}}
        out.emit(data, f"contraction loop between nodes {loop.top} and {loop.bottom}")
        return YES
    res = fl.eliminate_loops(f)
    out.emit(res.result.to_json(), _flow_text(res.result) + f"\nsteps: {len(res.steps)}", res.result.to_dot())
    return YES


def cmd_graph(args, out: Output) -> int:
    g, h = _graph(args.first), _graph(args.second)
    if args.action in ("rel-and", "rel-or"):
        ok = (rel_and if args.action == "rel-and" else rel_or)(g, h)
        out.emit({"holds": ok, "p4free": [is_p4_free(g)[0], is_p4_free(h)[0]]}, "holds" if ok else "fails")
        return YES if ok else NO
    res = chain_search(g, h, args.relation, budget=_budget(args) or 100_000, require_p4_free=not args.allow_p4)
    if not res:
        out.emit({"found": False, "exhausted": res.exhausted}, "no chain found")
        return NO
    data = {"found": True, "chain": [{**x.to_json(), "p4free": is_p4_free(x)[0]} for x in res]}
    text = "\n".join(f"{i}: and={sorted(map(list, x.and_edges))}" for i, x in enumerate(res))
    out.emit(data, text, "".join(to_dot(x, f"g{i}") for i, x in enumerate(res)))
    return YES


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--json", action="store_true", help="machine-readable output")
    fmt.add_argument("--dot", action="store_true", help="Graphviz output where applicable")

    p = argparse.ArgumentParser(prog="linweb", description="Linear inferences, relation webs and atomic flows.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name: str, func: Callable, help: str, **kw) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, parents=[fmt], help=help, **kw)
        sp.set_defaults(func=func)
        return sp

    def pair(sp):
        sp.add_argument("lhs")
        sp.add_argument("rhs")

    add("web", cmd_web, "relation web of a linear term").add_argument("term")
    for name, which in (("minterms", "min"), ("maxterms", "max")):
        sp = add(name, _terms_cmd(which), f"{name} of a negation-free term")
        sp.add_argument("term")
        sp.add_argument("--method", choices=("inductive", "clique", "table"), default="inductive")
    sp = add("readonce", cmd_readonce, "read-once test (term or minterm list)")
    sp.add_argument("term", nargs="?")
    sp.add_argument("--minterms", help='sets separated by ";", members by spaces')
    sp.add_argument("--ground", help="comma-separated ground set")
    sp = add("entails", cmd_entails, "semantic entailment lhs <= rhs")
    pair(sp)
    sp.add_argument("--method", choices=ENTAIL_METHODS, default="truth_table")
    pair(add("sound", cmd_sound, "soundness of an inference"))
    sp = add("trivial", cmd_trivial, "variables at which an inference is trivial")
    pair(sp)
    sp.add_argument("--var")
    sp.add_argument("--method", choices=("definition", "minterm", "maxterm"), default="definition")
    sp = add("detriv", cmd_detriv, "move trivial variables aside")
    pair(sp)
    sp.add_argument("--budget", type=int)
    sp = add("derive", cmd_derive, "search for a derivation")
    pair(sp)
    sp.add_argument("--rules", default="sm", help='rule file, or names such as "sm" or "medial,acd"')
    sp.add_argument("--modulo", choices=("none", "AC", "ACU", "ACU'"))
    sp.add_argument("--budget", type=int, help="maximum derivation length")
    sp.add_argument("--unbounded", action="store_true", help="no length bound")
    sp.add_argument("--max-nodes", type=int, default=DEFAULT_MAX_NODES)
    sp.add_argument("--prune", action="store_true", help="drop terms not below the target (sound rules only)")
    add("chains", cmd_chains, "critical chains and length measure of a derivation (JSON)").add_argument("derivation")
    pair(add("medialpre", cmd_medialpre, "medial criterion on webs"))
    sp = add("minimal", cmd_minimal, "exhaustive minimality check")
    pair(sp)
    sp.add_argument("--cap", type=int, default=7, help="refuse more variables than this")
    add("reduce", cmd_reduce, "linearise a formula").add_argument("formula")
    sp = add("enumerate", cmd_enumerate, "one linear term per AC class")
    sp.add_argument("variables", help='e.g. "xyz" or "x1,x2,x3"')
    sp.add_argument("--count", action="store_true", help="print only the number of terms")
    sp.add_argument("--cap", type=int, default=7, help="refuse more variables than this")
    sp = add("flow", cmd_flow, "atomic flows")
    sp.add_argument("action", choices=("extract", "norm", "loops", "deloop"))
    sp.add_argument("input", help="derivation JSON (extract) or flow JSON")
    sp = add("graph", cmd_graph, "maximal-clique relations on labelled graphs")
    sp.add_argument("action", choices=("rel-and", "rel-or", "chain"))
    sp.add_argument("first")
    sp.add_argument("second")
    sp.add_argument("--relation", choices=("and", "or"), default="and")
    sp.add_argument("--budget", type=int)
    sp.add_argument("--allow-p4", action="store_true", help="allow endpoints with a P4")
    return p


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) and ERROR
    try:
        return args.func(args, Output(args))
    except (CliError, ValueError, KeyError) as exc:
        msg = exc.args[0] if exc.args else exc.__class__.__name__
        print(f"error: {msg}", file=sys.stderr)
        return ERROR


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
