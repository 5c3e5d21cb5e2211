"""Command-line driver.  Exit codes: 0 = YES/ok, 1 = NO/invalid coloring, 2 = usage or guard error."""
from __future__ import annotations

import argparse
import sys

from . import formats
from .branchdecomp import MAX_BEST_BD_N, best_bd_small, linear_bd, module_width, validate_bd
from .cwsolver import solve_cw
from .gadgets import (
    ListColoringInstance,
    color_selection_gadget,
    listcol_gadget,
    mycielski,
    mycielski_minus,
    naesat_gadget,
    standard_graphs,
)
from .graph import Graph, GuardError, brute_force_solve, is_clique_coloring
from .treedecomp import MAX_EXACT_TW_N, exact_td_small, make_nice, validate_td
from .twsolver import solve_tw

EXIT_YES, EXIT_NO, EXIT_ERROR = 0, 1, 2
MAX_BRUTE_N = 12


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="ascii") as fh:
            return fh.read()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _load_td(args, g: Graph):
    if args.td:
        td = formats.parse_td(_read(args.td), g)
    elif g.n <= args.max_n:
        td = exact_td_small(g, max_n=args.max_n)
    else:
        raise GuardError(
            "tree-decomp", f"no --td given and n={g.n} exceeds the auto-decomposition limit {args.max_n}"
        )
    rep = validate_td(g, td)
    if not rep:
        raise UsageError(f"invalid tree decomposition: {rep.violation} (witness {rep.witness})")
    return td


def _load_bd(args, g: Graph):
    if args.bd:
        bd = formats.parse_bd(_read(args.bd), g)
    elif g.n <= args.max_n:
        bd = best_bd_small(g, max_n=args.max_n).bd
    else:
        raise GuardError(
            "branch-decomp", f"no --bd given and n={g.n} exceeds the auto-decomposition limit {args.max_n}"
        )
    rep = validate_bd(g, bd)
    if not rep:
        raise UsageError(f"invalid branch decomposition: {rep.violation} (witness {rep.witness})")
    return bd


def cmd_solve(args, out) -> int:
    g = formats.parse_graph(_read(args.graph))
    k = args.colors
    if k < 1:
        raise UsageError("--colors must be at least 1")
    if args.algo == "brute":
        limit = args.max_n if args.max_n is not None else MAX_BRUTE_N
        if g.n > limit:
            raise GuardError("graph-core", f"brute force limited to n <= {limit}, got n={g.n}")
        coloring = brute_force_solve(g, k, max_n=limit)
        answer = coloring is not None
    elif args.algo == "tw":
        if args.max_n is None:
            args.max_n = MAX_EXACT_TW_N
        res = solve_tw(g, make_nice(g, _load_td(args, g)), k, args.certificate)
        answer, coloring = res.answer, res.coloring
    else:
        if args.max_n is None:
            args.max_n = MAX_BEST_BD_N
        bd = _load_bd(args, g) if g.n else None
        res = solve_cw(g, bd, k, args.certificate)
        answer, coloring = res.answer, res.coloring
    out.write("YES\n" if answer else "NO\n")
    if answer and args.certificate:
        out.write(formats.emit_coloring(coloring))
    return EXIT_YES if answer else EXIT_NO


def cmd_verify(args, out) -> int:
    g = formats.parse_graph(_read(args.graph))
    text = _read(args.coloring)
    if text.split()[:1] == ["NO"]:
        out.write("INVALID no coloring given\n")
        return EXIT_NO
    try:
        c = formats.parse_coloring(text, g.n, args.colors)
    except formats.ParseError as e:
        out.write(f"INVALID {e}\n")
        return EXIT_NO
    if not is_clique_coloring(g, c):
        out.write("INVALID some maximal clique is monochromatic\n")
        return EXIT_NO
    out.write("OK\n")
    return EXIT_YES


def _gen_graph(args):
    fam = args.family
    if fam == "mycielski":
        return mycielski(args.p), {}
    if fam == "mycielski-minus":
        g, (x, y) = mycielski_minus(args.p)
        return g, {x: "x", y: "y"}
    if fam == "hq":
        h = color_selection_gadget(args.q)
        return h.graph, h.labels
    if fam == "naesat":
        if not args.cnf:
            raise UsageError("gen naesat needs --cnf")
        h = naesat_gadget(formats.parse_cnf(_read(args.cnf)))
        return h.graph, h.labels
    if fam == "listcol":
        if not (args.graph and args.lists):
            raise UsageError("gen listcol needs --graph and --lists")
        g = formats.parse_graph(_read(args.graph))
        lists = formats.parse_lists(_read(args.lists), g.n)
        try:
            inst = ListColoringInstance(g, tuple(lists), args.q)
        except ValueError as e:
            raise UsageError(str(e)) from None
        h = listcol_gadget(inst)
        return h.graph, h.labels
    if args.n is None:
        raise UsageError(f"gen {fam} needs --n")
    return standard_graphs(fam, args.n, args.prob, args.seed), {}


def cmd_gen(args, out) -> int:
    try:
        g, labels = _gen_graph(args)
    except ValueError as e:
        if isinstance(e, formats.ParseError):
            raise
        raise UsageError(str(e)) from None
    out.write(formats.emit_graph(g))
    if args.labels:
        with open(args.labels, "w", encoding="ascii") as fh:
            fh.write(formats.emit_labels(labels))
    return EXIT_YES


def cmd_decomp(args, out) -> int:
    g = formats.parse_graph(_read(args.graph))
    kind = args.kind
    if kind in ("tw-exact", "nice"):
        if args.max_n is None:
            args.max_n = MAX_EXACT_TW_N
        td = _load_td(args, g) if kind == "nice" else exact_td_small(g, max_n=args.max_n)
        if kind == "tw-exact":
            out.write(formats.emit_td(td, g.n))
        else:
            ntd = make_nice(g, td)
            out.write(formats.emit_td(ntd.as_td(), g.n, kinds=ntd))
        return EXIT_YES
    if args.max_n is None:
        args.max_n = MAX_BEST_BD_N
    if g.n == 0:
        raise UsageError("branch decompositions need at least one vertex")
    if kind == "bd-linear":
        if args.order:
            try:
                order = [int(x) - 1 for x in args.order.split(",")]
            except ValueError:
                raise UsageError("--order takes comma-separated vertices") from None
        else:
            order = list(range(g.n))
        try:
            bd = linear_bd(g, order)
        except ValueError as e:
            raise UsageError(str(e)) from None
        out.write(formats.emit_bd(bd, g.n))
    elif kind == "bd-exact":
        out.write(formats.emit_bd(best_bd_small(g, max_n=args.max_n).bd, g.n))
    else:
        out.write(f"{module_width(g, _load_bd(args, g))}\n")
    return EXIT_YES


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cliquecol", description="Exact clique-coloring solvers and tooling.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="decide k-clique-colorability")
    s.add_argument("graph", help="graph file ('-' for stdin)")
    s.add_argument("--algo", choices=("tw", "cw", "brute"), default="tw")
    s.add_argument("--colors", "-k", type=int, required=True)
    s.add_argument("--td", help="tree decomposition file (tw)")
    s.add_argument("--bd", help="branch decomposition file (cw)")
    s.add_argument("--certificate", action="store_true", help="print a coloring on YES")
    s.add_argument("--max-n", type=int, help="override the small-n guard")
    s.set_defaults(func=cmd_solve)

    v = sub.add_parser("verify", help="check a coloring file")
    v.add_argument("graph")
    v.add_argument("coloring")
    v.add_argument("--colors", "-k", type=int)
    v.set_defaults(func=cmd_verify)

    gen = sub.add_parser("gen", help="emit a generated graph")
    gen.add_argument(
        "family",
        choices=("mycielski", "mycielski-minus", "hq", "naesat", "listcol", "cycle", "path", "complete", "random"),
    )
    gen.add_argument("--p", type=int, default=4, help="Mycielski index")
    gen.add_argument("--q", type=int, default=3, help="number of colours for hq/listcol")
    gen.add_argument("--n", type=int, help="vertex count for standard families")
    gen.add_argument("--prob", type=float, default=0.5, help="edge probability for random")
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--cnf", help="DIMACS CNF file for naesat")
    gen.add_argument("--graph", help="input graph for listcol")
    gen.add_argument("--lists", help="list file for listcol")
    gen.add_argument("--labels", help="write the label sidecar here")
    gen.set_defaults(func=cmd_gen)

    d = sub.add_parser("decomp", help="compute decompositions or module-width")
    d.add_argument("kind", choices=("tw-exact", "nice", "bd-linear", "bd-exact", "mw"))
    d.add_argument("graph")
    d.add_argument("--td", help="input tree decomposition (nice)")
    d.add_argument("--bd", help="input branch decomposition (mw)")
    d.add_argument("--order", help="comma-separated 1-based vertex order (bd-linear)")
    d.add_argument("--max-n", type=int, help="override the small-n guard")
    d.set_defaults(func=cmd_decomp)
    return p


def main(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_ERROR if e.code else EXIT_YES
    try:
        return args.func(args, out)
    except GuardError as e:
        print(f"error: {e}", file=sys.stderr)
    except (formats.ParseError, UsageError) as e:
        print(f"error: {e}", file=sys.stderr)
    return EXIT_ERROR
