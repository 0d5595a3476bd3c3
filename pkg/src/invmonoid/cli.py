"""Batch command-line front end.

One subcommand per operation.  Data goes to stdout or to the requested
output file; progress and diagnostics go to stderr so output stays
pipeable.  Exit status: 0 for a definite answer or a written artifact,
2 when a search budget was exhausted, 1 for any error.
"""
from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import geometry, langtools
from . import sapling as saplings
from . import stephen, viz
from .graphs import export_dot, export_json, import_json
from .words import (
    Presentation,
    PresentationSyntaxError,
    format_presentation,
    free_reduce,
    invert_word,
    parse_presentation,
    parse_word,
)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_EXHAUSTED = 2


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; here 2 means exhausted, so remap."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


def _read_file(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise CliError(f"{path}: {e.strerror or e}") from e


def _check_out(*paths: str | None) -> None:
    """Fail before any work starts if an output location cannot take a file."""
    for p in paths:
        if p is None:
            continue
        parent = Path(p).resolve().parent
        if not parent.is_dir():
            raise CliError(f"{p}: output directory does not exist")


def _emit(text: str, out: str | None) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        try:
            Path(out).write_text(text, encoding="utf-8")
        except OSError as e:
            raise CliError(f"{out}: {e.strerror or e}") from e


def _load_presentation(path: str) -> Presentation:
    text = _read_file(path)
    try:
        return parse_presentation(text)
    except PresentationSyntaxError as e:
        raise CliError(f"{path}: {e}") from e


def _word(text: str, p: Presentation | None = None):
    try:
        return parse_word(text, p)
    except ValueError as e:
        raise CliError(f"bad word {text!r}: {e}") from e


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def _automaton_marks(a) -> dict:
    return {"start": a.start, "end": a.end, "marked": sorted(a.marked)}


def _write_views(g, marks, dot: str | None, fig: str | None, title: str) -> None:
    if dot:
        _emit(export_dot(g, marks), dot)
    if fig:
        viz.draw_graph(
            g,
            fig,
            marked=marks.get("marked", ()),
            start=marks.get("start"),
            end=marks.get("end"),
            title=title,
        )


def _cmd_munn(args) -> int:
    _check_out(args.json, args.dot, args.fig)
    w = _word(args.word)
    t = stephen.munn_tree(w)
    marks = {"start": t.start, "end": t.end}
    _emit(export_json(t.graph, marks), args.json)
    _write_views(t.graph, marks, args.dot, args.fig, f"Munn tree of {args.word}")
    return EXIT_OK


def _cmd_expand(args) -> int:
    _check_out(args.json, args.dot, args.fig)
    p = _load_presentation(args.presentation)
    w = _word(args.word, p)
    a = stephen.expand(w, p, 0)
    for m in range(args.steps + 1):
        a = stephen.expand(w, p, m)
        edges = sum(1 for _ in a.graph.edge_pairs())
        _note(f"stage {m}: {len(a.graph)} vertices, {edges} edges")
    marks = _automaton_marks(a)
    _emit(export_json(a.graph, marks), args.json)
    _write_views(
        a.graph, marks, args.dot, args.fig,
        f"{args.word} after {args.steps} expansion steps",
    )
    return EXIT_OK


def _cmd_decide(args) -> int:
    p = _load_presentation(args.presentation)
    u = _word(args.u, p)
    v = _word(args.v, p)
    _note(f"deciding {args.u!r} = {args.v!r} with budget {args.budget}")
    verdict = langtools.word_problem(u, v, p, args.budget)
    print(verdict)
    return EXIT_OK if verdict in ("equal", "unequal") else EXIT_EXHAUSTED


def _cmd_sapling(args) -> int:
    _check_out(args.out, args.fig)
    p = _load_presentation(args.presentation)
    w = _word(args.word, p)
    result = saplings.find_sapling(w, p, args.budget, progress=_note)
    if isinstance(result, saplings.FiniteGraph):
        a = result.auto
        print("complete")
        if args.out:
            _emit(export_json(a.graph, _automaton_marks(a)), args.out)
        if args.fig:
            viz.draw_graph(
                a.graph, args.fig, marked=sorted(a.marked),
                start=a.start, end=a.end, title=f"complete automaton of {args.word}",
            )
        return EXIT_OK
    if isinstance(result, saplings.Exhausted):
        print("exhausted")
        _note(f"budget {result.m} spent, {result.entries} candidates still open")
        return EXIT_EXHAUSTED
    doc = saplings.save_sapling(result)
    _emit(doc, args.out)
    _note(
        f"sapling with {result.n} systems at stage {result.S.stage}, k={result.k}"
    )
    if args.fig:
        tinted = sorted(set().union(*result.Y, *result.X))
        viz.draw_graph(
            result.S.graph, args.fig, marked=tinted,
            start=result.S.start, end=result.S.end,
            title=f"sapling for {args.word}",
        )
    return EXIT_OK


def _cmd_pda(args) -> int:
    _check_out(args.out)
    s = _load_sapling_file(args.sapling)
    p = langtools.build_pda(s)
    _note(f"{len(p.states)} states, {len(p.transitions)} transitions")
    _emit(langtools.export_pda(p), args.out)
    return EXIT_OK


def _load_sapling_file(path: str):
    try:
        return saplings.load_sapling(_read_file(path))
    except ValueError as e:
        raise CliError(f"{path}: {e}") from e


def _cmd_accept(args) -> int:
    try:
        p = langtools.import_pda(_read_file(args.pda))
    except ValueError as e:
        raise CliError(f"{args.pda}: {e}") from e
    w = _word(args.word)
    print("accept" if langtools.pda_accepts(p, w) else "reject")
    return EXIT_OK


def _cmd_geodesics(args) -> int:
    _check_out(args.out, args.fig)
    p = _load_presentation(args.presentation)
    w = _word(args.word, p)
    a = stephen.expand(w, p, args.depth)
    _note(f"materialized to depth {args.depth}: {len(a.graph)} vertices")
    f = langtools.geodesic_automaton(a, a.start, args.delta, p.K)
    _note(f"{len(f.states)} states")
    _emit(langtools.export_fsa(f), args.out)
    if args.fig:
        viz.draw_graph(
            a.graph, args.fig, marked=sorted(a.marked),
            start=a.start, end=a.end,
            title=f"geodesic source graph for {args.word}",
        )
    return EXIT_OK


def _load_graph_file(path: str):
    try:
        return import_json(_read_file(path))
    except ValueError as e:
        raise CliError(f"{path}: {e}") from e


def _report_rows(rows, report_dir: str | None, name: str) -> None:
    """TSV to stdout, mirrored into the report directory when one is given."""
    text = "".join(f"{k}\t{v}\n" for k, v in rows)
    sys.stdout.write(text)
    if report_dir:
        _emit(text, str(Path(report_dir) / name))


def _prep_report_dir(path: str | None) -> None:
    if path is None:
        return
    try:
        Path(path).mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise CliError(f"{path}: {e.strerror or e}") from e


def _cmd_hyperbolic(args) -> int:
    _prep_report_dir(args.report_dir)
    g = _load_graph_file(args.graph)
    delta = geometry.gromov_delta(g)
    rows = [("vertices", len(g)), ("delta", delta)]
    if args.delta is not None:
        ok = all(
            geometry.polygon_hyperbolic_check(g, x0, args.delta)
            for x0 in sorted(g.vertices())
        )
        rows.append(("polygon_hyperbolic", "true" if ok else "false"))
    _report_rows(rows, args.report_dir, "hyperbolic.tsv")
    if args.report_dir:
        out = Path(args.report_dir)
        viz.draw_graph(g, str(out / "graph.png"), title=Path(args.graph).name)
        viz.draw_defect_histogram(
            geometry.four_point_gaps(g),
            str(out / "defects.png"),
            title="four-point defects",
            xlabel="delta demanded",
        )
    return EXIT_OK


def _load_partition_file(path: str):
    try:
        return geometry.load_partition(_read_file(path))
    except ValueError as e:
        raise CliError(f"{path}: {e}") from e


def _cmd_treecheck(args) -> int:
    _prep_report_dir(args.report_dir)
    g = _load_graph_file(args.graph)
    blocks = _load_partition_file(args.partition)
    ok = geometry.strong_tree_check(g, blocks, args.width)
    rows: list[tuple] = [
        ("blocks", len(blocks)),
        ("width", args.width),
        ("strong_tree", "true" if ok else "false"),
    ]
    report = None
    if args.delta is not None:
        report = geometry.tree_of_hyperbolic_verify(g, blocks, args.delta)
        rows += [
            ("transition_edges_ok", "true" if report.transition_edges_ok else "false"),
            ("quotient_is_tree", "true" if report.quotient_is_tree else "false"),
            ("blocks_hyperbolic", "true" if report.blocks_hyperbolic else "false"),
            ("whole_delta", report.whole_delta),
            ("applicable", "true" if report.applicable else "false"),
            ("counterexample", "true" if report.counterexample else "false"),
        ]
    _report_rows(rows, args.report_dir, "treecheck.tsv")
    if args.report_dir:
        out = Path(args.report_dir)
        viz.draw_partition(g, blocks, str(out / "partition.png"))
        if report is not None:
            deltas = [float(d) for d in report.block_deltas if d is not None]
            viz.draw_defect_histogram(
                deltas, str(out / "block_deltas.png"),
                title="per-block delta", xlabel="delta",
            )
    return EXIT_OK


def _cmd_eword(args) -> int:
    p = _load_presentation(args.presentation)
    words = [
        _word(tok.strip(), p)
        for tok in args.subgroup.split(",")
        if tok.strip()
    ]
    # Relations u = v feed the group-relator list as the words u v'.
    relators = [free_reduce(lhs + invert_word(rhs)) for lhs, rhs in p.relations]
    relators = [r for r in relators if r]
    try:
        ep = stephen.build_e_presentation(sorted(p.alphabet), relators, words)
    except ValueError as e:
        raise CliError(str(e)) from e
    sys.stdout.write(format_presentation(ep))
    return EXIT_OK


def _build_parser() -> _Parser:
    parser = _Parser(prog="invmonoid", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def cmd(name, func, help):
        q = sub.add_parser(name, help=help)
        q.set_defaults(func=func)
        return q

    q = cmd("munn", _cmd_munn, "Munn tree of a word, as graph JSON")
    q.add_argument("word")
    q.add_argument("--json", metavar="OUT")
    q.add_argument("--dot", metavar="OUT")
    q.add_argument("--fig", metavar="OUT.png")

    q = cmd("expand", _cmd_expand, "run expansion steps and export the graph")
    q.add_argument("-p", "--presentation", required=True, metavar="FILE")
    q.add_argument("-w", "--word", required=True)
    q.add_argument("-n", "--steps", type=int, required=True)
    q.add_argument("--json", metavar="OUT")
    q.add_argument("--dot", metavar="OUT")
    q.add_argument("--fig", metavar="OUT.png")

    q = cmd("decide", _cmd_decide, "decide whether two words are equal")
    q.add_argument("-p", "--presentation", required=True, metavar="FILE")
    q.add_argument("-u", required=True)
    q.add_argument("-v", required=True)
    q.add_argument("--budget", type=int, default=25)

    q = cmd("sapling", _cmd_sapling, "search for a sapling certificate")
    q.add_argument("-p", "--presentation", required=True, metavar="FILE")
    q.add_argument("-w", "--word", required=True)
    q.add_argument("--budget", type=int, default=25)
    q.add_argument("--out", metavar="OUT.json")
    q.add_argument("--fig", metavar="OUT.png")

    q = cmd("pda", _cmd_pda, "compile a sapling to a pushdown automaton")
    q.add_argument("--sapling", required=True, metavar="IN.json")
    q.add_argument("--out", metavar="OUT.json")

    q = cmd("accept", _cmd_accept, "run a compiled automaton on a word")
    q.add_argument("--pda", required=True, metavar="IN.json")
    q.add_argument("-w", "--word", required=True)

    q = cmd("geodesics", _cmd_geodesics, "geodesic automaton of a materialized graph")
    q.add_argument("-p", "--presentation", required=True, metavar="FILE")
    q.add_argument("-w", "--word", required=True)
    q.add_argument("--delta", type=int, required=True)
    q.add_argument("--depth", type=int, required=True)
    q.add_argument("--out", metavar="FSA.json")
    q.add_argument("--fig", metavar="OUT.png")

    q = cmd("hyperbolic", _cmd_hyperbolic, "measure hyperbolicity of a graph file")
    q.add_argument("--graph", required=True, metavar="G.json")
    q.add_argument("--delta", type=int, default=None)
    q.add_argument("--report-dir", metavar="DIR")

    q = cmd("treecheck", _cmd_treecheck, "strong tree decomposition checks")
    q.add_argument("--graph", required=True, metavar="G.json")
    q.add_argument("--partition", required=True, metavar="P.json")
    q.add_argument("--width", type=int, required=True)
    q.add_argument("--delta", type=_fraction, default=None)
    q.add_argument("--report-dir", metavar="DIR")

    q = cmd("eword", _cmd_eword, "presentation of the subgroup marker idempotent")
    q.add_argument("-p", "--presentation", required=True, metavar="FILE")
    q.add_argument("--subgroup", required=True, metavar="w1,w2,...")

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
