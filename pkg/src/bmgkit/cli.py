"""Command-line interface.

Every command prints a machine-readable JSON report to stdout and writes
bulky artifacts (graphs, trees, LP models, CSV tables) to files.  Exit codes:
0 for success, 1 for a well-formed negative answer (e.g. "this graph is not
binary-explainable"), 2 for malformed input.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import editing, gadgets, simulation
from .graphs import ColoredDigraph, bmg_from_tree, is_sf_colored
from .inference import (
    NotBinaryExplainableError,
    NotBmgError,
    binary_explaining_tree,
    brt,
    lrt,
)
from .recognition import find_hourglass
from .trees import Tree, format_color_tsv, parse_color_tsv, parse_newick

OK, NEGATIVE, INPUT_ERROR = 0, 1, 2


def _emit(report: dict) -> None:
    print(json.dumps(report, indent=2))


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _load_graph(path: str) -> ColoredDigraph:
    return ColoredDigraph.from_json(Path(path).read_text())


def _load_tree(tree_path: str, colors_path: str | None) -> Tree:
    tree = parse_newick(Path(tree_path).read_text())
    if colors_path is not None:
        colors = parse_color_tsv(Path(colors_path).read_text())
        tree = tree.with_colors(colors)
    return tree


def _write_tree(tree: Tree, out: str | None, colors_out: str | None) -> None:
    _write(out, tree.to_newick() + "\n")
    if colors_out is not None and tree.colors is not None:
        _write(colors_out, format_color_tsv(tree.colors))


def cmd_tree2bmg(args) -> int:
    tree = _load_tree(args.tree, args.colors)
    if tree.colors is None:
        raise ValueError("tree2bmg needs --colors")
    graph = bmg_from_tree(tree)
    _write(args.out, graph.to_json())
    _emit({"vertices": len(graph.vertices), "arcs": len(graph.arcs)})
    return OK


def cmd_check(args) -> int:
    g = _load_graph(args.graph)
    report: dict = {
        "proper": g.properly_colored,
        "sf": is_sf_colored(g),
        "bmg": False,
        "binary_explainable": False,
    }
    if report["proper"]:
        try:
            lrt(g)
            report["bmg"] = True
        except NotBmgError as e:
            report["bmg_reason"] = e.reason
        outcome = binary_explaining_tree(g)
        if outcome.ok:
            report["binary_explainable"] = True
        else:
            report["reason"] = outcome.reason
            if outcome.certificate is not None:
                report["certificate"] = sorted(outcome.certificate)
        witness = find_hourglass(g)
        if witness is not None:
            report["witness"] = list(witness.vertices)
            report["witness_kind"] = witness.kind
    _emit(report)
    all_good = all(report[k] for k in ("proper", "sf", "bmg", "binary_explainable"))
    return OK if all_good else NEGATIVE


def _tree_command(args, construct) -> int:
    g = _load_graph(args.graph)
    try:
        tree = construct(g)
    except (NotBmgError, NotBinaryExplainableError) as e:
        report = {"ok": False, "reason": e.reason}
        if e.certificate is not None:
            report["certificate"] = sorted(e.certificate)
        _emit(report)
        return NEGATIVE
    _write_tree(tree, args.out, args.colors_out)
    _emit({"ok": True, "leaves": tree.n_leaves, "resolution": str(tree.resolution())})
    return OK


def cmd_lrt(args) -> int:
    return _tree_command(args, lrt)


def cmd_brt(args) -> int:
    return _tree_command(args, brt)


def cmd_refine(args) -> int:
    tree = _load_tree(args.tree, args.colors)
    refined = tree.binary_refine()
    _write_tree(refined, args.out, args.colors_out)
    _emit({"ok": True, "leaves": refined.n_leaves, "binary": refined.is_binary})
    return OK


def cmd_ilp(args) -> int:
    g = _load_graph(args.graph)
    model = editing.build_ilp(g, args.mode)
    _write(args.out, editing.export_lp(model))
    _emit(
        {
            "mode": args.mode,
            "variables": len(model.variables),
            "constraints": len(model.constraints),
        }
    )
    return OK


def cmd_edit_exact(args) -> int:
    g = _load_graph(args.graph)
    found = editing.brute_force_edit(g, args.mode, args.kmax)
    if found is None:
        _emit({"mode": args.mode, "k": None, "kmax": args.kmax})
        return NEGATIVE
    edit, k = found
    _emit(
        {
            "mode": args.mode,
            "k": k,
            "insert": [list(a) for a in sorted(edit.insert)],
            "delete": [list(a) for a in sorted(edit.delete)],
        }
    )
    return OK


def _parse_size_pair(text: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise ValueError(f"expected 'BLACK,WHITE' counts, got {text!r}")
    return int(parts[0]), int(parts[1])


def cmd_gadget(args) -> int:
    if args.kind == "hub":
        hub = _parse_size_pair(args.hub)
        satellites = [_parse_size_pair(s) for s in args.satellite or []]
        graph, tree = gadgets.hub_satellites_gadget(hub, satellites)
        _write(args.out, graph.to_json())
        if args.tree_out is not None:
            _write(args.tree_out, tree.to_newick() + "\n")
        _emit({"kind": "hub", "vertices": len(graph.vertices), "arcs": len(graph.arcs)})
        return OK
    # exact-cover gadget
    if args.elements is not None:
        elements = args.elements.split(",")
        sets = [tuple(s.split(",")) for s in args.set or []]
    else:
        if args.t is None or args.m is None:
            raise ValueError("exact-cover gadget needs either --elements/--set or --t/--m")
        elements, sets = gadgets.canonical_x3c_instance(args.t, args.m)
    graph, k = gadgets.x3c_gadget(elements, sets)
    _write(args.out, graph.to_json())
    _emit(
        {
            "kind": "x3c",
            "vertices": len(graph.vertices),
            "arcs": len(graph.arcs),
            "k": k,
        }
    )
    return OK


def cmd_simulate(args) -> int:
    lo, _, hi = args.species.partition(":")
    rates = []
    for spec in args.rates:
        parts = spec.split(",")
        if len(parts) != 3:
            raise ValueError(f"rate triple must be 'dup,loss,hgt', got {spec!r}")
        rates.append(simulation.Rates(*map(float, parts)))
    config = simulation.ExperimentConfig(
        rate_grid=tuple(rates),
        replicates=args.replicates,
        species_min=int(lo),
        species_max=int(hi or lo),
        master_seed=args.seed,
    )
    result = simulation.run_experiment(config)
    _write(args.out, result.to_csv())
    if args.gnuplot is not None:
        name = args.out if args.out not in (None, "-") else "results.csv"
        _write(args.gnuplot, simulation.gnuplot_script(name, config.rate_grid))
    summary = []
    for s in result.summaries():
        summary.append(
            {
                "rates": [s.rates.duplication, s.rates.loss, s.rates.hgt],
                "replicates": s.replicates,
                "median_res_lrt": s.median_res_lrt,
                "median_res_brt": s.median_res_brt,
                "ratio_quartiles": list(s.ratio_quartiles) if s.ratio_quartiles else None,
                "missing_ratio": s.n_missing_ratio,
            }
        )
    _emit({"summaries": summary})
    return OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bmgkit", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, **kwargs):
        sp = sub.add_parser(name, **kwargs)
        sp.set_defaults(func=fn)
        return sp

    sp = add("tree2bmg", cmd_tree2bmg, help="best match graph of a leaf-colored tree")
    sp.add_argument("--tree", required=True, help="Newick file")
    sp.add_argument("--colors", required=True, help="leaf<TAB>color TSV file")
    sp.add_argument("-o", "--out", help="graph JSON output (default stdout)")

    sp = add("check", cmd_check, help="recognition report for a colored digraph")
    sp.add_argument("--graph", required=True, help="graph JSON file")

    for name, fn in (("lrt", cmd_lrt), ("brt", cmd_brt)):
        sp = add(name, fn, help=f"{name} of a best match graph")
        sp.add_argument("--graph", required=True)
        sp.add_argument("-o", "--out", help="Newick output (default stdout)")
        sp.add_argument("--colors-out", help="color TSV output")

    sp = add("refine", cmd_refine, help="binary refinement of a tree")
    sp.add_argument("--binary", action="store_true", required=True,
                    help="refine multifurcations to a binary tree")
    sp.add_argument("--tree", required=True)
    sp.add_argument("--colors")
    sp.add_argument("-o", "--out")
    sp.add_argument("--colors-out")

    sp = add("ilp", cmd_ilp, help="export the editing model in LP format")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--mode", choices=editing.MODES, default="edit")
    sp.add_argument("-o", "--out", help="LP output (default stdout)")

    sp = add("edit-exact", cmd_edit_exact, help="exhaustive minimum edit search")
    sp.add_argument("--graph", required=True)
    sp.add_argument("--mode", choices=editing.MODES, default="edit")
    sp.add_argument("--kmax", type=int, default=4)

    sp = add("gadget", cmd_gadget, help="hardness-reduction fixture generators")
    sp.add_argument("kind", choices=("x3c", "hub"))
    sp.add_argument("--t", type=int, help="x3c: universe has 3t elements")
    sp.add_argument("--m", type=int, help="x3c: number of candidate 3-sets")
    sp.add_argument("--elements", help="x3c: comma-separated element ids")
    sp.add_argument("--set", action="append", help="x3c: one 3-set as 'a,b,c' (repeatable)")
    sp.add_argument("--hub", default="1,1", help="hub: 'BLACK,WHITE' counts")
    sp.add_argument("--satellite", action="append", help="hub: 'BLACK,WHITE' counts (repeatable)")
    sp.add_argument("-o", "--out", help="graph JSON output (default stdout)")
    sp.add_argument("--tree-out", help="hub: explaining tree Newick output")

    sp = add("simulate", cmd_simulate, help="resolution statistics over simulated scenarios")
    sp.add_argument("--species", default="10:30", help="species count range 'MIN:MAX'")
    sp.add_argument("--rates", action="append", required=True,
                    help="rate triple 'dup,loss,hgt' (repeatable)")
    sp.add_argument("--replicates", type=int, default=100)
    sp.add_argument("--seed", type=int, default=1)
    sp.add_argument("-o", "--out", help="CSV output (default stdout)")
    sp.add_argument("--gnuplot", help="also write a gnuplot box-plot script here")

    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (NotBmgError, NotBinaryExplainableError) as e:
        _emit({"ok": False, "reason": e.reason})
        return NEGATIVE
    except (ValueError, OSError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
