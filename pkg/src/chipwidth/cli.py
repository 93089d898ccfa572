"""Command-line front end for the solvers and certificate checkers.

Subcommands: gen (emit family graphs as .gr), tw (exact treewidth with a
decomposition), verify-td (check a .td against a graph), bramble
(generate / classify / order for the named covering families), gon
(winning-divisor check, exact gonality, known winning divisors), and
reproduce (recompute every stock numeric claim and report a verdict table).

Machine output goes to stdout, diagnostics to stderr. Exit codes: 0 on
success or an all-match table, 1 on a verification failure or mismatch,
2 on usage errors. Stdout is byte-identical across runs on the same input;
measured wall times are only embedded when --timing is given. The --seed
flag is reserved and ignored (every algorithm here is deterministic), and
the CHIPWIDTH_THREADS environment variable is likewise reserved; current
solvers are single-threaded.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass
from typing import Callable

from .brambles import (
    BrambleError,
    classify_family,
    gen_grid_bramble,
    gen_prism_b1,
    gen_prism_b2,
    gen_torus_cde,
    gen_torus_fg,
    min_hitting_set,
    write_bramble,
)
from .certificates import Certificate
from .chipfiring import (
    ChipFiringError,
    exact_gonality,
    gen_winning_divisor,
    is_winning_divisor,
    read_divisor,
    write_divisor,
)
from .graphs import (
    Graph,
    GraphError,
    bits_list,
    make_family,
    read_gr_file,
    write_gr,
)
from .treewidth import (
    DecompositionError,
    SolverLimits,
    exact_treewidth,
    read_td_file,
    validate_tree_decomposition,
    write_td_file,
)

_FAMILY_LETTER = {"grid": "G", "stacked_prism": "Y", "toroidal_grid": "T"}
_GEN_KINDS = {"grid": "grid", "prism": "stacked_prism", "torus": "toroidal_grid"}
_BRAMBLE_FAMILIES = {
    "grid": ("grid", gen_grid_bramble),
    "prism_b1": ("stacked_prism", gen_prism_b1),
    "prism_b2": ("stacked_prism", gen_prism_b2),
    "torus_cde": ("toroidal_grid", gen_torus_cde),
    "torus_fg": ("toroidal_grid", gen_torus_fg),
}


def _label(g: Graph) -> str:
    fam = g.family
    if fam is not None and fam.kind in _FAMILY_LETTER:
        return f"{_FAMILY_LETTER[fam.kind]}{fam.m},{fam.n}"
    return f"graph({g.n}v)"


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(text)


def _print_cert(cert: Certificate, timing: bool) -> None:
    sys.stdout.write(cert.to_json(include_timing=timing) + "\n")


def _one_indexed(witness: object) -> object:
    if isinstance(witness, int):
        return witness + 1
    if isinstance(witness, tuple):
        return [x + 1 for x in witness]
    return witness


# --- subcommands --------------------------------------------------------------


def _cmd_gen(args: argparse.Namespace) -> int:
    g = make_family(_GEN_KINDS[args.family], args.m, args.n)
    _emit(write_gr(g), args.output)
    return 0


def _cmd_tw(args: argparse.Namespace) -> int:
    g = read_gr_file(args.graph)
    limits = SolverLimits(
        method=args.method,
        time_budget=args.budget_ms / 1000.0,
        lower_bound_hint=args.lower_hint,
    )
    res = exact_treewidth(g, limits)
    if args.td is not None:
        write_td_file(res.decomposition, args.td)
    cert = Certificate(
        claim={"type": "treewidth", "graph": _label(g), "vertices": g.n},
        verdict=res.proof_status,
        witness={
            "treewidth": res.treewidth,
            "lower": res.lower,
            "upper": res.upper,
            "bags": res.decomposition.num_bags,
        },
        proof=res.method,
        timing=res.elapsed,
    )
    _print_cert(cert, args.timing)
    return 0


def _cmd_verify_td(args: argparse.Namespace) -> int:
    g = read_gr_file(args.graph)
    td = read_td_file(args.decomposition)
    t0 = time.monotonic()
    report = validate_tree_decomposition(g, td)
    elapsed = time.monotonic() - t0
    if report.valid:
        witness: dict = {"width": td.width}
    else:
        witness = {"condition": report.condition, "witness": _one_indexed(report.witness)}
    cert = Certificate(
        claim={
            "type": "tree_decomposition",
            "graph": _label(g),
            "bags": td.num_bags,
            "declared_width": td.width,
        },
        verdict="valid" if report.valid else "invalid",
        witness=witness,
        proof="direct_check",
        timing=elapsed,
    )
    _print_cert(cert, args.timing)
    return 0 if report.valid else 1


def _bramble_instance(args: argparse.Namespace):
    kind, gen = _BRAMBLE_FAMILIES[args.family]
    g = make_family(kind, args.m, args.n)
    return g, gen(g)


def _cmd_bramble(args: argparse.Namespace) -> int:
    g, b = _bramble_instance(args)
    if args.action == "generate":
        _emit(write_bramble(b), args.output)
        return 0
    cls = classify_family(g, b.elements)
    if args.action == "classify":
        counter = None
        if cls.counterexample is not None:
            counter = list(cls.counterexample)
        cert = Certificate(
            claim={
                "type": "bramble_classification",
                "family": args.family,
                "graph": _label(g),
                "elements": len(b),
            },
            verdict=cls.verdict,
            witness={"counterexample_elements": counter},
            proof="pairwise_check",
            timing=None,
        )
        _print_cert(cert, args.timing)
        return 0
    t0 = time.monotonic()
    oc = min_hitting_set(b)
    elapsed = time.monotonic() - t0
    claim = {
        "type": "bramble_order",
        "family": args.family,
        "graph": _label(g),
        "elements": len(b),
    }
    if args.claimed is not None:
        claim["claimed_order"] = args.claimed
        verdict = "pass" if oc.order == args.claimed else "fail"
    else:
        verdict = cls.verdict
    cert = Certificate(
        claim=claim,
        verdict=verdict,
        witness={
            "order": oc.order,
            "hitting_set": [v + 1 for v in bits_list(oc.witness)],
            "classification": cls.verdict,
        },
        proof=oc.proof,
        timing=elapsed,
    )
    _print_cert(cert, args.timing)
    return 1 if verdict == "fail" else 0


def _default_style(g: Graph) -> str:
    fam = g.family
    if fam is None:
        raise ChipFiringError("graph carries no family metadata; pass --style")
    if fam.kind == "stacked_prism":
        return "column_ones" if fam.m <= 2 * fam.n else "row_twos"
    if fam.kind == "toroidal_grid":
        return "row_twos" if fam.n <= fam.m else "column_twos"
    raise ChipFiringError(f"no stock winning divisor for family {fam.kind!r}")


def _cmd_gon(args: argparse.Namespace) -> int:
    g = read_gr_file(args.graph)
    if args.action == "check":
        with open(args.divisor, "r", encoding="ascii") as fh:
            d = read_divisor(fh.read(), g)
        t0 = time.monotonic()
        wins, fail_v = is_winning_divisor(g, d)
        elapsed = time.monotonic() - t0
        cert = Certificate(
            claim={"type": "winning_divisor", "graph": _label(g), "degree": d.degree},
            verdict="wins" if wins else "loses",
            witness={"failing_vertex": None if fail_v is None else fail_v + 1},
            proof="q_reduction_check",
            timing=elapsed,
        )
        _print_cert(cert, args.timing)
        return 0 if wins else 1
    if args.action == "exact":
        t0 = time.monotonic()
        res = exact_gonality(g, max_degree=args.max_degree)
        elapsed = time.monotonic() - t0
        winner = None
        if res.winning_divisor is not None:
            winner = list(res.winning_divisor.chips)
        cert = Certificate(
            claim={"type": "gonality", "graph": _label(g), "vertices": g.n},
            verdict=res.status,
            witness={
                "gonality": res.gonality,
                "lower": res.lower,
                "winning_divisor": winner,
                "losing_entries": len(res.losing_proof),
                "divisors_checked": res.divisors_checked,
            },
            proof="exhaustive_enumeration",
            timing=elapsed,
        )
        _print_cert(cert, args.timing)
        return 0
    # winning
    style = args.style if args.style is not None else _default_style(g)
    d = gen_winning_divisor(g, style, args.index)
    wins, _ = is_winning_divisor(g, d)
    if not wins:
        print(f"error: generated divisor does not win on {_label(g)}", file=sys.stderr)
        return 1
    _emit(write_divisor(g, d), args.output)
    return 0


# --- reproduce ----------------------------------------------------------------


@dataclass(frozen=True)
class ReproRow:
    """One stock claim: label, claim source, claimed value, vertex count,
    and a runner mapping a time budget to (computed text, verdict)."""

    label: str
    source: str
    claimed: str
    vertices: int
    run: Callable[[float], tuple[str, str]]


def _tw_row(label: str, source: str, kind: str, m: int, n: int, claimed: int) -> ReproRow:
    def run(budget: float) -> tuple[str, str]:
        g = make_family(kind, m, n)
        res = exact_treewidth(g, SolverLimits(time_budget=budget))
        if res.proof_status == "exact":
            return str(res.treewidth), "match" if res.treewidth == claimed else "mismatch"
        verdict = "within_interval" if res.lower <= claimed <= res.upper else "mismatch"
        return f"[{res.lower},{res.upper}]", verdict

    g = make_family(kind, m, n)
    return ReproRow(label, source, str(claimed), g.n, run)


def _order_row(label: str, family: str, m: int, n: int, claimed: int, strict: bool) -> ReproRow:
    kind, gen = _BRAMBLE_FAMILIES[family]

    def run(budget: float) -> tuple[str, str]:
        g = make_family(kind, m, n)
        b = gen(g)
        oc = min_hitting_set(b)
        cls = classify_family(g, b.elements)
        strict_ok = (cls.verdict == "strict_bramble") == strict
        ok = oc.order == claimed and strict_ok
        shown = str(oc.order) if strict_ok else f"{oc.order} ({cls.verdict})"
        return shown, "match" if ok else "mismatch"

    g = make_family(kind, m, n)
    return ReproRow(label, "covering family order", str(claimed), g.n, run)


def _gon_row(label: str, source: str, kind: str, m: int, n: int, claimed: int) -> ReproRow:
    def run(budget: float) -> tuple[str, str]:
        g = make_family(kind, m, n)
        res = exact_gonality(g)
        if res.status == "exact":
            return str(res.gonality), "match" if res.gonality == claimed else "mismatch"
        verdict = "within_interval" if claimed >= res.lower else "mismatch"
        return f">={res.lower}", verdict

    g = make_family(kind, m, n)
    return ReproRow(label, source, str(claimed), g.n, run)


def _winning_row(label: str, kind: str, m: int, n: int) -> ReproRow:
    def run(budget: float) -> tuple[str, str]:
        g = make_family(kind, m, n)
        d = gen_winning_divisor(g, _default_style(g))
        wins, _ = is_winning_divisor(g, d)
        return ("wins", "match") if wins else ("loses", "mismatch")

    g = make_family(kind, m, n)
    return ReproRow(label, "divisor construction", "wins", g.n, run)


def _repro_rows() -> list[ReproRow]:
    bench = "computed benchmark"
    formula = "width formula"
    return [
        _tw_row("tw(G3,3)", bench, "grid", 3, 3, 3),
        _tw_row("tw(Y4,2)", bench, "stacked_prism", 4, 2, 3),
        _tw_row("tw(Y6,3)", bench, "stacked_prism", 6, 3, 6),
        _tw_row("tw(T4,3)", bench, "toroidal_grid", 4, 3, 5),
        _tw_row("tw(T5,4)", bench, "toroidal_grid", 5, 4, 8),
        _tw_row("tw(Y8,4)", bench, "stacked_prism", 8, 4, 8),
        _tw_row("tw(Y7,2)", formula, "stacked_prism", 7, 2, 4),
        _tw_row("tw(Y5,3)", formula, "stacked_prism", 5, 3, 5),
        _tw_row("tw(T5,3)", formula, "toroidal_grid", 5, 3, 6),
        _order_row("order(grid@G3,4)", "grid", 3, 4, 3, True),
        _order_row("order(prism_b1@Y7,3)", "prism_b1", 7, 3, 6, True),
        _order_row("order(prism_b2@Y5,3)", "prism_b2", 5, 3, 5, True),
        _order_row("order(torus_cde@T5,3)", "torus_cde", 5, 3, 6, True),
        _order_row("order(torus_fg@T4,3)", "torus_fg", 4, 3, 6, False),
        _gon_row("gon(Y4,2)", bench, "stacked_prism", 4, 2, 4),
        _gon_row("gon(T3,3)", "companion result", "toroidal_grid", 3, 3, 6),
        _winning_row("winning(Y5,3)", "stacked_prism", 5, 3),
        _winning_row("winning(Y7,2)", "stacked_prism", 7, 2),
        _winning_row("winning(T4,3)", "toroidal_grid", 4, 3),
        _winning_row("winning(T5,3)", "toroidal_grid", 5, 3),
    ]


def _cmd_reproduce(args: argparse.Namespace) -> int:
    deadline = time.monotonic() + args.budget_ms / 1000.0
    counts = {"match": 0, "within_interval": 0, "mismatch": 0, "skipped_budget": 0}
    for row in _repro_rows():
        remaining = deadline - time.monotonic()
        if row.vertices > args.max_vertices or remaining <= 0:
            computed, verdict = "-", "skipped_budget"
        else:
            print(f"reproduce: computing {row.label}", file=sys.stderr)
            computed, verdict = row.run(remaining)
        counts[verdict] += 1
        sys.stdout.write(
            f"{row.label} claimed {row.claimed} computed {computed}"
            f" {verdict} ({row.source})\n"
        )
    sys.stdout.write(
        "rows {} match {} within_interval {} mismatch {} skipped_budget {}\n".format(
            sum(counts.values()),
            counts["match"],
            counts["within_interval"],
            counts["mismatch"],
            counts["skipped_budget"],
        )
    )
    return 1 if counts["mismatch"] else 0


# --- argument parsing ---------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chipwidth",
        description="Exact treewidth, bramble, and gonality certificates "
        "for grids, stacked prisms, and toroidal grids.",
        epilog="Exit codes: 0 success or all-match, 1 verification failure "
        "or mismatch, 2 usage error.",
    )
    parser.add_argument(
        "--seed",
        type=int,
        default=None,
        help="reserved and ignored; every algorithm is deterministic",
    )
    parser.add_argument(
        "--timing",
        action="store_true",
        help="embed measured wall seconds in JSON output "
        "(off by default so identical inputs give identical bytes)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="write a family graph in .gr format")
    p.add_argument("family", choices=sorted(_GEN_KINDS))
    p.add_argument("m", type=int)
    p.add_argument("n", type=int)
    p.add_argument("-o", "--output", default=None, help="output file (default stdout)")
    p.set_defaults(func=_cmd_gen)

    p = sub.add_parser("tw", help="exact treewidth with a tree decomposition")
    p.add_argument("graph", help=".gr file")
    p.add_argument("--budget-ms", type=int, default=60000)
    p.add_argument("--method", choices=["auto", "dp", "bb"], default="auto")
    p.add_argument("--lower-hint", type=int, default=0, help="known treewidth lower bound")
    p.add_argument("--td", default=None, help="also write the decomposition to this .td file")
    p.set_defaults(func=_cmd_tw)

    p = sub.add_parser("verify-td", help="validate a tree decomposition against a graph")
    p.add_argument("graph", help=".gr file")
    p.add_argument("decomposition", help=".td file")
    p.set_defaults(func=_cmd_verify_td)

    p = sub.add_parser("bramble", help="covering families: generate, classify, order")
    ps = p.add_subparsers(dest="action", required=True)
    for action in ("generate", "classify", "order"):
        q = ps.add_parser(action)
        q.add_argument("--family", required=True, choices=sorted(_BRAMBLE_FAMILIES))
        q.add_argument("--m", type=int, required=True)
        q.add_argument("--n", type=int, required=True)
        if action == "generate":
            q.add_argument("-o", "--output", default=None)
        if action == "order":
            q.add_argument("--claimed", type=int, default=None,
                           help="compare the computed order against this value")
        q.set_defaults(func=_cmd_bramble)

    p = sub.add_parser("gon", help="chip-firing: check, exact, winning")
    ps = p.add_subparsers(dest="action", required=True)
    q = ps.add_parser("check", help="does the divisor win the gonality game")
    q.add_argument("graph", help=".gr file")
    q.add_argument("divisor", help="divisor file")
    q.set_defaults(func=_cmd_gon)
    q = ps.add_parser("exact", help="exact gonality by exhaustive enumeration")
    q.add_argument("graph", help=".gr file")
    q.add_argument("--max-degree", type=int, default=None)
    q.set_defaults(func=_cmd_gon)
    q = ps.add_parser("winning", help="emit a stock winning divisor for a family graph")
    q.add_argument("graph", help=".gr file with family metadata")
    q.add_argument("--style", default=None,
                   choices=["column_ones", "row_twos", "column_twos"])
    q.add_argument("--index", type=int, default=0, help="which row or column to load")
    q.add_argument("-o", "--output", default=None)
    q.set_defaults(func=_cmd_gon)

    p = sub.add_parser("reproduce", help="recompute every stock claim and print a verdict table")
    p.add_argument("--max-vertices", type=int, default=20,
                   help="skip claims on graphs larger than this (default 20)")
    p.add_argument("--budget-ms", type=int, default=120000,
                   help="total time budget for the whole table (default 120000)")
    p.set_defaults(func=_cmd_reproduce)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except (GraphError, DecompositionError, BrambleError, ChipFiringError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
