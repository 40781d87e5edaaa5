"""Command-line front end: ``qrclique {roots,construct,sample,audit,demo,control}``.

Exit codes: 0 success, 1 invalid parameters or I/O, 2 numerical failure
(root count/certification, non-convergence, tail mass too heavy).
Machine-readable output goes to ``--out`` (relative paths resolve against
``$QRCLIQUE_OUTPUT_DIR`` when set) or to stdout.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional

from . import audit, ensemble, spectrum
from .defexp import kurtz_check, truncated_coefficients
from .errors import (
    GraphFormatError,
    InvalidParameterError,
    NonConvergenceError,
    PartitionSizeError,
    RootFindingError,
    TailMassError,
)
from .graph import (
    Graph,
    PartitionWitness,
    format_edge_list,
    read_edge_list,
    read_witness,
)
from .numeric import DEFAULT_PRECISION, DensityParam, to_exact

OUTPUT_DIR_ENV = "QRCLIQUE_OUTPUT_DIR"
SIGMA_ROWS_ENTIRE = 10


# --------------------------------------------------------------------------
# output helpers
# --------------------------------------------------------------------------

def resolve_output(out: Optional[str], default_name: Optional[str] = None) -> Optional[Path]:
    """Where to write: ``--out``, else ``$QRCLIQUE_OUTPUT_DIR/default_name``, else None (stdout)."""
    base = os.environ.get(OUTPUT_DIR_ENV)
    if out:
        path = Path(out)
        return Path(base) / path if base and not path.is_absolute() else path
    if base and default_name:
        return Path(base) / default_name
    return None


def _emit(text: str, path: Optional[Path]) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _say(msg: str) -> None:
    print(msg, file=sys.stdout)


def _slug(p: DensityParam) -> str:
    return str(p).replace(".", "_").replace("/", "-")


def _graph_json(g: Graph, witness: Optional[PartitionWitness]) -> str:
    data = {"label": g.label, "n": g.n, "edges": g.edges().tolist()}
    if witness is not None:
        data["witness"] = witness.to_json()
    return json.dumps(data) + "\n"


def _write_graph(g: Graph, witness: Optional[PartitionWitness], out: Optional[str],
                 fmt: str, default_stem: str) -> list[Path]:
    """Edge list plus ``.witness.json`` sidecar, or a single JSON document."""
    if fmt == "json":
        path = resolve_output(out, default_stem + ".json") or Path(default_stem + ".json")
        _emit(_graph_json(g, witness), path)
        return [path]
    if fmt != "edgelist":
        raise InvalidParameterError(f"graphs are written as edgelist or json, not {fmt}")
    path = resolve_output(out, default_stem + ".edges") or Path(default_stem + ".edges")
    _emit(format_edge_list(g), path)
    written = [path]
    if witness is not None:
        wpath = path.with_name(path.name + ".witness.json")
        _emit(json.dumps(witness.to_json()) + "\n", wpath)
        written.append(wpath)
    return written


def _report_text(report: audit.AuditReport, fmt: str) -> str:
    if fmt == "csv":
        return report.to_csv()
    if fmt != "json":
        raise InvalidParameterError(f"reports are written as json or csv, not {fmt}")
    return json.dumps(report.to_json(), indent=2) + "\n"


def _audit_config(args) -> audit.AuditConfig:
    base = audit.AuditConfig()
    return audit.AuditConfig(
        clique_tol_floor=args.clique_tol_floor if args.clique_tol_floor is not None
        else base.clique_tol_floor,
        clique_tol_scale=args.clique_tol_scale if args.clique_tol_scale is not None
        else base.clique_tol_scale,
        p3_c=args.p3_c or base.p3_c,
        p3_trials=args.p3_trials or base.p3_trials,
        p3_tolerance=args.p3_tolerance if args.p3_tolerance is not None
        else base.p3_tolerance,
        p3_fail_threshold=args.p3_fail_threshold if args.p3_fail_threshold is not None
        else base.p3_fail_threshold,
        seed=args.seed if args.seed is not None else base.seed,
    )


def _bits(args) -> int:
    return args.precision_bits or DEFAULT_PRECISION


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_roots(args) -> int:
    p = DensityParam.parse(args.p)
    if (args.truncated_k is None) == (args.entire_m is None):
        raise InvalidParameterError("give exactly one of --truncated-k and --entire-m")
    if args.truncated_k is not None:
        roots = spectrum.find_roots_truncated(p, args.truncated_k, args.precision_bits,
                                              force=args.force)
        j_max = args.truncated_k
        name = f"roots_p{_slug(p)}_k{args.truncated_k}.json"
    else:
        roots = spectrum.find_roots_entire(p, args.entire_m, _bits(args))
        j_max = min(args.entire_m, SIGMA_ROWS_ENTIRE)
        name = f"roots_p{_slug(p)}_m{args.entire_m}.json"
    weights = spectrum.roots_to_weights(roots)
    rows = spectrum.verify_elementary_symmetric(weights, j_max)
    table = spectrum.root_table(roots, weights, rows)
    if args.format == "csv":
        lines = ["i,root,weight"] + [f"{i},{a},{c}" for i, (a, c) in
                                      enumerate(zip(table["roots"], table["weights"]), 1)]
        text = "\n".join(lines) + "\n"
    else:
        text = spectrum.dump_root_table(table)
    _emit(text, resolve_output(args.out, name))
    if not all(r.ok for r in rows):
        bad = next(r.j for r in rows if not r.ok)
        raise RootFindingError(f"sigma_{bad} deviates from its target", index=bad)
    return 0


def _load_weights(args) -> spectrum.WeightSequence:
    if args.weights:
        try:
            table = json.loads(Path(args.weights).read_text())
        except json.JSONDecodeError as exc:
            raise GraphFormatError(f"weights file is not valid JSON: {exc.msg}",
                                   line=exc.lineno) from exc
        if args.p is not None and "p" not in table:
            table["p"] = args.p
        if "p" not in table:
            raise InvalidParameterError("weights file has no 'p'; pass --p")
        return spectrum.weights_from_table(table)
    if args.p is None or args.k is None:
        raise InvalidParameterError("give --p and --k, or --weights")
    roots = spectrum.find_roots_truncated(args.p, args.k, args.precision_bits)
    return spectrum.roots_to_weights(roots)


def cmd_construct(args) -> int:
    weights = _load_weights(args)
    g, witness = ensemble.build_multipartite(weights, args.n,
                                             allow_empty=weights.source == "entire")
    stem = f"construct_p{_slug(weights.p)}_parts{len(weights)}_n{args.n}"
    written = _write_graph(g, witness, args.out, args.format or "edgelist", stem)
    largest = witness.sizes[witness.largest_part()]
    _say(f"p={weights.p} n={args.n} part sizes: {' '.join(map(str, witness.sizes))}")
    _say(f"independent set (largest part): {largest} vertices "
         f"({largest / args.n:.4f} n)")
    _say("wrote " + ", ".join(map(str, written)))
    return 0


def _graphon_weights(p: DensityParam, m: Optional[int], bits: int,
                     tolerance: Fraction) -> spectrum.WeightSequence:
    if m is None:
        return spectrum.weights_below_tail(p, tolerance, bits)[1]
    weights = spectrum.roots_to_weights(spectrum.find_roots_entire(p, m, bits))
    if to_exact(weights.tail_mass) >= tolerance:
        raise TailMassError(
            f"tail mass {float(weights.tail_mass):.3g} with m={m} exceeds "
            f"{float(tolerance):.3g}; raise --m")
    return weights


def cmd_sample(args) -> int:
    p = DensityParam.parse(args.p)
    tol = Fraction(args.tail_tolerance)
    weights = _graphon_weights(p, args.m, _bits(args), tol)
    g, witness = ensemble.sample_graphon_graph(p, weights, args.n, ensemble.SeededRng(args.seed),
                                               tail_tolerance=tol)
    stem = f"sample_p{_slug(p)}_m{len(weights)}_n{args.n}_seed{args.seed}"
    written = _write_graph(g, witness, args.out, args.format or "edgelist", stem)
    largest = witness.sizes[witness.largest_part()]
    _say(f"p={p} m={len(weights)} n={args.n} seed={args.seed} "
         f"tail_mass={float(weights.tail_mass):.3g}")
    _say(f"largest part: {largest} vertices ({largest / args.n:.4f} n)")
    _say("wrote " + ", ".join(map(str, written)))
    return 0


def _read_graph(path: str) -> tuple[Graph, Optional[PartitionWitness]]:
    if path.endswith(".json"):
        try:
            data = json.loads(Path(path).read_text())
        except json.JSONDecodeError as exc:
            raise GraphFormatError(f"graph is not valid JSON: {exc.msg}", line=exc.lineno) from exc
        try:
            g = Graph.from_edges(int(data["n"]), [tuple(e) for e in data["edges"]],
                                 data.get("label", Path(path).stem))
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise GraphFormatError(f"malformed graph document: {exc}") from exc
        w = data.get("witness")
        return g, PartitionWitness.from_json(w) if w is not None else None
    return read_edge_list(path), None


def cmd_audit(args) -> int:
    g, witness = _read_graph(args.graph)
    if args.witness:
        witness = read_witness(args.witness)
    elif witness is None and not args.no_witness:
        sidecar = Path(args.graph + ".witness.json")
        if sidecar.exists():
            witness = read_witness(sidecar)
    report = audit.quasirandomness_report(g, args.p, args.k_max, _audit_config(args), witness)
    fmt = args.format or "json"
    name = f"audit_{Path(args.graph).stem}.{fmt}"
    _emit(_report_text(report, fmt), resolve_output(args.out, name))
    print(f"verdict: {report.verdict}", file=sys.stderr)
    return 0


def _summary(report: audit.AuditReport, route: str) -> list[str]:
    n, p = report.n, report.p
    lines = [f"route: {route}   p={p}  n={n}  verdict: {report.verdict}",
             f"{'row':>6} {'labeled count':>24} {'expected':>24} {'rel_dev':>10} {'tol':>7}  ok"]
    for row in [*report.cliques, report.c4]:
        lines.append(f"{row.subgraph:>6} {row.labeled_count:>24d} {float(row.expected):>24.6g} "
                     f"{row.rel_dev:>10.5f} {row.tolerance:>7.4f}  {'yes' if row.within else 'no'}")
    rand = [s for s in report.p3 if s.kind == "random"]
    if rand:
        worst = max(rand, key=lambda s: abs(s.rel_dev))
        lines.append(f"P3 random subsets: {len(rand)} of size {worst.subset_size}, "
                     f"worst rel_dev {worst.rel_dev:+.5f}")
    for s in report.witness_samples():
        lines.append(f"P3 witness part {s.part}: size {s.subset_size}, "
                     f"labeled edges {s.labeled_edges_within}, rel_dev {s.rel_dev:+.5f}")
    if report.independent_set is not None:
        ind = report.independent_set
        bound = (1 - p.value) * n / 2
        lines.append(f"independent set: {ind.size} vertices "
                     f"({'independent' if ind.independent else 'NOT independent'}), "
                     f"(1-p)n/2 = {float(bound):.1f}")
    return lines


def cmd_demo(args) -> int:
    p = DensityParam.parse(args.p)
    route = args.route
    if route == "auto":
        route = "truncated" if kurtz_check(truncated_coefficients(p, args.k)) else "graphon"
    if route == "truncated":
        roots = spectrum.find_roots_truncated(p, args.k, args.precision_bits)
        weights = spectrum.roots_to_weights(roots)
        g, witness = ensemble.build_multipartite(weights, args.n)
    else:
        if args.seed is None:
            raise InvalidParameterError("the graphon route samples vertices; pass --seed")
        tol = Fraction(args.tail_tolerance)
        weights = _graphon_weights(p, args.m, _bits(args), tol)
        g, witness = ensemble.sample_graphon_graph(p, weights, args.n,
                                                   ensemble.SeededRng(args.seed),
                                                   tail_tolerance=tol)
    report = audit.quasirandomness_report(g, p, args.k, _audit_config(args), witness)
    for line in _summary(report, route):
        _say(line)
    path = resolve_output(args.out, None)
    if path is not None:
        _emit(_report_text(report, args.format or "json"), path)
        _say(f"wrote {path}")
    return 0


def cmd_control(args) -> int:
    kind = args.kind
    if args.n is None and not (kind == "paley" and args.q):
        raise InvalidParameterError(f"{kind} needs --n")
    if kind in ("gnp", "clique-plus-isolated") and args.p is None:
        raise InvalidParameterError(f"{kind} needs --p")
    if kind == "gnp":
        if args.seed is None:
            raise InvalidParameterError("gnp is random; pass --seed")
        g = ensemble.gnp(args.n, args.p, ensemble.SeededRng(args.seed))
    elif kind == "paley":
        q = args.q or ensemble.next_paley_prime(args.n)
        g = ensemble.paley(q)
    elif kind == "clique-plus-isolated":
        g = ensemble.clique_plus_isolated(args.n, args.p)
    else:
        g = ensemble.complete_bipartite(args.n)
    stem = f"control_{g.label}".replace("(", "_").replace(")", "").replace(",", "_") \
        .replace("=", "").replace(".", "_")
    written = _write_graph(g, None, args.out, args.format or "edgelist", stem)
    _say(f"{g.label}: n={g.n} edges={g.num_edges}")
    _say("wrote " + ", ".join(map(str, written)))
    return 0


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def _add_common(sp, *, formats, seed_required=False):
    sp.add_argument("--precision-bits", type=int, default=None)
    sp.add_argument("--out", default=None, help=f"output path (relative to ${OUTPUT_DIR_ENV})")
    sp.add_argument("--format", choices=formats, default=None)
    sp.add_argument("--seed", type=int, required=seed_required, default=None)


def _add_tolerances(sp):
    g = sp.add_argument_group("audit tolerances")
    g.add_argument("--clique-tol-floor", type=float, default=None)
    g.add_argument("--clique-tol-scale", type=float, default=None)
    g.add_argument("--p3-c", default=None, help="subset fraction c (decimal string)")
    g.add_argument("--p3-trials", type=int, default=None)
    g.add_argument("--p3-tolerance", type=float, default=None)
    g.add_argument("--p3-fail-threshold", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qrclique",
        description="Clique-count counterexamples to quasirandomness, and graph audits.")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("roots", help="roots and weights of the (truncated) deformed exponential")
    sp.add_argument("--p", required=True)
    sp.add_argument("--truncated-k", "--k", dest="truncated_k", type=int)
    sp.add_argument("--entire-m", "--m", dest="entire_m", type=int)
    sp.add_argument("--force", action="store_true",
                    help="skip the Kurtz precondition (output is marked uncertified)")
    _add_common(sp, formats=["json", "csv"])
    sp.set_defaults(func=cmd_roots)

    sp = sub.add_parser("construct", help="complete multipartite counterexample graph")
    sp.add_argument("--p")
    sp.add_argument("--k", type=int)
    sp.add_argument("--weights", help="root table or {'p', 'weights'} JSON")
    sp.add_argument("--n", type=int, required=True)
    _add_common(sp, formats=["edgelist", "json"])
    sp.set_defaults(func=cmd_construct)

    sp = sub.add_parser("sample", help="uniform vertex sample from the step graphon")
    sp.add_argument("--p", required=True)
    sp.add_argument("--m", type=int, help="number of roots (default: enough for the tolerance)")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--tail-tolerance", default="1e-9")
    _add_common(sp, formats=["edgelist", "json"], seed_required=True)
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("audit", help="quasirandomness report for a graph file")
    sp.add_argument("--graph", required=True, help="edge list, or JSON written with --format json")
    sp.add_argument("--witness", help="partition witness JSON (default: <graph>.witness.json)")
    sp.add_argument("--no-witness", action="store_true")
    sp.add_argument("--p", required=True)
    sp.add_argument("--k-max", type=int, default=4)
    _add_common(sp, formats=["json", "csv"])
    _add_tolerances(sp)
    sp.set_defaults(func=cmd_audit)

    sp = sub.add_parser("demo", help="roots -> graph -> audit in one go")
    sp.add_argument("--p", required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--m", type=int, default=None)
    sp.add_argument("--route", choices=["auto", "truncated", "graphon"], default="auto")
    sp.add_argument("--tail-tolerance", default="1e-9")
    _add_common(sp, formats=["json", "csv"])
    _add_tolerances(sp)
    sp.set_defaults(func=cmd_demo)

    sp = sub.add_parser("control", help="control graphs: G(n,p), Paley, clique+isolated, bipartite")
    sp.add_argument("--kind", required=True,
                    choices=["gnp", "paley", "clique-plus-isolated", "bipartite"])
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--p", default=None)
    sp.add_argument("--q", type=int, default=None, help="Paley prime (default: next after --n)")
    _add_common(sp, formats=["edgelist", "json"])
    sp.set_defaults(func=cmd_control)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InvalidParameterError, PartitionSizeError, GraphFormatError, OSError) as exc:
        print(f"qrclique {args.command}: error: {exc}", file=sys.stderr)
        return 1
    except (RootFindingError, NonConvergenceError, TailMassError) as exc:
        index = getattr(exc, "index", None)
        where = f" (root index {index})" if index is not None else ""
        print(f"qrclique {args.command}: numerical failure{where}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
