"""Command line interface.

Every subcommand prints a report (one record per computed quantity or
check) and exits with status 1 if any check failed, 2 on bad input.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .exact import (
    ElementaryDivisors,
    brute_force_tree_count,
    fourier_tree_count,
    laplacian_divisors,
    tree_count,
)
from .experiments import (
    LATTICES,
    ROUTES,
    SCOPES,
    Record,
    Report,
    check,
    entropy_closed_forms,
    link_polynomials,
    load_tolerances,
    route_tolerances,
    tree_entropy,
    torsion_growth_series,
    verify_report,
)
from .laurent import format_poly, parse_poly
from .mahler import ToleranceNotReached, mahler_2var, mahler_2var_grid
from .mapfile import MapParseError, export_map, resolve_link
from .periodic_graph import MapValidationError, planar_cut, tait_graph, torus_quotient

TREE_ROUTES = ("auto", "bareiss", "modular", "fourier", "brute-force")


def _n_list(text: str) -> list[int]:
    try:
        ns = [int(t) for t in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad n-list {text!r}; expected e.g. 1,2,4,8") from None
    if not ns or min(ns) < 1:
        raise argparse.ArgumentTypeError("n-list entries must be positive")
    return ns


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def _ns(args) -> list[int]:
    if args.n_list is not None:
        return args.n_list
    return [args.n] if args.n is not None else [1]


def render_text(report: Report) -> str:
    lines = []
    for r in report.records:
        flag = "PASS" if r.passed else "FAIL"
        parts = [f"{flag}  {r.id}", f"computed={r.computed}"]
        if r.target is not None:
            parts.append(f"target={r.target}")
        if r.tolerance is not None:
            parts.append(f"tol={r.tolerance}")
        parts.append(f"[{r.method}, {r.runtime_ms:.1f} ms]")
        lines.append("  ".join(parts))
    return "\n".join(lines)


def _info(report: Report, id: str, computed, method: str, runtime_ms: float = 0.0, tolerance=None) -> None:
    report.records.append(Record(id, computed, None, tolerance, True, runtime_ms, method))


def format_divisors(ed: ElementaryDivisors) -> str:
    """Nonzero divisors in divisibility order, ones collapsed as ``1^k``, then the zero count."""
    ones = sum(1 for d in ed.divisors if d == 1)
    parts = ([f"1^{ones}"] if ones else []) + [str(d) for d in ed.torsion]
    return (" ".join(parts) or "none") + f" ; zeros={ed.zeros}"


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_charpoly(args) -> Report:
    m = resolve_link(args.link)
    start = time.perf_counter()
    d, p = link_polynomials(m, args.shaded_class)
    ms = (time.perf_counter() - start) * 1e3
    rep = Report()
    _info(rep, f"charpoly/{m.name}/D/{args.shaded_class}", format_poly(d), "det L(x,y) of the Tait graph", ms)
    _info(rep, f"charpoly/{m.name}/p", format_poly(p), "det K(z,w) of the overlaid graph, canonical", ms)
    return rep


def cmd_mahler(args) -> Report:
    if args.poly is not None:
        poly, label = parse_poly(args.poly), "poly"
    else:
        m = resolve_link(args.link)
        d, p = link_polynomials(m, args.shaded_class)
        poly, label = (p, f"{m.name}/p") if args.which == "p" else (d, f"{m.name}/D/{args.shaded_class}")
    rep = Report()
    start = time.perf_counter()
    if args.route == "grid":
        res = mahler_2var_grid(poly, args.grid_n)
        ok = True
    else:
        try:
            res, ok = mahler_2var(poly, tol=args.tol), True
        except ToleranceNotReached as exc:
            res, ok = exc.partial, False
    ms = (time.perf_counter() - start) * 1e3
    method = f"{res.method}; error={res.error:.3g}; samples={res.samples}"
    rep.records.append(Record(f"mahler/{label}", res.value, None, args.tol, ok, ms, method))
    return rep


def _tree_routes(text: str) -> list[str]:
    routes = [r.strip() for r in text.split(",") if r.strip()]
    for r in routes:
        if r not in TREE_ROUTES:
            raise ValueError(f"unknown tree route {r!r}; choose from {', '.join(TREE_ROUTES)}")
    return routes


def cmd_trees(args) -> Report:
    m = resolve_link(args.link)
    g = tait_graph(m, args.shaded_class)
    routes = _tree_routes(args.route or "auto")
    kind = "planar" if args.planar else "torus"
    rep = Report()
    for n in _ns(args):
        h = planar_cut(g, n) if args.planar else torus_quotient(g, n)
        values = {}
        for route in routes:
            start = time.perf_counter()
            if route == "fourier":
                if args.planar:
                    raise ValueError("the Fourier route applies to torus quotients only")
                tau = fourier_tree_count(g, n)
            elif route == "brute-force":
                tau = brute_force_tree_count(h)
            else:
                tau = tree_count(h, route)
            ms = (time.perf_counter() - start) * 1e3
            values[route] = tau
            _info(rep, f"trees/{m.name}/{args.shaded_class}/{kind}/n={n}/{route}", tau, route, ms)
        if len(values) > 1:
            check(rep, f"trees/{m.name}/{args.shaded_class}/{kind}/n={n}/agreement", "distinct values across routes",
                  1, 0, lambda: len(set(values.values())), kind="exact")
    return rep


def cmd_torsion(args) -> Report:
    m = resolve_link(args.link)
    g = tait_graph(m, args.shaded_class)
    ns = _ns(args)
    rep = Report()
    if args.method in ("auto", "snf"):
        for n in ns:
            if args.method == "auto" and n > 6:
                continue
            start = time.perf_counter()
            ed = laplacian_divisors(torus_quotient(g, n))
            ms = (time.perf_counter() - start) * 1e3
            _info(rep, f"torsion/{m.name}/{args.shaded_class}/n={n}/divisors", format_divisors(ed), "smith normal form", ms)
    series = torsion_growth_series(m, ns, args.normalizer, args.shaded_class, args.method)
    for r in series.rows:
        base = f"torsion/{m.name}/{args.shaded_class}/n={r.n}"
        if r.error is not None:
            rep.records.append(Record(f"{base}/order", None, None, None, False, r.runtime_ms, f"{r.method}; error: {r.error}"))
            continue
        _info(rep, f"{base}/order", r.torsion, r.method, r.runtime_ms)
        _info(rep, f"{base}/ratio-{args.normalizer}", r.ratio, f"log order / {r.normalizer:.6g}")
        if args.check and r.n <= 6:
            h = torus_quotient(g, r.n)
            check(rep, f"{base}/equals-tree-count", "torsion order == tree count", r.torsion, 0,
                  lambda h=h: tree_count(h), kind="exact")
    return rep


def cmd_entropy(args) -> Report:
    tols = load_tolerances(args.config)
    closed = entropy_closed_forms()
    route_tol = route_tolerances(tols)
    lattices = list(LATTICES) if args.lattice == "all" else [args.lattice]
    routes = list(ROUTES) if (args.route or "mahler") == "all" else [args.route or "mahler"]
    for r in routes:
        if r not in ROUTES:
            raise ValueError(f"unknown entropy route {r!r}; choose from {', '.join(ROUTES)} or all")
    rep = Report()
    for lat in lattices:
        for route in routes:
            check(rep, f"entropy/{lat}/{route}", route, closed[lat], route_tol[route],
                  lambda lat=lat, route=route: tree_entropy(lat, route, tol=args.tol, n_max=args.n))
    return rep


def cmd_verify(args) -> Report:
    overrides = load_tolerances(args.config) if args.config else {}
    if args.tol is not None:
        overrides["mahler_tol"] = args.tol
    return verify_report(args.scope, overrides or None)


def cmd_export_map(args) -> Report | None:
    text = export_map(resolve_link(args.link))
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return None


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="biperiodic", description="Torsion growth, Mahler measures and volumes of biperiodic alternating links.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, link=True, fmt=True):
        if link:
            p.add_argument("--link", default="square-weave", help="builtin name or map file (default square-weave)")
            p.add_argument("--shaded-class", choices=("shaded", "white"), default="shaded",
                           help="checkerboard class whose Tait graph is used")
        if fmt:
            p.add_argument("--format", choices=("text", "csv", "json"), default="text")
        return p

    p = common(sub.add_parser("charpoly", help="print D(x,y) and p(z,w)"))
    p.set_defaults(func=cmd_charpoly)

    p = common(sub.add_parser("mahler", help="Mahler measure of D, p or a given polynomial"))
    p.add_argument("--which", choices=("p", "D"), default="p")
    p.add_argument("--poly", help="polynomial text, e.g. '4 - x - x^-1 - y - y^-1'")
    p.add_argument("--route", choices=("jensen", "grid"), default="jensen")
    p.add_argument("--grid-n", type=_positive, default=1024)
    p.add_argument("--tol", type=float, default=1e-8)
    p.set_defaults(func=cmd_mahler)

    p = common(sub.add_parser("trees", help="spanning trees of torus quotients or planar windows"))
    p.add_argument("--n", type=_positive)
    p.add_argument("--n-list", type=_n_list)
    p.add_argument("--route", help=f"comma-separated subset of {', '.join(TREE_ROUTES)} (default auto)")
    p.add_argument("--planar", action="store_true", help="use the planar window instead of the torus quotient")
    p.set_defaults(func=cmd_trees)

    p = common(sub.add_parser("torsion", help="torsion orders, divisor lists and growth ratios"))
    p.add_argument("--n", type=_positive)
    p.add_argument("--n-list", type=_n_list)
    p.add_argument("--normalizer", choices=("n2", "volume"), default="n2")
    p.add_argument("--method", choices=("auto", "snf", "fourier"), default="auto")
    p.add_argument("--check", action="store_true", help="compare with the tree count for n <= 6")
    p.set_defaults(func=cmd_torsion)

    p = common(sub.add_parser("entropy", help="spanning-tree entropy of a lattice"), link=False)
    p.add_argument("--lattice", choices=(*LATTICES, "all"), default="all")
    p.add_argument("--route", help=f"one of {', '.join(ROUTES)} or all (default mahler)")
    p.add_argument("--n", type=_positive, help="largest n used by the finite-size routes")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--config", help="tolerance file (JSON)")
    p.set_defaults(func=cmd_entropy)

    p = common(sub.add_parser("verify", help="pass/fail verification report"), link=False)
    p.add_argument("--scope", choices=(*SCOPES, "all"), default="all")
    p.add_argument("--tol", type=float, help="Mahler quadrature tolerance")
    p.add_argument("--config", help="tolerance file (JSON) overriding the defaults")
    p.set_defaults(func=cmd_verify)

    p = common(sub.add_parser("export-map", help="write a link's map document"), fmt=False)
    p.add_argument("--output", "-o", help="file to write (default stdout)")
    p.set_defaults(func=cmd_export_map)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report = args.func(args)
    except (MapParseError, MapValidationError, ValueError, OSError) as exc:
        print(f"biperiodic: error: {exc}", file=sys.stderr)
        return 2
    if report is None:
        return 0
    fmt = getattr(args, "format", "text")
    print(render_text(report) if fmt == "text" else report.render(fmt).rstrip("\n"))
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
