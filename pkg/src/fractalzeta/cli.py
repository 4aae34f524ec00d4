"""Command-line frontend.

Data goes to stdout (or ``--out``); warnings and errors go to stderr.  Exit
codes: 0 success, 2 invalid input, 3 numerical-domain error.
"""

from __future__ import annotations

import argparse
import os
import sys

from .dimension import estimate_abscissa, exact_abscissa
from .errors import ConstructionError, EstimateUnavailable, FractalZetaError, NumericalDomainError
from .parse import parse_complex, parse_expr, parse_set
from .prescriber import construct, eval_constructed, report
from .strings import MaxTerms, enumerate_lengths, to_json
from .textio import csv_line, dumps
from .zeta import DEFAULT_GUARD, eval_zeta

__all__ = ["main", "build_parser"]


def _warn(msg: str):
    print(f"warning: {msg}", file=sys.stderr)


def _window(text: str):
    parts = text.split(":")
    if len(parts) != 4:
        raise ConstructionError(f"window must be reMin:reMax:imMin:imMax, got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise ConstructionError(f"window bounds must be numbers, got {text!r}") from None


def _res(text: str):
    parts = text.lower().split("x")
    if len(parts) != 2 or not all(p.isdigit() for p in parts):
        raise ConstructionError(f"resolution must look like 200x200, got {text!r}")
    return int(parts[0]), int(parts[1])


def _has_construction(args) -> bool:
    given = [x is not None for x in (args.dinf, args.d1, args.d)]
    if any(given) and not all(given):
        raise ConstructionError("a construction needs all of --dinf, --d1 and --d")
    return all(given)


def _source(args):
    """(expression, PrescribedString or None) from --expr or the construction flags."""
    has_c = _has_construction(args)
    if has_c and args.expr:
        raise ConstructionError("give either --expr or --dinf/--d1/--d, not both")
    if has_c:
        p = construct(args.dinf, args.d1, args.d)
        return p.expr, p
    if args.expr:
        return parse_expr(args.expr), None
    raise ConstructionError("an input string is required: --expr or --dinf/--d1/--d")


def _emit(args, text: str):
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _json_only(args):
    if args.format != "json":
        raise ConstructionError(f"{args.command} writes JSON only")


# ---------------------------------------------------------------------------
# commands


def cmd_construct(args):
    _json_only(args)
    if not _has_construction(args):
        raise ConstructionError("construct needs --dinf, --d1 and --d")
    p = construct(args.dinf, args.d1, args.d)
    out = {"construction": p.to_json(), "report": report(p).to_json()}
    _emit(args, dumps(out))
    if args.figure:
        from .plotting import plot_singularities

        plot_singularities(p, args.figure)


def cmd_eval(args):
    _json_only(args)
    e, p = _source(args)
    s = parse_complex(args.s)
    tol = args.tol if args.tol is not None else 1e-10
    r = eval_constructed(p, s, tol, args.guard) if p is not None else eval_zeta(e, s, tol, args.guard)
    out = {"expr": to_json(e), "s": s, "value": r.value, "error_bound": r.error_bound,
           "terms_used": r.terms_used, "certified": r.certified, "tol": tol}
    _emit(args, dumps(out))


def cmd_lengths(args):
    e, _ = _source(args)
    n = args.n if args.n is not None else 20
    terms = list(enumerate_lengths(e, MaxTerms(n)))
    if args.format == "csv":
        text = "length,multiplicity\n" + "".join(csv_line((t.length, str(t.multiplicity))) for t in terms)
    else:
        text = dumps({"count": sum(t.multiplicity for t in terms),
                      "lengths": [{"length": t.length, "multiplicity": t.multiplicity} for t in terms]})
    _emit(args, text)


def cmd_dim(args):
    _json_only(args)
    e, p = _source(args)
    n = args.n if args.n is not None else 10_000
    out = {"exact": None, "estimate": None}
    try:
        out["exact"] = exact_abscissa(e).to_json()
    except EstimateUnavailable as exc:
        _warn(str(exc))
    est = estimate_abscissa(e, n)
    out["estimate"] = est.to_json()
    out["n_terms"] = n
    if out["exact"] is not None:
        out["agrees"] = est.brackets(out["exact"]["value"])
    _emit(args, dumps(out))
    if args.figure:
        from .plotting import plot_counting

        terms = list(enumerate_lengths(e, MaxTerms(n)))
        plot_counting(terms, None if out["exact"] is None else out["exact"]["value"], est.value, args.figure)


def _dzeta_set(args):
    from .distance import construct_set

    has_c = _has_construction(args)
    if has_c and args.set:
        raise ConstructionError("give either --set or --dinf/--d1/--d, not both")
    if has_c:
        return construct_set(args.dinf, args.d1, args.d, args.N)
    if args.set:
        return parse_set(args.set)
    raise ConstructionError("a set is required: --set or --dinf/--d1/--d with --N")


def cmd_dzeta(args):
    from . import distance as dz

    _json_only(args)
    A = _dzeta_set(args)
    s = parse_complex(args.s)
    delta = args.delta if args.delta is not None else dz.default_delta(A)
    n = args.n if args.n is not None else 1_000_000
    method = args.method
    if method == "auto":
        if isinstance(A, dz.Realization):
            method = "closed-form"
        else:
            method = "monte-carlo"
    out = {"set": A.to_json(), "s": s, "delta": delta, "method": method}
    if method == "closed-form":
        if not isinstance(A, dz.Realization):
            raise ConstructionError("the closed form needs a realization in R")
        v, b = dz.dzeta_line_bounded(A.of, s, delta, args.tol if args.tol is not None else 1e-12)
        out.update(value=v, error_bound=b)
    elif method == "shift":
        if not (isinstance(A, dz.Grill) and isinstance(A.base, dz.Realization)):
            raise ConstructionError("the shift formula needs grill:k(realization:...)")
        v, se = dz.dzeta_grill(A.base.of, A.ambient, s, delta, n, args.seed)
        out.update(value=v, stderr=se, n_samples=n, seed=args.seed)
    else:
        r = dz.dzeta_monte_carlo(A, s, delta, n, args.seed)
        out.update(value=r.value, stderr=r.stderr, n_samples=r.n_samples, seed=r.seed, unsampled=r.unsampled)
    _emit(args, dumps(out))


def _run_scan(args, e):
    from .scan import scan

    window = _window(args.window)
    grid = scan(e, window, _res(args.res), args.tol if args.tol is not None else 1e-6, args.guard,
                evaluate=not args.markers_only)
    if grid.clipped:
        _warn(f"window reMin {grid.requested_re_min} reaches the barrier; clipped to {grid.window[0]!r}")
    return grid


def cmd_scan(args):
    from .scan import barrier_of

    e, _ = _source(args)
    grid = _run_scan(args, e)
    _emit(args, grid.to_csv() if args.format == "csv" else dumps(grid.to_json()))
    if args.figure:
        from .plotting import plot_scan

        plot_scan(grid.plot_data(), args.figure, barrier_of(e))


def cmd_report(args):
    """Construction, scan and dimension outputs plus their figures in one directory."""
    from .plotting import plot_counting, plot_scan, plot_singularities

    if not _has_construction(args):
        raise ConstructionError("report needs --dinf, --d1 and --d")
    p = construct(args.dinf, args.d1, args.d)
    d = args.out_dir
    os.makedirs(d, exist_ok=True)
    files = {}

    def put(name, text):
        path = os.path.join(d, name)
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        files[name] = path

    put("construction.json", dumps({"construction": p.to_json(), "report": report(p).to_json()}))
    if args.window is None:
        from .scan import CLIP_FRACTION

        hi = max(p.d, p.d1) + 0.2
        args.window = f"{p.d_inf + CLIP_FRACTION * (hi - p.d_inf)!r}:{hi!r}:0:3"
    grid = _run_scan(args, p.expr)
    put("scan.csv", grid.to_csv())
    n = args.n if args.n is not None else 10_000
    est = estimate_abscissa(p.expr, n)
    exact = exact_abscissa(p.expr)
    put("dimension.json", dumps({"exact": exact.to_json(), "estimate": est.to_json(), "n_terms": n,
                                 "agrees": est.brackets(exact.value)}))
    for name, draw in (
        ("scan.png", lambda f: plot_scan(grid.plot_data(), f, p.d_inf)),
        ("singularities.png", lambda f: plot_singularities(p, f)),
        ("counting.png", lambda f: plot_counting(list(enumerate_lengths(p.expr, MaxTerms(n))), exact.value, est.value, f)),
    ):
        path = os.path.join(d, name)
        draw(path)
        files[name] = path
    sys.stdout.write(dumps({"files": files}))


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fractalzeta", description="Geometric zeta functions of fractal strings and sets.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, func, help_, source=True):
        sp = sub.add_parser(name, help=help_, description=help_)
        sp.set_defaults(func=func)
        if source:
            sp.add_argument("--expr", help="string in the expression mini-language")
        sp.add_argument("--dinf", type=float, help="barrier abscissa of a construction")
        sp.add_argument("--d1", type=float, help="meromorphic abscissa of a construction")
        sp.add_argument("--d", type=float, help="abscissa of convergence of a construction")
        sp.add_argument("--out", help="write data here instead of stdout")
        sp.add_argument("--format", choices=("csv", "json"), default="json")
        sp.add_argument("--tol", type=float, help="absolute tolerance (relative to max(1,|zeta|) for scan)")
        sp.add_argument("--guard", type=float, default=DEFAULT_GUARD, help="exclusion radius around singularities")
        return sp

    sp = add("construct", cmd_construct, "build a string with prescribed abscissae", source=False)
    sp.add_argument("--figure", help="PNG of the singular points")

    sp = add("eval", cmd_eval, "evaluate zeta at one point")
    sp.add_argument("--s", required=True, help="complex point, e.g. 1+2i")

    sp = add("lengths", cmd_lengths, "list the largest lengths")
    sp.add_argument("--n", type=int, help="number of lengths, multiplicities counted (default 20)")

    sp = add("dim", cmd_dim, "exact and estimated abscissa of convergence")
    sp.add_argument("--n", type=int, help="lengths used by the estimator (default 10000)")
    sp.add_argument("--figure", help="PNG of the counting function")

    sp = add("dzeta", cmd_dzeta, "distance zeta function of a set", source=False)
    sp.add_argument("--set", help="set in the expression mini-language")
    sp.add_argument("--N", type=int, default=2, help="ambient dimension of a constructed set")
    sp.add_argument("--s", required=True)
    sp.add_argument("--delta", type=float, help="neighborhood radius (default: largest gap)")
    sp.add_argument("--n", type=int, help="Monte Carlo samples (default 1000000)")
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--method", choices=("auto", "closed-form", "shift", "monte-carlo"), default="auto")

    sp = add("scan", cmd_scan, "grid of zeta values with singularity markers")
    sp.add_argument("--window", required=True, help="reMin:reMax:imMin:imMax")
    sp.add_argument("--res", default="60x40", help="nodes along Re x Im, e.g. 200x200")
    sp.add_argument("--markers-only", action="store_true", help="skip evaluation, only place markers")
    sp.add_argument("--figure", help="PNG heat map of log|zeta|")

    sp = add("report", cmd_report, "construction, scan, dimension and figures in a directory", source=False)
    sp.add_argument("--out-dir", default="report")
    sp.add_argument("--window", help="scan window (default right of the barrier)")
    sp.add_argument("--res", default="60x40")
    sp.add_argument("--n", type=int)
    sp.set_defaults(markers_only=False)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except ConstructionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NumericalDomainError, EstimateUnavailable) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except FractalZetaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
