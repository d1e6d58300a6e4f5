"""Command line interface: ``ricciscope <command> ...``.

Tables go to ``--out`` (or stdout) as RFC-4180 CSV with 17 significant
digits; ``--svg`` additionally renders scan results.  Exit codes: 0 success,
1 failed check or invalid input, 2 usage or output error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import scan as scanmod
from . import svg
from .core import (
    BracketTable,
    HomSpaceSpec,
    center_point,
    ricci_diag,
    scalar_curvature_diag,
    structure_constants_from_brackets,
    trace_constraint,
)
from .errors import NoConvergence, NoSolution, SpecError
from .fibration import all_reports, check_main_theorem, maximize_over_family
from .families import MetricFamily
from .solver import classify, find_critical, multistart_starts, search_critical, solve_diag_system
from .strata import enumerate_strata


class OutputError(Exception):
    pass


def fmt(x):
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    if isinstance(x, (tuple, list, np.ndarray)):
        return ";".join(fmt(v) for v in x)
    return str(x)


def table(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


def emit(text, path):
    if not path or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc


def load_spec(path, tensor=None):
    """A HomSpaceSpec document, or a bracket table with ``modules`` (and
    optionally ``tensor`` and ``dim_h``)."""
    with open(path) as fh:
        doc = json.load(fh)
    if "n_h" in doc:
        bt = BracketTable.from_dict(doc)
        spec = structure_constants_from_brackets(bt, doc["modules"], tensor=doc.get("tensor"), dim_h=doc.get("dim_h", bt.n_h))
    else:
        spec = HomSpaceSpec.from_dict(doc)
    if tensor is not None:
        spec = spec.with_tensor(tensor)
    return spec


def _base_valid(args):
    if args.base_valid is None:
        return False
    if args.base_valid == "all":
        return True
    return [tuple(int(i) for i in J.split(",")) for J in args.base_valid.split(";")]


REPORT_HEADER = ("label", "J", "dim_k", "alpha", "beta", "margin", "attained", "alpha_argmax")


def report_rows(reports):
    return [(r.label, r.J, r.dim_k, r.alpha, r.beta, r.margin, r.attained, r.alpha_argmax) for r in reports]


VERDICT_HEADER = ("verdict", "alpha_gh", "label", "J", "dim_k", "margin")


def verdict_row(v):
    r = v.report
    return (v.kind, v.alpha_gh, r.label if r else "", r.J if r else (), r.dim_k if r else None, v.margin)


# -- commands ---------------------------------------------------------------


def cmd_eval(args):
    spec = load_spec(args.spec, args.T)
    y = np.asarray(args.y if args.y else center_point(spec), dtype=float)
    rows = [("S", scalar_curvature_diag(spec, y)), ("trace", trace_constraint(spec, y))]
    rows += [(f"ric{i}", v) for i, v in enumerate(ricci_diag(spec, 1.0 / y))]
    emit(table(("quantity", "value"), rows), args.out)
    return 0


def cmd_strata(args):
    spec = load_spec(args.spec)
    rows = [(s.J, s.marking, s.dim_k, s.leak) for s in enumerate_strata(spec)]
    emit(table(("J", "marking", "dim_k", "leak"), rows), args.out)
    return 0


def cmd_alpha_beta(args):
    if args.family == "stiefel-theta":
        from .spaces.stiefel import theta_alpha, theta_report

        T = args.T or (1.0, 1.0, 1.0, 0.0, 0.0)
        theta, _ = maximize_over_family(lambda th: theta_alpha(T, th), -math.pi, math.pi, n_scan=24)
        rep = theta_report(T, theta, certificate=True)
        emit(table(REPORT_HEADER + ("theta",), [report_rows([rep])[0] + (theta,)]), args.out)
        return 0
    if not args.spec:
        raise SpecError("usage", "alpha-beta needs a spec file or --family")
    spec = load_spec(args.spec, args.T)
    emit(table(REPORT_HEADER, report_rows(all_reports(spec, _base_valid(args)))), args.out)
    return 0


def cmd_check(args):
    spec = load_spec(args.spec, args.T)
    v = check_main_theorem(all_reports(spec, _base_valid(args)))
    emit(table(VERDICT_HEADER, [verdict_row(v)]), args.out)
    return 0


CP_HEADER = ("g", "c", "residual", "S", "classification", "signature", "rank", "iterations")


def cp_row(cp):
    return (cp.g, cp.c, cp.residual, cp.scalar, cp.describe(), cp.signature, cp.rank, cp.iterations)


def _solve(family, start, args):
    if start is not None:
        starts = [np.asarray(start, dtype=float)]
    else:
        starts = multistart_starts(family, None, seed=args.seed)
    tol = args.tol if args.tol is not None else 1e-8
    found = search_critical(family, starts, tol=tol)
    if start is not None and not found:
        find_critical(family, starts[0], tol=tol)  # re-raise the failure
    return [classify(family, cp) for cp in found]


def cmd_solve(args):
    spec = load_spec(args.spec, args.T)
    family = MetricFamily.diagonal(spec)
    cps = _solve(family, args.start, args)
    emit(table(CP_HEADER, [cp_row(cp) for cp in cps]), args.out)
    return 0 if cps else 1


def _write_scan(rows, args, title, xlabel, ylabel, cell=None):
    emit(scanmod.rows_to_csv(rows), args.out)
    if args.svg:
        emit(svg.render(rows, title=title, xlabel=xlabel, ylabel=ylabel, cell=cell), args.svg)


def cmd_scan(args):
    if args.schema:
        sys.stdout.write(scanmod.schema_text())
        return 0
    n = args.grid
    if args.space == "ledger-obata":
        rng = args.range or (-0.5, 0.5, -0.5, 0.5)
        pipe = scanmod.ledger_obata_pipeline(solve=args.solve, a=args.a, seed=args.seed)
        labels = ("x = (T1 - T2)/2", "y = T3")
    else:
        rng = args.range or (0.02, 1.2, 0.02, 1.2)
        pipe = scanmod.stiefel_pipeline(solve=args.solve, seed=args.seed)
        labels = ("T1", "T2")
    cells = scanmod.grid_cells(rng[:2], rng[2:], n)
    rows = scanmod.region_scan(pipe, cells, threads=args.threads)
    cell = ((rng[1] - rng[0]) / n, (rng[3] - rng[2]) / n) if n else None
    _write_scan(rows, args, f"{args.space} {n}x{n}", *labels, cell=cell)
    return 0


def cmd_ricci_image(args):
    if args.schema:
        sys.stdout.write(scanmod.schema_text())
        return 0
    cfg = scanmod.SamplerConfig(n=args.n, seed=args.seed)
    rows = scanmod.ricci_image_scan(config=cfg, threads=args.threads)
    _write_scan(rows, args, f"Ricci image, N={args.n}, seed={args.seed}", "T1", "T2")
    return 0


def cmd_example(args):
    if args.space == "stiefel":
        return _example_stiefel(args)
    return _example_lo(args)


def _example_stiefel(args):
    from .spaces import stiefel as st

    T = tuple(args.T) if args.T else (1.0, 1.0, 1.0, 0.0, 0.0)
    op = args.op
    if op == "scalar":
        x = args.x or (1.0, 1.0, 1.0, 0.0, 0.0)
        emit(table(("S", "trace"), [(st.stiefel_scalar(x), st.stiefel_trace(x, T))]), args.out)
    elif op == "space":
        spec, _ = st.stiefel_space(args.s, args.theta, T)
        emit(spec.to_json(indent=1) + "\n", args.out)
    elif op == "alpha-beta":
        cf = st.stiefel_alpha_beta(T)
        rows = [(k, cf[k][0], cf[k][1]) for k in ("k0", "k1", "k2", "ktheta0")]
        out = table(("subalgebra", "alpha", "beta"), rows)
        out += table(("theta0", "gamma", "region"), [(cf["theta0"], cf["gamma"], cf["region"] or "")])
        emit(out, args.out)
    elif op == "check":
        emit(table(VERDICT_HEADER, [verdict_row(st.stiefel_check(T))]), args.out)
    elif op == "solve":
        family = st.stiefel_family(T)
        cps = []
        if T[3] == 0 and T[4] == 0:
            try:
                cps.append(classify(family, solve_diag_system(T, family)))
            except NoSolution:
                pass
        seen = []
        for cp in _solve(family, args.x, args):
            if np.max(np.abs(cp.g[3:])) <= 1e-6 * np.max(np.abs(cp.g)):
                continue
            # one representative per normalizer orbit
            inv = np.append(cp.g[:3], np.hypot(cp.g[3], cp.g[4]))
            if not any(np.max(np.abs(inv - o)) <= 1e-6 * np.max(np.abs(o)) for o in seen):
                seen.append(inv)
                cps.append(cp)
        emit(table(CP_HEADER, [cp_row(cp) for cp in cps]), args.out)
    elif op == "normalizer":
        x = args.x or (1.0, 1.0, 1.0, 0.2, 0.0)
        g = st.StiefelMetric.from_params(x)
        rows = [(eta, st.stiefel_normalizer(eta, g).params) for eta in np.linspace(0, math.pi, 9)]
        emit(table(("eta", "x"), rows), args.out)
    return 0


def _example_lo(args):
    from .spaces import ledger_obata as lo

    T = tuple(args.T) if args.T else (0.5, 0.5, 0.0)
    op = args.op
    if op == "scalar":
        x = args.x or (1.0, 1.0, 0.0)
        emit(table(("S", "trace"), [(lo.lo_scalar(x, args.a), lo.lo_trace(x, T, args.a))]), args.out)
    elif op == "space":
        spec, _ = lo.lo_space(args.a, tensor=T[:2])
        emit(spec.to_json(indent=1) + "\n", args.out)
    elif op == "alpha-beta":
        rep = lo.lo_report(T, args.a)
        rows = [(k, a, b) for k, (a, b) in rep["alpha_beta"].items()]
        out = table(("subalgebra", "alpha", "beta"), rows)
        flags = rep["einstein"]
        out += table(("condition", "diag_critical") + tuple(flags), [(rep["condition"], rep["diag_critical"]) + tuple(flags.values())])
        emit(out, args.out)
    elif op == "check":
        emit(table(VERDICT_HEADER, [verdict_row(lo.lo_check(T, args.a))]), args.out)
    elif op == "solve":
        if args.a != 3:
            raise SpecError("usage", "critical-point search uses the su(2) table (a = 3)")
        cps = _solve(lo.lo_family(T), args.x, args)
        emit(table(CP_HEADER, [cp_row(cp) for cp in cps]), args.out)
    elif op == "normalizer":
        rows = [(n, lo.r_pullback(T, n)) for n in range(3)]
        emit(table(("n", "R^n pullback of T"), rows), args.out)
    return 0


def cmd_verify(args):
    from .fixtures import run_fixtures

    if args.spec:
        try:
            load_spec(args.spec)
        except SpecError as exc:
            print(f"FAIL {args.spec}: {exc.code}: {exc}")
            return 1
        print(f"PASS {args.spec}: valid")
        return 0
    results = run_fixtures(args.only)
    for r in results:
        print(r.line())
    failed = [r for r in results if not r.passed]
    if failed:
        print(f"FAILED: {failed[0].name} ({len(failed)} of {len(results)} fixtures failed)")
        return 1
    print(f"all {len(results)} fixtures passed")
    return 0


# -- argument parsing -------------------------------------------------------


def _floats(text):
    return [float(v) for v in text.replace(",", " ").split()]


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None, help="solver residual tolerance (default 1e-8)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("--out", default=None, help="output file (default stdout)")
    common.add_argument("--svg", default=None, help="also write an SVG plot (scan commands)")

    p = argparse.ArgumentParser(prog="ricciscope", description=__doc__.splitlines()[0])
    p.add_argument("--schema", action="store_true", help="print the scan CSV schema and exit")
    sub = p.add_subparsers(dest="command")

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=fn)
        return sp

    sp = add("eval", cmd_eval, "scalar curvature, trace and Ricci of a diagonal metric")
    sp.add_argument("spec")
    sp.add_argument("--y", type=_floats, help="inverse metric coordinates y_i = 1/x_i")
    sp.add_argument("--T", type=_floats)

    sp = add("strata", cmd_strata, "boundary strata and their markings")
    sp.add_argument("spec")

    for name, fn in (("alpha-beta", cmd_alpha_beta), ("check", cmd_check)):
        sp = add(name, fn, "alpha/beta of intermediate subalgebras" if fn is cmd_alpha_beta else "global-maximum criterion")
        sp.add_argument("spec", nargs="?" if fn is cmd_alpha_beta else None)
        sp.add_argument("--T", type=_floats)
        sp.add_argument(
            "--base-valid",
            default=None,
            help="'all' or ';'-separated index sets like '0;0,1' whose diagonal base metrics are Ad_K-invariant",
        )
        if fn is cmd_alpha_beta:
            sp.add_argument("--family", choices=["stiefel-theta"], default=None)

    sp = add("solve", cmd_solve, "critical points among diagonal metrics")
    sp.add_argument("spec")
    sp.add_argument("--start", type=_floats, help="start metric x (default: multistart)")
    sp.add_argument("--T", type=_floats)

    sp = add("scan", cmd_scan, "region scan over a grid of T")
    sp.add_argument("--space", choices=["stiefel", "ledger-obata"], default="ledger-obata")
    sp.add_argument("--grid", type=int, default=50, help="cells per axis")
    sp.add_argument("--range", type=_floats, default=None, help="u0 u1 v0 v1")
    sp.add_argument("--solve", action="store_true", help="also search and classify critical points")
    sp.add_argument("--a", type=int, default=3)
    sp.add_argument("--schema", action="store_true")

    sp = add("ricci-image", cmd_ricci_image, "sampled diagonal Ricci tensors on the Stiefel space")
    sp.add_argument("--n", type=int, default=100_000)
    sp.add_argument("--schema", action="store_true")

    sp = add("example", cmd_example, "built-in spaces")
    sp.add_argument("space", choices=["stiefel", "ledger-obata"])
    sp.add_argument("op", choices=["scalar", "space", "alpha-beta", "check", "solve", "normalizer"])
    sp.add_argument("--T", type=_floats)
    sp.add_argument("--x", type=_floats, help="metric coordinates")
    sp.add_argument("--a", type=int, default=3)
    sp.add_argument("--s", type=float, default=1.0)
    sp.add_argument("--theta", type=float, default=0.0)

    sp = add("verify", cmd_verify, "run the fixture suite")
    sp.add_argument("--only", action="append", default=None, help="fixture group (repeatable)")
    sp.add_argument("--spec", default=None, help="validate a spec file instead")
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.schema and args.command is None:
        sys.stdout.write(scanmod.schema_text())
        return 0
    if args.command is None:
        parser.print_help()
        return 2
    try:
        return args.func(args)
    except OutputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except SpecError as exc:
        print(f"error: {exc.code}: {exc}", file=sys.stderr)
        return 1
    except (NoConvergence, NoSolution, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
