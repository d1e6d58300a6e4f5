"""Ricci-image sampling and region scans over a grid of T.

Every cell is computed independently from its own parameters, so scans can
run on a thread pool; results always come back in input order.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import ricci_full
from .errors import DomainError, NoSolution
from .solver import DEGENERATE, classify, multistart_starts, search_critical, solve_diag_system

SCHEMA_VERSION = 1
COLUMNS = (
    "space",
    "u",
    "v",
    "T",
    "has_diag_critical",
    "has_nondiag_critical",
    "classification",
    "S",
    "alpha_gh",
    "verdict",
    "margin",
    "g",
    "error",
)
COLUMN_DOC = {
    "space": "pipeline id (stiefel, ledger-obata, stiefel-ricci-image)",
    "u": "first grid coordinate (T1, or x for ledger-obata)",
    "v": "second grid coordinate (T2, or y for ledger-obata)",
    "T": "prescribed tensor coordinates, ';'-separated",
    "has_diag_critical": "a critical point with vanishing off-diagonal coordinates was found",
    "has_nondiag_critical": "a critical point with nonzero off-diagonal coordinates was found",
    "classification": "LocalMax | Saddle(i,j) | DegenerateCandidate of the reported point",
    "S": "scalar curvature of the reported critical point",
    "alpha_gh": "largest alpha over the intermediate subalgebras",
    "verdict": "GlobalMaxGuaranteed | Inconclusive | MaximalIsotropy",
    "margin": "beta - alpha of the deciding subalgebra",
    "g": "metric coordinates of the reported point (sample metric for ricci-image), ';'-separated",
    "error": "per-cell failure message, empty on success",
}

OFFDIAG_TOL = 1e-6


@dataclass(frozen=True)
class ScanRow:
    space: str
    u: float
    v: float
    T: tuple = ()
    has_diag_critical: bool = None
    has_nondiag_critical: bool = None
    classification: str = ""
    S: float = None
    alpha_gh: float = None
    verdict: str = ""
    margin: float = None
    g: tuple = ()
    error: str = ""

    @property
    def params(self):
        return (self.u, self.v)


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, bool):
        return "1" if x else "0"
    if isinstance(x, (tuple, list, np.ndarray)):
        return ";".join(_fmt(float(v)) for v in x)
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def schema_text():
    lines = [f"# ricciscope scan CSV schema v{SCHEMA_VERSION}"]
    lines += [f"{name}: {COLUMN_DOC[name]}" for name in COLUMNS]
    return "\n".join(lines) + "\n"


def rows_to_csv(rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(COLUMNS)
    for row in rows:
        w.writerow([_fmt(getattr(row, c)) for c in COLUMNS])
    return buf.getvalue()


def _parse(text, kind):
    if text == "":
        return None if kind != "tuple" else ()
    if kind == "bool":
        return text == "1"
    if kind == "float":
        return float(text)
    if kind == "tuple":
        return tuple(float(v) for v in text.split(";"))
    return text


_KINDS = {
    "u": "float",
    "v": "float",
    "S": "float",
    "alpha_gh": "float",
    "margin": "float",
    "T": "tuple",
    "g": "tuple",
    "has_diag_critical": "bool",
    "has_nondiag_critical": "bool",
}


def rows_from_csv(text):
    reader = csv.DictReader(io.StringIO(text))
    out = []
    for rec in reader:
        kw = {c: _parse(rec[c], _KINDS.get(c, "str")) for c in COLUMNS}
        kw["space"] = kw["space"] or ""
        kw["classification"] = kw["classification"] or ""
        kw["verdict"] = kw["verdict"] or ""
        kw["error"] = kw["error"] or ""
        out.append(ScanRow(**kw))
    return out


# -- Ricci image ------------------------------------------------------------


@dataclass(frozen=True)
class SamplerConfig:
    n: int = 100_000
    seed: int = 0
    u_range: tuple = (0.02, 50.0)
    x3_max: float = 0.5
    chunk: int = 5000


def _ricci_image_chunk(family, u, x3):
    P = np.column_stack([np.ones_like(u), u, 1.0 / (4.0 * u), x3, np.zeros_like(u)])
    G = family.matrix(P)
    pd = np.linalg.eigvalsh(G)[:, 0] > 0
    P, G = P[pd], G[pd]
    R = ricci_full(family.bt, G)
    keep = np.linalg.eigvalsh(R)[:, 0] > 0
    r = family.params(R[keep])
    r = r / r[:, :1]
    return [
        ScanRow("stiefel-ricci-image", float(t[1]), float(t[2]), tuple(t), g=tuple(p))
        for t, p in zip(r, P[keep])
    ]


def ricci_image_scan(space=None, config=SamplerConfig(), threads=1):
    """Diagonal Ricci tensors of non-diagonal Stiefel metrics.

    Off-diagonal Ricci entries vanish on the slice x0^2 = 4 x1 x2, and the
    normalizer rotates x4 away, so metrics x = (1, u, 1/(4u), x3, 0) with u
    log-uniform and 0 < x3 < x3_max cover every such Ricci tensor up to
    scale.  Positive-definite results normalized to T0 = 1 give one row
    each, u = T1 and v = T2.
    """
    if space is None:
        from .spaces.stiefel import stiefel_family

        space = stiefel_family()
    rng = np.random.default_rng(config.seed)
    lo, hi = config.u_range
    u = np.exp(rng.uniform(math.log(lo), math.log(hi), config.n))
    x3 = config.x3_max * (1.0 - rng.random(config.n))
    chunks = [(u[i : i + config.chunk], x3[i : i + config.chunk]) for i in range(0, config.n, config.chunk)]
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        parts = list(pool.map(lambda c: _ricci_image_chunk(space, *c), chunks))
    return [row for part in parts for row in part]


# -- region scans -----------------------------------------------------------


def _describe(cp):
    return cp.describe() if cp is not None else ""


def _critical_summary(family, found, diag_cp, offdiag_index):
    """Classify the found points; report the diagonal one if any, else the
    one with largest S."""
    diag_found = [cp for cp in found if np.max(np.abs(cp.g[offdiag_index])) <= OFFDIAG_TOL * np.max(np.abs(cp.g))]
    nondiag = [cp for cp in found if cp not in diag_found]
    if diag_cp is None and diag_found:
        diag_cp = diag_found[0]
    pick = diag_cp if diag_cp is not None else (max(nondiag, key=lambda cp: cp.scalar) if nondiag else None)
    classified = None
    if pick is not None:
        try:
            classified = classify(family, pick)
        except DomainError:
            classified = None
    return diag_cp is not None, bool(nondiag), classified if classified is not None else pick


def _safe(fn):
    def run(cell):
        try:
            return fn(cell)
        except Exception as exc:  # per-cell failures never abort a scan
            u, v = cell
            return ScanRow(fn.space, float(u), float(v), error=f"{type(exc).__name__}: {exc}")

    run.space = fn.space
    return run


def stiefel_pipeline(solve=False, n_random=8, seed=0, max_iter=60):
    """Cells (T1, T2) with T = (1, T1, T2, 0, 0)."""
    from .spaces.stiefel import stiefel_check, stiefel_family

    def cell(c):
        T1, T2 = (float(x) for x in c)
        if T1 <= 0 or T2 <= 0:
            raise DomainError("T is not positive-definite")
        T = (1.0, T1, T2, 0.0, 0.0)
        verdict = stiefel_check(T)
        row = dict(alpha_gh=verdict.alpha_gh, verdict=verdict.kind, margin=verdict.margin)
        if solve:
            family = stiefel_family(T)
            try:
                diag = solve_diag_system(T, family)
            except NoSolution:
                diag = None
            starts = multistart_starts(family, None if diag is None else diag.g, n_random=n_random, seed=seed)
            found = search_critical(family, starts, max_iter=max_iter)
            has_d, has_nd, cp = _critical_summary(family, found, diag, [3, 4])
            row.update(has_diag_critical=has_d, has_nondiag_critical=has_nd)
            if cp is not None:
                row.update(classification=_describe(cp), S=cp.scalar, g=tuple(cp.g))
        return ScanRow("stiefel", T1, T2, T, **row)

    cell.space = "stiefel"
    return _safe(cell)


def ledger_obata_pipeline(solve=False, a=3, n_random=8, seed=0, max_iter=60):
    """Cells (x, y) = ((T1 - T2)/2, T3) with T1 + T2 = 1; x^2 + y^2 >= 1/4
    is not positive-definite and is rejected."""
    from .spaces.ledger_obata import from_xy, lo_check, lo_family

    def cell(c):
        x, y = (float(t) for t in c)
        if x * x + y * y >= 0.25:
            raise DomainError("x^2 + y^2 >= 1/4: T is not positive-definite")
        T = from_xy(x, y)
        verdict = lo_check(T, a)
        row = dict(alpha_gh=verdict.alpha_gh, verdict=verdict.kind, margin=verdict.margin)
        if solve:
            if a != 3:
                raise DomainError("critical-point search needs the su(2) table (a = 3)")
            family = lo_family(T)
            starts = multistart_starts(family, None, n_random=n_random, seed=seed)
            found = search_critical(family, starts, max_iter=max_iter)
            has_d, has_nd, cp = _critical_summary(family, found, None, [2])
            row.update(has_diag_critical=has_d, has_nondiag_critical=has_nd)
            if cp is not None:
                row.update(classification=_describe(cp), S=cp.scalar, g=tuple(cp.g))
        return ScanRow("ledger-obata", x, y, tuple(T), **row)

    cell.space = "ledger-obata"
    return _safe(cell)


def grid_cells(u_range, v_range, n_u, n_v=None):
    """Cell centres of an n_u x n_v grid, row-major (v outer, u inner)."""
    n_v = n_u if n_v is None else n_v
    if n_u <= 0 or n_v <= 0:
        return []
    du = (u_range[1] - u_range[0]) / n_u
    dv = (v_range[1] - v_range[0]) / n_v
    us = u_range[0] + du * (np.arange(n_u) + 0.5)
    vs = v_range[0] + dv * (np.arange(n_v) + 0.5)
    return [(float(u), float(v)) for v in vs for u in us]


def region_scan(pipeline, cells, threads=1):
    """Apply ``pipeline`` to every cell; rows in input order."""
    cells = list(cells)
    if threads <= 1:
        return [pipeline(c) for c in cells]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(pipeline, cells))


def is_degenerate(row):
    return row.classification == DEGENERATE


__all__ = [
    "COLUMNS",
    "SCHEMA_VERSION",
    "SamplerConfig",
    "ScanRow",
    "grid_cells",
    "ledger_obata_pipeline",
    "region_scan",
    "ricci_image_scan",
    "rows_from_csv",
    "rows_to_csv",
    "schema_text",
    "stiefel_pipeline",
]
