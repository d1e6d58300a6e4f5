"""Reference fixture suite behind ``ricciscope verify``.

Each fixture is a small deterministic check with its own tolerance.  Groups
(``core``, ``stiefel``, ``ledger-obata``) can be run separately.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import HomSpaceSpec
from .errors import SpecError
from .fibration import GLOBAL_MAX, INCONCLUSIVE, alpha_of_stratum, beta_of_stratum, oneill_norm
from .scan import SamplerConfig, grid_cells, ledger_obata_pipeline, region_scan, ricci_image_scan
from .solver import LOCAL_MAX, SADDLE, classify, find_critical, residual_of, ricci_map_rank, solve_diag_system
from .spaces import ledger_obata as lo
from .spaces import stiefel as st
from .strata import GeodesicRay, enumerate_strata, make_stratum, witness_triple

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class Fixture:
    name: str
    group: str
    run: object


@dataclass(frozen=True)
class FixtureResult:
    name: str
    passed: bool
    detail: str

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


FIXTURES = []


def fixture(name, group):
    def deco(fn):
        FIXTURES.append(Fixture(name, group, fn))
        return fn

    return deco


def _close(a, b, tol, rel=False):
    err = abs(a - b) / (abs(b) if rel and b != 0 else 1.0)
    return err <= tol, f"got {a:.17g}, want {b:.17g} (err {err:.2e}, tol {tol:.0e})"


# -- core --------------------------------------------------------------------


@fixture("core.sc-symmetry", "core")
def _sc_symmetry():
    doc = HomSpaceSpec((1, 1, 1), (1, 1, 1), {(0, 1, 2): 1.0}).to_dict()
    doc["sc"].append({"ijk": [1, 0, 2], "v": 2.0})
    try:
        HomSpaceSpec.from_dict(doc)
    except SpecError as exc:
        return exc.code == "sc-symmetry", f"rejected with code {exc.code!r}"
    return False, "asymmetric structure constants were accepted"


# -- Stiefel -----------------------------------------------------------------


def _stiefel_sc(s):
    spec, _ = st.stiefel_space(s, 0.3)
    return spec.sc[0, 1, 1], spec.sc[0, 2, 2], spec.sc[0, 1, 2]


@fixture("stiefel.sc-s1", "stiefel")
def _sc_s1():
    a, b, c = _stiefel_sc(1.0)
    ok = abs(a - 4) <= 1e-12 and abs(b - 4) <= 1e-12 and abs(c) <= 1e-12
    return ok, f"[011]={a:.17g} [022]={b:.17g} [012]={c:.17g}"


@fixture("stiefel.sc-balanced", "stiefel")
def _sc_balanced():
    # [012] = 16 s^2 t^2; at s = t the sum rule sum_jk [0jk] = d0 b0 = 8 forces 4
    a, b, c = _stiefel_sc(1 / SQRT2)
    ok = abs(a) <= 1e-12 and abs(b) <= 1e-12 and abs(c - 4) <= 1e-12
    return ok, f"[011]={a:.3g} [022]={b:.3g} [012]={c:.17g}"


@fixture("stiefel.sc-family", "stiefel")
def _sc_family():
    rng = np.random.default_rng(2)
    err = 0.0
    for s, th in zip(rng.random(20), rng.uniform(-math.pi, math.pi, 20)):
        t = math.sqrt(1 - s * s)
        spec, _ = st.stiefel_space(s, th)
        want = (4 * (s * s - t * t) ** 2, 4 * (s * s - t * t) ** 2, 16 * s * s * t * t)
        got = (spec.sc[0, 1, 1], spec.sc[0, 2, 2], spec.sc[0, 1, 2])
        err = max(err, max(abs(g - w) for g, w in zip(got, want)))
    return err <= 1e-12, f"max error {err:.2e} over 20 (s, theta)"


@fixture("stiefel.strata", "stiefel")
def _stiefel_strata():
    spec, _ = st.stiefel_space(1.0, 0.0)
    sub = sorted(s.J for s in enumerate_strata(spec) if s.is_subalgebra)
    inf = sorted(s.J for s in enumerate_strata(spec) if not s.is_subalgebra)
    spec2, _ = st.stiefel_space(1 / SQRT2, 0.7)
    theta_ok = make_stratum(spec2, [1]).is_subalgebra
    ok = sub == [(0,), (0, 1), (0, 2)] and inf == [(1,), (1, 2), (2,)] and theta_ok
    return ok, f"subalgebra {sub}, infinity {inf}, k^theta subalgebra {theta_ok}"


@fixture("stiefel.witness", "stiefel")
def _stiefel_witness():
    spec, _ = st.stiefel_space(1.0, 0.0, (1, 1, 1, 0, 0))
    stratum = make_stratum(spec, [1, 2])
    ray = GeodesicRay.toward(spec, [0.0, 1.0, 1.0])
    triple = witness_triple(spec, stratum)
    return triple in ((1, 1, 0), (2, 2, 0)) and ray.exit_set() == (1, 2), f"triple {triple}"


@fixture("stiefel.offdiag-ricci", "stiefel")
def _offdiag():
    fam = st.stiefel_family()
    p = np.array([1.0, 0.7, 1 / 2.8, 0.2, 0.0])
    r = fam.ricci(p)
    return np.max(np.abs(r[3:])) <= 1e-12, f"cross-block Ricci {r[3:]}"


@fixture("stiefel.jensen", "stiefel")
def _jensen():
    T = (1.0, 0.75, 0.75, 0.0, 0.0)
    cp = find_critical(st.stiefel_family(T), [1, 1, 1, 0, 0])
    ok = np.max(np.abs(cp.g - [5, 3.75, 3.75, 0, 0])) <= 1e-8 and cp.residual <= 1e-8 and cp.c > 0
    return ok, f"g={np.round(cp.g, 12)} c={cp.c:.12g} residual {cp.residual:.1e}"


@fixture("stiefel.diag-family", "stiefel")
def _diag_family():
    err = 0.0
    for t in (0.3, 0.5, 0.75, 1.0):
        r = math.sqrt(32 * t + 1)
        cp = solve_diag_system((1, t, t, 0, 0))
        err = max(err, np.max(np.abs(cp.g - [r, (r * r + r) / 8, (r * r + r) / 8, 0, 0])))
    return err <= 1e-10, f"max error {err:.2e}"


@fixture("stiefel.circle", "stiefel")
def _circle():
    T = (1.0, 135 / 472, 15 / 118, 0.0, 0.0)
    want = np.array([181 / 59, 905 / 472, 362 / 295])
    start = np.append(want * 1.05, [0.25, 0.0])
    cp = find_critical(st.stiefel_family(T), start)
    rad = cp.g[3] ** 2 + cp.g[4] ** 2
    ok = cp.residual <= 1e-8 and np.max(np.abs(cp.g[:3] - want)) <= 1e-8 and abs(rad - 32761 / 55696) <= 1e-8
    return ok, f"x0..x2 error {np.max(np.abs(cp.g[:3] - want)):.1e}, x3^2+x4^2={rad:.12g}"


@fixture("stiefel.orbit", "stiefel")
def _orbit():
    T = (1.0, 135 / 472, 15 / 118, 0.0, 0.0)
    fam = st.stiefel_family(T)
    r = math.sqrt(32761 / 55696)
    g = st.StiefelMetric(181 / 59, 905 / 472, 362 / 295, r, 0.0)
    worst = 0.0
    for eta in np.linspace(0, math.pi, 16, endpoint=False):
        p = st.stiefel_normalizer(eta, g).params
        worst = max(worst, residual_of(fam, p, _multiplier(fam, p)))
    return worst <= 1e-8, f"max residual {worst:.1e} over 16 orbit points"


def _multiplier(fam, p):
    """Least-squares c for Ric(g) = c T."""
    r, t = fam.ricci(p), fam.tensor
    return float(r @ t / (t @ t))


@fixture("stiefel.surface", "stiefel")
def _surface():
    T = (1.0, 0.25, 0.25, 0.0, 0.0)
    fam = st.stiefel_family(T)
    worst = 0.0
    for t in (1.5, 2.0, 3.0):
        rad = t * math.sqrt((2 * t - 3) / (2 * t - 1))
        for psi in (0.0, math.pi / 2):
            p = np.array([2 * t, t, t, rad * math.cos(psi), rad * math.sin(psi)])
            worst = max(worst, abs(st.stiefel_scalar(p) - 8), abs(fam.trace(p) - 1))
    return worst <= 1e-8, f"max |S - 8|, |tr - 1| = {worst:.1e}"


@fixture("stiefel.hessian", "stiefel")
def _hessian():
    sigs = {}
    for t in (0.5, 0.2):
        T = (1, t, t, 0, 0)
        fam = st.stiefel_family(T)
        sigs[t] = classify(fam, solve_diag_system(T, fam)).signature
    T = (1, 0.25, 0.25, 0, 0)
    fam = st.stiefel_family(T)
    cp = find_critical(fam, [4.0, 2.0, 2.0, 2 * math.sqrt(1 / 3), 0.0])
    sigs["surface"] = classify(fam, cp).signature
    ok = sigs[0.5] == (4, 0, 0) and sigs[0.2] == (2, 0, 2) and sigs["surface"] == (2, 2, 0)
    return ok, f"signatures {sigs}"


@fixture("stiefel.line-flip", "stiefel")
def _line_flip():
    kinds = {}
    for t in (0.15, 0.2, 0.3, 0.6):
        T = (1, t, t, 0, 0)
        fam = st.stiefel_family(T)
        kinds[t] = classify(fam, solve_diag_system(T, fam)).classification
    ok = kinds[0.15] == kinds[0.2] == SADDLE and kinds[0.3] == kinds[0.6] == LOCAL_MAX
    return ok, f"{kinds}"


@fixture("stiefel.rank-families", "stiefel")
def _rank():
    fam = st.stiefel_family()
    r1 = ricci_map_rank(fam, [1, 0.8, 1 / 3.2, 0.3, 0])
    r2 = ricci_map_rank(fam, [1, 0.9, 1.6, 0.5, 0])
    r0 = ricci_map_rank(fam, [1, 0.9, 1.6, 0.3, 0])
    return r1 < 4 and r2 < 4 and r0 == 4, f"ranks {r1}, {r2} (degenerate), {r0} (generic)"


@fixture("stiefel.alpha-k2", "stiefel")
def _alpha_k2():
    spec, _ = st.stiefel_space(1.0, 0.0, (1, 1, 0.25, 0, 0))
    a = alpha_of_stratum(spec, make_stratum(spec, [0, 2])).value
    return _close(a, (3 - math.sqrt(5)) * 8, 1e-6)


@fixture("stiefel.beta", "stiefel")
def _beta():
    T = (1.0, 0.6, 0.3, 0.1, -0.05)
    spec, _ = st.stiefel_space(1.0, 0.0, T)
    b2 = beta_of_stratum(spec, make_stratum(spec, [0, 2]), base_valid=True).value
    theta = st.theta_zero(T[3], T[4])
    b_th = st.theta_report(T, theta).beta
    want = 12 / (T[0] + T[1] + T[2] + 2 * math.hypot(T[3], T[4]))
    ok = abs(b2 - 4 / T[1]) <= 1e-6 and abs(b_th - want) <= 1e-6
    return ok, f"beta_k2={b2:.12g} (want {4 / T[1]:.12g}), beta_theta0={b_th:.12g} (want {want:.12g})"


@fixture("stiefel.alpha-theta", "stiefel")
def _alpha_theta():
    T = (1.0, 0.25, 0.25, 0.0, 0.0)
    a = st.theta_report(T, 0.0).alpha
    return _close(a, 8.0, 1e-6)


@fixture("stiefel.region-a", "stiefel")
def _region_a():
    T = (1.0, 0.3, 0.25, 0.0, 0.0)
    v = st.stiefel_check(T)
    cf = st.stiefel_alpha_beta(T)
    want = cf["gamma"] <= T[1] < T[2] + (1 + math.sqrt(1 + 16 * T[2])) / 8
    got = v.kind == GLOBAL_MAX and v.report.label == "k2"
    return got == want, f"{v} (closed-form region (a) inequality {want})"


@fixture("stiefel.jensen-region", "stiefel")
def _jensen_region():
    v = st.stiefel_check((1.0, 0.75, 0.75, 0.0, 0.0))
    return v.kind == GLOBAL_MAX, str(v)


@fixture("stiefel.non-global-max", "stiefel")
def _non_global():
    T = (1.0, 135 / 472, 15 / 118, 0.0, 0.0)
    fam = st.stiefel_family(T)
    cp = classify(fam, solve_diag_system(T, fam))
    v = st.stiefel_check(T)
    a_th = st.stiefel_alpha_beta(T)["ktheta0"][0]
    ok = v.kind == INCONCLUSIVE and cp.scalar < a_th and cp.classification == LOCAL_MAX
    return ok, f"S(diag)={cp.scalar:.12g} < alpha_theta0={a_th:.12g}; {v.kind}"


@fixture("stiefel.ricci-image", "stiefel")
def _ricci_image():
    rows = ricci_image_scan(config=SamplerConfig(n=100_000, seed=7))
    P = np.array([(r.u, r.v) for r in rows])
    green = np.min(np.hypot(P[:, 0] - 135 / 472, P[:, 1] - 15 / 118))
    curve = 0.0
    for t in (0.3, 0.5, 0.7, 0.9):
        c = (4 * t * t * (1 - t) / (16 * t**4 + 1), t * (4 * t - 1) / (16 * t**4 + 1))
        curve = max(curve, np.min(np.hypot(P[:, 0] - c[0], P[:, 1] - c[1])))
    ok = green <= 0.01 and curve <= 0.02 and np.all(P[:, 1] > 0)
    return ok, f"{len(rows)} points, green-dot distance {green:.2e}, transition-curve distance {curve:.2e}"


# -- Ledger-Obata ------------------------------------------------------------


@fixture("ledger-obata.strata", "ledger-obata")
def _lo_strata():
    spec = lo.lo_spec(3, (1, 1))
    s1, s2 = make_stratum(spec, [0]), make_stratum(spec, [1])
    return s1.is_subalgebra and not s2.is_subalgebra, f"{s1}, {s2}"


@fixture("ledger-obata.scalar", "ledger-obata")
def _lo_scalar():
    s3 = lo.lo_scalar((1, 1, 0), 3)
    s84 = lo.lo_scalar((1, 1, 0), 84)
    fam = lo.lo_family()
    sf = fam.scalar([1, 1, 0])
    ok = abs(s3 - 2.5) <= 1e-12 and abs(s84 - 70) <= 1e-12 and abs(sf - 2.5) <= 1e-12
    return ok, f"S(a=3)={s3:.17g}, S(a=84)={s84:.17g}, bracket table {sf:.17g}"


@fixture("ledger-obata.alpha-beta", "ledger-obata")
def _lo_alpha_beta():
    spec = lo.lo_spec(3, (0.25, 0.6))
    stratum = make_stratum(spec, [0])
    a = alpha_of_stratum(spec, stratum).value
    b = beta_of_stratum(spec, stratum, base_valid=True).value
    ok = abs(a - 1.5) <= 1e-6 and abs(b - 1 / 1.2) <= 1e-6
    return ok, f"alpha_k1={a:.12g} (want 1.5), beta_k1={b:.12g} (want {1 / 1.2:.12g})"


@fixture("ledger-obata.normal", "ledger-obata")
def _lo_normal():
    v = lo.lo_check((0.5, 0.5, 0.0))
    r = [x for x in v.reports if x.label == "k1"][0]
    ok = v.kind == GLOBAL_MAX and abs(r.alpha - 0.75) <= 1e-6 and abs(r.beta - 1.0) <= 1e-6
    return ok, str(v)


@fixture("ledger-obata.diag-critical", "ledger-obata")
def _lo_diag():
    err = 0.0
    # t = 3/4 sits on a critical arc (see ledger-obata.einstein)
    for t in (0.5, 0.6, 0.7, 0.9):
        want = lo.diagonal_critical(t)
        fam = lo.lo_family((t, 1 - t, 0))
        cp = find_critical(fam, want * [1.05, 0.97, 0.0] + [0, 0, 0.02])
        err = max(err, np.max(np.abs(cp.g - want)) / np.max(want), cp.residual)
    return err <= 1e-8, f"max relative error / residual {err:.1e}"


@fixture("ledger-obata.einstein", "ledger-obata")
def _lo_einstein():
    T = (0.75, 0.25, 0.0)
    flags = lo.einstein_flags(T)
    fam = lo.lo_family(T)
    cp = classify(fam, find_critical(fam, lo.diagonal_critical(0.75)))
    ok = flags["product_k1"] and cp.signature == (1, 1, 0)
    return ok, f"flags {flags}, signature {cp.signature}"


@fixture("ledger-obata.oneill", "ledger-obata")
def _lo_oneill():
    spec = lo.lo_spec(3, (1, 1))
    return _close(oneill_norm(spec, [0], [1.0, 1.0]), 0.125, 1e-12)


@fixture("ledger-obata.triangle", "ledger-obata")
def _lo_triangle():
    n = 40
    cells = grid_cells((-0.5, 0.5), (-0.5, 0.5), n)
    rows = region_scan(ledger_obata_pipeline(), cells)
    bad = 0
    rejected = 0
    for (x, y), row in zip(cells, rows):
        if x * x + y * y >= 0.25:
            rejected += bool(row.error)
            continue
        inside = lo.guaranteed_condition(lo.from_xy(x, y))
        corners = {lo.guaranteed_condition(lo.from_xy(x + a / (2 * n), y + b / (2 * n))) for a in (-1, 1) for b in (-1, 1)}
        if len(corners) == 1:
            bad += (row.verdict == GLOBAL_MAX) != inside
    outside = sum(1 for x, y in cells if x * x + y * y >= 0.25)
    solved = region_scan(ledger_obata_pipeline(solve=True), [(0.0, 0.0), (0.05, 0.01), (-0.03, -0.02)])
    found = all(r.has_diag_critical or r.has_nondiag_critical for r in solved)
    ok = bad == 0 and rejected == outside and found
    return ok, f"{bad} mismatching interior cells, {rejected}/{outside} non-definite cells rejected, critical points found: {found}"


def run_fixtures(only=None, stop_on_fail=False):
    groups = None if not only else set(only)
    out = []
    for fx in FIXTURES:
        if groups is not None and fx.group not in groups:
            continue
        try:
            ok, detail = fx.run()
        except Exception as exc:
            ok, detail = False, f"raised {type(exc).__name__}: {exc}"
        out.append(FixtureResult(fx.name, bool(ok), detail))
        if stop_on_fail and not ok:
            break
    return out


def groups():
    return sorted({fx.group for fx in FIXTURES})
