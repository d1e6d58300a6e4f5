"""Canonical variations along fibrations K/H -> G/H -> G/K and the
invariants alpha_k, beta_k built from them.

alpha_k is the supremum of S over diagonal metrics on K/H with
tr T|_{k cap m} = 1, beta_k the same over the base G/K.  Both are computed
by :func:`maximize_scalar`, which works on the barycentric coordinates
w_i = d_i T_i y_i of the constraint simplex.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize_scalar

from .core import scalar_curvature_diag, scalar_gradient_diag, scalar_hessian_diag
from .errors import DomainError, UsageError
from .strata import base_spec, enumerate_strata, make_stratum

GRID_STEPS = 64
MIN_COORD = 1e-6
TIE_TOL = 1e-8
MARGIN_TOL = 1e-9

CLOSED_FORM = "closed-form"
OPTIMIZED = "optimized"


# ---------------------------------------------------------------------------
# submersion splits and the canonical variation


@dataclass(frozen=True, eq=False)
class SubmersionSplit:
    J: tuple
    g_F: np.ndarray
    g_B: np.ndarray
    T1s: float
    T2s: float
    S_F: float
    S_B: float
    oneill: float


def _split_indices(spec, J):
    J = tuple(sorted(int(i) for i in J))
    Jc = tuple(i for i in range(spec.r) if i not in J)
    return J, Jc


def _subalgebra(spec, J):
    stratum = make_stratum(spec, J)
    if not stratum.is_subalgebra:
        raise UsageError(f"J={stratum.J} is not a subalgebra stratum")
    return stratum


def split_is_submersion(spec, J, y, tol=1e-12):
    """True when the base part of ``y`` is Ad_K-invariant, i.e. y_j = y_k
    whenever [ijk] != 0 for some i in J and j != k outside J."""
    J, Jc = _split_indices(spec, J)
    y = np.asarray(y, dtype=float)
    for j, k in itertools.combinations(Jc, 2):
        if spec.sc[np.ix_(J, [j], [k])].sum() > 0 and abs(y[j] - y[k]) > tol * max(y[j], y[k]):
            return False
    return True


def submersion_split(spec, J, y):
    stratum = _subalgebra(spec, J)
    J, Jc = stratum.J, stratum.complement(spec.r)
    y = np.asarray(y, dtype=float)
    yF, yB = y[list(J)], y[list(Jc)]
    S_F = float(scalar_curvature_diag(stratum.fiber_spec, yF))
    S_B = float(scalar_curvature_diag(base_spec(spec, J), yB))
    w = spec.d * spec.tensor
    return SubmersionSplit(
        J,
        yF,
        yB,
        float(yF @ w[list(J)]),
        float(yB @ w[list(Jc)]),
        S_F,
        S_B,
        S_F + S_B - float(scalar_curvature_diag(spec, y)),
    )


def oneill_norm(spec, J, y):
    """|A|_g = S_F + S_B - S(g) for the split of y along the stratum J."""
    return submersion_split(spec, J, y).oneill


def canonical_variation(spec, J, y, t, check=True):
    """The point g_t = T1*/(1 - t T2*) g_F + g_B/t, in y-coordinates.

    ``y`` is assumed to lie on M_T.  With ``check`` the base part must be
    Ad_K-invariant (see :func:`split_is_submersion`).
    """
    stratum = _subalgebra(spec, J)
    J, Jc = list(stratum.J), list(stratum.complement(spec.r))
    y = np.asarray(y, dtype=float)
    if check and not split_is_submersion(spec, J, y):
        raise DomainError("the base metric is not Ad_K-invariant")
    w = spec.d * spec.tensor
    T1s, T2s = y[J] @ w[J], y[Jc] @ w[Jc]
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0) or np.any(t >= 1.0 / T2s):
        raise DomainError("t must lie in (0, 1/T2*)")
    out = np.empty(t.shape + (spec.r,))
    out[..., J] = np.multiply.outer((1.0 - t * T2s) / T1s, y[J])
    out[..., Jc] = np.multiply.outer(t, y[Jc])
    return out


def variation_scalar_model(split, t):
    """S(g_t) = S_F/T1* + T2*(S_B/T2* - S_F/T1*) t - t^2 T1*/(1 - t T2*) |A|."""
    t = np.asarray(t, dtype=float)
    a, b = split.T1s, split.T2s
    return split.S_F / a + b * (split.S_B / b - split.S_F / a) * t - t**2 * a / (1.0 - t * b) * split.oneill


def variation_limits(split):
    """(lim S(g_t), lim dS/dt) as t -> 0."""
    a, b = split.T1s, split.T2s
    return split.S_F / a, b * (split.S_B / b - split.S_F / a)


# ---------------------------------------------------------------------------
# suprema over the simplex


@dataclass(frozen=True, eq=False)
class Certificate:
    grid_max: float
    step: float
    slack: float

    def holds(self, value, attained, tol=1e-9):
        scale = tol * max(1.0, abs(value))
        if self.grid_max > value + scale:
            return False
        return (not attained) or value <= self.grid_max + self.slack + scale


@dataclass(frozen=True, eq=False)
class MaxResult:
    value: float
    argmax: np.ndarray
    attained: bool
    support: tuple
    certificate: Certificate = None


def _simplex_grid(r, steps):
    """Interior barycentric grid points with denominator ``steps``."""
    if r == 1:
        return np.ones((1, 1))
    while math.comb(steps - 1, r - 1) > 200_000 and steps > r + 1:
        steps //= 2
    bars = np.array(list(itertools.combinations(range(1, steps), r - 1)))
    edges = np.hstack([np.zeros((len(bars), 1)), bars, np.full((len(bars), 1), steps)])
    return np.diff(edges, axis=1) / steps


def _tangent_basis(r):
    q, _ = np.linalg.qr(np.hstack([np.ones((r, 1)), np.eye(r)[:, : r - 1]]))
    return q[:, 1:]


def _starts(r):
    starts = [np.full(r, 1.0 / r)]
    for i in range(r):
        for wi in (0.9, 0.02):
            w = np.full(r, (1.0 - wi) / (r - 1))
            w[i] = wi
            starts.append(w)
    return starts


def _ascend(spec, w, c, Z, max_iter=200, gtol=1e-12):
    """Projected Newton/gradient ascent of S on the simplex, from w."""
    f = lambda w: float(scalar_curvature_diag(spec, w / c))
    fw = f(w)
    for _ in range(max_iter):
        y = w / c
        grad = scalar_gradient_diag(spec, y) / c
        gr = Z.T @ grad
        if np.linalg.norm(gr) * np.max(w) <= gtol * max(1.0, abs(fw)):
            break
        Hr = Z.T @ (scalar_hessian_diag(spec, y) / np.outer(c, c)) @ Z
        evals = np.linalg.eigvalsh(Hr)
        if np.all(evals < 0):
            step = -np.linalg.solve(Hr, gr)
        else:
            step = gr / max(np.max(np.abs(evals)), 1e-12)
        d = Z @ step
        neg = d < 0
        amax = np.min(-0.5 * w[neg] / d[neg]) if np.any(neg) else np.inf
        a = min(1.0, amax)
        slope = grad @ d
        while a > 1e-14:
            w_new = w + a * d
            f_new = f(w_new)
            if f_new >= fw + 1e-4 * a * slope:
                break
            a *= 0.5
        else:
            break
        if np.max(np.abs(w_new - w)) < 1e-15:
            w, fw = w_new, f_new
            break
        w, fw = w_new, f_new
        if np.min(w) < 1e-12:
            break
    return w, fw


def _certificate(spec, c, value, steps=GRID_STEPS):
    pts = _simplex_grid(spec.r, steps)
    vals = scalar_curvature_diag(spec, pts / c)
    k = int(np.argmax(vals))
    h = 1.0 / steps
    if spec.r == 1:
        return Certificate(float(vals[k]), h, 0.0)
    y = pts[k] / c
    grad = scalar_gradient_diag(spec, y) / c
    Z = _tangent_basis(spec.r)
    hess = Z.T @ (scalar_hessian_diag(spec, y) / np.outer(c, c)) @ Z
    radius = h * math.sqrt(spec.r)
    slack = np.linalg.norm(Z.T @ grad) * radius + 0.5 * np.max(np.abs(np.linalg.eigvalsh(hess))) * radius**2
    return Certificate(float(vals[k]), h, float(slack))


def _interior_max(spec):
    r = spec.r
    c = spec.d * spec.tensor
    if r == 1:
        w = np.ones(1)
        return w / c, float(scalar_curvature_diag(spec, w / c)), True
    Z = _tangent_basis(r)
    best_w, best_f, best_ok = None, -np.inf, False
    for w0 in _starts(r):
        w, fw = _ascend(spec, w0, c, Z)
        ok = np.min(w) >= MIN_COORD
        if fw > best_f + 1e-13 * max(1.0, abs(fw)) or (ok and not best_ok and fw >= best_f - 1e-13 * max(1.0, abs(fw))):
            best_w, best_f, best_ok = w, fw, ok
    return best_w / c, best_f, best_ok


def maximize_scalar(spec, certificate=True):
    """Supremum of S on {y > 0 : sum d_i T_i y_i = 1}.

    Interior local maxima come from multi-start ascent; suprema approached
    at the boundary are found by recursing into the subalgebra strata of
    ``spec`` itself, where S extends continuously.  ``argmax`` is a point
    of the closed simplex; ``attained`` is False when it lies on the
    boundary (coordinates outside ``support`` are zero).
    """
    y, value, ok = _interior_max(spec)
    best = MaxResult(value, y, ok, tuple(range(spec.r)))
    if spec.r > 1:
        for stratum in enumerate_strata(spec):
            if not stratum.is_subalgebra:
                continue
            sub = maximize_scalar(stratum.fiber_spec, certificate=False)
            if sub.value > best.value + 1e-10 * max(1.0, abs(best.value)) or (
                not best.attained and sub.value >= best.value - 1e-10 * max(1.0, abs(best.value))
            ):
                full = np.zeros(spec.r)
                full[list(stratum.J)] = sub.argmax
                support = tuple(stratum.J[i] for i in sub.support)
                best = MaxResult(sub.value, full, False, support)
    if not best.attained and best.support == tuple(range(spec.r)):
        # the ascent drifted to the boundary without a better stratum value
        best = MaxResult(best.value, best.argmax, False, tuple(np.flatnonzero(best.argmax >= MIN_COORD * np.max(best.argmax))))
    if certificate:
        cert = _certificate(spec, spec.d * spec.tensor, best.value)
        best = MaxResult(best.value, best.argmax, best.attained, best.support, cert)
    return best


# ---------------------------------------------------------------------------
# alpha, beta and the global-maximum criterion


@dataclass(frozen=True, eq=False)
class AlphaBetaReport:
    stratum: object
    alpha: float
    beta: float = None
    alpha_argmax: np.ndarray = None
    attained: bool = True
    method: str = OPTIMIZED
    certificate: Certificate = None
    label: str = ""
    dim_k: int = None

    @property
    def margin(self):
        return None if self.beta is None else self.beta - self.alpha

    @property
    def J(self):
        return self.stratum.J


def alpha_of_stratum(spec, stratum, certificate=True):
    if not stratum.is_subalgebra:
        raise UsageError("alpha is defined for subalgebra strata only")
    res = maximize_scalar(stratum.fiber_spec, certificate)
    return res


def beta_of_stratum(spec, stratum, base=None, base_valid=False, certificate=True):
    """Supremum of S over diagonal metrics of the base G/K.

    The diagonal base family is only the right one when its metrics are
    Ad_K-invariant, which depends on K and not just on the structure
    constants, so the caller has to vouch for it with ``base_valid``.
    """
    if not stratum.is_subalgebra:
        raise UsageError("beta is defined for subalgebra strata only")
    if not base_valid:
        raise UsageError("beta needs a base family flagged Ad_K-valid (pass base_valid=True)")
    base = base_spec(spec, stratum.J) if base is None else base
    return maximize_scalar(base, certificate)


def stratum_report(spec, stratum, base=None, base_valid=False, label="", certificate=True):
    a = alpha_of_stratum(spec, stratum, certificate)
    beta = None
    if base_valid:
        beta = beta_of_stratum(spec, stratum, base, True, certificate=False).value
    return AlphaBetaReport(
        stratum,
        max(a.value, 0.0) if a.value > -1e-12 else a.value,
        beta,
        a.argmax,
        a.attained,
        OPTIMIZED,
        a.certificate,
        label or "k" + "".join(str(i) for i in stratum.J),
        stratum.dim_k,
    )


def all_reports(spec, base_valid=False, certificate=True):
    """Reports for every subalgebra stratum of one decomposition.

    ``base_valid`` is either a bool or a collection of J tuples whose
    diagonal bases are known to be Ad_K-invariant.
    """
    out = []
    for stratum in enumerate_strata(spec):
        if not stratum.is_subalgebra:
            continue
        valid = base_valid if isinstance(base_valid, bool) else stratum.J in set(map(tuple, base_valid))
        out.append(stratum_report(spec, stratum, base_valid=valid, certificate=certificate))
    return out


GLOBAL_MAX = "GlobalMaxGuaranteed"
INCONCLUSIVE = "Inconclusive"
MAXIMAL_ISOTROPY = "MaximalIsotropy"


@dataclass(frozen=True, eq=False)
class Verdict:
    kind: str
    alpha_gh: float = None
    report: AlphaBetaReport = None
    margin: float = None
    reports: list = field(default_factory=list, repr=False)

    def __str__(self):
        if self.report is None:
            return self.kind
        return (
            f"{self.kind} alpha_G/H={self.alpha_gh:.17g} at {self.report.label} "
            f"(dim k={self.report.dim_k}) margin={self.margin:.17g}"
        )


def check_main_theorem(reports, tie_tol=TIE_TOL, margin_tol=MARGIN_TOL):
    """Apply the global-maximum criterion to a list of stratum reports.

    alpha_G/H is the largest alpha; among the maximizers (within
    ``tie_tol``) the one of least dim k, then lexicographically smallest J,
    is tested for beta - alpha > 0.
    """
    reports = list(reports)
    if not reports:
        return Verdict(MAXIMAL_ISOTROPY)
    alpha_gh = max(r.alpha for r in reports)
    ties = [r for r in reports if r.alpha >= alpha_gh - tie_tol * max(1.0, abs(alpha_gh))]
    winner = min(ties, key=lambda r: (r.dim_k, tuple(r.J), r.label))
    if winner.beta is None:
        return Verdict(INCONCLUSIVE, alpha_gh, winner, float("nan"), reports)
    margin = winner.beta - winner.alpha
    kind = GLOBAL_MAX if margin > margin_tol * max(1.0, abs(winner.alpha)) else INCONCLUSIVE
    return Verdict(kind, alpha_gh, winner, margin, reports)


def maximize_over_family(evaluate, lo, hi, n_scan=33, xtol=1e-10):
    """Maximize a scalar function of one family parameter (e.g. theta) by a
    coarse scan followed by bounded refinement; returns (argmax, value)."""
    grid = np.linspace(lo, hi, n_scan)
    vals = np.array([evaluate(p) for p in grid])
    k = int(np.argmax(vals))
    a, b = grid[max(k - 1, 0)], grid[min(k + 1, n_scan - 1)]
    res = minimize_scalar(lambda p: -evaluate(p), bounds=(a, b), method="bounded", options={"xatol": xtol})
    if -res.fun >= vals[k]:
        return float(res.x), float(-res.fun)
    return float(grid[k]), float(vals[k])
