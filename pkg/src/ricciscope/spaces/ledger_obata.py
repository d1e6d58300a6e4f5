"""The Ledger-Obata space H^3 / diag(H).

Q is minus the Killing form of H^3, so b = 1 on both modules.  With
a = dim H the isotropy splits as

    m1 = {(-2X, X, X)},   m2 = {(0, X, -X)},

and invariant metrics are g = [[x1, x3], [x3, x2]] (x) Q|_H in the basis
adapted to m1 + m2.  Bracket-level computations use H = su(2) (a = 3);
every closed form is linear in a, so the Spin(8)/G2 variant is a = 84.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core import BracketTable, HomSpaceSpec
from ..errors import DomainError
from ..families import MetricFamily
from ..fibration import check_main_theorem, stratum_report
from ..strata import make_stratum
from .stiefel import su2_structure

SQRT3 = math.sqrt(3.0)

# Pullback of a 2x2 block form under the order-3 automorphism
# (X, Y, Z) -> (Y, Z, X).
R_MATRIX = np.array([[-0.5, SQRT3 / 2], [-SQRT3 / 2, -0.5]])


def lo_spec(a=3, tensor=None):
    """Diagonal description: d = (a, a), b = (1, 1), [000] = [011] = a/6."""
    if a < 3:
        raise DomainError("a = dim H must be at least 3")
    return HomSpaceSpec((a, a), (1.0, 1.0), {(0, 0, 0): a / 6.0, (0, 1, 1): a / 6.0}, tensor, dim_h=a)


def lo_bracket_table():
    """Bracket table of su(2)^3 with h = diag, in a Q-orthonormal basis.

    The m-part is ordered (m1 basis, m2 basis), matching kron(block, I_3).
    """
    c = np.zeros((9, 9, 9))
    # e = quaternion / sqrt8 is Q-orthonormal for Q = -B_{su(2)}
    for f in range(3):
        sl = slice(3 * f, 3 * f + 3)
        c[sl, sl, sl] = su2_structure() / math.sqrt(8.0)
    I = np.eye(3)
    h = np.hstack([I, I, I]) / SQRT3
    m1 = np.hstack([-2 * I, I, I]) / math.sqrt(6.0)
    m2 = np.hstack([0 * I, I, -I]) / math.sqrt(2.0)
    labels = tuple(f"{p}{q}" for p in ("h", "m1_", "m2_") for q in "ijk")
    return BracketTable.from_lie_algebra(c, h, np.vstack([m1, m2]), labels)


def lo_space(a=3, use_su2_table=True, tensor=None):
    """Returns ``(spec, bt)``; ``bt`` is None unless a = 3 and the su(2)
    table is requested."""
    spec = lo_spec(a, tensor)
    bt = lo_bracket_table() if (a == 3 and use_su2_table) else None
    return spec, bt


def block(v1, v2, v3):
    return np.array([[v1, v3], [v3, v2]], dtype=float)


_BASIS = np.stack([np.kron(block(*row), np.eye(3)) for row in np.eye(3)])


def lo_family(T=(1.0, 1.0, 0.0)):
    """All invariant metrics for H = su(2), p = (x1, x2, x3)."""
    return MetricFamily.from_brackets(lo_bracket_table(), _BASIS, np.asarray(T, dtype=float), names=("x1", "x2", "x3"))


@dataclass(frozen=True)
class LedgerObataPoint:
    a: int
    x1: float
    x2: float
    x3: float
    T1: float = 1.0
    T2: float = 1.0
    T3: float = 0.0

    def __post_init__(self):
        if self.x1 * self.x2 - self.x3**2 <= 0 or self.x1 <= 0:
            raise DomainError("metric block is not positive-definite")
        if self.T1 * self.T2 - self.T3**2 <= 0 or self.T1 <= 0:
            raise DomainError("T block is not positive-definite")

    @property
    def scalar(self):
        return lo_scalar((self.x1, self.x2, self.x3), self.a)

    @property
    def trace(self):
        return lo_trace((self.x1, self.x2, self.x3), (self.T1, self.T2, self.T3), self.a)


def lo_scalar(x, a=3):
    x1, x2, x3 = x
    det = x1 * x2 - x3**2
    if x1 <= 0 or det <= 0:
        raise DomainError("metric block is not positive-definite")
    num = 9 * x1 * x2**2 + 12 * x1**2 * x2 - 6 * x1 * x3**2 - 18 * x2 * x3**2 - x1**3
    return a * num / (24.0 * det**2)


def lo_trace(x, T, a=3):
    x1, x2, x3 = x
    T1, T2, T3 = T
    return a * (x1 * T2 + x2 * T1 - 2 * x3 * T3) / (x1 * x2 - x3**2)


def r_pullback(T, times=1):
    """Coordinates of the pullback of (T1, T2, T3) by R^times."""
    M = block(*T)
    for _ in range(times % 3):
        M = R_MATRIX @ M @ R_MATRIX.T
    return np.array([M[0, 0], M[1, 1], M[0, 1]])


def r_orbit(T):
    return [r_pullback(T, n) for n in range(3)]


def to_xy(T):
    """Normalized picture coordinates ((T1 - T2)/2, T3)/(T1 + T2)."""
    T1, T2, T3 = T
    s = T1 + T2
    return ((T1 - T2) / (2 * s), T3 / s)


def from_xy(x, y):
    """T with T1 + T2 = 1 at picture coordinates (x, y)."""
    return (0.5 + x, 0.5 - x, y)


def _k_values(T1, T2, T3):
    s3 = SQRT3 * T3
    return {
        "k1": (3.0 / (8 * T1), 1.0 / (2 * T2)),
        "k2": (3.0 / (2 * (T1 + 3 * T2 - 2 * s3)), 2.0 / (3 * T1 + T2 + 2 * s3)),
        "k3": (3.0 / (2 * (T1 + 3 * T2 + 2 * s3)), 2.0 / (3 * T1 + T2 - 2 * s3)),
    }


def guaranteed_condition(T):
    """The k1-maximal guaranteed-maximum region, 3/4 T2 < T1 < 9/5 T2 - 14 sqrt3/5 |T3|,
    together with its images under R."""
    hits = []
    for n in range(3):
        T1, T2, T3 = r_pullback(T, n)
        hits.append(0.75 * T2 < T1 < 1.8 * T2 - 14 * SQRT3 / 5 * abs(T3))
    return any(hits)


def diagonal_critical(t, a=3):
    """Diagonal critical point for T = (t, 1 - t, 0), t in (3/7, 1)."""
    if not 3.0 / 7.0 < t < 1.0:
        raise DomainError("the diagonal family needs t in (3/7, 1)")
    q = -20 * t**2 + 30 * t - 9
    root = math.sqrt(q)
    return np.array([a * root, a * (q + t * root) / (3 * (7 * t - 3)), 0.0])


def einstein_flags(T, tol=1e-9):
    """Whether T is proportional to the Ricci tensor of one of the three
    product Einstein metrics (T ~ (3/4, 1/4, 0) and its R-images) or of Q."""
    T = np.asarray(T, dtype=float)
    Tn = T / (T[0] + T[1])
    flags = {}
    for n, key in enumerate(("product_k1", "product_k2", "product_k3")):
        flags[key] = bool(np.allclose(Tn, r_pullback((0.75, 0.25, 0.0), n), atol=tol))
    flags["normal"] = bool(np.allclose(Tn, (0.5, 0.5, 0.0), atol=tol))
    return flags


def lo_report(T, a=3):
    T1, T2, T3 = (float(v) for v in T)
    if T1 <= 0 or T1 * T2 - T3**2 <= 0:
        raise DomainError("T is not positive-definite")
    k = _k_values(T1, T2, T3)
    out = {
        "alpha_beta": k,
        "orbit": r_orbit((T1, T2, T3)),
        "condition": guaranteed_condition((T1, T2, T3)),
        "einstein": einstein_flags((T1, T2, T3)),
        "diag_critical": None,
    }
    s = T1 + T2
    if abs(T3) <= 1e-14 and 3.0 / 7.0 < T1 / s < 1.0:
        # tr_{sg} (sT) = tr_g T, so the point scales with T
        out["diag_critical"] = diagonal_critical(T1 / s, a) * s
    return out


def lo_reports(T, a=3, certificate=False):
    """Reports for K_1, K_2, K_3, one per R-rotated copy of the decomposition."""
    reports = []
    for n in range(3):
        Tn = r_pullback(T, n)
        spec = lo_spec(a, (Tn[0], Tn[1]))
        stratum = make_stratum(spec, [0])
        reports.append(stratum_report(spec, stratum, base_valid=True, label=f"k{n + 1}", certificate=certificate))
    return reports


def lo_check(T, a=3):
    return check_main_theorem(lo_reports(T, a))
