"""The Stiefel manifold V_2(R^4) = (SU(2) x SU(2)) / S^1.

su(2) is identified with the imaginary quaternions; with
|(X, Y)|_Q^2 = -1/2 (tr X^2 + tr Y^2) the vectors i, j, k of each factor are
Q-orthonormal and [i, j] = 2k.  H is the diagonal circle generated by
(i, i).  The fixed basis of m used for full metrics is

    e0 = (i, -i)/sqrt2,  (j, 0), (k, 0),  (0, j), (0, k),

in which an invariant metric has the five-parameter block form

    [[x0, 0,   0,   0,   0 ],
     [0,  x1,  0,   x3,  x4],
     [0,  0,   x1, -x4,  x3],
     [0,  x3, -x4,  x2,  0 ],
     [0,  x4,  x3,  0,   x2]]

and the Ricci candidate T has the same shape with entries T0..T4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import expm

from ..core import BracketTable, HomSpaceSpec, structure_constants_from_brackets
from ..errors import DomainError
from ..families import MetricFamily
from ..fibration import alpha_of_stratum, all_reports, check_main_theorem, maximize_over_family, stratum_report
from ..strata import make_stratum

SQRT2 = math.sqrt(2.0)


def su2_structure():
    """[e_a, e_b] = 2 eps_abc e_c for e = (i, j, k)."""
    c = np.zeros((3, 3, 3))
    for a, b, k in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
        c[a, b, k] = 2.0
        c[b, a, k] = -2.0
    return c


def _g_structure():
    c = np.zeros((6, 6, 6))
    c[:3, :3, :3] = su2_structure()
    c[3:, 3:, 3:] = su2_structure()
    return c


def _basis_rows(s, theta):
    """h, e0, v1, v2, w1, w2 in the coordinates (i,0),(j,0),(k,0),(0,i),(0,j),(0,k)."""
    t = math.sqrt(max(0.0, 1.0 - s * s))
    c, sn = math.cos(theta), math.sin(theta)
    return np.array(
        [
            [1, 0, 0, 1, 0, 0],
            [1, 0, 0, -1, 0, 0],
            [0, s * c, s * sn, 0, -t, 0],
            [0, -s * sn, s * c, 0, 0, -t],
            [0, t * c, t * sn, 0, s, 0],
            [0, -t * sn, t * c, 0, 0, s],
        ],
        dtype=float,
    ) / np.array([SQRT2, SQRT2, 1, 1, 1, 1])[:, None]


MODULES = ([0], [1, 2], [3, 4])


def stiefel_bracket_table(s=1.0, theta=0.0):
    rows = _basis_rows(s, theta)
    labels = ("h", "e0", "v1", "v2", "w1", "w2")
    return BracketTable.from_lie_algebra(_g_structure(), rows[:1], rows[1:], labels)


def _change_of_basis(s, theta):
    """Rows: the D_{s,theta} basis of m in the fixed (s=1, theta=0) basis."""
    return _basis_rows(s, theta)[1:] @ _basis_rows(1.0, 0.0)[1:].T


def stiefel_space(s=1.0, theta=0.0, T=None):
    """Decomposition D_{s,theta} of m and its structure constants.

    Returns ``(spec, bt)``.  ``T`` (five entries T0..T4, optional) is
    expressed in the new basis and its diagonal module components become
    the tensor of the returned spec; parts that are not multiples of Q on a
    module are dropped, so pass ``T`` only when they are not needed.
    """
    if not 0.0 <= s <= 1.0:
        raise DomainError("s must lie in [0, 1]")
    bt = stiefel_bracket_table(s, theta)
    tensor = None
    if T is not None:
        Tm = tensor_in_basis(T, s, theta)
        tensor = [np.trace(Tm[np.ix_(mod, mod)]) / len(mod) for mod in MODULES]
    spec = structure_constants_from_brackets(bt, MODULES, tensor=tensor, dim_h=1)
    return spec, bt


def metric_matrix(x0, x1, x2, x3=0.0, x4=0.0):
    return np.array(
        [
            [x0, 0, 0, 0, 0],
            [0, x1, 0, x3, x4],
            [0, 0, x1, -x4, x3],
            [0, x3, -x4, x2, 0],
            [0, x4, x3, 0, x2],
        ],
        dtype=float,
    )


def tensor_in_basis(T, s, theta):
    """Gram matrix of T (entries T0..T4) in the D_{s,theta} basis of m."""
    P = _change_of_basis(s, theta)
    return P @ metric_matrix(*T) @ P.T


_BASIS = np.stack([metric_matrix(*row) for row in np.eye(5)])


def stiefel_family(T=(1.0, 1.0, 1.0, 0.0, 0.0)):
    """All invariant metrics, p = (x0, x1, x2, x3, x4), Ricci from brackets."""
    return MetricFamily.from_brackets(
        stiefel_bracket_table(), _BASIS, np.asarray(T, dtype=float), names=("x0", "x1", "x2", "x3", "x4")
    )


@dataclass(frozen=True)
class StiefelMetric:
    x0: float
    x1: float
    x2: float
    x3: float = 0.0
    x4: float = 0.0

    @property
    def params(self):
        return np.array([self.x0, self.x1, self.x2, self.x3, self.x4])

    @property
    def lam(self):
        return self.x1 * self.x2 - self.x3**2 - self.x4**2

    def is_pd(self):
        return self.x0 > 0 and self.x1 > 0 and self.x2 > 0 and self.lam > 0

    def matrix(self):
        return metric_matrix(*self.params)

    @classmethod
    def from_params(cls, p):
        return cls(*(float(v) for v in p))


# StiefelT has the same five entries; T1 >= T2 may be arranged with
# :func:`stiefel_swap`.
StiefelT = StiefelMetric


def stiefel_scalar(g):
    """Closed-form scalar curvature of the metric with entries x0..x4."""
    g = g if isinstance(g, StiefelMetric) else StiefelMetric.from_params(g)
    if not g.is_pd():
        raise DomainError("Stiefel metric is not positive-definite")
    x0, x1, x2 = g.x0, g.x1, g.x2
    lam = g.lam
    return (
        8.0 / x0
        + 8.0 * (x1 + x2) / lam
        - 8.0 * x1 * x2 / (x0 * lam)
        - x0 * (x1 - x2) ** 2 / lam**2
        - 2.0 * x0 / lam
    )


def stiefel_trace(g, T):
    """Closed form of tr_g T."""
    g = g if isinstance(g, StiefelMetric) else StiefelMetric.from_params(g)
    T0, T1, T2, T3, T4 = T
    return T0 / g.x0 + (2 * g.x1 * T2 + 2 * g.x2 * T1 - 4 * g.x3 * T3 - 4 * g.x4 * T4) / g.lam


def ricci_offdiag_closed_form(g):
    """Cross-block Ricci coordinates (Ric3, Ric4) = x_{3,4}(4 x1 x2 - x0^2)/(x0 Lambda)."""
    g = g if isinstance(g, StiefelMetric) else StiefelMetric.from_params(g)
    f = (4 * g.x1 * g.x2 - g.x0**2) / (g.x0 * g.lam)
    return np.array([g.x3 * f, g.x4 * f])


def gamma(T0, T2, T3, T4):
    return (T0 + math.sqrt(T0**2 + 16 * T0 * T2) + 16 * math.hypot(T3, T4)) / 8.0


def alpha_k(T0, Ti):
    """Closed-form alpha of K_1 (Ti = T1) or K_2 (Ti = T2)."""
    return (8 * Ti + T0 - math.sqrt(T0**2 + 16 * T0 * Ti)) / (2 * Ti**2)


def theta_zero(T3, T4):
    """Angle maximizing cos(theta) T3 - sin(theta) T4; 0 when T3 = T4 = 0."""
    if T3 == 0.0 and T4 == 0.0:
        return 0.0
    return math.atan2(-T4, T3) + 0.0


def stiefel_alpha_beta(T):
    """Closed-form invariants of all intermediate subalgebras and the region.

    ``region`` is ``"a"`` when K_2 realizes alpha_{G/H} with beta - alpha > 0,
    ``"b"`` when some K^theta does, and ``None`` otherwise (T1 >= T2 is
    assumed; swap first otherwise).
    """
    T0, T1, T2, T3, T4 = (float(v) for v in T)
    rho = math.hypot(T3, T4)
    out = {
        "k0": (0.0, None),
        "k1": (alpha_k(T0, T1), 4.0 / T2),
        "k2": (alpha_k(T0, T2), 4.0 / T1),
        "ktheta0": (4.0 / (T1 + T2 - 2 * rho), 12.0 / (T0 + T1 + T2 + 2 * rho)),
        "theta0": theta_zero(T3, T4),
        "gamma": gamma(T0, T2, T3, T4),
    }
    upper = T2 + (T0 + math.sqrt(T0**2 + 16 * T0 * T2)) / 8.0
    if out["gamma"] <= T1 < upper:
        out["region"] = "a"
    elif T0 / 2 - T2 + 4 * rho < T1 <= out["gamma"]:
        out["region"] = "b"
    else:
        out["region"] = None
    return out


def alpha_theta(T, theta):
    T0, T1, T2, T3, T4 = T
    return 4.0 / (T1 + T2 - 2 * (math.cos(theta) * T3 - math.sin(theta) * T4))


def beta_theta(T, theta):
    T0, T1, T2, T3, T4 = T
    return 12.0 / (T0 + T1 + T2 + 2 * (math.cos(theta) * T3 - math.sin(theta) * T4))


def _pullback(A, g):
    """Params of the pullback A^T G A of a Stiefel metric by a linear map A of m."""
    fam = stiefel_family()
    G = metric_matrix(*np.asarray(g.params if isinstance(g, StiefelMetric) else g, dtype=float))
    return fam.params(A.T @ G @ A)


def normalizer_action(eta):
    """Matrix of Ad_n on m for n = (exp(eta i), 1), in the fixed basis."""
    bt = stiefel_bracket_table()
    # (i, 0) = ((i,i)/sqrt2 + (i,-i)/sqrt2)/sqrt2 = (h + e0)/sqrt2
    z = np.zeros(bt.n)
    z[0] = z[1] = 1.0 / SQRT2
    ad = np.einsum("a,abc->cb", z, bt.coeffs)
    return expm(eta * ad)[1:, 1:]


def stiefel_normalizer(eta, g):
    """Pullback of g by the normalizer element (exp(eta i), 1)."""
    return StiefelMetric.from_params(_pullback(normalizer_action(eta), g))


def _automorphism_on_m(phi):
    """Restriction to m of an automorphism of g given in (i,j,k | i,j,k)
    coordinates."""
    rows = _basis_rows(1.0, 0.0)[1:]
    return rows @ phi @ rows.T


def factor_swap():
    """Outer automorphism (X, Y) -> (Y, X) restricted to m."""
    phi = np.zeros((6, 6))
    phi[:3, 3:] = np.eye(3)
    phi[3:, :3] = np.eye(3)
    return _automorphism_on_m(phi)


def conjugation_jj():
    """Conjugation by (j, j): i -> -i, j -> j, k -> -k in each factor."""
    return _automorphism_on_m(np.diag([-1.0, 1, -1, -1, 1, -1]))


def stiefel_swap(g):
    """Composite automorphism taking (x1, x2, x3, x4) to (x2, x1, x3, x4)."""
    A = factor_swap() @ conjugation_jj()
    return StiefelMetric.from_params(_pullback(A, g))


def theta_fiber_base(T, theta):
    """Fiber and base descriptions for the intermediate subalgebra
    k^theta = h + m_1^{s,theta} at s = 1/sqrt2.

    The base G/K^theta is isotropy irreducible, so its K^theta-invariant
    metrics are multiples of Q on m_0 + m_2^{s,theta}; it is returned as a
    single merged module.
    """
    s = 1.0 / SQRT2
    bt = stiefel_bracket_table(s, theta)
    Tm = tensor_in_basis(T, s, theta)
    tensor = [np.trace(Tm[np.ix_(mod, mod)]) / len(mod) for mod in MODULES]
    spec = structure_constants_from_brackets(bt, MODULES, tensor=tensor, dim_h=1)
    merged = [0, 3, 4]
    base_tensor = np.trace(Tm[np.ix_(merged, merged)]) / 3.0
    base = structure_constants_from_brackets(
        bt, [merged, [1, 2]], tensor=[base_tensor, 1.0], dim_h=1
    ).restrict([0], torus_ok=False)
    return spec, base


def theta_alpha(T, theta):
    """alpha of k^theta from the general optimizer on its fiber."""
    spec, _ = stiefel_space(1.0 / SQRT2, theta, T)
    return alpha_of_stratum(spec, make_stratum(spec, [1]), certificate=False).value


def theta_report(T, theta, certificate=False):
    """alpha/beta report of k^theta = h + m_1^{s,theta} at s = 1/sqrt2."""
    spec, base = theta_fiber_base(T, theta)
    stratum = make_stratum(spec, [1])
    return stratum_report(spec, stratum, base=base, base_valid=True, label=f"ktheta({theta:.6g})", certificate=certificate)


def stiefel_reports(T, certificate=False):
    """Reports for K_0, K_1, K_2 and the best member of the K^theta family.

    theta is located numerically; the closed-form theta_0 is not used.
    """
    spec, _ = stiefel_space(1.0, 0.0, T)
    names = {(0,): "k0", (0, 1): "k1", (0, 2): "k2"}
    reports = []
    for rep in all_reports(spec, base_valid=True, certificate=certificate):
        reports.append(replace(rep, label=names.get(rep.J, rep.label)))
    theta, _ = maximize_over_family(lambda th: theta_alpha(T, th), -math.pi, math.pi, n_scan=24)
    reports.append(theta_report(T, theta, certificate))
    return reports


def stiefel_check(T):
    return check_main_theorem(stiefel_reports(T))
