"""Critical points of S on M_T, i.e. solutions of Ric(g) = c T.

Metrics are handled through a :class:`~ricciscope.families.MetricFamily`,
so the same code serves diagonal metrics of a fixed decomposition and the
full invariant families of the example spaces.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import brentq

from .core import TOL_SOLVER, HomSpaceSpec
from .errors import DomainError, IndefiniteDrift, NoConvergence, NoSolution
from .families import MetricFamily

LOCAL_MAX = "LocalMax"
SADDLE = "Saddle"
DEGENERATE = "DegenerateCandidate"

ZERO_EIG = 1e-6
MAX_COND = 1e12
RANK_TOL = 1e-7


@dataclass(frozen=True, eq=False)
class CriticalPoint:
    g: np.ndarray
    c: float
    residual: float
    family: MetricFamily = None
    signature: tuple = None
    classification: str = None
    iterations: int = 0
    rank: int = None

    @property
    def matrix(self):
        return self.family.matrix(self.g)

    @property
    def scalar(self):
        return float(self.family.scalar(self.g))

    def describe(self):
        if self.classification == SADDLE:
            return f"Saddle({self.signature[0]},{self.signature[2]})"
        return self.classification or "unclassified"


def as_family(space):
    if isinstance(space, MetricFamily):
        return space
    if isinstance(space, HomSpaceSpec):
        return MetricFamily.diagonal(space)
    raise TypeError("expected a MetricFamily or a HomSpaceSpec")


def residual_of(family, p, c):
    """Sup-norm of Ric(g) - c T as a matrix on m."""
    return float(np.max(np.abs(family.ricci_matrix(p) - c * family.matrix(family.tensor))))


def _system(family, z):
    p, c = z[:-1], z[-1]
    return np.append(family.ricci(p) - c * family.tensor, family.trace(p) - 1.0)


def _jacobian(family, z, h):
    n = len(z)
    J = np.empty((n, n))
    scale = np.max(np.abs(z[:-1]))
    for k in range(n):
        e = np.zeros(n)
        e[k] = h * (scale if k < n - 1 else max(1.0, abs(z[-1])))
        J[:, k] = (_system(family, z + e) - _system(family, z - e)) / (2 * e[k])
    return J


def _finish(family, z, iterations, fd_step):
    # one more Newton step is cheap and usually lands at rounding level
    F = _system(family, z)
    trial = z + np.linalg.lstsq(_jacobian(family, z, fd_step), -F, rcond=None)[0]
    if family.is_pd(trial[:-1]):
        F_new = _system(family, trial)
        if F_new @ F_new < F @ F:
            z = trial
    # Ric is scale invariant, so the residual test alone does not pin down
    # tr_g T = 1; rescaling onto M_T is exact and leaves Ric unchanged
    p = family.normalize(z[:-1])
    return CriticalPoint(p, float(z[-1]), residual_of(family, p, z[-1]), family, iterations=iterations)


def find_critical(space, start, max_iter=200, tol=TOL_SOLVER, fd_step=1e-6):
    """Newton iteration on {Ric(g) - c T = 0, tr_g T = 1} in (g, c).

    The step is a least-squares solution, so non-isolated solutions
    (critical circles and surfaces) are approached along the minimal-norm
    direction.  Steps are halved until ||F||^2 decreases and g stays
    positive-definite.
    """
    family = as_family(space)
    p = np.asarray(start, dtype=float)
    if not family.is_pd(p):
        raise DomainError("start metric is not positive-definite")
    p = family.normalize(p)
    z = np.append(p, family.scalar(p))
    F = _system(family, z)
    for it in range(max_iter):
        res = residual_of(family, z[:-1], z[-1])
        if res <= tol:
            return _finish(family, z, it, fd_step)
        J = _jacobian(family, z, fd_step)
        step = np.linalg.lstsq(J, -F, rcond=None)[0]
        a, accepted, drift = 1.0, False, False
        while a > 1e-10:
            trial = z + a * step
            if not family.is_pd(trial[:-1]):
                drift = True
                a *= 0.5
                continue
            F_new = _system(family, trial)
            if F_new @ F_new < (1 - 1e-4 * a) * (F @ F):
                accepted = True
                break
            a *= 0.5
        if not accepted:
            if drift:
                raise IndefiniteDrift(f"iterates leave the positive-definite cone (residual {res:.3e})")
            raise NoConvergence(f"line search failed at iteration {it} (residual {res:.3e})")
        z, F = trial, F_new
    res = residual_of(family, z[:-1], z[-1])
    if res <= tol:
        return _finish(family, z, max_iter, fd_step)
    raise NoConvergence(f"no convergence after {max_iter} iterations (residual {res:.3e})")


def solve_diag_system(T, family=None):
    """Diagonal solution for the Stiefel space with T = (T0, T1, T2, 0, 0).

    c solves (T1^2 + T2^2) c^2 - (8 T1 + 8 T2 + T0) c + 32 = 0 on
    (0, 4/max(T1, T2)); then x0 = (4 - c T_i) x_i and x0 follows from the
    trace constraint.
    """
    T = np.asarray(T, dtype=float)
    if T.shape == (3,):
        T = np.append(T, [0.0, 0.0])
    T0, T1, T2 = T[:3]
    if np.any(T[3:] != 0.0):
        raise DomainError("the diagonal system needs T3 = T4 = 0")
    f = lambda c: (T1**2 + T2**2) * c**2 - (8 * T1 + 8 * T2 + T0) * c + 32.0
    cmax = 4.0 / max(T1, T2)
    if not f(cmax) < 0:
        raise NoSolution("no admissible root of the diagonal system")
    c = brentq(f, 0.0, cmax, xtol=1e-15, rtol=4 * np.finfo(float).eps)
    x0 = T0 + 2 * T1 * (4 - c * T1) + 2 * T2 * (4 - c * T2)
    p = np.array([x0, x0 / (4 - c * T1), x0 / (4 - c * T2), 0.0, 0.0])
    if family is None:
        from .spaces.stiefel import stiefel_family

        family = stiefel_family(T)
    else:
        family = family.with_tensor(T)
    return CriticalPoint(p, float(c), residual_of(family, p, c), family)


def _normalized_scalar(family, p):
    return float(family.normalized_scalar(p))


def constrained_hessian(family, p, step=1e-4):
    """Hessian of S restricted to the tangent space of M_T at p.

    Uses f = S / tr_g T, which is scale invariant, agrees with S on M_T and
    has p as an unconstrained critical point; its second derivative along
    ker d(tr) is the constrained Hessian.
    """
    p = np.asarray(p, dtype=float)
    n = len(p)
    h = step * np.max(np.abs(p))
    f = lambda q: _normalized_scalar(family, q)
    H = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            ei = np.zeros(n)
            ej = np.zeros(n)
            ei[i] = h
            ej[j] = h
            H[i, j] = H[j, i] = (f(p + ei + ej) - f(p + ei - ej) - f(p - ei + ej) + f(p - ei - ej)) / (4 * h * h)
    N = null_space(family.constraint_gradient(p)[None, :])
    return N.T @ H @ N


def signature_of(eigs, zero_tol=ZERO_EIG):
    scale = np.max(np.abs(eigs)) if len(eigs) else 0.0
    zero = np.abs(eigs) <= zero_tol * scale
    return (int(np.sum((eigs < 0) & ~zero)), int(np.sum(zero)), int(np.sum((eigs > 0) & ~zero)))


def hessian_signature(space, cp, step=1e-4):
    """(n_neg, n_zero, n_pos) of the constrained Hessian at a critical point."""
    family = as_family(space) if space is not None else cp.family
    if cp.residual > 10 * TOL_SOLVER:
        raise DomainError("not a critical point (residual too large)")
    eigs = np.linalg.eigvalsh(constrained_hessian(family, cp.g, step))
    return signature_of(eigs), eigs


def classify(space, cp, step=1e-4):
    """Return a copy of ``cp`` with signature and classification filled in."""
    family = as_family(space) if space is not None else cp.family
    sig, eigs = hessian_signature(family, cp, step)
    absmax = np.max(np.abs(eigs))
    cond = absmax / max(np.min(np.abs(eigs)), 1e-300)
    rank = None
    if sig[1] > 0 or cond > MAX_COND:
        kind = DEGENERATE
        rank = ricci_map_rank(family, cp.g)
    elif sig[2] == 0:
        kind = LOCAL_MAX
    else:
        kind = SADDLE
    return CriticalPoint(cp.g, cp.c, cp.residual, family, sig, kind, cp.iterations, rank)


def ricci_jacobian(space, p, step=1e-3):
    """Fourth-order central differences of p -> Ric(p) coordinates."""
    family = as_family(space)
    p = np.asarray(p, dtype=float)
    n = len(p)
    # keep every stencil point well inside the positive-definite cone
    lam_min = np.linalg.eigvalsh(family.matrix(p))[0]
    h = step * lam_min / np.max(np.linalg.norm(family.basis, ord=2, axis=(1, 2)))
    R = family.ricci
    cols = []
    for k in range(n):
        e = np.zeros(n)
        e[k] = h
        cols.append((-R(p + 2 * e) + 8 * R(p + e) - 8 * R(p - e) + R(p - 2 * e)) / (12 * h))
    return np.column_stack(cols)


def ricci_map_rank(space, p, tol=RANK_TOL, step=1e-3):
    """Numerical rank of d Ric at g (singular values below tol * max are zero)."""
    s = np.linalg.svd(ricci_jacobian(space, p, step), compute_uv=False)
    return int(np.sum(s > tol * s[0])) if s[0] > 0 else 0


def constrained_gradient(space, p, step=1e-6):
    """Central-difference gradient of S along ker d(tr) at p (p on M_T)."""
    family = as_family(space)
    p = np.asarray(p, dtype=float)
    N = null_space(family.constraint_gradient(p)[None, :])
    h = step * np.max(np.abs(p))
    return np.array([(family.scalar(p + h * v) - family.scalar(p - h * v)) / (2 * h) for v in N.T])


def multistart_starts(family, diag=None, n_random=8, seed=0, spread=0.3):
    """Q, the diagonal solution if any, and seeded random perturbations."""
    rng = np.random.default_rng(seed)
    q = family.params(np.eye(family.basis.shape[1]))
    starts = [q]
    if diag is not None:
        starts.append(np.asarray(diag, dtype=float))
    base = starts[-1]
    scale = np.max(np.abs(base))
    while len(starts) < n_random + 1 + (diag is not None):
        cand = base + spread * scale * rng.standard_normal(len(base))
        if family.is_pd(cand):
            starts.append(cand)
    return starts


def search_critical(space, starts, tol=TOL_SOLVER, dedup=1e-6, max_iter=200):
    """Run find_critical from each start; distinct solutions in start order."""
    family = as_family(space)
    found = []
    for s in starts:
        try:
            cp = find_critical(family, s, max_iter=max_iter, tol=tol)
        except (NoConvergence, DomainError):
            continue
        if not any(np.max(np.abs(cp.g - o.g)) <= dedup * np.max(np.abs(o.g)) for o in found):
            found.append(cp)
    return found
