"""Boundary strata of the constraint simplex and the estimates near them.

Diagonal metrics on M_T form the open simplex
Delta = {y > 0, sum d_i T_i y_i = 1}.  Its faces Delta_J (coordinates outside
J zero) are marked by the subalgebra k = h + m_J when that is one, and by
infinity otherwise; S tends to -infinity towards the latter.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .core import HomSpaceSpec, center_point, scalar_curvature_diag
from .errors import DomainError, UsageError

MAX_MODULES = 16
ZERO_THRESHOLD = 1e-7

SUBALGEBRA = "subalgebra"
INFINITY = "infinity"


@dataclass(frozen=True, eq=False)
class StratumInfo:
    J: tuple
    marking: str
    leak: float
    fiber_spec: HomSpaceSpec = None
    dim_k: int = None

    @property
    def is_subalgebra(self):
        return self.marking == SUBALGEBRA

    def complement(self, r):
        return tuple(i for i in range(r) if i not in self.J)

    def __repr__(self):
        return f"StratumInfo(J={self.J}, marking={self.marking}, dim_k={self.dim_k})"


# Sentinel returned by stratum_of_limit when no coordinate degenerates.
INTERIOR = "interior"


def fiber_killing(spec, J):
    """b-bar_i = b_i - sum_{j,k in J^c} [ijk]/d_i for i in J (ordered pairs)."""
    J = list(J)
    Jc = [i for i in range(spec.r) if i not in J]
    leak = spec.sc[np.ix_(J, Jc, Jc)].sum(axis=(1, 2)) if Jc else np.zeros(len(J))
    return spec.killing[J] - leak / spec.d[J]


def base_spec(spec, J):
    """Diagonal description of G/K on the complement of J: same b_i, sc
    restricted to J^c."""
    Jc = [i for i in range(spec.r) if i not in J]
    return spec.restrict(Jc)


def make_stratum(spec, J):
    J = tuple(sorted(int(i) for i in J))
    Jc = [i for i in range(spec.r) if i not in J]
    if not J or not Jc:
        raise UsageError("a stratum needs a nonempty proper index set")
    leak = float(spec.sc[np.ix_(J, J, Jc)].sum())
    if leak > 0.0:
        return StratumInfo(J, INFINITY, leak)
    bbar = np.clip(fiber_killing(spec, J), 0.0, None)
    fiber = spec.restrict(J, killing=bbar, torus_ok=True)
    dim_k = spec.dim_h + int(sum(spec.dims[i] for i in J))
    return StratumInfo(J, SUBALGEBRA, 0.0, fiber, dim_k)


def enumerate_strata(spec):
    """One StratumInfo per nonempty proper J, ordered by size then lexicographically."""
    if spec.r > MAX_MODULES:
        raise UsageError(f"stratum enumeration is capped at r <= {MAX_MODULES}")
    out = []
    for size in range(1, spec.r):
        for J in itertools.combinations(range(spec.r), size):
            out.append(make_stratum(spec, J))
    return out


def subalgebra_strata(spec):
    return [s for s in enumerate_strata(spec) if s.is_subalgebra]


def upper_bound_near_stratum(spec, stratum, alpha_fiber, eps):
    """alpha + eps * sum_{i in J^c} d_i b_i / 2, an upper bound for S on
    {y in M_T : max_{i in J^c} y_i <= eps}."""
    if not stratum.is_subalgebra:
        raise UsageError("the bound applies to subalgebra strata only")
    if eps <= 0:
        raise DomainError("eps must be positive")
    Jc = list(stratum.complement(spec.r))
    return float(alpha_fiber + eps * np.sum(spec.d[Jc] * spec.killing[Jc]) / 2.0)


@dataclass(frozen=True, eq=False)
class GeodesicRay:
    """gamma_v(t) = v0 - t v on Delta, for a unit direction v tangent to it."""

    v: np.ndarray
    v0: np.ndarray
    t_v: float

    @classmethod
    def from_direction(cls, spec, v):
        v = np.asarray(v, dtype=float)
        w = spec.d * spec.tensor
        v = v - (v @ w) / (w @ w) * w
        norm = np.linalg.norm(v)
        if norm == 0:
            raise DomainError("direction is normal to the constraint set")
        v = v / norm
        t_v = 1.0 / (spec.r * np.max(w * v))
        return cls(v, center_point(spec), float(t_v))

    @classmethod
    def toward(cls, spec, target):
        """Ray from the centre through a point of the closed simplex."""
        target = np.asarray(target, dtype=float)
        if np.any(target < 0):
            raise DomainError("target must have nonnegative coordinates")
        target = target / (target @ (spec.d * spec.tensor))
        return cls.from_direction(spec, center_point(spec) - target)

    def __call__(self, t):
        return self.v0 - np.multiply.outer(t, self.v)

    @property
    def exit_point(self):
        p = self(self.t_v)
        return np.where(np.abs(p) < 1e-14 * np.max(self.v0), 0.0, p)

    def exit_set(self, tol=1e-12):
        """J with gamma_v(t_v) in Delta_J."""
        p = self(self.t_v)
        return tuple(int(i) for i in np.flatnonzero(p > tol * np.max(self.v0)))


def witness_triple(spec, stratum):
    """(i, j, k) with i, j in J, k outside, maximizing [ijk]."""
    J = list(stratum.J)
    Jc = list(stratum.complement(spec.r))
    best = None
    for i, j in itertools.combinations_with_replacement(J, 2):
        for k in Jc:
            if spec.sc[i, j, k] > 0 and (best is None or spec.sc[i, j, k] > spec.sc[best]):
                best = (i, j, k)
    return best


def divergence_witness(spec, stratum, ray, a):
    """epsilon(v) for a ray leaving through an infinity-marked stratum.

    Returns ``(eps, (i, j, k))``; S(gamma_v(t)) < -a for
    (1 - eps) t_v < t < t_v.
    """
    if stratum.is_subalgebra:
        raise UsageError("divergence witnesses exist only for infinity-marked strata")
    if a <= 0:
        raise DomainError("a must be positive")
    if ray.exit_set() != stratum.J:
        raise UsageError(f"ray exits through {ray.exit_set()}, not {stratum.J}")
    triple = witness_triple(spec, stratum)
    if triple is None:
        raise RuntimeError(f"stratum {stratum.J} is marked infinity but has no witnessing triple")
    i, j, k = triple
    A = np.max(spec.killing) / np.min(spec.tensor)
    v, v0, tv = ray.v, ray.v0, ray.t_v
    vp = np.clip(v, 0.0, None)
    num = spec.sc[i, j, k] * (v0[i] - tv * vp[i]) * (v0[j] - tv * vp[j])
    eps = min(num / (4.0 * (A + a) * tv * v[k]), 0.5)
    return float(eps), triple


def stratum_of_limit(spec, points, threshold=ZERO_THRESHOLD):
    """Stratum whose vanishing coordinates match those tending to zero
    along ``points`` (judged at the last point), or INTERIOR."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if np.any(pts <= 0):
        raise DomainError("points must have positive coordinates")
    traces = pts @ (spec.d * spec.tensor)
    if np.max(np.abs(traces - 1.0)) > 1e-10:
        raise DomainError("points must satisfy the trace constraint")
    last = pts[-1]
    zero = last < threshold
    if not np.any(zero):
        return INTERIOR
    if len(pts) > 1:
        # coordinates must also be decreasing towards the end
        zero &= pts[-1] <= pts[0]
    J = tuple(int(i) for i in np.flatnonzero(~zero))
    return make_stratum(spec, J)


def sample_near_stratum(spec, stratum, eps, n, rng):
    """Random points of M_T with max_{i in J^c} y_i <= eps."""
    J = list(stratum.J)
    Jc = list(stratum.complement(spec.r))
    w = spec.d * spec.tensor
    out = np.empty((n, spec.r))
    out[:, Jc] = eps * (1.0 - rng.random(size=(n, len(Jc))))
    rest = 1.0 - out[:, Jc] @ w[Jc]
    weights = rng.dirichlet(np.ones(len(J)), size=n)
    out[:, J] = weights * rest[:, None] / w[J]
    ok = np.all(out > 0, axis=1)
    return out[ok]


def scalar_on_ray(spec, ray, t):
    return scalar_curvature_diag(spec, ray(np.asarray(t)))


__all__ = [
    "GeodesicRay",
    "INFINITY",
    "INTERIOR",
    "StratumInfo",
    "SUBALGEBRA",
    "base_spec",
    "divergence_witness",
    "enumerate_strata",
    "fiber_killing",
    "make_stratum",
    "sample_near_stratum",
    "stratum_of_limit",
    "subalgebra_strata",
    "upper_bound_near_stratum",
    "witness_triple",
]
