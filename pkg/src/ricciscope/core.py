"""Invariant metrics on compact homogeneous spaces G/H.

Two descriptions of a space are supported:

* :class:`HomSpaceSpec` -- the discrete data of a fixed Ad_H-invariant
  decomposition m = m_0 + ... + m_{r-1}: module dimensions d_i, Killing
  constants b_i (B|m_i = -b_i Q|m_i), the totally symmetric structure
  constants [ijk] and the diagonal components T_i of the Ricci candidate.
  This is enough to evaluate everything on diagonal metrics.
* :class:`BracketTable` -- the Lie bracket of g = h + m in a Q-orthonormal
  basis, which is needed for metrics that are not diagonal.

Diagonal metrics are written either in x-coordinates, g = sum x_i Q|m_i, or
in the reciprocal y-coordinates y_i = 1/x_i used on the constraint simplex.
All indices are 0-based.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, SpecError

# Algebraic identities (Jacobi, antisymmetry) and solver residuals.
TOL_ALGEBRA = 1e-10
TOL_SOLVER = 1e-8


def _symmetrize_triples(r, triples):
    sc = np.zeros((r, r, r))
    seen = {}
    for key, value in triples.items():
        i, j, k = (int(n) for n in key)
        if not all(0 <= n < r for n in (i, j, k)):
            raise SpecError("sc-index", f"triple {(i, j, k)} out of range for r={r}")
        canon = tuple(sorted((i, j, k)))
        value = float(value)
        if canon in seen and not np.isclose(seen[canon], value, rtol=1e-12, atol=1e-14):
            raise SpecError(
                "sc-symmetry",
                f"[{i}{j}{k}]={value} disagrees with a permutation valued {seen[canon]}",
            )
        seen[canon] = value
        for perm in set(itertools.permutations(canon)):
            sc[perm] = value
    return sc


@dataclass(frozen=True, eq=False)
class HomSpaceSpec:
    """Discrete description of G/H with a fixed decomposition of m.

    ``sc`` may be given as a full r x r x r array or as a mapping from index
    triples to values; it is stored as the full symmetric array.  Tori (all
    b_i = 0) are rejected unless ``torus_ok`` is set, which is only used for
    the fibers K/H of intermediate subgroups.
    """

    dims: tuple
    killing: np.ndarray
    sc: np.ndarray
    tensor: np.ndarray = None
    dim_h: int = 0
    torus_ok: bool = field(default=False, repr=False)

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        r = len(dims)
        if r == 0 or any(d <= 0 for d in dims):
            raise SpecError("dims", "module dimensions must be positive integers")
        killing = np.asarray(self.killing, dtype=float).reshape(-1)
        if isinstance(self.sc, dict):
            sc = _symmetrize_triples(r, self.sc)
        else:
            sc = np.array(self.sc, dtype=float)
        tensor = np.ones(r) if self.tensor is None else np.asarray(self.tensor, dtype=float).reshape(-1)
        if killing.shape != (r,) or tensor.shape != (r,):
            raise SpecError("shape", "killing and tensor need one entry per module")
        if sc.shape != (r, r, r):
            raise SpecError("shape", f"sc must have shape {(r, r, r)}")
        tol = 1e-14 + 1e-12 * np.abs(sc).max(initial=0.0)
        for perm in ((1, 0, 2), (0, 2, 1)):
            if np.abs(sc - sc.transpose(perm)).max(initial=0.0) > tol:
                raise SpecError("sc-symmetry", "structure constants are not totally symmetric")
        if np.any(sc < -1e-14):
            raise SpecError("sc-nonnegative", "structure constants must be >= 0")
        if np.any(killing < -1e-12):
            raise SpecError("killing-nonnegative", "Killing constants must be >= 0")
        if not np.all(tensor > 0):
            raise SpecError("tensor-positive", "T_i must be positive")
        if not self.torus_ok and not np.any(killing > 1e-12):
            raise SpecError("torus", "all b_i vanish, so G/H is a torus")
        sc = np.where(np.abs(sc) < 1e-14, 0.0, sc)
        killing = np.clip(killing, 0.0, None)
        for name, value in (("dims", dims), ("killing", killing), ("sc", sc), ("tensor", tensor)):
            if isinstance(value, np.ndarray):
                value.setflags(write=False)
            object.__setattr__(self, name, value)
        object.__setattr__(self, "dim_h", int(self.dim_h))

    @property
    def r(self):
        return len(self.dims)

    @property
    def d(self):
        return np.asarray(self.dims, dtype=float)

    def with_tensor(self, tensor):
        return HomSpaceSpec(self.dims, self.killing, self.sc, tensor, self.dim_h, self.torus_ok)

    def restrict(self, J, killing=None, torus_ok=True):
        """Sub-description on the modules in ``J`` (structure constants and
        tensor restricted, Killing constants kept unless overridden)."""
        J = list(J)
        kill = self.killing[J] if killing is None else killing
        return HomSpaceSpec(
            [self.dims[i] for i in J],
            kill,
            self.sc[np.ix_(J, J, J)],
            self.tensor[J],
            self.dim_h,
            torus_ok,
        )

    def triples(self):
        """Nonzero structure constants, once per unordered triple."""
        out = {}
        for i, j, k in itertools.combinations_with_replacement(range(self.r), 3):
            if self.sc[i, j, k] != 0.0:
                out[(i, j, k)] = float(self.sc[i, j, k])
        return out

    def to_dict(self):
        return {
            "dims": list(self.dims),
            "killing": [float(b) for b in self.killing],
            "sc": [{"ijk": list(key), "v": v} for key, v in self.triples().items()],
            "tensor": [float(t) for t in self.tensor],
            "dim_h": self.dim_h,
        }

    @classmethod
    def from_dict(cls, doc):
        triples = {}
        for entry in doc.get("sc", []):
            key = tuple(int(n) for n in entry["ijk"])
            if key in triples and triples[key] != float(entry["v"]):
                raise SpecError("sc-symmetry", f"triple {key} listed twice with different values")
            triples[key] = float(entry["v"])
        return cls(
            doc["dims"],
            doc["killing"],
            triples,
            doc.get("tensor"),
            doc.get("dim_h", 0),
        )

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def _positive(arr, name):
    arr = np.asarray(arr, dtype=float)
    if not np.all(arr > 0):
        raise DomainError(f"{name} coordinates must be positive")
    return arr


def scalar_curvature_diag(spec, y):
    """Scalar curvature of the diagonal metric with y_i = 1/x_i.

    S = 1/2 sum_i d_i b_i y_i - 1/4 sum_{i,j,k} [ijk] y_i y_j / y_k, the
    triple sum running over ordered triples.  ``y`` may carry leading batch
    axes.
    """
    y = _positive(y, "y")
    linear = 0.5 * y @ (spec.d * spec.killing)
    bracket = np.einsum("ijk,...i,...j,...k->...", spec.sc, y, y, 1.0 / y)
    return linear - 0.25 * bracket


def scalar_curvature_x(spec, x):
    """Same functional in x-coordinates, g = sum x_i Q|m_i."""
    x = _positive(x, "x")
    return scalar_curvature_diag(spec, 1.0 / x)


def scalar_gradient_diag(spec, y):
    """Gradient of :func:`scalar_curvature_diag` with respect to y."""
    y = _positive(y, "y")
    inv = 1.0 / y
    q = 2.0 * np.einsum("mjk,j,k->m", spec.sc, y, inv) - np.einsum(
        "ijm,i,j->m", spec.sc, y, y
    ) * inv**2
    return 0.5 * spec.d * spec.killing - 0.25 * q


def scalar_hessian_diag(spec, y):
    """Hessian of :func:`scalar_curvature_diag` with respect to y."""
    y = _positive(y, "y")
    inv = 1.0 / y
    sc = spec.sc
    h = 2.0 * np.einsum("mnk,k->mn", sc, inv)
    h -= 2.0 * np.einsum("mjn,j->mn", sc, y) * inv[None, :] ** 2
    h -= 2.0 * np.einsum("inm,i->mn", sc, y) * inv[:, None] ** 2
    h += np.diag(2.0 * np.einsum("ijm,i,j->m", sc, y, y) * inv**3)
    return -0.25 * h


def trace_constraint(spec, y):
    """tr_g T = sum_i d_i T_i y_i; the constraint set M_T is where this is 1.

    Linear in y, so it is also evaluated on the closed simplex (up to
    rounding-level negative coordinates).
    """
    y = np.asarray(y, dtype=float)
    if np.any(y < -1e-12 * np.max(np.abs(y), axis=-1, keepdims=True)):
        raise DomainError("y coordinates must be nonnegative")
    return y @ (spec.d * spec.tensor)


def center_point(spec):
    """The center v0 of the constraint simplex, v0_i = 1/(r d_i T_i)."""
    return 1.0 / (spec.r * spec.d * spec.tensor)


def ricci_diag(spec, x):
    """Ricci tensor of a diagonal metric, as Ric|m_k = rho_k Q|m_k.

    Uses the classical expression for the Ricci eigenvalues
    r_k = b_k/(2 x_k) + 1/(4 d_k) sum [ijk] x_k/(x_i x_j)
    - 1/(2 d_k) sum [kij] x_j/(x_k x_i), and returns rho_k = r_k x_k.
    """
    x = _positive(x, "x")
    y = 1.0 / x
    sc, d = spec.sc, spec.d
    first = np.einsum("ijk,i,j->k", sc, y, y) * x / (4.0 * d)
    second = np.einsum("kij,j,i->k", sc, x, y) * y / (2.0 * d)
    r = spec.killing * y / 2.0 + first - second
    return r * x


@dataclass(frozen=True, eq=False)
class BracketTable:
    """Lie bracket of g = h + m in a Q-orthonormal basis.

    ``coeffs[a, b, c]`` is the coefficient of e_c in [e_a, e_b]; the first
    ``n_h`` basis vectors span h and the remaining ``n_m`` span m.
    """

    n_h: int
    n_m: int
    coeffs: np.ndarray
    labels: tuple = None

    def __post_init__(self):
        n = self.n_h + self.n_m
        coeffs = np.array(self.coeffs, dtype=float)
        if coeffs.shape != (n, n, n):
            raise SpecError("shape", f"bracket coefficients must have shape {(n, n, n)}")
        coeffs[np.abs(coeffs) < 1e-15] = 0.0
        coeffs.setflags(write=False)
        labels = tuple(self.labels) if self.labels is not None else tuple(f"e{a}" for a in range(n))
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self):
        return self.n_h + self.n_m

    @property
    def m_coeffs(self):
        """Bracket of m with m, projected to m."""
        h = self.n_h
        return self.coeffs[h:, h:, h:]

    @property
    def killing(self):
        """Killing form B(e_a, e_b) = tr(ad e_a ad e_b) on all of g."""
        return np.einsum("agd,bdg->ab", self.coeffs, self.coeffs)

    @property
    def killing_full(self):
        """Killing form restricted to m."""
        h = self.n_h
        return self.killing[h:, h:]

    def check(self, tol=TOL_ALGEBRA):
        """Raise :class:`SpecError` if an invariant of a Q-orthonormal
        bracket table of a compact Lie algebra is violated."""
        c = self.coeffs
        if not np.allclose(c, -c.transpose(1, 0, 2), atol=tol):
            raise SpecError("antisymmetry", "[e_a, e_b] != -[e_b, e_a]")
        if not np.allclose(c, -c.transpose(0, 2, 1), atol=tol):
            raise SpecError("bi-invariance", "Q([e_a,e_b],e_c) is not totally antisymmetric")
        # [a,[b,d]] + [b,[d,a]] + [d,[a,b]] = 0
        jac = (
            np.einsum("bde,aef->abdf", c, c)
            + np.einsum("dae,bef->abdf", c, c)
            + np.einsum("abe,def->abdf", c, c)
        )
        if np.max(np.abs(jac), initial=0.0) > tol:
            raise SpecError("jacobi", f"Jacobi identity fails by {np.max(np.abs(jac)):.3e}")
        h = self.n_h
        if h and np.max(np.abs(c[:h, h:, :h]), initial=0.0) > tol:
            raise SpecError("ad-invariance", "[h, m] has a component in h")
        return self

    @classmethod
    def from_lie_algebra(cls, structure, h_basis, m_basis, labels=None):
        """Change basis of a Lie algebra given by ``structure[a, b, c]`` in a
        Q-orthonormal basis.  ``h_basis`` and ``m_basis`` are rows of new
        Q-orthonormal vectors in old coordinates."""
        rows = np.vstack([np.atleast_2d(h_basis), np.atleast_2d(m_basis)])
        if not np.allclose(rows @ rows.T, np.eye(rows.shape[0]), atol=1e-12):
            raise SpecError("orthonormal", "new basis is not Q-orthonormal")
        coeffs = np.einsum("ai,bj,ijk,ck->abc", rows, rows, structure, rows)
        return cls(len(np.atleast_2d(h_basis)), len(np.atleast_2d(m_basis)), coeffs, labels)

    def to_dict(self):
        nz = np.argwhere(self.coeffs != 0.0)
        return {
            "n_h": self.n_h,
            "n_m": self.n_m,
            "labels": list(self.labels),
            "brackets": [{"abg": [int(a), int(b), int(g)], "v": float(self.coeffs[a, b, g])} for a, b, g in nz],
        }

    @classmethod
    def from_dict(cls, doc):
        n = doc["n_h"] + doc["n_m"]
        coeffs = np.zeros((n, n, n))
        for entry in doc["brackets"]:
            coeffs[tuple(entry["abg"])] = entry["v"]
        return cls(doc["n_h"], doc["n_m"], coeffs, doc.get("labels")).check()

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_json(cls, text):
        return cls.from_dict(json.loads(text))


def _check_metric(g):
    g = np.asarray(g, dtype=float)
    if not np.allclose(g, np.swapaxes(g, -1, -2), atol=1e-12 * (1 + np.abs(g).max())):
        raise DomainError("metric matrix is not symmetric")
    if not np.all(np.linalg.eigvalsh(g) > 0):
        raise DomainError("metric matrix is not positive-definite")
    return g


def ricci_full(bt, g, B_on_m=None):
    """Ricci tensor of an invariant metric on m, as a matrix in the
    Q-orthonormal basis of m.

    ``g`` is the Gram matrix of the metric (leading batch axes allowed).
    For a g-orthonormal frame (X_i) of m and unimodular G,

        Ric(X, Y) = -1/2 sum_i g([X,X_i]_m, [Y,X_i]_m) - 1/2 B(X, Y)
                    + 1/4 sum_{i,j} g([X_i,X_j]_m, X) g([X_i,X_j]_m, Y).

    Sums over frames are replaced by contractions with g^{-1}.
    """
    g = _check_metric(g)
    B = bt.killing_full if B_on_m is None else np.asarray(B_on_m, dtype=float)
    c = bt.m_coeffs
    ginv = np.linalg.inv(g)
    n = c.shape[0]
    gi = ginv[..., None, :, :]
    gg = g[..., None, :, :]
    # t1[p, q] = sum c[p,b,c] ginv[b,d] c[q,d,e] g[c,e]
    M = (gi @ c @ gg).reshape(g.shape[:-2] + (n, n * n))
    t1 = c.reshape(n, n * n) @ np.swapaxes(M, -1, -2)
    # t3[p, q] = sum D_p[a,b] ginv[a,d] ginv[b,e] D_q[d,e], D_p[a,b] = sum_c c[a,b,c] g[c,p]
    Dp = np.moveaxis(c @ gg, -1, -3)
    E = (gi @ Dp @ gi).reshape(g.shape[:-2] + (n, n * n))
    t3 = E @ np.swapaxes(Dp.reshape(g.shape[:-2] + (n, n * n)), -1, -2)
    ric = -0.5 * t1 - 0.5 * B + 0.25 * t3
    return 0.5 * (ric + np.swapaxes(ric, -1, -2))


def scalar_full(bt, g):
    """Scalar curvature tr_g Ric(g)."""
    g = _check_metric(g)
    return np.einsum("...pq,...pq->...", np.linalg.inv(g), ricci_full(bt, g))


def trace_full(g, T):
    """tr_g T for Gram matrices g and T."""
    g = _check_metric(g)
    return np.einsum("...pq,...pq->...", np.linalg.inv(g), np.asarray(T, dtype=float))


def block_diagonal_metric(dims, x):
    """Gram matrix of sum x_i Q|m_i for consecutive modules of sizes ``dims``."""
    return np.diag(np.repeat(np.asarray(x, dtype=float), dims))


def structure_constants_from_brackets(bt, modules, tensor=None, dim_h=None, torus_ok=False):
    """Structure constants [ijk] and Killing constants b_i of a decomposition.

    ``modules`` partitions the m-part of the basis (indices 0..n_m-1).
    [ijk] = sum Q([e_a, e_b], e_c)^2 over basis vectors of m_i, m_j, m_k.
    """
    modules = [list(mod) for mod in modules]
    flat = sorted(itertools.chain.from_iterable(modules))
    if flat != list(range(bt.n_m)) or any(len(mod) == 0 for mod in modules):
        raise SpecError("partition", "modules must partition the basis of m")
    c2 = bt.m_coeffs**2
    r = len(modules)
    P = np.zeros((bt.n_m, r))
    for i, mod in enumerate(modules):
        P[mod, i] = 1.0
    sc = np.einsum("abc,ai,bj,ck->ijk", c2, P, P, P, optimize=True)
    B = bt.killing_full
    killing = np.empty(r)
    for i, mod in enumerate(modules):
        block = -B[np.ix_(mod, mod)]
        b = np.trace(block) / len(mod)
        if not np.allclose(block, b * np.eye(len(mod)), atol=1e-9 * max(1.0, abs(b))):
            raise SpecError("killing-not-scalar", f"B is not a multiple of Q on module {i}")
        killing[i] = b
    return HomSpaceSpec(
        [len(mod) for mod in modules],
        killing,
        sc,
        tensor,
        bt.n_h if dim_h is None else dim_h,
        torus_ok,
    )
