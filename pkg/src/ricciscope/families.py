"""Linear families of invariant metrics.

An invariant metric is written g(p) = sum_k p_k E_k for a fixed basis (E_k)
of the Ad_H-invariant symmetric bilinear forms on m.  The Ricci tensor of an
invariant metric is again invariant, so it has coordinates in the same basis;
the solver and the Hessian code only ever see these coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    BracketTable,
    HomSpaceSpec,
    block_diagonal_metric,
    ricci_diag,
    ricci_full,
    scalar_curvature_x,
)
from .errors import DomainError


@dataclass(frozen=True, eq=False)
class MetricFamily:
    basis: np.ndarray
    tensor: np.ndarray
    bt: BracketTable = None
    spec: HomSpaceSpec = None
    names: tuple = None

    def __post_init__(self):
        basis = np.asarray(self.basis, dtype=float)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "tensor", np.asarray(self.tensor, dtype=float))
        object.__setattr__(self, "_gram", np.einsum("kab,lab->kl", basis, basis))
        if self.names is None:
            object.__setattr__(self, "names", tuple(f"x{k}" for k in range(len(basis))))

    @classmethod
    def diagonal(cls, spec):
        """Diagonal metrics of a fixed decomposition, p = (x_0, ..., x_{r-1})."""
        basis = np.stack([block_diagonal_metric(spec.dims, np.eye(spec.r)[i]) for i in range(spec.r)])
        return cls(basis, spec.tensor, spec=spec)

    @classmethod
    def from_brackets(cls, bt, basis, tensor, names=None):
        return cls(basis, tensor, bt=bt, names=names)

    @property
    def dim(self):
        return len(self.basis)

    def with_tensor(self, tensor):
        return MetricFamily(self.basis, tensor, self.bt, self.spec, self.names)

    def matrix(self, p):
        return np.einsum("...k,kab->...ab", np.asarray(p, dtype=float), self.basis)

    def params(self, M):
        """Coordinates of an invariant bilinear form given as a matrix."""
        rhs = np.einsum("kab,...ab->...k", self.basis, np.asarray(M, dtype=float))
        return np.linalg.solve(self._gram, rhs[..., None])[..., 0]

    def projection_defect(self, M):
        """Sup-norm distance of ``M`` from the span of the basis."""
        return np.max(np.abs(M - self.matrix(self.params(M))))

    def is_pd(self, p):
        return bool(np.all(np.linalg.eigvalsh(self.matrix(p)) > 0))

    def ricci_matrix(self, p):
        if self.spec is not None:
            return self.matrix(ricci_diag(self.spec, p))
        return ricci_full(self.bt, self.matrix(p))

    def ricci(self, p):
        if self.spec is not None:
            return ricci_diag(self.spec, p)
        return self.params(self.ricci_matrix(p))

    def scalar(self, p):
        if self.spec is not None:
            return scalar_curvature_x(self.spec, p)
        G = self.matrix(p)
        return np.einsum("...pq,...pq->...", np.linalg.inv(G), ricci_full(self.bt, G))

    def trace(self, p):
        G = self.matrix(p)
        if not np.all(np.linalg.eigvalsh(G) > 0):
            raise DomainError("metric is not positive-definite")
        return np.einsum("...pq,...pq->...", np.linalg.inv(G), self.matrix(self.tensor))

    def normalize(self, p):
        """Rescale p onto the constraint set tr_g T = 1."""
        p = np.asarray(p, dtype=float)
        return p * np.asarray(self.trace(p))[..., None]

    def normalized_scalar(self, p):
        """S(g)/tr_g T; agrees with S on the constraint set and is invariant
        under scaling of g."""
        return self.scalar(p) / self.trace(p)

    def constraint_gradient(self, p):
        """Gradient of p -> tr_g T: d/dp_k tr(G^-1 T) = -tr(G^-1 E_k G^-1 T)."""
        G = self.matrix(p)
        ginv = np.linalg.inv(G)
        T = self.matrix(self.tensor)
        return -np.einsum("ab,kbc,cd,da->k", ginv, self.basis, ginv, T)


def diagonal_family_params(spec, y):
    """Family coordinates x = 1/y of a diagonal point given in y-coordinates."""
    return 1.0 / np.asarray(y, dtype=float)
