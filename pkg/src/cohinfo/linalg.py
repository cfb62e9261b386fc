"""Dense complex linear algebra on labeled tensor-product spaces.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  A
:class:`SubsystemLayout` names the tensor factors of a space so partial
traces can be taken by label instead of by axis index.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, NotHermitianError, NotOrthonormalError

# Eigenvalues at or below this are treated as exact zeros in entropies and ranks.
EIG_CUTOFF = 1e-12
HERMITIAN_TOL = 1e-9
# Gram-Schmidt candidates whose residual norm falls below this are skipped.
PIVOT_TOL = 1e-8
# A vector component smaller than this is "zero" for phase conventions.
PHASE_TOL = 1e-10


@dataclass(frozen=True)
class SubsystemLayout:
    """Ordered, labeled tensor factors ``(label, dim)``."""

    factors: tuple[tuple[str, int], ...]

    def __post_init__(self):
        factors = tuple((str(label), int(dim)) for label, dim in self.factors)
        object.__setattr__(self, "factors", factors)
        if not factors:
            raise DimensionError("layout needs at least one factor")
        labels = [label for label, _ in factors]
        if len(set(labels)) != len(labels):
            raise DimensionError(f"duplicate labels in layout: {labels}")
        for label, dim in factors:
            if dim < 1:
                raise DimensionError(f"factor {label!r} has dimension {dim} < 1")

    @classmethod
    def single(cls, dim: int, label: str = "Q") -> "SubsystemLayout":
        return cls(((label, dim),))

    @classmethod
    def of(cls, **dims: int) -> "SubsystemLayout":
        """``SubsystemLayout.of(R=2, Q=4)``; keyword order is factor order."""
        return cls(tuple(dims.items()))

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.factors)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(dim for _, dim in self.factors)

    @property
    def total(self) -> int:
        return int(np.prod(self.dims))

    def dim_of(self, label: str) -> int:
        return self.dims[self.index(label)]

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise DimensionError(f"unknown label {label!r}; layout has {self.labels}") from None

    def restrict(self, keep: Iterable[str]) -> "SubsystemLayout":
        """Sub-layout over ``keep``, in this layout's order."""
        keep = set(keep)
        for label in keep:
            self.index(label)
        return SubsystemLayout(tuple(f for f in self.factors if f[0] in keep))

    def __add__(self, other: "SubsystemLayout") -> "SubsystemLayout":
        return SubsystemLayout(self.factors + other.factors)


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues in descending order with matching eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __iter__(self):
        yield self.eigenvalues
        yield self.eigenvectors


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-d matrix, got shape {a.shape}")
    return a


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(mats: Sequence) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for m in mats:
        out = np.kron(out, as_matrix(m))
    return out


def _check_square(m: np.ndarray) -> int:
    if m.shape[0] != m.shape[1]:
        raise DimensionError(f"matrix is not square: {m.shape}")
    return m.shape[0]


def partial_trace(m, layout: SubsystemLayout, keep: Iterable[str]) -> np.ndarray:
    """Trace out every factor of ``layout`` not listed in ``keep``.

    The result acts on the kept factors in layout order, regardless of the
    order in which ``keep`` lists them.
    """
    m = as_matrix(m)
    n = _check_square(m)
    if n != layout.total:
        raise DimensionError(f"matrix dim {n} does not match layout total {layout.total}")
    keep = set(keep)
    if not keep:
        raise DimensionError("keep set is empty")
    kept_idx = [layout.index(label) for label in layout.labels if label in keep]
    for label in keep:
        layout.index(label)
    traced_idx = [i for i in range(len(layout.dims)) if i not in kept_idx]

    dims = layout.dims
    k = len(dims)
    t = m.reshape(dims + dims)
    perm = kept_idx + traced_idx
    t = t.transpose(perm + [k + i for i in perm])
    dk = int(np.prod([dims[i] for i in kept_idx]))
    dt = int(np.prod([dims[i] for i in traced_idx])) if traced_idx else 1
    t = t.reshape(dk, dt, dk, dt)
    return np.einsum("ajbj->ab", t)


def permute_factors(vec, layout: SubsystemLayout, order: Sequence[str]) -> np.ndarray:
    """Reorder the tensor factors of a state vector to ``order``."""
    vec = np.asarray(vec, dtype=complex).reshape(layout.dims)
    axes = [layout.index(label) for label in order]
    if sorted(axes) != list(range(len(layout.dims))):
        raise DimensionError(f"order {list(order)} is not a permutation of {layout.labels}")
    return vec.transpose(axes).reshape(-1)


def hermiticity_defect(m) -> float:
    m = as_matrix(m)
    return float(np.max(np.abs(m - m.conj().T))) if m.size else 0.0


def fix_phase(v: np.ndarray, tol: float = PHASE_TOL) -> np.ndarray:
    """Rotate ``v`` so its first component above ``tol`` is real and positive."""
    v = np.asarray(v, dtype=complex)
    nz = np.flatnonzero(np.abs(v) > tol)
    if nz.size == 0:
        return v.copy()
    c = v[nz[0]]
    return v * (abs(c) / c)


def herm_eig(m, tol: float = HERMITIAN_TOL) -> Spectrum:
    """Spectral decomposition of a Hermitian matrix, eigenvalues descending.

    The input is symmetrized as ``(M + M^H)/2`` first.  Each eigenvector is
    phase-fixed so its first non-negligible component is real positive.
    """
    m = as_matrix(m)
    _check_square(m)
    scale = max(1.0, float(np.linalg.norm(m)))
    defect = hermiticity_defect(m)
    if defect > tol * scale:
        raise NotHermitianError(f"matrix is not Hermitian (max |M - M^H| = {defect:.3g})")
    h = 0.5 * (m + m.conj().T)
    vals, vecs = np.linalg.eigh(h)
    vals = vals[::-1].copy()
    vecs = vecs[:, ::-1]
    vecs = np.column_stack([fix_phase(vecs[:, i]) for i in range(vecs.shape[1])]) if vecs.size else vecs
    return Spectrum(vals, vecs)


def entropy_of_spectrum(eigenvalues, cutoff: float = EIG_CUTOFF) -> float:
    """Shannon entropy in bits of a probability vector, ignoring entries <= cutoff."""
    p = np.asarray(eigenvalues, dtype=float)
    p = p[p > cutoff]
    s = float(-np.sum(p * np.log2(p)))
    if s < -1e-9:
        raise ValueError(f"negative entropy {s}; spectrum is not a probability vector")
    return max(s, 0.0)


def matrix_entropy(m) -> float:
    """Von Neumann entropy in bits of a Hermitian matrix (no validity check)."""
    return entropy_of_spectrum(herm_eig(m).eigenvalues)


def von_neumann_entropy(rho) -> float:
    """``S(rho) = -Tr rho log2 rho`` in bits.

    Accepts a :class:`~cohinfo.states.DensityOperator` or a raw matrix; raw
    matrices are validated as density operators first.
    """
    from .states import DensityOperator

    if not isinstance(rho, DensityOperator):
        rho = DensityOperator(rho)
    return entropy_of_spectrum(rho.spectrum.eigenvalues)


def binary_entropy(p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability {p} outside [0, 1]")
    return entropy_of_spectrum([p, 1.0 - p], cutoff=0.0)


def orthonormality_defect(columns) -> float:
    c = as_matrix(columns)
    g = c.conj().T @ c
    return float(np.max(np.abs(g - np.eye(g.shape[0])))) if g.size else 0.0


def unitary_completion(columns, tol: float = 1e-9) -> np.ndarray:
    """Extend orthonormal columns to a square unitary.

    The input occupies the leading columns.  The rest come from Gram-Schmidt
    against the standard basis vectors in index order.
    """
    c = as_matrix(columns)
    d, k = c.shape
    if k > d:
        raise DimensionError(f"{k} columns cannot be orthonormal in dimension {d}")
    defect = orthonormality_defect(c)
    if defect > tol:
        raise NotOrthonormalError(f"columns are not orthonormal (defect {defect:.3g})")
    basis = [c[:, j] for j in range(k)]
    for i in range(d):
        if len(basis) == d:
            break
        v = np.zeros(d, dtype=complex)
        v[i] = 1.0
        # two passes keep the residual orthogonal to working precision
        for _ in range(2):
            for b in basis:
                v = v - b * np.vdot(b, v)
        norm = np.linalg.norm(v)
        if norm > PIVOT_TOL:
            basis.append(v / norm)
    return np.column_stack(basis)


def frobenius_distance(a, b) -> float:
    a, b = as_matrix(a), as_matrix(b)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b))


def ket(index: int, dim: int) -> np.ndarray:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


def proj(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    return np.outer(v, v.conj())
