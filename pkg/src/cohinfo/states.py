"""Density operators, pure states, purifications and ensembles."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import linalg
from .errors import DimensionError, InvalidStateError, NotOrthonormalError
from .linalg import EIG_CUTOFF, Spectrum, SubsystemLayout

STATE_TOL = 1e-9


def _layout_for(dim: int, layout: SubsystemLayout | None) -> SubsystemLayout:
    if layout is None:
        return SubsystemLayout.single(dim)
    if layout.total != dim:
        raise DimensionError(f"layout total {layout.total} does not match dimension {dim}")
    return layout


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian, positive semidefinite, unit-trace matrix on a layout.

    Construction validates all three properties to ``STATE_TOL``.
    """

    matrix: np.ndarray
    layout: SubsystemLayout = None

    def __post_init__(self):
        m = linalg.as_matrix(self.matrix)
        if m.shape[0] != m.shape[1]:
            raise InvalidStateError(f"density operator must be square, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise InvalidStateError("density operator has non-finite entries")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "layout", _layout_for(m.shape[0], self.layout))
        if linalg.hermiticity_defect(m) > STATE_TOL:
            raise InvalidStateError("density operator is not Hermitian")
        tr = np.trace(m).real
        if abs(tr - 1.0) > STATE_TOL:
            raise InvalidStateError(f"density operator has trace {tr:.12g}")
        lo = self.spectrum.eigenvalues[-1]
        if lo < -STATE_TOL:
            raise InvalidStateError(f"density operator has negative eigenvalue {lo:.3g}")

    @cached_property
    def spectrum(self) -> Spectrum:
        return linalg.herm_eig(self.matrix)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def rank(self) -> int:
        return int(np.sum(self.spectrum.eigenvalues > EIG_CUTOFF))

    def support(self) -> np.ndarray:
        """Orthonormal columns spanning the support, by descending eigenvalue."""
        return self.spectrum.eigenvectors[:, : self.rank]

    def entropy(self) -> float:
        return linalg.entropy_of_spectrum(self.spectrum.eigenvalues)

    def reduce(self, keep: Iterable[str]) -> "DensityOperator":
        keep = set(keep)
        return DensityOperator(
            linalg.partial_trace(self.matrix, self.layout, keep), self.layout.restrict(keep)
        )

    def __matmul__(self, other: "DensityOperator") -> "DensityOperator":
        """Tensor product ``self (x) other``."""
        return DensityOperator(np.kron(self.matrix, other.matrix), self.layout + other.layout)

    @classmethod
    def maximally_mixed(cls, dim: int, label: str = "Q") -> "DensityOperator":
        return cls(np.eye(dim, dtype=complex) / dim, SubsystemLayout.single(dim, label))


@dataclass(frozen=True, eq=False)
class PureState:
    vector: np.ndarray
    layout: SubsystemLayout = None

    def __post_init__(self):
        v = np.asarray(self.vector, dtype=complex).reshape(-1)
        if not np.all(np.isfinite(v)):
            raise InvalidStateError("state vector has non-finite entries")
        object.__setattr__(self, "vector", v)
        object.__setattr__(self, "layout", _layout_for(v.size, self.layout))
        norm = np.linalg.norm(v)
        if abs(norm - 1.0) > STATE_TOL:
            raise InvalidStateError(f"state vector has norm {norm:.12g}")

    @property
    def dim(self) -> int:
        return self.vector.size

    def density(self) -> DensityOperator:
        return DensityOperator(linalg.proj(self.vector), self.layout)

    def reduce(self, keep: Iterable[str]) -> DensityOperator:
        return self.density().reduce(keep)

    @classmethod
    def canonical(cls, vector, layout: SubsystemLayout | None = None) -> "PureState":
        """Build a state with the first non-negligible amplitude made real positive."""
        return cls(linalg.fix_phase(vector), layout)


@dataclass(frozen=True, eq=False)
class SchmidtDecomposition:
    """``|psi> = sum_k c_k |left_k> (x) |right_k>`` with ``c_k`` descending.

    Bases are stored as matrix columns.
    """

    coefficients: np.ndarray
    left_basis: np.ndarray
    right_basis: np.ndarray
    left_layout: SubsystemLayout
    right_layout: SubsystemLayout

    @property
    def rank(self) -> int:
        return self.coefficients.size

    @property
    def weights(self) -> np.ndarray:
        return self.coefficients**2

    def reconstruct(self) -> np.ndarray:
        """State vector in ``left (x) right`` factor order."""
        m = (self.left_basis * self.coefficients) @ self.right_basis.T
        return m.reshape(-1)


@dataclass(frozen=True, eq=False)
class Ensemble:
    members: tuple[tuple[float, PureState], ...]

    def __post_init__(self):
        members = tuple((float(p), s) for p, s in self.members)
        object.__setattr__(self, "members", members)
        if not members:
            raise InvalidStateError("ensemble is empty")
        probs = np.array([p for p, _ in members])
        if np.any(probs < 0):
            raise InvalidStateError("ensemble has negative probabilities")
        if abs(probs.sum() - 1.0) > STATE_TOL:
            raise InvalidStateError(f"ensemble probabilities sum to {probs.sum():.12g}")
        dims = {s.dim for _, s in members}
        if len(dims) != 1:
            raise DimensionError(f"ensemble members have differing dimensions {sorted(dims)}")

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([p for p, _ in self.members])

    @property
    def states(self) -> list[PureState]:
        return [s for _, s in self.members]

    def __len__(self):
        return len(self.members)


def purify(rho: DensityOperator, ref_label: str = "R") -> PureState:
    """Minimal purification on ``R (x) Q``.

    ``R`` has dimension ``rank(rho)``; its k-th basis vector is paired with
    the eigenvector of the k-th largest eigenvalue.
    """
    if ref_label in rho.layout.labels:
        raise DimensionError(f"reference label {ref_label!r} already used by the state layout")
    vals, vecs = rho.spectrum
    r = rho.rank
    amps = np.sqrt(np.clip(vals[:r], 0.0, None))
    # row k of the R-major coefficient matrix is sqrt(lambda_k) v_k
    psi = (vecs[:, :r] * amps).T.reshape(-1)
    psi = psi / np.linalg.norm(psi)
    return PureState.canonical(psi, SubsystemLayout(((ref_label, r),)) + rho.layout)


def _split(layout: SubsystemLayout, first: Iterable[str]) -> tuple[list[str], list[str]]:
    first = set(first)
    for label in first:
        layout.index(label)
    a = [label for label in layout.labels if label in first]
    b = [label for label in layout.labels if label not in first]
    if not a or not b:
        raise DimensionError(f"cut {sorted(first)} does not split {layout.labels} into two non-empty groups")
    return a, b


def schmidt(psi: PureState, first: Iterable[str]) -> SchmidtDecomposition:
    """Schmidt decomposition across the cut ``first | rest``.

    Each left vector is phase-fixed (first non-negligible entry real
    positive) and the right vector carries the compensating phase.
    """
    a, b = _split(psi.layout, first)
    la, lb = psi.layout.restrict(a), psi.layout.restrict(b)
    m = linalg.permute_factors(psi.vector, psi.layout, a + b).reshape(la.total, lb.total)
    u, s, vh = np.linalg.svd(m, full_matrices=False)
    keep = s**2 > EIG_CUTOFF
    s, u, v = s[keep], u[:, keep], vh[keep, :].T
    for k in range(s.size):
        fixed = linalg.fix_phase(u[:, k])
        nz = np.flatnonzero(np.abs(u[:, k]) > linalg.PHASE_TOL)[0]
        phase = fixed[nz] / u[nz, k]
        u[:, k] = fixed
        v[:, k] = v[:, k] / phase
    return SchmidtDecomposition(s, u, v, la, lb)


def mix(ensemble: Ensemble) -> DensityOperator:
    m = sum(p * linalg.proj(s.vector) for p, s in ensemble.members)
    return DensityOperator(m, ensemble.states[0].layout)


def relative_state_ensemble(psi: PureState, r_basis, ref_label: str = "R") -> Ensemble:
    """Ensemble of relative states left on the rest of the system after
    measuring the reference factor in the orthonormal basis ``r_basis``
    (given as columns).  Outcomes with probability below 1e-12 are dropped.
    """
    basis = linalg.as_matrix(r_basis)
    d_r = psi.layout.dim_of(ref_label)
    if basis.shape != (d_r, d_r):
        raise DimensionError(f"reference basis must be {d_r}x{d_r}, got {basis.shape}")
    if linalg.orthonormality_defect(basis) > STATE_TOL:
        raise NotOrthonormalError("reference basis is not orthonormal")
    rest = [label for label in psi.layout.labels if label != ref_label]
    if not rest:
        raise DimensionError("state has no factors besides the reference")
    t = linalg.permute_factors(psi.vector, psi.layout, [ref_label] + rest).reshape(d_r, -1)
    rest_layout = psi.layout.restrict(rest)
    members = []
    for i in range(d_r):
        amp = basis[:, i].conj() @ t
        p = float(np.vdot(amp, amp).real)
        if p < EIG_CUTOFF:
            continue
        members.append((p, PureState.canonical(amp / np.sqrt(p), rest_layout)))
    total = sum(p for p, _ in members)
    return Ensemble(tuple((p / total, s) for p, s in members))


def _rng(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_pure_vector(dim: int, seed=None) -> np.ndarray:
    """Unit vector with i.i.d. standard complex Gaussian entries, normalized."""
    rng = _rng(seed)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def random_pure(dim: int, seed=None, layout: SubsystemLayout | None = None) -> PureState:
    return PureState.canonical(random_pure_vector(dim, seed), layout)


def random_density(dim: int, rank: int, seed=None, layout: SubsystemLayout | None = None) -> DensityOperator:
    """Mixture of ``rank`` random pure states with uniform-simplex weights.

    Reproducible for a fixed integer seed.  Draws that come out with fewer
    than ``rank`` eigenvalues above 1e-9 are redrawn from the same stream.
    """
    if not 1 <= rank <= dim:
        raise ValueError(f"rank {rank} outside [1, {dim}]")
    rng = _rng(seed)
    while True:
        vecs = [random_pure_vector(dim, rng) for _ in range(rank)]
        weights = rng.dirichlet(np.ones(rank)) if rank > 1 else np.ones(1)
        m = sum(w * linalg.proj(v) for w, v in zip(weights, vecs))
        m = 0.5 * (m + m.conj().T)
        rho = DensityOperator(m / np.trace(m).real, layout)
        if int(np.sum(rho.spectrum.eigenvalues > 1e-9)) == rank:
            return rho


def random_unitary(dim: int, seed=None) -> np.ndarray:
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    rng = _rng(seed)
    z = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_basis(dim: int, seed=None) -> np.ndarray:
    return random_unitary(dim, seed)


def code_state(vectors: Sequence) -> DensityOperator:
    """Uniform mixture of orthonormal code vectors (columns or a list)."""
    if isinstance(vectors, np.ndarray) and vectors.ndim == 2:
        cols = linalg.as_matrix(vectors)
    else:
        cols = np.column_stack([np.asarray(v, dtype=complex).reshape(-1) for v in vectors])
    if linalg.orthonormality_defect(cols) > STATE_TOL:
        raise NotOrthonormalError("code vectors are not orthonormal")
    return DensityOperator(cols @ cols.conj().T / cols.shape[1])
