"""Quantum channels in operator-sum (Kraus) form and their unitary dilations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import linalg
from .errors import DimensionError, InvalidChannelError, NotOrthonormalError
from .linalg import SubsystemLayout
from .states import DensityOperator, random_unitary

NORMALIZATION_TOL = 1e-8
UNITARITY_TOL = 1e-8
# Kraus-rank canonicalization drops Choi eigenvalues at or below this.
CHOI_CUTOFF = 1e-10

PAULI_I = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)


def _stack(operators) -> np.ndarray:
    ops = [linalg.as_matrix(a) for a in operators]
    if not ops:
        raise InvalidChannelError("a channel needs at least one Kraus operator")
    shape = ops[0].shape
    if shape[0] != shape[1]:
        raise DimensionError(f"Kraus operators must be square, got {shape}")
    for a in ops:
        if a.shape != shape:
            raise DimensionError(f"inconsistent Kraus operator shapes {shape} and {a.shape}")
    return np.stack(ops)


def validate(operators) -> float:
    """Normalization defect ``||sum_mu A_mu^H A_mu - 1||_F``.

    Accepts a :class:`KrausChannel` or any sequence of square matrices.
    """
    ops = operators.operators if isinstance(operators, KrausChannel) else _stack(operators)
    total = np.einsum("kji,kjl->il", ops.conj(), ops)
    return float(np.linalg.norm(total - np.eye(ops.shape[1])))


@dataclass(frozen=True, eq=False)
class KrausChannel:
    """Trace-preserving completely positive map ``rho -> sum A rho A^H``.

    ``operators`` is stored as an ``(m, d, d)`` array.  Construction rejects
    sets whose normalization defect exceeds ``NORMALIZATION_TOL``.
    """

    operators: np.ndarray

    def __post_init__(self):
        ops = _stack(self.operators)
        if not np.all(np.isfinite(ops)):
            raise InvalidChannelError("Kraus operators have non-finite entries")
        object.__setattr__(self, "operators", ops)
        defect = validate(ops)
        if defect > NORMALIZATION_TOL:
            raise InvalidChannelError(f"Kraus operators are not normalized (defect {defect:.3g})")

    @property
    def dim(self) -> int:
        return self.operators.shape[1]

    def __len__(self) -> int:
        return self.operators.shape[0]

    def __iter__(self):
        return iter(self.operators)

    def __call__(self, rho: DensityOperator) -> DensityOperator:
        return apply(self, rho)

    def pruned(self, tol: float = 1e-12) -> "KrausChannel":
        """Drop operators whose Frobenius norm is at or below ``tol``."""
        keep = [a for a in self.operators if np.linalg.norm(a) > tol]
        return KrausChannel(keep or self.operators[:1])


@dataclass(frozen=True, eq=False)
class UnitaryDilation:
    """Unitary on ``Q (x) E`` (system factor first); E starts in ``|env_init>``."""

    unitary: np.ndarray
    env_dim: int
    env_init: int = 0

    def __post_init__(self):
        u = linalg.as_matrix(self.unitary)
        object.__setattr__(self, "unitary", u)
        n = u.shape[0]
        if u.shape[1] != n or n % self.env_dim:
            raise DimensionError(f"unitary of shape {u.shape} does not fit env_dim {self.env_dim}")
        if not 0 <= self.env_init < self.env_dim:
            raise DimensionError(f"env_init {self.env_init} outside environment of dim {self.env_dim}")
        defect = float(np.linalg.norm(u.conj().T @ u - np.eye(n)))
        if defect > UNITARITY_TOL:
            raise InvalidChannelError(f"dilation is not unitary (defect {defect:.3g})")

    @property
    def sys_dim(self) -> int:
        return self.unitary.shape[0] // self.env_dim

    @property
    def layout(self) -> SubsystemLayout:
        return SubsystemLayout((("Q", self.sys_dim), ("E", self.env_dim)))


@dataclass(frozen=True, eq=False)
class ChoiMatrix:
    """``(I (x) channel)(|Omega><Omega|)`` with unnormalized ``|Omega> = sum_i |ii>``.

    The first factor is the untouched copy, the second is the channel output.
    """

    matrix: np.ndarray
    source_dim: int

    def is_completely_positive(self, tol: float = NORMALIZATION_TOL) -> bool:
        return bool(linalg.herm_eig(self.matrix).eigenvalues[-1] >= -tol)

    def trace_preservation_defect(self) -> float:
        d = self.source_dim
        layout = SubsystemLayout((("in", d), ("out", d)))
        reduced = linalg.partial_trace(self.matrix, layout, {"in"})
        return float(np.linalg.norm(reduced - np.eye(d)))

    def distance(self, other: "ChoiMatrix") -> float:
        return linalg.frobenius_distance(self.matrix, other.matrix)


def _check_dims(ch: KrausChannel, dim: int) -> None:
    if ch.dim != dim:
        raise DimensionError(f"channel acts on dimension {ch.dim}, state has dimension {dim}")


def apply(ch: KrausChannel, rho: DensityOperator) -> DensityOperator:
    _check_dims(ch, rho.dim)
    ops = ch.operators
    out = np.einsum("kij,jl,kml->im", ops, rho.matrix, ops.conj())
    return DensityOperator(0.5 * (out + out.conj().T), rho.layout)


def compose(second: KrausChannel, first: KrausChannel) -> KrausChannel:
    """Channel that applies ``first`` then ``second``."""
    if second.dim != first.dim:
        raise DimensionError(f"cannot compose channels of dims {second.dim} and {first.dim}")
    return KrausChannel([b @ a for b in second.operators for a in first.operators])


def extend(ch: KrausChannel, ref_dim: int) -> KrausChannel:
    """``1_R (x) A_mu`` for a reference factor of dimension ``ref_dim``."""
    if ref_dim < 1:
        raise DimensionError(f"reference dimension {ref_dim} < 1")
    eye = np.eye(ref_dim, dtype=complex)
    return KrausChannel([np.kron(eye, a) for a in ch.operators])


def dilation_isometry(ch: KrausChannel) -> np.ndarray:
    """The ``(d*m) x d`` isometry ``|q> -> sum_mu A_mu|q> (x) |mu>``."""
    m, d, _ = ch.operators.shape
    return ch.operators.transpose(1, 0, 2).reshape(d * m, d)


def to_dilation(ch: KrausChannel) -> UnitaryDilation:
    """Unitary ``U`` on ``Q (x) E`` with ``(<q'|<mu|) U (|q>|0>) = (A_mu)_{q'q}``.

    ``E`` has one basis state per Kraus operator; columns not fixed by the
    Kraus operators come from :func:`linalg.unitary_completion`.
    """
    defect = validate(ch)
    if defect > NORMALIZATION_TOL:
        raise InvalidChannelError(f"channel is not normalized (defect {defect:.3g})")
    m, d, _ = ch.operators.shape
    full = linalg.unitary_completion(dilation_isometry(ch))
    fixed = [q * m for q in range(d)]
    free = [i for i in range(d * m) if i % m]
    u = np.empty_like(full)
    u[:, fixed] = full[:, :d]
    u[:, free] = full[:, d:]
    return UnitaryDilation(u, env_dim=m, env_init=0)


def from_dilation(dil: UnitaryDilation) -> KrausChannel:
    """``A_mu = (1 (x) <mu|) U (1 (x) |env_init>)``, one per environment basis state."""
    d, m = dil.sys_dim, dil.env_dim
    u4 = dil.unitary.reshape(d, m, d, m)
    return KrausChannel([u4[:, mu, :, dil.env_init] for mu in range(m)])


def choi(ch: KrausChannel) -> ChoiMatrix:
    # (1 (x) A)|Omega> has entries [i, j] = A[j, i], i.e. vec of A^T
    vecs = ch.operators.transpose(0, 2, 1).reshape(len(ch), -1)
    return ChoiMatrix(np.einsum("ki,kj->ij", vecs, vecs.conj()), ch.dim)


def channels_equal(a: KrausChannel, b: KrausChannel, tol: float = NORMALIZATION_TOL) -> bool:
    """Channel equality means equal Choi matrices, never equal Kraus lists."""
    return a.dim == b.dim and choi(a).distance(choi(b)) <= tol


def canonical_kraus(ch: KrausChannel, cutoff: float = CHOI_CUTOFF) -> KrausChannel:
    """Minimal Kraus set from the eigendecomposition of the Choi matrix."""
    d = ch.dim
    vals, vecs = linalg.herm_eig(choi(ch).matrix)
    ops = [np.sqrt(v) * vecs[:, i].reshape(d, d).T for i, v in enumerate(vals) if v > cutoff]
    return KrausChannel(ops)


def remix(ch: KrausChannel, v, tol: float = 1e-9) -> KrausChannel:
    """``B_nu = sum_mu v[nu, mu] A_mu`` for an isometry ``v`` on Kraus indices."""
    v = linalg.as_matrix(v)
    if v.shape[1] != len(ch):
        raise DimensionError(f"isometry has {v.shape[1]} columns, channel has {len(ch)} operators")
    if linalg.orthonormality_defect(v) > tol:
        raise NotOrthonormalError("remixing matrix is not an isometry")
    return KrausChannel(np.einsum("nm,mij->nij", v, ch.operators))


# --- standard channels -------------------------------------------------------


def _check_prob(name: str, p: float) -> float:
    p = float(p)
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"{name} parameter {p} outside [0, 1]")
    return p


def identity(dim: int) -> KrausChannel:
    return KrausChannel([np.eye(dim, dtype=complex)])


def unitary(u) -> KrausChannel:
    u = linalg.as_matrix(u)
    if u.shape[0] != u.shape[1] or np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0])) > UNITARITY_TOL:
        raise InvalidChannelError("matrix is not unitary")
    return KrausChannel([u])


def dephasing(p: float) -> KrausChannel:
    p = _check_prob("dephasing", p)
    return KrausChannel([np.sqrt(1 - p) * PAULI_I, np.sqrt(p) * PAULI_Z])


def bit_flip(p: float) -> KrausChannel:
    p = _check_prob("bit-flip", p)
    return KrausChannel([np.sqrt(1 - p) * PAULI_I, np.sqrt(p) * PAULI_X])


def depolarizing(p: float) -> KrausChannel:
    """Qubit depolarizing channel; ``p = 1`` is the full Pauli twirl."""
    p = _check_prob("depolarizing", p)
    a = np.sqrt(p / 4)
    return KrausChannel([np.sqrt(1 - 3 * p / 4) * PAULI_I, a * PAULI_X, a * PAULI_Y, a * PAULI_Z])


def amplitude_damping(gamma: float) -> KrausChannel:
    g = _check_prob("amplitude-damping", gamma)
    return KrausChannel(
        [
            np.array([[1, 0], [0, np.sqrt(1 - g)]], dtype=complex),
            np.array([[0, np.sqrt(g)], [0, 0]], dtype=complex),
        ]
    )


def random_channel(dim: int, rank: int, seed=None) -> KrausChannel:
    """Random channel with ``rank`` Kraus operators, cut from a Haar isometry."""
    if rank < 1:
        raise ValueError(f"rank {rank} < 1")
    u = random_unitary(dim * rank, seed)
    iso = u[:, :dim]
    return KrausChannel(iso.reshape(dim, rank, dim).transpose(1, 0, 2))


def random_isometry(rows: int, cols: int, seed=None) -> np.ndarray:
    if cols > rows:
        raise DimensionError(f"isometry needs rows >= cols, got {rows}x{cols}")
    return random_unitary(rows, seed)[:, :cols]
