"""Perfect quantum error correction: decide it, build the recovery, check it.

A channel can be undone perfectly on the support of ``rho`` exactly when its
coherent information equals ``S(rho)``.  :func:`construct_corrector` builds
the recovery operators from the relative states of the system after the
reference and environment are projected onto their Schmidt/eigen bases.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import channels, infotheory, linalg
from .channels import KrausChannel
from .errors import ConsistencyError, CorrectionError
from .states import DensityOperator, purify, random_unitary, schmidt

DEFAULT_TOL = 1e-7
# Eigenvalues (lambda_k, mu_l) at or below this carry no amplitude.
AMPLITUDE_CUTOFF = 1e-10


def correctability_deficit(rho: DensityOperator, ch1: KrausChannel) -> float:
    """``S(rho) - I_e`` in bits, clamped at zero."""
    deficit = rho.entropy() - infotheory.coherent_information(rho, ch1)
    if deficit < -infotheory.INEQUALITY_SLACK:
        raise ConsistencyError(f"coherent information exceeds input entropy by {-deficit:.3g}")
    return max(deficit, 0.0)


def environment_info_check(rho: DensityOperator, ch1: KrausChannel) -> float:
    """``||rho^RE' - rho^R (x) rho^E'||_F``; zero when the environment learns nothing."""
    st = infotheory.rq_and_re_states(rho, ch1)
    return linalg.frobenius_distance(st.re.matrix, np.kron(st.r.matrix, st.e.matrix))


@dataclass(frozen=True, eq=False)
class CorrectionResult:
    deficit: float
    correctable: bool
    corrector: KrausChannel | None
    verified_fidelity: float | None
    product_defect: float

    def to_dict(self) -> dict:
        from .specs import matrix_to_json

        return {
            "deficit": self.deficit,
            "correctable": self.correctable,
            "verified_fidelity": self.verified_fidelity,
            "product_defect": self.product_defect,
            "corrector": None
            if self.corrector is None
            else [matrix_to_json(a) for a in self.corrector.operators],
        }


def _relative_states(rho: DensityOperator, ch1: KrausChannel):
    """Schmidt data of the purification and the ``phi_kl`` relative states."""
    psi = purify(rho)
    sd = schmidt(psi, {"R"})
    lam = sd.weights
    alpha, beta = sd.left_basis, sd.right_basis

    out = infotheory.evolve_purification(rho, ch1)
    r, d, m = out.layout.dims
    t = out.vector.reshape(r, d, m)
    env = out.reduce({"E"})
    mu, gamma = env.spectrum
    keep_l = mu > AMPLITUDE_CUTOFF
    mu, gamma = mu[keep_l], gamma[:, keep_l]
    keep_k = lam > AMPLITUDE_CUTOFF
    lam, alpha, beta = lam[keep_k], alpha[:, keep_k], beta[:, keep_k]

    # phi[k, l] = (<alpha_k| (x) 1 (x) <gamma_l|) Psi' / sqrt(lambda_k mu_l)
    phi = np.einsum("ak,aqe,el->klq", alpha.conj(), t, gamma.conj())
    phi = phi / np.sqrt(np.outer(lam, mu))[:, :, None]
    return beta, phi


def construct_corrector(rho: DensityOperator, ch1: KrausChannel, tol: float = DEFAULT_TOL) -> CorrectionResult:
    """Recovery channel undoing ``ch1`` on the support of ``rho``, if one exists.

    The operators are ``Pi`` (projector onto the complement of all relative
    states ``phi_kl``) and ``A_l = sum_k |beta_k><phi_kl|``.  When the
    deficit exceeds ``tol`` no corrector is built.  Raises
    :class:`CorrectionError` if the deficit passes but the ``phi_kl`` are not
    orthonormal to within ``10 * tol``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    deficit = correctability_deficit(rho, ch1)
    product_defect = environment_info_check(rho, ch1)
    if deficit > tol:
        return CorrectionResult(deficit, False, None, None, product_defect)

    beta, phi = _relative_states(rho, ch1)
    n_k, n_l, d = phi.shape
    flat = phi.reshape(n_k * n_l, d).T
    gram_defect = linalg.orthonormality_defect(flat)
    if gram_defect > 10 * tol:
        raise CorrectionError(
            f"relative states are not orthonormal (defect {gram_defect:.3g}) although deficit {deficit:.3g} <= tol"
        )
    projector = np.eye(d) - flat @ flat.conj().T
    ops = [projector]
    for l in range(n_l):
        ops.append(np.einsum("qk,kp->qp", beta, phi[:, l, :].conj()))
    corrector = KrausChannel(ops).pruned()
    fidelity = infotheory.entanglement_fidelity(rho, channels.compose(corrector, ch1))
    return CorrectionResult(deficit, True, corrector, fidelity, product_defect)


class Verification(NamedTuple):
    fidelity: float
    restoration_distance: float


def verify_correction(rho: DensityOperator, ch1: KrausChannel, ch2: KrausChannel) -> Verification:
    """Entanglement fidelity of ``ch2 . ch1`` and ``||ch2(ch1(rho)) - rho||_F``."""
    both = channels.compose(ch2, ch1)
    fe = infotheory.entanglement_fidelity(rho, both)
    dist = linalg.frobenius_distance(channels.apply(both, rho).matrix, rho.matrix)
    return Verification(fe, dist)


def random_recovery(dim: int, seed=None) -> KrausChannel:
    """Random projective measurement followed by an outcome-dependent unitary.

    The measurement basis is Haar-random and split into a random number of
    contiguous blocks; each block gets its own Haar-random unitary.
    """
    rng = np.random.default_rng(seed)
    basis = random_unitary(dim, rng)
    n_blocks = int(rng.integers(1, dim + 1))
    cuts = np.sort(rng.choice(np.arange(1, dim), size=n_blocks - 1, replace=False)) if n_blocks > 1 else []
    ops = []
    for block in np.split(np.arange(dim), cuts):
        cols = basis[:, block]
        ops.append(random_unitary(dim, rng) @ cols @ cols.conj().T)
    return KrausChannel(ops)
