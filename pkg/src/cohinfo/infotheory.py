"""Entanglement fidelity, entropy exchange, coherent information and the
inequalities that tie them together.

Every quantity here depends only on an input state and a channel.  Where a
quantity has both an intrinsic formula and a formula through a reference
system or environment, both are evaluated and compared; disagreement raises
:class:`~cohinfo.errors.ConsistencyError`.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

from . import channels, linalg
from .channels import KrausChannel
from .errors import ConsistencyError, DimensionError
from .linalg import SubsystemLayout
from .states import DensityOperator, Ensemble, PureState, purify

FIDELITY_ROUTE_TOL = 1e-10
ENTROPY_ROUTE_TOL = 1e-8
INEQUALITY_SLACK = 1e-9


def _check(rho: DensityOperator, ch: KrausChannel) -> None:
    if rho.dim != ch.dim:
        raise DimensionError(f"channel acts on dimension {ch.dim}, state has dimension {rho.dim}")


def w_matrix(rho: DensityOperator, ch: KrausChannel) -> DensityOperator:
    """``W[mu, nu] = Tr A_mu rho A_nu^H``, a density operator on Kraus indices."""
    _check(rho, ch)
    ops = ch.operators
    a_rho = ops @ rho.matrix
    w = np.einsum("mij,nij->mn", a_rho, ops.conj())
    return DensityOperator(0.5 * (w + w.conj().T), SubsystemLayout.single(len(ch), "E"))


def _fidelity_trace_route(rho: DensityOperator, ch: KrausChannel) -> float:
    traces = np.einsum("ij,mji->m", rho.matrix, ch.operators)
    return float(np.sum(np.abs(traces) ** 2))


def _fidelity_purification_route(rho: DensityOperator, ch: KrausChannel) -> float:
    psi = purify(rho)
    big = channels.extend(ch, psi.layout.dim_of("R"))
    amps = np.einsum("i,mij,j->m", psi.vector.conj(), big.operators, psi.vector)
    return float(np.sum(np.abs(amps) ** 2))


def entanglement_fidelity(rho: DensityOperator, ch: KrausChannel) -> float:
    """How well the channel preserves a purification of ``rho``.

    Computed from ``sum_mu |Tr rho A_mu|^2`` and cross-checked against
    ``<Psi| (I (x) channel)(|Psi><Psi|) |Psi>`` on a purification.
    """
    _check(rho, ch)
    direct = _fidelity_trace_route(rho, ch)
    via_ref = _fidelity_purification_route(rho, ch)
    if abs(direct - via_ref) > FIDELITY_ROUTE_TOL:
        raise ConsistencyError(f"entanglement fidelity routes disagree: {direct!r} vs {via_ref!r}")
    return min(max(direct, 0.0), 1.0)


def pure_fidelity(psi: PureState, ch: KrausChannel) -> float:
    """Input-output fidelity ``<psi| channel(|psi><psi|) |psi>``."""
    if psi.dim != ch.dim:
        raise DimensionError(f"channel acts on dimension {ch.dim}, state has dimension {psi.dim}")
    amps = np.einsum("i,mij,j->m", psi.vector.conj(), ch.operators, psi.vector)
    return float(np.sum(np.abs(amps) ** 2))


def average_fidelity(ensemble: Ensemble, ch: KrausChannel) -> float:
    return float(sum(p * pure_fidelity(s, ch) for p, s in ensemble.members))


class EnvironmentStates(NamedTuple):
    rq: DensityOperator
    re: DensityOperator
    r: DensityOperator
    e: DensityOperator


def evolve_purification(rho: DensityOperator, ch: KrausChannel) -> PureState:
    """``(1_R (x) U)(|Psi^RQ> (x) |0^E>)`` on layout ``R, Q, E``.

    ``|Psi^RQ>`` is :func:`~cohinfo.states.purify` of ``rho`` and ``U`` is
    :func:`~cohinfo.channels.to_dilation` of ``ch``.
    """
    _check(rho, ch)
    psi = purify(rho)
    dil = channels.to_dilation(ch)
    r, d, m = psi.layout.dim_of("R"), ch.dim, dil.env_dim
    env0 = linalg.ket(dil.env_init, m)
    start = np.kron(psi.vector, env0)
    out = np.kron(np.eye(r), dil.unitary) @ start
    layout = SubsystemLayout((("R", r), ("Q", d), ("E", m)))
    return PureState(out / np.linalg.norm(out), layout)


def rq_and_re_states(rho: DensityOperator, ch: KrausChannel) -> EnvironmentStates:
    """Reduced states ``rho^RQ'``, ``rho^RE'``, ``rho^R`` and ``rho^E'`` after
    the channel acts on ``Q`` of a purification."""
    full = evolve_purification(rho, ch).density()
    rq = full.reduce({"R", "Q"})
    re = full.reduce({"R", "E"})
    r_from_rq = rq.reduce({"R"})
    r_from_re = re.reduce({"R"})
    if linalg.frobenius_distance(r_from_rq.matrix, r_from_re.matrix) > INEQUALITY_SLACK:
        raise ConsistencyError("reference marginals of RQ' and RE' disagree")
    return EnvironmentStates(rq, re, r_from_re, re.reduce({"E"}))


def entropy_exchange(rho: DensityOperator, ch: KrausChannel) -> float:
    """``S(W)`` in bits, cross-checked against ``S(rho^RQ')``."""
    s_w = w_matrix(rho, ch).entropy()
    psi = purify(rho)
    rq = channels.apply(channels.extend(ch, psi.layout.dim_of("R")), psi.density())
    s_rq = rq.entropy()
    if abs(s_w - s_rq) > ENTROPY_ROUTE_TOL:
        raise ConsistencyError(f"entropy exchange routes disagree: S(W)={s_w!r}, S(RQ')={s_rq!r}")
    return s_w


def coherent_information(rho: DensityOperator, ch: KrausChannel) -> float:
    """``S(channel(rho)) - S_e`` in bits; may be negative."""
    return channels.apply(ch, rho).entropy() - entropy_exchange(rho, ch)


def fano_bound(fidelity: float, dim: int) -> float:
    """``h(F) + (1 - F) log2(d^2 - 1)``; an upper bound on the entropy exchange.

    For ``d = 1`` the bound is 0 when ``F = 1`` and undefined (NaN) otherwise.
    """
    f = min(max(fidelity, 0.0), 1.0)
    if dim == 1:
        return 0.0 if f >= 1.0 - INEQUALITY_SLACK else math.nan
    return linalg.binary_entropy(f) + (1.0 - f) * math.log2(dim * dim - 1)


@dataclass(frozen=True)
class ChannelReport:
    input_entropy: float
    output_entropy: float
    entanglement_fidelity: float
    entropy_exchange: float
    coherent_information: float
    fano_lhs: float
    fano_margin: float

    def to_dict(self) -> dict:
        return asdict(self)


def report(rho: DensityOperator, ch: KrausChannel) -> ChannelReport:
    _check(rho, ch)
    s_in = rho.entropy()
    s_out = channels.apply(ch, rho).entropy()
    fe = entanglement_fidelity(rho, ch)
    se = entropy_exchange(rho, ch)
    lhs = fano_bound(fe, ch.dim)
    return ChannelReport(
        input_entropy=s_in,
        output_entropy=s_out,
        entanglement_fidelity=fe,
        entropy_exchange=se,
        coherent_information=s_out - se,
        fano_lhs=lhs,
        fano_margin=lhs - se,
    )


@dataclass(frozen=True)
class DpiReport:
    input_entropy: float
    ie_stage1: float
    ie_both: float
    se_stage1: float
    se_both: float

    @property
    def holds(self) -> bool:
        """``S(rho) >= I_e1 >= I_e12`` up to the additive slack."""
        return (
            self.input_entropy >= self.ie_stage1 - INEQUALITY_SLACK
            and self.ie_stage1 >= self.ie_both - INEQUALITY_SLACK
        )

    def to_dict(self) -> dict:
        return asdict(self)


def dpi_report(rho: DensityOperator, ch1: KrausChannel, ch2: KrausChannel) -> DpiReport:
    """Coherent information after the first stage and after both stages."""
    _check(rho, ch1)
    both = channels.compose(ch2, ch1)
    se1 = entropy_exchange(rho, ch1)
    se12 = entropy_exchange(rho, both)
    return DpiReport(
        input_entropy=rho.entropy(),
        ie_stage1=channels.apply(ch1, rho).entropy() - se1,
        ie_both=channels.apply(both, rho).entropy() - se12,
        se_stage1=se1,
        se_both=se12,
    )


def min_fidelity_search(
    rho: DensityOperator,
    ch: KrausChannel,
    restarts: int = 8,
    seed=None,
    max_iter: int = 2000,
) -> tuple[float, PureState]:
    """Smallest input-output fidelity found over pure states in the support of ``rho``.

    Multi-start projected gradient descent on the unit sphere of the support,
    with Armijo backtracking so every accepted step lowers the fidelity.  A run stops
    once an accepted step improves by less than 1e-12.  The result is an
    upper bound on the true minimum.
    """
    _check(rho, ch)
    if restarts < 1:
        raise ValueError("restarts must be >= 1")
    rng = np.random.default_rng(seed)
    basis = rho.support()
    r = basis.shape[1]
    # Kraus operators compressed to the support
    b = np.einsum("ia,mij,jb->mab", basis.conj(), ch.operators, basis)

    def value(c):
        z = np.einsum("a,mab,b->m", c.conj(), b, c)
        return float(np.sum(np.abs(z) ** 2)), z

    best_f, best_c = math.inf, None
    for _ in range(restarts):
        c = rng.standard_normal(r) + 1j * rng.standard_normal(r)
        c /= np.linalg.norm(c)
        f, z = value(c)
        for _ in range(max_iter):
            grad = np.einsum("m,mab,b->a", z.conj(), b, c) + np.einsum("m,mba,b->a", z, b.conj(), c)
            grad -= c * np.vdot(c, grad).real
            if np.linalg.norm(grad) < 1e-14:
                break
            slope = 2.0 * float(np.vdot(grad, grad).real)
            step, improved = 1.0, False
            while step > 1e-12:
                trial = c - step * grad
                trial /= np.linalg.norm(trial)
                f_new, z_new = value(trial)
                # Armijo sufficient decrease
                if f_new <= f - 1e-4 * step * slope:
                    improved = True
                    break
                step *= 0.5
            # keep shrinking while it still helps: crude line minimization
            while improved and step > 1e-12:
                shorter = c - 0.5 * step * grad
                shorter /= np.linalg.norm(shorter)
                f_short, z_short = value(shorter)
                if f_short >= f_new:
                    break
                step, trial, f_new, z_new = 0.5 * step, shorter, f_short, z_short
            if not improved:
                break
            gain = f - f_new
            c, f, z = trial, f_new, z_new
            if gain < 1e-12:
                break
        if f < best_f:
            best_f, best_c = f, c
    phi = PureState.canonical(basis @ best_c, rho.layout)
    return min(max(best_f, 0.0), 1.0), phi
