import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cohinfo.errors import DimensionError, InvalidStateError, NotOrthonormalError
from cohinfo.linalg import SubsystemLayout
from cohinfo.states import (
    DensityOperator,
    Ensemble,
    PureState,
    mix,
    purify,
    random_basis,
    random_density,
    random_pure,
    relative_state_ensemble,
    schmidt,
)

seeds = st.integers(0, 2**32 - 1)
KET0, KET1 = np.array([1, 0]), np.array([0, 1])
PLUS, MINUS = np.array([1, 1]) / math.sqrt(2), np.array([1, -1]) / math.sqrt(2)
BELL = np.array([1, 0, 0, 1]) / math.sqrt(2)
RQ = SubsystemLayout.of(R=2, Q=2)


def same_up_to_phase(a, b, atol=1e-9):
    return abs(abs(np.vdot(a, b)) - 1) < atol


class TestValidation:
    def test_density_checks(self):
        with pytest.raises(InvalidStateError):
            DensityOperator(np.diag([0.5, 0.6]))
        with pytest.raises(InvalidStateError):
            DensityOperator(np.diag([1.5, -0.5]))
        with pytest.raises(InvalidStateError):
            DensityOperator([[0.5, 0.5], [0, 0.5]])
        with pytest.raises(DimensionError):
            DensityOperator(np.eye(2) / 2, SubsystemLayout.single(3))

    def test_pure_norm(self):
        with pytest.raises(InvalidStateError):
            PureState([1, 1])

    def test_ensemble_checks(self):
        with pytest.raises(InvalidStateError):
            Ensemble(())
        with pytest.raises(InvalidStateError):
            Ensemble(((0.5, PureState(KET0)),))


class TestPurify:
    def test_pure_input(self):
        psi = random_pure(3, 11)
        out = purify(psi.density())
        assert out.layout.dims == (1, 3)
        assert same_up_to_phase(out.vector, psi.vector)

    def test_maximally_mixed(self):
        out = purify(DensityOperator.maximally_mixed(2))
        np.testing.assert_allclose(schmidt(out, {"R"}).coefficients, [1 / math.sqrt(2)] * 2, atol=1e-12)

    def test_diagonal(self):
        out = purify(DensityOperator(np.diag([0.75, 0.25])))
        # sqrt(0.75)|0>|e0> + sqrt(0.25)|1>|e1>
        np.testing.assert_allclose(out.vector, [math.sqrt(0.75), 0, 0, math.sqrt(0.25)], atol=1e-12)

    def test_label_clash(self):
        with pytest.raises(DimensionError):
            purify(DensityOperator(np.eye(2) / 2, SubsystemLayout.single(2, "R")))

    @given(seed=seeds, dim=st.integers(1, 8), data=st.data())
    def test_round_trip(self, seed, dim, data):
        rank = data.draw(st.integers(1, dim))
        rho = random_density(dim, rank, seed)
        psi = purify(rho)
        assert psi.layout.dim_of("R") == rank
        np.testing.assert_allclose(psi.reduce({"Q"}).matrix, rho.matrix, atol=1e-9)
        sd = schmidt(psi, {"R"})
        np.testing.assert_allclose(sd.weights, rho.spectrum.eigenvalues[:rank], atol=1e-9)


class TestSchmidt:
    def test_product(self):
        psi = PureState(np.kron(PLUS, KET1), RQ)
        assert schmidt(psi, {"R"}).coefficients == pytest.approx([1.0])

    def test_bell(self):
        assert schmidt(PureState(BELL, RQ), {"R"}).coefficients == pytest.approx([1 / math.sqrt(2)] * 2)

    def test_already_schmidt_form(self):
        v = math.sqrt(0.75) * np.kron(KET0, KET0) + math.sqrt(0.25) * np.kron(KET1, KET1)
        sd = schmidt(PureState(v, RQ), {"R"})
        assert sd.coefficients == pytest.approx([math.sqrt(0.75), math.sqrt(0.25)])

    def test_bad_cut(self):
        with pytest.raises(DimensionError):
            schmidt(PureState(BELL, RQ), {"R", "Q"})
        with pytest.raises(DimensionError):
            schmidt(PureState(BELL, RQ), set())

    @given(seed=seeds)
    def test_invariants_on_three_factors(self, seed):
        lay = SubsystemLayout.of(A=2, B=3, C=2)
        psi = random_pure(12, seed, lay)
        sd = schmidt(psi, {"A", "C"})
        assert sd.weights.sum() == pytest.approx(1, abs=1e-9)
        assert np.all(np.diff(sd.coefficients) <= 0)
        for basis in (sd.left_basis, sd.right_basis):
            np.testing.assert_allclose(basis.conj().T @ basis, np.eye(sd.rank), atol=1e-9)
        reordered = psi.vector.reshape(2, 3, 2).transpose(0, 2, 1).reshape(-1)
        np.testing.assert_allclose(sd.reconstruct(), reordered, atol=1e-8)


class TestMix:
    def test_single(self):
        psi = random_pure(3, 2)
        np.testing.assert_allclose(mix(Ensemble(((1.0, psi),))).matrix, psi.density().matrix)

    def test_uniform(self):
        e = Ensemble(((0.5, PureState(KET0)), (0.5, PureState(KET1))))
        np.testing.assert_allclose(mix(e).matrix, np.eye(2) / 2)

    def test_zero_and_plus(self):
        e = Ensemble(((0.5, PureState(KET0)), (0.5, PureState(PLUS))))
        np.testing.assert_allclose(mix(e).matrix, [[0.75, 0.25], [0.25, 0.25]], atol=1e-15)


class TestRelativeStates:
    def test_bell_standard_basis(self):
        e = relative_state_ensemble(PureState(BELL, RQ), np.eye(2))
        assert e.probabilities == pytest.approx([0.5, 0.5])
        assert same_up_to_phase(e.states[0].vector, KET0)
        assert same_up_to_phase(e.states[1].vector, KET1)

    def test_bell_hadamard_basis(self):
        e = relative_state_ensemble(PureState(BELL, RQ), np.column_stack([PLUS, MINUS]))
        assert e.probabilities == pytest.approx([0.5, 0.5])
        assert same_up_to_phase(e.states[0].vector, PLUS)
        assert same_up_to_phase(e.states[1].vector, MINUS)

    def test_product_state(self):
        b = random_pure(3, 8).vector
        psi = PureState(np.kron(random_pure(2, 9).vector, b), SubsystemLayout.of(R=2, Q=3))
        e = relative_state_ensemble(psi, random_basis(2, 1))
        for s in e.states:
            assert same_up_to_phase(s.vector, b)

    def test_non_orthonormal_basis(self):
        with pytest.raises(NotOrthonormalError):
            relative_state_ensemble(PureState(BELL, RQ), [[1, 1], [0, 1]])

    @given(seed=seeds, dim=st.integers(2, 5))
    def test_preserves_mixture(self, seed, dim):
        rng = np.random.default_rng(seed)
        rho = random_density(dim, int(rng.integers(1, dim + 1)), rng)
        psi = purify(rho)
        e = relative_state_ensemble(psi, random_basis(psi.layout.dim_of("R"), rng))
        np.testing.assert_allclose(mix(e).matrix, rho.matrix, atol=1e-9)


class TestRandomDensity:
    def test_rank_one_is_pure(self):
        assert random_density(4, 1, 3).entropy() == pytest.approx(0, abs=1e-9)

    def test_deterministic(self):
        np.testing.assert_array_equal(random_density(3, 2, 42).matrix, random_density(3, 2, 42).matrix)

    def test_unit_trace(self):
        traces = [np.trace(random_density(2, 2, s).matrix).real for s in range(10_000)]
        np.testing.assert_allclose(traces, 1.0, atol=1e-12)

    @given(seed=seeds, dim=st.integers(1, 6), data=st.data())
    def test_rank(self, seed, dim, data):
        rank = data.draw(st.integers(1, dim))
        rho = random_density(dim, rank, seed)
        assert int(np.sum(rho.spectrum.eigenvalues > 1e-9)) == rank

    def test_rank_out_of_range(self):
        with pytest.raises(ValueError):
            random_density(2, 3, 0)
