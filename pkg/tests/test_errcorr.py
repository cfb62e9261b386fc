import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cohinfo import channels as C
from cohinfo import errcorr as E
from cohinfo import infotheory as I
from cohinfo.channels import KrausChannel
from cohinfo.errors import DimensionError
from cohinfo.states import DensityOperator, PureState, random_density, random_unitary

from conftest import I2, X, Z, two_qubit_code

seeds = st.integers(0, 2**32 - 1)
HALF = DensityOperator.maximally_mixed(2)


def h(p):
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


class TestDeficit:
    @given(seed=seeds)
    def test_unitary_channels(self, seed):
        rng = np.random.default_rng(seed)
        rho = random_density(3, int(rng.integers(1, 4)), rng)
        assert E.correctability_deficit(rho, C.unitary(random_unitary(3, rng))) <= 1e-9

    @pytest.mark.parametrize("p", [0.1, 0.25, 0.6])
    def test_dephasing(self, p):
        assert E.correctability_deficit(HALF, C.dephasing(p)) == pytest.approx(h(p), abs=1e-12)

    def test_code(self, code_fixture):
        rho, ch = code_fixture
        # S(rho) = 1, S(rho') = 1 + h(0.3), S_e = h(0.3)
        assert rho.entropy() == pytest.approx(1, abs=1e-12)
        assert C.apply(ch, rho).entropy() == pytest.approx(1 + h(0.3), abs=1e-12)
        assert I.entropy_exchange(rho, ch) == pytest.approx(h(0.3), abs=1e-12)
        assert E.correctability_deficit(rho, ch) <= 1e-9

    def test_dims(self):
        with pytest.raises(DimensionError):
            E.correctability_deficit(HALF, C.identity(3))


class TestConstructCorrector:
    def test_identity(self):
        rho = random_density(3, 2, 4)
        res = E.construct_corrector(rho, C.identity(3))
        assert res.correctable and res.deficit <= 1e-9
        assert res.verified_fidelity == pytest.approx(1, abs=1e-9)
        for v in rho.support().T:
            out = C.apply(res.corrector, PureState(v).density())
            assert np.vdot(v, out.matrix @ v).real == pytest.approx(1, abs=1e-9)

    def test_code(self, code_fixture):
        rho, ch = code_fixture
        res = E.construct_corrector(rho, ch)
        assert res.correctable
        assert res.deficit <= 1e-9
        assert res.verified_fidelity >= 1 - 1e-9
        assert res.product_defect <= 1e-8
        assert C.validate(res.corrector) <= 1e-8
        assert C.choi(res.corrector).is_completely_positive()

    def test_refuses_dephasing(self):
        res = E.construct_corrector(HALF, C.dephasing(0.25))
        assert not res.correctable
        assert res.corrector is None and res.verified_fidelity is None
        assert res.deficit == pytest.approx(0.811278, abs=1e-6)

    def test_rejects_nonpositive_tol(self, code_fixture):
        with pytest.raises(ValueError):
            E.construct_corrector(*code_fixture, tol=0)

    def test_support_universality(self, code_fixture):
        rho, ch = code_fixture
        corrector = E.construct_corrector(rho, ch).corrector
        both = C.compose(corrector, ch)
        support = rho.support()
        rng = np.random.default_rng(17)
        for _ in range(50):
            c = rng.standard_normal(2) + 1j * rng.standard_normal(2)
            phi = PureState(support @ (c / np.linalg.norm(c)))
            assert I.pure_fidelity(phi, both) == pytest.approx(1, abs=1e-8)

    def test_overall_entropy_production_vanishes(self, code_fixture):
        rho, ch = code_fixture
        both = C.compose(E.construct_corrector(rho, ch).corrector, ch)
        assert I.entanglement_fidelity(rho, both) >= 1 - 1e-8
        assert I.entropy_exchange(rho, both) <= 1e-7

    @given(seed=seeds)
    def test_random_unitary_channels_are_undone(self, seed):
        rng = np.random.default_rng(seed)
        rho = random_density(3, int(rng.integers(1, 4)), rng)
        ch = C.unitary(random_unitary(3, rng))
        res = E.construct_corrector(rho, ch)
        assert res.correctable and res.verified_fidelity >= 1 - 1e-8

    @given(seed=seeds)
    def test_random_correctable_codes(self, seed):
        """Orthogonal error images: a random 2-dim code in C^6 with three
        unitary errors mapping it onto mutually orthogonal subspaces."""
        rng = np.random.default_rng(seed)
        frame = random_unitary(6, rng)
        code = frame[:, :2]
        rho = DensityOperator(code @ np.diag(rng.dirichlet([1, 1])) @ code.conj().T)
        probs = rng.dirichlet([1, 1, 1])
        ops = []
        for j in range(3):
            # unitary sending the code block onto block j of the frame
            perm = np.roll(np.arange(6), 2 * j)
            u = frame[:, perm] @ frame.conj().T
            ops.append(math.sqrt(probs[j]) * u)
        ch = KrausChannel(ops)
        res = E.construct_corrector(rho, ch)
        assert res.correctable
        assert res.verified_fidelity >= 1 - 1e-8
        assert res.product_defect <= 1e-7


class TestVerify:
    def test_identity(self):
        v = E.verify_correction(HALF, C.identity(2), C.identity(2))
        assert v.fidelity == pytest.approx(1) and v.restoration_distance == pytest.approx(0, abs=1e-15)

    def test_code(self, code_fixture):
        rho, ch = code_fixture
        v = E.verify_correction(rho, ch, E.construct_corrector(rho, ch).corrector)
        assert v.fidelity == pytest.approx(1, abs=1e-9)
        assert v.restoration_distance <= 1e-8

    @pytest.mark.parametrize("p", [0.1, 0.3])
    def test_wrong_channel(self, code_fixture, p):
        rho, ch = code_fixture
        corrector = E.construct_corrector(rho, ch).corrector
        wrong = KrausChannel([math.sqrt(1 - p) * np.eye(4), math.sqrt(p) * np.kron(Z, I2)])
        v = E.verify_correction(rho, wrong, corrector)
        assert v.fidelity == pytest.approx(1 - p, abs=1e-9)


class TestEnvironmentInfo:
    @given(seed=seeds)
    def test_unitary(self, seed):
        rng = np.random.default_rng(seed)
        rho = random_density(2, 2, rng)
        assert E.environment_info_check(rho, C.unitary(random_unitary(2, rng))) <= 1e-10

    def test_code(self, code_fixture):
        assert E.environment_info_check(*code_fixture) <= 1e-8

    @pytest.mark.parametrize("p", [0.1, 0.25, 0.5])
    def test_dephasing(self, p):
        # rho^RE' - rho^R (x) rho^E' = (1/2) sum_q s_q sqrt(p(1-p)) |q><q| (x) X
        defect = E.environment_info_check(HALF, C.dephasing(p))
        assert defect == pytest.approx(math.sqrt(p * (1 - p)), abs=1e-12)
        assert defect > 0.1

    @pytest.mark.parametrize(
        "rho,ch",
        [
            (HALF, C.dephasing(0.25)),
            (HALF, C.amplitude_damping(0.4)),
            (HALF, C.depolarizing(0.2)),
            two_qubit_code(),
            (HALF, C.identity(2)),
        ],
    )
    def test_tracks_deficit(self, rho, ch):
        deficit = E.correctability_deficit(rho, ch)
        defect = E.environment_info_check(rho, ch)
        if deficit <= 1e-9:
            assert defect <= 1e-7
        else:
            assert defect > 1e-7


class TestNecessity:
    @pytest.mark.parametrize("ch", [C.dephasing(0.25), C.amplitude_damping(0.3), C.depolarizing(0.1)])
    def test_random_recoveries_fail(self, ch):
        assert E.correctability_deficit(HALF, ch) > 1e-3
        rng = np.random.default_rng(2024)
        best = max(I.entanglement_fidelity(HALF, C.compose(E.random_recovery(2, rng), ch)) for _ in range(200))
        assert best < 1 - 1e-8

    def test_random_recovery_is_valid(self):
        rng = np.random.default_rng(0)
        for d in (1, 2, 3, 4):
            assert C.validate(E.random_recovery(d, rng)) <= 1e-10
