import math

import numpy as np
import pytest

from channels import DampingParams, ReversalParams, WeakMeasurementParams
from entanglement import PureState
from linalg import InvalidInputError, max_norm
from protection import (
    AsymmetricConfig,
    closed_form_rho_d,
    closed_form_rho_r,
    closed_form_rho_wr,
    find_esd_onset,
    optimal_reversal_scheme1,
    optimal_reversal_scheme2,
    run_scheme1,
    run_scheme1_general,
    run_scheme2,
    run_scheme2_general,
    scan_reversal_strength,
    success_probability_scheme1,
    success_probability_scheme2,
    unprotected,
)


def mes_scheme_two(D, p):
    x = 1.0 - p
    return (3.0 - 2.0 * D * x) / (3.0 + 4.0 * D * x + 2.0 * (D * x) ** 2)


def kraus_by_hand(g1, g2):
    e0 = np.diag([1.0, math.sqrt(1.0 - g1), math.sqrt(1.0 - g2)])
    e1 = np.zeros((3, 3))
    e1[0, 1] = math.sqrt(g1)
    e2 = np.zeros((3, 3))
    e2[0, 2] = math.sqrt(g2)
    return e0, e1, e2


def negativity_by_hand(rho):
    pt = np.empty_like(rho)
    for i, j, k, l in np.ndindex(3, 3, 3, 3):
        pt[3 * i + j, 3 * k + l] = rho[3 * i + l, 3 * k + j]
    values = np.linalg.eigvalsh(pt)
    return -values[values < -1e-10].sum()


class TestOptimalReversal:
    def test_scheme1(self):
        assert optimal_reversal_scheme1(DampingParams(0.2, 0.4)) == ReversalParams(0.2, 0.4)

    def test_scheme1_full_decay(self):
        with pytest.raises(InvalidInputError):
            optimal_reversal_scheme1(DampingParams.symmetric(1.0))

    def test_scheme2(self):
        rev = optimal_reversal_scheme2(DampingParams(0.5, 0.2), WeakMeasurementParams(0.4, 0.0))
        assert rev.pr == pytest.approx(0.7)
        assert rev.qr == pytest.approx(0.2)


class TestSchemeOne:
    def test_golden_damped_negativity(self, mes):
        result = run_scheme1(mes, DampingParams.symmetric(0.8))
        assert result.n_damped == pytest.approx(0.04, abs=1e-12)

    @pytest.mark.parametrize("D", [0.0, 0.2, 0.5, 0.8, 0.95, 0.99])
    def test_maximally_entangled_curves(self, mes, D):
        result = run_scheme1(mes, DampingParams.symmetric(D))
        assert result.n_initial == pytest.approx(1.0, abs=1e-12)
        assert result.n_damped == pytest.approx((1.0 - D) ** 2, abs=1e-12)
        assert result.n_protected == pytest.approx(mes_scheme_two(D, 0.0), abs=1e-12)
        assert result.n_protected >= result.n_damped - 1e-12

    def test_finite_as_decay_saturates(self, mes):
        result = run_scheme1(mes, DampingParams.symmetric(0.99))
        assert result.n_protected / result.n_damped > 10.0

    def test_identity_reversal_leaves_damped_state(self, phased_state):
        damp = DampingParams.symmetric(0.4)
        result = run_scheme1(phased_state, damp, ReversalParams(0.0, 0.0))
        assert result.success_probability == pytest.approx(1.0)
        assert result.state_protected.allclose(result.state_damped)

    def test_success_probability(self, mes):
        for D in (0.0, 0.3, 0.7):
            result = run_scheme1(mes, DampingParams.symmetric(D))
            assert result.success_probability == pytest.approx(success_probability_scheme1(mes, D), abs=1e-12)
        assert success_probability_scheme1(mes, 0.0) == 1.0
        assert success_probability_scheme1(mes, 0.999) < 0.01

    def test_success_probability_decreasing(self, mes, esd_state):
        grid = np.linspace(0.0, 0.99, 100)
        for state in (mes, esd_state):
            probabilities = [success_probability_scheme1(state, D) for D in grid]
            assert all(later < earlier for earlier, later in zip(probabilities, probabilities[1:]))

    @pytest.mark.parametrize("amplitudes", [(1.0, 0.0, 0.0), (0.0, 1.0, 0.0), (0.0, 0.0, 1.0)])
    @pytest.mark.parametrize("D", [0.0, 0.3, 0.8, 0.99])
    def test_product_states_stay_separable(self, amplitudes, D):
        state = PureState(*amplitudes)
        damp = DampingParams.symmetric(D)
        assert run_scheme1(state, damp).n_protected == 0.0
        for p in (0.0, 0.5, 0.99):
            result = run_scheme2(state, WeakMeasurementParams.symmetric(p), damp)
            assert result.n_damped == result.n_protected == 0.0

    def test_cannot_prevent_sudden_death(self, esd_state):
        result = run_scheme1(esd_state, DampingParams.symmetric(0.9))
        assert result.n_damped == 0.0
        assert result.n_protected == 0.0


class TestSchemeTwo:
    @pytest.mark.parametrize("p", [0.0, 0.3, 0.6, 0.9])
    @pytest.mark.parametrize("D", [0.2, 0.5, 0.8])
    def test_maximally_entangled(self, mes, D, p):
        result = run_scheme2(mes, WeakMeasurementParams.symmetric(p), DampingParams.symmetric(D))
        assert result.n_protected == pytest.approx(mes_scheme_two(D, p), abs=1e-12)
        assert result.n_damped == pytest.approx((1.0 - D) ** 2, abs=1e-12)
        expected = success_probability_scheme2(mes, D, p)
        assert result.success_probability == pytest.approx(expected, abs=1e-12)

    @pytest.mark.parametrize("D", [0.3, 0.5, 0.8])
    def test_protection_grows_with_measurement_strength(self, mes, D):
        damp = DampingParams.symmetric(D)
        strengths = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99]
        protected = [run_scheme2(mes, WeakMeasurementParams.symmetric(p), damp).n_protected for p in strengths]
        assert all(later >= earlier - 1e-12 for earlier, later in zip(protected, protected[1:]))

    def test_full_recovery(self, mes, esd_state):
        wm = WeakMeasurementParams.symmetric(0.999)
        for state in (mes, esd_state):
            result = run_scheme2(state, wm, DampingParams.symmetric(0.8))
            assert result.ratio >= 0.99
            assert result.success_probability < 1e-4

    def test_avoids_sudden_death(self, esd_state):
        wm = WeakMeasurementParams.symmetric(0.9)
        result = run_scheme2(esd_state, wm, DampingParams.symmetric(0.9))
        assert result.n_damped == 0.0
        assert result.n_protected > 0.0

    def test_reduces_to_scheme_one(self, phased_state):
        damp = DampingParams.symmetric(0.6)
        one = run_scheme1(phased_state, damp)
        two = run_scheme2(phased_state, WeakMeasurementParams(0.0, 0.0), damp)
        assert max_norm(one.state_protected.matrix - two.state_protected.matrix) <= 1e-12
        assert one.success_probability == pytest.approx(two.success_probability, abs=1e-12)


class TestGeneralSchemes:
    def test_symmetric_config_matches(self, phased_state):
        damp = DampingParams.symmetric(0.5)
        wm = WeakMeasurementParams.symmetric(0.4)
        one = run_scheme1_general(phased_state, AsymmetricConfig.symmetric(damp))
        assert one.n_protected == pytest.approx(run_scheme1(phased_state, damp).n_protected, abs=1e-12)
        two = run_scheme2_general(phased_state, AsymmetricConfig.symmetric(damp, wm))
        assert two.n_protected == pytest.approx(run_scheme2(phased_state, wm, damp).n_protected, abs=1e-12)

    def test_asymmetric_protection(self, mes):
        cfg = AsymmetricConfig(
            DampingParams(0.8, 0.4),
            DampingParams(0.5, 0.6),
            WeakMeasurementParams(0.7, 0.7),
            WeakMeasurementParams(0.7, 0.7),
        )
        result = run_scheme2_general(mes, cfg)
        assert result.n_protected > result.n_damped
        assert 0.0 < result.success_probability < 1.0

    def test_no_damping_keeps_everything(self, phased_state):
        result = run_scheme1_general(phased_state, AsymmetricConfig.symmetric(DampingParams.symmetric(0.0)))
        assert result.n_protected == pytest.approx(result.n_initial, abs=1e-12)
        assert result.success_probability == pytest.approx(1.0, abs=1e-12)

    def test_figure_4a_point(self, mes):
        # d1 = D, d2 = 0.7 D, D1 = 0.3 D, D2 = 0.6 D at D = 0.5
        cfg = AsymmetricConfig(DampingParams(0.5, 0.15), DampingParams(0.35, 0.3))
        result = run_scheme1_general(mes, cfg)

        rho = np.asarray(mes.density_matrix().matrix)
        damped = np.zeros((9, 9), dtype=complex)
        for ea in kraus_by_hand(0.5, 0.15):
            for eb in kraus_by_hand(0.35, 0.3):
                k = np.kron(ea, eb)
                damped += k @ rho @ k.conj().T
        assert result.n_damped == pytest.approx(negativity_by_hand(damped), abs=1e-12)

        # pr, qr = (0.5, 0.15) on A and (0.35, 0.3) on B
        rev_a = np.diag([math.sqrt(0.5 * 0.85), math.sqrt(0.85), math.sqrt(0.5)])
        rev_b = np.diag([math.sqrt(0.65 * 0.7), math.sqrt(0.7), math.sqrt(0.65)])
        rev = np.kron(rev_a, rev_b)
        reversed_ = rev @ damped @ rev.conj().T
        reversed_ /= np.trace(reversed_).real
        assert result.n_protected == pytest.approx(negativity_by_hand(reversed_), abs=1e-12)
        assert result.n_protected > result.n_damped

    def test_figure_4b_full_recovery(self, mes):
        wm = WeakMeasurementParams.symmetric(0.999)
        cfg = AsymmetricConfig(DampingParams(0.8, 0.4), DampingParams(0.5, 0.6), wm, wm)
        assert run_scheme2_general(mes, cfg).ratio >= 0.99

    def test_rejects_bad_config(self):
        with pytest.raises(InvalidInputError):
            AsymmetricConfig(0.5, DampingParams.symmetric(0.5))


class TestClosedForms:
    @pytest.mark.parametrize("D", [0.0, 0.3, 0.9])
    def test_damped(self, phased_state, D):
        result = unprotected(phased_state, DampingParams.symmetric(D))
        assert max_norm(result.state_damped.matrix - closed_form_rho_d(phased_state, D).matrix) <= 1e-12

    @pytest.mark.parametrize("D", [0.1, 0.5, 0.9])
    def test_scheme_one(self, phased_state, D):
        result = run_scheme1(phased_state, DampingParams.symmetric(D))
        assert max_norm(result.state_protected.matrix - closed_form_rho_r(phased_state, D, D).matrix) <= 1e-12

    @pytest.mark.parametrize("p", [0.1, 0.5, 0.9])
    def test_scheme_two(self, phased_state, p):
        D = 0.7
        result = run_scheme2(phased_state, WeakMeasurementParams.symmetric(p), DampingParams.symmetric(D))
        expected = closed_form_rho_wr(phased_state, p, D, p + D * (1.0 - p))
        assert max_norm(result.state_protected.matrix - expected.matrix) <= 1e-12

    def test_decay_symmetry(self, phased_state):
        # |01> and |10> carry the same population
        rho = closed_form_rho_wr(phased_state, 0.3, 0.6, 0.72).matrix
        assert rho[1, 1] == rho[3, 3]
        assert rho[2, 2] == rho[6, 6]
        assert rho[5, 5] == 0.0 and rho[7, 7] == 0.0


class TestUnprotected:
    def test_mirrors_damped(self, mes):
        result = unprotected(mes, DampingParams.symmetric(0.5))
        assert result.n_protected == result.n_damped
        assert result.success_probability == 1.0
        assert result.ratio == pytest.approx(0.25, abs=1e-12)

    def test_separable_ratio(self, product_state):
        assert unprotected(product_state, DampingParams.symmetric(0.5)).ratio is None


class TestEsdOnset:
    def test_onset(self, esd_state):
        assert find_esd_onset(esd_state) == pytest.approx(math.sqrt(3.0 / 5.0), abs=1e-6)

    def test_no_sudden_death(self, mes):
        with pytest.raises(InvalidInputError):
            find_esd_onset(mes)


class TestReversalScan:
    def test_scan_returns_grid_point(self, mes):
        grid = np.linspace(0.0, 0.9, 10)
        best_pr, best_n = scan_reversal_strength(mes, DampingParams.symmetric(0.5), grid=grid)
        assert best_pr in [float(v) for v in grid]
        baseline = run_scheme1(mes, DampingParams.symmetric(0.5), ReversalParams(0.0, 0.0)).n_protected
        assert best_n >= baseline
