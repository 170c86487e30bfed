"""
Tests for the POVM and channel incentive programs and their certificates.
"""

import math

import numpy as np
import pytest

from qequil.exceptions import CapacityError, NotEquilibriumError, ShapeMismatchError, ValidationError
from qequil.models.game import JointDistribution
from qequil.models.incentive import IncentiveMode
from qequil.models.quantum import PureState
from qequil.services import constructions, deviation, quantum_state

ADDITIVE_OPTIMUM = (math.sqrt(2.0) - 1.0) / 2.0


class TestClosedForms:
    """Exact 2x2 optima and their dual points."""

    def test_additive_dual_point(self):
        best = deviation.closed_form_2x2("add")
        certificate = deviation.dual_check(np.eye(2), best.correlation, best.dual, "add")
        assert certificate.feasible
        assert certificate.bound_value == pytest.approx(ADDITIVE_OPTIMUM, abs=1e-12)

    def test_additive_povm_attains_bound(self):
        best = deviation.closed_form_2x2(IncentiveMode.ADDITIVE)
        value = deviation.povm_objective(np.eye(2), best.correlation, best.povm)
        assert value == pytest.approx(ADDITIVE_OPTIMUM, abs=1e-12)

    def test_multiplicative_closed_form(self):
        best = deviation.closed_form_2x2("mul")
        certificate = deviation.dual_check(np.eye(2), best.correlation, best.dual, "mul")
        assert certificate.feasible
        assert certificate.bound_value == pytest.approx(4.0 / 3.0, abs=1e-12)
        assert deviation.povm_objective(np.eye(2), best.correlation, best.povm, "mul") == pytest.approx(4.0 / 3.0)

    def test_non_concavity_witness(self):
        witness = deviation.non_concavity_witness()
        assert witness.averaged_objective < -0.08
        assert witness.averaged_certificate.feasible
        assert witness.averaged_certificate.bound_value == pytest.approx(0.0, abs=1e-12)

    def test_infeasible_dual_point(self):
        best = deviation.closed_form_2x2("add")
        certificate = deviation.dual_check(np.eye(2), best.correlation, np.zeros((2, 2)), "add")
        assert not certificate.feasible


class TestPovmIncentive:
    """Semidefinite program on the superposition of a CE."""

    def test_additive_optimum(self):
        best = deviation.closed_form_2x2("add")
        result = deviation.max_povm_incentive(np.eye(2), best.correlation, "add")
        assert result.primal_value == pytest.approx(ADDITIVE_OPTIMUM, abs=1e-6)
        assert result.dual_bound == pytest.approx(ADDITIVE_OPTIMUM, abs=1e-6)
        assert result.certificate.feasible
        assert result.gap >= -1e-8
        assert len(result.primal_solution) == 2

    def test_multiplicative_optimum(self):
        best = deviation.closed_form_2x2("mul")
        result = deviation.max_povm_incentive(np.eye(2), JointDistribution(best.correlation), "mul")
        assert result.primal_value == pytest.approx(4.0 / 3.0, abs=1e-6)
        assert result.baseline == pytest.approx(0.6)

    def test_requires_correlated_equilibrium(self):
        anti = np.array([[0.0, 0.5], [0.5, 0.0]])
        with pytest.raises(NotEquilibriumError) as excinfo:
            deviation.max_povm_incentive(np.eye(2), anti)
        assert excinfo.value.player == 0
        assert excinfo.value.violation == pytest.approx(0.5)

    def test_multiplicative_needs_positive_baseline(self):
        with pytest.raises(ValidationError, match="positive baseline"):
            deviation.max_povm_incentive(np.zeros((2, 2)), np.eye(2) / 2, "mul")

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            deviation.max_povm_incentive(np.eye(2), np.full((3, 3), 1.0 / 9.0))

    def test_normalization_required_when_asked(self):
        with pytest.raises(ValidationError, match="Normalized"):
            deviation.max_povm_incentive(2.0 * np.eye(2), np.eye(2) / 2, require_normalized=True)

    def test_unsupported_solver(self):
        with pytest.raises(ValidationError, match="Unsupported solver"):
            deviation.max_povm_incentive(np.eye(2), np.eye(2) / 2, solver="GLPK")

    def test_measurement_channel_reproduces_objective(self):
        best = deviation.closed_form_2x2("add")
        game = constructions.identity_game(2)
        state = quantum_state.superposition_state(JointDistribution(best.correlation))
        channel = deviation.measurement_channel(best.povm)
        gain = quantum_state.quantum_gain(game, state, channel)
        assert gain == pytest.approx(ADDITIVE_OPTIMUM, abs=1e-10)


class TestChannelIncentive:
    """Choi-matrix program and the quantum equilibrium checks built on it."""

    def test_mixture_of_ce_is_qce(self, battle_of_sexes):
        state = quantum_state.mixture_state(battle_of_sexes.correlated)
        verdict = deviation.is_qce(battle_of_sexes.game, state, tol=1e-5)
        assert verdict
        assert verdict.max_incentive <= 1e-5

    def test_superposition_of_ce_can_be_exploited(self):
        best = deviation.closed_form_2x2("add")
        game = constructions.identity_game(2)
        state = quantum_state.superposition_state(JointDistribution(best.correlation))
        verdict = deviation.is_qce(game, state)
        assert not verdict
        assert verdict.results[0].primal_value == pytest.approx(ADDITIVE_OPTIMUM, abs=1e-5)
        assert verdict.results[1].dual_bound <= 1e-5

    def test_fourier_incentive_hits_cap(self):
        instance = constructions.fourier_counterexample(2)
        result = deviation.max_channel_incentive(instance.game, instance.state, 0)
        assert result.primal_value == pytest.approx(0.5, abs=1e-6)
        assert result.primal_value == pytest.approx(deviation.general_mapping_bound(instance.game, 0)[0], abs=1e-6)

    def test_real_mixture_channel_program(self, traffic_light):
        collision = JointDistribution(np.array([[1.0, 0.0], [0.0, 0.0]]))
        state = quantum_state.mixture_state(collision)
        result = deviation.max_channel_incentive(traffic_light.game, state, 0)
        assert result.baseline == pytest.approx(-100.0)
        assert result.primal_value == pytest.approx(100.0, abs=1e-4)

    def test_large_choi_program_runs_on_scs(self, mocker):
        instance = constructions.fourier_counterexample(8)
        solve = mocker.spy(deviation, "_solve")
        result = deviation.max_channel_incentive(instance.game, instance.state, 0)
        assert result.new_payoff == pytest.approx(1.0, abs=1e-5)
        assert result.primal_value == pytest.approx(0.875, abs=1e-5)
        assert {call.args[1] for call in solve.call_args_list} == {"SCS"}

    def test_large_choi_program_still_checks_solver(self):
        instance = constructions.fourier_counterexample(8)
        with pytest.raises(ValidationError, match="Unsupported solver"):
            deviation.max_channel_incentive(instance.game, instance.state, 0, solver="GLPK")

    def test_qne_needs_product_state(self):
        bell = PureState((2, 2), np.array([1.0, 0.0, 0.0, 1.0]) / math.sqrt(2.0))
        with pytest.raises(ValidationError, match="product state"):
            deviation.is_qne(constructions.identity_game(2), bell)

    def test_qne_on_product_state(self):
        game = constructions.load_balancing(2).game
        uniform = PureState((2, 2), np.full(4, 0.5))
        verdict = deviation.is_qne(game, uniform)
        assert verdict.tolerance == pytest.approx(1e-6)

    def test_local_dimension_cap(self):
        instance = constructions.fourier_counterexample(4)
        with pytest.raises(CapacityError):
            deviation.max_channel_incentive(instance.game, instance.state, 0, max_local_dimension=2)


class TestMappingBound:
    """Caps on any incentive over a classical CE."""

    def test_square_game(self):
        low, high = deviation.general_mapping_bound(constructions.identity_game(4), 0)
        assert low == pytest.approx(0.75)
        assert high == pytest.approx(4.0)

    def test_needs_normalized_game(self, traffic_light):
        with pytest.raises(ValidationError, match="normalized"):
            deviation.general_mapping_bound(traffic_light.game, 0)
