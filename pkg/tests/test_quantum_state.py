"""
Tests for quantum strategies and local operations.
"""

import math

import numpy as np
import pytest

from qequil.exceptions import ShapeMismatchError, ValidationError
from qequil.models.game import JointDistribution
from qequil.models.quantum import DensityState, LocalChannel, PureState
from qequil.services import constructions, game_core, matkit, quantum_state


class TestMappings:
    """Classical-to-quantum mappings and measurement."""

    def test_mixture_measures_back(self, rng):
        p = constructions.random_correlation(3, 2, rng)
        state = quantum_state.mixture_state(p)
        np.testing.assert_allclose(quantum_state.measure_diag(state).probabilities, p.probabilities, atol=1e-12)

    def test_mixture_above_a_thousand_strategies(self):
        state = quantum_state.mixture_state(JointDistribution.uniform((40, 40)))
        assert state.dims == (40, 40)
        np.testing.assert_allclose(quantum_state.measure_diag(state).probabilities, np.full((40, 40), 1.0 / 1600))

    def test_superposition_measures_back(self, rng):
        p = constructions.random_correlation(2, 4, rng)
        state = quantum_state.superposition_state(p)
        assert isinstance(state, PureState)
        np.testing.assert_allclose(quantum_state.measure_diag(state).probabilities, p.probabilities, atol=1e-12)

    def test_phased_superposition_keeps_statistics(self, rng):
        p = constructions.random_correlation(2, 2, rng)
        state = quantum_state.phased_superposition(p, rng)
        np.testing.assert_allclose(state.probabilities().reshape(2, 2), p.probabilities, atol=1e-12)

    def test_quantum_utility_equals_classical(self, traffic_light):
        state = quantum_state.superposition_state(traffic_light.correlated)
        np.testing.assert_allclose(
            quantum_state.quantum_utility(traffic_light.game, state),
            game_core.expected_utility(traffic_light.game, traffic_light.correlated),
        )

    def test_dims_must_match_game(self, traffic_light):
        state = quantum_state.mixture_state(JointDistribution.uniform((3, 2)))
        with pytest.raises(ShapeMismatchError):
            quantum_state.quantum_utility(traffic_light.game, state)


class TestTensorStates:
    """Tensor products of states follow the tensor-game index order."""

    def test_pure_tensor_matches_tensor_dist(self, traffic_light, battle_of_sexes):
        s = quantum_state.tensor_states(
            quantum_state.superposition_state(traffic_light.correlated),
            quantum_state.superposition_state(battle_of_sexes.correlated),
        )
        expected = game_core.tensor_dist(traffic_light.correlated, battle_of_sexes.correlated)
        np.testing.assert_allclose(quantum_state.measure_diag(s).probabilities, expected.probabilities, atol=1e-12)

    def test_mixed_tensor_matches_tensor_dist(self, rng):
        p1 = constructions.random_correlation(2, 2, rng)
        p2 = constructions.random_correlation(2, 3, rng)
        s = quantum_state.tensor_states(quantum_state.mixture_state(p1), quantum_state.superposition_state(p2))
        assert isinstance(s, DensityState)
        assert s.dims == (4, 6)
        expected = game_core.tensor_dist(p1, p2)
        np.testing.assert_allclose(quantum_state.measure_diag(s).probabilities, expected.probabilities, atol=1e-12)


class TestLocalOperations:
    """Channel application and swap deviations."""

    def test_unitary_keeps_pure(self):
        state = PureState((2, 2), np.array([1.0, 0.0, 0.0, 0.0]))
        flip = LocalChannel.from_unitary(0, np.array([[0.0, 1.0], [1.0, 0.0]]))
        after = quantum_state.apply_local(state, flip)
        assert isinstance(after, PureState)
        np.testing.assert_allclose(after.probabilities(), [0.0, 0.0, 1.0, 0.0], atol=1e-12)

    def test_channel_on_second_player(self):
        state = PureState((2, 2), np.array([1.0, 0.0, 0.0, 0.0]))
        flip = LocalChannel.from_unitary(1, np.array([[0.0, 1.0], [1.0, 0.0]]))
        after = quantum_state.apply_local(state, flip)
        np.testing.assert_allclose(after.probabilities(), [0.0, 1.0, 0.0, 0.0], atol=1e-12)

    def test_unitary_conjugation_of_density(self, rng):
        rho = quantum_state.random_density((2, 3), rng)
        u = matkit.random_unitary(3, rng)
        after = quantum_state.apply_local(rho, LocalChannel.from_unitary(1, u))
        full = np.kron(np.eye(2), u)
        np.testing.assert_allclose(after.matrix, full @ rho.matrix @ full.conj().T, atol=1e-12)

    def test_channel_changes_output_dimension(self):
        state = quantum_state.mixture_state(JointDistribution.uniform((2, 2)))
        discard = LocalChannel(0, (np.array([[1.0, 0.0]]), np.array([[0.0, 1.0]])))
        after = quantum_state.apply_local(state, discard)
        assert after.dims == (1, 2)
        np.testing.assert_allclose(after.diagonal(), [0.5, 0.5], atol=1e-12)

    def test_channel_dimension_mismatch(self):
        state = quantum_state.mixture_state(JointDistribution.uniform((2, 2)))
        with pytest.raises(ShapeMismatchError):
            quantum_state.apply_local(state, LocalChannel.identity(0, 3))

    def test_swap_gain_matches_classical_violation(self, rng):
        game = constructions.random_non_ce_instance(3, 2, rng)[0]
        p = constructions.random_correlation(3, 2, rng)
        state = quantum_state.mixture_state(p)
        gains = game_core.deviation_gains(game, p, 0)
        for rec in range(3):
            for dev in range(3):
                if rec == dev:
                    continue
                channel = quantum_state.swap_deviation(0, rec, dev, p.shape)
                simulated = quantum_state.quantum_gain(game, state, channel)
                assert simulated == pytest.approx(gains[rec, dev], abs=1e-12)
                assert quantum_state.swap_gain(game, state, 0, rec, dev) == pytest.approx(gains[rec, dev])

    def test_swap_needs_distinct_strategies(self):
        with pytest.raises(ValidationError):
            quantum_state.swap_deviation(0, 1, 1, (2, 2))

    def test_hadamard_breaks_superposition_payoff(self):
        # |psi> = (|00> + |11>)/sqrt 2 in the matching game: H on player 1 halves the payoff
        game = constructions.identity_game(2)
        state = quantum_state.superposition_state(JointDistribution(np.eye(2) / 2))
        h = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)
        gain = quantum_state.quantum_gain(game, state, LocalChannel.from_unitary(0, h))
        assert gain == pytest.approx(-0.5)
