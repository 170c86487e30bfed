"""
Tests for canonical games, the explicit families and random instances.
"""

import math

import numpy as np
import pytest

from qequil.exceptions import CapacityError, ValidationError
from qequil.models.families import FamilySimulation
from qequil.services import constructions, game_core, quantum_state


class TestCanonicalGames:
    """Named games and their bundled equilibria."""

    @pytest.mark.parametrize("name", ["traffic_light", "battle_of_sexes", "load-balancing"])
    def test_bundled_ce(self, name):
        bundled = constructions.canonical(name)
        assert game_core.check_correlated(bundled.game, bundled.correlated)

    def test_unknown_name(self):
        with pytest.raises(ValidationError, match="Unknown canonical game"):
            constructions.canonical("prisoners_dilemma")

    def test_load_balancing_size(self):
        bundled = constructions.load_balancing(5)
        assert bundled.game.strategy_counts == (5, 5)
        assert np.trace(bundled.correlated.probabilities) == pytest.approx(0.0)
        with pytest.raises(ValidationError):
            constructions.load_balancing(1)

    def test_symmetric_variant(self):
        game = constructions.symmetric_variant(constructions.identity_game(3))
        np.testing.assert_allclose(game.payoff(1), np.eye(3))
        assert game.normalized


class TestEpsilonFamily:
    """Additive family on tensor powers of (I, J)."""

    def test_solved_epsilon_satisfies_depth_equation(self):
        for depth in (1, 10, 1000):
            eps = constructions.solve_epsilon(depth)
            assert 4.0 / eps ** 2 * math.log(1.0 / eps) == pytest.approx(depth, rel=1e-9)

    def test_base_correlation_is_ce(self):
        family = constructions.epsilon_additive_family(1, math.pi / 6)
        assert game_core.check_correlated(family.base_game, family.base_correlation, tol=1e-12)

    def test_depth_one_at_pi_over_six(self):
        family = constructions.epsilon_additive_family(1, math.pi / 6)
        simulation = constructions.simulate_family(family)
        assert simulation.materialized
        assert simulation.old == pytest.approx(13.0 / 16.0)
        assert simulation.new == pytest.approx(15.0 / 16.0)

    def test_materialized_matches_factorwise(self):
        family = constructions.epsilon_additive_family(3)
        full = constructions.simulate_family(family)
        factorwise = constructions.simulate_family(family, materialize_full=False, block_depth=1)
        assert full.materialized and not factorwise.materialized
        assert factorwise.block_depth == 1
        assert full.old == pytest.approx(factorwise.old, abs=1e-12)
        assert full.new == pytest.approx(factorwise.new, abs=1e-12)
        assert full.new == pytest.approx(family.spec.predicted_new, abs=1e-12)

    def test_deep_family_is_simulated(self):
        family = constructions.epsilon_additive_family(20)
        assert not family.materializable
        with pytest.raises(CapacityError):
            constructions.materialize(family)
        simulation = constructions.simulate_family(family)
        assert not simulation.materialized
        assert simulation.block_depth == constructions.family_block_depth(family) == 6
        assert simulation.gain == pytest.approx(family.spec.predicted_gain, abs=1e-12)
        assert simulation.gain > 0.0

    def test_blocks_with_remainder_match_full_power(self):
        family = constructions.epsilon_additive_family(5)
        full = constructions.simulate_family(family)
        blocks = constructions.simulate_family(family, block_depth=2)
        assert full.materialized and not blocks.materialized
        assert blocks.old == pytest.approx(full.old, abs=1e-12)
        assert blocks.new == pytest.approx(full.new, abs=1e-12)

    def test_block_depth_range(self):
        family = constructions.epsilon_additive_family(3)
        with pytest.raises(ValidationError, match="Block depth"):
            constructions.simulate_family(family, block_depth=4)

    def test_depth_limits(self):
        with pytest.raises(ValidationError):
            constructions.epsilon_additive_family(0)
        with pytest.raises(CapacityError):
            constructions.epsilon_additive_family(65)
        with pytest.raises(ValidationError, match="Epsilon"):
            constructions.epsilon_additive_family(1, 2.0)

    def test_trend(self):
        trend = constructions.epsilon_trend([4, 8, 12, 16])
        assert [d for d, _, _ in trend] == [4, 8, 12, 16]
        gains = [gain for _, _, gain in trend]
        assert all(b > a for a, b in zip(gains, gains[1:]))
        assert 0.0 < gains[0] and gains[-1] < 1.0

    def test_shallow_depth_loses(self):
        gain = constructions.epsilon_trend([1])[0][2]
        assert gain < 0.0


class TestCyclicFamily:
    """Multiplicative family built on the cyclic game."""

    def test_cyclic_correlation_is_ce(self):
        for c in (3, 4, 6):
            p = constructions.cyclic_correlation(c)
            assert game_core.check_correlated(constructions.identity_game(c), p, tol=1e-12)

    def test_cyclic_povm_completeness(self):
        povm = constructions.cyclic_povm(5)
        np.testing.assert_allclose(sum(povm.elements), np.eye(5), atol=1e-12)

    def test_base_four_ratio(self):
        family = constructions.cyclic_multiplicative_family(4)
        simulation = constructions.simulate_family(family)
        assert simulation.old == pytest.approx(1.0 / 3.0)
        assert simulation.new == pytest.approx(0.75)
        assert simulation.ratio == pytest.approx(9.0 / 4.0)

    def test_depth_two_matches_prediction(self):
        family = constructions.cyclic_multiplicative_family(3, 2)
        simulation = constructions.simulate_family(family)
        assert simulation.materialized
        assert simulation.ratio == pytest.approx(family.spec.predicted_ratio, rel=1e-10)

    def test_base_too_small(self):
        with pytest.raises(ValidationError):
            constructions.cyclic_multiplicative_family(2)


class TestTensorLemma:
    """Incentives compose over tensor products."""

    def test_bound_formula(self):
        assert constructions.tensor_lemma_bound(0.5, 0.1, 0.4, 0.2) == pytest.approx(0.6 * 0.6 - 0.2)

    def test_bound_is_attained_on_epsilon_pair(self):
        family = constructions.epsilon_additive_family(1, math.pi / 6)
        single = constructions.simulate_family(family)
        both = constructions.simulate_family(constructions.epsilon_additive_family(2, math.pi / 6))
        expected = constructions.tensor_lemma_bound(single.old, single.gain, single.old, single.gain)
        assert both.gain == pytest.approx(expected, abs=1e-12)

    def test_tensor_channel_dimensions(self):
        family = constructions.epsilon_additive_family(1, math.pi / 6)
        channel = constructions.tensor_channel(family.base_deviation, family.base_deviation)
        assert channel.input_dim == 4

    def test_simulation_properties(self):
        simulation = FamilySimulation(old=0.5, new=0.75)
        assert simulation.gain == pytest.approx(0.25)
        assert simulation.ratio == pytest.approx(1.5)


class TestFourier:
    """Nash equilibrium exploited through its entangled implementation."""

    @pytest.mark.parametrize("n", [2, 3, 5])
    def test_uniform_play_is_nash(self, n):
        instance = constructions.fourier_counterexample(n)
        assert game_core.check_nash(instance.game, list(instance.factors), tol=1e-12)
        np.testing.assert_allclose(instance.state.probabilities(), np.full(n * n, 1.0 / n ** 2), atol=1e-12)

    def test_inverse_fourier_pays_in_full(self):
        instance = constructions.fourier_counterexample(4, [2, 0, 3, 1])
        gain = quantum_state.quantum_gain(instance.game, instance.state, instance.deviation)
        assert gain == pytest.approx(instance.predicted_incentive, abs=1e-12)
        assert instance.predicted_incentive == pytest.approx(0.75)

    def test_fourier_matrix_is_unitary(self):
        f = constructions.fourier_matrix(6)
        np.testing.assert_allclose(f.conj().T @ f, np.eye(6), atol=1e-12)

    def test_bad_permutation(self):
        with pytest.raises(ValidationError, match="Not a permutation"):
            constructions.fourier_counterexample(3, [0, 0, 1])

    def test_size_limits(self):
        with pytest.raises(ValidationError):
            constructions.fourier_counterexample(1)


class TestRandomInstances:
    """Random generators behave as documented."""

    def test_sparsity_keeps_a_cell(self, rng):
        p = constructions.random_correlation(4, 4, rng, sparsity=0.99)
        assert p.probabilities.sum() == pytest.approx(1.0)
        assert np.count_nonzero(p.probabilities) >= 1

    def test_ce_instance(self, rng):
        game, p = constructions.random_ce_instance(3, 3, rng)
        assert game_core.check_correlated(game, p)

    def test_non_ce_instance(self, rng):
        game, p = constructions.random_non_ce_instance(2, 3, rng)
        assert not game_core.check_correlated(game, p)
