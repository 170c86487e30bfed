"""
Generators for the explicit games, equilibria and deviations: canonical games,
the additive epsilon family, the multiplicative cyclic family, the Fourier
counterexample and random instances for invariant checks.

Families whose tensor power exceeds the joint-strategy cap are simulated on
materialized blocks of factors; the identity payoff and the product state
both tensorize, so player 1's utility is the product of the block utilities.
"""

import logging
import math
from dataclasses import replace
from typing import Callable, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import bisect

from ..constants import (
    DEFAULT_CE_PRECHECK_TOLERANCE,
    EPSILON_BISECTION_ITERATIONS,
    EPSILON_BRACKET,
    MAX_FAMILY_DEPTH,
    MAX_FOURIER_SIZE,
    MAX_JOINT_STRATEGIES,
)
from ..exceptions import CapacityError, ValidationError
from ..models.families import (
    CanonicalGame,
    CyclicGameSpec,
    EpsilonGameSpec,
    FamilySimulation,
    FourierInstance,
    TensorFamily,
)
from ..models.game import Game, JointDistribution
from ..models.incentive import IncentiveMode, Povm
from ..models.quantum import LocalChannel, PureState
from . import deviation, game_core, quantum_state

logger = logging.getLogger(__name__)

CANONICAL_NAMES = ("traffic_light", "battle_of_sexes", "load_balancing")


# Canonical games


def _traffic_light() -> CanonicalGame:
    game = Game.bimatrix([[-100.0, 1.0], [0.0, 0.0]], [[-100.0, 0.0], [1.0, 0.0]])
    correlated = JointDistribution(np.array([[0.0, 0.5], [0.5, 0.0]]))
    mixed = np.array([1.0 / 101.0, 100.0 / 101.0])
    profiles = [
        (np.array([1.0, 0.0]), np.array([0.0, 1.0])),
        (np.array([0.0, 1.0]), np.array([1.0, 0.0])),
        (mixed, mixed.copy()),
    ]
    return CanonicalGame("traffic_light", game, correlated, profiles)


def _battle_of_sexes() -> CanonicalGame:
    game = Game.bimatrix([[2.0, 0.0], [0.0, 4.0]], [[4.0, 0.0], [0.0, 2.0]])
    correlated = JointDistribution(np.array([[0.5, 0.0], [0.0, 0.5]]))
    profiles = [
        (np.array([1.0, 0.0]), np.array([1.0, 0.0])),
        (np.array([0.0, 1.0]), np.array([0.0, 1.0])),
        (np.array([1.0 / 3.0, 2.0 / 3.0]), np.array([2.0 / 3.0, 1.0 / 3.0])),
    ]
    return CanonicalGame("battle_of_sexes", game, correlated, profiles)


def load_balancing(n: int) -> CanonicalGame:
    """Game (J - I, J - I): a player is paid when the two choices differ."""
    if n < 2:
        raise ValidationError("Load balancing needs at least 2 strategies")
    payoff = np.ones((n, n)) - np.eye(n)
    correlated = JointDistribution(payoff / (n * n - n))
    uniform = np.full(n, 1.0 / n)
    return CanonicalGame(f"load_balancing_{n}", Game.bimatrix(payoff, payoff), correlated, [(uniform, uniform.copy())])


def canonical(name: str, n: int = 3) -> CanonicalGame:
    """Named game with its bundled equilibria; n sizes load_balancing."""
    key = name.lower().replace("-", "_")
    if key == "traffic_light":
        return _traffic_light()
    if key == "battle_of_sexes":
        return _battle_of_sexes()
    if key == "load_balancing":
        return load_balancing(n)
    raise ValidationError(f"Unknown canonical game: {name}", details=f"choose one of {', '.join(CANONICAL_NAMES)}")


def identity_game(n: int) -> Game:
    """(I, J): player 1 is paid for matching, player 2 always gets 1."""
    return Game.bimatrix(np.eye(n), np.ones((n, n)), normalized=True)


def symmetric_variant(g: Game) -> Game:
    """Replace player 2's payoff with player 1's matrix, turning (A, J) into (A, A)."""
    if g.players != 2:
        raise ValidationError("Symmetric variant needs a two-player game")
    a = g.payoff(0)
    return Game.bimatrix(a, a.copy(), normalized=g.normalized)


# Additive epsilon family


def _depth_equation(epsilon: float, depth: float) -> float:
    return 4.0 / epsilon ** 2 * math.log(1.0 / epsilon) - depth


def solve_epsilon(depth: float) -> float:
    """epsilon with depth = 4 eps^-2 ln(1/eps), found by bisection on EPSILON_BRACKET."""
    if depth <= 0:
        raise ValidationError("Depth must be positive")
    low, high = EPSILON_BRACKET
    return float(
        bisect(
            _depth_equation,
            low,
            high,
            args=(float(depth),),
            xtol=1e-15,
            maxiter=EPSILON_BISECTION_ITERATIONS,
        )
    )


def _check_depth(depth: int) -> None:
    if depth < 1:
        raise ValidationError("Depth must be at least 1")
    if depth > MAX_FAMILY_DEPTH:
        raise CapacityError(f"Depth {depth} exceeds cap {MAX_FAMILY_DEPTH}")


def epsilon_additive_family(depth: int, epsilon: Optional[float] = None) -> TensorFamily:
    """(I, J) on 2^d strategies with CE P^(x)d and the rotation U_1^(x)d.

    P = [[sin^2 e, cos^2 e sin^2 e], [0, cos^4 e]], U_1 = [[cos e, -sin e], [sin e, cos e]].
    """
    _check_depth(depth)
    if epsilon is None:
        epsilon = solve_epsilon(depth)
    if not 0.0 < epsilon < math.pi / 2:
        raise ValidationError(f"Epsilon must lie in (0, pi/2), got {epsilon}")
    s, c = math.sin(epsilon), math.cos(epsilon)
    correlation = JointDistribution(np.array([[s * s, c * c * s * s], [0.0, c ** 4]]))
    rotation = LocalChannel.from_unitary(0, np.array([[c, -s], [s, c]]))
    spec = EpsilonGameSpec.from_epsilon(depth, epsilon)
    logger.debug(f"Epsilon family: d={depth} epsilon={epsilon:.12f} predicted gain={spec.predicted_gain:.12f}")
    return TensorFamily(identity_game(2), correlation, rotation, depth, spec)


def epsilon_trend(depths: Iterable[int]) -> List[Tuple[int, float, float]]:
    """(d, epsilon, predicted gain) for each depth, epsilon solved from d."""
    trend = []
    for depth in depths:
        spec = epsilon_additive_family(depth).spec
        trend.append((depth, spec.epsilon, spec.predicted_gain))
    return trend


# Multiplicative cyclic family


def cyclic_povm(c: int) -> Povm:
    """Rank-one POVM with psi_i[i'] = (2 - c)/c when i' - i = 1 mod c, else 2/c."""
    vectors = np.full((c, c), 2.0 / c)
    for i in range(c):
        vectors[i, (i + 1) % c] = (2.0 - c) / c
    return Povm.from_vectors(vectors)


def cyclic_correlation(c: int) -> JointDistribution:
    """p_ij = 0 when i - j = 1 mod c, else 1/(c^2 - c)."""
    p = np.full((c, c), 1.0 / (c * c - c))
    for i in range(c):
        p[i, (i - 1) % c] = 0.0
    return JointDistribution(p)


def cyclic_multiplicative_family(c: int, depth: int = 1) -> TensorFamily:
    if c < 3:
        raise ValidationError("Cyclic base must be at least 3")
    _check_depth(depth)
    if c ** depth > MAX_JOINT_STRATEGIES:
        raise CapacityError(f"{c}^{depth} strategies exceed cap {MAX_JOINT_STRATEGIES}")
    return TensorFamily(identity_game(c), cyclic_correlation(c), cyclic_povm(c), depth, CyclicGameSpec(c, depth))


# Tensor powers and simulation


def _power(base, depth: int, combine: Callable):
    result = base
    for _ in range(depth - 1):
        result = combine(result, base)
    return result


def materialize(family: TensorFamily) -> Tuple[Game, JointDistribution, object]:
    """Full tensor power (game, CE, deviation); only within the joint-strategy cap."""
    if not family.materializable:
        raise CapacityError(
            f"Family with {family.joint_size} joint strategies exceeds cap {MAX_JOINT_STRATEGIES}",
            details="use simulate_family, which works on blocks within the cap",
        )
    d = family.depth
    game = _power(family.base_game, d, game_core.tensor_game)
    correlation = _power(family.base_correlation, d, game_core.tensor_dist)
    deviation_power = _power(family.base_deviation, d, lambda a, b: a.tensor(b))
    return game, correlation, deviation_power


def _utilities(game: Game, correlation: JointDistribution, deviation_op) -> Tuple[float, float]:
    """Player 1's utility on |psi(P)> before and after the deviation."""
    if isinstance(deviation_op, Povm):
        a = game.payoff(0)
        old = float(np.sum(a * correlation.probabilities))
        new = deviation.povm_objective(a, correlation, deviation_op, IncentiveMode.ADDITIVE) + old
        return old, new
    state = quantum_state.superposition_state(correlation)
    old = float(quantum_state.quantum_utility(game, state)[0])
    new = float(quantum_state.quantum_utility(game, quantum_state.apply_local(state, deviation_op))[0])
    return old, new


def family_block_depth(family: TensorFamily) -> int:
    """Largest depth, at most the family's, whose tensor power stays within the joint-strategy cap."""
    base = int(np.prod(family.base_game.strategy_counts))
    k = 1
    while k < family.depth and base ** (k + 1) <= MAX_JOINT_STRATEGIES:
        k += 1
    return k


def _block_utilities(family: TensorFamily, depth: int) -> Tuple[float, float]:
    return _utilities(*materialize(replace(family, depth=depth)))


def simulate_family(
    family: TensorFamily,
    materialize_full: Optional[bool] = None,
    block_depth: Optional[int] = None,
) -> FamilySimulation:
    """Simulated utilities of player 1.

    Within the cap the full tensor power is materialized. Otherwise the
    state is simulated on blocks of block_depth factors, each materialized
    and deviated as a whole; the utilities of the depth-d state are the
    products of the block utilities.
    """
    full = family.materializable if materialize_full is None else materialize_full
    if full and block_depth is None:
        old, new = _utilities(*materialize(family))
        return FamilySimulation(old=old, new=new, materialized=True, block_depth=family.depth)
    k = family_block_depth(family) if block_depth is None else int(block_depth)
    if not 1 <= k <= family.depth:
        raise ValidationError(f"Block depth must be in [1, {family.depth}], got {block_depth}")
    count, rest = divmod(family.depth, k)
    old, new = _block_utilities(family, k)
    old, new = old ** count, new ** count
    if rest:
        rest_old, rest_new = _block_utilities(family, rest)
        old, new = old * rest_old, new * rest_new
    logger.debug(f"Simulated depth {family.depth} on {count} blocks of {k}, remainder {rest}")
    return FamilySimulation(old=old, new=new, block_depth=k)


def tensor_lemma_bound(u1: float, a1: float, u2: float, a2: float) -> float:
    """Incentive guaranteed by playing both deviations on the tensor game: (u1+a1)(u2+a2) - u1 u2."""
    return (u1 + a1) * (u2 + a2) - u1 * u2


def tensor_channel(phi1: LocalChannel, phi2: LocalChannel) -> LocalChannel:
    return phi1.tensor(phi2)


# Fourier counterexample


def fourier_matrix(n: int) -> np.ndarray:
    index = np.arange(n)
    return np.exp(2j * np.pi * np.outer(index, index) / n) / math.sqrt(n)


def fourier_counterexample(n: int, permutation: Optional[Sequence[int]] = None) -> FourierInstance:
    """Game with u_1 = 1 iff s_1 = pi(s_2) and u_2 = 1, implemented by (F (x) I)|psi'>.

    Every cell is measured with probability 1/n^2, so uniform play is a Nash
    equilibrium, yet applying F* restores |psi'> and pays player 1 in full.
    """
    if n < 2:
        raise ValidationError("Fourier game needs at least 2 strategies")
    if n > MAX_FOURIER_SIZE:
        raise CapacityError(f"Fourier size {n} exceeds cap {MAX_FOURIER_SIZE}")
    pi = np.arange(n) if permutation is None else np.asarray(permutation, dtype=int)
    if sorted(pi.tolist()) != list(range(n)):
        raise ValidationError(f"Not a permutation of range({n}): {list(pi)}")
    payoff = np.zeros((n, n))
    payoff[pi, np.arange(n)] = 1.0
    game = Game.bimatrix(payoff, np.ones((n, n)), normalized=True)
    f = fourier_matrix(n)
    amplitudes = f[:, pi] / math.sqrt(n)
    uniform = np.full(n, 1.0 / n)
    return FourierInstance(
        game=game,
        factors=(uniform, uniform.copy()),
        state=PureState((n, n), amplitudes.reshape(-1)),
        deviation=LocalChannel.from_unitary(0, f.conj().T),
        permutation=tuple(int(x) for x in pi),
    )


# Random instances


def random_correlation(n: int, m: int, rng: np.random.Generator, sparsity: float = 0.0) -> JointDistribution:
    """Dirichlet weights with each cell dropped with probability sparsity (one cell always kept)."""
    weights = rng.dirichlet(np.ones(n * m))
    if sparsity > 0.0:
        mask = rng.random(n * m) >= sparsity
        mask[rng.integers(n * m)] = True
        weights = weights * mask
    return JointDistribution.from_weights(weights.reshape(n, m))


def random_ce_instance(
    n: int, m: int, rng: np.random.Generator, sparsity: float = 0.0
) -> Tuple[Game, JointDistribution]:
    """Random P with a game in which it is a correlated equilibrium."""
    p = random_correlation(n, m, rng, sparsity)
    return game_core.game_from_correlation(p), p


def _indifferent(payoff: np.ndarray, mix: np.ndarray) -> np.ndarray:
    values = payoff @ mix
    return payoff - values[:, None] + values.max()


def random_nash_instance(n: int, m: int, rng: np.random.Generator) -> Tuple[Game, Tuple[np.ndarray, np.ndarray]]:
    """Random normalized game with a fully mixed Nash equilibrium.

    Each payoff is shifted row by row until the player is indifferent
    against the opponent's mix, then rescaled into [0, 1].
    """
    x = rng.dirichlet(np.ones(n))
    y = rng.dirichlet(np.ones(m))
    a = _indifferent(rng.random((n, m)), y)
    b = _indifferent(rng.random((m, n)), x).T
    payoffs = []
    for u in (a, b):
        spread = u.max() - u.min()
        payoffs.append((u - u.min()) / spread if spread > 0.0 else np.zeros_like(u))
    return Game.bimatrix(payoffs[0], payoffs[1], normalized=True), (x, y)


def random_non_ce_instance(
    n: int, m: int, rng: np.random.Generator, max_draws: int = 100
) -> Tuple[Game, JointDistribution]:
    """Random normalized game and distribution violating the correlated-equilibrium constraints."""
    for _ in range(max_draws):
        game = Game.bimatrix(rng.random((n, m)), rng.random((n, m)), normalized=True)
        p = random_correlation(n, m, rng)
        verdict = game_core.check_correlated(game, p, tol=DEFAULT_CE_PRECHECK_TOLERANCE)
        if not verdict:
            return game, p
    raise ValidationError(f"No non-equilibrium instance found in {max_draws} draws")
