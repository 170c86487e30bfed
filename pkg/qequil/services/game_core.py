"""
Classical strategic games: expected utilities, correlated and Nash equilibrium
checks, incentives, the game induced by a correlation, and tensor products.

Joint strategies are indexed in row-major order of the player axes; the
lexicographic order of strategy tuples is the tie-break everywhere.
"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..constants import MAX_JOINT_STRATEGIES
from ..exceptions import CapacityError, QEquilError, ShapeMismatchError, ValidationError
from ..models.game import DeviationReport, EquilibriumVerdict, Game, JointDistribution

logger = logging.getLogger(__name__)


def _check_shapes(g: Game, p: JointDistribution) -> None:
    if p.shape != g.strategy_counts:
        raise ShapeMismatchError(
            f"Distribution shape {p.shape} does not match strategy counts {g.strategy_counts}"
        )


def _flatten_player_first(tensor: np.ndarray, player: int) -> np.ndarray:
    """Reshape so rows index the player's strategy and columns the opponents' joint strategy."""
    moved = np.moveaxis(tensor, player, 0)
    return moved.reshape(moved.shape[0], -1)


def deviation_gains(g: Game, p: JointDistribution, player: int) -> np.ndarray:
    """Matrix G[s, t] = sum_{s_-i} p(s, s_-i) [u_i(t, s_-i) - u_i(s, s_-i)]."""
    _check_shapes(g, p)
    g.check_player(player)
    weights = _flatten_player_first(p.probabilities, player)
    payoff = _flatten_player_first(g.utilities[player], player)
    values = weights @ payoff.T
    return values - np.diag(values)[:, None]


def expected_utility(g: Game, p: JointDistribution) -> np.ndarray:
    """Payoff vector (sum_s p(s) u_i(s))_i."""
    _check_shapes(g, p)
    return np.tensordot(g.utilities, p.probabilities, axes=p.players)


def _report_from_gains(player: int, gains: np.ndarray, baseline: float) -> DeviationReport:
    n = gains.shape[0]
    best: List[int] = []
    additive = 0.0
    for s in range(n):
        row = gains[s]
        top = int(np.argmax(row))
        if row[top] > row[s]:
            best.append(top)
            additive += float(row[top])
        else:
            best.append(s)
    worst_violation, worst_pair = 0.0, None
    if n > 1:
        off = gains.copy()
        np.fill_diagonal(off, -np.inf)
        s, t = np.unravel_index(int(np.argmax(off)), off.shape)
        worst_violation, worst_pair = float(off[s, t]), (int(s), int(t))
    multiplicative = (baseline + additive) / baseline if baseline > 0.0 else None
    return DeviationReport(
        player=player,
        best_deviation=tuple(best),
        additive_gain=additive,
        multiplicative_gain=multiplicative,
        baseline=baseline,
        worst_violation=worst_violation,
        worst_pair=worst_pair,
    )


def check_correlated(g: Game, p: JointDistribution, tol: float = 0.0) -> EquilibriumVerdict:
    """Correlated-equilibrium check with per-player best-deviation reports.

    The verdict is true iff every gain sum_{s_-i} p(s_i, s_-i)[u_i(s_i', s_-i) - u_i(s_i, s_-i)]
    is at most tol.
    """
    if tol < 0.0:
        raise ValidationError("Tolerance must be nonnegative")
    _check_shapes(g, p)
    baselines = expected_utility(g, p)
    reports = []
    verdict = True
    for player in range(g.players):
        gains = deviation_gains(g, p, player)
        report = _report_from_gains(player, gains, float(baselines[player]))
        reports.append(report)
        if report.worst_pair is not None and report.worst_violation > tol:
            verdict = False
    logger.debug(f"Correlated check: verdict={verdict} max violation={max(r.worst_violation for r in reports):.3e}")
    return EquilibriumVerdict(is_equilibrium=verdict, reports=reports, tolerance=tol)


def classical_incentive(g: Game, p: JointDistribution, player: int) -> Tuple[float, Optional[float]]:
    """Maximum additive incentive and, for a positive baseline, the multiplicative ratio."""
    baseline = float(expected_utility(g, p)[player])
    report = _report_from_gains(player, deviation_gains(g, p, player), baseline)
    return report.additive_gain, report.multiplicative_gain


def _validate_factors(g: Game, factors: Sequence[np.ndarray]) -> List[np.ndarray]:
    if len(factors) != g.players:
        raise ShapeMismatchError(f"Expected {g.players} factors, got {len(factors)}")
    checked = []
    for player, factor in enumerate(factors):
        factor = np.asarray(factor, dtype=np.float64)
        if factor.shape != (g.strategy_counts[player],):
            raise ShapeMismatchError(
                f"Factor for player {player} has shape {factor.shape}, "
                f"expected ({g.strategy_counts[player]},)"
            )
        checked.append(JointDistribution(factor).probabilities)
    return checked


def pure_strategy_values(g: Game, factors: Sequence[np.ndarray], player: int) -> np.ndarray:
    """Expected payoff of each pure strategy of player against the others' product."""
    factors = _validate_factors(g, factors)
    others = [f for i, f in enumerate(factors) if i != player]
    opponent = JointDistribution.product(others).flat if others else np.ones(1)
    return _flatten_player_first(g.utilities[player], player) @ opponent


def check_nash(g: Game, factors: Sequence[np.ndarray], tol: float = 0.0) -> EquilibriumVerdict:
    """Mixed Nash check: every support strategy must be a best response within tol.

    Strategies outside the support are not constrained.
    """
    factors = _validate_factors(g, factors)
    reports = []
    verdict = True
    for player in range(g.players):
        values = pure_strategy_values(g, factors, player)
        mixed = factors[player]
        best_value = float(values.max())
        best = tuple(int(np.argmax(values)) if values.max() > values[s] else s for s in range(values.size))
        support = np.flatnonzero(mixed > 0.0)
        shortfall = best_value - values[support]
        worst = int(np.argmax(shortfall))
        worst_violation = float(shortfall[worst])
        baseline = float(mixed @ values)
        additive = float(mixed @ (best_value - values))
        reports.append(
            DeviationReport(
                player=player,
                best_deviation=best,
                additive_gain=max(additive, 0.0),
                multiplicative_gain=(baseline + additive) / baseline if baseline > 0.0 else None,
                baseline=baseline,
                worst_violation=worst_violation,
                worst_pair=(int(support[worst]), best[int(support[worst])]),
            )
        )
        if worst_violation > tol:
            verdict = False
    return EquilibriumVerdict(is_equilibrium=verdict, reports=reports, tolerance=tol)


def game_from_correlation(p: JointDistribution) -> Game:
    """Game in which p is a correlated equilibrium.

    u_i(s) = 1 iff s_-i is the lexicographically first maximizer of p(s_i, .).
    """
    utilities = []
    for player in range(p.players):
        weights = _flatten_player_first(p.probabilities, player)
        favourite = np.argmax(weights, axis=1)
        payoff = np.zeros_like(weights)
        payoff[np.arange(weights.shape[0]), favourite] = 1.0
        others = [n for i, n in enumerate(p.shape) if i != player]
        utilities.append(np.moveaxis(payoff.reshape([p.shape[player], *others]), 0, player))
    game = Game(np.stack(utilities), normalized=True)
    verdict = check_correlated(game, p, tol=0.0)
    if not verdict:
        raise QEquilError("Induced game does not certify the correlation", details=f"max violation {verdict.max_violation}")
    return game


def _check_product_size(shape_a: Sequence[int], shape_b: Sequence[int]) -> None:
    size = int(np.prod(shape_a)) * int(np.prod(shape_b))
    if size > MAX_JOINT_STRATEGIES:
        raise CapacityError(f"Tensor product with {size} joint strategies exceeds cap {MAX_JOINT_STRATEGIES}")


def tensor_game(g1: Game, g2: Game) -> Game:
    """Game on S1 x S2 with u_i((a, b)) = u1_i(a) * u2_i(b); player i's index is a_i * |S2_i| + b_i."""
    if g1.players != g2.players:
        raise ShapeMismatchError(f"Cannot tensor a {g1.players}-player game with a {g2.players}-player game")
    _check_product_size(g1.strategy_counts, g2.strategy_counts)
    utilities = np.stack([np.kron(g1.utilities[i], g2.utilities[i]) for i in range(g1.players)])
    return Game(utilities, normalized=g1.normalized and g2.normalized)


def tensor_dist(p1: JointDistribution, p2: JointDistribution) -> JointDistribution:
    """Product distribution on the tensor game's joint strategies."""
    if p1.players != p2.players:
        raise ShapeMismatchError("Distributions must have the same number of players")
    _check_product_size(p1.shape, p2.shape)
    return JointDistribution(np.kron(p1.probabilities, p2.probabilities))
