"""
Quantum strategies: the classical-to-quantum mappings, computational-basis
measurement, quantum utilities and local channel application.
"""

import logging
from typing import Optional, Union

import numpy as np

from ..constants import PSD_TOLERANCE
from ..exceptions import ShapeMismatchError, ValidationError
from ..models.game import Game, JointDistribution
from ..models.quantum import DensityState, LocalChannel, PureState
from . import game_core

logger = logging.getLogger(__name__)

QuantumState = Union[DensityState, PureState]


def mixture_state(p: JointDistribution) -> DensityState:
    """Classical mixture rho(p) = sum_s p(s)|s><s|."""
    return DensityState(p.shape, np.diag(p.flat).astype(np.complex128))


def superposition_state(p: JointDistribution) -> PureState:
    """Superposition |psi(p)> = sum_s sqrt(p(s))|s>."""
    return PureState(p.shape, np.sqrt(p.flat))


def phased_superposition(p: JointDistribution, rng: np.random.Generator) -> PureState:
    """Superposition with random phases; its computational-basis statistics are still p."""
    phases = np.exp(2j * np.pi * rng.random(p.flat.size))
    return PureState(p.shape, np.sqrt(p.flat) * phases)


def random_density(dims, rng: np.random.Generator, rank: Optional[int] = None) -> DensityState:
    """Random mixed state from a Ginibre matrix of the given rank."""
    dimension = int(np.prod(dims))
    rank = rank or dimension
    z = rng.normal(size=(dimension, rank)) + 1j * rng.normal(size=(dimension, rank))
    rho = z @ z.conj().T
    return DensityState(tuple(dims), rho / np.trace(rho).real)


def _interleave(t1: np.ndarray, t2: np.ndarray, k: int) -> np.ndarray:
    """Outer product with axis order (a_1, b_1, a_2, b_2, ...) over k-axis groups."""
    outer = np.multiply.outer(t1, t2)
    order = [axis for i in range(k) for axis in (i, k + i)]
    return outer.transpose(order)


def tensor_states(s1: QuantumState, s2: QuantumState) -> QuantumState:
    """State of the tensor game; player i's index is a_i * dims2[i] + b_i."""
    if s1.players != s2.players:
        raise ShapeMismatchError("States must have the same number of players")
    dims = tuple(a * b for a, b in zip(s1.dims, s2.dims))
    if isinstance(s1, PureState) and isinstance(s2, PureState):
        amplitudes = _interleave(s1.tensor(), s2.tensor(), s1.players)
        return PureState(dims, amplitudes.reshape(-1))
    m1 = s1.density() if isinstance(s1, PureState) else s1
    m2 = s2.density() if isinstance(s2, PureState) else s2
    k = m1.players
    rows = _interleave(
        m1.matrix.reshape(list(m1.dims) * 2),
        m2.matrix.reshape(list(m2.dims) * 2),
        2 * k,
    )
    size = int(np.prod(dims))
    return DensityState(dims, rows.reshape(size, size))


def measure_diag(state: QuantumState) -> JointDistribution:
    """Distribution of the computational-basis measurement, p(s) = rho_ss."""
    if isinstance(state, PureState):
        probabilities = state.probabilities()
    else:
        probabilities = state.diagonal()
    if np.any(probabilities < -PSD_TOLERANCE):
        raise ValidationError("State has a negative diagonal entry")
    probabilities = np.clip(probabilities, 0.0, None)
    return JointDistribution((probabilities / probabilities.sum()).reshape(state.dims))


def _check_game_dims(g: Game, state: QuantumState) -> None:
    if tuple(state.dims) != g.strategy_counts:
        raise ShapeMismatchError(f"State dims {state.dims} do not match strategy counts {g.strategy_counts}")


def quantum_utility(g: Game, state: QuantumState) -> np.ndarray:
    """u_i(rho) = sum_s <s|rho|s> u_i(s) for every player."""
    _check_game_dims(g, state)
    return game_core.expected_utility(g, measure_diag(state))


def _check_channel(state: QuantumState, channel: LocalChannel) -> None:
    if channel.player >= state.players:
        raise ShapeMismatchError(f"Channel acts on player {channel.player} of a {state.players}-player state")
    if channel.input_dim != state.dims[channel.player]:
        raise ShapeMismatchError(
            f"Channel input dimension {channel.input_dim} does not match "
            f"local dimension {state.dims[channel.player]}"
        )


def apply_local(state: QuantumState, channel: LocalChannel) -> QuantumState:
    """(Phi_i (x) I)(rho). Pure input with a single Kraus operator stays pure."""
    _check_channel(state, channel)
    player = channel.player
    dims = list(state.dims)
    dims[player] = channel.output_dim
    if isinstance(state, PureState):
        if channel.is_isometry:
            moved = np.tensordot(channel.kraus_ops[0], state.tensor(), axes=([1], [player]))
            return PureState(tuple(dims), np.moveaxis(moved, 0, player).reshape(-1))
        state = state.density()
    k = state.players
    tensor = state.matrix.reshape(list(state.dims) * 2)
    result = np.zeros([*dims, *dims], dtype=np.complex128)
    for kraus in channel.kraus_ops:
        rows = np.moveaxis(np.tensordot(kraus, tensor, axes=([1], [player])), 0, player)
        both = np.tensordot(rows, kraus.conj(), axes=([k + player], [1]))
        result += np.moveaxis(both, -1, k + player)
    size = int(np.prod(dims))
    return DensityState(tuple(dims), result.reshape(size, size))


def swap_deviation(player: int, recommendation: int, deviation: int, dims) -> LocalChannel:
    """Channel that plays `deviation` whenever `recommendation` is measured.

    Kraus operators: {P_t : t != recommendation} plus |deviation><recommendation|.
    """
    dims = tuple(dims)
    if not 0 <= player < len(dims):
        raise ValidationError(f"Player index {player} out of range")
    d = dims[player]
    for strategy in (recommendation, deviation):
        if not 0 <= strategy < d:
            raise ValidationError(f"Strategy {strategy} out of range for local dimension {d}")
    if recommendation == deviation:
        raise ValidationError("Swap deviation needs two distinct strategies")
    ops = []
    for t in range(d):
        if t != recommendation:
            projector = np.zeros((d, d))
            projector[t, t] = 1.0
            ops.append(projector)
    swap = np.zeros((d, d))
    swap[deviation, recommendation] = 1.0
    ops.append(swap)
    return LocalChannel(player, tuple(ops))


def quantum_gain(g: Game, state: QuantumState, channel: LocalChannel) -> float:
    """Change of the deviating player's utility when channel is applied."""
    player = channel.player
    before = quantum_utility(g, state)[player]
    after = quantum_utility(g, apply_local(state, channel))[player]
    return float(after - before)


def swap_gain(g: Game, state: QuantumState, player: int, recommendation: int, deviation: int) -> float:
    """Closed form of the swap deviation's gain:
    sum_{s_-i} rho_(s_i s_-i),(s_i s_-i) [u_i(s_i', s_-i) - u_i(s_i, s_-i)].
    """
    _check_game_dims(g, state)
    gains = game_core.deviation_gains(g, measure_diag(state), player)
    return float(gains[recommendation, deviation])
