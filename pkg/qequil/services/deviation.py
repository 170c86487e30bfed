"""
Maximum quantum incentive with duality certificates.

Two optimizers live here. The POVM program covers games (A, J) played on the
superposition |psi(P)>, where only player 1 can gain: maximize
sum_i tr(M_i E_i) over POVMs {E_i} with M_i = sum_j a_ij |sqrt p_j><sqrt p_j|,
dual min tr(Y) s.t. Y >= M_i. The channel program maximizes a player's
payoff over every CPTP map on its register through the Choi matrix J,
dual min tr(Z) s.t. Z (x) I >= W.

Both programs are solved with cvxpy, then the primal point is repaired onto
the feasible set and the dual point shifted until it dominates, so reported
values are exact bounds on each side of the optimum.
"""

import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple, Union

import cvxpy as cp
import numpy as np

from ..constants import (
    DEFAULT_CE_PRECHECK_TOLERANCE,
    DEFAULT_CHANNEL_GAP_TOLERANCE,
    DEFAULT_POVM_GAP_TOLERANCE,
    DEFAULT_SOLVER,
    DEFAULT_TOLERANCE,
    LARGE_PROGRAM_SOLVER,
    MAX_INTERIOR_POINT_CHOI_DIMENSION,
    MAX_LOCAL_DIMENSION,
    PSD_TOLERANCE,
    SOLVER_OPTIONS,
    SUPPORTED_SOLVERS,
)
from ..exceptions import (
    CapacityError,
    ConvergenceError,
    NotEquilibriumError,
    ShapeMismatchError,
    SolverError,
    ValidationError,
)
from ..models.game import Game, JointDistribution
from ..models.incentive import (
    ClosedFormSolution,
    DualCertificate,
    IncentiveMode,
    IncentiveResult,
    NonConcavityWitness,
    Povm,
    QceVerdict,
)
from ..models.quantum import DensityState, LocalChannel, PureState
from . import game_core, matkit, quantum_state

logger = logging.getLogger(__name__)

ModeLike = Union[IncentiveMode, str]
StateLike = Union[DensityState, PureState]


def _check_solver(solver: Optional[str]) -> str:
    solver = (solver or DEFAULT_SOLVER).upper()
    if solver not in SUPPORTED_SOLVERS:
        raise ValidationError(f"Unsupported solver: {solver}", details=f"choose one of {', '.join(SUPPORTED_SOLVERS)}")
    if solver not in cp.installed_solvers():
        raise SolverError(f"Solver {solver} is not installed")
    return solver


def _solve(problem: cp.Problem, solver: str, label: str) -> None:
    try:
        problem.solve(solver=solver, **SOLVER_OPTIONS.get(solver, {}))
    except cp.SolverError as e:
        raise SolverError(f"{label} failed in {solver}", details=str(e))
    logger.debug(f"{label}: status={problem.status} value={problem.value}")
    if problem.status not in (cp.OPTIMAL, cp.OPTIMAL_INACCURATE):
        raise SolverError(f"{label} finished with status {problem.status}")


def _scaled_value(payoff: float, baseline: float, mode: IncentiveMode) -> float:
    if mode is IncentiveMode.ADDITIVE:
        return payoff - baseline
    return payoff / baseline


def _check_gap(result: IncentiveResult, tolerance: float, label: str) -> IncentiveResult:
    scale = max(1.0, abs(result.dual_bound))
    if result.gap > tolerance * scale:
        raise ConvergenceError(
            f"{label} gap {result.gap:.3e} exceeds tolerance {tolerance * scale:.3e}",
            gap=result.gap,
            result=result,
        )
    return result


# POVM program on |psi(P)> for (A, J) games


def _as_matrix(a: np.ndarray, what: str) -> np.ndarray:
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ShapeMismatchError(f"{what} must be a matrix, got shape {a.shape}")
    return a


def _objective_matrices(a: np.ndarray, p: np.ndarray) -> List[np.ndarray]:
    """M_i = sum_j a_ij |sqrt p_j><sqrt p_j|, where |sqrt p_j> is column j of sqrt(P)."""
    root = np.sqrt(p)
    matrices = []
    for i in range(a.shape[0]):
        m = (root * a[i]) @ root.T
        matrices.append((m + m.T) / 2)
    return matrices


def _checked_pair(a: np.ndarray, p: Union[np.ndarray, JointDistribution]) -> Tuple[np.ndarray, np.ndarray]:
    a = _as_matrix(a, "Payoff A")
    p = p.as_matrix() if isinstance(p, JointDistribution) else JointDistribution(_as_matrix(p, "P")).as_matrix()
    if a.shape != p.shape:
        raise ShapeMismatchError(f"Payoff shape {a.shape} does not match distribution shape {p.shape}")
    return a, p


def _require_correlated(a: np.ndarray, p: np.ndarray, tol: float) -> None:
    game = Game.bimatrix(a, np.ones_like(a))
    verdict = game_core.check_correlated(game, JointDistribution(p), tol=tol)
    if verdict:
        return
    report = max(verdict.reports, key=lambda r: r.worst_violation)
    s, t = report.worst_pair
    raise NotEquilibriumError(
        f"P is not a correlated equilibrium of (A, J): player {report.player} gains "
        f"{report.worst_violation:.3e} by playing {t} when {s} is recommended",
        player=report.player,
        recommendation=s,
        deviation=t,
        violation=report.worst_violation,
    )


def _baseline(a: np.ndarray, p: np.ndarray, mode: IncentiveMode) -> float:
    baseline = float(np.sum(a * p))
    if mode is IncentiveMode.MULTIPLICATIVE and baseline <= 0.0:
        raise ValidationError("Multiplicative incentive needs a positive baseline payoff")
    return baseline


def dual_check(
    a: np.ndarray,
    p: Union[np.ndarray, JointDistribution],
    y: np.ndarray,
    mode: ModeLike = IncentiveMode.ADDITIVE,
) -> DualCertificate:
    """Evaluate a candidate dual point Y.

    Residuals are lambda_min(Y - M_i); any Y with all residuals >= 0 bounds
    the value of every POVM from above.
    """
    mode = IncentiveMode.parse(mode)
    a, p = _checked_pair(a, p)
    y = np.asarray(y)
    n = a.shape[0]
    if y.shape != (n, n):
        raise ShapeMismatchError(f"Dual matrix must be {n}x{n}, got {y.shape}")
    if not matkit.is_hermitian(y):
        raise ValidationError("Dual matrix must be Hermitian")
    y = matkit.hermitian_part(y)
    baseline = _baseline(a, p, mode)
    residuals = tuple(matkit.min_eigenvalue(y - m) for m in _objective_matrices(a, p))
    bound = _scaled_value(float(np.trace(y).real), baseline, mode)
    return DualCertificate(matrix=y, bound_value=bound, feasibility_residuals=residuals, mode=mode, baseline=baseline)


def povm_objective(
    a: np.ndarray,
    p: Union[np.ndarray, JointDistribution],
    povm: Povm,
    mode: ModeLike = IncentiveMode.ADDITIVE,
) -> float:
    """Objective sum a_ij (<sqrt p_j|E_i|sqrt p_j> - p_ij), or the ratio in multiplicative mode."""
    mode = IncentiveMode.parse(mode)
    a, p = _checked_pair(a, p)
    if len(povm) != a.shape[0] or povm.dimension != a.shape[0]:
        raise ShapeMismatchError(f"POVM with {len(povm)} elements of size {povm.dimension} does not fit A {a.shape}")
    payoff = sum(float(np.trace(m @ e).real) for m, e in zip(_objective_matrices(a, p), povm.elements))
    return _scaled_value(payoff, _baseline(a, p, mode), mode)


def measurement_channel(povm: Povm, player: int = 0) -> LocalChannel:
    """Measure-and-announce channel rho -> sum_i tr(E_i rho)|i><i|."""
    n = len(povm)
    ops = []
    for i, element in enumerate(povm.elements):
        root = matkit.psd_sqrt(element)
        for j in range(povm.dimension):
            k = np.zeros((n, povm.dimension), dtype=np.complex128)
            k[i] = root[j]
            ops.append(k)
    return LocalChannel(player, tuple(ops))


def _repair_povm(elements: Sequence[np.ndarray]) -> Povm:
    clipped = [matkit.clip_psd(matkit.hermitian_part(e)) for e in elements]
    correction = matkit.inverse_sqrt(sum(clipped))
    return Povm(tuple(matkit.hermitian_part(correction @ e @ correction) for e in clipped))


def _dominating_shift(y: np.ndarray, matrices: Sequence[np.ndarray]) -> np.ndarray:
    shift = max(0.0, max(-matkit.min_eigenvalue(y - m) for m in matrices))
    if shift > 0.0:
        logger.debug(f"Dual point shifted by {shift:.3e} to dominate every M_i")
    return y + shift * np.eye(y.shape[0])


def max_povm_incentive(
    a: np.ndarray,
    p: Union[np.ndarray, JointDistribution],
    mode: ModeLike = IncentiveMode.ADDITIVE,
    solver: Optional[str] = None,
    gap_tolerance: float = DEFAULT_POVM_GAP_TOLERANCE,
    ce_tolerance: float = DEFAULT_CE_PRECHECK_TOLERANCE,
    require_normalized: bool = False,
) -> IncentiveResult:
    """Maximum quantum incentive of player 1 on |psi(P)> in the game (A, J).

    P must be a correlated equilibrium of (A, J) within ce_tolerance. The
    returned POVM and dual matrix certify the value within
    gap_tolerance * max(1, |dual bound|).
    """
    mode = IncentiveMode.parse(mode)
    a, p = _checked_pair(a, p)
    if require_normalized and (a.min() < 0.0 or a.max() > 1.0):
        raise ValidationError("Normalized payoff entries must lie in [0, 1]")
    _require_correlated(a, p, ce_tolerance)
    baseline = _baseline(a, p, mode)
    solver = _check_solver(solver)
    matrices = _objective_matrices(a, p)
    n = a.shape[0]

    elements = [cp.Variable((n, n), symmetric=True) for _ in range(n)]
    primal = cp.Problem(
        cp.Maximize(sum(cp.trace(m @ e) for m, e in zip(matrices, elements))),
        [e >> 0 for e in elements] + [sum(elements[1:], elements[0]) == np.eye(n)],
    )
    _solve(primal, solver, "POVM primal")

    y = cp.Variable((n, n), symmetric=True)
    dual = cp.Problem(cp.Minimize(cp.trace(y)), [y - m >> 0 for m in matrices])
    _solve(dual, solver, "POVM dual")

    povm = _repair_povm([e.value for e in elements])
    certificate = dual_check(a, p, _dominating_shift(y.value, matrices), mode)
    new_payoff = sum(float(np.trace(m @ e).real) for m, e in zip(matrices, povm.elements))
    result = IncentiveResult(
        mode=mode,
        primal_value=_scaled_value(new_payoff, baseline, mode),
        primal_solution=povm,
        dual_bound=certificate.bound_value,
        baseline=baseline,
        new_payoff=new_payoff,
        player=0,
        certificate=certificate,
    )
    logger.debug(f"POVM incentive ({mode.value}): primal={result.primal_value:.10f} gap={result.gap:.3e}")
    return _check_gap(result, gap_tolerance, "POVM incentive")


def closed_form_2x2(mode: ModeLike = IncentiveMode.ADDITIVE) -> ClosedFormSolution:
    """Exact optimum of the 2x2 game (I, J) over CE matrices and POVMs."""
    mode = IncentiveMode.parse(mode)
    if mode is IncentiveMode.ADDITIVE:
        p = math.sqrt(2.0) / 4.0
        correlation = np.array([[p, p], [0.0, 1.0 - 2.0 * p]])
        off = math.sqrt(2.0 * p * (1.0 - 2.0 * p))
        first = np.array([[2.0 * p, -off], [-off, 1.0 - 2.0 * p]])
        dual_off = math.sqrt(p * (0.5 - p))
        dual = np.array([[0.5, dual_off], [dual_off, p]])
        value = (math.sqrt(2.0) - 1.0) / 2.0
    else:
        correlation = np.array([[0.4, 0.4], [0.0, 0.2]])
        off = math.sqrt(2.0) / 3.0
        first = np.array([[2.0 / 3.0, -off], [-off, 1.0 / 3.0]])
        dual_off = 2.0 * math.sqrt(2.0) / 15.0
        dual = np.array([[8.0 / 15.0, dual_off], [dual_off, 4.0 / 15.0]])
        value = 4.0 / 3.0
    povm = Povm((first, np.eye(2) - first))
    return ClosedFormSolution(mode=mode, value=value, correlation=correlation, povm=povm, dual=dual)


def non_concavity_witness() -> NonConcavityWitness:
    """Average of the additive optimum and its relabelled mirror.

    Relabelling both players' strategies maps the optimum (P, E) to another
    optimum (P', E'); the averaged pair has objective -(2p - 1)^2 < 0, while
    the averaged P alone is certified to admit no gain at all.
    """
    best = closed_form_2x2(IncentiveMode.ADDITIVE)
    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    mirrored = best.correlation[::-1, ::-1].copy()
    first, second = best.povm.elements
    mirrored_povm = Povm((swap @ second @ swap, swap @ first @ swap))
    averaged = (best.correlation + mirrored) / 2
    averaged_povm = Povm(tuple((e + f) / 2 for e, f in zip(best.povm.elements, mirrored_povm.elements)))
    identity = np.eye(2)
    objective = povm_objective(identity, averaged, averaged_povm, IncentiveMode.ADDITIVE)

    p = averaged[0, 1] * 2.0
    off = math.sqrt(p * (1.0 - p)) / 2.0
    y = np.array([[(1.0 - p) / 2.0, off], [off, (1.0 - p) / 2.0]])
    certificate = dual_check(identity, averaged, y, IncentiveMode.ADDITIVE)
    return NonConcavityWitness(
        first=best,
        mirrored_correlation=mirrored,
        mirrored_povm=mirrored_povm,
        averaged_objective=objective,
        averaged_correlation=averaged,
        averaged_certificate=certificate,
    )


# Channel program on an arbitrary state


@dataclass
class ChannelOptimum:
    """Best channel with its simulated payoff and the repaired dual point Z."""

    channel: LocalChannel
    payoff: float
    bound: float
    dual: np.ndarray
    residual: float


def _to_density(state: StateLike) -> DensityState:
    return state.density() if isinstance(state, PureState) else state


def _payoff_after(state: DensityState, channel: LocalChannel, payoff: np.ndarray) -> float:
    after = quantum_state.apply_local(state, channel)
    return float(quantum_state.measure_diag(after).flat @ payoff.reshape(-1))


def _choi_objective(rho: DensityState, player: int, payoff: np.ndarray) -> Tuple[np.ndarray, int, int]:
    """W with tr(W J) = payoff after the channel with Choi matrix J, indexed (input, output)."""
    d_in = rho.dims[player]
    d_out = payoff.shape[player]
    k = rho.players
    tensor = rho.matrix.reshape(list(rho.dims) * 2)
    moved = np.moveaxis(tensor, [player, k + player], [0, k])
    others = int(np.prod([n for i, n in enumerate(rho.dims) if i != player]))
    blocks = moved.reshape(d_in, others, d_in, others)
    u = np.moveaxis(payoff, player, 0).reshape(d_out, others)
    c = np.einsum("xr,arbr->xab", u, blocks)
    w = np.zeros((d_in, d_out, d_in, d_out), dtype=np.complex128)
    for x in range(d_out):
        w[:, x, :, x] = c[x].T
    size = d_in * d_out
    return matkit.hermitian_part(w.reshape(size, size)), d_in, d_out


def optimize_local_channel(
    state: StateLike,
    player: int,
    payoff: np.ndarray,
    solver: Optional[str] = None,
    max_local_dimension: int = MAX_LOCAL_DIMENSION,
) -> ChannelOptimum:
    """Best CPTP map on player's register for the payoff tensor.

    payoff has the state's shape except on the player's axis, whose length is
    the channel's output dimension.
    """
    rho = _to_density(state)
    if not 0 <= player < rho.players:
        raise ValidationError(f"Player index {player} out of range for {rho.players} players")
    payoff = np.asarray(payoff, dtype=np.float64)
    expected = tuple(n for i, n in enumerate(rho.dims) if i != player)
    if payoff.ndim != rho.players or tuple(n for i, n in enumerate(payoff.shape) if i != player) != expected:
        raise ShapeMismatchError(f"Payoff shape {payoff.shape} does not match state dims {rho.dims}")
    for dim in (rho.dims[player], payoff.shape[player]):
        if dim > max_local_dimension:
            raise CapacityError(f"Local dimension {dim} exceeds cap {max_local_dimension}")
    w, d_in, d_out = _choi_objective(rho, player, payoff)
    size = d_in * d_out
    solver = _check_solver(solver)
    if size > MAX_INTERIOR_POINT_CHOI_DIMENSION and solver != LARGE_PROGRAM_SOLVER:
        logger.debug(f"Choi dimension {size} above {MAX_INTERIOR_POINT_CHOI_DIMENSION}, using {LARGE_PROGRAM_SOLVER}")
        solver = _check_solver(LARGE_PROGRAM_SOLVER)
    complex_data = bool(np.max(np.abs(w.imag)) > 0.0)
    data = w if complex_data else w.real
    # cp.real only canonicalizes expressions with complex leaves
    as_real = cp.real if complex_data else (lambda expr: expr)
    kind = {"hermitian": True} if complex_data else {"symmetric": True}

    choi = cp.Variable((size, size), **kind)
    primal = cp.Problem(
        cp.Maximize(as_real(cp.trace(data @ choi))),
        [choi >> 0, cp.partial_trace(choi, [d_in, d_out], axis=1) == np.eye(d_in)],
    )
    _solve(primal, solver, "Channel primal")

    # dual in (output, input) order so the constant factor leads the Kronecker product
    swapped = data.reshape(d_in, d_out, d_in, d_out).transpose(1, 0, 3, 2).reshape(size, size)
    z = cp.Variable((d_in, d_in), **kind)
    slack = cp.Variable((size, size), **kind)
    dual = cp.Problem(
        cp.Minimize(as_real(cp.trace(z))),
        [slack >> 0, slack == cp.kron(np.eye(d_out), z) - swapped],
    )
    _solve(dual, solver, "Channel dual")

    j = matkit.clip_psd(matkit.hermitian_part(np.asarray(choi.value)))
    correction = np.kron(matkit.inverse_sqrt(matkit.partial_trace(j, (d_in, d_out), [0])), np.eye(d_out))
    j = matkit.hermitian_part(correction @ j @ correction)
    channel = LocalChannel.from_choi(player, j, d_in, d_out)

    z_value = matkit.hermitian_part(np.asarray(z.value))
    residual = matkit.min_eigenvalue(np.kron(z_value, np.eye(d_out)) - w)
    if residual < 0.0:
        logger.debug(f"Channel dual shifted by {-residual:.3e}")
        z_value = z_value - residual * np.eye(d_in)
        residual = matkit.min_eigenvalue(np.kron(z_value, np.eye(d_out)) - w)
    return ChannelOptimum(
        channel=channel,
        payoff=_payoff_after(rho, channel, payoff),
        bound=float(np.trace(z_value).real),
        dual=z_value,
        residual=residual,
    )


def channel_incentive(
    state: StateLike,
    player: int,
    payoff: np.ndarray,
    baseline: float,
    mode: ModeLike = IncentiveMode.ADDITIVE,
    solver: Optional[str] = None,
    gap_tolerance: float = DEFAULT_CHANNEL_GAP_TOLERANCE,
    max_local_dimension: int = MAX_LOCAL_DIMENSION,
) -> IncentiveResult:
    """Incentive of the best channel on player's register against a given honest payoff."""
    mode = IncentiveMode.parse(mode)
    if mode is IncentiveMode.MULTIPLICATIVE and baseline <= 0.0:
        raise ValidationError("Multiplicative incentive needs a positive baseline payoff")
    optimum = optimize_local_channel(state, player, payoff, solver, max_local_dimension)
    certificate = DualCertificate(
        matrix=optimum.dual,
        bound_value=_scaled_value(optimum.bound, baseline, mode),
        feasibility_residuals=(optimum.residual,),
        mode=mode,
        baseline=baseline,
    )
    result = IncentiveResult(
        mode=mode,
        primal_value=_scaled_value(optimum.payoff, baseline, mode),
        primal_solution=optimum.channel,
        dual_bound=certificate.bound_value,
        baseline=baseline,
        new_payoff=optimum.payoff,
        player=player,
        certificate=certificate,
    )
    logger.debug(f"Channel incentive of player {player}: primal={result.primal_value:.10f} gap={result.gap:.3e}")
    return _check_gap(result, gap_tolerance, "Channel incentive")


def max_channel_incentive(
    g: Game,
    state: StateLike,
    player: int,
    mode: ModeLike = IncentiveMode.ADDITIVE,
    solver: Optional[str] = None,
    gap_tolerance: float = DEFAULT_CHANNEL_GAP_TOLERANCE,
    max_local_dimension: int = MAX_LOCAL_DIMENSION,
) -> IncentiveResult:
    """Largest gain of player over all local CPTP maps, certified by a Choi dual."""
    g.check_player(player)
    rho = _to_density(state)
    if tuple(rho.dims) != g.strategy_counts:
        raise ShapeMismatchError(f"State dims {rho.dims} do not match strategy counts {g.strategy_counts}")
    baseline = float(quantum_state.quantum_utility(g, rho)[player])
    return channel_incentive(
        rho, player, g.payoff(player), baseline, mode, solver, gap_tolerance, max_local_dimension
    )


def is_qce(
    g: Game,
    state: StateLike,
    tol: float = DEFAULT_TOLERANCE,
    solver: Optional[str] = None,
    gap_tolerance: float = DEFAULT_CHANNEL_GAP_TOLERANCE,
    max_local_dimension: int = MAX_LOCAL_DIMENSION,
) -> QceVerdict:
    """Quantum correlated equilibrium check: no player gains more than tol by any local channel."""
    if tol < 0.0:
        raise ValidationError("Tolerance must be nonnegative")
    results = [
        max_channel_incentive(g, state, player, IncentiveMode.ADDITIVE, solver, gap_tolerance, max_local_dimension)
        for player in range(g.players)
    ]
    verdict = all(r.dual_bound <= tol for r in results)
    logger.info(f"Quantum correlated equilibrium: {verdict} (max incentive {max(r.dual_bound for r in results):.3e})")
    return QceVerdict(is_equilibrium=verdict, results=results, tolerance=tol)


def _is_product(state: StateLike) -> bool:
    if isinstance(state, PureState):
        for player, dim in enumerate(state.dims):
            moved = np.moveaxis(state.tensor(), player, 0).reshape(dim, -1)
            if matkit.schmidt(moved.reshape(-1), dim, moved.shape[1]).rank != 1:
                return False
        return True
    product = np.ones((1, 1), dtype=np.complex128)
    for player in range(state.players):
        product = np.kron(product, state.reduced([player]))
    return bool(np.max(np.abs(product - state.matrix)) <= PSD_TOLERANCE)


def is_qne(
    g: Game,
    state: StateLike,
    tol: float = DEFAULT_TOLERANCE,
    solver: Optional[str] = None,
    gap_tolerance: float = DEFAULT_CHANNEL_GAP_TOLERANCE,
    max_local_dimension: int = MAX_LOCAL_DIMENSION,
) -> QceVerdict:
    """Quantum Nash check; the state must be a product over the players."""
    if not _is_product(state):
        raise ValidationError("Quantum Nash check needs a product state")
    return is_qce(g, state, tol, solver, gap_tolerance, max_local_dimension)


def general_mapping_bound(g: Game, player: int) -> Tuple[float, float]:
    """Caps (1 - eps, 1 / eps) on any quantum incentive over a classical CE,
    with eps = max(1/|S_i|, 1/|S_-i|).
    """
    if not g.normalized:
        raise ValidationError("Incentive caps need a normalized game")
    g.check_player(player)
    eps = max(1.0 / g.strategy_counts[player], 1.0 / g.opponents_size(player))
    return 1.0 - eps, 1.0 / eps
