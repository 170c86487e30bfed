"""
Correlation complexity: size, rank and nonnegative-rank bounds, executable
classical and quantum generation protocols, separation instances and the
untrusted-model equilibrium check.

Nonnegative rank is only ever reported as a pair of bounds. Upper bounds come
from a seeded factorization search that succeeds only on an exact
(max-entry residual <= 1e-8) factorization; lower bounds are the rank and,
up to 8 x 8, the exact biclique cover number of the support.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp, nnls

from ..constants import (
    CONJECTURE_MAX_RESAMPLES,
    DEFAULT_ANLS_ITERATIONS,
    DEFAULT_CE_PRECHECK_TOLERANCE,
    DEFAULT_CHANNEL_GAP_TOLERANCE,
    DEFAULT_MU_ITERATIONS,
    DEFAULT_NN_RESTARTS,
    DEFAULT_SEED,
    DEFAULT_TOLERANCE,
    EXACT_FACTORIZATION_TOLERANCE,
    MAX_BICLIQUE_DIMENSION,
    MAX_HJMR_BITS,
    MAX_LOCAL_DIMENSION,
    PROTOCOL_MATCH_TOLERANCE,
    SEPARATION_COLUMNS,
    SUPPORT_THRESHOLD,
)
from ..exceptions import CapacityError, ProtocolMismatchError, ShapeMismatchError, SolverError, ValidationError
from ..models.correlation import (
    ClassicalProtocol,
    ConjectureSample,
    CorrelationMatrix,
    EuclideanInstance,
    HjmrInstance,
    NonnegFactorization,
    NonnegRankBound,
    QuantumProtocol,
    UntrustedVerdict,
)
from ..models.game import Game, JointDistribution
from . import constructions, deviation, game_core, matkit, quantum_state

logger = logging.getLogger(__name__)

Protocol = Union[QuantumProtocol, ClassicalProtocol]

_TINY = 1e-300


def _nonnegative(value) -> np.ndarray:
    if isinstance(value, CorrelationMatrix):
        return value.probabilities
    if isinstance(value, JointDistribution):
        return value.as_matrix()
    m = np.atleast_2d(np.asarray(value, dtype=np.float64))
    if m.ndim != 2:
        raise ShapeMismatchError(f"Expected a matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)) or np.any(m < 0.0):
        raise ValidationError("Matrix entries must be finite and nonnegative")
    return m


def size_of(p) -> float:
    """(ceil log2 |X| + ceil log2 |Y|) / 2."""
    rows, cols = CorrelationMatrix.coerce(p).shape
    return (math.ceil(math.log2(rows)) + math.ceil(math.log2(cols))) / 2.0


def rank_lb_qcorr(p) -> float:
    """Lower bound (1/4) log2 rank(P) on the quantum seed size."""
    return 0.25 * math.log2(matkit.numerical_rank(CorrelationMatrix.coerce(p).probabilities))


def mutual_information(p) -> float:
    """I(X; Y) in bits, with 0 log 0 = 0."""
    probabilities = CorrelationMatrix.coerce(p).probabilities
    rows = probabilities.sum(axis=1)
    cols = probabilities.sum(axis=0)
    mask = probabilities > 0.0
    expected = np.outer(rows, cols)[mask]
    return float(max(np.sum(probabilities[mask] * np.log2(probabilities[mask] / expected)), 0.0))


# Quantum protocol


def run_protocol(protocol: Protocol) -> np.ndarray:
    """Honest output distribution: enumeration for classical seeds, state simulation for quantum ones."""
    if isinstance(protocol, ClassicalProtocol):
        return protocol.distribution()
    state = protocol.seed_state()
    for channel in protocol.channels():
        state = quantum_state.apply_local(state, channel)
    return quantum_state.measure_diag(state).as_matrix()


def _verify_protocol(protocol: Protocol, target: np.ndarray, tolerance: float) -> np.ndarray:
    output = run_protocol(protocol)
    if output.shape != target.shape:
        raise ProtocolMismatchError(f"Protocol outputs shape {output.shape}, target is {target.shape}")
    error = float(np.max(np.abs(output - target)))
    if error > tolerance:
        raise ProtocolMismatchError(
            f"Protocol output differs from target by {error:.3e}", details=f"tolerance {tolerance:.1e}"
        )
    return output


def qcorr_ub_protocol(q: np.ndarray) -> QuantumProtocol:
    """Protocol generating |Q(x, y)|^2 from the Schmidt form of Q.

    Q is rescaled to unit Frobenius norm. The seed has one level per nonzero
    singular value, so it takes ceil(log2 rank Q) qubits per side.
    """
    q = np.atleast_2d(np.asarray(q))
    if q.ndim != 2:
        raise ShapeMismatchError(f"Amplitude matrix must be 2-d, got shape {q.shape}")
    norm = float(np.linalg.norm(q))
    if norm == 0.0:
        raise ValidationError("Amplitude matrix must be nonzero")
    q = q / norm
    form = matkit.schmidt(q.reshape(-1), *q.shape)
    coefficients = form.coefficients / np.linalg.norm(form.coefficients)
    protocol = QuantumProtocol(coefficients, form.left_basis, form.right_basis)
    _verify_protocol(protocol, np.abs(q) ** 2, 1e-10)
    logger.debug(f"Quantum protocol: Schmidt rank {form.rank}, {protocol.seed_qubits} qubit(s) per side")
    return protocol


# Nonnegative factorizations


def normal_form(f: NonnegFactorization) -> NonnegFactorization:
    """Move the l1 norms of C's columns into D.

    The product is unchanged and column j of D sums to column j of C D, so D
    is column-stochastic exactly when the product is.
    """
    weights = f.left.sum(axis=0)
    safe = np.where(weights > 0.0, weights, 1.0)
    left = f.left / safe
    right = f.right * weights[:, None]
    sums = right.sum(axis=0)
    stochastic = bool(np.max(np.abs(sums - 1.0), initial=0.0) <= 1e-10)
    return NonnegFactorization(left=left, right=right, residual=f.residual, normal_form=stochastic)


def _residual(m: np.ndarray, c: np.ndarray, d: np.ndarray) -> float:
    return float(np.max(np.abs(m - c @ d)))


def _trivial_factorization(m: np.ndarray, r: int) -> Tuple[np.ndarray, np.ndarray]:
    rows, cols = m.shape
    if rows <= cols:
        c = np.zeros((rows, r))
        c[:, :rows] = np.eye(rows)
        d = np.zeros((r, cols))
        d[:rows] = m
    else:
        c = np.zeros((rows, r))
        c[:, :cols] = m
        d = np.zeros((r, cols))
        d[:cols] = np.eye(cols)
    return c, d


def _multiplicative_updates(m: np.ndarray, c: np.ndarray, d: np.ndarray, iterations: int):
    for _ in range(iterations):
        d *= (c.T @ m) / (c.T @ c @ d + _TINY)
        c *= (m @ d.T) / (c @ d @ d.T + _TINY)
    return c, d


def _alternating_nnls(m: np.ndarray, c: np.ndarray, d: np.ndarray, iterations: int):
    best = math.inf
    stalled = 0
    residual = _residual(m, c, d)
    for _ in range(iterations):
        d = np.column_stack([nnls(c, m[:, j])[0] for j in range(m.shape[1])])
        c = np.vstack([nnls(d.T, m[i, :])[0] for i in range(m.shape[0])])
        residual = _residual(m, c, d)
        if residual <= EXACT_FACTORIZATION_TOLERANCE:
            break
        if residual < best * (1.0 - 1e-6):
            best, stalled = residual, 0
        else:
            stalled += 1
            if stalled >= 25:
                break
    return c, d, residual


def nn_rank_upper(
    p,
    r: int,
    restarts: int = DEFAULT_NN_RESTARTS,
    seed: int = DEFAULT_SEED,
    mu_iterations: int = DEFAULT_MU_ITERATIONS,
    anls_iterations: int = DEFAULT_ANLS_ITERATIONS,
) -> Optional[NonnegFactorization]:
    """Exact rank-r nonnegative factorization in normal form, or None when the search fails.

    r >= min(m, n) and r = 1 are settled directly; otherwise each restart runs
    multiplicative updates from a seeded random start and polishes with
    alternating nonnegative least squares.
    """
    if r < 1:
        raise ValidationError("Inner dimension r must be at least 1")
    m = _nonnegative(p)
    rows, cols = m.shape
    if r >= min(rows, cols):
        c, d = _trivial_factorization(m, r)
        return normal_form(NonnegFactorization(c, d, residual=_residual(m, c, d)))
    if r == 1:
        total = m.sum()
        c = m.sum(axis=1, keepdims=True)
        d = m.sum(axis=0, keepdims=True) / total if total > 0.0 else np.zeros((1, cols))
        residual = _residual(m, c, d)
        if residual > EXACT_FACTORIZATION_TOLERANCE:
            return None
        return normal_form(NonnegFactorization(c, d, residual=residual))

    rng = np.random.default_rng(seed)
    scale = math.sqrt(max(float(m.mean()), _TINY) / r)
    best = math.inf
    for attempt in range(restarts):
        c = rng.random((rows, r)) * scale + _TINY
        d = rng.random((r, cols)) * scale + _TINY
        c, d = _multiplicative_updates(m, c, d, mu_iterations)
        c, d, residual = _alternating_nnls(m, c, d, anls_iterations)
        best = min(best, residual)
        if residual <= EXACT_FACTORIZATION_TOLERANCE:
            logger.debug(f"Rank-{r} factorization found on restart {attempt} (residual {residual:.2e})")
            return normal_form(NonnegFactorization(c, d, residual=residual))
    logger.debug(f"No exact rank-{r} factorization in {restarts} restarts (best residual {best:.2e})")
    return None


def _maximal_rectangles(support: np.ndarray) -> List[Tuple[Tuple[int, ...], Tuple[int, ...]]]:
    rows = support.shape[0]
    found = set()
    for mask in range(1, 1 << rows):
        chosen = [i for i in range(rows) if mask >> i & 1]
        cols = np.all(support[chosen], axis=0)
        if not cols.any():
            continue
        closure = np.all(support[:, cols], axis=1)
        found.add((tuple(np.flatnonzero(closure).tolist()), tuple(np.flatnonzero(cols).tolist())))
    return sorted(found)


def biclique_cover_number(support: np.ndarray) -> int:
    """Fewest all-ones rectangles covering the support, by exact set cover over maximal rectangles."""
    support = np.asarray(support, dtype=bool)
    if support.shape[0] > support.shape[1]:
        support = support.T
    if max(support.shape) > MAX_BICLIQUE_DIMENSION:
        raise CapacityError(f"Exact biclique cover is limited to {MAX_BICLIQUE_DIMENSION}x{MAX_BICLIQUE_DIMENSION}")
    cells = list(zip(*np.nonzero(support)))
    if not cells:
        return 0
    rectangles = _maximal_rectangles(support)
    index = {cell: k for k, cell in enumerate(cells)}
    cover = np.zeros((len(cells), len(rectangles)))
    for j, (rows, cols) in enumerate(rectangles):
        for i in rows:
            for k in cols:
                cover[index[(i, k)], j] = 1.0
    result = milp(
        c=np.ones(len(rectangles)),
        constraints=LinearConstraint(cover, lb=1.0, ub=np.inf),
        integrality=np.ones(len(rectangles)),
        bounds=Bounds(0.0, 1.0),
    )
    if not result.success:
        raise SolverError("Biclique cover program failed", details=result.message)
    return int(round(result.fun))


def nn_rank_lower(p) -> NonnegRankBound:
    """max(rank, biclique cover number of the support); the cover is skipped above 8 x 8."""
    m = _nonnegative(p)
    rank = matkit.numerical_rank(m)
    support = m > SUPPORT_THRESHOLD
    if max(m.shape) > MAX_BICLIQUE_DIMENSION:
        logger.debug(f"Support {m.shape} too large for exact biclique cover, using rank only")
        return NonnegRankBound(value=rank, certificate="rank", rank=rank)
    cover = biclique_cover_number(support)
    if cover >= rank:
        return NonnegRankBound(value=cover, certificate="biclique", rank=rank, biclique_cover=cover)
    return NonnegRankBound(value=rank, certificate="rank", rank=rank, biclique_cover=cover)


def classical_protocol_from(f: NonnegFactorization) -> ClassicalProtocol:
    """Seed k ~ q with local samplers a_k, b_k such that C D = sum_k q_k a_k b_k^T.

    Components with zero weight are dropped; the result is checked by
    enumeration against C D.
    """
    if not f.certified:
        raise ValidationError("Classical protocol needs a certified exact factorization")
    product = f.product()
    total = float(product.sum())
    if total <= 0.0:
        raise ValidationError("Factorization product has no mass")
    column_mass = f.left.sum(axis=0)
    row_mass = f.right.sum(axis=1)
    weights = column_mass * row_mass
    keep = weights > 0.0
    seed = weights[keep] / total
    rows = (f.left[:, keep] / column_mass[keep]).T
    cols = f.right[keep] / row_mass[keep, None]
    protocol = ClassicalProtocol(seed=seed / seed.sum(), row_samplers=rows, col_samplers=cols)
    _verify_protocol(protocol, product / total, 1e-10)
    return protocol


# Instances


def euclidean_instance(points: Sequence[float]) -> EuclideanInstance:
    """Q(x, y) = c_x - c_y, a rank-2 amplitude matrix whose square P has zero diagonal."""
    cs = np.asarray(points, dtype=np.float64)
    if cs.ndim != 1 or cs.size < 2:
        raise ValidationError("Need at least two points")
    if np.any(cs <= 0.0):
        raise ValidationError("Points must be positive")
    if np.unique(cs).size != cs.size:
        raise ValidationError("Points must be distinct")
    q = cs[:, None] - cs[None, :]
    squared = q * q
    correlation = CorrelationMatrix(squared / squared.sum())
    return EuclideanInstance(
        points=tuple(float(c) for c in cs),
        amplitudes=q,
        correlation=correlation,
        cited_lower_bound=math.log2(cs.size),
    )


def _popcount(values: np.ndarray, bits: int) -> np.ndarray:
    count = np.zeros_like(values)
    for b in range(bits):
        count += (values >> b) & 1
    return count


def hjmr_distribution(n: int) -> HjmrInstance:
    """p(x, y) = |{i: x_i = y_i}|/n * 2^(1-2n) on n-bit strings; x_1 is the most significant bit."""
    if n < 1:
        raise ValidationError("Need at least one bit")
    if n > MAX_HJMR_BITS:
        raise CapacityError(f"{n} bits exceed cap {MAX_HJMR_BITS}")
    strings = np.arange(1 << n)
    agree = n - _popcount(strings[:, None] ^ strings[None, :], n)
    p = agree / n * 2.0 ** (1 - 2 * n)
    indices = tuple(((1 << k) - 1) << (n - k) for k in range(n + 1))
    return HjmrInstance(
        bits=n,
        correlation=CorrelationMatrix(p),
        indices=indices,
        submatrix=p[np.ix_(indices, indices)],
    )


def hjmr_factorization(instance: HjmrInstance) -> NonnegFactorization:
    """Exact rank-2n factorization: seed (i, b) uniform, each side outputs a string with bit i equal to b."""
    n = instance.bits
    strings = np.arange(1 << n)
    c = np.zeros((strings.size, 2 * n))
    for i in range(n):
        bit = (strings >> (n - 1 - i)) & 1
        c[:, 2 * i] = bit == 0
        c[:, 2 * i + 1] = bit == 1
    d = c.T * (2.0 ** (1 - 2 * n) / n)
    m = instance.correlation.probabilities
    return normal_form(NonnegFactorization(c, d, residual=_residual(m, c, d)))


def conjecture_sampler(
    n: int, r: int, seed: int = DEFAULT_SEED, max_resamples: int = CONJECTURE_MAX_RESAMPLES
) -> ConjectureSample:
    """Random Q = A B with sum_i <a_i|b_j> = 1 and <a_j|b_j> = 0 for every j.

    Rows a_i are uniform on the unit sphere of R^r; each b_j is the
    least-norm solution of its two linear constraints.
    """
    if r < 2:
        raise ValidationError("Inner dimension r must be at least 2")
    if n < 2:
        raise ValidationError("Need at least two rows")
    rng = np.random.default_rng(seed)
    for attempt in range(max_resamples + 1):
        a = rng.normal(size=(n, r))
        a /= np.linalg.norm(a, axis=1, keepdims=True)
        total = a.sum(axis=0)
        b = np.zeros((r, n))
        feasible = True
        for j in range(n):
            system = np.vstack([total, a[j]])
            rhs = np.array([1.0, 0.0])
            solution = np.linalg.lstsq(system, rhs, rcond=None)[0]
            if np.max(np.abs(system @ solution - rhs)) > 1e-10:
                feasible = False
                break
            b[:, j] = solution
        if feasible:
            break
        logger.debug(f"Conjecture sample {attempt} infeasible, resampling")
    else:
        raise ValidationError(f"No feasible sample after {max_resamples} resamples", details=f"n={n}, r={r}")
    q = a @ b
    squared = q * q
    return ConjectureSample(
        amplitudes=q,
        rows=a,
        columns=b,
        rank=matkit.numerical_rank(q),
        lower_bound=nn_rank_lower(squared / squared.sum()),
        diagonal_residual=float(np.max(np.abs(np.diag(q)))),
        column_sum_residual=float(np.max(np.abs(q.sum(axis=0) - 1.0))),
        resamples=attempt,
    )


# Untrusted model


def check_untrusted_equilibrium(
    g: Game,
    protocol: Protocol,
    target=None,
    tol: float = DEFAULT_TOLERANCE,
    solver: Optional[str] = None,
    gap_tolerance: float = DEFAULT_CHANNEL_GAP_TOLERANCE,
    max_local_dimension: int = MAX_LOCAL_DIMENSION,
) -> UntrustedVerdict:
    """Equilibrium check of a protocol whose local operations the players may replace.

    Each player in turn keeps the seed register while the other runs the
    prescribed operation, and the best channel from that register to a
    strategy is compared with the honest payoff.
    A target, when given, must be a correlated equilibrium of g that the
    honest protocol reproduces.
    """
    if g.players != 2:
        raise ValidationError("Untrusted protocols are defined for two players")
    honest = run_protocol(protocol)
    if honest.shape != g.strategy_counts:
        raise ShapeMismatchError(f"Protocol outputs shape {honest.shape}, game has {g.strategy_counts}")
    if target is not None:
        target = CorrelationMatrix.coerce(target).probabilities
        if target.shape != g.strategy_counts:
            raise ShapeMismatchError(f"Target shape {target.shape} does not match strategy counts {g.strategy_counts}")
        precheck = game_core.check_correlated(g, JointDistribution(target), DEFAULT_CE_PRECHECK_TOLERANCE)
        if not precheck:
            raise ValidationError(
                "Target is not a correlated equilibrium of the game",
                details=f"largest deviation gain {precheck.max_violation:.3e}",
            )
        _verify_protocol(protocol, target, PROTOCOL_MATCH_TOLERANCE)
    payoffs = game_core.expected_utility(g, JointDistribution.from_weights(np.clip(honest, 0.0, None)))
    seed = protocol.seed_state()
    channels = protocol.channels()
    results = []
    for player in range(2):
        partial = quantum_state.apply_local(seed, channels[1 - player])
        results.append(
            deviation.channel_incentive(
                partial,
                player,
                g.payoff(player),
                float(payoffs[player]),
                solver=solver,
                gap_tolerance=gap_tolerance,
                max_local_dimension=max_local_dimension,
            )
        )
    verdict = all(r.dual_bound <= tol for r in results)
    classical = isinstance(protocol, ClassicalProtocol)
    bounds = {"rcorr_lower_bits": float(math.ceil(math.log2(max(nn_rank_lower(honest).value, 1))))}
    logger.info(f"Untrusted protocol equilibrium: {verdict} (max incentive {max(r.dual_bound for r in results):.3e})")
    return UntrustedVerdict(
        is_equilibrium=verdict,
        honest_distribution=honest,
        results=results,
        seed_size=protocol.seed_bits if classical else protocol.seed_qubits,
        seed_kind="classical" if classical else "quantum",
        tolerance=tol,
        bounds=bounds,
    )


UNTRUSTED_PROTOCOL_KINDS = ("quantum", "classical", "broken")


def load_balancing_protocol(
    n: int, kind: str = "quantum", restarts: int = DEFAULT_NN_RESTARTS, seed: int = DEFAULT_SEED
) -> Tuple[Game, Protocol, Optional[np.ndarray]]:
    """Load balancing on n strategies with a protocol for its Euclidean-distance CE.

    "quantum" is the Schmidt protocol of Q(x, y) = x - y, "classical" samples
    from a smallest certified factorization, and "broken" shares a uniform
    seed that both players copy, so they always collide. Returns the game, the
    protocol and the target it must reproduce (None for "broken").
    """
    game = constructions.load_balancing(n).game
    if kind == "broken":
        samplers = np.eye(n)
        return game, ClassicalProtocol(np.full(n, 1.0 / n), samplers, samplers.copy()), None
    instance = euclidean_instance(range(1, n + 1))
    target = instance.correlation.probabilities
    if kind == "quantum":
        return game, qcorr_ub_protocol(instance.amplitudes), target
    if kind == "classical":
        _, factorization = smallest_factorization(target, nn_rank_lower(target).value, restarts, seed)
        if factorization.residual > PROTOCOL_MATCH_TOLERANCE:
            # searched factorizations are exact to 1e-8 only; the protocol must match to 1e-9
            factorization = nn_rank_upper(target, min(target.shape))
        return game, classical_protocol_from(factorization), target
    raise ValidationError(f"Unknown protocol kind: {kind}", details=f"choose one of {', '.join(UNTRUSTED_PROTOCOL_KINDS)}")


# Separation report


def _parse_instance(spec: str):
    """'ed:N', 'hjmr:n' or 'conj:n:r[:seed]' into (P, Q, known factorization, notes)."""
    parts = spec.strip().lower().split(":")
    try:
        numbers = [int(x) for x in parts[1:]]
    except ValueError:
        raise ValidationError(f"Bad instance spec: {spec}")
    kind = parts[0]
    if kind == "ed" and len(numbers) == 1:
        instance = euclidean_instance(range(1, numbers[0] + 1))
        note = (
            f"cited lower bound rank+ >= log2 N = {instance.cited_lower_bound:.4f} ({instance.citation}); "
            "1 vs log N separation is conditional on the cited bound"
        )
        return instance.correlation.probabilities, instance.amplitudes, None, [note]
    if kind == "hjmr" and len(numbers) == 1:
        instance = hjmr_distribution(numbers[0])
        sub_rank = matkit.numerical_rank(instance.submatrix)
        p = instance.correlation.probabilities
        return p, np.sqrt(p), hjmr_factorization(instance), [f"distinguished submatrix rank {sub_rank}"]
    if kind == "conj" and len(numbers) in (2, 3):
        sample = conjecture_sampler(numbers[0], numbers[1], numbers[2] if len(numbers) == 3 else DEFAULT_SEED)
        squared = sample.amplitudes ** 2
        return squared / squared.sum(), sample.amplitudes, None, ["conjecture experiment, no asserted value"]
    raise ValidationError(f"Bad instance spec: {spec}", details="use ed:N, hjmr:n or conj:n:r[:seed]")


def smallest_factorization(
    p,
    start: int,
    restarts: int = DEFAULT_NN_RESTARTS,
    seed: int = DEFAULT_SEED,
    known: Optional[NonnegFactorization] = None,
) -> Tuple[int, NonnegFactorization]:
    """First inner dimension from start upward with a certified factorization.

    The search stops below the inner dimension of a known certified
    factorization, or at min(m, n) where one always exists.
    """
    m = _nonnegative(p)
    limit = min(m.shape)
    if known is not None and known.certified:
        limit = min(limit, known.inner_dimension)
    for r in range(max(start, 1), limit):
        found = nn_rank_upper(m, r, restarts=restarts, seed=seed)
        if found is not None:
            return r, found
    if known is not None and known.certified and known.inner_dimension == limit:
        return limit, known
    return limit, nn_rank_upper(m, limit)


def separation_row(spec: str, restarts: int = DEFAULT_NN_RESTARTS, seed: int = DEFAULT_SEED) -> Dict[str, object]:
    p, q, known, notes = _parse_instance(spec)
    rank = matkit.numerical_rank(p)
    lower = nn_rank_lower(p)
    upper, _ = smallest_factorization(p, lower.value, restarts, seed, known)
    protocol = qcorr_ub_protocol(q)
    if lower.value == upper:
        notes.insert(0, f"rank+ = {upper}")
    else:
        notes.insert(0, f"rank+ in [{lower.value}, {upper}]")
    notes.insert(1, f"lower bound by {lower.certificate}")
    row = {
        "instance": spec,
        "size": size_of(p),
        "rank": rank,
        "rank-lb": rank_lb_qcorr(p),
        "nnr-lb": lower.value,
        "nnr-ub": upper,
        "qcorr-ub(qubits)": protocol.seed_qubits,
        "rcorr-lb(bits)": int(math.ceil(math.log2(lower.value))) if lower.value > 1 else 0,
        "notes": "; ".join(notes),
    }
    return {column: row[column] for column in SEPARATION_COLUMNS}


def separation_report(
    instances: Sequence[str], jobs: int = 1, restarts: int = DEFAULT_NN_RESTARTS, seed: int = DEFAULT_SEED
) -> List[Dict[str, object]]:
    """One row per instance, in input order; jobs > 1 computes rows concurrently."""
    if jobs <= 1:
        return [separation_row(spec, restarts, seed) for spec in instances]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(separation_row, spec, restarts, seed) for spec in instances]
        return [future.result() for future in futures]
