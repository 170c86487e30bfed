"""
Acceptance suite: recomputes every headline number of the toolkit and
reports pass/fail per check.

Each check is a function returning a CheckResult; run_all executes them in
order (or concurrently with jobs > 1) and keeps the numbering stable.
"""

import logging
import math
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np
from rich.table import Table

from ..constants import DEFAULT_SEED, DEFAULT_TOLERANCE
from ..exceptions import QEquilError
from ..models.correlation import NonnegFactorization
from ..models.incentive import IncentiveMode
from ..models.run import CheckResult, ReproductionReport
from . import constructions, corrcomp, deviation, game_core, matkit, quantum_state
from .workflow import quick_batch

logger = logging.getLogger(__name__)

EPSILON_DEPTHS = (4, 8, 12, 16)
CYCLIC_DEPTHS = (1, 2, 3)
FOURIER_SIZES = (2, 4, 8)
HJMR_RANGE = tuple(range(2, 9))
DEFAULT_SAMPLES = 500
DEFAULT_FACTORIZATIONS = 100


def _close(a: float, b: float, tol: float) -> bool:
    return abs(a - b) <= tol


def check_additive_optimum(**_) -> CheckResult:
    target = (math.sqrt(2.0) - 1.0) / 2.0
    best = deviation.closed_form_2x2(IncentiveMode.ADDITIVE)
    result = deviation.max_povm_incentive(np.eye(2), best.correlation, IncentiveMode.ADDITIVE)
    passed = (
        _close(result.primal_value, target, 1e-7)
        and _close(result.dual_bound, target, 1e-7)
        and result.certificate.feasible
    )
    return CheckResult(
        1,
        "2x2 additive optimum",
        passed,
        f"primal {result.primal_value:.10f}, dual {result.dual_bound:.10f}, target {target:.10f}",
        {"primal": result.primal_value, "dual": result.dual_bound, "target": target},
    )


def check_multiplicative_optimum(**_) -> CheckResult:
    best = deviation.closed_form_2x2(IncentiveMode.MULTIPLICATIVE)
    result = deviation.max_povm_incentive(np.eye(2), best.correlation, IncentiveMode.MULTIPLICATIVE)
    explicit = deviation.dual_check(np.eye(2), best.correlation, best.dual, IncentiveMode.MULTIPLICATIVE)
    passed = (
        _close(result.primal_value, 4.0 / 3.0, 1e-7)
        and _close(result.dual_bound, 4.0 / 3.0, 1e-7)
        and explicit.feasible
        and _close(explicit.bound_value, 4.0 / 3.0, 1e-9)
    )
    return CheckResult(
        2,
        "2x2 multiplicative optimum",
        passed,
        f"primal {result.primal_value:.10f}, explicit dual bound {explicit.bound_value:.10f}",
        {"primal": result.primal_value, "dual": result.dual_bound, "explicit_dual": explicit.bound_value},
    )


def check_non_concavity(**_) -> CheckResult:
    witness = deviation.non_concavity_witness()
    certificate = witness.averaged_certificate
    passed = witness.averaged_objective < 0.0 and certificate.feasible and abs(certificate.bound_value) <= 1e-9
    return CheckResult(
        3,
        "non-concavity witness",
        passed,
        f"averaged objective {witness.averaged_objective:.6f}, averaged-P bound {certificate.bound_value:.2e}",
        {"averaged_objective": witness.averaged_objective, "certificate_bound": certificate.bound_value},
    )


def check_epsilon_trend(**_) -> CheckResult:
    gains = []
    worst = 0.0
    for depth in EPSILON_DEPTHS:
        family = constructions.epsilon_additive_family(depth)
        simulated = constructions.simulate_family(family)
        worst = max(worst, abs(simulated.gain - family.spec.predicted_gain))
        gains.append(simulated.gain)
    increasing = all(b > a for a, b in zip(gains, gains[1:]))
    passed = worst <= 1e-9 and increasing and gains[-1] < 1.0
    return CheckResult(
        4,
        "additive family trend",
        passed,
        "gains " + ", ".join(f"d={d}: {g:.6f}" for d, g in zip(EPSILON_DEPTHS, gains)),
        {"gains": gains, "max_formula_error": worst},
    )


def check_cyclic_ratio(**_) -> CheckResult:
    ratios = []
    worst = 0.0
    for depth in CYCLIC_DEPTHS:
        family = constructions.cyclic_multiplicative_family(4, depth)
        ratio = constructions.simulate_family(family).ratio
        worst = max(worst, abs(ratio - 2.25 ** depth))
        ratios.append(ratio)
    exponent = constructions.cyclic_multiplicative_family(4, 1).spec.exponent
    exponent_error = abs(exponent - (math.log2(3.0) - 1.0))
    passed = worst <= 1e-9 and exponent_error <= 1e-9
    return CheckResult(
        5,
        "multiplicative family ratio",
        passed,
        f"ratios {', '.join(f'{r:.9f}' for r in ratios)}, exponent {exponent:.9f}",
        {"ratios": ratios, "exponent": exponent},
    )


def check_fourier(**_) -> CheckResult:
    rows = []
    passed = True
    for n in FOURIER_SIZES:
        instance = constructions.fourier_counterexample(n)
        nash = game_core.check_nash(instance.game, instance.factors, 1e-12)
        result = deviation.max_channel_incentive(instance.game, instance.state, 0)
        bound = deviation.general_mapping_bound(instance.game, 0)[0]
        ok = (
            nash.is_equilibrium
            and _close(result.new_payoff, 1.0, 1e-6)
            and _close(result.primal_value, 1.0 - 1.0 / n, 1e-6)
            and _close(result.primal_value, bound, 1e-6)
        )
        passed = passed and ok
        rows.append({"n": n, "incentive": result.primal_value, "bound": bound, "nash": nash.is_equilibrium})
    return CheckResult(
        6,
        "Fourier extremes",
        passed,
        ", ".join(f"n={r['n']}: {r['incentive']:.6f}" for r in rows),
        {"instances": rows},
    )


def check_mixture_and_swap(samples: int = DEFAULT_SAMPLES, seed: int = DEFAULT_SEED, **_) -> CheckResult:
    rng = np.random.default_rng(seed)
    qce_failures = 0
    for _ in range(samples):
        game, p = constructions.random_ce_instance(int(rng.integers(2, 4)), int(rng.integers(2, 4)), rng)
        if not deviation.is_qce(game, quantum_state.mixture_state(p), DEFAULT_TOLERANCE):
            qce_failures += 1
    worst = 0.0
    for _ in range(samples):
        game, p = constructions.random_non_ce_instance(int(rng.integers(2, 4)), int(rng.integers(2, 4)), rng)
        state = quantum_state.mixture_state(p)
        for player in range(2):
            gains = game_core.deviation_gains(game, p, player)
            for rec, dev in zip(*np.nonzero(~np.eye(gains.shape[0], dtype=bool))):
                channel = quantum_state.swap_deviation(player, int(rec), int(dev), p.shape)
                swapped = quantum_state.quantum_gain(game, state, channel)
                worst = max(worst, abs(swapped - gains[rec, dev]))
    passed = qce_failures == 0 and worst <= 1e-10
    return CheckResult(
        7,
        "mixture preserves CE, swap matches violation",
        passed,
        f"{samples} CEs with {qce_failures} failures, swap error {worst:.1e}",
        {"samples": samples, "qce_failures": qce_failures, "swap_error": worst},
    )


def check_ed_separation(**_) -> CheckResult:
    eight = corrcomp.euclidean_instance(range(1, 9))
    protocol = corrcomp.qcorr_ub_protocol(eight.amplitudes)
    error = float(np.max(np.abs(corrcomp.run_protocol(protocol) - eight.correlation.probabilities)))
    computed = corrcomp.nn_rank_lower(eight.correlation)
    rcorr_bits = max(math.ceil(eight.cited_lower_bound), math.ceil(math.log2(computed.value)))

    three = corrcomp.euclidean_instance(range(1, 4))
    lower = corrcomp.nn_rank_lower(three.correlation)
    upper, _ = corrcomp.smallest_factorization(three.correlation, lower.value)
    passed = protocol.seed_qubits == 1 and error <= 1e-10 and rcorr_bits >= 3 and lower.value == upper == 3
    return CheckResult(
        8,
        "correlation separation",
        passed,
        f"N=8: {protocol.seed_qubits} qubit, rcorr >= {rcorr_bits} bits (cited log2 N, computed rank+ >= "
        f"{computed.value}); N=3: rank+ in [{lower.value}, {upper}]",
        {"seed_qubits": protocol.seed_qubits, "protocol_error": error, "rcorr_bits": rcorr_bits, "n3_bounds": [lower.value, upper]},
    )


def check_factorization_protocols(
    samples: int = DEFAULT_FACTORIZATIONS, seed: int = DEFAULT_SEED, **_
) -> CheckResult:
    rng = np.random.default_rng(seed)
    worst = 0.0
    bits_ok = True
    for _ in range(samples):
        rows, cols, r = (int(x) for x in rng.integers(2, 7, size=3))
        c = rng.random((rows, r)) * (rng.random((rows, r)) > 0.3)
        d = rng.random((r, cols)) * (rng.random((r, cols)) > 0.3)
        c[:, rng.integers(r)] += 1.0
        d[rng.integers(r)] += 1.0
        total = float((c @ d).sum())
        f = corrcomp.normal_form(NonnegFactorization(c / total, d, residual=0.0))
        protocol = corrcomp.classical_protocol_from(f)
        worst = max(worst, float(np.max(np.abs(protocol.distribution() - f.product()))))
        bits_ok = bits_ok and protocol.seed_bits <= math.ceil(math.log2(r))
    passed = worst <= 1e-10 and bits_ok
    return CheckResult(
        9,
        "factorization protocols",
        passed,
        f"{samples} factorizations, max enumeration error {worst:.1e}",
        {"samples": samples, "max_error": worst},
    )


def check_hjmr(**_) -> CheckResult:
    instance = corrcomp.hjmr_distribution(4)
    sub_rank = matkit.numerical_rank(instance.submatrix)
    information = [corrcomp.mutual_information(corrcomp.hjmr_distribution(n).correlation) for n in HJMR_RANGE]
    decreasing = all(b < a for a, b in zip(information, information[1:]))
    return CheckResult(
        10,
        "HJMR rank and information",
        sub_rank == 5 and decreasing,
        f"submatrix rank {sub_rank}, I(p) " + ", ".join(f"{v:.4f}" for v in information),
        {"submatrix_rank": sub_rank, "mutual_information": information},
    )


def check_untrusted(seed: int = DEFAULT_SEED, **_) -> CheckResult:
    game, protocol, target = corrcomp.load_balancing_protocol(4, "quantum", seed=seed)
    honest = corrcomp.check_untrusted_equilibrium(game, protocol, target, tol=DEFAULT_TOLERANCE)
    game, broken, _ = corrcomp.load_balancing_protocol(4, "broken")
    control = corrcomp.check_untrusted_equilibrium(game, broken, None, tol=DEFAULT_TOLERANCE)
    return CheckResult(
        11,
        "untrusted load balancing",
        honest.is_equilibrium and not control.is_equilibrium,
        f"ED protocol incentive {honest.max_incentive:.1e}, broken control incentive {control.max_incentive:.3f}",
        {"honest_incentive": honest.max_incentive, "broken_incentive": control.max_incentive},
    )


CHECKS: List[Callable[..., CheckResult]] = [
    check_additive_optimum,
    check_multiplicative_optimum,
    check_non_concavity,
    check_epsilon_trend,
    check_cyclic_ratio,
    check_fourier,
    check_mixture_and_swap,
    check_ed_separation,
    check_factorization_protocols,
    check_hjmr,
    check_untrusted,
]


def _run_check(number: int, check: Callable[..., CheckResult], options: Dict) -> CheckResult:
    try:
        return check(**options)
    except QEquilError as e:
        logger.warning(f"Check {number} raised {type(e).__name__}: {e.message}")
        return CheckResult(number, check.__name__.removeprefix("check_"), False, f"{type(e).__name__}: {e.message}")


def run_all(
    seed: int = DEFAULT_SEED,
    samples: int = DEFAULT_SAMPLES,
    factorizations: int = DEFAULT_FACTORIZATIONS,
    only: Optional[Sequence[int]] = None,
    jobs: int = 1,
) -> ReproductionReport:
    """Run the selected checks (all by default); results are ordered by check number."""
    options = {"seed": seed, "samples": samples}
    selected = [(i + 1, check) for i, check in enumerate(CHECKS) if only is None or i + 1 in only]

    def run(item):
        number, check = item
        check_options = dict(options, samples=factorizations) if check is check_factorization_protocols else options
        return _run_check(number, check, check_options)

    checks = quick_batch(run, selected, "Acceptance checks", jobs)
    report = ReproductionReport(checks=checks, seed=seed)
    logger.info(f"Acceptance suite: {len(checks) - len(report.failures)}/{len(checks)} passed")
    return report


def report_table(report: ReproductionReport) -> Table:
    table = Table(title="Acceptance checks")
    table.add_column("#", justify="right")
    table.add_column("Check")
    table.add_column("Result")
    table.add_column("Detail", overflow="fold")
    for check in report.checks:
        table.add_row(
            str(check.number), check.name, "[green]PASS[/green]" if check.passed else "[red]FAIL[/red]", check.detail
        )
    return table


def report_rows(report: ReproductionReport) -> List[Dict[str, object]]:
    return [
        {"number": c.number, "name": c.name, "passed": c.passed, "detail": c.detail} for c in report.checks
    ]
