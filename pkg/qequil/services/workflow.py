"""
Workflow orchestration for the command-line front end.

Each execute_* method loads its inputs, runs one service operation and
returns a plain report mapping together with the verdict that decides the
exit code. Logging and step tracking follow the same pattern for every
command.
"""

import functools
import importlib
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, TypeVar

import numpy as np

from ..config.manager import ConfigManager
from ..exceptions import ValidationError
from ..models.incentive import IncentiveMode
from ..models.quantum import DensityState, PureState
from ..models.run import RunConfig
from ..utils.progress import ProgressContext, track
from . import constructions, corrcomp, deviation, game_core, quantum_state, serialization

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")

VERIFY_MODES = ("classical", "nash", "quantum")
EMBEDDINGS = ("mixture", "superposition")
FAMILIES = ("epsilon", "cyclic", "fourier", "load_balancing", "canonical")


class WorkflowLogger:
    """Configures the package logger for console and optional file output."""

    def __init__(self, verbose: bool = False, log_file: Optional[str] = None, level: str = "INFO"):
        """Initialize workflow logger.

        Args:
            verbose: Show debug records on the console
            log_file: Optional log file path for persistent logging
            level: Level of the package logger when not verbose
        """
        self.verbose = verbose
        self.logger = logging.getLogger("qequil")
        self.logger.setLevel(logging.DEBUG if verbose else getattr(logging, level.upper(), logging.INFO))
        self.logger.handlers.clear()

        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(logging.DEBUG if verbose else logging.WARNING)
        console_handler.setFormatter(logging.Formatter("[%(levelname)s] %(message)s"))
        self.logger.addHandler(console_handler)

        if log_file:
            try:
                directory = os.path.dirname(log_file)
                if directory:
                    os.makedirs(directory, exist_ok=True)
                file_handler = logging.FileHandler(log_file)
                file_handler.setLevel(logging.DEBUG)
                file_handler.setFormatter(
                    logging.Formatter("%(asctime)s - %(name)s - %(levelname)s - %(message)s")
                )
                self.logger.addHandler(file_handler)
            except OSError as e:
                self.logger.warning(f"Failed to setup file logging: {e}")

    def debug(self, message: str):
        self.logger.debug(message)

    def info(self, message: str):
        self.logger.info(message)

    def warning(self, message: str):
        self.logger.warning(message)

    def error(self, message: str):
        self.logger.error(message)


class WorkflowState:
    """Tracks workflow steps, failures and warnings of one command."""

    def __init__(self):
        self.start_time = datetime.now()
        self.current_step = "initialization"
        self.completed_steps: List[str] = []
        self.failed_steps: List[str] = []
        self.errors: List[Tuple[str, Exception]] = []
        self.warnings: List[Tuple[str, str]] = []

    def set_step(self, step_name: str):
        if self.current_step:
            self.completed_steps.append(self.current_step)
        self.current_step = step_name

    def mark_step_failed(self, step_name: str, error: Exception):
        self.failed_steps.append(step_name)
        self.errors.append((step_name, error))

    def add_warning(self, step_name: str, message: str):
        self.warnings.append((step_name, message))

    def get_duration(self) -> float:
        return (datetime.now() - self.start_time).total_seconds()


def _tracked(method: Callable[..., R]) -> Callable[..., R]:
    """Record the failing step and log the command's duration around an execute_* method."""

    @functools.wraps(method)
    def wrapper(self, *args, **kwargs):
        try:
            result = method(self, *args, **kwargs)
        except Exception as e:
            self.state.mark_step_failed(self.state.current_step, e)
            self.logger.error(
                f"[{self.run.command}] {self.state.current_step} failed after {self.state.get_duration():.2f}s: {e}"
            )
            raise
        self.logger.debug(f"[{self.run.command}] finished in {self.state.get_duration():.2f}s")
        return result

    return wrapper


def run_ordered(func: Callable[[T], R], items: Sequence[T], jobs: int = 1) -> List[R]:
    """Map func over items, concurrently when jobs > 1; results keep input order."""
    if jobs <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(func, item) for item in items]
        return [future.result() for future in futures]


def _incentive_row(result) -> Dict[str, Any]:
    return {
        "player": result.player,
        "mode": result.mode.value,
        "baseline": result.baseline,
        "new_payoff": result.new_payoff,
        "incentive": result.primal_value,
        "dual_bound": result.dual_bound,
        "gap": result.gap,
    }


class WorkflowOrchestrator:
    """Runs the verify, incentive, construct, corr and untrusted commands."""

    def __init__(
        self, run: RunConfig, verbose: bool = False, log_file: Optional[str] = None, log_level: str = "INFO"
    ):
        self.run = run
        self.state = WorkflowState()
        self.logger = WorkflowLogger(verbose, log_file, log_level)

    def _step(self, name: str):
        self.state.set_step(name)
        self.logger.debug(f"[{self.run.command}] {name}")

    # verify

    def _quantum_state(self, value, embedding: str):
        if isinstance(value, (DensityState, PureState)):
            return value
        if embedding == "mixture":
            return quantum_state.mixture_state(value)
        if embedding == "superposition":
            return quantum_state.superposition_state(value)
        raise ValidationError(f"Unknown embedding {embedding!r}; expected one of {', '.join(EMBEDDINGS)}")

    @_tracked
    def execute_verify(
        self, game_path: Path, input_path: Path, mode: str = "classical", embedding: str = "mixture"
    ) -> Tuple[Dict[str, Any], bool]:
        """Equilibrium verdict of a distribution, product profile or state."""
        if mode not in VERIFY_MODES:
            raise ValidationError(f"Unknown verify mode {mode!r}; expected one of {', '.join(VERIFY_MODES)}")
        self._step("load_inputs")
        game = serialization.load_game(game_path)
        tol = self.run.tolerance

        self._step(f"verify_{mode}")
        if mode == "nash":
            verdict = game_core.check_nash(game, serialization.load_product(input_path), tol)
            return self._classical_report(mode, verdict), verdict.is_equilibrium

        value = serialization.load_distribution_or_state(input_path)
        if mode == "classical":
            if isinstance(value, (DensityState, PureState)):
                value = quantum_state.measure_diag(value)
            verdict = game_core.check_correlated(game, value, tol)
            return self._classical_report(mode, verdict), verdict.is_equilibrium

        state = self._quantum_state(value, embedding)
        qce = deviation.is_qce(
            game,
            state,
            tol,
            solver=self.run.solver,
            gap_tolerance=self.run.channel_gap_tolerance,
            max_local_dimension=self.run.max_local_dimension,
        )
        report = {
            "mode": mode,
            "embedding": embedding if not isinstance(value, (DensityState, PureState)) else "state",
            "verdict": qce.is_equilibrium,
            "tolerance": tol,
            "max_incentive": qce.max_incentive,
            "players": [_incentive_row(r) for r in qce.results],
        }
        if game.normalized:
            report["mapping_bounds"] = [list(deviation.general_mapping_bound(game, i)) for i in range(game.players)]
        return report, qce.is_equilibrium

    @staticmethod
    def _classical_report(mode: str, verdict) -> Dict[str, Any]:
        return {
            "mode": mode,
            "verdict": verdict.is_equilibrium,
            "tolerance": verdict.tolerance,
            "max_violation": verdict.max_violation,
            "players": [
                {
                    "player": r.player,
                    "baseline": r.baseline,
                    "best_deviation": list(r.best_deviation),
                    "additive_gain": r.additive_gain,
                    "multiplicative_gain": r.multiplicative_gain,
                    "worst_violation": r.worst_violation,
                }
                for r in verdict.reports
            ],
        }

    # incentive

    @_tracked
    def execute_incentive(self, game_path: Path, dist_path: Path, mode: str = "additive") -> Dict[str, Any]:
        """Maximum POVM incentive of player 1 on the superposition of a CE."""
        self._step("load_inputs")
        game = serialization.load_game(game_path)
        p = serialization.load_distribution(dist_path)
        if game.players != 2:
            raise ValidationError("POVM incentive is defined for two-player games")
        if not np.allclose(game.payoff(1), game.payoff(1).flat[0]):
            self.state.add_warning("incentive", "player 2 payoff is not constant; only player 1's matrix is used")
            self.logger.warning("Player 2 payoff is not constant; only player 1's matrix is used")

        self._step("optimize")
        result = deviation.max_povm_incentive(
            game.payoff(0),
            p,
            IncentiveMode.parse(mode),
            solver=self.run.solver,
            gap_tolerance=self.run.povm_gap_tolerance,
            ce_tolerance=self.run.ce_precheck_tolerance,
        )
        report = _incentive_row(result)
        report["povm"] = serialization.to_jsonable(result.primal_solution)
        report["dual"] = serialization.to_jsonable(result.certificate.matrix)
        report["dual_residuals"] = list(result.certificate.feasibility_residuals)
        return report

    # construct

    @_tracked
    def execute_construct(self, family: str, out_dir: Optional[Path], **params) -> Dict[str, Any]:
        """Build a family and write its files; returns the predictions report."""
        if family not in FAMILIES:
            raise ValidationError(f"Unknown family {family!r}; expected one of {', '.join(FAMILIES)}")
        self._step(f"construct_{family}")
        builder = getattr(self, f"_construct_{family}")
        files, predictions = builder(**params)
        if out_dir is not None:
            self._step("write_files")
            files["predictions.json"] = predictions
            written = serialization.write_bundle(files, out_dir)
            predictions = dict(predictions, files=[str(path) for path in written.values()])
        return predictions

    def _family_files(self, family) -> Tuple[Dict[str, Any], Dict[str, Any]]:
        files = {
            "base_game.json": family.base_game,
            "base_distribution.json": family.base_correlation,
            "base_deviation.json": family.base_deviation,
        }
        simulation = constructions.simulate_family(family)
        if family.materializable:
            game, correlation, _ = constructions.materialize(family)
            files["game.json"] = game
            files["distribution.json"] = correlation
        predictions = {
            "depth": family.depth,
            "strategies": list(family.strategies),
            "materialized": simulation.materialized,
            "block_depth": simulation.block_depth,
            "simulated_old": simulation.old,
            "simulated_new": simulation.new,
            "simulated_gain": simulation.gain,
            "simulated_ratio": simulation.ratio,
        }
        return files, predictions

    def _construct_epsilon(self, depth: int = 1, epsilon: Optional[float] = None, **_):
        family = constructions.epsilon_additive_family(depth, epsilon)
        files, predictions = self._family_files(family)
        spec = family.spec
        predictions.update(
            family="epsilon",
            epsilon=spec.epsilon,
            predicted_old=spec.predicted_old,
            predicted_new=spec.predicted_new,
            predicted_gain=spec.predicted_gain,
        )
        return files, predictions

    def _construct_cyclic(self, depth: int = 1, size: int = 4, **_):
        family = constructions.cyclic_multiplicative_family(size, depth)
        files, predictions = self._family_files(family)
        spec = family.spec
        predictions.update(
            family="cyclic",
            base=spec.base,
            predicted_old=spec.predicted_old,
            predicted_new=spec.predicted_new,
            predicted_ratio=spec.predicted_ratio,
            exponent=spec.exponent,
            notes="ratio base 4(c-1)^2/c^2 per tensor factor; new and old utilities tensorize separately",
        )
        return files, predictions

    def _construct_fourier(self, size: int = 4, permutation: Optional[Sequence[int]] = None, **_):
        instance = constructions.fourier_counterexample(size, permutation)
        files = {
            "game.json": instance.game,
            "state.json": instance.state,
            "product.json": {"factors": [f.tolist() for f in instance.factors], "label": "uniform"},
            "deviation.json": instance.deviation,
        }
        baseline = float(quantum_state.quantum_utility(instance.game, instance.state)[0])
        after = quantum_state.apply_local(instance.state, instance.deviation)
        new = float(quantum_state.quantum_utility(instance.game, after)[0])
        predictions = {
            "family": "fourier",
            "size": instance.size,
            "permutation": list(instance.permutation),
            "predicted_incentive": instance.predicted_incentive,
            "simulated_old": baseline,
            "simulated_new": new,
            "mapping_bound": deviation.general_mapping_bound(instance.game, 0)[0],
        }
        return files, predictions

    def _construct_load_balancing(self, size: int = 4, **_):
        bundled = constructions.load_balancing(size)
        files = {"game.json": bundled.game, "distribution.json": bundled.correlated}
        honest = game_core.expected_utility(bundled.game, bundled.correlated)
        return files, {"family": "load_balancing", "size": size, "honest_payoffs": honest}

    def _construct_canonical(self, name: str = "traffic_light", size: int = 3, **_):
        bundled = constructions.canonical(name, size)
        files = {"game.json": bundled.game}
        if bundled.correlated is not None:
            files["distribution.json"] = bundled.correlated
        for index, profile in enumerate(bundled.nash_profiles):
            files[f"nash_{index}.json"] = {"factors": [f.tolist() for f in profile]}
        return files, {"family": "canonical", "name": bundled.name, "nash_profiles": len(bundled.nash_profiles)}

    # corr

    @_tracked
    def execute_corr(self, instances: Sequence[str]) -> Dict[str, Any]:
        """Separation rows for instance specs such as ed:8, hjmr:4 or conj:4:2."""
        if not instances:
            raise ValidationError("Need at least one instance spec")
        self._step("separation_report")
        with ProgressContext.suppress():
            rows = corrcomp.separation_report(
                list(instances), jobs=self.run.jobs, restarts=self.run.nn_restarts, seed=self.run.seed
            )
        return {"seed": self.run.seed, "rows": rows}

    @_tracked
    def execute_untrusted(self, size: int, kind: str = "quantum") -> Tuple[Dict[str, Any], bool]:
        """Untrusted-model equilibrium check of a load-balancing protocol."""
        self._step("build_protocol")
        game, protocol, target = corrcomp.load_balancing_protocol(
            size, kind, restarts=self.run.nn_restarts, seed=self.run.seed
        )
        self._step("check_equilibrium")
        verdict = corrcomp.check_untrusted_equilibrium(
            game,
            protocol,
            target,
            tol=self.run.tolerance,
            solver=self.run.solver,
            gap_tolerance=self.run.channel_gap_tolerance,
            max_local_dimension=self.run.max_local_dimension,
        )
        report = {
            "size": size,
            "protocol": kind,
            "verdict": verdict.is_equilibrium,
            "tolerance": verdict.tolerance,
            "seed_kind": verdict.seed_kind,
            "seed_size": verdict.seed_size,
            "max_incentive": verdict.max_incentive,
            "bounds": verdict.bounds,
            "players": [_incentive_row(r) for r in verdict.results],
        }
        return report, verdict.is_equilibrium

    # status

    def get_workflow_status(self) -> Dict[str, Any]:
        return {
            "dependencies": self._check_dependencies(),
            "solvers": self._installed_solvers(),
            "configuration": ConfigManager().get_config_status(),
        }

    @staticmethod
    def _check_dependencies() -> Dict[str, bool]:
        dependencies = {}
        for name in ("numpy", "scipy", "cvxpy", "clarabel", "pydantic", "yaml", "rich"):
            try:
                importlib.import_module(name)
                dependencies[name] = True
            except ImportError:
                dependencies[name] = False
        return dependencies

    @staticmethod
    def _installed_solvers() -> List[str]:
        try:
            import cvxpy as cp
        except ImportError:
            return []
        return sorted(cp.installed_solvers())


def quick_batch(
    func: Callable[[T], R], items: Sequence[T], description: str, jobs: int = 1
) -> List[R]:
    """run_ordered with a progress bar when running serially."""
    if jobs > 1:
        return run_ordered(func, items, jobs)
    return [func(item) for item in track(items, description, total=len(items))]

