"""
Tests for workflow orchestration across services.
"""

import json
import logging
import math

import numpy as np
import pytest

from qequil.exceptions import FileOperationError, ValidationError
from qequil.models.run import RunConfig
from qequil.services import deviation, serialization
from qequil.services.workflow import WorkflowOrchestrator, run_ordered

ADDITIVE_OPTIMUM = (math.sqrt(2.0) - 1.0) / 2.0


@pytest.fixture
def orchestrator():
    def _make(command="verify", **settings):
        return WorkflowOrchestrator(RunConfig(command=command, **settings))

    return _make


@pytest.fixture
def traffic_files(tmp_path, traffic_light):
    game = serialization.write_text(serialization.dumps_json(traffic_light.game), tmp_path / "game.json")
    ce = serialization.write_text(serialization.dumps_json(traffic_light.correlated), tmp_path / "ce.json")
    return game, ce


class TestVerify:
    """Verdicts of the verify command."""

    def test_classical_ce(self, orchestrator, traffic_files):
        report, verdict = orchestrator().execute_verify(*traffic_files)
        assert verdict
        assert report["mode"] == "classical"
        assert len(report["players"]) == 2

    def test_classical_violation(self, orchestrator, traffic_files, write_json):
        game, _ = traffic_files
        collision = write_json("collide.json", {"shape": [2, 2], "probabilities": [1.0, 0.0, 0.0, 0.0]})
        report, verdict = orchestrator().execute_verify(game, collision)
        assert not verdict
        assert report["max_violation"] == pytest.approx(100.0)

    def test_nash_profile(self, orchestrator, traffic_files, write_json):
        game, _ = traffic_files
        profile = write_json("x.json", {"factors": [[1.0, 0.0], [0.0, 1.0]]})
        report, verdict = orchestrator().execute_verify(game, profile, mode="nash")
        assert verdict
        assert report["mode"] == "nash"

    def test_quantum_mixture(self, orchestrator, tmp_path, battle_of_sexes):
        game = serialization.write_text(serialization.dumps_json(battle_of_sexes.game), tmp_path / "g.json")
        ce = serialization.write_text(serialization.dumps_json(battle_of_sexes.correlated), tmp_path / "p.json")
        report, verdict = orchestrator(tolerance=1e-5).execute_verify(game, ce, mode="quantum")
        assert verdict
        assert report["embedding"] == "mixture"
        assert "mapping_bounds" not in report

    def test_unknown_mode(self, orchestrator, traffic_files):
        with pytest.raises(ValidationError, match="Unknown verify mode"):
            orchestrator().execute_verify(*traffic_files, mode="bayes")


class TestIncentive:
    """POVM incentive command."""

    def test_closed_form_optimum(self, orchestrator, write_json):
        best = deviation.closed_form_2x2("add")
        game = write_json(
            "g.json", {"players": 2, "strategyCounts": [2, 2], "utilities": [np.eye(2).tolist(), np.ones((2, 2)).tolist()]}
        )
        dist = write_json("p.json", {"shape": [2, 2], "probabilities": best.correlation.reshape(-1).tolist()})
        report = orchestrator("incentive").execute_incentive(game, dist, "additive")
        assert report["incentive"] == pytest.approx(ADDITIVE_OPTIMUM, abs=1e-6)
        assert len(report["povm"]["elements"]) == 2
        assert min(report["dual_residuals"]) >= -1e-8

    def test_warns_on_non_constant_second_payoff(self, orchestrator, write_json):
        game = write_json(
            "g.json", {"players": 2, "strategyCounts": [2, 2], "utilities": [np.eye(2).tolist(), np.eye(2).tolist()]}
        )
        dist = write_json("p.json", {"shape": [2, 2], "probabilities": [0.5, 0.0, 0.0, 0.5]})
        runner = orchestrator("incentive")
        report = runner.execute_incentive(game, dist)
        assert runner.state.warnings
        assert report["incentive"] == pytest.approx(0.0, abs=1e-6)


class TestConstruct:
    """Family construction and file bundles."""

    def test_epsilon_bundle(self, orchestrator, tmp_path):
        out = tmp_path / "eps"
        report = orchestrator("construct").execute_construct("epsilon", out, depth=2, epsilon=math.pi / 6)
        assert report["materialized"]
        assert report["simulated_new"] == pytest.approx(report["predicted_new"], abs=1e-12)
        assert (out / "game.json").exists()
        game = serialization.load_game(out / "game.json")
        assert game.strategy_counts == (4, 4)
        predictions = json.loads((out / "predictions.json").read_text())
        assert predictions["family"] == "epsilon"

    def test_fourier_without_output(self, orchestrator):
        report = orchestrator("construct").execute_construct("fourier", None, size=3, permutation=[1, 2, 0])
        assert report["simulated_new"] == pytest.approx(1.0, abs=1e-12)
        assert report["simulated_old"] == pytest.approx(1.0 / 3.0, abs=1e-12)
        assert report["permutation"] == [1, 2, 0]

    def test_fourier_state_file_loads(self, orchestrator, tmp_path):
        orchestrator("construct").execute_construct("fourier", tmp_path, size=2)
        state = serialization.load_state(tmp_path / "state.json")
        assert state.dims == (2, 2)

    def test_canonical_bundle(self, orchestrator, tmp_path):
        report = orchestrator("construct").execute_construct("canonical", tmp_path, name="battle_of_sexes")
        assert report["nash_profiles"] == 3
        assert len(serialization.load_product(tmp_path / "nash_2.json")) == 2

    def test_unknown_family(self, orchestrator):
        with pytest.raises(ValidationError, match="Unknown family"):
            orchestrator("construct").execute_construct("spiral", None)


class TestCorrAndUntrusted:
    """Separation rows and untrusted-model verdicts."""

    def test_corr_rows(self, orchestrator):
        report = orchestrator("corr", nn_restarts=2).execute_corr(["ed:3"])
        assert report["rows"][0]["nnr-lb"] == 3

    def test_corr_needs_instances(self, orchestrator):
        with pytest.raises(ValidationError):
            orchestrator("corr").execute_corr([])

    def test_broken_protocol(self, orchestrator):
        report, verdict = orchestrator("untrusted").execute_untrusted(2, "broken")
        assert not verdict
        assert report["seed_kind"] == "classical"
        assert report["max_incentive"] == pytest.approx(1.0, abs=1e-5)


class TestHelpers:
    """Ordering and state tracking."""

    def test_run_ordered_keeps_order(self):
        items = list(range(12))
        assert run_ordered(lambda x: x * x, items, jobs=4) == [x * x for x in items]

    def test_failed_step_is_recorded(self, orchestrator):
        runner = orchestrator("corr")
        with pytest.raises(ValidationError, match="at least one instance"):
            runner.execute_corr([])
        assert runner.state.failed_steps == ["initialization"]
        assert isinstance(runner.state.errors[0][1], ValidationError)

    def test_failure_inside_a_step(self, orchestrator, tmp_path, caplog):
        runner = orchestrator("verify")
        with caplog.at_level(logging.ERROR, logger="qequil"):
            with pytest.raises(FileOperationError, match="Cannot read"):
                runner.execute_verify(tmp_path / "missing.json", tmp_path / "missing.json")
        assert runner.state.failed_steps == ["load_inputs"]
        assert "load_inputs failed after" in caplog.text

    def test_successful_command_has_no_failures(self, orchestrator):
        runner = orchestrator("corr", nn_restarts=2)
        runner.execute_corr(["ed:3"])
        assert runner.state.failed_steps == []
        assert runner.state.completed_steps == ["initialization"]
        assert runner.state.get_duration() >= 0.0

    def test_status_lists_dependencies(self, orchestrator, temp_home):
        status = orchestrator("config-status").get_workflow_status()
        assert status["dependencies"]["numpy"]
        assert status["configuration"]["config_exists"] is False
