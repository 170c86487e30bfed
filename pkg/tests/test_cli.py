"""
Tests for CLI interface and command handling.
"""

import csv
import io
import json

import pytest
from click.testing import CliRunner

from qequil import __version__
from qequil.cli.main import cli
from qequil.constants import SEPARATION_COLUMNS
from qequil.services import serialization

TRAFFIC_LIGHT = {
    "players": 2,
    "strategyCounts": [2, 2],
    "utilities": [[[-100, 1], [0, 0]], [[-100, 0], [1, 0]]],
}


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def config_file(tmp_path):
    """Configuration path inside tmp_path so the developer's file is never read."""
    return str(tmp_path / "config.md")


@pytest.fixture
def game_file(write_json):
    return str(write_json("game.json", TRAFFIC_LIGHT))


def invoke(runner, config_file, *args):
    return runner.invoke(cli, ["--config", config_file, *args])


class TestCLIFramework:
    """Test base CLI framework functionality."""

    def test_cli_help(self, runner):
        """Test CLI help output."""
        result = runner.invoke(cli, ["--help"])

        assert result.exit_code == 0
        assert "qequil - equilibria of strategic games under quantum strategies" in result.output
        for command in ("verify", "incentive", "construct", "corr", "untrusted", "reproduce", "setup"):
            assert command in result.output

    def test_cli_version(self, runner):
        """Test CLI version output."""
        result = runner.invoke(cli, ["--version"])

        assert result.exit_code == 0
        assert __version__ in result.output

    def test_unknown_solver(self, runner, config_file, game_file):
        result = invoke(runner, config_file, "--solver", "GLPK", "verify", game_file, game_file)
        assert result.exit_code == 2


class TestVerifyCommand:
    """Exit codes and reports of verify."""

    def test_ce_exits_zero(self, runner, config_file, game_file, write_json, tmp_path):
        dist = write_json("ce.json", {"shape": [2, 2], "probabilities": [0.0, 0.5, 0.5, 0.0]})
        out = tmp_path / "report.json"

        result = invoke(runner, config_file, "verify", game_file, str(dist), "--out", str(out))

        assert result.exit_code == 0
        report = json.loads(out.read_text())
        assert report["verdict"] is True
        assert report["mode"] == "classical"

    def test_violation_exits_one(self, runner, config_file, game_file, write_json):
        dist = write_json("collide.json", {"shape": [2, 2], "probabilities": [1.0, 0.0, 0.0, 0.0]})

        result = invoke(runner, config_file, "verify", game_file, str(dist))

        assert result.exit_code == 1

    def test_tolerance_flag(self, runner, config_file, game_file, write_json):
        dist = write_json("collide.json", {"shape": [2, 2], "probabilities": [1.0, 0.0, 0.0, 0.0]})

        result = invoke(runner, config_file, "verify", game_file, str(dist), "--tol", "200")

        assert result.exit_code == 0

    def test_malformed_game_exits_two(self, runner, config_file, write_json):
        game = write_json("bad.json", {"players": 2, "strategyCounts": [2, 2]})
        dist = write_json("p.json", {"shape": [2, 2], "probabilities": [0.25, 0.25, 0.25, 0.25]})

        result = invoke(runner, config_file, "verify", str(game), str(dist))

        assert result.exit_code == 2
        assert "Could not parse input" in result.output

    def test_missing_file(self, runner, config_file, game_file, tmp_path):
        result = invoke(runner, config_file, "verify", game_file, str(tmp_path / "absent.json"))
        assert result.exit_code == 2

    def test_shape_mismatch_exits_two(self, runner, config_file, game_file, write_json):
        dist = write_json("p.json", {"shape": [3], "probabilities": [0.5, 0.25, 0.25]})

        result = invoke(runner, config_file, "verify", game_file, str(dist))

        assert result.exit_code == 2
        assert "Invalid input" in result.output


class TestIncentiveCommand:
    """POVM incentive from the command line."""

    def test_not_a_ce(self, runner, config_file, write_json):
        game = write_json("g.json", {"players": 2, "strategyCounts": [2, 2], "utilities": [[[1, 0], [0, 1]], [[1, 1], [1, 1]]]})
        dist = write_json("p.json", {"shape": [2, 2], "probabilities": [0.0, 0.5, 0.5, 0.0]})

        result = invoke(runner, config_file, "incentive", str(game), str(dist))

        assert result.exit_code == 2
        assert "not a correlated equilibrium" in result.output


class TestConstructCommand:
    """Family files written by construct."""

    def test_fourier_bundle(self, runner, config_file, tmp_path):
        out = tmp_path / "fourier"

        result = invoke(runner, config_file, "construct", "fourier", "--size", "2", "--out", str(out))

        assert result.exit_code == 0
        for name in ("game.json", "state.json", "product.json", "predictions.json"):
            assert (out / name).exists()
        assert serialization.load_game(out / "game.json").normalized

    def test_bad_permutation(self, runner, config_file):
        result = invoke(runner, config_file, "construct", "fourier", "--permutation", "a,b")
        assert result.exit_code == 2

    def test_depth_cap(self, runner, config_file):
        result = invoke(runner, config_file, "construct", "epsilon", "--depth", "65")
        assert result.exit_code == 2
        assert "Instance too large" in result.output


class TestCorrCommand:
    """Separation table output."""

    def test_csv_by_default(self, runner, config_file, tmp_path):
        out = tmp_path / "rows.csv"

        result = invoke(runner, config_file, "corr", "ed:3", "ed:4", "--out", str(out))

        assert result.exit_code == 0
        rows = list(csv.DictReader(io.StringIO(out.read_text())))
        assert tuple(rows[0]) == SEPARATION_COLUMNS
        assert [r["nnr-lb"] for r in rows] == ["3", "4"]

    def test_json_format(self, runner, config_file, tmp_path):
        out = tmp_path / "rows.json"

        result = invoke(runner, config_file, "corr", "ed:3", "--format", "json", "--seed", "5", "--out", str(out))

        assert result.exit_code == 0
        report = json.loads(out.read_text())
        assert report["seed"] == 5

    def test_bad_instance(self, runner, config_file):
        result = invoke(runner, config_file, "corr", "ed:zero")
        assert result.exit_code == 2


class TestUntrustedCommand:
    """Untrusted-model verdicts."""

    def test_broken_protocol_exits_one(self, runner, config_file):
        result = invoke(runner, config_file, "untrusted", "--size", "2", "--protocol", "broken")
        assert result.exit_code == 1


class TestReproduceCommand:
    """Acceptance suite from the command line."""

    def test_single_check_to_csv(self, runner, config_file, tmp_path):
        out = tmp_path / "checks.csv"

        result = invoke(runner, config_file, "reproduce", "--only", "3", "--out", str(out), "--format", "csv")

        assert result.exit_code == 0
        rows = list(csv.DictReader(io.StringIO(out.read_text())))
        assert rows == [{"number": "3", "name": "non-concavity witness", "passed": "True", "detail": rows[0]["detail"]}]

    def test_log_file(self, runner, config_file, tmp_path):
        log_file = tmp_path / "logs" / "reproduce.log"

        result = runner.invoke(cli, ["--config", config_file, "--log-file", str(log_file), "reproduce", "--only", "3"])

        assert result.exit_code == 0
        assert "Acceptance suite: 1/1 passed" in log_file.read_text()

    def test_bad_only(self, runner, config_file):
        result = invoke(runner, config_file, "reproduce", "--only", "one")
        assert result.exit_code == 2


class TestConfigCommands:
    """setup and config-status."""

    def test_setup_creates_config(self, runner, temp_home):
        result = runner.invoke(cli, ["setup"])

        assert result.exit_code == 0
        assert (temp_home / ".qequil" / "config.md").exists()

        again = runner.invoke(cli, ["setup"])
        assert "already exists" in again.output

    def test_config_status_without_file(self, runner, temp_home):
        result = runner.invoke(cli, ["config-status"])

        assert result.exit_code == 0
        assert "No configuration file" in result.output
        assert "numpy" in result.output

    def test_invalid_config_is_reported(self, runner, config_file, game_file, tmp_path):
        (tmp_path / "config.md").write_text('```yaml\nsolver: "MOSEK"\n```\n')

        status = invoke(runner, config_file, "config-status")
        assert status.exit_code == 2
        assert "solver must be one of" in status.output

        result = invoke(runner, config_file, "verify", game_file, game_file)
        assert result.exit_code == 2
        assert "Configuration error" in result.output
