"""
Tests for configuration manager and config model.
"""

import tempfile
from pathlib import Path

import pytest

from qequil.config.manager import ConfigManager
from qequil.config.models import Config
from qequil.exceptions import ConfigurationError


class TestConfigManager:
    """Test cases for ConfigManager."""

    def test_init_with_default_path(self, temp_home):
        """Test ConfigManager initialization with default path."""
        manager = ConfigManager()
        assert manager.config_path == temp_home / ".qequil" / "config.md"

    def test_init_with_custom_path(self):
        """Test ConfigManager initialization with custom path."""
        custom_path = Path("/tmp/custom_config.md")
        manager = ConfigManager(custom_path)
        assert manager.config_path == custom_path

    def test_load_config_file_not_found(self):
        """Test loading config when file doesn't exist."""
        with tempfile.TemporaryDirectory() as temp_dir:
            manager = ConfigManager(Path(temp_dir) / "nonexistent.md")

            with pytest.raises(ConfigurationError, match="Configuration file not found"):
                manager.load_config()

    def test_load_valid_config(self):
        """Test loading a configuration split over several yaml blocks."""
        config_content = '''# qequil Configuration

## Numerics

```yaml
solver: "scs"
seed: 42
```

## Logging

```yaml
log_level: "debug"
log_file: ""
tolerance: 1.0e-8
```
'''

        with tempfile.NamedTemporaryFile(mode="w", suffix=".md", delete=False) as f:
            f.write(config_content)
            config_path = Path(f.name)

        try:
            config = ConfigManager(config_path).load_config()

            assert config.solver == "SCS"
            assert config.seed == 42
            assert config.log_level == "DEBUG"
            assert config.log_file is None
            assert config.tolerance == pytest.approx(1e-8)
        finally:
            config_path.unlink()

    def test_load_config_invalid_yaml(self, tmp_path):
        """Test loading config with invalid YAML."""
        config_path = tmp_path / "config.md"
        config_path.write_text("# qequil\n\n```yaml\ninvalid: yaml: content: [\n```\n")

        with pytest.raises(ConfigurationError, match="Invalid YAML"):
            ConfigManager(config_path).load_config()

    def test_load_config_unknown_key(self, tmp_path):
        """Unknown keys are reported instead of being ignored."""
        config_path = tmp_path / "config.md"
        config_path.write_text('```yaml\nmax_joint_strategies: 4096\n```\n')

        with pytest.raises(ConfigurationError, match="Unknown configuration keys: max_joint_strategies"):
            ConfigManager(config_path).load_config()

    def test_load_or_default_without_file(self, tmp_path):
        config = ConfigManager(tmp_path / "absent.md").load_or_default()
        assert config == Config()

    def test_validate_config_success(self):
        """Test successful config validation."""
        assert ConfigManager().validate_config(Config()) is True

    def test_validate_config_problems(self):
        """Every bad field is reported."""
        config = Config(solver="mosek", tolerance=0.0, nn_restarts=0)

        with pytest.raises(ConfigurationError, match="solver must be one of") as excinfo:
            ConfigManager().validate_config(config)
        assert "tolerance must be positive" in str(excinfo.value)
        assert "nn_restarts must be at least 1" in str(excinfo.value)

    def test_create_default_config(self, tmp_path):
        """Test creating default configuration file."""
        config_path = tmp_path / "nested" / "config.md"
        manager = ConfigManager(config_path)

        manager.create_default_config()

        assert config_path.exists()
        content = config_path.read_text()
        assert "solver" in content
        assert "Verdict Tolerances" in content
        assert manager.load_config() == Config()

    def test_config_status(self, tmp_path):
        config_path = tmp_path / "config.md"
        manager = ConfigManager(config_path)
        assert manager.get_config_status()["config_exists"] is False

        config_path.write_text('```yaml\nseed: -1\n```\n')
        status = manager.get_config_status()
        assert status["config_exists"] is True
        assert status["is_valid"] is False
        assert status["validation_errors"] == ["seed must be nonnegative"]

    def test_config_exists(self):
        """Test checking if config file exists."""
        with tempfile.NamedTemporaryFile(suffix=".md") as f:
            manager = ConfigManager(Path(f.name))
            assert manager.config_exists() is True

        # File should be deleted now
        assert manager.config_exists() is False


class TestConfigModel:
    """Test cases for Config."""

    def test_environment_overrides(self, monkeypatch):
        monkeypatch.setenv("QEQUIL_SOLVER", "scs")
        monkeypatch.setenv("QEQUIL_SEED", "9")
        config = Config()
        assert config.solver == "SCS"
        assert config.seed == 9

    def test_bad_seed_environment(self, monkeypatch):
        monkeypatch.setenv("QEQUIL_SEED", "nine")
        with pytest.raises(ConfigurationError, match="QEQUIL_SEED"):
            Config()

    def test_log_file_expanded(self, temp_home):
        config = Config(log_file="~/qequil.log")
        assert config.log_file == str(temp_home / "qequil.log")

    def test_max_local_dimension_range(self):
        assert Config(max_local_dimension=17).validate() == ["max_local_dimension must lie in [1, 16]"]
