"""
Configuration manager implementation.
"""

import logging
import re
from dataclasses import fields
from importlib import resources
from pathlib import Path
from typing import Any, Dict, Optional

import yaml

from ..exceptions import ConfigurationError
from .models import Config

logger = logging.getLogger(__name__)

_EMBEDDED_DEFAULT = """# qequil Configuration

```yaml
tolerance: 1.0e-6
ce_precheck_tolerance: 1.0e-9
povm_gap_tolerance: 1.0e-7
channel_gap_tolerance: 1.0e-6
solver: "CLARABEL"
eigen_method: "auto"
seed: 0
nn_restarts: 20
output_format: "json"
log_level: "INFO"
log_file: ""
```
"""


class ConfigManager:
    """Loads, validates and creates the markdown configuration file."""

    DEFAULT_CONFIG_PATH = Path.home() / ".qequil" / "config.md"

    def __init__(self, config_path: Optional[Path] = None):
        self.config_path = Path(config_path) if config_path else self.DEFAULT_CONFIG_PATH

    def load_config(self) -> Config:
        """Load configuration from the markdown file."""
        if not self.config_path.exists():
            raise ConfigurationError(f"Configuration file not found at {self.config_path}")
        try:
            content = self.config_path.read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigurationError(f"Failed to read configuration: {e}")
        config_data = self._parse_markdown_config(content)
        try:
            return Config(**config_data)
        except (TypeError, ValueError) as e:
            raise ConfigurationError(f"Failed to load configuration: {e}")

    def load_or_default(self) -> Config:
        """Configuration from file when present, defaults otherwise."""
        if self.config_exists():
            return self.load_config()
        logger.debug("No configuration at %s, using defaults", self.config_path)
        return Config()

    def validate_config(self, config: Config) -> bool:
        problems = config.validate()
        if problems:
            raise ConfigurationError("Configuration validation failed: " + "; ".join(problems))
        return True

    def _parse_markdown_config(self, content: str) -> Dict[str, Any]:
        """Merge every ```yaml block; unknown keys are rejected."""
        known = {f.name for f in fields(Config)}
        config_data: Dict[str, Any] = {}
        for yaml_block in re.findall(r"```yaml\n(.*?)\n```", content, re.DOTALL):
            try:
                yaml_data = yaml.safe_load(yaml_block)
            except yaml.YAMLError as e:
                raise ConfigurationError(f"Invalid YAML in configuration: {e}")
            if yaml_data is None:
                continue
            if not isinstance(yaml_data, dict):
                raise ConfigurationError("Each yaml block must be a mapping")
            unknown = sorted(set(yaml_data) - known)
            if unknown:
                raise ConfigurationError(f"Unknown configuration keys: {', '.join(unknown)}")
            config_data.update(yaml_data)
        if config_data.get("log_file") == "":
            config_data["log_file"] = None
        return config_data

    def _default_config_content(self) -> str:
        try:
            return resources.files("qequil.config").joinpath("default_config.md").read_text(encoding="utf-8")
        except (FileNotFoundError, ModuleNotFoundError, OSError):
            default_config_path = Path(__file__).parent / "default_config.md"
            if default_config_path.exists():
                return default_config_path.read_text(encoding="utf-8")
            return _EMBEDDED_DEFAULT

    def create_default_config(self) -> None:
        self.config_path.parent.mkdir(parents=True, exist_ok=True)
        self.config_path.write_text(self._default_config_content(), encoding="utf-8")

    def get_config_status(self) -> Dict[str, Any]:
        status = {
            "config_exists": self.config_exists(),
            "config_path": str(self.config_path),
            "config_directory": str(self.config_path.parent),
            "is_valid": False,
            "validation_errors": [],
        }
        if status["config_exists"]:
            try:
                config = self.load_config()
                status["validation_errors"] = config.validate()
                status["is_valid"] = not status["validation_errors"]
            except ConfigurationError as e:
                status["validation_errors"].append(str(e))
        return status

    def config_exists(self) -> bool:
        return self.config_path.exists()
