"""
Configuration management for qequil.

This module handles loading and validation of the markdown configuration
file and its environment overrides.
"""

from .manager import ConfigManager
from .models import Config

__all__ = ["ConfigManager", "Config"]
