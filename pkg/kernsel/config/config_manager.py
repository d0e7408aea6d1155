"""
Configuration manager for kernsel.
Loads, validates, and provides access to run settings.
"""
import os
import json
import copy
import logging
from typing import Dict, Any, Optional, Mapping

from ..errors import ConfigurationError


SEED_ENV_VAR = "KERNSEL_SEED"


def _parse_seed(text: str) -> int:
    """Decimal first so that "007" is 7; prefixed forms such as "0x2A" are accepted too."""
    try:
        return int(text, 10)
    except ValueError:
        return int(text, 0)


def _deep_merge(base: Dict[str, Any], update: Mapping[str, Any]) -> Dict[str, Any]:
    """Merge ``update`` into a copy of ``base``, section by section."""
    merged = copy.deepcopy(base)
    for key, value in update.items():
        if isinstance(value, Mapping) and isinstance(merged.get(key), dict):
            merged[key] = _deep_merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


class ConfigManager:
    """
    Manages configuration settings for kernsel runs.

    Loads an optional JSON file over the built-in defaults, validates the
    result and gives typed access to the sections used by the commands.
    Command-line flags are applied last through ``apply_overrides``.
    """

    DEFAULT_CONFIG = {
        "quadrature": {
            "tolerance": 1e-8,
            "nodes": 64,
            "max_depth": 40,
            "tail_ratio": 1e-16
        },
        "experiments": {
            "n": 100,
            "replications": 50,
            "master_seed": 0,
            "kappa_min": -1.0,
            "kappa_max": 1.0,
            "kappa_num": 41,
            "workers": 1
        },
        "output": {
            "results_dir": "results",
            "float_digits": 17
        },
        "logging": {
            "level": "INFO",
            "log_to_file": False
        }
    }

    REQUIRED_SECTIONS = ("quadrature", "experiments", "output", "logging")

    def __init__(self, config_path: Optional[str] = None):
        """
        Initialize the ConfigManager.

        Args:
            config_path: Path to a JSON configuration file, or None for defaults only
        """
        self.logger = logging.getLogger(__name__)
        self.config_path = config_path
        self.config: Dict[str, Any] = copy.deepcopy(self.DEFAULT_CONFIG)
        self.file_config: Dict[str, Any] = {}
        self._seed_from_env = False

    def load_config(self) -> bool:
        """
        Load configuration from the config file, if one was given.

        The master seed falls back to the ``KERNSEL_SEED`` environment variable
        when the file does not set one.

        Returns:
            True if configuration loaded successfully

        Raises:
            ConfigurationError: If the file cannot be read or fails validation
        """
        file_config: Dict[str, Any] = {}
        if self.config_path:
            if not os.path.exists(self.config_path):
                raise ConfigurationError(f"Config file not found: {self.config_path}")
            try:
                with open(self.config_path, 'r', encoding='utf-8') as config_file:
                    file_config = json.load(config_file)
            except (OSError, json.JSONDecodeError) as e:
                raise ConfigurationError(f"Error reading config file {self.config_path}: {e}") from e
            if not isinstance(file_config, dict):
                raise ConfigurationError("Config file must contain a JSON object")
            self.logger.info(f"Configuration loaded from {self.config_path}")

        self.file_config = file_config
        self.config = _deep_merge(self.DEFAULT_CONFIG, file_config)

        file_seed = file_config.get("experiments", {}).get("master_seed")
        env_seed = os.environ.get(SEED_ENV_VAR)
        if file_seed is None and env_seed is not None:
            try:
                self.config["experiments"]["master_seed"] = _parse_seed(env_seed)
            except ValueError as e:
                raise ConfigurationError(f"{SEED_ENV_VAR} is not an integer: {env_seed!r}") from e
            self._seed_from_env = True
            self.logger.debug(f"Master seed taken from {SEED_ENV_VAR}")

        self._validate_config()
        return True

    def _validate_config(self) -> None:
        """
        Validate the configuration.

        Raises:
            ConfigurationError: If a section is missing or a value is out of range
        """
        for section in self.REQUIRED_SECTIONS:
            if not isinstance(self.config.get(section), dict):
                raise ConfigurationError(f"Missing required configuration section: {section}")

        quad = self.config["quadrature"]
        if not float(quad["tolerance"]) > 0:
            raise ConfigurationError("quadrature.tolerance must be positive")
        if int(quad["nodes"]) < 2:
            raise ConfigurationError("quadrature.nodes must be at least 2")
        if int(quad["max_depth"]) < 1:
            raise ConfigurationError("quadrature.max_depth must be at least 1")

        exp = self.config["experiments"]
        if int(exp["n"]) < 1:
            raise ConfigurationError("experiments.n must be at least 1")
        if int(exp["replications"]) < 1:
            raise ConfigurationError("experiments.replications must be at least 1")
        if int(exp["kappa_num"]) < 1:
            raise ConfigurationError("experiments.kappa_num must be at least 1")
        if float(exp["kappa_min"]) > float(exp["kappa_max"]):
            raise ConfigurationError("experiments.kappa_min must not exceed kappa_max")
        if int(exp["workers"]) < 1:
            raise ConfigurationError("experiments.workers must be at least 1")

    def get_setting(self, section: str, key: str, default: Any = None) -> Any:
        """
        Get a specific configuration setting.

        Args:
            section: The configuration section
            key: The configuration key
            default: Default value if the setting doesn't exist

        Returns:
            The configuration value, or the default if not found
        """
        if section in self.config and key in self.config[section]:
            return self.config[section][key]
        return default

    def apply_overrides(self, section: str, overrides: Mapping[str, Any]) -> None:
        """
        Apply command-line overrides to a section, skipping unset (None) values.

        Args:
            section: The configuration section
            overrides: Mapping of key to value; None means "not given"
        """
        applied = {key: value for key, value in overrides.items() if value is not None}
        if not applied:
            return
        self.config.setdefault(section, {}).update(applied)
        self.logger.debug(f"Applied overrides to {section}: {applied}")
        self._validate_config()

    @property
    def seed_from_env(self) -> bool:
        """Whether the master seed came from the environment variable."""
        return self._seed_from_env

    def get_quadrature_settings(self) -> Dict[str, Any]:
        """Get the quadrature section as keyword arguments for the integrator."""
        quad = self.config["quadrature"]
        return {
            "tol": float(quad["tolerance"]),
            "nodes": int(quad["nodes"]),
            "max_depth": int(quad["max_depth"]),
            "tail_ratio": float(quad["tail_ratio"])
        }

    def get_results_dir(self) -> str:
        """
        Get the directory for result files.

        Returns:
            The path to the results directory
        """
        return self.config["output"]["results_dir"]

    def get_config_dict(self) -> Dict[str, Any]:
        """
        Get the entire resolved configuration.

        Returns:
            A deep copy of the configuration dictionary
        """
        return copy.deepcopy(self.config)

    def from_file(self, section: str, key: str) -> bool:
        """Whether a setting was given in the config file."""
        section_config = self.file_config.get(section)
        return isinstance(section_config, dict) and key in section_config
