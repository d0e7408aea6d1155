"""
Per-command run context: resolved configuration, logging, output writer and manifest.
"""
import argparse
from typing import Any, Dict, Mapping, Optional

from .. import __version__
from ..config.config_manager import ConfigManager
from ..dal.models import RunManifest
from ..dal.result_writer import ResultWriter
from ..utils.logger import get_logger, setup_logger


class CommandContext:
    """
    Resolves settings for one command with the precedence
    flag > config file > KERNSEL_SEED > built-in default, and owns the
    ResultWriter whose files end up in the command's manifest.
    """

    def __init__(self, command: str, args: argparse.Namespace,
                 experiment_overrides: Optional[Mapping[str, Any]] = None):
        """
        Initialize the CommandContext.

        Args:
            command: Subcommand name
            args: Parsed arguments (uses config, output_dir and log_level)
            experiment_overrides: Flag values for the experiments section; None means not given
        """
        self.command = command
        self.config_manager = ConfigManager(getattr(args, "config", None))
        self.config_manager.load_config()
        self.config_manager.apply_overrides("output", {"results_dir": getattr(args, "output_dir", None)})
        self.config_manager.apply_overrides("logging", {"level": getattr(args, "log_level", None)})
        self._flags = {key: value for key, value in (experiment_overrides or {}).items() if value is not None}
        self.config_manager.apply_overrides("experiments", self._flags)

        setup_logger(self.config_manager.get_setting("logging", "level", "INFO"),
                     bool(self.config_manager.get_setting("logging", "log_to_file", False)))
        self.logger = get_logger(f"kernsel.cli.{command}")
        self._writer: Optional[ResultWriter] = None

    @property
    def quadrature(self) -> Dict[str, Any]:
        return self.config_manager.get_quadrature_settings()

    def experiment_setting(self, key: str) -> Any:
        return self.config_manager.get_setting("experiments", key)

    @property
    def master_seed(self) -> int:
        return int(self.experiment_setting("master_seed"))

    def setting_source(self, key: str) -> str:
        """Where an experiments setting came from: flag, config, env or default."""
        if key in self._flags:
            return "flag"
        if self.config_manager.from_file("experiments", key):
            return "config"
        if key == "master_seed" and self.config_manager.seed_from_env:
            return "env"
        return "default"

    @property
    def writer(self) -> ResultWriter:
        if self._writer is None:
            self._writer = ResultWriter(self.config_manager.get_results_dir(), self.command)
        return self._writer

    def finish(self, config: Optional[Dict[str, Any]] = None, master_seed: Optional[int] = None,
               notes: Optional[Dict[str, Any]] = None) -> str:
        """
        Write the run manifest listing every file produced by the command.

        Args:
            config: Command-specific resolved settings, merged into the manifest config
            master_seed: Seed to record, if the command is seeded
            notes: Extra provenance (e.g. which settings took built-in defaults)

        Returns:
            Path of the manifest
        """
        resolved = self.config_manager.get_config_dict()
        if config:
            resolved["command"] = config
        manifest = RunManifest(command=self.command, config=resolved, master_seed=master_seed,
                               version=__version__, notes=notes or {})
        return self.writer.write_manifest(manifest)
