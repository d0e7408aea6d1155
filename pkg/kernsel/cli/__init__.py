"""
Command-line front end: one module per subcommand, each exposing
``register(subparsers)`` and ``run(args) -> int``.
"""
from . import diagnose_cmd, sample_cmd, select_cmd, sweep_cmd

COMMANDS = (select_cmd, sweep_cmd, diagnose_cmd, sample_cmd)
