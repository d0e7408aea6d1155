"""
Logging utility module for kernsel.
Configures package-wide logging for command runs and experiments.
"""
import os
import logging
import sys
from datetime import datetime
from typing import Union


class SafeUnicodeFormatter(logging.Formatter):
    """Formatter that never fails on characters the stream cannot encode."""

    def format(self, record):
        """Format the log record, replacing unencodable characters."""
        try:
            formatted = super().format(record)
            formatted.encode('utf-8', errors='replace')
            return formatted
        except (UnicodeEncodeError, UnicodeDecodeError):
            try:
                safe_msg = str(record.getMessage()).encode('utf-8', errors='replace').decode('utf-8')
                record.msg = safe_msg
                record.args = ()
                return super().format(record)
            except Exception:
                return f"{record.levelname}: [Unicode encoding error in log message]"


def setup_logger(log_level: Union[int, str] = logging.INFO, log_to_file: bool = False,
                 log_dir: str = 'logs'):
    """
    Set up package-wide logging.

    Console output goes to stderr so that command summaries printed on stdout
    stay machine readable.

    Args:
        log_level: The logging level, as an int or a level name (default: INFO)
        log_to_file: Whether to also log to a timestamped file (default: False)
        log_dir: Directory for the log file

    Returns:
        The configured root logger
    """
    if isinstance(log_level, str):
        log_level = logging.getLevelName(log_level.upper())
        if not isinstance(log_level, int):
            log_level = logging.INFO

    root_logger = logging.getLogger()
    root_logger.setLevel(log_level)

    # Clear existing handlers to avoid duplicates on repeated CLI calls
    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)

    formatter = SafeUnicodeFormatter(
        '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(formatter)
    root_logger.addHandler(console_handler)

    if log_to_file:
        os.makedirs(log_dir, exist_ok=True)
        log_file = os.path.join(log_dir, f'kernsel_{datetime.now().strftime("%Y%m%d_%H%M%S")}.log')
        file_handler = logging.FileHandler(log_file, encoding='utf-8', errors='replace')
        file_handler.setFormatter(formatter)
        root_logger.addHandler(file_handler)

    return root_logger


def get_logger(name):
    """
    Get a logger for a specific module.

    Args:
        name: The name of the module (typically __name__)

    Returns:
        A logger instance
    """
    return logging.getLogger(name)
