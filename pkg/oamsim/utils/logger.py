"""Logging utilities for oamsim."""
import logging
import sys
from typing import Optional, Union
from pythonjsonlogger import jsonlogger
from pathlib import Path

ROOT_LOGGER = "oamsim"


def _formatter() -> logging.Formatter:
    return jsonlogger.JsonFormatter(
        '%(asctime)s %(levelname)s %(name)s %(message)s',
        rename_fields={'levelname': 'level', 'asctime': 'timestamp'}
    )


def add_file_handler(log_file: Union[str, Path], name: str = ROOT_LOGGER) -> logging.Handler:
    """
    Also write the records of a logger to a file.

    Adding the same file twice returns the existing handler.
    """
    logger = logging.getLogger(name)
    log_path = Path(log_file).resolve()
    for handler in logger.handlers:
        if isinstance(handler, logging.FileHandler) and Path(handler.baseFilename) == log_path:
            return handler

    log_path.parent.mkdir(parents=True, exist_ok=True)
    file_handler = logging.FileHandler(log_path)
    file_handler.setFormatter(_formatter())
    logger.addHandler(file_handler)
    return file_handler


def setup_logger(name: str, log_file: Optional[str] = None, level: Union[int, str] = logging.INFO) -> logging.Logger:
    """
    Set up a logger with JSON formatting.

    Module loggers (oamsim.*) get no handlers of their own; their records
    propagate to the oamsim logger, which writes them once.

    Args:
        name: Logger name (typically module name)
        log_file: Optional file path to write logs
        level: Logging level (default: INFO)

    Returns:
        Configured logger instance
    """
    logger = logging.getLogger(name)
    logger.setLevel(level)

    if name.startswith(ROOT_LOGGER + "."):
        if log_file:
            add_file_handler(log_file)
        return logger

    # Avoid duplicate handlers
    if logger.handlers:
        return logger

    # Logs go to stderr so stdout stays free for CLI tables
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setFormatter(_formatter())
    logger.addHandler(console_handler)

    if log_file:
        add_file_handler(log_file, name)

    return logger


def set_level(level: Union[int, str]):
    """Change the level of every oamsim logger already created."""
    for name in list(logging.root.manager.loggerDict):
        if name == ROOT_LOGGER or name.startswith(ROOT_LOGGER + "."):
            logging.getLogger(name).setLevel(level)


# Default logger
logger = setup_logger(ROOT_LOGGER)
