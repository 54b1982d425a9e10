"""
Package logger.

A single named logger with a console handler and, when a log directory is
configured through ``CUBEABS_LOG_DIR``, a debug-level file handler.
"""

from __future__ import annotations

from datetime import datetime
import os
import logging

__all__ = ["get_logger", "logfile", "logger", "set_console_level"]

_LOGFILE: str | None = None


def get_logger(name: str = "cubeabs") -> logging.Logger:
    """
    Access the package logger, creating its handlers on first use.

    Args:
        name: name of the logger instance.

    Returns:
        An instance of the Python :class:`logging.Logger`.
    """
    global _LOGFILE

    _logger = logging.getLogger(name)

    if not _logger.hasHandlers():
        _logger.setLevel(logging.DEBUG)

        stdout_formatter = logging.Formatter("%(levelname)s -- %(message)s")
        sh = logging.StreamHandler()
        sh.setLevel(os.environ.get("CUBEABS_LOG_LEVEL", "WARNING").upper())
        sh.setFormatter(stdout_formatter)
        _logger.addHandler(sh)

        logdir = os.environ.get("CUBEABS_LOG_DIR")
        if logdir:
            try:
                os.makedirs(logdir, exist_ok=True)
            except OSError:
                logdir = None

        if logdir:
            date_time = datetime.now().strftime("%Y%m%d-%H%M%S")
            _LOGFILE = os.path.join(logdir, f"cubeabs-{date_time}.log")
            file_formatter = logging.Formatter(
                "%(asctime)s\t%(levelname)s\tmodule:%(module)s\n%(message)s",
            )
            fh = logging.FileHandler(_LOGFILE)
            fh.setLevel(logging.DEBUG)
            fh.setFormatter(file_formatter)
            _logger.addHandler(fh)
            _logger.info(f"Logging into `{_LOGFILE}`.")

        _logger.propagate = False

    return _logger


def logfile() -> str | None:
    """Path of the current log file, if logging to disk."""
    return _LOGFILE


def set_console_level(level: str) -> None:
    """Change the level of the console handler only."""
    for handler in logger.handlers:
        if isinstance(handler, logging.StreamHandler) and not isinstance(
            handler, logging.FileHandler
        ):
            handler.setLevel(level.upper())


logger = get_logger()
