"""Logging setup shared by the CLI and library entry points"""

import logging
import os

from netbalance.core.config import settings

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'


def setup_logging(level: str | None = None, log_dir: str | None = None,
                  log_file: str | None = None) -> logging.Logger:
    """
    Configure root logging for netbalance.

    Console output always; a file handler is added when a log directory is
    configured (argument or NETBALANCE_LOG_DIR).

    Args:
        level: Level name, defaults to settings (DEBUG when settings.DEBUG)
        log_dir: Directory for the log file
        log_file: Log file name inside log_dir

    Returns:
        The package logger
    """
    if level is None:
        level = "DEBUG" if settings.DEBUG else settings.LOG_LEVEL
    log_dir = log_dir if log_dir is not None else settings.LOG_DIR

    handlers: list[logging.Handler] = [logging.StreamHandler()]
    if log_dir:
        os.makedirs(log_dir, exist_ok=True)
        log_path = os.path.join(log_dir, log_file or settings.LOG_FILE)
        handlers.append(logging.FileHandler(log_path))

    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format=LOG_FORMAT,
        handlers=handlers,
        force=True,
    )
    return logging.getLogger("netbalance")
