# -*- coding: utf-8 -*-
import logging
import sys
from logging.handlers import RotatingFileHandler
from typing import Optional

from .constants import APP_NAME, LOG_FILE, LOGS_DIR, DEFAULT_LOGGING_ENABLED

# --- Formats ---
FILE_FORMAT = '%(asctime)s - %(levelname)s - [%(threadName)s %(filename)s:%(lineno)d] - %(message)s'
CONSOLE_FORMAT = f'{APP_NAME}: %(levelname)s: %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'

LOG_MAX_BYTES = 5 * 1024 * 1024
LOG_BACKUPS = 5

logger = logging.getLogger(APP_NAME)
logger.propagate = False

_console_handler: Optional[logging.Handler] = None


def _install_handlers():
    """Console on stderr (stdout carries command output) plus a rotating debug file."""
    global _console_handler
    if logger.handlers:
        return
    _console_handler = logging.StreamHandler(sys.stderr)
    _console_handler.setLevel(logging.WARNING)
    _console_handler.setFormatter(logging.Formatter(CONSOLE_FORMAT))
    logger.addHandler(_console_handler)

    try:
        LOGS_DIR.mkdir(parents=True, exist_ok=True)
        file_handler = RotatingFileHandler(LOG_FILE, maxBytes=LOG_MAX_BYTES, backupCount=LOG_BACKUPS,
                                           encoding='utf-8', delay=True)
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(logging.Formatter(FILE_FORMAT, datefmt=DATE_FORMAT))
        logger.addHandler(file_handler)
    except OSError as e:
        # console only
        logger.error(f"File logging unavailable ({LOG_FILE}): {e}")


# --- Global Toggle ---
_logging_enabled = DEFAULT_LOGGING_ENABLED


def set_logging_enabled(enabled: bool):
    """Globally enable or disable logging output (the settings key 'logging_enabled')."""
    global _logging_enabled
    _logging_enabled = enabled
    logger.setLevel(logging.DEBUG if enabled else logging.CRITICAL + 1)


def is_logging_enabled() -> bool:
    return _logging_enabled


def set_console_level(level: int):
    """Console verbosity only; the log file keeps everything from DEBUG up."""
    if _console_handler is not None:
        _console_handler.setLevel(level)


# --- Convenience Methods ---
# The global toggle applies through the logger level.

def log_debug(msg, *args, **kwargs):
    logger.debug(msg, *args, **kwargs)

def log_info(msg, *args, **kwargs):
    logger.info(msg, *args, **kwargs)

def log_warning(msg, *args, **kwargs):
    logger.warning(msg, *args, **kwargs)

def log_error(msg, *args, exc_info=True, **kwargs):
    logger.error(msg, *args, exc_info=exc_info, **kwargs)

def log_critical(msg, *args, **kwargs):
    logger.critical(msg, *args, **kwargs)


_install_handlers()
set_logging_enabled(DEFAULT_LOGGING_ENABLED)
