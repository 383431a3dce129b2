"""Logging-based methods and helpers.
"""

import logging
import sys
from logging import Logger, StreamHandler
from logging.handlers import TimedRotatingFileHandler

FORMATTER = logging.Formatter("%(asctime)s - %(name)s — %(levelname)s — %(message)s")
LOG_FILE = "mobilego.log"


def get_console_handler(stream=None) -> StreamHandler:
    """Gets a console handler to handle logging into console.

    Args:
        stream: Stream to write into (defaults to stdout).

    Returns:
        Handler to output information into console.

    """

    console_handler = StreamHandler(stream or sys.stdout)
    console_handler.setFormatter(FORMATTER)

    return console_handler


def get_timed_file_handler() -> TimedRotatingFileHandler:
    """Gets a timed file handler to handle logging into files.

    Returns:
        Handler to output information into timed files.

    """

    file_handler = TimedRotatingFileHandler(LOG_FILE, delay=True, when="midnight")
    file_handler.setFormatter(FORMATTER)

    return file_handler


def get_logger(logger_name: str) -> Logger:
    """Gets a logger and make it avaliable for further use.

    Args:
        logger_name: The name of the logger.

    Returns:
        Logger instance.

    """

    logger = logging.getLogger(logger_name)

    logger.setLevel(logging.DEBUG)
    if not logger.handlers:
        logger.addHandler(get_console_handler())
        logger.addHandler(get_timed_file_handler())
    logger.propagate = False

    return logger


def redirect_console(stream) -> None:
    """Points the console handler of every mobilego logger to another stream.

    The GTP server speaks over stdout, so its log records must go elsewhere.

    Args:
        stream: New console stream (usually stderr).

    """

    for name, logger in logging.Logger.manager.loggerDict.items():
        if not name.startswith("mobilego") or not isinstance(logger, Logger):
            continue

        for handler in logger.handlers:
            if isinstance(handler, StreamHandler) and not isinstance(
                handler, logging.FileHandler
            ):
                handler.setStream(stream)
