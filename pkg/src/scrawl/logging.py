"""Set up logging for training, evaluation and data preparation runs."""

import atexit
from contextlib import suppress
import contextvars
import copy
import importlib
import logging
import logging.handlers
from pathlib import Path
import queue
import time
from typing import Any

from .config.merge import deep_merge
from .constants import APP_NAME, DATALOGGER_NAME, TRAINLOGGER_NAME

# --- Default Logging Configuration ---
DEFAULT_LOGGING_CONFIG: dict[str, Any] = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "standard": {
            "format": "[%(asctime)s] [%(levelname)s] %(name)s: %(message)s",
            "datefmt": "%Y-%m-%d %H:%M:%S",
        },
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "standard",
            "level": "INFO",
        },
        "file": {
            "class": "logging.FileHandler",
            "formatter": "standard",
            "filename": "",  # set by setup_logging
            "level": "DEBUG",
        },
    },
    "loggers": {
        APP_NAME: {
            "handlers": ["console", "file"],
            "level": "DEBUG",
            "propagate": False,
        },
        TRAINLOGGER_NAME: {
            "handlers": ["console", "file"],
            "level": "DEBUG",
            "propagate": False,
        },
        DATALOGGER_NAME: {
            "handlers": ["console", "file"],
            "level": "DEBUG",
            "propagate": False,
        },
    },
    "root": {
        "handlers": ["console"],
        "level": "WARNING",
    },
}

LOGLEVELS = {0: logging.WARNING, 1: logging.INFO, 2: logging.DEBUG}

_LOGGING_STATE: dict[str, contextvars.ContextVar] = {
    "listener": contextvars.ContextVar("listener", default=None),
    "handlers": contextvars.ContextVar("handlers", default=None),
}


def _shutdown_logging() -> None:
    """Stop the queue listener and close all handlers."""
    listener = _LOGGING_STATE["listener"].get()
    handlers: list[logging.Handler] = _LOGGING_STATE["handlers"].get() or []

    if listener:
        with suppress(Exception):
            listener.stop()

    for handler in handlers:
        with suppress(Exception):
            handler.close()

    _LOGGING_STATE["listener"].set(None)
    _LOGGING_STATE["handlers"].set([])


def _resolve_class(path: str) -> type:
    """Import and return a class from its dotted path."""
    module_name, class_name = path.rsplit(".", 1)
    module = importlib.import_module(module_name)
    return getattr(module, class_name)


def build_handlers_from_config(config: dict[str, Any]) -> list[logging.Handler]:
    """Build handler instances from a logging config dict.

    No listener is started and no global state is touched, so the
    function can be used on its own in tests.

    :param config: A dictionary following the :func:`logging.config.dictConfig` schema.
    :return: The handlers in the order of the ``handlers`` table.
    """
    built: list[logging.Handler] = []
    handler_keys = ("class", "class_name", "formatter", "level", "filters")
    formatters = config.get("formatters", {})

    for hconf in config.get("handlers", {}).values():
        cls = _resolve_class(hconf.get("class") or hconf["class_name"])
        kwargs = {k: v for k, v in hconf.items() if k not in handler_keys}
        handler = cls(**kwargs)
        handler.setLevel(hconf.get("level") or "NOTSET")

        formatter_name = hconf.get("formatter")
        if formatter_name in formatters:
            fconf = formatters[formatter_name]
            fmt_kwargs = {
                "fmt": fconf.get("format"),
                "datefmt": fconf.get("datefmt"),
                "style": fconf.get("style"),
            }
            fmt_cls = _resolve_class(fconf.get("class") or "logging.Formatter")
            handler.setFormatter(
                fmt_cls(**{k: v for k, v in fmt_kwargs.items() if v is not None})
            )

        built.append(handler)

    return built


def setup_logging(
    cliverbosity: int, log_dir: Path, user_config: dict[str, Any] | None = None
) -> None:
    """Set up a non-blocking, configurable logging system.

    Records are put on a queue and written by a background listener, so
    long numerical loops never block on console or file output.

    :param cliverbosity: Number of ``-v`` flags; sets the console level.
    :param log_dir: Directory for the timestamped debug log file.
    :param user_config: Optional ``{"logging": {...}}`` table merged over
        :data:`DEFAULT_LOGGING_CONFIG`.
    """
    config = copy.deepcopy(DEFAULT_LOGGING_CONFIG)
    if user_config and "logging" in user_config:
        config = deep_merge(config, user_config["logging"])

    verbosity_level = LOGLEVELS.get(min(cliverbosity, 2), logging.WARNING)
    config["handlers"]["console"]["level"] = logging.getLevelName(verbosity_level)

    log_dir.mkdir(mode=0o700, parents=True, exist_ok=True)
    timestamp = time.strftime("%Y-%m-%d_%H-%M-%S")
    config["handlers"]["file"]["filename"] = str(log_dir / f"{APP_NAME}_{timestamp}.log")

    handlers = build_handlers_from_config(config)

    log_queue: queue.Queue = queue.Queue(-1)
    queue_handler = logging.handlers.QueueHandler(log_queue)
    listener = logging.handlers.QueueListener(
        log_queue, *handlers, respect_handler_level=True
    )
    listener.start()

    for lname, lconf in config["loggers"].items():
        logger = logging.getLogger(lname)
        logger.setLevel(lconf["level"])
        logger.addHandler(queue_handler)
        logger.propagate = lconf.get("propagate", False)

    root_logger = logging.getLogger()
    root_logger.setLevel(config["root"]["level"])
    root_logger.addHandler(queue_handler)

    _LOGGING_STATE["listener"].set(listener)
    _LOGGING_STATE["handlers"].set(handlers)
    atexit.register(_shutdown_logging)
