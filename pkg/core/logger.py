# core/logger.py
"""
Centralized logger helper.

Usage:
    from core.logger import get_logger, enable_verbose_console
    logger = get_logger("/path/to/logs", "20261017_101500")
    enable_verbose_console(logger, level="DEBUG")   # optional: show solver steps
    logger.info("sweep finished")

Engine modules log through child loggers of ``zenosim`` (``zenosim.ewa``,
``zenosim.lindblad``, ...). ``get_logger`` attaches the handlers to the run
logger and to the ``zenosim`` parent so those records land in the same file.
"""
from __future__ import annotations
import json
import logging
from pathlib import Path
from typing import Union

ROOT_LOGGER = "zenosim"


class JsonFormatter(logging.Formatter):
    def format(self, record: logging.LogRecord) -> str:
        payload = {
            "time": getattr(record, "created", None),
            "level": record.levelname,
            "name": record.name,
            "msg": record.getMessage(),
        }
        if record.exc_info:
            payload["exc"] = self.formatException(record.exc_info)
        return json.dumps(payload, default=str)


def get_logger(log_dir: Union[str, Path], ts: str, level: str = "INFO") -> logging.Logger:
    """
    Return a configured logger that writes JSON-lines to log_dir/<ts>/run.log
    and friendly messages to the console.

    Idempotent per ts: calling repeatedly with same ts returns same logger instance.
    """
    log_dir = Path(log_dir)
    file_dir = log_dir if log_dir.name == ts else log_dir / ts
    file_dir.mkdir(parents=True, exist_ok=True)
    file_path = file_dir / "run.log"

    logger = logging.getLogger(f"{ROOT_LOGGER}.run.{ts}")
    if logger.handlers:
        return logger

    lvl = getattr(logging, level.upper(), logging.INFO)
    logger.setLevel(lvl)

    console = logging.StreamHandler()
    console.setFormatter(logging.Formatter("%(asctime)s [%(levelname)s] %(message)s"))
    fh = logging.FileHandler(str(file_path), encoding="utf-8")
    fh.setFormatter(JsonFormatter())

    logger.addHandler(console)
    logger.addHandler(fh)
    logger.propagate = False

    # engine modules log below the root; route them into the same sinks
    root = logging.getLogger(ROOT_LOGGER)
    root.setLevel(lvl)
    for h in list(root.handlers):
        if getattr(h, "zenosim_run", False):
            root.removeHandler(h)
    for h in (console, fh):
        setattr(h, "zenosim_run", True)
        root.addHandler(h)

    logger.info(f"Logger initialized; writing json-lines to {file_path}")
    return logger


def enable_verbose_console(logger: logging.Logger, level: Union[str, int] = logging.DEBUG,
                           show_module: bool = False) -> None:
    """
    Add (or adjust) a verbose console handler on the provided logger.
    Idempotent: a second call only changes the level.
    """
    lvl = level if isinstance(level, int) else getattr(logging, str(level).upper(), logging.DEBUG)

    for h in logger.handlers:
        if getattr(h, "zenosim_verbose", False):
            h.setLevel(lvl)
            return

    fmt = "%(asctime)s [%(levelname)s] %(message)s"
    if show_module:
        fmt = "%(asctime)s [%(levelname)s] %(name)s:%(module)s:%(lineno)d - %(message)s"

    h = logging.StreamHandler()
    h.setLevel(lvl)
    h.setFormatter(logging.Formatter(fmt))
    setattr(h, "zenosim_verbose", True)
    logger.addHandler(h)
    logger.setLevel(min(logger.level, lvl))
    logging.getLogger(ROOT_LOGGER).setLevel(min(logging.getLogger(ROOT_LOGGER).level or lvl, lvl))
