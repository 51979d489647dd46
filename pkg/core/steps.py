# core/steps.py
"""Named pipeline steps: context manager + decorator, logged and mirrored as allure steps.

Inside a pytest run with allure-pytest the steps appear in the report;
outside it ``allure.step`` is a no-op wrapper, so the CLI can use the same
helpers.
"""
from __future__ import annotations
import functools
import logging
import threading
import time
from contextlib import contextmanager, nullcontext
from typing import Any, Callable, Optional

from allure import step as allure_step  # type: ignore

logger = logging.getLogger("zenosim.steps")


@contextmanager
def step(name: str, *, level: str = "INFO"):
    """
    Log STEP START / STEP END (elapsed) around a block.
    Example:
        with step("evolve exact"):
            traj = evolve_exact(sys_, psi0, times)
    """
    lvl = getattr(logging, level.upper(), logging.INFO)
    start = time.perf_counter()
    logger.log(lvl, "STEP START: %s", name)
    try:
        # allure step context is per test thread; sweep workers only log
        ctx = allure_step(name) if threading.current_thread() is threading.main_thread() else nullcontext()
        with ctx:
            yield
    except Exception:
        logger.log(lvl, "STEP FAIL : %s (%.3fs)", name, time.perf_counter() - start)
        raise
    else:
        logger.log(lvl, "STEP END  : %s (%.3fs)", name, time.perf_counter() - start)


def step_decorator(name: Optional[str] = None, *, level: str = "INFO"):
    """
    Wrap a function in a step; the function name is used when name is None.
    Usage:
        @step_decorator("closed-form dressing sweep", level="DEBUG")
        def dressing_sweep(sys_, gammas): ...
    """
    def _decorator(fn: Callable[..., Any]):
        step_name = name or fn.__name__

        @functools.wraps(fn)
        def _wrapper(*a, **k):
            with step(step_name, level=level):
                return fn(*a, **k)
        return _wrapper
    return _decorator
