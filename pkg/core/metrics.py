# core/metrics.py
"""
Run metrics: wall-clock timers and counters (scenarios, time points, flagged samples).
Safe to share between sweep worker threads.

Usage:
    from core.metrics import Metrics
    m = Metrics()
    with m.timed("scenario:fig2a"):
        ...
    m.incr("flagged_samples", series.flagged)
    m.to_dict()
"""
from __future__ import annotations
import threading
import time
from contextlib import contextmanager
from typing import Any, Dict, Optional


class Timer:
    def __init__(self):
        self._start: Optional[float] = None
        self._end: Optional[float] = None

    def start(self):
        self._start = time.perf_counter()
        self._end = None

    def stop(self):
        if self._start is None:
            return
        self._end = time.perf_counter()

    @property
    def elapsed(self) -> float:
        if self._start is None:
            return 0.0
        if self._end is None:
            return time.perf_counter() - self._start
        return self._end - self._start


class Metrics:
    def __init__(self):
        self.counters: Dict[str, int] = {}
        self.timers: Dict[str, Timer] = {}
        self._lock = threading.Lock()

    def incr(self, name: str, by: int = 1):
        with self._lock:
            self.counters[name] = self.counters.get(name, 0) + int(by)

    def get_counter(self, name: str) -> int:
        return int(self.counters.get(name, 0))

    def start_timer(self, name: str):
        t = Timer()
        t.start()
        with self._lock:
            self.timers[name] = t

    def stop_timer(self, name: str):
        t = self.timers.get(name)
        if t:
            t.stop()

    def get_timer(self, name: str) -> float:
        t = self.timers.get(name)
        return float(t.elapsed) if t else 0.0

    @contextmanager
    def timed(self, name: str):
        self.start_timer(name)
        try:
            yield
        finally:
            self.stop_timer(name)

    def to_dict(self) -> Dict[str, Any]:
        with self._lock:
            return {
                "counters": dict(self.counters),
                "timers": {k: v.elapsed for k, v in self.timers.items()},
            }
