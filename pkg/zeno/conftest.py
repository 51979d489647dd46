# conftest.py
"""
Conftest for ZenoSim. Lives in <project>/zeno/.
Session logger under zeno/logs/<TS>/, seeded random generators, a scratch
output directory and per-test metadata attached to allure.
"""
import json
import os
import time
from pathlib import Path
from typing import Any, Dict

import allure
import numpy as np
import pytest

from core.logger import get_logger

THIS_FILE = Path(__file__).resolve()
ZENO_ROOT = THIS_FILE.parent
PROJECT_ROOT = ZENO_ROOT.parent
TS = os.getenv("ZENOSIM_TS", time.strftime("%Y%m%d_%H%M%S"))
LOG_DIR = Path(os.getenv("ZENOSIM_LOG_DIR", str(ZENO_ROOT / "logs")))


def pytest_addoption(parser):
    parser.addoption("--seed", action="store", type=int, default=int(os.getenv("ZENOSIM_SEED", "20240601")))
    parser.addoption("--sim-log-level", action="store", default=os.getenv("ZENOSIM_LOG_LEVEL", "INFO"))


@pytest.fixture(scope="session")
def logger(pytestconfig):
    return get_logger(LOG_DIR, TS, level=pytestconfig.getoption("sim_log_level"))


@pytest.fixture(scope="session")
def seed(pytestconfig) -> int:
    return int(pytestconfig.getoption("seed"))


@pytest.fixture(scope="function")
def rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


@pytest.fixture(scope="function")
def tmp_out(tmp_path) -> Path:
    out = tmp_path / "out"
    out.mkdir(parents=True, exist_ok=True)
    return out


@pytest.fixture(scope="function", autouse=True)
def test_metadata(request, seed):
    meta: Dict[str, Any] = {"nodeid": request.node.nodeid, "seed": seed, "start_time": time.time()}
    request.node._zenosim_meta = meta  # type: ignore
    yield meta
    meta["end_time"] = time.time()


@pytest.hookimpl(tryfirst=True, hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when != "call":
        return
    meta = getattr(item, "_zenosim_meta", {})
    if rep.failed and meta:
        meta["failed"] = True
        meta["duration"] = rep.duration
        try:
            allure.attach(json.dumps(meta, indent=2, default=str), name="test_metadata",
                          attachment_type=allure.attachment_type.JSON)
        except Exception:
            pass


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running numerical checks")
    config.addinivalue_line("markers", "smoke: fast checks of the main paths")
    config.addinivalue_line("markers", "acceptance: end-to-end reproduction criteria")
