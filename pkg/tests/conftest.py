import os
from pathlib import Path

import numpy as np
import pytest

from forcembed import kernels

DATA_DIR = Path(__file__).parent / "data"

_acceptance_lines: list[str] = []


def record_acceptance(criterion: str, passed: bool, detail: str) -> None:
    _acceptance_lines.append(f"{criterion}: {'PASS' if passed else 'FAIL'} - {detail}")


def record_not_run(criterion: str, reason: str) -> None:
    _acceptance_lines.append(f"{criterion}: NOT RUN - {reason}")


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)


@pytest.fixture(params=kernels.AVAILABLE)
def backend(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def find_dataset(name: str, env: str) -> Path | None:
    """Directory holding a dataset, from ``$env`` or ``tests/data/<name>``."""
    candidates = [os.environ.get(env), DATA_DIR / name]
    for c in candidates:
        if c and Path(c).is_dir():
            return Path(c)
    return None
