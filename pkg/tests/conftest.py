from __future__ import annotations

import numpy as np
import pytest

from khovcss.diagram import random_diagram

ACCEPTANCE = pytest.StashKey[dict]()
N_CRITERIA = 10


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def random_diagrams():
    """A fixed batch of 60 pointed braid-closure diagrams with at most 7 crossings."""
    g = np.random.default_rng(2024)
    return [random_diagram(g, max_crossings=7, max_strands=4) for _ in range(60)]


@pytest.fixture
def criterion(request):
    """Record one acceptance line; the summary prints them all in order."""
    store = request.config.stash.setdefault(ACCEPTANCE, {})

    def record(number: int, ok: bool, detail: str) -> None:
        store[number] = (bool(ok), detail)
        print(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    store = config.stash.get(ACCEPTANCE, None)
    if not store:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for n in range(1, N_CRITERIA + 1):
        if n in store:
            ok, detail = store[n]
            terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
        else:
            terminalreporter.write_line(f"criterion {n:2d}: FAIL  (not run or raised before reporting)")
