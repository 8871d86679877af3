from __future__ import annotations

import shutil
from pathlib import Path

import numpy as np
import pytest

from biovalent.config import DEMO_CONFIG
from biovalent.mrio import RegionSectorIndex


def random_economy(rng: np.random.Generator, n_regions: int = 3, n_sectors: int = 2, max_colsum: float = 0.9):
    """Productive economy with column sums of A below ``max_colsum``; returns (index, A, Y, x)."""
    index = RegionSectorIndex(tuple(f"R{i}" for i in range(n_regions)), tuple(f"S{k}" for k in range(n_sectors)))
    n = len(index)
    A = rng.uniform(0, 1, (n, n))
    A *= rng.uniform(0.05, max_colsum, n) / A.sum(axis=0)
    Y = rng.uniform(0, 10, (n, n_regions))
    x = np.linalg.solve(np.eye(n) - A, Y.sum(axis=1))
    return index, A, Y, x


def neumann(A: np.ndarray, tol: float = 1e-14, max_terms: int = 100_000) -> np.ndarray:
    """Truncated power series I + A + A^2 + ... (independent of any factorization)."""
    n = A.shape[0]
    total = np.eye(n)
    term = np.eye(n)
    for _ in range(max_terms):
        term = term @ A
        total = total + term
        if np.abs(term).max() < tol:
            return total
    raise AssertionError("Neumann series did not converge")


def attribution_oracle(f, L, Y, x, n_regions: int) -> np.ndarray:
    """Explicit loops: diag(s) L y_(j,k), summed over source sectors of each impact region."""
    n = len(x)
    S = n // n_regions
    s = [f[a] / x[a] if x[a] else 0.0 for a in range(n)]
    out = np.zeros((n_regions, n))
    for j in range(n_regions):
        for k in range(S):
            col = j * S + k
            y = np.zeros(n)
            for r in range(n_regions):
                y[r * S + k] = Y[r * S + k, j]
            for a in range(n):
                out[a // S, col] += s[a] * sum(L[a, b] * y[b] for b in range(n))
    return out


@pytest.fixture
def demo_dir(tmp_path) -> Path:
    """Writable copy of the bundled demo fixture."""
    dst = tmp_path / "demo"
    shutil.copytree(DEMO_CONFIG.parent, dst)
    return dst


# --------------------------------------------------------------------------- acceptance summary

_ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): numbered acceptance criterion")


def pytest_runtest_logreport(report):
    marker = getattr(report, "acceptance", None)
    if marker is None:
        return
    number, title = marker
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _ACCEPTANCE[number] = ("PASS" if report.outcome == "passed" else "FAIL", title)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    m = item.get_closest_marker("acceptance")
    if m is not None:
        outcome.get_result().acceptance = m.args


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        status, title = _ACCEPTANCE[number]
        terminalreporter.write_line(f"{status} criterion {number:>2}: {title}")
