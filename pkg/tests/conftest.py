import numpy as np
import pytest

from qgauge.domains import CATALOG

SMOOTH = [n for n, e in CATALOG.items() if e.expected.smooth_boundary]
SMOOTH_QB = [n for n in SMOOTH if CATALOG[n].expected.quasi_balanced]
SMOOTH_PSC = [n for n in SMOOTH_QB if CATALOG[n].expected.pseudoconvex]


@pytest.fixture(scope="session")
def domains():
    return {name: entry.domain() for name, entry in CATALOG.items()}


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


def random_annulus(rng, n, rmin, rmax):
    d = rng.standard_normal(2 * n)
    return d / np.linalg.norm(d) * rng.uniform(rmin, rmax)


ACCEPTANCE: dict[str, tuple[bool, str]] = {}


@pytest.fixture
def record():
    def _record(criterion: str, passed: bool, detail: str) -> bool:
        ACCEPTANCE[criterion] = (bool(passed), detail)
        return bool(passed)

    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k[2:])):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{key:<5} {'PASS' if ok else 'FAIL'}  {detail}")
