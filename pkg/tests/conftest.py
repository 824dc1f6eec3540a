from __future__ import annotations

import random

import pytest
from hypothesis import strategies as st

from nilpairs.field import GF, Q
from nilpairs.exactmat import DenseMatrix, SingularMatrixError, mat_inverse

FIELDS = [Q, GF(2), GF(3), GF(7)]


def field_id(F):
    return repr(F)


@pytest.fixture
def rng():
    return random.Random(20261016)


def random_matrix(F, rows, cols, rng, bound=5):
    if F.modulus is None:
        return DenseMatrix(F, [[rng.randint(-bound, bound) for _ in range(cols)] for _ in range(rows)])
    return DenseMatrix(F, [[rng.randrange(F.modulus) for _ in range(cols)] for _ in range(rows)])


def random_invertible(F, n, rng):
    while True:
        X = random_matrix(F, n, n, rng)
        try:
            mat_inverse(X)
        except SingularMatrixError:
            continue
        return X


def elements(F):
    """Hypothesis strategy for raw elements of F."""
    if F.modulus is None:
        return st.fractions(max_denominator=20).filter(lambda q: abs(q.numerator) < 10**6).map(F)
    return st.integers(0, F.modulus - 1)


_ACCEPTANCE: dict[int, tuple[str, str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    number, title = marker
    if report.when == "call" or report.outcome == "failed":
        state = "PASS" if report.passed else "FAIL"
        if _ACCEPTANCE.get(number, ("PASS",))[0] == "PASS":
            _ACCEPTANCE[number] = (state, title)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        outcome.get_result().criterion = tuple(marker.args)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        state, title = _ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number}: {state}  {title}")
