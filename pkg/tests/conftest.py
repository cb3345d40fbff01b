"""Shared fixtures: eigen-data and the (expensive) end-to-end runs, computed once per session."""

import os

import pytest
from hypothesis import HealthCheck, settings

from eigentangent import pipeline
from eigentangent.quadfield import QuadField

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

# (d, level generator, prime generator, p, published digits), Bianchi table rows in order
BIANCHI_ROWS = [
    (-11, "9+sqrt(-11)", "(1+sqrt(-11))/2", 3, "2 + 2*3 + 3^3 + 2*3^4 + O(3^5)"),
    (-11, "6-sqrt(-11)", "(-3+sqrt(-11))/2", 5, "3 + 2*5 + 4*5^2 + 5^3 + O(5^4)"),
    (-11, "(9+5*sqrt(-11))/2", "(3+sqrt(-11))/2", 5, "4 + 4*5 + O(5^4)"),
    (-3, "(17+sqrt(-3))/2", "(5+sqrt(-3))/2", 7, "2 + 2*7 + 3*7^2 + 4*7^3 + O(7^4)"),
]
BIANCHI_DIGITS = [5, 4, 4, 4]


@pytest.fixture(scope="session")
def entries():
    return pipeline.load_eigendata()


class RunCache:
    """Memoized pipeline runs keyed by their arguments."""

    def __init__(self, entries):
        self.entries = entries
        self._store = {}

    def elliptic(self, label, p, digits, depth=None):
        key = ("e", label, p, digits, depth)
        if key not in self._store:
            data = pipeline.find_elliptic(self.entries, label)
            self._store[key] = pipeline.elliptic_deformation(data, p, digits, depth=depth)
        return self._store[key]

    def bianchi(self, row, depth=None, probe=(1, 1)):
        d, level, prime, p, _ = BIANCHI_ROWS[row]
        return self.bianchi_at(d, level, prime, BIANCHI_DIGITS[row], depth=depth, probe=probe)

    def bianchi_at(self, d, level, prime, digits, depth=None, probe=(1, 1)):
        key = ("b", d, level, prime, digits, depth, probe)
        if key not in self._store:
            K = QuadField(d)
            data = pipeline.find_bianchi(self.entries, d, K.parse(level))
            self._store[key] = pipeline.bianchi_deformation(data, K.parse(prime), digits, depth=depth,
                                                            probe=probe)
        return self._store[key]


@pytest.fixture(scope="session")
def runs(entries):
    return RunCache(entries)


def pytest_terminal_summary(terminalreporter):
    import acceptance_report

    if not any(acceptance_report.RESULTS.values()):
        return
    terminalreporter.section("acceptance criteria")
    for line in acceptance_report.summary_lines():
        terminalreporter.write_line(line)
