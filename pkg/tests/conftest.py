import numpy as np
import pytest

from logmaj.ensembles import case_rng

CRITERIA = {
    1: "Araki log-majorization suite",
    2: "Two-pair Araki suite and reductions",
    3: "Renyi divergence monotonicity, log-convexity, scalar values",
    4: "Golden-Thompson suite, block equality triple, quadrature mass",
    5: "Karcher mean suite",
    6: "Taylor expansion suite",
    7: "Equality-condition suite",
    8: "Lie-Trotter-Kato suite",
    9: "Full run of all suites",
}

_outcomes: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n): test belongs to acceptance criterion n")


def pytest_runtest_logreport(report):
    n = getattr(report, "criterion", None)
    if n is None:
        return
    if report.when == "call" or report.outcome != "passed":
        prev = _outcomes.get(n, "passed")
        _outcomes[n] = "failed" if "failed" in (prev, report.outcome) else report.outcome


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("acceptance")
    if marker is not None:
        outcome.get_result().criterion = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n, title in CRITERIA.items():
        status = _outcomes.get(n)
        label = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}.get(status, "NOT RUN")
        terminalreporter.write_line(f"criterion {n}: {label}  {title}")


@pytest.fixture
def rng(request):
    return case_rng(20240607, request.node.name, 0)


def random_pd(rng, m, shift=0.1):
    G = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    return G.conj().T @ G / m + shift * np.eye(m)


def random_herm(rng, m, scale=1.0):
    G = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    return scale * (G + G.conj().T) / 2
