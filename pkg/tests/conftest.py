from importlib.resources import files

import pytest

from htnkit import _kernels
from htnkit.core import ops
from htnkit.io import parse_domain, parse_problem

FIXTURES = files("htnkit") / "fixtures"

# test id -> "PASS"/"FAIL" for the acceptance summary
ACCEPTANCE = {}


def fixture_text(name):
    return (FIXTURES / name).read_text()


def load(domain_name, problem_name=None):
    domain = parse_domain(fixture_text(domain_name), domain_name)
    if problem_name is None:
        return domain
    return domain, parse_problem(fixture_text(problem_name), domain, problem_name)


KERNELS = ["python"] + (["cython"] if _kernels.match_compiled is not None else [])


@pytest.fixture(params=KERNELS)
def kernel(request, monkeypatch):
    """Run the test once per matcher implementation."""
    impl = _kernels.match_pure if request.param == "python" else _kernels.match_compiled
    monkeypatch.setattr(ops._kernels, "match", impl)
    return request.param


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        name = report.nodeid.split("::")[-1]
        ACCEPTANCE[name] = "PASS" if report.passed else "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE, key=lambda n: int(n.split("_")[1][1:])):
        terminalreporter.write_line(f"{ACCEPTANCE[name]}  {name}")
