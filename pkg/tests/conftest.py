import time
from fractions import Fraction

import pytest

from lgpcurve.config import JobConfig, parse_box
from lgpcurve.fixtures import EXAMPLES
from lgpcurve.pipeline import run

_CACHE = {}


def run_example(name, s=None, fresh=False):
    """Pipeline output for a fixture, cached per (name, s) for the session."""
    key = (name, None if s is None else Fraction(s))
    if fresh or key not in _CACHE:
        ex = EXAMPLES[name]
        t = time.time()
        out = run(JobConfig(ex["f"], ex["g"], parse_box(ex["box"], 6), ex["eps"], s=s))
        out.extras["wall"] = time.time() - t
        if fresh:
            return out
        _CACHE[key] = out
    return _CACHE[key]


@pytest.fixture(scope="session")
def ex1():
    return run_example("ex1")


@pytest.fixture(scope="session")
def ex2():
    return run_example("ex2")


@pytest.fixture(scope="session")
def ex3():
    return run_example("ex3")


ACCEPTANCE = {}


def record(n, ok, detail=""):
    ACCEPTANCE[n] = (bool(ok), detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
