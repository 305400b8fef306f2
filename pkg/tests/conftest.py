import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from perspcone.functions import get_function

# jitted kernels compile on first call, so the first example can be slow
settings.register_profile(
    "default", deadline=None, max_examples=200,
    suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def exp_fn():
    return get_function("exp")


@pytest.fixture(scope="session")
def hyp_fn():
    return get_function("hyperbolic")


@pytest.fixture(scope="session")
def quad_fn():
    return get_function("quadratic")


@pytest.fixture(scope="session")
def rexp_fn():
    return get_function("exp-radial")


@pytest.fixture(scope="session")
def scalar_fns(exp_fn, hyp_fn, quad_fn):
    return {"exp": exp_fn, "hyperbolic": hyp_fn, "quadratic": quad_fn}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_VERDICTS = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_VERDICTS] = []


@pytest.fixture
def verdict(request):
    """Print and remember one PASS/FAIL line for an acceptance criterion."""
    def emit(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        request.config.stash[_VERDICTS].append(line)
        return ok
    return emit


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_VERDICTS, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
