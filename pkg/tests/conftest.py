import numpy as np
import pytest

from taulift import catalog


@pytest.fixture
def rng():
    return np.random.default_rng(42)


@pytest.fixture(params=catalog.NAMES)
def example(request):
    return catalog.load(request.param)


def in_part(h, side, rng, scale=1.0):
    """Random vector of h(side)."""
    b = h.part(side).basis
    return b @ (scale * rng.normal(size=b.shape[1]))


def in_group(ex, side, rng, scale=0.6):
    """Random element Exp(v) of H(side)."""
    return ex.group.exp(in_part(ex.h, side, rng, scale))


def g_element(ex, idx, rng, scale=0.6):
    """exp of a random combination of the basis vectors idx."""
    x = np.zeros(ex.algebra.dim)
    x[list(idx)] = scale * rng.normal(size=len(idx))
    return ex.rep.exp(x)


ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
