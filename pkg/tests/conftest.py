import random

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from tgr.polyring import FP, QQ, Ring

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


def polynomials(ring: Ring, max_terms: int = 4, max_deg: int = 2, coeff: int = 5):
    """Strategy for small polynomials in ``ring`` with integer coefficients."""
    exps = st.tuples(*[st.integers(0, max_deg)] * ring.nvars)
    coeffs = st.integers(-coeff, coeff).filter(bool)
    return st.dictionaries(exps, coeffs, max_size=max_terms).map(ring.poly)


@pytest.fixture
def rng():
    return random.Random(12345)


@pytest.fixture(params=[QQ, FP], ids=["qq", "fp"])
def field(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import ACCEPTANCE_LINES
    except ImportError:
        return
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
