import random

import pytest
from hypothesis import strategies as st

from cubicfl import default_params, make_field
from cubicfl.orbits import orbit_field


@pytest.fixture(scope="session")
def fld7():
    return make_field(7, 16)


@pytest.fixture(scope="session")
def fld13():
    return make_field(13, 16)


@pytest.fixture(scope="session")
def params7(fld7):
    return default_params(fld7)


@pytest.fixture(scope="session")
def params13(fld13):
    return default_params(fld13)


@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture(scope="session")
def ofld7():
    return orbit_field(7)


def unit_ints(p: int):
    return st.integers(min_value=1, max_value=p**4 - 1).filter(lambda n: n % p)


def padic_numbers(fld, min_val=-4, max_val=4):
    """Nonzero u * rho^k * p^m with u an integer unit."""
    return st.builds(
        lambda u, k, m: fld.element(u, k, m),
        unit_ints(fld.p),
        st.integers(0, 2),
        st.integers(min_val, max_val),
    )


def power_residue_exponent(u: int, p: int, rho_residue: int) -> int:
    """k with u^((p-1)/3) = rho^k mod p, from plain modular powers."""
    target = pow(u % p, (p - 1) // 3, p)
    for k in range(3):
        if pow(rho_residue, k, p) == target:
            return k
    raise AssertionError("not a cube root of unity")


def tame_symbol_exponent(a, b, orientation: int = 1) -> int:
    """Independent tame-symbol evaluation of (a, b)_3 as an exponent of rho."""
    p = a.field.p
    alpha, beta = a.val, b.val
    sign = -1 if (alpha * beta) % 2 else 1
    ua, ub = a.unit % p, b.unit % p
    value = sign * pow(ua, beta, p) * pow(ub, -alpha, p) % p
    return orientation * power_residue_exponent(value, p, a.field.rho_residue) % 3


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import ACCEPTANCE_LINES

    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[number])
