import pytest

from guejump import (CPIIParams, JumpWeightSpec, compute_recurrence,
                     solve_as_pii, solve_cpii)

CANONICAL = JumpWeightSpec(s1=0.3, s2=1.1, omega1=0.4, omega2=0.7)


@pytest.fixture(scope="session")
def canonical_spec():
    return CANONICAL


@pytest.fixture(scope="session")
def canonical_table():
    return compute_recurrence(CANONICAL, 40)


@pytest.fixture(scope="session")
def hermite_table():
    return compute_recurrence(JumpWeightSpec(0.0, 1.0, 1.0, 1.0), 100)


@pytest.fixture(scope="session")
def gap_trajectory():
    # gap-law parameters for the window (-2, 0)
    return solve_cpii(CPIIParams(omega1=0.0, omega2=1.0, s=2.0), x_min=-2.0)


@pytest.fixture(scope="session")
def hm_trajectory():
    # critical single-channel solution down to -6
    return solve_as_pii(0.0, x_min=-6.0, tol=1e-12)
