from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from hitchinq.linalg import ExactMatrix
from hitchinq.seeds import default_spec, hitchin_seed

settings.register_profile("default", max_examples=100, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

small_fractions = st.builds(Fraction, st.integers(-9, 9), st.integers(1, 6))


def exact_matrices(n: int):
    return st.lists(st.lists(small_fractions, min_size=n, max_size=n), min_size=n, max_size=n).map(ExactMatrix)


@st.composite
def sl2_elements(draw):
    """Random exact SL(2, Q) elements as products of elementary matrices."""
    m = ExactMatrix.identity(2)
    for _ in range(draw(st.integers(1, 4))):
        x = draw(small_fractions)
        kind = draw(st.sampled_from("ULD"))
        if kind == "U":
            e = ExactMatrix([[1, x], [0, 1]])
        elif kind == "L":
            e = ExactMatrix([[1, 0], [x, 1]])
        else:
            d = x if x else Fraction(2)
            e = ExactMatrix([[d, 0], [0, 1 / d]])
        m = m @ e
    return m


@pytest.fixture(scope="session")
def seed_sl3():
    return hitchin_seed(3, 3, default_spec(3, "sl"))


@pytest.fixture(scope="session")
def seed_sp4():
    return hitchin_seed(3, 4, default_spec(4, "sp"))


@pytest.fixture(scope="session")
def seed2_sl3():
    return hitchin_seed(2, 3, default_spec(3, "sl"))
