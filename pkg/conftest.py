# conftest.py
import random
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from app.models.core import MonomialIdeal, RIdeal, normalize_ideal
from app.models.toric import ToricProblem

settings.register_profile(
    "mldlab",
    derandomize=True,
    max_examples=30,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("mldlab")

EXPONENTS = [Fraction(1, 3), Fraction(1, 2), Fraction(1), Fraction(3, 2)]


# ==============================
# ESTRATÉGIAS
# ==============================

@st.composite
def monomial_ideals(draw, n: int = 2, max_degree: int = 3) -> MonomialIdeal:
    vector = st.tuples(*[st.integers(0, max_degree)] * n).filter(lambda g: 0 < sum(g) <= max_degree)
    return normalize_ideal(draw(st.lists(vector, min_size=1, max_size=4)), n)


@st.composite
def toric_problems(draw, n: int = 2, max_degree: int = 3, max_factors: int = 2) -> ToricProblem:
    count = draw(st.integers(1, max_factors))
    factors = tuple((draw(monomial_ideals(n, max_degree)), draw(st.sampled_from(EXPONENTS)))
                    for _ in range(count))
    return ToricProblem(n, RIdeal(factors))


def rational_exponents():
    return st.sampled_from(EXPONENTS)


# ==============================
# FIXTURES
# ==============================

@pytest.fixture
def rng():
    return random.Random(20240611)


@pytest.fixture
def cusp():
    from app.models.polynomials import Poly2, PolyIdeal

    f = Poly2.from_dict({(2, 0): Fraction(1), (0, 3): Fraction(1)})
    return RIdeal(((PolyIdeal((f,)), Fraction(1)),))


def monomial(n: int, *gens) -> MonomialIdeal:
    return normalize_ideal(gens, n)


def problem(n: int, *factors) -> ToricProblem:
    return ToricProblem(n, RIdeal(tuple((I, Fraction(e)) for I, e in factors)))
