from fractions import Fraction

import pytest
from hypothesis import given

from app.models.core import (
    NEG_INF,
    POS_INF,
    ExtRat,
    InputError,
    InvariantViolation,
    MldResult,
    RIdeal,
    WeightVector,
    ideal_contains,
    max_ideal,
    monomials_of_degree,
    normalize_ideal,
    sum_with_power_of_max_ideal,
    to_rat,
)
from conftest import monomial, monomial_ideals


def test_to_rat_accepts_exact_values_only():
    assert to_rat("5/6") == Fraction(5, 6)
    assert to_rat(3) == Fraction(3)
    with pytest.raises(InputError):
        to_rat(0.5)
    with pytest.raises(InputError):
        to_rat(True)
    with pytest.raises(InputError):
        to_rat("1/0")


def test_ext_rat_order_and_text():
    values = [ExtRat.finite(2), POS_INF, NEG_INF, ExtRat.finite(Fraction(-1, 3))]
    assert sorted(values) == [NEG_INF, ExtRat.finite(Fraction(-1, 3)), ExtRat.finite(2), POS_INF]
    assert str(NEG_INF) == "-inf"
    assert str(ExtRat.finite(Fraction(5, 6))) == "5/6"
    assert ExtRat.parse("-inf") == NEG_INF
    assert ExtRat.parse("+inf") == POS_INF
    assert ExtRat.parse(" 7/14 ") == ExtRat.finite(Fraction(1, 2))


def test_normalize_keeps_minimal_generators():
    I = normalize_ideal([(2, 1), (1, 0), (0, 3), (1, 0)])
    assert I.gens == ((0, 3), (1, 0))
    assert I.n == 2
    assert str(I) == "(y^3, x)"


@pytest.mark.parametrize("gens,n", [([], None), ([(1, 0), (1,)], None), ([(1, 0)], 3), ([(-1, 2)], None)])
def test_normalize_rejects_malformed_generators(gens, n):
    with pytest.raises(InputError):
        normalize_ideal(gens, n)


def test_ideal_contains_direction():
    m = max_ideal(2)
    xy = monomial(2, (1, 1))
    assert ideal_contains(m, xy)
    assert not ideal_contains(xy, m)
    with pytest.raises(InputError):
        ideal_contains(m, max_ideal(3))


def test_max_ideal_powers():
    assert max_ideal(2, 2).gens == ((0, 2), (1, 1), (2, 0))
    assert len(monomials_of_degree(3, 2)) == 6
    assert max_ideal(3, 0).is_unit


def test_sum_with_power_of_max_ideal_truncates():
    I = monomial(2, (5, 0))
    J = monomial(2, (5, 0), (0, 9))
    assert sum_with_power_of_max_ideal(I, 6) == sum_with_power_of_max_ideal(J, 6)
    assert sum_with_power_of_max_ideal(I, 10) != sum_with_power_of_max_ideal(J, 10)


@given(monomial_ideals(n=3, max_degree=3))
def test_ideal_is_inside_its_truncations(I):
    for d in (1, 2, 4):
        assert ideal_contains(sum_with_power_of_max_ideal(I, d), I)


def test_r_ideal_arithmetic():
    m = max_ideal(2)
    a = RIdeal(((m, Fraction(1, 2)),))
    b = a.times(a).power(2)
    assert b.exponents() == [Fraction(1), Fraction(1)]
    assert b.exponent_sum == 2
    assert a.with_factor(monomial(2, (1, 1)), "1/3").n == 2
    assert RIdeal().is_trivial and RIdeal().n is None


def test_r_ideal_validation():
    with pytest.raises(InputError):
        RIdeal(((max_ideal(2), Fraction(-1)),))
    with pytest.raises(InputError):
        RIdeal(((max_ideal(2), 1), (max_ideal(3), 1)))


def test_weight_vector_invariants():
    v = WeightVector((3, 2))
    assert (v.k, v.ord_m, v.centered) == (4, 2, True)
    assert not WeightVector((0, 1)).centered
    with pytest.raises(InputError):
        WeightVector((0, 0))


def test_result_needs_a_witness_unless_infinite():
    with pytest.raises(InvariantViolation):
        MldResult(ExtRat.finite(1))
    assert MldResult(POS_INF).witness is None
    r = MldResult.for_weight(NEG_INF, (1, 2), certified=False)
    assert (r.witness_k, r.witness_ord_m, r.certified) == (2, 1, False)
