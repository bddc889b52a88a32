import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings

from app.data.generators import random_monomial_ideal
from app.models.core import POS_INF, ExtRat, InputError, RIdeal, max_ideal
from app.models.jets import (
    JetQuery,
    contact_codim,
    jet_dim,
    jet_dims,
    lc_via_jets,
    run_jet_query,
    sufficient_jet_level,
)
from app.models.toric import ToricProblem, lct_monomial
from conftest import monomial, monomial_ideals

XY = monomial(2, (1, 1))
CUSP = monomial(2, (2, 0), (0, 3))


@pytest.mark.parametrize("ideal,p,expected", [
    (XY, 3, 3),
    (CUSP, 2, 2),
    (max_ideal(2), 2, 4),
    (monomial(2, (5, 0), (2, 3), (0, 5)), 1, 2),
    (monomial(2, (5, 0), (2, 3), (0, 5)), 3, 2),
])
def test_contact_codim_examples(ideal, p, expected):
    assert contact_codim(ideal, p) == expected


def test_contact_codim_of_unit_ideal_is_infinite():
    assert contact_codim(max_ideal(2, 0), 3) == POS_INF
    with pytest.raises(InputError):
        contact_codim(XY, 0)


@pytest.mark.parametrize("ideal,m,expected", [
    (XY, 0, 1),
    (XY, 3, 4),
    (monomial(1, (1,)), 2, 0),
])
def test_jet_dim_examples(ideal, m, expected):
    assert jet_dim(ideal, m) == expected


def test_jet_dim_rejects_unit_ideal():
    with pytest.raises(InputError):
        jet_dim(max_ideal(2, 0), 1)


@pytest.mark.parametrize("ideal,q,N,expected", [
    (XY, 1, 10, True),
    (XY, Fraction(3, 2), 0, False),
    (max_ideal(2), 2, 5, True),
])
def test_lc_via_jets_examples(ideal, q, N, expected):
    assert lc_via_jets(ideal, q, N) is expected


@settings(max_examples=20)
@given(monomial_ideals(n=2, max_degree=4))
def test_contact_codim_is_monotone_and_subadditive(I):
    first = contact_codim(I, 1)
    previous = first
    for p in range(2, 6):
        c = contact_codim(I, p)
        assert previous <= c <= p * first
        previous = c


def test_jet_query_validation():
    with pytest.raises(InputError):
        JetQuery(XY, 2, Fraction(0), (0,))
    with pytest.raises(InputError):
        JetQuery(XY, 2, Fraction(1), (1, 1))
    with pytest.raises(InputError):
        JetQuery(XY, 3, Fraction(1), (0,))


def test_run_jet_query_reports_dims_and_verdict():
    out = run_jet_query(JetQuery(XY, 2, Fraction(1), (3, 0)))
    assert out["dims"] == [{"m": 0, "dim": 1}, {"m": 3, "dim": 4}]
    assert out["lc"] is True
    assert jet_dims(XY, [1]) == [{"m": 1, "dim": 2}]


def _lct(I):
    return lct_monomial(ToricProblem(I.n, RIdeal(((I, Fraction(1)),))))


def _level(I, q) -> int:
    return 3 * I.max_degree * math.ceil(1 / q + 1)


@pytest.mark.slow
def test_jet_criterion_agrees_with_threshold():
    rng = random.Random(3)
    thresholds = [Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2)]
    for _ in range(200):
        n = rng.choice([1, 2, 3])
        I = random_monomial_ideal(rng, n, 4 if n < 3 else 3)
        q = rng.choice(thresholds)
        assert (_lct(I).value >= ExtRat.finite(q)) == lc_via_jets(I, q, _level(I, q)), f"{I} at q = {q}"


def test_sufficient_level_detects_failure_at_the_witness_order():
    # lct(x², y³) = 5/6 com testemunha (3, 2) de ordem 6
    level = sufficient_jet_level(CUSP, 1, 10)
    assert level is not None and level <= 5
    assert not lc_via_jets(CUSP, 1, level)
    assert sufficient_jet_level(XY, 1, 4) == 0
