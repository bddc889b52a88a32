import random
from dataclasses import replace
from fractions import Fraction
from itertools import product

import pytest

from app.data.generators import random_monomial_ideal, random_problem
from app.models.core import (
    NEG_INF,
    ExtRat,
    GuardTripped,
    InputError,
    InvariantViolation,
    IrrationalCenterError,
    PreconditionError,
    RIdeal,
    max_ideal,
)
from app.models.polynomials import Poly2, PolyIdeal
from app.models.surface import (
    blow_up,
    check_convexity,
    check_increasing_paths,
    check_k_bound,
    dual_graph,
    extract_linear_chain,
    lct_surface,
    linear_chain,
    log_resolve,
    mld_surface,
    start_chain,
    verify_chain,
)
from app.models.toric import lct_monomial, mld_monomial
from conftest import monomial

CROSS_EXPONENTS = [Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2)]


def poly_ideal(terms, exp=1) -> RIdeal:
    f = Poly2.from_dict({e: Fraction(c) for e, c in terms.items()})
    return RIdeal(((PolyIdeal((f,)), Fraction(exp)),))


def two_cusps() -> RIdeal:
    # (y² - x³)(x² - y³): cúspides tangentes a eixos diferentes
    return poly_ideal({(2, 2): 1, (0, 5): -1, (5, 0): -1, (3, 3): 1})


# ==============================
# RESOLUÇÃO
# ==============================

def test_normal_crossing_needs_one_blowup():
    chain = log_resolve(RIdeal(((monomial(2, (1, 1)), Fraction(1)),)))
    assert len(chain) == 1
    E0 = chain.node(0)
    assert (E0.k, E0.ords, E0.self_int) == (1, (2,), -1)
    assert chain.log_discrepancy(0) == 0


def test_cusp_resolution(cusp):
    chain = log_resolve(cusp)
    assert [(n.k, n.ords[0]) for n in chain.nodes] == [(1, 2), (2, 3), (4, 6)]
    assert [n.ord_m for n in chain.nodes] == [1, 1, 2]
    assert [n.self_int for n in chain.nodes] == [-3, -2, -1]
    assert chain.is_linear()

    lct = lct_surface(chain)
    assert lct.value == ExtRat.finite(Fraction(5, 6))
    assert (lct.witness, lct.witness_k) == (2, 4)


def test_cusp_dual_graph_is_a_star_around_the_last_divisor(cusp):
    G = dual_graph(log_resolve(cusp))
    assert sorted(G.edges) == [(0, 2), (1, 2)]
    assert G.nodes[2]["a"] == -1
    assert G.nodes[0]["self_int"] == -3


def test_branching_resolution_replays_every_node():
    chain = log_resolve(two_cusps())
    assert not chain.is_linear()
    for node in chain.nodes:
        replayed = extract_linear_chain(chain, node.id)
        assert replayed.is_linear()
        last = replayed.nodes[-1]
        assert (last.k, last.ords, last.ord_m) == (node.k, node.ords, node.ord_m)


def test_verify_chain_catches_a_broken_ledger(cusp):
    chain = log_resolve(cusp)
    verify_chain(chain)
    broken = replace(chain, nodes=(replace(chain.nodes[0], k=5),) + chain.nodes[1:])
    with pytest.raises(InvariantViolation):
        verify_chain(broken)


def test_resolution_errors(cusp):
    with pytest.raises(GuardTripped):
        log_resolve(cusp, depth_cap=1)
    with pytest.raises(PreconditionError):
        log_resolve(RIdeal(((max_ideal(2, 0), Fraction(1)),)))
    # duas curvas encontram E0 nos pontos y = ±1/√2
    tangled = poly_ideal({(4, 0): 1, (2, 2): -4, (0, 4): 4, (5, 0): 1, (3, 2): -2})
    with pytest.raises(IrrationalCenterError):
        log_resolve(tangled)


def test_blow_up_rejects_bad_centers():
    chain = blow_up(start_chain(RIdeal()), None)
    with pytest.raises(InputError):
        blow_up(chain, None)
    with pytest.raises(InputError):
        blow_up(chain, 0, (1, 1), "x")
    with pytest.raises(InputError):
        blow_up(chain, 3)
    once = blow_up(chain, 0, (0, 1), "x")
    with pytest.raises(InputError):
        blow_up(once, 0, (0, 1), "x")


# ==============================
# INVARIANTES
# ==============================

def test_square_of_a_line_is_not_log_canonical():
    a = RIdeal(((monomial(2, (2, 0)), Fraction(1)),))
    assert mld_surface(a).value == NEG_INF


def test_smooth_point_has_mld_two():
    r = mld_surface(RIdeal(((max_ideal(2), Fraction(0)),)))
    assert r.value == ExtRat.finite(2)
    assert (r.witness, r.witness_k, r.witness_ord_m) == (0, 1, 1)


@pytest.mark.slow
def test_surface_engine_agrees_with_toric_engine():
    rng = random.Random(11)
    for _ in range(200):
        p = random_problem(rng, 2, CROSS_EXPONENTS, max_degree=6, max_factors=2)
        chain = log_resolve(p.a)
        assert mld_surface(p.a).value == mld_monomial(p).value, str(p.a)
        assert lct_surface(chain).value == lct_monomial(p).value, str(p.a)
        assert check_convexity(chain) == [], str(p.a)


def test_cusp_threshold_pair_is_convex_with_increasing_paths():
    chain = log_resolve(poly_ideal({(2, 0): 1, (0, 3): 1}, Fraction(5, 6)))
    assert [chain.log_discrepancy(n.id) for n in chain.nodes] == [Fraction(1, 3), Fraction(1, 2), 0]
    assert check_convexity(chain) == []
    assert check_increasing_paths(chain) == []


@pytest.mark.slow
def test_convexity_on_resolved_monomial_pairs():
    rng = random.Random(5)
    for _ in range(25):
        I = random_monomial_ideal(rng, 2, 4)
        chain = log_resolve(RIdeal(((I, Fraction(1, 2)),)))
        assert check_convexity(chain) == [], str(I)


def test_convexity_needs_a_resolved_chain():
    with pytest.raises(PreconditionError):
        check_convexity(linear_chain([False]))


# ==============================
# CADEIAS LINEARES
# ==============================

def test_free_and_satellite_points():
    assert [n.k for n in linear_chain([False]).nodes] == [1, 2]
    assert [n.k for n in linear_chain([False, True]).nodes] == [1, 2, 4]
    assert [n.k for n in linear_chain([False, False]).nodes] == [1, 2, 3]
    assert [n.k for n in linear_chain([False, True, True, True]).nodes] == [1, 2, 4, 7, 12]
    with pytest.raises(PreconditionError):
        linear_chain([True])


def _all_chains(length):
    for rest in product([False, True], repeat=max(length - 2, 0)):
        yield linear_chain(((False,) + rest)[:length - 1])


@pytest.mark.parametrize("length", range(1, 8))
def test_k_bound_and_its_maximizer(length):
    satellite = linear_chain(((False,) + (True,) * length)[:length - 1])
    top = satellite.nodes[-1].k
    for chain in _all_chains(length):
        assert check_k_bound(chain)
        assert chain.nodes[-1].k <= top
    assert (top == 2 ** (length - 1)) is (length <= 3)


@pytest.mark.slow
def test_k_bound_holds_for_every_chain_of_length_twelve():
    count = 0
    for chain in _all_chains(12):
        assert check_k_bound(chain)
        count += 1
    assert count == 2 ** 10


def test_k_bound_needs_a_linear_chain():
    with pytest.raises(PreconditionError):
        check_k_bound(log_resolve(two_cusps()))
