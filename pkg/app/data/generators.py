# data/generators.py
import logging
import random
from fractions import Fraction
from typing import List, Sequence, Tuple

import networkx as nx

from app.models.core import (
    InvariantViolation,
    MonomialIdeal,
    RIdeal,
    monomials_of_degree,
    normalize_ideal,
    sum_with_power_of_max_ideal,
)
from app.models.toric import ToricProblem

logger = logging.getLogger("data.generators")


def exponent_vectors(n: int, max_degree: int) -> List[Tuple[int, ...]]:
    """Todos os vetores de expoentes de grau total ≤ max_degree, incluindo a unidade."""
    out = []
    for d in range(max_degree + 1):
        out.extend(monomials_of_degree(n, d))
    return out


def random_monomial_ideal(rng: random.Random, n: int, max_degree: int) -> MonomialIdeal:
    vectors = exponent_vectors(n, max_degree)
    while True:
        count = rng.randint(1, 4)
        ideal = normalize_ideal([rng.choice(vectors) for _ in range(count)], n)
        if not ideal.is_unit:
            return ideal


def random_r_ideal(rng: random.Random, n: int, exponents: Sequence[Fraction],
                   max_degree: int, max_factors: int = 1) -> RIdeal:
    r = rng.randint(1, max_factors)
    return RIdeal(tuple((random_monomial_ideal(rng, n, max_degree), Fraction(rng.choice(list(exponents))))
                        for _ in range(r)))


def random_problem(rng: random.Random, n: int, exponents: Sequence[Fraction],
                   max_degree: int, max_factors: int = 1) -> ToricProblem:
    return ToricProblem(n, random_r_ideal(rng, n, exponents, max_degree, max_factors))


def truncation_partner(rng: random.Random, I: MonomialIdeal, s: int) -> MonomialIdeal:
    """Ideal que coincide com I módulo m^s: mantém os geradores de grau baixo e sorteia o resto."""
    kept = [g for g in I.gens if sum(g) < s]
    extra = [rng.choice(monomials_of_degree(I.n, rng.randint(s, s + 2))) for _ in range(rng.randint(0, 2))]
    if not kept and not extra:
        extra = [rng.choice(monomials_of_degree(I.n, s))]
    partner = normalize_ideal(kept + extra, I.n)
    if sum_with_power_of_max_ideal(I, s) != sum_with_power_of_max_ideal(partner, s):
        raise InvariantViolation(f"{partner} does not agree with {I} modulo m^{s}")
    return partner


def random_subcubic_graph(rng: random.Random, order: int, extra_edges: int = 0) -> nx.Graph:
    """Grafo conexo com todo grau ≤ 3: uma árvore aleatória mais algumas cordas."""
    G = nx.Graph()
    G.add_node(0)
    for v in range(1, order):
        open_slots = [u for u in G.nodes if G.degree(u) < 3]
        G.add_edge(v, rng.choice(open_slots))
    for _ in range(extra_edges):
        open_slots = [u for u in G.nodes if G.degree(u) < 3]
        if len(open_slots) < 2:
            break
        u, w = rng.sample(open_slots, 2)
        if not G.has_edge(u, w):
            G.add_edge(u, w)
    return G
