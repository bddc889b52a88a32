# models/surface.py
"""
Blow-ups de pontos sobre a origem de A².

Cada nó guarda os geradores de cada fator ideal em coordenadas locais (x, y)
centradas no ponto explodido, junto com os divisores excepcionais cujas
transformadas estritas são ali os eixos {x = 0} e {y = 0}.
A carta "x" cobre os pontos (0, t) do novo divisor E = {x = 0} por
(x, y) ↦ (x, xy); a carta "y" cobre o ponto restante, a origem de
(x, y) ↦ (xy, y), onde E = {y = 0}.
"""
import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from itertools import combinations
from typing import Any, Dict, FrozenSet, List, Optional, Sequence, Tuple

import networkx as nx

from app import config
from app.models.core import (
    NEG_INF,
    POS_INF,
    ExtRat,
    GuardTripped,
    InputError,
    InvariantViolation,
    IrrationalCenterError,
    MldResult,
    MonomialIdeal,
    PreconditionError,
    RIdeal,
    format_rat,
    to_rat,
)
from app.models.polynomials import (
    Poly2,
    PolyIdeal,
    irreducible_factors,
    multiplicity_of,
    poly_gcd,
    poly_quo,
    split_roots,
    univariate,
    univariate_gcd,
)

logger = logging.getLogger("models.surface")

Point = Tuple[Fraction, Fraction]
Frame = Tuple[Optional[int], Optional[int]]

AXIS_X = Poly2.monomial(1, 0)
AXIS_Y = Poly2.monomial(0, 1)


@dataclass(frozen=True)
class LocalData:
    gens: Tuple[Tuple[Poly2, ...], ...]
    frame: Frame = (None, None)

    @property
    def mults(self) -> Tuple[int, ...]:
        return tuple(min(p.order for p in gens) for gens in self.gens)

    def transform(self, mult: Sequence[int], chart: str, t: Fraction, new_id: int) -> "LocalData":
        if chart == "x":
            gens = tuple(tuple(p.chart_x(m).shift_y(t) for p in g) for g, m in zip(self.gens, mult))
            frame = (new_id, self.frame[1] if t == 0 else None)
        else:
            gens = tuple(tuple(p.chart_y(m) for p in g) for g, m in zip(self.gens, mult))
            frame = (self.frame[0], new_id)
        return LocalData(gens, frame)


@dataclass(frozen=True)
class BlowupNode:
    id: int
    parent: Optional[int]
    point: Point
    chart: Optional[str]
    proximate_to: Tuple[int, ...]
    k: int
    mults: Tuple[int, ...]
    ords: Tuple[int, ...]
    ord_m: int
    self_int: int
    local: LocalData = field(compare=False, repr=False)


@dataclass(frozen=True)
class BlowupChain:
    a: RIdeal
    origin: LocalData
    nodes: Tuple[BlowupNode, ...] = ()
    edges: FrozenSet[Tuple[int, int]] = frozenset()
    resolved: bool = False

    def __len__(self) -> int:
        return len(self.nodes)

    @property
    def exponents(self) -> List[Fraction]:
        return self.a.exponents()

    @property
    def ords(self) -> Dict[int, Tuple[int, ...]]:
        return {node.id: node.ords for node in self.nodes}

    def node(self, node_id: int) -> BlowupNode:
        if not 0 <= node_id < len(self.nodes):
            raise InputError(f"no node {node_id} in a chain of {len(self.nodes)}")
        return self.nodes[node_id]

    def children(self, node_id: int) -> List[BlowupNode]:
        return [n for n in self.nodes if n.parent == node_id]

    def log_discrepancy(self, node_id: int) -> Fraction:
        node = self.node(node_id)
        return node.k + 1 - sum((exp * o for exp, o in zip(self.exponents, node.ords)), Fraction(0))

    def is_linear(self) -> bool:
        return all(n.parent == (n.id - 1 if n.id else None) for n in self.nodes)


def _as_poly_ideal(ideal: Any) -> PolyIdeal:
    if isinstance(ideal, PolyIdeal):
        return ideal
    if isinstance(ideal, MonomialIdeal):
        return PolyIdeal.from_monomial(ideal)
    raise InputError(f"unsupported ideal type {type(ideal).__name__}")


def start_chain(a: RIdeal) -> BlowupChain:
    factors = tuple((_as_poly_ideal(ideal), exp) for ideal, exp in a.factors)
    a = RIdeal(factors)
    origin = LocalData(tuple(ideal.polys for ideal, _ in factors))
    return BlowupChain(a, origin)


def max_ideal_2d() -> PolyIdeal:
    return PolyIdeal((AXIS_X, AXIS_Y))


# ==============================
# BLOW-UP
# ==============================

def _normalize_point(point: Sequence[Any], chart: Optional[str]) -> Tuple[Point, str]:
    try:
        p = (to_rat(point[0]), to_rat(point[1]))
    except (IndexError, TypeError):
        raise InputError(f"malformed point {point!r}")
    chart = chart or "x"
    if chart == "x":
        if p[0] != 0:
            raise InputError(f"point {p} is not on the exceptional divisor x = 0")
        return p, "x"
    if chart == "y":
        if p[1] != 0:
            raise InputError(f"point {p} is not on the exceptional divisor y = 0")
        if p[0] == 0:
            return p, "y"
        return (Fraction(0), 1 / p[0]), "x"
    raise InputError(f"unknown chart {chart!r}")


def _center_data(chain: BlowupChain, parent: BlowupNode, point: Point, chart: str) -> LocalData:
    return parent.local.transform(parent.mults, chart, point[1], parent.id)


def blow_up(chain: BlowupChain, node_id: Optional[int], point: Sequence[Any] = (0, 0),
            chart: Optional[str] = None) -> BlowupChain:
    """Explode a origem (node_id None) ou um ponto do divisor excepcional de node_id."""
    if node_id is None:
        if chain.nodes:
            raise InputError("the origin is already blown up")
        if to_rat(point[0]) != 0 or to_rat(point[1]) != 0:
            raise InputError(f"the first center must be the origin, got {tuple(point)}")
        local, where, chart = chain.origin, (Fraction(0), Fraction(0)), None
    else:
        parent = chain.node(node_id)
        where, chart = _normalize_point(point, chart)
        if any(c.point == where and c.chart == chart for c in chain.children(node_id)):
            raise InputError(f"point {where} on E{node_id} is already blown up")
        local = _center_data(chain, parent, where, chart)

    new_id = len(chain.nodes)
    proximate = tuple(sorted(i for i in local.frame if i is not None))
    mults = local.mults
    k = 1 + sum(chain.nodes[i].k for i in proximate)
    ords = tuple(m + sum(chain.nodes[i].ords[j] for i in proximate) for j, m in enumerate(mults))
    # a transformada estrita de m é uma unidade depois do primeiro blow-up
    ord_m = 1 if node_id is None else sum(chain.nodes[i].ord_m for i in proximate)

    nodes = [replace(n, self_int=n.self_int - 1) if n.id in proximate else n for n in chain.nodes]
    nodes.append(BlowupNode(new_id, node_id, where, chart, proximate, k, mults, ords, ord_m, -1, local))

    edges = set(chain.edges)
    if len(proximate) == 2:
        edges.discard(tuple(proximate))
    for i in proximate:
        edges.add((i, new_id))
    logger.debug(f"🔄 E{new_id}: centro {where} em E{node_id}, k={k}, ords={ords}")
    return replace(chain, nodes=tuple(nodes), edges=frozenset(edges), resolved=False)


# ==============================
# TESTE SNC
# ==============================

def _key(p: Poly2) -> Tuple:
    return p.normalized().terms


def _curves(local: LocalData) -> Tuple[List[bool], Dict[Tuple, Tuple[Poly2, List[int]]]]:
    """
    Por fator: o ideal residual (geradores sobre o mdc) se anula aqui?
    Mais as componentes de curva distintas pelo ponto, com a
    multiplicidade em cada fator.
    """
    base_points = []
    curves: Dict[Tuple, Tuple[Poly2, List[int]]] = {}
    for j, gens in enumerate(local.gens):
        g = poly_gcd(gens)
        residual = [poly_quo(p, g) for p in gens]
        base_points.append(all(r.vanishes_at_origin() for r in residual))
        for h, e in irreducible_factors(g):
            if not h.vanishes_at_origin():
                continue
            entry = curves.setdefault(_key(h), (h, [0] * len(local.gens)))
            entry[1][j] += e
    return base_points, curves


def _proportional(p: Poly2, q: Poly2) -> bool:
    a, b = p.form(1), q.form(1)
    ax, ay = a.get((1, 0), Fraction(0)), a.get((0, 1), Fraction(0))
    bx, by = b.get((1, 0), Fraction(0)), b.get((0, 1), Fraction(0))
    return ax * by == ay * bx


def needs_blowup(local: LocalData) -> bool:
    base_points, curves = _curves(local)
    if any(base_points):
        return True
    components = [axis for axis, i in zip((AXIS_X, AXIS_Y), local.frame) if i is not None]
    axis_keys = {_key(c) for c in components}
    for key, (h, _) in sorted(curves.items()):
        if key in axis_keys:
            continue
        if h.order >= 2:
            return True
        components.append(h)
    if len(components) >= 3:
        return True
    if len(components) == 2:
        return _proportional(components[0], components[1])
    return False


def _restriction(p: Poly2):
    return univariate(p.restrict_x0())


def candidate_points(chain: BlowupChain, node_id: int) -> List[Tuple[Point, str]]:
    """Pontos de E_node onde a transformada total pode deixar de ser SNC."""
    node = chain.node(node_id)
    weak = [[p.chart_x(m) for p in gens] for gens, m in zip(node.local.gens, node.mults)]

    roots = set()
    for gens in weak:
        G = univariate_gcd(_restriction(p) for p in gens)
        if G is None or G.is_zero:
            raise InvariantViolation(f"weak transform divisible by E{node_id}")
        rational, irrational = split_roots(G)
        roots.update(rational)
        for pi in irrational:
            if not _harmless(weak, pi):
                raise IrrationalCenterError(
                    f"E{node_id} carries a base point over Q[y]/({pi.as_expr()}) that needs a blow-up")
    if node.local.frame[1] is not None:
        roots.add(Fraction(0))

    points = [((Fraction(0), t), "x") for t in sorted(roots)]
    points.append(((Fraction(0), Fraction(0)), "y"))
    return points


def _harmless(weak: List[List[Poly2]], pi) -> bool:
    """Ponto irracional onde exatamente uma curva lisa cruza E transversalmente."""
    crossings = 0
    seen = set()
    for gens in weak:
        g = poly_gcd(gens)
        residual = univariate_gcd(_restriction(poly_quo(p, g)) for p in gens)
        if multiplicity_of(pi, residual) > 0:
            return False
        for h, _ in irreducible_factors(g):
            if _key(h) in seen:
                continue
            seen.add(_key(h))
            crossings += multiplicity_of(pi, _restriction(h))
    return crossings == 1


# ==============================
# RESOLUÇÃO
# ==============================

def log_resolve(a: RIdeal, depth_cap: Optional[int] = None) -> BlowupChain:
    cap = depth_cap if depth_cap is not None else config.DEPTH_CAP
    chain = start_chain(a)
    for ideal, _ in chain.a.factors:
        if not ideal.vanishes_at_origin():
            raise PreconditionError(f"factor {ideal} does not vanish at the origin")

    chain = blow_up(chain, None)
    queue = [0]
    while queue:
        node_id = queue.pop(0)
        for point, chart in candidate_points(chain, node_id):
            parent = chain.node(node_id)
            if not needs_blowup(_center_data(chain, parent, point, chart)):
                continue
            if len(chain.nodes) >= cap:
                raise GuardTripped(f"resolution of {chain.a} exceeded {cap} blow-ups")
            chain = blow_up(chain, node_id, point, chart)
            queue.append(len(chain.nodes) - 1)

    chain = replace(chain, resolved=True)
    verify_chain(chain)
    logger.info(f"✅ {chain.a} resolvido com {len(chain.nodes)} blow-ups")
    return chain


def verify_chain(chain: BlowupChain) -> None:
    """Recalcula cada entrada do registro a partir dos dados brutos de proximidade."""
    later = {n.id: 0 for n in chain.nodes}
    for n in chain.nodes:
        if n.k != 1 + sum(chain.nodes[i].k for i in n.proximate_to):
            raise InvariantViolation(f"discrepancy ledger broken at E{n.id}")
        for j, m in enumerate(n.mults):
            if n.ords[j] != m + sum(chain.nodes[i].ords[j] for i in n.proximate_to):
                raise InvariantViolation(f"order ledger broken at E{n.id}, factor {j}")
        if len(n.proximate_to) > 2:
            raise InvariantViolation(f"E{n.id} is proximate to {len(n.proximate_to)} divisors")
        if n.parent is not None and n.parent not in n.proximate_to:
            raise InvariantViolation(f"E{n.id} is not proximate to its parent")
        for i in n.proximate_to:
            later[i] += 1
    for n in chain.nodes:
        if n.self_int != -1 - later[n.id]:
            raise InvariantViolation(f"self-intersection ledger broken at E{n.id}")
    drops = sum(-1 - n.self_int for n in chain.nodes)
    if drops != sum(len(n.proximate_to) for n in chain.nodes):
        raise InvariantViolation("self-intersection drops do not match proximities")


# ==============================
# GRAFO DUAL
# ==============================

def dual_graph(chain: BlowupChain) -> nx.Graph:
    G = nx.Graph()
    for n in chain.nodes:
        G.add_node(n.id, k=n.k, self_int=n.self_int, a=chain.log_discrepancy(n.id))
    G.add_edges_from(chain.edges)
    return G


# ==============================
# INVARIANTES
# ==============================

def _fixed_curves(chain: BlowupChain) -> List[Tuple[Poly2, Fraction]]:
    """Componentes de curva pela origem com o peso Σλ_j·mult_j."""
    _, curves = _curves(chain.origin)
    out = []
    for _, (h, mults) in sorted(curves.items()):
        weight = sum((exp * m for exp, m in zip(chain.exponents, mults)), Fraction(0))
        out.append((h, weight))
    return out


def lct_surface(chain: BlowupChain) -> MldResult:
    if not chain.resolved:
        raise PreconditionError("lct needs a resolved chain")
    best = None
    for n in chain.nodes:
        total = sum((exp * o for exp, o in zip(chain.exponents, n.ords)), Fraction(0))
        if total > 0:
            cand = (Fraction(n.k + 1) / total, n.k, 1, n.id)
            best = cand if best is None or cand < best else best
    for h, weight in _fixed_curves(chain):
        if weight > 0:
            cand = (1 / weight, 0, 0, f"C[{h}]")
            best = cand if best is None or cand[:3] < best[:3] else best
    if best is None:
        return MldResult(POS_INF)
    value, k, exceptional, witness = best
    ord_m = chain.nodes[witness].ord_m if exceptional else 0
    return MldResult(ExtRat.finite(value), witness, k, ord_m)


def _a_values(chain: BlowupChain) -> Dict[int, Fraction]:
    return {n.id: chain.log_discrepancy(n.id) for n in chain.nodes}


def _offending_point(chain: BlowupChain) -> Optional[Tuple[int, Point, str]]:
    """Ponto racional onde uma curva de peso > 1 encontra o divisor mais novo possível."""
    for node in reversed(chain.nodes):
        for point, chart in candidate_points(chain, node.id):
            if any(c.point == point and c.chart == chart for c in chain.children(node.id)):
                continue
            local = _center_data(chain, node, point, chart)
            _, curves = _curves(local)
            for _, (h, mults) in sorted(curves.items()):
                weight = sum((exp * m for exp, m in zip(chain.exponents, mults)), Fraction(0))
                if weight > 1:
                    return node.id, point, chart
    return None


def _extend_to_negative(chain: BlowupChain, cap: int) -> BlowupChain:
    while min(_a_values(chain).values()) >= 0:
        found = _offending_point(chain)
        if found is None:
            raise IrrationalCenterError("no rational point of a curve with weight > 1 on the exceptional locus")
        if len(chain.nodes) >= cap:
            raise GuardTripped(f"negative divisor not reached within {cap} blow-ups")
        chain = blow_up(chain, *found)
    return replace(chain, resolved=True)


def mld_surface_chain(a: RIdeal, depth_cap: Optional[int] = None) -> Tuple[MldResult, BlowupChain]:
    cap = depth_cap if depth_cap is not None else config.DEPTH_CAP
    chain = log_resolve(start_chain(a).a.with_factor(max_ideal_2d(), 0), cap)
    lct = lct_surface(chain)
    if lct.value < ExtRat.finite(1):
        chain = _extend_to_negative(chain, cap)
    values = _a_values(chain)
    node = min(chain.nodes, key=lambda n: (values[n.id], n.k, n.id))
    low = values[node.id]
    value = NEG_INF if low < 0 else ExtRat.finite(low)
    logger.info(f"✅ mld de {a} em A^2: {value} em E{node.id}")
    return MldResult(value, node.id, node.k, node.ord_m), chain


def mld_surface(a: RIdeal, depth_cap: Optional[int] = None) -> MldResult:
    return mld_surface_chain(a, depth_cap)[0]


def _is_lc(chain: BlowupChain) -> bool:
    return lct_surface(chain).value >= ExtRat.finite(1)


def convexity_premises_hold(chain: BlowupChain) -> bool:
    return _is_lc(chain) and all(v <= 1 for v in _a_values(chain).values())


def check_convexity(chain: BlowupChain) -> List[Dict[str, Any]]:
    """Triplas E2 - E1 - E3 com E1² ≤ -2 onde 2·a1 > a2 + a3."""
    if not chain.resolved:
        raise PreconditionError("convexity check needs a resolved chain")
    if not convexity_premises_hold(chain):
        logger.debug("⚠️ premissas de convexidade falham, cadeia ignorada")
        return []
    G = dual_graph(chain)
    a = _a_values(chain)
    violations = []
    for e1 in G.nodes:
        if G.nodes[e1]["self_int"] > -2:
            continue
        for e2, e3 in combinations(sorted(G.neighbors(e1)), 2):
            if 2 * a[e1] > a[e2] + a[e3]:
                violations.append({"center": e1, "pair": [e2, e3],
                                   "a": [format_rat(a[e1]), format_rat(a[e2]), format_rat(a[e3])]})
    return violations


# ==============================
# CADEIAS LINEARES
# ==============================

def intersection_point(chain: BlowupChain, node_id: int, other: int) -> Tuple[Point, str]:
    """Ponto de E_node onde a transformada estrita de E_other o encontra."""
    frame = chain.node(node_id).local.frame
    if frame[1] == other:
        return (Fraction(0), Fraction(0)), "x"
    if frame[0] == other:
        return (Fraction(0), Fraction(0)), "y"
    raise PreconditionError(f"E{other} does not meet E{node_id}")


def linear_chain(choices: Sequence[bool], a: Optional[RIdeal] = None) -> BlowupChain:
    """
    Blow-up da raiz seguido de um blow-up por escolha no divisor mais novo:
    True escolhe a interseção com o divisor anterior, False um ponto livre.
    """
    chain = blow_up(start_chain(a or RIdeal()), None)
    for step, satellite in enumerate(choices, start=1):
        last = len(chain.nodes) - 1
        if satellite:
            if last == 0:
                raise PreconditionError("the first divisor meets no other exceptional divisor")
            point, chart = intersection_point(chain, last, last - 1)
        else:
            point, chart = (Fraction(0), Fraction(1)), "x"
        chain = blow_up(chain, last, point, chart)
    return chain


def extract_linear_chain(chain: BlowupChain, node_id: int) -> BlowupChain:
    """Refaz só os blow-ups da origem até node_id."""
    path = []
    current: Optional[int] = node_id
    while current is not None:
        path.append(chain.node(current))
        current = chain.nodes[current].parent
    path.reverse()
    out = blow_up(start_chain(chain.a), None)
    for i, n in enumerate(path[1:], start=1):
        out = blow_up(out, i - 1, n.point, n.chart)
    return out


def check_k_bound(chain: BlowupChain) -> bool:
    """k do último divisor ≤ 2^(n-1), com as cotas de pullback de cada divisor anterior."""
    if not chain.nodes or not chain.is_linear():
        raise PreconditionError("k bound needs a single chain of blow-ups")
    n = len(chain.nodes)
    prox = [set(node.proximate_to) for node in chain.nodes]
    memo: Dict[Tuple[int, int], int] = {}

    def pull(F: int, i: int) -> int:
        # coeficiente de E_{n-1} no pullback para X_n de F, um divisor em X_i
        if i == n:
            return 1 if F == n - 1 else 0
        if (F, i) not in memo:
            memo[(F, i)] = pull(F, i + 1) + (pull(i, i + 1) if F in prox[i] else 0)
        return memo[(F, i)]

    for i in range(1, n):
        for F in range(i):
            if pull(F, i) > 2 ** (n - 1 - i):
                logger.warning(f"⚠️ pullback de E{F} desde X_{i} passa de 2^{n - 1 - i}")
                return False
    k_last = sum(pull(i - 1, i) for i in range(1, n + 1))
    if k_last != chain.nodes[-1].k:
        raise InvariantViolation(f"pullback accounting gives k={k_last}, ledger has {chain.nodes[-1].k}")
    return k_last <= 2 ** (n - 1)


def check_increasing_paths(chain: BlowupChain) -> Optional[List[List[int]]]:
    """
    Caminhos saindo do último divisor cujos valores de a não crescem estritamente.
    None quando as premissas falham: cadeia linear, par lc, todo a ≤ 1, último
    divisor como único minimizador.
    """
    if not chain.nodes or not chain.is_linear() or not convexity_premises_hold(chain):
        return None
    a = _a_values(chain)
    last = chain.nodes[-1].id
    if any(a[i] <= a[last] for i in a if i != last):
        return None
    G = dual_graph(chain)
    if max(d for _, d in G.degree()) > 3:
        raise InvariantViolation("dual graph of a linear chain has a vertex of degree > 3")

    bad = []
    stack = [[last]]
    while stack:
        path = stack.pop()
        for w in sorted(G.neighbors(path[-1])):
            if w in path:
                continue
            longer = path + [w]
            if a[w] <= a[path[-1]]:
                bad.append(longer)
            stack.append(longer)
    return bad
