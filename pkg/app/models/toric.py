# models/toric.py
import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple, Union

from app import config
from app.models.core import (
    NEG_INF,
    POS_INF,
    ExtRat,
    InputError,
    InvariantViolation,
    MldResult,
    MonomialIdeal,
    PreconditionError,
    RIdeal,
    WeightVector,
    format_rat,
    ideal_contains,
    max_ideal,
)
from app.models.lattice import (
    LatticeProgram,
    LPUnbounded,
    lcm_of_denominators,
    primitive_integer_vector,
    solve_lp,
)

logger = logging.getLogger("models.toric")

Weights = Union[WeightVector, Sequence[int]]


class SearchMode(str, Enum):
    EXACT_LP = "EXACT_LP"
    ORACLE = "ORACLE"


@dataclass(frozen=True)
class SearchConfig:
    oracle_bound: Optional[int] = None
    mode: SearchMode = SearchMode.EXACT_LP


@dataclass(frozen=True)
class ToricProblem:
    n: int
    a: RIdeal

    def __post_init__(self):
        if self.n < 1:
            raise InputError(f"dimension must be positive, got {self.n}")
        for ideal, _ in self.a.factors:
            if not isinstance(ideal, MonomialIdeal):
                raise InputError("toric problems take monomial factors only")
            if ideal.n != self.n:
                raise InputError(f"factor of dimension {ideal.n} in a problem on A^{self.n}")

    @property
    def max_degree(self) -> int:
        return max((ideal.max_degree for ideal in self.a.ideals()), default=0)

    def default_bound(self) -> int:
        raw = config.ORACLE_FACTOR * max(self.max_degree, 1) * (1 + self.a.exponent_sum)
        return max(math.ceil(raw), self.n)

    def bound(self, cfg: Optional[SearchConfig]) -> int:
        B = cfg.oracle_bound if cfg is not None and cfg.oracle_bound is not None else self.default_bound()
        if B < self.n:
            raise InputError(f"search bound {B} is below the dimension {self.n}")
        return B


def _vec(v: Weights) -> Tuple[int, ...]:
    return v.v if isinstance(v, WeightVector) else tuple(int(x) for x in v)


def ord_weight(v: Weights, I: MonomialIdeal) -> int:
    v = _vec(v)
    if len(v) != I.n:
        raise InputError(f"weight of length {len(v)} against an ideal on A^{I.n}")
    return min(sum(a * b for a, b in zip(v, g)) for g in I.gens)


def log_discrepancy(v: Weights, a: RIdeal) -> Fraction:
    v = _vec(v)
    total = Fraction(sum(v))
    for ideal, exp in a.factors:
        total -= exp * ord_weight(v, ideal)
    return total


def compositions(n: int, s: int, low: int = 1) -> Iterator[Tuple[int, ...]]:
    """Vetores de comprimento n com entradas ≥ low e soma s, em ordem lexicográfica."""
    if n == 1:
        if s >= low:
            yield (s,)
        return
    for first in range(low, s - low * (n - 1) + 1):
        for rest in compositions(n - 1, s - first, low):
            yield (first,) + rest


class _Objective:
    """Discrepância logarítmica multiplicada pelo denominador comum D dos expoentes."""

    def __init__(self, p: ToricProblem):
        self.n = p.n
        active = [(ideal, exp) for ideal, exp in p.a.factors if exp > 0]
        self.D = lcm_of_denominators([exp for _, exp in active])
        self.factors = [(ideal.gens, int(exp * self.D)) for ideal, exp in active]
        self.exps = [exp for _, exp in active]

    def ords(self, v: Sequence[int]) -> List[int]:
        return [min(sum(a * b for a, b in zip(v, g)) for g in gens) for gens, _ in self.factors]

    def scaled(self, v: Sequence[int]) -> int:
        total = self.D * sum(v)
        for (gens, w), o in zip(self.factors, self.ords(v)):
            total -= w * o
        return total

    def value(self, v: Sequence[int]) -> Fraction:
        return Fraction(self.scaled(v), self.D)

    def scaled_ord(self, v: Sequence[int]) -> int:
        """D vezes Σλ_j ord_v(a_j)."""
        return sum(w * o for (_, w), o in zip(self.factors, self.ords(v)))

    def program(self, cap: Optional[int]) -> LatticeProgram:
        n, k = self.n, len(self.factors)
        rows = []
        for j, (gens, _) in enumerate(self.factors):
            for g in gens:
                e = [Fraction(0)] * k
                e[j] = Fraction(1)
                rows.append(([Fraction(-x) for x in g], e, Fraction(0)))
        return LatticeProgram(
            c=[Fraction(1)] * n,
            d=[-exp for exp in self.exps],
            rows=rows,
            lower=[1] * n,
            evaluate=self.value,
            cap=cap,
            grid=self.D,
        )


# ==============================
# LIMIAR LOG CANÔNICO
# ==============================

def _lct_lp(p: ToricProblem) -> Tuple[Optional[Fraction], List[Fraction]]:
    """max Σλ_j ord_v(a_j) no simplexo Σv = 1, v ≥ 0; (None, []) quando é 0."""
    obj = _Objective(p)
    n, k = p.n, len(obj.factors)
    if k == 0:
        return None, []
    rows = []
    for j, (gens, _) in enumerate(obj.factors):
        for g in gens:
            row = [Fraction(-x) for x in g] + [Fraction(0)] * k
            row[n + j] = Fraction(1)
            rows.append((row, Fraction(0)))
    ones = [Fraction(1)] * n + [Fraction(0)] * k
    rows.append((ones, Fraction(1)))
    rows.append(([-x for x in ones], Fraction(-1)))
    solved = solve_lp([Fraction(0)] * n + [-exp for exp in obj.exps], rows)
    if solved is None:
        raise InvariantViolation("the lct program has an empty simplex")
    value, x = solved
    opt = -value
    if opt == 0:
        return None, []
    return 1 / opt, x[:n]


def lct_oracle(p: ToricProblem, B: int) -> MldResult:
    obj = _Objective(p)
    best = None
    for s in range(1, B + 1):
        for v in compositions(p.n, s, 0):
            o = obj.scaled_ord(v)
            if o == 0:
                continue
            ratio = Fraction(obj.D * s, o)
            if best is None or ratio < best[0]:
                best = (ratio, v)
    if best is None:
        return MldResult(POS_INF)
    return MldResult.for_weight(ExtRat.finite(best[0]), best[1], certified=sum(best[1]) < B)


def lct_monomial(p: ToricProblem, cfg: Optional[SearchConfig] = None) -> MldResult:
    if cfg is not None and cfg.mode == SearchMode.ORACLE:
        return lct_oracle(p, p.bound(cfg))
    lct, x = _lct_lp(p)
    if lct is None:
        return MldResult(POS_INF)
    obj = _Objective(p)
    limit = sum(primitive_integer_vector(x))
    for s in range(1, limit + 1):
        for v in compositions(p.n, s, 0):
            if obj.D * s == lct * obj.scaled_ord(v):
                logger.debug(f"✅ lct {format_rat(lct)} de {p.a} em {v}")
                return MldResult.for_weight(ExtRat.finite(lct), v)
    raise InvariantViolation(f"no lattice point attains lct {lct} below Σv = {limit}")


# ==============================
# DISCREPÂNCIA LOGARÍTMICA MÍNIMA
# ==============================

def mld_oracle(p: ToricProblem, B: int) -> MldResult:
    if B < p.n:
        raise InputError(f"search bound {B} is below the dimension {p.n}")
    obj = _Objective(p)
    best = None
    for s in range(p.n, B + 1):
        for v in compositions(p.n, s):
            val = obj.scaled(v)
            if val < 0:
                return MldResult.for_weight(NEG_INF, v)
            if best is None or val < best[0]:
                best = (val, v)
    value, v = best
    return MldResult.for_weight(ExtRat.finite(Fraction(value, obj.D)), v, certified=sum(v) < B)


def _first_negative(p: ToricProblem, obj: _Objective, direction: List[Fraction]) -> Tuple[int, ...]:
    d = primitive_integer_vector(direction)
    ones = (1,) * p.n
    drop = -obj.scaled(d)
    if drop <= 0:
        raise InvariantViolation(f"direction {d} does not decrease the log discrepancy")
    # f(1 + t·d) ≤ f(1) + t·f(d); t = 0 quando f(1) já é negativo
    steps = max(0, obj.scaled(ones) // drop + 1)
    limit = steps * sum(d) + p.n
    for s in range(p.n, limit + 1):
        for v in compositions(p.n, s):
            if obj.scaled(v) < 0:
                return v
    raise InvariantViolation(f"no negative log discrepancy found up to Σv = {limit}")


def _tail_bound(obj: _Objective, B: int) -> Fraction:
    """Mínimo do LP da discrepância logarítmica sobre v ≥ 1 real com Σv ≥ B + 1."""
    program = obj.program(cap=None)
    try:
        relaxed = program.relaxation([1] * obj.n, [None] * obj.n,
                                     extra=[([Fraction(-1)] * obj.n, Fraction(-(B + 1)))])
    except LPUnbounded:
        raise InvariantViolation("tail program unbounded on a log canonical pair")
    return relaxed[0]


def mld_monomial(p: ToricProblem, cfg: Optional[SearchConfig] = None) -> MldResult:
    cfg = cfg or SearchConfig()
    B = p.bound(cfg)
    if cfg.mode == SearchMode.ORACLE:
        return mld_oracle(p, B)

    obj = _Objective(p)
    lct, x = _lct_lp(p)
    if lct is not None and lct < 1:
        witness = _first_negative(p, obj, x)
        logger.info(f"⚠️ {p.a} não é log canônico (lct {format_rat(lct)}), testemunha {witness}")
        return MldResult.for_weight(NEG_INF, witness)

    program = obj.program(cap=B)
    best, point = program.minimize((1,) * p.n)
    target = best * obj.D
    for s in range(p.n, sum(point) + 1):
        witness = next((v for v in compositions(p.n, s) if obj.scaled(v) == target), None)
        if witness is not None:
            break
    else:
        raise InvariantViolation(f"optimum {best} not found again below Σv = {sum(point)}")

    certified = _tail_bound(obj, B) >= best
    if not certified:
        logger.warning(f"⚠️ mld {format_rat(best)} de {p.a} não certificado além de Σv = {B}")
    return MldResult.for_weight(ExtRat.finite(best), witness, certified=certified)


def real_mld_lower_bound(p: ToricProblem) -> Tuple[ExtRat, List[Fraction]]:
    """Ínfimo da discrepância logarítmica sobre v ≥ 1 real, com o minimizador."""
    obj = _Objective(p)
    try:
        relaxed = obj.program(cap=None).relaxation([1] * p.n, [None] * p.n)
    except LPUnbounded:
        return NEG_INF, []
    value, x = relaxed
    return ExtRat.finite(value), x


def delta_threshold(p: ToricProblem, cfg: Optional[SearchConfig] = None) -> Fraction:
    mld = mld_monomial(p, cfg)
    if not mld.value.is_finite or mld.value.value <= 0:
        raise PreconditionError(f"delta needs mld > 0, got {mld.value}")
    bound, x = real_mld_lower_bound(p)
    delta = bound.value
    scaled = p.a.with_factor(max_ideal(p.n), delta)
    check = ToricProblem(p.n, scaled)
    B = max(check.default_bound(), sum(primitive_integer_vector(x)))
    after = mld_monomial(check, SearchConfig(oracle_bound=B))
    if after.value != ExtRat.finite(0):
        raise InvariantViolation(f"mld at delta {format_rat(delta)} is {after.value}, not 0")
    logger.info(f"✅ delta {format_rat(delta)} para {p.a}")
    return delta


# ==============================
# EXPERIMENTO DE LIMITAÇÃO
# ==============================

def _descends(p: ToricProblem, q: ToricProblem) -> bool:
    """a_j(p) ⊇ a_j(q) fator a fator, com expoentes idênticos."""
    if p.a.exponents() != q.a.exponents():
        return False
    return all(ideal_contains(I, J) for I, J in zip(p.a.ideals(), q.a.ideals()))


def check_family(family: List[ToricProblem]) -> int:
    if not family:
        raise InputError("empty family")
    dims = {p.n for p in family}
    if len(dims) != 1:
        raise InputError(f"family mixes dimensions {sorted(dims)}")
    return dims.pop()


def boundedness_probe(family: List[ToricProblem], cfg: Optional[SearchConfig] = None) -> Dict[str, Any]:
    check_family(family)
    return summarize_boundedness(family, [mld_monomial(p, cfg) for p in family])


def summarize_boundedness(family: List[ToricProblem], results: List[MldResult]) -> Dict[str, Any]:
    n = check_family(family)
    instances = []
    for p, r in zip(family, results):
        instances.append({
            "ideal": str(p.a),
            "value": str(r.value),
            "witness": list(r.witness.v),
            "k": r.witness_k,
            "ord_m": r.witness_ord_m,
            "certified": r.certified,
        })

    violations = []
    for i, p in enumerate(family):
        for j, q in enumerate(family):
            if i != j and _descends(p, q) and results[i].value < results[j].value:
                violations.append([i, j])

    # máximos só sobre pares log canônicos
    lc = [r for r in results if r.value != NEG_INF]
    exponents = sorted({exp for p in family for exp in p.a.exponents()})
    report = {
        "n": n,
        "exponents": [format_rat(e) for e in exponents],
        "instances": instances,
        "log_canonical": len(lc),
        "max_k": max((r.witness_k for r in lc), default=None),
        "max_ord_m": max((r.witness_ord_m for r in lc), default=None),
        "weakly_decreasing": not violations,
        "decreasing_violations": violations,
        "uncertified": any(not r.certified for r in results),
    }
    logger.info(f"✅ limitação sobre {len(family)} instâncias: max k {report['max_k']}")
    return report
