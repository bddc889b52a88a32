# models/jets.py
import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from app.models.core import POS_INF, ExtRat, InputError, InvariantViolation, MonomialIdeal, RIdeal, to_rat
from app.models.lattice import LatticeProgram
from app.models.toric import ToricProblem, lct_monomial

logger = logging.getLogger("models.jets")


@dataclass(frozen=True)
class JetQuery:
    a: MonomialIdeal
    n: int
    q: Fraction
    jet_levels: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "q", to_rat(self.q))
        object.__setattr__(self, "jet_levels", tuple(int(m) for m in self.jet_levels))
        if self.q <= 0:
            raise InputError(f"q must be positive, got {self.q}")
        if self.a.n != self.n:
            raise InputError(f"ideal on A^{self.a.n} in a query on A^{self.n}")
        if len(set(self.jet_levels)) != len(self.jet_levels):
            raise InputError("jet levels must be distinct")
        if any(m < 0 for m in self.jet_levels):
            raise InputError("jet levels must be nonnegative")


def _require_proper(a: MonomialIdeal) -> None:
    if a.is_unit:
        raise InputError("the unit ideal has no jets")


def contact_codim(a: MonomialIdeal, p: int) -> Union[int, ExtRat]:
    """Codimensão dos arcos de ordem ≥ p ao longo de a; POS_INF para o ideal unidade."""
    if p < 1:
        raise InputError(f"contact order must be positive, got {p}")
    if a.is_unit:
        return POS_INF

    def evaluate(v: Sequence[int]) -> Optional[Fraction]:
        if all(sum(x * e for x, e in zip(v, g)) >= p for g in a.gens):
            return Fraction(sum(v))
        return None

    program = LatticeProgram(
        c=[Fraction(1)] * a.n,
        d=[],
        rows=[([Fraction(-e) for e in g], [], Fraction(-p)) for g in a.gens],
        lower=[0] * a.n,
        evaluate=evaluate,
        cap=p * a.n,
    )
    best, point = program.minimize((p,) * a.n)
    logger.debug(f"🔄 codim Cont^>={p}{a} = {best} em {point}")
    return int(best)


def jet_dim(a: MonomialIdeal, m: int) -> int:
    _require_proper(a)
    if m < 0:
        raise InputError(f"jet level must be nonnegative, got {m}")
    dim = (m + 1) * a.n - contact_codim(a, m + 1)
    if dim < 0:
        raise InvariantViolation(f"negative jet dimension {dim} for {a} at level {m}")
    return dim


def jet_dims(a: MonomialIdeal, levels: Sequence[int]) -> List[Dict[str, int]]:
    return [{"m": m, "dim": jet_dim(a, m)} for m in levels]


def lc_via_jets(a: MonomialIdeal, q: Any, N: int) -> bool:
    """True se e só se dim Y_m ≤ (m+1)(n - q) para todo m ≤ N."""
    q = to_rat(q)
    if q <= 0:
        raise InputError(f"q must be positive, got {q}")
    _require_proper(a)
    return all(jet_dim(a, m) <= (m + 1) * (a.n - q) for m in range(N + 1))


def sufficient_jet_level(a: MonomialIdeal, q: Any, limit: int) -> Optional[int]:
    """
    Menor N ≤ limit em que o teste de jatos já concorda com lct(a) ≥ q.
    None quando nenhum nível até `limit` decide.
    """
    q = to_rat(q)
    _require_proper(a)
    lct = lct_monomial(ToricProblem(a.n, RIdeal(((a, Fraction(1)),)))).value
    expected = lct >= ExtRat.finite(q)
    holds = True
    for N in range(limit + 1):
        holds = holds and jet_dim(a, N) <= (N + 1) * (a.n - q)
        if holds == expected:
            return N
    logger.warning(f"⚠️ níveis de jatos até {limit} não decidem lct({a}) ≥ {q}")
    return None


def run_jet_query(query: JetQuery) -> Dict[str, Any]:
    levels = sorted(query.jet_levels)
    top = levels[-1] if levels else 0
    return {
        "dims": jet_dims(query.a, levels),
        "lc": lc_via_jets(query.a, query.q, top),
    }
