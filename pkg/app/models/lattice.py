# models/lattice.py
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple

from sympy import Rational
from sympy.solvers.simplex import InfeasibleLPError, UnboundedLPError, linprog

from app import config
from app.models.core import GuardTripped

logger = logging.getLogger("models.lattice")

Row = Tuple[Sequence[Fraction], Fraction]


class LPUnbounded(Exception):
    pass


def _sym(x) -> Rational:
    x = Fraction(x)
    return Rational(x.numerator, x.denominator)


def _frac(x) -> Fraction:
    x = Rational(x)
    return Fraction(int(x.p), int(x.q))


def solve_lp(c: Sequence[Fraction], rows: Sequence[Row]) -> Optional[Tuple[Fraction, List[Fraction]]]:
    """
    LP exato: minimiza c·x sujeito a A x ≤ b e x ≥ 0.

    Devolve None quando inviável e levanta LPUnbounded quando ilimitado.
    """
    width = len(c)
    if not rows:
        # linprog exige ao menos uma linha
        rows = [([Fraction(0)] * width, Fraction(0))]
    A = [[_sym(a) for a in coeffs] for coeffs, _ in rows]
    b = [_sym(rhs) for _, rhs in rows]
    try:
        value, point = linprog([_sym(x) for x in c], A, b)
    except InfeasibleLPError:
        return None
    except UnboundedLPError:
        raise LPUnbounded()
    x = [_frac(v) for v in point]
    if not _satisfies(rows, x):
        # linprog pode devolver um ponto de um programa inviável
        logger.debug(f"⚠️ solução {x} do LP viola as restrições, tratada como inviável")
        return None
    return _frac(value), x


def _satisfies(rows: Sequence[Row], x: Sequence[Fraction]) -> bool:
    if any(v < 0 for v in x):
        return False
    return all(sum((Fraction(a) * v for a, v in zip(coeffs, x)), Fraction(0)) <= Fraction(rhs)
               for coeffs, rhs in rows)


def lcm_of_denominators(values: Sequence[Fraction]) -> int:
    out = 1
    for x in values:
        out = out * Fraction(x).denominator // math.gcd(out, Fraction(x).denominator)
    return out


def primitive_integer_vector(x: Sequence[Fraction]) -> Tuple[int, ...]:
    """Menor múltiplo inteiro positivo de um vetor racional não negativo."""
    scale = lcm_of_denominators(x)
    ints = [int(Fraction(v) * scale) for v in x]
    g = 0
    for v in ints:
        g = math.gcd(g, v)
    return tuple(v // g for v in ints) if g else tuple(ints)


# ==============================
# BRANCH AND BOUND
# ==============================

@dataclass
class LatticeProgram:
    """
    min  c·v + d·u   sobre v inteiro ≥ lower (Σv ≤ cap) e u real ≥ 0,
    sujeito às linhas  a·v + e·u ≤ r.

    `evaluate` devolve o objetivo exato de um ponto inteiro (None quando o
    ponto é inviável); os valores do objetivo ficam na grade (1/grid)·Z.
    """
    c: List[Fraction]
    d: List[Fraction]
    rows: List[Tuple[List[Fraction], List[Fraction], Fraction]]
    lower: List[int]
    evaluate: Callable[[Tuple[int, ...]], Optional[Fraction]]
    cap: Optional[int] = None
    grid: int = 1
    nodes: int = field(default=0, init=False)

    @property
    def n(self) -> int:
        return len(self.c)

    def relaxation(self, lo: Sequence[int], hi: Sequence[Optional[int]],
                   extra: Sequence[Row] = ()) -> Optional[Tuple[Fraction, List[Fraction]]]:
        """LP sobre v = lo + w; devolve (valor, v) ou None quando inviável."""
        n, k = self.n, len(self.d)
        const = sum((ci * li for ci, li in zip(self.c, lo)), Fraction(0))
        rows: List[Row] = []
        for a, e, r in self.rows:
            shift = sum((ai * li for ai, li in zip(a, lo)), Fraction(0))
            rows.append((list(a) + list(e), Fraction(r) - shift))
        for i in range(n):
            if hi[i] is not None:
                if hi[i] < lo[i]:
                    return None
                unit = [Fraction(0)] * (n + k)
                unit[i] = Fraction(1)
                rows.append((unit, Fraction(hi[i] - lo[i])))
        if self.cap is not None:
            room = self.cap - sum(lo)
            if room < 0:
                return None
            rows.append(([Fraction(1)] * n + [Fraction(0)] * k, Fraction(room)))
        for a, r in extra:
            shift = sum((Fraction(ai) * li for ai, li in zip(a, lo)), Fraction(0))
            rows.append((list(a) + [Fraction(0)] * k, Fraction(r) - shift))
        solved = solve_lp(list(self.c) + list(self.d), rows)
        if solved is None:
            return None
        value, x = solved
        return value + const, [Fraction(li) + wi for li, wi in zip(lo, x[:n])]

    def grid_ceil(self, z: Fraction) -> Fraction:
        return Fraction(math.ceil(z * self.grid), self.grid)

    def minimize(self, incumbent: Tuple[int, ...]) -> Tuple[Fraction, Tuple[int, ...]]:
        """Branch and bound em profundidade a partir de um ponto inteiro viável."""
        best_point = tuple(incumbent)
        best = self.evaluate(best_point)
        if best is None:
            raise ValueError(f"starting point {best_point} is infeasible")
        stack = [(list(self.lower), [None] * self.n)]
        while stack:
            lo, hi = stack.pop()
            self.nodes += 1
            if self.nodes > config.NODE_CAP:
                raise GuardTripped(f"branch and bound exceeded {config.NODE_CAP} nodes")
            relaxed = self.relaxation(lo, hi)
            if relaxed is None:
                continue
            z, x = relaxed
            if self.grid_ceil(z) >= best:
                continue
            for guess in (tuple(math.floor(xi) for xi in x), tuple(math.ceil(xi) for xi in x)):
                if all(l <= g and (h is None or g <= h) for g, l, h in zip(guess, lo, hi)):
                    if self.cap is None or sum(guess) <= self.cap:
                        val = self.evaluate(guess)
                        if val is not None and val < best:
                            best, best_point = val, guess
            frac = [i for i, xi in enumerate(x) if xi.denominator != 1]
            if not frac:
                continue
            i = frac[0]
            down_hi = list(hi)
            down_hi[i] = math.floor(x[i])
            up_lo = list(lo)
            up_lo[i] = math.ceil(x[i])
            # cada filho precisa encolher a caixa
            if up_lo[i] > lo[i]:
                stack.append((up_lo, list(hi)))
            if hi[i] is None or down_hi[i] < hi[i]:
                stack.append((list(lo), down_hi))
        logger.debug(f"🔄 branch and bound: {self.nodes} nós, ótimo {best} em {best_point}")
        return best, best_point
