# models/polynomials.py
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import comb
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from sympy import Poly, QQ, Rational, symbols

from app.models.core import InputError, MonomialIdeal, to_rat

logger = logging.getLogger("models.polynomials")

X, Y = symbols("x y")

Exponent = Tuple[int, int]


@dataclass(frozen=True)
class Poly2:
    """Polinômio esparso em duas variáveis com coeficientes racionais exatos."""
    terms: Tuple[Tuple[Exponent, Fraction], ...]

    def __post_init__(self):
        merged: Dict[Exponent, Fraction] = {}
        for (dx, dy), c in self.terms:
            if dx < 0 or dy < 0:
                raise InputError(f"negative exponent in term x^{dx} y^{dy}")
            merged[(int(dx), int(dy))] = merged.get((int(dx), int(dy)), Fraction(0)) + to_rat(c)
        cleaned = tuple(sorted((e, c) for e, c in merged.items() if c != 0))
        if not cleaned:
            raise InputError("the zero polynomial is not allowed")
        object.__setattr__(self, "terms", cleaned)

    @classmethod
    def from_dict(cls, terms: Mapping[Exponent, Fraction]) -> "Poly2":
        return cls(tuple(terms.items()))

    @classmethod
    def monomial(cls, dx: int, dy: int) -> "Poly2":
        return cls((((dx, dy), Fraction(1)),))

    def as_dict(self) -> Dict[Exponent, Fraction]:
        return dict(self.terms)

    @property
    def order(self) -> int:
        """Ordem de anulamento na origem."""
        return min(dx + dy for (dx, dy), _ in self.terms)

    @property
    def degree(self) -> int:
        return max(dx + dy for (dx, dy), _ in self.terms)

    def vanishes_at_origin(self) -> bool:
        return self.order > 0

    def form(self, d: int) -> Dict[Exponent, Fraction]:
        return {e: c for e, c in self.terms if sum(e) == d}

    # ---- substituições de carta ----

    def chart_x(self, mult: int) -> "Poly2":
        """(x, y) ↦ (x, xy), dividido por x^mult."""
        return Poly2(tuple(((dx + dy - mult, dy), c) for (dx, dy), c in self.terms))

    def chart_y(self, mult: int) -> "Poly2":
        """(x, y) ↦ (xy, y), dividido por y^mult."""
        return Poly2(tuple(((dx, dx + dy - mult), c) for (dx, dy), c in self.terms))

    def shift_y(self, t: Fraction) -> "Poly2":
        """P(x, y + t): recentra no ponto (0, t)."""
        if t == 0:
            return self
        out: Dict[Exponent, Fraction] = {}
        for (dx, dy), c in self.terms:
            for i in range(dy + 1):
                key = (dx, i)
                out[key] = out.get(key, Fraction(0)) + c * comb(dy, i) * t ** (dy - i)
        return Poly2(tuple(out.items()))

    def restrict_x0(self) -> Dict[int, Fraction]:
        """Coeficientes de P(0, y) por potência de y."""
        return {dy: c for (dx, dy), c in self.terms if dx == 0}

    def normalized(self) -> "Poly2":
        lead = self.terms[-1][1]
        return Poly2(tuple((e, c / lead) for e, c in self.terms))

    # ---- ponte com o sympy ----

    def to_sympy(self) -> Poly:
        rep = {e: Rational(c.numerator, c.denominator) for e, c in self.terms}
        return Poly.from_dict(rep, X, Y, domain=QQ)

    @classmethod
    def from_sympy(cls, p: Poly) -> "Poly2":
        return cls(tuple(((int(e[0]), int(e[1])), _frac(c)) for e, c in p.terms()))

    def __str__(self) -> str:
        parts = []
        for (dx, dy), c in self.terms:
            mono = "".join(v if d == 1 else f"{v}^{d}" for v, d in (("x", dx), ("y", dy)) if d)
            parts.append(f"{c}{'*' + mono if mono else ''}" if c != 1 or not mono else mono)
        return " + ".join(parts)


def _frac(c) -> Fraction:
    c = Rational(c)
    return Fraction(int(c.p), int(c.q))


# ==============================
# MDCs E FATORAÇÃO
# ==============================

def poly_gcd(polys: Sequence[Poly2]) -> Poly2:
    g = reduce(lambda a, b: a.gcd(b), [p.to_sympy() for p in polys])
    return Poly2.from_sympy(g)


def poly_quo(p: Poly2, q: Poly2) -> Poly2:
    return Poly2.from_sympy(p.to_sympy().exquo(q.to_sympy()))


def irreducible_factors(p: Poly2) -> List[Tuple[Poly2, int]]:
    """Fatores irredutíveis não constantes sobre Q, normalizados, com multiplicidades."""
    _, factors = p.to_sympy().factor_list()
    out = []
    for f, e in factors:
        if f.total_degree() > 0:
            out.append((Poly2.from_sympy(f).normalized(), int(e)))
    return out


def univariate(coeffs: Mapping[int, Fraction]) -> Optional[Poly]:
    if not coeffs:
        return None
    rep = {(d,): Rational(c.numerator, c.denominator) for d, c in coeffs.items()}
    return Poly.from_dict(rep, Y, domain=QQ)


def univariate_gcd(polys: Iterable[Optional[Poly]]) -> Optional[Poly]:
    present = [p for p in polys if p is not None]
    if not present:
        return None
    return reduce(lambda a, b: a.gcd(b), present)


def split_roots(p: Poly) -> Tuple[List[Fraction], List[Poly]]:
    """Raízes racionais de p e seus fatores irredutíveis de grau ≥ 2."""
    roots, rest = [], []
    _, factors = p.factor_list()
    for f, _ in factors:
        if f.degree() == 1:
            a, b = f.all_coeffs()
            roots.append(-_frac(b) / _frac(a))
        elif f.degree() > 1:
            rest.append(f.monic())
    return sorted(set(roots)), rest


def multiplicity_of(factor: Poly, p: Optional[Poly]) -> int:
    if p is None or p.is_zero:
        return 0
    count = 0
    while True:
        q, r = p.div(factor)
        if not r.is_zero:
            return count
        p = q
        count += 1


# ==============================
# IDEAIS POLINOMIAIS
# ==============================

@dataclass(frozen=True)
class PolyIdeal:
    """Ideal de Q[x, y] dado por geradores."""
    polys: Tuple[Poly2, ...]

    def __post_init__(self):
        if not self.polys:
            raise InputError("empty generator set")
        object.__setattr__(self, "polys", tuple(self.polys))

    @property
    def n(self) -> int:
        return 2

    @classmethod
    def from_monomial(cls, I: MonomialIdeal) -> "PolyIdeal":
        if I.n != 2:
            raise InputError(f"surface engine works on A^2, got a monomial ideal on A^{I.n}")
        return cls(tuple(Poly2.monomial(*g) for g in I.gens))

    def vanishes_at_origin(self) -> bool:
        return all(p.vanishes_at_origin() for p in self.polys)

    def __str__(self) -> str:
        return "(" + ", ".join(str(p) for p in self.polys) + ")"
