# models/core.py
import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Any, Iterable, List, Optional, Sequence, Tuple, Union

logger = logging.getLogger("models.core")

Rat = Fraction
Monomial = Tuple[int, ...]

# ==============================
# ERROS
# ==============================

class MldLabError(Exception):
    """Classe base de todos os erros levantados pelos motores."""


class InputError(MldLabError, ValueError):
    pass


class PreconditionError(MldLabError):
    pass


class IrrationalCenterError(MldLabError):
    """O centro de um blow-up precisaria de coordenadas fora de Q."""


class GuardTripped(MldLabError):
    pass


class InvariantViolation(MldLabError):
    pass


# ==============================
# RACIONAIS
# ==============================

def to_rat(value: Any) -> Fraction:
    """Aceita ints, Fractions e strings como "5/6"; floats são recusados."""
    if isinstance(value, bool):
        raise InputError(f"not a rational: {value!r}")
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise InputError(f"not a rational: {value!r}")
    raise InputError(f"not an exact rational: {value!r}")


def format_rat(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True, order=False)
class ExtRat:
    """Racional estendido pelos dois infinitos."""
    tag: str
    value: Optional[Fraction] = None

    FINITE = "FINITE"
    NEG = "NEG_INF"
    POS = "POS_INF"

    @classmethod
    def finite(cls, x: Any) -> "ExtRat":
        return cls(cls.FINITE, to_rat(x))

    @property
    def is_finite(self) -> bool:
        return self.tag == self.FINITE

    def _key(self) -> Tuple[int, Fraction]:
        if self.tag == self.NEG:
            return (-1, Fraction(0))
        if self.tag == self.POS:
            return (1, Fraction(0))
        return (0, self.value)

    def __lt__(self, other: "ExtRat") -> bool:
        return self._key() < _ext(other)._key()

    def __le__(self, other: "ExtRat") -> bool:
        return self._key() <= _ext(other)._key()

    def __gt__(self, other: "ExtRat") -> bool:
        return self._key() > _ext(other)._key()

    def __ge__(self, other: "ExtRat") -> bool:
        return self._key() >= _ext(other)._key()

    def __str__(self) -> str:
        if self.tag == self.NEG:
            return "-inf"
        if self.tag == self.POS:
            return "+inf"
        return format_rat(self.value)

    @classmethod
    def parse(cls, text: str) -> "ExtRat":
        text = text.strip()
        if text == "-inf":
            return NEG_INF
        if text in ("+inf", "inf"):
            return POS_INF
        return cls.finite(text)


def _ext(x: Any) -> ExtRat:
    return x if isinstance(x, ExtRat) else ExtRat.finite(x)


NEG_INF = ExtRat(ExtRat.NEG)
POS_INF = ExtRat(ExtRat.POS)


# ==============================
# IDEAIS MONOMIAIS
# ==============================

def divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


@dataclass(frozen=True)
class MonomialIdeal:
    n: int
    gens: Tuple[Monomial, ...]

    @property
    def is_unit(self) -> bool:
        return self.gens == (tuple([0] * self.n),)

    @property
    def max_degree(self) -> int:
        return max(sum(g) for g in self.gens)

    @property
    def order(self) -> int:
        """Ordem ao longo do ideal maximal da origem."""
        return min(sum(g) for g in self.gens)

    def __str__(self) -> str:
        names = "xyzw" if self.n <= 4 else None

        def mono(g: Monomial) -> str:
            if not any(g):
                return "1"
            parts = []
            for i, e in enumerate(g):
                if e == 0:
                    continue
                var = names[i] if names else f"x{i + 1}"
                parts.append(var if e == 1 else f"{var}^{e}")
            return "".join(parts)

        return "(" + ", ".join(mono(g) for g in self.gens) + ")"


def normalize_ideal(gens: Iterable[Sequence[int]], n: Optional[int] = None) -> MonomialIdeal:
    vectors = [tuple(int(e) for e in g) for g in gens]
    if not vectors:
        raise InputError("empty generator set")
    dims = {len(g) for g in vectors}
    if len(dims) != 1:
        raise InputError(f"mixed dimensions in generators: {sorted(dims)}")
    dim = dims.pop()
    if n is not None and n != dim:
        raise InputError(f"generators have dimension {dim}, expected {n}")
    if any(e < 0 for g in vectors for e in g):
        raise InputError("negative exponent in a monomial")

    unique = sorted(set(vectors))
    minimal = [g for g in unique if not any(h != g and divides(h, g) for h in unique)]
    return MonomialIdeal(dim, tuple(minimal))


def _check_same_dim(I: MonomialIdeal, J: MonomialIdeal) -> None:
    if I.n != J.n:
        raise InputError(f"dimension mismatch: {I.n} vs {J.n}")


def ideal_contains(I: MonomialIdeal, J: MonomialIdeal) -> bool:
    """True se e só se J ⊆ I."""
    _check_same_dim(I, J)
    return all(any(divides(g, h) for g in I.gens) for h in J.gens)


def monomials_of_degree(n: int, d: int) -> List[Monomial]:
    out = []
    for combo in combinations_with_replacement(range(n), d):
        v = [0] * n
        for i in combo:
            v[i] += 1
        out.append(tuple(v))
    return sorted(out)


def max_ideal(n: int, d: int = 1) -> MonomialIdeal:
    if n < 1:
        raise InputError("dimension must be positive")
    if d < 0:
        raise InputError(f"negative power {d}")
    return normalize_ideal(monomials_of_degree(n, d), n)


def sum_with_power_of_max_ideal(I: MonomialIdeal, d: int) -> MonomialIdeal:
    if d <= 0:
        raise InputError(f"power of the maximal ideal must be positive, got {d}")
    return normalize_ideal(list(I.gens) + monomials_of_degree(I.n, d), I.n)


# ==============================
# R-IDEAIS
# ==============================

@dataclass(frozen=True)
class RIdeal:
    """Produto formal de ideais com expoentes racionais não negativos."""
    factors: Tuple[Tuple[Any, Fraction], ...] = ()

    def __post_init__(self):
        fixed = []
        dims = set()
        for ideal, exp in self.factors:
            exp = to_rat(exp)
            if exp < 0:
                raise InputError(f"negative exponent {format_rat(exp)}")
            dims.add(ideal.n)
            fixed.append((ideal, exp))
        if len(dims) > 1:
            raise InputError(f"factors of mixed dimensions: {sorted(dims)}")
        object.__setattr__(self, "factors", tuple(fixed))

    @property
    def n(self) -> Optional[int]:
        return self.factors[0][0].n if self.factors else None

    @property
    def is_trivial(self) -> bool:
        return not self.factors

    @property
    def is_monomial(self) -> bool:
        return all(isinstance(ideal, MonomialIdeal) for ideal, _ in self.factors)

    @property
    def exponent_sum(self) -> Fraction:
        return sum((exp for _, exp in self.factors), Fraction(0))

    def ideals(self) -> List[Any]:
        return [ideal for ideal, _ in self.factors]

    def exponents(self) -> List[Fraction]:
        return [exp for _, exp in self.factors]

    def times(self, other: "RIdeal") -> "RIdeal":
        return RIdeal(self.factors + other.factors)

    def with_factor(self, ideal: Any, exp: Any) -> "RIdeal":
        return RIdeal(self.factors + ((ideal, to_rat(exp)),))

    def power(self, delta: Any) -> "RIdeal":
        delta = to_rat(delta)
        if delta < 0:
            raise InputError("negative power of an R-ideal")
        return RIdeal(tuple((ideal, exp * delta) for ideal, exp in self.factors))

    def __str__(self) -> str:
        if not self.factors:
            return "1"
        return "·".join(f"{ideal}^{format_rat(exp)}" for ideal, exp in self.factors)


# ==============================
# DIVISORES E RESULTADOS
# ==============================

@dataclass(frozen=True)
class WeightVector:
    """Divisor tórico de pesos v; centrado na origem quando toda entrada é ≥ 1."""
    v: Tuple[int, ...]

    def __post_init__(self):
        v = tuple(int(x) for x in self.v)
        if not v or any(x < 0 for x in v) or not any(v):
            raise InputError(f"weight vector must be nonnegative and nonzero: {v}")
        object.__setattr__(self, "v", v)

    @property
    def n(self) -> int:
        return len(self.v)

    @property
    def k(self) -> int:
        return sum(self.v) - 1

    @property
    def ord_m(self) -> int:
        return min(self.v)

    @property
    def centered(self) -> bool:
        return all(x >= 1 for x in self.v)


Witness = Union[WeightVector, int, str]


@dataclass(frozen=True)
class MldResult:
    value: ExtRat
    witness: Optional[Witness] = None
    witness_k: Optional[int] = None
    witness_ord_m: Optional[int] = None
    certified: bool = True

    def __post_init__(self):
        if self.value.tag != ExtRat.POS and self.witness is None:
            raise InvariantViolation(f"result {self.value} without a witness")
        if isinstance(self.witness, WeightVector) and self.witness_ord_m != self.witness.ord_m:
            raise InvariantViolation("witness_ord_m disagrees with the witness")

    @classmethod
    def for_weight(cls, value: ExtRat, v: Sequence[int], certified: bool = True) -> "MldResult":
        w = WeightVector(tuple(v))
        return cls(value, w, w.k, w.ord_m, certified)
