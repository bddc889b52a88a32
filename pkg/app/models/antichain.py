# models/antichain.py
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from app.models.core import InputError, MonomialIdeal, ideal_contains, normalize_ideal

logger = logging.getLogger("models.antichain")


@dataclass(frozen=True)
class IdealSequence:
    items: Tuple[MonomialIdeal, ...]

    def __post_init__(self):
        items = tuple(self.items)
        if not items:
            raise InputError("an ideal sequence must be nonempty")
        dims = {I.n for I in items}
        if len(dims) != 1:
            raise InputError(f"sequence mixes dimensions {sorted(dims)}")
        object.__setattr__(self, "items", tuple(normalize_ideal(I.gens, I.n) for I in items))

    def __len__(self) -> int:
        return len(self.items)


def find_comparable_pair(U: Sequence[MonomialIdeal]) -> Optional[Tuple[int, int]]:
    """Menor par (i, j) na ordem lexicográfica, i ≠ j, com U[i] ⊆ U[j]."""
    if len(U) < 2:
        raise InputError("need at least two ideals")
    for i, I in enumerate(U):
        for j, J in enumerate(U):
            if i != j and ideal_contains(J, I):
                return i, j
    return None


def _chain_within(items: Sequence[MonomialIdeal], allowed: Sequence[int], target_len: int) -> List[int]:
    """
    Maior subsequência ⊇-descendente entre os índices `allowed`, truncada em
    target_len, escolhendo a lista de índices lexicograficamente menor.
    """
    # longest[i]: comprimento da maior cadeia descendente que começa em allowed[i]
    longest = [1] * len(allowed)
    for a in range(len(allowed) - 1, -1, -1):
        for b in range(a + 1, len(allowed)):
            if ideal_contains(items[allowed[a]], items[allowed[b]]):
                longest[a] = max(longest[a], longest[b] + 1)

    t = min(target_len, max(longest))
    chain: List[int] = []
    start = 0
    for need in range(t, 0, -1):
        for a in range(start, len(allowed)):
            fits = not chain or ideal_contains(items[chain[-1]], items[allowed[a]])
            if fits and longest[a] >= need:
                chain.append(allowed[a])
                start = a + 1
                break
    return chain


def extract_descending_chain(s: IdealSequence, target_len: int) -> Optional[List[int]]:
    """Nunca None numa sequência não vazia: um único índice já é uma cadeia."""
    if target_len < 1:
        raise InputError(f"target length must be positive, got {target_len}")
    chain = _chain_within(s.items, list(range(len(s))), target_len)
    logger.debug(f"🔄 cadeia descendente de comprimento {len(chain)} entre {len(s)} ideais")
    return chain or None


def multi_factor_descending(seqs: Sequence[IdealSequence], target_len: int) -> Optional[List[int]]:
    """
    Restringe a uma cadeia da primeira coordenada, depois refina dentro dela
    com a segunda coordenada, e assim por diante.

    Cada passo fixa a maior cadeia lexicograficamente menor da sua
    coordenada, então o resultado pode ser mais curto que a maior lista de
    índices em que todas as coordenadas descem ao mesmo tempo.
    """
    if not seqs:
        raise InputError("need at least one sequence")
    if len({len(s) for s in seqs}) != 1:
        raise InputError("sequences have different lengths")
    if target_len < 1:
        raise InputError(f"target length must be positive, got {target_len}")

    allowed = list(range(len(seqs[0])))
    for s in seqs:
        allowed = _chain_within(s.items, allowed, len(allowed))
    if len(allowed) > target_len:
        allowed = allowed[:target_len]
    return allowed or None
