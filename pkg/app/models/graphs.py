# models/graphs.py
import logging
from typing import Any, Hashable, List, Optional, Sequence

import networkx as nx

from app.models.core import InputError

logger = logging.getLogger("models.graphs")


def _ordered(vertices) -> List[Hashable]:
    vertices = list(vertices)
    try:
        return sorted(vertices)
    except TypeError:
        return sorted(vertices, key=repr)


def order_bound(ell: int) -> int:
    """(3^ℓ - 1)/2: a ordem que garante uma cadeia de ℓ vértices."""
    return (3 ** ell - 1) // 2


def is_induced_path(G: nx.Graph, path: Sequence[Hashable], v: Hashable) -> bool:
    if not path or path[0] != v or len(set(path)) != len(path):
        return False
    position = {w: i for i, w in enumerate(path)}
    for i, w in enumerate(path):
        for u in G.neighbors(w):
            if u in position and abs(position[u] - i) != 1:
                return False
        if i + 1 < len(path) and not G.has_edge(w, path[i + 1]):
            return False
    return True


def _split(G: nx.Graph, v: Hashable, ell: int) -> Optional[List[Hashable]]:
    """Remove v, fica com uma componente grande e recorre a partir de um vizinho de v nela."""
    if ell == 1:
        return [v]
    H = G.copy()
    H.remove_node(v)
    need = order_bound(ell - 1)
    components = sorted(nx.connected_components(H), key=lambda c: (-len(c), repr(_ordered(c)[0])))
    for comp in components:
        if len(comp) < need:
            break
        neighbours = [u for u in _ordered(G.neighbors(v)) if u in comp]
        if not neighbours:
            continue
        rest = _split(H.subgraph(comp), neighbours[0], ell - 1)
        if rest is not None:
            return [v] + rest
    return None


def _exhaustive(G: nx.Graph, v: Hashable, ell: int) -> Optional[List[Hashable]]:
    stack = [[v]]
    while stack:
        path = stack.pop()
        if len(path) == ell:
            return path
        for u in reversed(_ordered(G.neighbors(path[-1]))):
            if u in path:
                continue
            # u só pode tocar a ponta atual do caminho
            if any(G.has_edge(u, w) for w in path[:-1]):
                continue
            stack.append(path + [u])
    return None


def find_chain_in_graph(G: nx.Graph, v: Any, ell: int) -> Optional[List[Hashable]]:
    """Caminho induzido de ℓ vértices com v numa ponta, ou None se não existir."""
    if v not in G:
        raise InputError(f"vertex {v!r} is not in the graph")
    if ell < 1:
        raise InputError(f"chain length must be positive, got {ell}")
    if G.number_of_nodes() and max(d for _, d in G.degree()) > 3:
        raise InputError("every vertex must have degree at most 3")
    if not nx.is_connected(G):
        raise InputError("the graph must be connected")

    path = _split(G, v, ell)
    if path is not None and is_induced_path(G, path, v):
        return path

    far = [u for u, d in nx.single_source_shortest_path_length(G, v).items() if d == ell - 1]
    if far:
        # caminhos mínimos não têm cordas
        return nx.shortest_path(G, v, _ordered(far)[0])

    path = _exhaustive(G, v, ell)
    if path is None and G.number_of_nodes() >= order_bound(ell):
        logger.error(f"❌ nenhuma cadeia de comprimento {ell} a partir de {v} num grafo de ordem {G.number_of_nodes()}")
    return path
