# services/codec.py
import json
import logging
from fractions import Fraction
from typing import Annotated, Any, Dict, List, Optional, Type, TypeVar, Union

import networkx as nx
from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, ValidationError, field_validator

from app.models.antichain import IdealSequence
from app.models.core import (
    ExtRat,
    InputError,
    MldResult,
    MonomialIdeal,
    RIdeal,
    WeightVector,
    format_rat,
    normalize_ideal,
    to_rat,
)
from app.models.jets import JetQuery
from app.models.polynomials import Poly2, PolyIdeal
from app.models.surface import BlowupChain, dual_graph
from app.models.toric import ToricProblem
from app.services.experiments import ExperimentKind, ExperimentSpec

logger = logging.getLogger("services.codec")

M = TypeVar("M", bound=BaseModel)


def _rat_text(value: Any) -> str:
    if isinstance(value, bool) or not isinstance(value, (int, str)):
        raise ValueError("rationals are written as strings like \"5/6\"")
    try:
        return format_rat(to_rat(value))
    except InputError as exc:
        raise ValueError(str(exc))


RatStr = Annotated[str, BeforeValidator(_rat_text)]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


# ==============================
# ESQUEMAS
# ==============================

class MonomialIdealModel(_Strict):
    n: int = Field(ge=1)
    gens: List[List[int]] = Field(min_length=1)

    @field_validator("gens")
    @classmethod
    def _nonnegative(cls, gens: List[List[int]]) -> List[List[int]]:
        if any(e < 0 for g in gens for e in g):
            raise ValueError("exponents must be nonnegative")
        return gens


class TermModel(_Strict):
    dx: int = Field(ge=0)
    dy: int = Field(ge=0)
    c: RatStr


class PolyModel(_Strict):
    terms: List[TermModel] = Field(min_length=1)


class PolyIdealModel(_Strict):
    polys: List[PolyModel] = Field(min_length=1)


class FactorModel(_Strict):
    ideal: Union[MonomialIdealModel, PolyIdealModel]
    exp: RatStr

    @field_validator("exp")
    @classmethod
    def _nonnegative(cls, exp: str) -> str:
        if Fraction(exp) < 0:
            raise ValueError("exponent must be nonnegative")
        return exp


class RIdealModel(_Strict):
    factors: List[FactorModel] = []


class ToricProblemModel(_Strict):
    n: int = Field(ge=1)
    a: RIdealModel


class FamilyModel(_Strict):
    family: List[ToricProblemModel] = Field(min_length=1)


class JetQueryModel(_Strict):
    a: MonomialIdealModel
    n: Optional[int] = None
    q: RatStr
    jet_levels: List[int] = [0]

    @field_validator("q")
    @classmethod
    def _positive(cls, q: str) -> str:
        if Fraction(q) <= 0:
            raise ValueError("q must be positive")
        return q


class SeqModel(_Strict):
    items: List[MonomialIdealModel] = Field(min_length=1)


class MultiSeqModel(_Strict):
    sequences: List[SeqModel] = Field(min_length=1)


class GraphModel(_Strict):
    vertices: List[Union[int, str]]
    edges: List[List[Union[int, str]]] = []

    @field_validator("edges")
    @classmethod
    def _pairs(cls, edges):
        if any(len(e) != 2 for e in edges):
            raise ValueError("every edge joins exactly two vertices")
        return edges


class ExperimentSpecModel(_Strict):
    kind: str
    n: int = Field(default=2, ge=1)
    exponents: List[RatStr] = ["1"]
    sample_count: int = Field(default=20, ge=1)
    seed: int = 0
    max_degree: int = Field(default=4, ge=1)
    max_factors: int = Field(default=1, ge=1)
    truncation_levels: List[int] = []
    family: Optional[List[ToricProblemModel]] = None
    alarm_length: Optional[int] = Field(default=None, ge=0)
    bound: Optional[int] = Field(default=None, ge=1)
    jet_level_limit: Optional[int] = Field(default=None, ge=0)

    @field_validator("kind")
    @classmethod
    def _kind(cls, kind: str) -> str:
        kind = kind.upper().replace("-", "_")
        if kind not in ("BOUNDEDNESS", "ACC", "IDEAL_ADIC"):
            raise ValueError("kind must be BOUNDEDNESS, ACC or IDEAL_ADIC")
        return kind


# ==============================
# LEITURA
# ==============================

def _field_path(loc) -> str:
    return ".".join(str(part) for part in loc) or "<root>"


def load_json(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}")


def validate(raw: Any, model: Type[M]) -> M:
    try:
        return model.model_validate(raw)
    except ValidationError as exc:
        first = exc.errors()[0]
        raise InputError(f"{_field_path(first['loc'])}: {first['msg']}")


def parse_model(text: str, model: Type[M]) -> M:
    return validate(load_json(text), model)


def monomial_ideal_from(m: MonomialIdealModel) -> MonomialIdeal:
    return normalize_ideal(m.gens, m.n)


def poly_from(m: PolyModel) -> Poly2:
    return Poly2(tuple(((t.dx, t.dy), Fraction(t.c)) for t in m.terms))


def ideal_from(m: Union[MonomialIdealModel, PolyIdealModel]):
    if isinstance(m, MonomialIdealModel):
        return monomial_ideal_from(m)
    return PolyIdeal(tuple(poly_from(p) for p in m.polys))


def r_ideal_from(m: RIdealModel) -> RIdeal:
    return RIdeal(tuple((ideal_from(f.ideal), Fraction(f.exp)) for f in m.factors))


def toric_problem_from(m: ToricProblemModel) -> ToricProblem:
    return ToricProblem(m.n, r_ideal_from(m.a))


def parse_r_ideal(text: str) -> RIdeal:
    return r_ideal_from(parse_model(text, RIdealModel))


def jet_query_from(m: JetQueryModel) -> JetQuery:
    a = monomial_ideal_from(m.a)
    return JetQuery(a, m.n if m.n is not None else a.n, Fraction(m.q), tuple(m.jet_levels))


def sequence_from(m: SeqModel) -> IdealSequence:
    return IdealSequence(tuple(monomial_ideal_from(I) for I in m.items))


def parse_sequences(text: str) -> List[IdealSequence]:
    """Uma sequência {"items": ...}, ou {"sequences": [...]} para vários fatores."""
    raw = load_json(text)
    if isinstance(raw, dict) and "sequences" in raw:
        return [sequence_from(s) for s in validate(raw, MultiSeqModel).sequences]
    return [sequence_from(validate(raw, SeqModel))]


def parse_surface_pair(text: str) -> RIdeal:
    """R-ideal em A^2, puro ou embrulhado como {"n": 2, "a": ...}."""
    raw = load_json(text)
    if isinstance(raw, dict) and "a" in raw:
        m = validate(raw, ToricProblemModel)
        if m.n != 2:
            raise InputError(f"the surface engine works on A^2, got n = {m.n}")
        a = r_ideal_from(m.a)
    else:
        a = r_ideal_from(validate(raw, RIdealModel))
    if a.n not in (None, 2):
        raise InputError(f"the surface engine works on A^2, got factors on A^{a.n}")
    return a


def graph_from(m: GraphModel) -> nx.Graph:
    G = nx.Graph()
    G.add_nodes_from(m.vertices)
    for u, v in m.edges:
        if u not in G or v not in G:
            raise InputError(f"edge {[u, v]} uses an unknown vertex")
        G.add_edge(u, v)
    return G


def experiment_spec_from(m: ExperimentSpecModel) -> ExperimentSpec:
    family = None
    if m.family is not None:
        family = tuple(toric_problem_from(p) for p in m.family)
    return ExperimentSpec(
        kind=ExperimentKind(m.kind),
        n=m.n,
        exponents=tuple(Fraction(e) for e in m.exponents),
        sample_count=m.sample_count,
        seed=m.seed,
        max_degree=m.max_degree,
        max_factors=m.max_factors,
        truncation_levels=tuple(m.truncation_levels),
        family=family,
        alarm_length=m.alarm_length,
        bound=m.bound,
        jet_level_limit=m.jet_level_limit,
    )


def parse_ext_rat(text: str) -> ExtRat:
    return ExtRat.parse(text)


# ==============================
# EMISSÃO
# ==============================

def emit_monomial_ideal(I: MonomialIdeal) -> Dict[str, Any]:
    return {"n": I.n, "gens": [list(g) for g in I.gens]}


def emit_poly(p: Poly2) -> Dict[str, Any]:
    return {"terms": [{"dx": dx, "dy": dy, "c": format_rat(c)} for (dx, dy), c in p.terms]}


def emit_ideal(ideal) -> Dict[str, Any]:
    if isinstance(ideal, MonomialIdeal):
        return emit_monomial_ideal(ideal)
    return {"polys": [emit_poly(p) for p in ideal.polys]}


def emit_r_ideal(a: RIdeal) -> Dict[str, Any]:
    return {"factors": [{"ideal": emit_ideal(ideal), "exp": format_rat(exp)} for ideal, exp in a.factors]}


def emit_toric_problem(p: ToricProblem) -> Dict[str, Any]:
    return {"n": p.n, "a": emit_r_ideal(p.a)}


def emit_experiment_spec(spec: ExperimentSpec) -> Dict[str, Any]:
    out = {
        "kind": spec.kind.value,
        "n": spec.n,
        "exponents": [format_rat(e) for e in spec.exponents],
        "sample_count": spec.sample_count,
        "seed": spec.seed,
        "max_degree": spec.max_degree,
        "max_factors": spec.max_factors,
        "truncation_levels": list(spec.truncation_levels),
    }
    if spec.family is not None:
        out["family"] = [emit_toric_problem(p) for p in spec.family]
    for key in ("alarm_length", "bound", "jet_level_limit"):
        if getattr(spec, key) is not None:
            out[key] = getattr(spec, key)
    return out


def emit_result(r: MldResult) -> Dict[str, Any]:
    witness = r.witness
    if isinstance(witness, WeightVector):
        witness = list(witness.v)
    return {
        "value": str(r.value),
        "witness": witness,
        "k": r.witness_k,
        "ord_m": r.witness_ord_m,
        "certified": r.certified,
    }


def emit_chain(chain: BlowupChain) -> Dict[str, Any]:
    G = dual_graph(chain)
    nodes = []
    for n in chain.nodes:
        nodes.append({
            "id": n.id,
            "parent": n.parent,
            "point": [format_rat(c) for c in n.point],
            "chart": n.chart,
            "proximate_to": list(n.proximate_to),
            "k": n.k,
            "ord_m": n.ord_m,
            "mults": list(n.mults),
            "ords": list(n.ords),
            "self_int": n.self_int,
            "a_E": format_rat(chain.log_discrepancy(n.id)),
        })
    return {
        "ideal": emit_r_ideal(chain.a),
        "resolved": chain.resolved,
        "nodes": nodes,
        "dual_graph": {
            "vertices": sorted(G.nodes),
            "edges": sorted([sorted(e) for e in G.edges]),
        },
    }


def dumps(obj: Any, compact: bool = False) -> str:
    if compact:
        return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False)
