import json
from fractions import Fraction

import pytest

from app.models.core import NEG_INF, InputError, RIdeal
from app.models.polynomials import Poly2, PolyIdeal
from app.models.surface import log_resolve
from app.models.toric import mld_monomial
from app.services import codec
from app.services.experiments import ExperimentKind, ExperimentSpec
from conftest import monomial, problem

CUSP_TEXT = json.dumps({"factors": [{
    "ideal": {"polys": [{"terms": [{"dx": 2, "dy": 0, "c": "1"}, {"dx": 0, "dy": 3, "c": "1"}]}]},
    "exp": "1",
}]})


def test_r_ideal_round_trip_is_canonical():
    a = RIdeal(((monomial(2, (1, 0), (0, 3)), Fraction(5, 6)), (monomial(2, (1, 1)), Fraction(2))))
    text = codec.dumps(codec.emit_r_ideal(a))
    assert codec.parse_r_ideal(text) == a
    assert codec.dumps(codec.emit_r_ideal(codec.parse_r_ideal(text))) == text


def test_polynomial_factors_parse():
    a = codec.parse_r_ideal(CUSP_TEXT)
    (ideal, exp), = a.factors
    assert isinstance(ideal, PolyIdeal) and exp == 1
    assert ideal.polys[0] == Poly2.from_dict({(2, 0): Fraction(1), (0, 3): Fraction(1)})


def test_ext_rat_text():
    assert codec.parse_ext_rat("-inf") == NEG_INF
    assert str(codec.parse_ext_rat("10/4")) == "5/2"


def test_exponents_accept_integers_and_canonicalize():
    m = codec.parse_model('{"n": 2, "a": {"factors": [{"ideal": {"n": 2, "gens": [[1, 1]]}, "exp": "2/4"}]}}',
                          codec.ToricProblemModel)
    assert m.a.factors[0].exp == "1/2"
    m = codec.parse_model('{"ideal": {"n": 1, "gens": [[1]]}, "exp": 3}', codec.FactorModel)
    assert m.exp == "3"


@pytest.mark.parametrize("text,fragment", [
    ('{"factors": [{"ideal": {"n": 2, "gens": [[1, 0]]}, "exp": "-1"}]}', "factors.0.exp"),
    ('{"factors": [{"ideal": {"n": 2, "gens": [[1, 0]]}, "exp": 0.5}]}', "factors.0.exp"),
    ('{"factors": [{"ideal": {"n": 2, "gens": [[1, 0]]}, "exp": "1", "extra": 1}]}', "factors.0.extra"),
    ('{"factors": [', "line 1, column"),
])
def test_malformed_input_names_the_problem(text, fragment):
    with pytest.raises(InputError) as err:
        codec.parse_r_ideal(text)
    assert fragment in str(err.value)


def test_invalid_json_reports_position():
    with pytest.raises(InputError, match="line 2, column"):
        codec.load_json('{\n  "n": }')


def test_sequences():
    single = codec.parse_sequences('{"items": [{"n": 2, "gens": [[1, 0]]}, {"n": 2, "gens": [[2, 0]]}]}')
    assert len(single) == 1 and len(single[0]) == 2
    multi = codec.parse_sequences(json.dumps({"sequences": [
        {"items": [{"n": 1, "gens": [[1]]}]},
        {"items": [{"n": 1, "gens": [[2]]}]},
    ]}))
    assert len(multi) == 2


def test_surface_pair_forms():
    bare = codec.parse_surface_pair(CUSP_TEXT)
    wrapped = codec.parse_surface_pair(json.dumps({"n": 2, "a": json.loads(CUSP_TEXT)}))
    assert bare == wrapped
    with pytest.raises(InputError):
        codec.parse_surface_pair('{"n": 3, "a": {"factors": []}}')
    with pytest.raises(InputError):
        codec.parse_surface_pair('{"factors": [{"ideal": {"n": 3, "gens": [[1, 0, 0]]}, "exp": "1"}]}')


def test_graph_parsing():
    G = codec.graph_from(codec.parse_model('{"vertices": [0, 1, "c"], "edges": [[0, 1], [1, "c"]]}',
                                           codec.GraphModel))
    assert sorted(G.edges, key=repr) == [(0, 1), (1, "c")]
    with pytest.raises(InputError):
        codec.graph_from(codec.parse_model('{"vertices": [0], "edges": [[0, 5]]}', codec.GraphModel))
    with pytest.raises(InputError):
        codec.parse_model('{"vertices": [0, 1], "edges": [[0, 1, 1]]}', codec.GraphModel)


def test_experiment_spec_parsing():
    m = codec.parse_model('{"kind": "ideal-adic", "exponents": ["1", "1/2"], "truncation_levels": [4, 2]}',
                          codec.ExperimentSpecModel)
    spec = codec.experiment_spec_from(m)
    assert spec.kind == ExperimentKind.IDEAL_ADIC
    assert spec.exponents == (Fraction(1, 2), Fraction(1))
    assert spec.truncation_levels == (2, 4)
    with pytest.raises(InputError):
        codec.parse_model('{"kind": "lottery"}', codec.ExperimentSpecModel)
    with pytest.raises(InputError):
        codec.experiment_spec_from(codec.parse_model('{"kind": "IDEAL_ADIC"}', codec.ExperimentSpecModel))


def test_result_json_shape():
    r = mld_monomial(problem(2, (monomial(2, (2, 0), (0, 3)), Fraction(5, 6))))
    out = codec.emit_result(r)
    assert out == {"value": "0", "witness": [3, 2], "k": 4, "ord_m": 2, "certified": True}


def test_chain_json_shape(cusp):
    out = codec.emit_chain(log_resolve(cusp))
    assert out["resolved"] is True
    assert [n["k"] for n in out["nodes"]] == [1, 2, 4]
    assert [n["a_E"] for n in out["nodes"]] == ["0", "0", "-1"]
    assert [n["ord_m"] for n in out["nodes"]] == [1, 1, 2]
    assert out["dual_graph"]["edges"] == [[0, 2], [1, 2]]


def test_dumps_is_sorted_and_compact_on_request():
    assert codec.dumps({"b": 1, "a": [1, 2]}, compact=True) == '{"a":[1,2],"b":1}'
    assert codec.dumps({"a": 1}).startswith("{\n")


# ==============================
# IDA E VOLTA
# ==============================

def _reparse(payload, model):
    return codec.parse_model(codec.dumps(payload), model)


def test_monomial_ideal_round_trip():
    I = monomial(3, (2, 0, 1), (0, 3, 0), (1, 1, 1))
    assert codec.monomial_ideal_from(_reparse(codec.emit_monomial_ideal(I), codec.MonomialIdealModel)) == I


def test_toric_problem_round_trip():
    p = problem(2, (monomial(2, (2, 0), (0, 3)), Fraction(5, 6)), (monomial(2, (1, 1)), 2))
    again = codec.toric_problem_from(_reparse(codec.emit_toric_problem(p), codec.ToricProblemModel))
    assert again == p
    assert codec.dumps(codec.emit_toric_problem(again)) == codec.dumps(codec.emit_toric_problem(p))


def test_polynomial_round_trip():
    f = Poly2.from_dict({(4, 0): Fraction(1), (2, 2): Fraction(-4), (0, 4): Fraction(4), (3, 2): Fraction(-2, 7)})
    assert codec.poly_from(_reparse(codec.emit_poly(f), codec.PolyModel)) == f


@pytest.mark.parametrize("spec", [
    ExperimentSpec(kind=ExperimentKind.ACC, sample_count=7, seed=3, max_degree=2, alarm_length=1),
    ExperimentSpec(kind=ExperimentKind.IDEAL_ADIC, n=3, exponents=(Fraction(1, 2), Fraction(1)),
                   truncation_levels=(2, 5), bound=40),
    ExperimentSpec(kind=ExperimentKind.BOUNDEDNESS, jet_level_limit=6,
                   family=(problem(2, (monomial(2, (1, 0), (0, 1)), 1)),
                           problem(2, (monomial(2, (2, 0), (0, 2)), Fraction(1, 2))))),
])
def test_experiment_spec_round_trip(spec):
    again = codec.experiment_spec_from(_reparse(codec.emit_experiment_spec(spec), codec.ExperimentSpecModel))
    assert again == spec
