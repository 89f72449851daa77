import json
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from legendrian_persistence.docio import (Document, dump_scalar, dumps, loads, parse_rational,
                                          parse_scalar)
from legendrian_persistence.errors import ParseError
from legendrian_persistence.grading import rpn_action_shift_script, rpn_link_dga
from legendrian_persistence.pwc import OscillationProfile, PLFunction
from legendrian_persistence.randgen import random_complex, random_dga, random_rfc_input, random_script
from legendrian_persistence.scalars import INF, NEG_INF, PiLinear

MINIMAL_DGA = '{"kind": "dga", "version": 1, "generators": [{"name": "a", "degree": 0, "action": "1/2"}]}'


def _err(text):
    with pytest.raises(ParseError) as info:
        loads(text)
    return info.value


def test_minimal_dga_parses():
    doc = loads(MINIMAL_DGA)
    assert doc.kind == "dga" and doc.payload.names == ["a"]
    assert doc.payload.gen("a").action == Fraction(1, 2)


def test_rational_forms():
    assert parse_rational("3", "$") == 3
    assert parse_rational("-3/2", "$") == Fraction(-3, 2)
    for bad in ("1/0", "2/4", "1.5", "x", "1/-2"):
        with pytest.raises(ParseError):
            parse_rational(bad, "$")
    with pytest.raises(ParseError):
        parse_rational(3, "$")


def test_scalar_forms():
    assert parse_scalar({"pi": "1/2", "const": "0/1"}, "$") == PiLinear(Fraction(1, 2))
    assert parse_scalar("inf", "$", infinite=True) == INF
    assert parse_scalar("-inf", "$", infinite=True) == NEG_INF
    with pytest.raises(ParseError):
        parse_scalar("inf", "$")
    with pytest.raises(ParseError):
        parse_scalar({"pi": "1/2"}, "$")
    assert dump_scalar(Fraction(3)) == "3/1"
    assert dump_scalar(PiLinear(Fraction(1, 4), 1)) == {"pi": "1/4", "const": "1/1"}
    assert dump_scalar(NEG_INF) == "-inf"


def test_error_paths():
    bad = MINIMAL_DGA.replace('"1/2"', '"1/0"')
    assert _err(bad).path == "$.generators[0].action"
    dup = ('{"kind": "dga", "version": 1, "generators": [{"name": "a", "degree": 0, "action": "1/1"},'
           ' {"name": "a", "degree": 1, "action": "2/1"}]}')
    e = _err(dup)
    assert e.path == "$.generators[1].name" and "duplicate" in e.reason
    assert _err('{"kind": "dga", "version": 1, "kind": "dga"}').reason == "duplicate key 'kind'"
    assert _err('{"kind": "thing", "version": 1}').path == "$.kind"
    assert _err('{"kind": "dga", "version": 2, "generators": []}').path == "$.version"
    assert _err(MINIMAL_DGA[:-1] + ', "extra": 1}').path == "$.extra"
    assert _err("{").path.startswith("line 1")
    e = _err('{"kind": "complex", "version": 1, "basis": [], "d": {"x": {}}}')
    assert e.path == "$.d.x"


def test_semantic_errors_carry_paths():
    text = json.dumps({"kind": "complex", "version": 1,
                       "basis": [{"name": "x", "degree": 1, "action": "1/1"},
                                 {"name": "y", "degree": 0, "action": "3/1"}],
                       "d": {"x": {"y": 1}}})
    e = _err(text)
    assert e.path == "$" and "filtration" in e.reason


def test_expected_kind_enforced():
    with pytest.raises(ParseError, match="expected a 'complex'"):
        loads(MINIMAL_DGA, expect="complex")


def _round_trip(kind, payload):
    text = dumps(kind, payload)
    again = dumps(loads(text, expect=kind))
    assert again == text
    return text


@given(st.integers(0, 10_000), st.sampled_from([2, 3, 5]))
def test_complex_round_trip(seed, p):
    text = _round_trip("complex", random_complex(seed, p=p, ties=True))
    assert text.endswith("\n") and json.loads(text)["kind"] == "complex"


@given(st.integers(0, 10_000), st.sampled_from([2, 3]))
def test_dga_round_trip(seed, p):
    _round_trip("dga", random_dga(seed, p=p))


@given(st.integers(0, 10_000), st.sampled_from([2, 3]))
def test_link_and_counts_round_trip(seed, p):
    link, _, counts, _ = random_rfc_input(seed, p)
    _round_trip("link_dga", link)
    _round_trip("counts", counts)


@given(st.integers(0, 10_000), st.sampled_from([2, 3]))
def test_script_round_trip(seed, p):
    _round_trip("pwc_script", random_script(seed, p=p))


def test_pi_linear_documents_round_trip():
    _round_trip("link_dga", rpn_link_dga(2, (-5, 5)))
    text = _round_trip("pwc_script", rpn_action_shift_script(1, (-3, 3)))
    assert '"pi": "1/4"' in text


def test_osc_and_bounds_round_trip():
    _round_trip("osc_profile", OscillationProfile(PLFunction(((0, 1), (1, Fraction(1, 2))))))
    bounds = {"main_theorem": {"betti": [1, 1], "k": 1, "osc": Fraction(1, 10),
                               "lengths": [Fraction(1, 2), Fraction(1)], "hbar": INF},
              "scf": {"critical_values": [Fraction(3, 5), Fraction(4, 5), Fraction(1)],
                      "eps": Fraction(1, 10)},
              "growth": {"pairs": [(Fraction(1), Fraction(5, 4))], "delta": Fraction(3, 20),
                         "exp_lower": Fraction(4, 3)},
              "trace": {"f_min": Fraction(-1, 10), "f_max": Fraction(1, 5), "eps": Fraction(1, 100)}}
    text = _round_trip("bounds_input", bounds)
    assert loads(text).payload == bounds


def test_document_object_dumps():
    doc = loads(MINIMAL_DGA)
    assert isinstance(doc, Document)
    assert dumps(doc) == dumps("dga", doc.payload)
    assert '"action": "1/2"' in dumps(doc)
