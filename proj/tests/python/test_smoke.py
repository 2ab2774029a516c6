"""Smoke tests for the Python bindings: frozen values, composition, witness
verification, and serialization round-trips."""

import math

import pytest

import advlab


def test_version():
    assert advlab.__version__ == "0.1.0"


def test_or2_value_and_witness():
    f = advlab.fixture_function("or2")
    cert = advlab.solve(f)
    assert cert["pass"]
    assert cert["value"] == pytest.approx(math.sqrt(2.0), abs=1e-4)
    check = advlab.verify_function_witness(f, cert["witness"])
    assert check["pass"]
    assert check["value"] == pytest.approx(math.sqrt(2.0), abs=1e-4)


def test_parity_composition_is_four():
    parity2 = advlab.fixture_function("parity2")
    rep = advlab.composition_check(parity2, parity2)
    assert rep["pass"]
    assert rep["values"]["direct"] == pytest.approx(4.0, rel=1e-3)
    assert rep["lower_value"] == pytest.approx(4.0, rel=1e-3)
    assert rep["upper_value"] == pytest.approx(4.0, rel=1e-3)


def test_all_pairs_relation_is_zero():
    cert = advlab.solve_relational(advlab.fixture_relation("allpairs2"))
    assert cert["pass"]
    assert abs(cert["value"]) <= 1e-5


def test_find_one_relational_composition_routes():
    rep = advlab.relational_composition_check(
        advlab.fixture_relation("findone2"),
        advlab.fixture_function("and2"),
        direct="skip",
    )
    assert rep["pass"]
    assert "direct_value" not in rep
    assert rep["lower_value"] == pytest.approx(math.sqrt(2.0), rel=1e-3)


def test_function_dict_round_trip():
    f = advlab.Function(2, [0, 1, 1, 0])
    d = advlab.to_dict(f)
    assert d == {"arity": 2, "table": [0, 1, 1, 0]}
    assert advlab.function_from_dict(d) == f


def test_relation_dict_round_trip():
    r = advlab.fixture_relation("findone2")
    d = advlab.to_dict(r)
    assert d["arity"] == 2 and d["k"] == 2
    assert advlab.relation_from_dict(d) == r


def test_bad_input_raises():
    with pytest.raises(ValueError):
        advlab.Function(2, [0, 1, 2, 0])
    with pytest.raises(ValueError):
        advlab.fixture_function("no-such-fixture")


def test_gamma2_disagreement_matches_bound():
    rows = [
        [0.0, 1.0, 1.0, 1.0],
        [1.0, 0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0, 0.0],
    ]
    cert = advlab.gamma2(rows)
    assert cert["pass"]
    assert cert["value"] == pytest.approx(math.sqrt(2.0), abs=1e-4)
