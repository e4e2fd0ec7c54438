import copy
import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from nupbrlab.harness import ModelGenParams, gen_model
from nupbrlab.model import ModelFormatError, emit_model, load_model, parse_model, save_model

from conftest import E1


@given(st.integers(0, 10**9), st.booleans())
def test_round_trip_is_identity(seed, honest):
    m = gen_model(ModelGenParams(n_outcomes=9, horizon=3, seed=seed, honest_only=honest))
    text = emit_model(m)
    m2 = parse_model(json.loads(text))
    assert m2 == m
    assert emit_model(m2) == text
    assert m2.digest() == m.digest()


def test_save_and_load(tmp_path, e1):
    path = tmp_path / "m.json"
    save_model(e1, path)
    assert load_model(path) == e1


def test_integers_and_unreduced_fractions_are_accepted():
    data = copy.deepcopy(E1)
    data["probabilities"] = ["2/4", "1/2"]
    data["assets"] = [[[0, 0], ["2/2", -1]]]
    assert parse_model(data) == parse_model(E1)


def _bad(mutate):
    data = copy.deepcopy(E1)
    mutate(data)
    with pytest.raises(ModelFormatError) as info:
        parse_model(data)
    return info.value.location


def test_error_locations():
    assert _bad(lambda d: d.pop("tau")) == "tau"
    assert _bad(lambda d: d.update(schema=2)) == "schema"
    assert _bad(lambda d: d["probabilities"].__setitem__(1, "0.5")) == "probabilities[1]"
    assert _bad(lambda d: d["probabilities"].__setitem__(1, 0.5)) == "probabilities[1]"
    assert _bad(lambda d: d.update(probabilities=["1/2", "1/3"])) == "probabilities"
    assert _bad(lambda d: d["filtration"][1].__setitem__(0, [0, 5])) == "filtration[1][0][1]"
    assert _bad(lambda d: d["filtration"][1].__setitem__(1, [0])) == "filtration[1]"
    assert _bad(lambda d: d["assets"][0][1].__setitem__(0, "x")) == "assets[0][1][0]"
    assert _bad(lambda d: d["assets"][0].append(["0", "0"])) == "assets[0]"
    assert _bad(lambda d: d["assets"][0][0].__setitem__(0, "1")) == "assets[0][0]"
    assert _bad(lambda d: d["tau"].__setitem__(0, 2)) == "tau[0]"
    assert _bad(lambda d: d["tau"].__setitem__(0, True)) == "tau[0]"
    assert _bad(lambda d: d.update(tau=[1])) == "tau"
    assert _bad(lambda d: d.update(filtration=[[[0]], [[0]]])) == "filtration"


def test_broken_json_reports_line(tmp_path):
    path = tmp_path / "m.json"
    path.write_text('{\n "schema": 1,\n oops\n}\n')
    with pytest.raises(ModelFormatError) as info:
        load_model(path)
    assert info.value.location == "line 3"


def test_digest_is_stable(e1):
    assert e1.digest() == parse_model(copy.deepcopy(E1)).digest()
    other = copy.deepcopy(E1)
    other["tau"] = [0, 1]
    assert parse_model(other).digest() != e1.digest()


def test_infinite_tau_is_written_as_string():
    data = copy.deepcopy(E1)
    data["tau"] = ["inf", 0]
    m = parse_model(data)
    assert m.to_dict()["tau"] == ["inf", 0]
