import json

import numpy as np
import pytest
from conftest import one_instance
from hypothesis import given, settings
from hypothesis import strategies as st

from dscpsc.errors import ParseError, ValidationError
from dscpsc.instance import (
    PARAM_SPECS, Violation, demand_split_warnings, instance_to_dict, load_instance, save_instance, validate,
)
from dscpsc.synthetic import make_instance

MIN_SETS = {"K": ["k1"], "L": ["l1"], "M": ["m1"], "P": ["p1"], "E": ["e1"], "T": ["t1"], "V": ["road", "pipe"]}


def minimal():
    return make_instance(MIN_SETS, {"k1": "e1"}, {"l1": ["e1"]}, seed=0, name="minimal")


def test_minimal_instance_loads(tmp_path):
    path = tmp_path / "min.json"
    save_instance(minimal(), path)
    inst = load_instance(path)
    for name in ("K", "L", "M", "P", "E", "T"):
        assert len(inst.sets.get(name)) == 1
    assert validate(inst) == []


def _doc_with(tmp_path, edit):
    doc = instance_to_dict(minimal())
    edit(doc)
    path = tmp_path / "inst.json"
    path.write_text(json.dumps(doc))
    return path


def test_missing_demand_entry(tmp_path):
    sets = dict(MIN_SETS, P=["p1", "p2"])
    doc = instance_to_dict(make_instance(sets, {"k1": "e1"}, {"l1": ["e1"]}))
    doc["params"]["d"][1][0][0] = None
    path = tmp_path / "inst.json"
    path.write_text(json.dumps(doc))
    with pytest.raises(ValidationError, match="demand table not total") as err:
        load_instance(path)
    assert err.value.violations == [Violation("d", ("p2", "m1", "t1"), "not-total")]


def test_zero_conversion_factor(tmp_path):
    def edit(doc):
        doc["params"]["mu"] = [0]
    with pytest.raises(ValidationError) as err:
        load_instance(_doc_with(tmp_path, edit))
    assert err.value.violations == [Violation("mu", ("p1",), "positive")]


def test_binary_matrix_rule():
    inst = minimal().with_params(Rkl=np.array([[2.0]]))
    assert validate(inst) == [Violation("Rkl", ("k1", "l1"), "binary-matrix")]


def test_fraction_range_rule():
    inst = minimal().with_params(lk=np.array([1.5]))
    assert validate(inst) == [Violation("lk", ("k1",), "fraction-range")]


def test_ownership_rules():
    inst = minimal()
    bad = make_instance(MIN_SETS, {"k1": "e9"}, {"l1": []})
    rules = sorted(v.rule for v in validate(bad))
    assert rules == ["ownership-empty", "ownership-unknown"]
    assert validate(inst) == []


def test_set_overlap_and_empty():
    bad = make_instance(dict(MIN_SETS, Kp=["k1"], P=[]), {"k1": "e1"}, {"l1": ["e1"]})
    rules = {v.rule for v in validate(bad)}
    assert {"overlap", "empty-set"} <= rules


def test_round_trip(tmp_path):
    for inst in (minimal(), one_instance()):
        path = tmp_path / "rt.json"
        save_instance(inst, path)
        back = load_instance(path)
        assert back == inst
        assert back.sets.as_dict() == inst.sets.as_dict()
        for name in inst.params.names():
            assert np.array_equal(back.params[name], inst.params[name])
        assert dict(back.dc_owners) == dict(inst.dc_owners)


def test_parse_error_locus(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{"schema": "dscpsc/1",\n "sets": {')
    with pytest.raises(ParseError) as err:
        load_instance(path)
    assert "line 2" in err.value.locus

    def edit(doc):
        doc["params"]["ick"] = ["x"]
    with pytest.raises(ParseError) as err:
        load_instance(_doc_with(tmp_path, edit))
    assert err.value.locus == "params.ick[0]"


def test_demand_split_warning():
    inst = minimal().with_params(d=np.array([[[1.0]]]), D=np.array([[[3.0]]]))
    assert validate(inst) == []
    assert len(demand_split_warnings(inst)) == 1


BAD_VALUE = {"positive": 0.0, "fraction-range": 1.5, "binary-matrix": 0.5, "non-negative": -1.0}
BASE = one_instance()
NONEMPTY = sorted(n for n in PARAM_SPECS if BASE.params[n].size)


@settings(max_examples=150, deadline=None)
@given(st.sampled_from(NONEMPTY), st.integers(0, 10**6), st.booleans())
def test_single_mutation_fires_one_family(name, pos, use_nan):
    arr = BASE.params[name].copy()
    flat = arr.reshape(-1)
    flat[pos % flat.size] = np.nan if use_nan else BAD_VALUE[PARAM_SPECS[name].rule]
    bad = validate(BASE.with_params(**{name: arr}))
    rule = "not-total" if use_nan else PARAM_SPECS[name].rule
    assert len(bad) == 1
    assert (bad[0].table, bad[0].rule) == (name, rule)


def test_instances_pickle():
    import pickle

    inst = one_instance()
    assert pickle.loads(pickle.dumps(inst)) == inst
