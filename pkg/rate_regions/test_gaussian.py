import json
import math

import pytest
import torch
from hypothesis import given, settings
from hypothesis.strategies import data, floats

from .errors import ParseError, PowerConstraintError, RateRegionError
from .gaussian import (
    CLOSED_FORM_IDS,
    GaussianScenario,
    PowerSplit,
    SplitBatch,
    build_cov,
    closed_form,
    dump_scenario,
    eval_term,
    load_scenario,
    random_splits,
    symmetric_network,
)
from .info import parse_term
from .templates import TERMS

gain = floats(min_value=0.2, max_value=2.0)
var = floats(min_value=0.05, max_value=3.0)
weight = floats(min_value=-1.0, max_value=1.0)


def _scenario(data):
    g = [data.draw(gain) for _ in range(6)]
    phase = data.draw(floats(min_value=0.0, max_value=6.0))
    return GaussianScenario(g[0], g[1], g[2], g[3], g[4] * complex(math.cos(phase), math.sin(phase)), g[5], 20.0, 20.0)


def _split(data):
    return PowerSplit(
        complex(data.draw(weight), data.draw(weight)),
        complex(data.draw(weight), 0.0),
        *[data.draw(var) for _ in range(6)]
    )


@given(data())
@settings(max_examples=30, deadline=None)
def test_closed_forms(data):
    scn, split = _scenario(data), _split(data)
    model = build_cov(scn, split, check=False)
    for k in CLOSED_FORM_IDS:
        a = float(eval_term(TERMS[k], model)[0])
        b = closed_form(k, scn, split)
        assert abs(a - b) <= 1e-7 * (1 + abs(b)), k


@given(data())
@settings(max_examples=30, deadline=None)
def test_destination_chain(data):
    scn = _scenario(data)
    splits = [_split(data) for _ in range(3)]
    model = build_cov(scn, SplitBatch.from_splits(splits), check=False)
    for u in ("13", "14"):
        v = {k: eval_term(TERMS[u + k], model) for k in "bcdef"}
        for lo, hi in (("b", "c"), ("b", "d"), ("c", "e"), ("d", "e"), ("e", "f")):
            assert (v[lo] <= v[hi] + 1e-9).all()
    ext = eval_term(TERMS["b1ext1"], model)
    assert (eval_term(TERMS["14a"], model) <= ext + 1e-9).all()
    assert (ext <= eval_term(TERMS["b1ext2"], model) + 1e-9).all()


def test_symmetric_network():
    scn = symmetric_network(6, 2, 1)
    assert scn.h31 == scn.h42 == 0.5
    assert scn.h21 == scn.h12 == 1.0
    assert abs(abs(scn.h32) - 1 / math.sqrt(5)) < 1e-15
    assert scn.P1 == scn.P2 == 6.0
    with pytest.raises(RateRegionError):
        symmetric_network(6, 0, 1)


def test_examples():
    scn = GaussianScenario(1, 1, 1, 1, 0, 0, 3, 3)
    model = build_cov(scn, PowerSplit(var_11n=3.0))
    assert abs(float(eval_term(TERMS["13b"], model)[0]) - 2.0) < 1e-12
    model = build_cov(scn, PowerSplit(var_10c=1.0))
    assert abs(float(eval_term(TERMS["13a"], model)[0]) - 1.0) < 1e-12


def test_zero_power():
    scn = GaussianScenario(1, 1, 1, 1, 0.5, 0.5, 0, 0)
    model = build_cov(scn, PowerSplit())
    for k in CLOSED_FORM_IDS:
        assert abs(float(eval_term(TERMS[k], model)[0])) < 1e-12


def test_power_constraint():
    scn = GaussianScenario(1, 1, 1, 1, 0.5, 0.5, 1, 1)
    with pytest.raises(PowerConstraintError):
        build_cov(scn, PowerSplit(var_11n=2.0))
    with pytest.raises(PowerConstraintError):
        PowerSplit(alpha2=1.0, var_20n=0.5).check(scn)
    with pytest.raises(PowerConstraintError):
        PowerSplit(var_10c=-1.0).check(scn)
    with pytest.raises(PowerConstraintError):
        GaussianScenario(1, 1, 1, 1, 0.5, 0.5, -1, 1)
    assert PowerSplit(alpha1=0.6j, var_10n=0.64).check(scn)


def test_random_splits_full_power():
    scn = symmetric_network(6, 2, 1)
    gen = torch.Generator().manual_seed(0)
    batch = random_splits(scn, 50, gen)
    assert len(batch) == 50
    assert torch.allclose(batch.power(1), torch.full((50,), 6.0, dtype=torch.float64))
    hk = random_splits(scn, 10, gen, box="hk")
    assert (hk.alpha1 == 0).all() and (hk.var_20c == 0).all()


def test_transformed_model():
    scn = symmetric_network(6, 2, 1)
    split = PowerSplit(0.5, 0.5, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0)
    model = build_cov(scn, split)
    folded = model.transformed({"V2": ("V2", "U2"), "U2": ()})
    a = float(eval_term(TERMS["14a"], folded)[0])
    b = float(eval_term(TERMS["b1ext1"], model)[0])
    assert abs(a - b) < 1e-9
    with pytest.raises(RateRegionError):
        eval_term(parse_term("I(Y3 ; S1 | Q)"), model)


def test_scenario_io(tmp_path):
    scn = GaussianScenario(1.5, 1, 0.5, 0.25, 0.3 - 0.4j, 0.2, 10, 5)
    path = tmp_path / "scenario.json"
    dump_scenario(scn, str(path))
    assert load_scenario(str(path)) == scn
    assert json.loads(path.read_text())["h32"] == {"re": 0.3, "im": -0.4}
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    with pytest.raises(ParseError):
        load_scenario(str(bad))
    bad.write_text('{"h31": 1}')
    with pytest.raises(ParseError):
        load_scenario(str(bad))


def test_deaf_source_blocks_full_decoding():
    scn = GaussianScenario(1, 1, 1, 0, 0.5, 0.5, 4, 4)
    split = PowerSplit(0.5, 0.5, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0)
    model = build_cov(scn, split)
    assert abs(float(eval_term(TERMS["b1ext2"], model)[0])) < 1e-12
    assert float(eval_term(TERMS["b1ext2"], build_cov(symmetric_network(6, 2, 1), split))[0]) > 0
