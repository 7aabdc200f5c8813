import math

import pytest
import torch
from hypothesis import given, settings
from hypothesis.strategies import data, floats

from .errors import RateRegionError
from .gaussian import PowerSplit, symmetric_network
from .geometry import SweepSpec, pareto, region_at, simplex_lattice, sweep_grid, sweep_union
from .polygon import contains, polygons_equal

frac = floats(min_value=0.0, max_value=1.0)

NO_GF_CORNER = math.log2(2.5)


def test_silent_split():
    p = region_at(symmetric_network(6, 2, 1), PowerSplit())
    assert p.vertices == ((0.0, 0.0),)


@given(data())
@settings(max_examples=30, deadline=None)
def test_no_cooperation_split_is_hk(data):
    scn = symmetric_network(6, 2, 1)
    f1, f2 = data.draw(frac), data.draw(frac)
    split = PowerSplit(var_10n=6 * f1, var_11n=6 * (1 - f1), var_20n=6 * f2, var_22n=6 * (1 - f2))
    sup = region_at(scn, split, "sup")
    hk = region_at(scn, split, "hk")
    assert polygons_equal(sup, hk, 1e-9)


def test_region_at_rejects():
    scn = symmetric_network(6, 2, 1)
    with pytest.raises(RateRegionError):
        region_at(scn, PowerSplit(), "SUP_DEC1")
    with pytest.raises(RateRegionError):
        region_at(scn, PowerSplit(var_11n=7.0))


def test_sweep_spec():
    with pytest.raises(RateRegionError):
        SweepSpec(resolution=1)
    with pytest.raises(RateRegionError):
        SweepSpec(phases=0)
    with pytest.raises(RateRegionError):
        SweepSpec(box="nope")


def test_lattice():
    lattice = simplex_lattice(4, 3)
    assert lattice.shape == (10, 4)
    assert torch.allclose(lattice.sum(-1), torch.ones(10, dtype=torch.float64))
    grid = sweep_grid(symmetric_network(6, 2, 1), SweepSpec(resolution=3, phases=2), "sup")
    assert len(grid) == 2 * 10 * 10


def test_pareto():
    pts = torch.tensor([[1.0, 0.0], [0.5, 0.5], [0.2, 0.2], [0.0, 1.0], [1.0, 0.0], [0.5, 0.4]], dtype=torch.float64)
    tags = torch.arange(6)
    kept, kt = pareto(pts, tags)
    assert {tuple(p) for p in kept.tolist()} == {(1.0, 0.0), (0.5, 0.5), (0.0, 1.0)}
    assert 4 not in kt.tolist()


def test_sweep_hk_corner():
    scn = symmetric_network(6, 2, 1)
    hk = sweep_union(scn, "hk", SweepSpec(resolution=3, refine=0))
    m = hk.metrics()
    assert abs(m["max_r1"] - NO_GF_CORNER) < 1e-9
    assert abs(m["max_r2"] - NO_GF_CORNER) < 1e-9
    assert len(hk.provenance) == len(hk.vertices)


def test_feedback_contains_no_feedback():
    scn = symmetric_network(6, 2, 1)
    spec = SweepSpec(resolution=3, refine=0)
    hk = sweep_union(scn, "hk", spec)
    sup = sweep_union(scn, "sup", spec)
    assert contains(sup, hk, 1e-9)
    assert sup.metrics()["max_sum"] >= hk.metrics()["max_sum"] - 1e-9


def test_chunking_does_not_matter():
    scn = symmetric_network(6, 2, 1)
    a = sweep_union(scn, "sup", SweepSpec(resolution=3, refine=0, chunk=7))
    b = sweep_union(scn, "sup", SweepSpec(resolution=3, refine=0))
    assert polygons_equal(a, b, 1e-9)


def test_refinement_only_grows():
    scn = symmetric_network(6, 2, 1)
    coarse = sweep_union(scn, "sup", SweepSpec(resolution=3, refine=0))
    refined = sweep_union(scn, "sup", SweepSpec(resolution=3, refine=40))
    assert contains(refined, coarse, 1e-9)


def test_default_sweep_figures():
    scn = symmetric_network(6, 2, 1)
    hk = sweep_union(scn, "hk").metrics()
    sup = sweep_union(scn, "sup").metrics()
    assert hk["max_r1"] == pytest.approx(NO_GF_CORNER, abs=1e-9)
    assert hk["max_sum"] >= 1.70
    assert sup["max_r1"] >= 1.90
    assert sup["max_sum"] >= 2.20
    assert hk["max_sum"] == pytest.approx(1.905, abs=0.05)
    assert sup["max_r1"] == pytest.approx(2.372, abs=0.05)
    assert sup["max_sum"] == pytest.approx(2.525, abs=0.05)
