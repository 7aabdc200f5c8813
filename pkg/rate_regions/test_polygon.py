import json

import pytest
import torch
from hypothesis import given, settings
from hypothesis.strategies import data, integers, lists, tuples

from .errors import UnboundedRegion
from .polygon import (
    RatePolygon,
    check_bounded,
    contains,
    convex_hull,
    halfplane_points,
    halfplane_polygon,
    metrics,
    polygons_equal,
)

SQUARE = RatePolygon(((0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)))
PENTAGON = RatePolygon(((0.0, 0.0), (1.0, 0.0), (1.0, 0.5), (0.5, 1.0), (0.0, 1.0)))

coord = integers(min_value=0, max_value=20).map(float)


def test_metrics():
    assert metrics(SQUARE) == {"max_r1": 1.0, "max_r2": 1.0, "max_sum": 2.0, "symmetric_rate": 1.0}
    m = PENTAGON.metrics()
    assert m["max_sum"] == 1.5
    assert abs(m["symmetric_rate"] - 0.75) < 1e-12


def test_frontier_and_csv():
    assert PENTAGON.frontier() == [(1.0, 0.5), (0.5, 1.0)]
    assert PENTAGON.to_csv() == "R1,R2\n1,0.5\n0.5,1\n"
    out = json.loads(PENTAGON.to_json(template="SUP_REGION"))
    assert out["template"] == "SUP_REGION"
    assert out["metrics"]["max_r1"] == 1.0


def test_contains():
    assert contains(SQUARE, PENTAGON)
    assert not contains(PENTAGON, SQUARE)
    assert contains(PENTAGON, RatePolygon(((0.75, 0.75),)))
    assert not contains(PENTAGON, RatePolygon(((0.76, 0.76),)))
    assert contains(PENTAGON, RatePolygon(((0.76, 0.76),)), tol=0.02)
    assert contains(SQUARE, RatePolygon())
    assert not contains(RatePolygon(), SQUARE)
    assert polygons_equal(SQUARE, convex_hull([(1, 1), (0, 0), (0, 1), (1, 0), (0.5, 0.5)]))


@given(data())
@settings(max_examples=50, deadline=None)
def test_hull_contains_points(data):
    pts = data.draw(lists(tuples(coord, coord), min_size=1, max_size=12))
    hull = convex_hull(pts)
    for p in pts:
        assert contains(hull, RatePolygon((p,)), tol=1e-9)
    v = hull.vertices
    assert 1 <= len(v) <= len(set(pts))
    if len(v) < 3:
        return
    for i in range(len(v)):
        (x0, y0), (x1, y1), (x2, y2) = v[i - 2], v[i - 1], v[i]
        assert (x1 - x0) * (y2 - y0) - (y1 - y0) * (x2 - x0) >= -1e-9


def test_check_bounded():
    axes = [(-1.0, 0.0), (0.0, -1.0)]
    with pytest.raises(UnboundedRegion):
        check_bounded([(1.0, 0.0)] + axes)
    check_bounded([(1.0, 0.0), (0.0, 1.0)] + axes)
    check_bounded([(1.0, 1.0)] + axes)
    with pytest.raises(UnboundedRegion):
        halfplane_polygon([(1.0, -1.0)], [1.0])


def test_halfplane():
    p = halfplane_polygon([(1.0, 0.0), (0.0, 1.0), (1.0, 1.0)], [1.0, 1.0, 1.5])
    assert polygons_equal(p, PENTAGON, 1e-12)
    assert halfplane_polygon([(1.0, 0.0), (0.0, 1.0)], [-1.0, 1.0]).is_empty


def test_halfplane_batched():
    a = torch.tensor([[1.0, 0.0], [0.0, 1.0]], dtype=torch.float64)
    b = torch.tensor([[1.0, 2.0], [3.0, 0.0]], dtype=torch.float64)
    points, feasible = halfplane_points(a, b)
    assert points.shape[0] == 2
    first = {tuple(p) for p in points[0][feasible[0]].tolist()}
    assert (1.0, 2.0) in first
    second = {tuple(p) for p in points[1][feasible[1]].tolist()}
    assert max(x for x, _ in second) == 3.0
    assert max(y for _, y in second) == 0.0
