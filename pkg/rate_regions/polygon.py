import json
import logging
from dataclasses import dataclass

import torch

from .errors import UnboundedRegion

logger = logging.getLogger(__name__)

# Rate axes R1 >= 0, R2 >= 0.
AXES = ((-1.0, 0.0), (0.0, -1.0))
DEDUP = 1e-12


@dataclass(frozen=True)
class RatePolygon:
    r"""
    Convex polygon in the :math:`(R_1, R_2)` plane, vertices counter-clockwise
    starting at the lowest-leftmost one. Membership is domination by the
    hull, so the polygon stands for its down-set in the positive quadrant.

    Parameters:
        vertices (tuple): (R1, R2) pairs in bits per channel use
        provenance (tuple): optional tag per vertex (e.g. the split behind it)
    """

    vertices: tuple = ()
    provenance: tuple = None

    @property
    def is_empty(self):
        return not self.vertices

    def __len__(self):
        return len(self.vertices)

    def metrics(self):
        return metrics(self)

    def frontier(self):
        return frontier(self)

    def to_csv(self):
        "Frontier vertices, counter-clockwise, with an `R1,R2` header."
        lines = ["R1,R2"] + ["%.12g,%.12g" % v for v in self.frontier()]
        return "\n".join(lines) + "\n"

    def to_json(self, **extra):
        out = {
            "vertices": [list(v) for v in self.vertices],
            "frontier": [list(v) for v in self.frontier()],
            "metrics": self.metrics() if self.vertices else None,
        }
        if self.provenance is not None:
            out["provenance"] = [p if isinstance(p, (dict, list)) else str(p) for p in self.provenance]
        out.update(extra)
        return json.dumps(out, indent=2, sort_keys=True)


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points, tags=None):
    """
    Monotone-chain hull of 2-D points, counter-clockwise from the
    lowest-leftmost point, collinear points removed. Coincident points keep
    the smallest tag.

    Parameters:
        points (list): (x, y) pairs
        tags (list): optional comparable tags, one per point

    Returns:
        polygon (RatePolygon)
    """
    if tags is None:
        pts = sorted((float(x), float(y), 0) for x, y in points)
    else:
        pts = sorted((float(p[0]), float(p[1]), t) for p, t in zip(points, tags))
    uniq = []
    for p in pts:
        if uniq and abs(p[0] - uniq[-1][0]) <= DEDUP and abs(p[1] - uniq[-1][1]) <= DEDUP:
            continue
        uniq.append(p)
    if len(uniq) <= 2:
        hull = uniq
    else:
        lower, upper = [], []
        for p in uniq:
            while len(lower) >= 2 and _cross(lower[-2], lower[-1], p) <= DEDUP:
                lower.pop()
            lower.append(p)
        for p in reversed(uniq):
            while len(upper) >= 2 and _cross(upper[-2], upper[-1], p) <= DEDUP:
                upper.pop()
            upper.append(p)
        hull = lower[:-1] + upper[:-1]
    # Rotate to the lowest-leftmost vertex.
    if hull:
        start = min(range(len(hull)), key=lambda i: (hull[i][1], hull[i][0]))
        hull = hull[start:] + hull[:start]
    vertices = tuple((x, y) for x, y, _ in hull)
    provenance = None if tags is None else tuple(t for _, _, t in hull)
    return RatePolygon(vertices, provenance)


def check_bounded(a, tol=1e-12):
    """
    Raise :class:`UnboundedRegion` if `{r >= 0 : a r <= b}` is unbounded,
    which depends on the left-hand sides only.

    Parameters:
        a (list): rows (c1, c2)
    """
    rows = [(float(x), float(y)) for x, y in a]
    rays = [(1.0, 0.0), (0.0, 1.0)]
    for x, y in rows:
        for d in ((-y, x), (y, -x)):
            if d[0] >= 0 and d[1] >= 0 and (d[0] > 0 or d[1] > 0):
                rays.append(d)
    for d in rays:
        n = (d[0] ** 2 + d[1] ** 2) ** 0.5
        if all(x * d[0] + y * d[1] <= tol * n for x, y in rows):
            raise UnboundedRegion(
                "no rate bound in direction (%.3g, %.3g); a sum-rate bound is missing" % d
            )


def halfplane_points(a, b, tol=1e-9):
    """
    Batched vertex candidates of `{r >= 0 : a r <= b}`.

    Every pair of rows (axes included) is intersected with Cramer's rule and
    the intersection kept if it satisfies all rows within
    `tol * (1 + |b|)`.

    Parameters:
        a (tensor): m x 2 shared left-hand sides, or batch x m x 2
        b (tensor): batch x m right-hand sides

    Returns:
        points (tensor): batch x P x 2
        feasible (bool tensor): batch x P
    """
    b = torch.as_tensor(b, dtype=torch.float64)
    if b.dim() == 1:
        b = b[None]
    batch = b.shape[0]
    a = torch.as_tensor(a, dtype=torch.float64)
    if a.dim() == 2:
        a = a[None].expand(batch, -1, -1)
    axes = torch.tensor(AXES, dtype=torch.float64)[None].expand(batch, -1, -1)
    a = torch.cat([a, axes], dim=1)
    b = torch.cat([b, torch.zeros(batch, 2, dtype=torch.float64)], dim=1)
    m = a.shape[1]
    i, j = torch.triu_indices(m, m, offset=1)
    ai, aj, bi, bj = a[:, i], a[:, j], b[:, i], b[:, j]
    det = ai[..., 0] * aj[..., 1] - ai[..., 1] * aj[..., 0]
    ok = det.abs() > 1e-14
    safe = torch.where(ok, det, torch.ones_like(det))
    x = (bi * aj[..., 1] - bj * ai[..., 1]) / safe
    y = (ai[..., 0] * bj - aj[..., 0] * bi) / safe
    points = torch.stack([x, y], dim=-1)
    slack = torch.einsum("bmk,bpk->bpm", a, points) - b[:, None, :]
    feasible = (slack <= tol * (1 + b.abs())[:, None, :]).all(-1) & ok
    return points, feasible


def halfplane_polygon(a, b, tol=1e-9):
    """
    Polygon `{r >= 0 : a r <= b}` for a single right-hand side.

    Returns:
        polygon (RatePolygon): empty when infeasible

    Raises:
        UnboundedRegion
    """
    check_bounded(list(a) + list(AXES))
    points, feasible = halfplane_points(torch.tensor(a, dtype=torch.float64), [list(b)], tol)
    pts = points[0][feasible[0]].tolist()
    if not pts:
        logger.debug("half-plane system infeasible")
        return RatePolygon()
    return convex_hull([(max(x, 0.0), max(y, 0.0)) for x, y in pts])


def _max_min(vertices, px, py):
    "max over the hull of min(x - px, y - py)."
    best = max(min(x - px, y - py) for x, y in vertices)
    n = len(vertices)
    for k in range(n):
        (x0, y0), (x1, y1) = vertices[k], vertices[(k + 1) % n]
        f0, f1 = (x0 - px) - (y0 - py), (x1 - px) - (y1 - py)
        if f0 == f1 or f0 * f1 > 0:
            continue
        s = f0 / (f0 - f1)
        best = max(best, x0 + s * (x1 - x0) - px)
    return best


def metrics(p):
    """
    Region summary.

    Returns:
        dict with max_r1, max_r2, max_sum and symmetric_rate
    """
    assert not p.is_empty, "metrics of an empty polygon"
    v = p.vertices
    return {
        "max_r1": max(x for x, _ in v),
        "max_r2": max(y for _, y in v),
        "max_sum": max(x + y for x, y in v),
        "symmetric_rate": max(0.0, _max_min(v, 0.0, 0.0)),
    }


def contains(outer, inner, tol=0.0):
    "Every vertex of `inner` is dominated by the hull of `outer` within `tol`."
    if inner.is_empty:
        return True
    if outer.is_empty:
        return False
    return all(_max_min(outer.vertices, x, y) >= -tol for x, y in inner.vertices)


def polygons_equal(a, b, tol=1e-9):
    return contains(a, b, tol) and contains(b, a, tol)


def frontier(p):
    "Pareto-optimal vertices in counter-clockwise order (R1 descending)."
    v = p.vertices
    out = [
        u
        for u in v
        if not any(w != u and w[0] >= u[0] - DEDUP and w[1] >= u[1] - DEDUP for w in v)
    ]
    return sorted(out, key=lambda u: (-u[0], u[1]))
