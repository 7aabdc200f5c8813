"""
Numeric rate regions of the Gaussian channel: one polygon per power split,
and the time-sharing hull of a sweep over splits.
"""
import cmath
import itertools
import logging
import math
from dataclasses import dataclass

import torch
from scipy.optimize import minimize

from .constraints import numeric_vertices_2d
from .errors import RateRegionError
from .gaussian import DTYPE, SplitBatch, build_cov, eval_term
from .polygon import AXES, DEDUP, RatePolygon, check_bounded, convex_hull, halfplane_points
from .templates import build, template_id

logger = logging.getLogger(__name__)

REGION_TEMPLATES = ("HK_REGION", "SUP_REGION", "EXT_REGION")


def region_system(template, drop_flagged=True):
    template = template_id(template)
    if template not in REGION_TEMPLATES:
        raise RateRegionError(
            "%s is not a two-rate region (use one of %s)" % (template, ", ".join(REGION_TEMPLATES))
        )
    system = build(template)
    return system.drop_flagged() if drop_flagged else system


def bind(system, model):
    """
    Left-hand sides and batched right-hand sides of a region over R1, R2.

    Returns:
        a (tensor): m x 2
        b (tensor): batch x m
    """
    cache = {}

    def value(atom):
        if atom not in cache:
            cache[atom] = eval_term(atom, model)
        return cache[atom]

    a, b = [], []
    for c in system:
        a.append((float(c.coef("R1")), float(c.coef("R2"))))
        v = c.rhs.evaluate(value)
        if not torch.is_tensor(v):
            v = torch.full((model.batch,), float(v), dtype=torch.float64)
        b.append(v)
    return torch.tensor(a, dtype=torch.float64), torch.stack(b, dim=-1)


def model_points(system, model, tol=1e-9):
    """
    Vertex candidates of every split's polygon.

    Returns:
        points (tensor): batch x P x 2, clamped to the positive quadrant
        feasible (bool tensor): batch x P
    """
    a, b = bind(system, model)
    points, feasible = halfplane_points(a, b, tol)
    return points.clamp(min=0), feasible


def model_polygons(system, model, tol=1e-9):
    "Polygon of every split of a model, in batch order."
    points, feasible = model_points(system, model, tol)
    return [convex_hull(points[k][feasible[k]].tolist()) for k in range(model.batch)]


def region_at(scn, split, template="SUP_REGION", drop_flagged=True):
    """
    Rate polygon of a region template at one power split.

    Parameters:
        scn (GaussianScenario)
        split (PowerSplit)
        template (str): HK_REGION, SUP_REGION or EXT_REGION
        drop_flagged (bool): leave out the union-redundant single-rate bounds

    Returns:
        polygon (RatePolygon)
    """
    system = region_system(template, drop_flagged)
    model = build_cov(scn, split)

    def bindings(atom):
        return float(eval_term(atom, model)[0])

    return numeric_vertices_2d(system, bindings)


@dataclass(frozen=True)
class SweepSpec:
    """
    Power-split grid and refinement budget of a sweep.

    Parameters:
        resolution (int): lattice points per axis of each user's power simplex
        phases (int): relative phases tried for the Q weight of user 2
        refine (int): Nelder-Mead evaluations spent around hull supports
        chunk (int): splits evaluated per batch
        box (str): "sup" (four-way split with Q) or "hk" (two-way split);
            None picks by template
    """

    resolution: int = 9
    phases: int = 1
    refine: int = 200
    chunk: int = 4096
    box: str = None

    def __post_init__(self):
        if self.resolution < 2:
            raise RateRegionError("sweep resolution must be at least 2, got %d" % self.resolution)
        if self.phases < 1 or self.refine < 0 or self.chunk < 1:
            raise RateRegionError("invalid sweep spec %r" % (self,))
        if self.box not in (None, "sup", "hk"):
            raise RateRegionError("unknown sweep box %r" % self.box)


def simplex_lattice(parts, resolution):
    "Points of the `parts`-simplex with coordinates in multiples of 1/(resolution-1)."
    n = resolution - 1
    out = []
    for cut in itertools.combinations(range(n + parts - 1), parts - 1):
        prev, w = -1, []
        for c in cut + (n + parts - 1,):
            w.append((c - prev - 1) / n)
            prev = c
        out.append(w)
    return torch.tensor(out, dtype=torch.float64)


def _q_phases(scn, phases):
    p1 = cmath.exp(-1j * cmath.phase(complex(scn.h31)))
    p2 = cmath.exp(-1j * cmath.phase(complex(scn.h32)))
    return [(p1, p2 * cmath.exp(2j * math.pi * k / phases)) for k in range(phases)]


def _splits(scn, w1, w2, box, phase):
    """
    Splits from per-user weight rows; `w` has 4 columns (Q, common-coop,
    common, private) or 2 columns (common, private).
    """
    zero = torch.zeros(w1.shape[0], dtype=torch.float64)
    p1, p2 = scn.P1, scn.P2
    if box == "hk":
        return SplitBatch(
            zero.to(DTYPE),
            zero.to(DTYPE),
            var_10c=zero,
            var_10n=w1[:, 0] * p1,
            var_11n=w1[:, 1] * p1,
            var_20c=zero,
            var_20n=w2[:, 0] * p2,
            var_22n=w2[:, 1] * p2,
        )
    return SplitBatch(
        (w1[:, 0] * p1).sqrt().to(DTYPE) * phase[0],
        (w2[:, 0] * p2).sqrt().to(DTYPE) * phase[1],
        var_10c=w1[:, 1] * p1,
        var_10n=w1[:, 2] * p1,
        var_11n=w1[:, 3] * p1,
        var_20c=w2[:, 1] * p2,
        var_20n=w2[:, 2] * p2,
        var_22n=w2[:, 3] * p2,
    )


def sweep_grid(scn, spec, box):
    "All lattice splits of a sweep, in a fixed order."
    lattice = simplex_lattice(4 if box == "sup" else 2, spec.resolution)
    n = lattice.shape[0]
    i, j = torch.meshgrid(torch.arange(n), torch.arange(n), indexing="ij")
    i, j = i.reshape(-1), j.reshape(-1)
    phases = _q_phases(scn, spec.phases) if box == "sup" else [(1, 1)]
    return SplitBatch.cat([_splits(scn, lattice[i], lattice[j], box, ph) for ph in phases])


def pareto(points, tags):
    """
    Points not weakly dominated by an earlier-sorted point. The hull of the
    kept points, the origin and the two axis projections spans the same
    down-set as the hull of all points.
    """
    if not points.shape[0]:
        return points, tags
    order = torch.argsort(-points[:, 1], stable=True)
    points, tags = points[order], tags[order]
    order = torch.argsort(-points[:, 0], stable=True)
    points, tags = points[order], tags[order]
    best = torch.cummax(points[:, 1], dim=0).values
    prev = torch.cat([torch.full((1,), -math.inf, dtype=torch.float64), best[:-1]])
    keep = points[:, 1] > prev + DEDUP
    return points[keep], tags[keep]


class _Hull:
    "Pareto points of everything added so far, tagged by global split index."

    def __init__(self):
        self.points = torch.zeros(0, 2, dtype=torch.float64)
        self.tags = torch.zeros(0, dtype=torch.long)
        self.batches, self.offsets = [], []
        self.seen = 0

    def add(self, points, feasible, batch):
        k = torch.arange(len(batch), dtype=torch.long)[:, None].expand_as(feasible)
        self.batches.append(batch)
        self.offsets.append(self.seen)
        self.points, self.tags = pareto(
            torch.cat([self.points, points[feasible]]),
            torch.cat([self.tags, k[feasible] + self.seen]),
        )
        self.seen += len(batch)

    def split(self, tag):
        for batch, offset in zip(reversed(self.batches), reversed(self.offsets)):
            if tag >= offset:
                return batch.split(tag - offset)
        raise IndexError(tag)

    def polygon(self):
        if not self.points.shape[0]:
            return RatePolygon(), ()
        pts, tags = self.points.tolist(), self.tags.tolist()
        ix = max(range(len(pts)), key=lambda i: (pts[i][0], -tags[i]))
        iy = max(range(len(pts)), key=lambda i: (pts[i][1], -tags[i]))
        pts += [(0.0, 0.0), (pts[ix][0], 0.0), (0.0, pts[iy][1])]
        tags += [-1, tags[ix], tags[iy]]
        hull = convex_hull(pts, tags)
        splits = {t: self.split(t) for t in set(hull.provenance) if t >= 0}
        return hull, tuple(splits.get(t) for t in hull.provenance)


def _objective(scn, system, box, phase, direction):
    dx, dy = direction
    half = 2 if box == "hk" else 4

    def f(x):
        x = torch.as_tensor(x, dtype=torch.float64) ** 2
        w1 = x[:half] / x[:half].sum().clamp(min=1e-300)
        w2 = x[half:] / x[half:].sum().clamp(min=1e-300)
        batch = _splits(scn, w1[None], w2[None], box, phase)
        points, feasible = model_points(system, build_cov(scn, batch, check=False))
        pts = points[0][feasible[0]]
        if not pts.shape[0]:
            return 0.0
        return -float((pts[:, 0] * dx + pts[:, 1] * dy).max())

    return f


def _split_weights(split, scn, box):
    def user(u):
        p = scn.power(u) or 1.0
        if box == "hk":
            names = ("var_%d0n" % u, "var_%d%dn" % (u, u))
            return [getattr(split, v) / p for v in names]
        alpha = split.alpha1 if u == 1 else split.alpha2
        names = ("var_%d0c" % u, "var_%d0n" % u, "var_%d%dn" % (u, u))
        return [abs(alpha) ** 2 / p] + [getattr(split, v) / p for v in names]

    return [math.sqrt(max(w, 0.0)) for w in user(1) + user(2)]


def _support_directions(vertices, k):
    "Outer normals bisecting the frontier edges at vertex `k`."
    n = len(vertices)
    (x0, y0), (x1, y1), (x2, y2) = vertices[k - 1], vertices[k], vertices[(k + 1) % n]
    e1 = (y1 - y0, x0 - x1)
    e2 = (y2 - y1, x1 - x2)
    d = (e1[0] / (math.hypot(*e1) or 1) + e2[0] / (math.hypot(*e2) or 1), e1[1] / (math.hypot(*e1) or 1) + e2[1] / (math.hypot(*e2) or 1))
    norm = math.hypot(*d) or 1
    return (max(d[0] / norm, 0.0), max(d[1] / norm, 0.0))


def sweep_union(scn, template="SUP_REGION", spec=None, drop_flagged=True):
    """
    Time-sharing hull of a region template over a lattice of power splits,
    refined with Nelder-Mead around the splits that support the hull.

    Splits are evaluated in chunks in lattice order; results do not depend
    on the chunk size.

    Parameters:
        scn (GaussianScenario)
        template (str): HK_REGION, SUP_REGION or EXT_REGION
        spec (SweepSpec)
        drop_flagged (bool): leave out the union-redundant bounds

    Returns:
        polygon (RatePolygon): with the split behind each vertex as provenance
    """
    spec = spec or SweepSpec()
    template = template_id(template)
    system = region_system(template, drop_flagged)
    check_bounded([(float(c.coef("R1")), float(c.coef("R2"))) for c in system] + list(AXES))
    box = spec.box or ("hk" if template == "HK_REGION" else "sup")
    grid = sweep_grid(scn, spec, box)
    if not len(grid):
        raise RateRegionError("empty sweep grid")
    logger.info("sweeping %s over %d splits", template, len(grid))
    hull = _Hull()
    for start in range(0, len(grid), spec.chunk):
        batch = grid[start : start + spec.chunk]
        points, feasible = model_points(system, build_cov(scn, batch, check=False))
        hull.add(points, feasible, batch)

    if spec.refine:
        _refine(scn, system, spec, box, hull)
    polygon, prov = hull.polygon()
    return type(polygon)(polygon.vertices, tuple(None if s is None else s.to_dict() for s in prov))


def _refine(scn, system, spec, box, hull):
    polygon, prov = hull.polygon()
    seeds = [k for k, s in enumerate(prov) if s is not None]
    frontier = set(polygon.frontier())
    seeds = [k for k in seeds if polygon.vertices[k] in frontier]
    if not seeds:
        return
    budget = max(spec.refine // len(seeds), 8)
    phase = _q_phases(scn, 1)[0]
    for k in seeds:
        split = prov[k]
        direction = _support_directions(polygon.vertices, k)
        if direction == (0.0, 0.0):
            continue
        if box == "sup":
            phase = (
                cmath.exp(1j * cmath.phase(complex(split.alpha1))) if split.alpha1 else phase[0],
                cmath.exp(1j * cmath.phase(complex(split.alpha2))) if split.alpha2 else phase[1],
            )
        f = _objective(scn, system, box, phase, direction)
        x0 = _split_weights(split, scn, box)
        res = minimize(f, x0, method="Nelder-Mead", options={"maxfev": budget, "xatol": 1e-6, "fatol": 1e-10})
        half = len(x0) // 2
        x = torch.as_tensor(res.x, dtype=torch.float64) ** 2
        w1 = x[:half] / x[:half].sum().clamp(min=1e-300)
        w2 = x[half:] / x[half:].sum().clamp(min=1e-300)
        batch = _splits(scn, w1[None], w2[None], box, phase)
        points, feasible = model_points(system, build_cov(scn, batch, check=False))
        hull.add(points, feasible, batch)
        logger.debug("refined support %d in %d evaluations: %.6g", k, res.nfev, -res.fun)

