"""
Jointly Gaussian evaluation of information terms.

Every random variable is a linear combination of independent unit-variance
circularly symmetric complex Gaussians (the basis below). Conditional
covariances come from projecting out the row space of the conditioning
block, and mutual informations from pseudo-determinants, in bits. With
complex signalling the rate is `log2 det` without the factor one half.
"""
import cmath
import json
import logging
import math
from dataclasses import asdict, dataclass

import torch

from .errors import NumericalDegeneracyError, ParseError, PowerConstraintError, RateRegionError

logger = logging.getLogger(__name__)

BASIS = ("Q", "X10c", "X10n", "X11n", "X20c", "X20n", "X22n", "N1", "N2", "N3", "N4")
_B = {b: i for i, b in enumerate(BASIS)}
VARIANCES = ("var_10c", "var_10n", "var_11n", "var_20c", "var_20n", "var_22n")
EIG_CUTOFF = 1e-12
PINV_ATOL = 1e-9
DTYPE = torch.complex128


def _real(name, v):
    v = complex(v)
    if v.imag != 0:
        raise RateRegionError("%s must be real, got %s" % (name, v))
    return v.real


@dataclass(frozen=True)
class GaussianScenario:
    r"""
    Two-user Gaussian interference channel with generalized feedback.

    :math:`Y_c = h_{c1} X_1 + h_{c2} X_2 + N_c`, unit noise variances.
    Destinations observe Y3 and Y4; source 1 overhears Y1 and source 2
    overhears Y2 (their own signal removed).

    Parameters:
        h31, h42 (float): direct gains
        h21, h12 (float): cooperation gains
        h32, h41 (complex): interfering gains
        P1, P2 (float): power budgets
    """

    h31: float
    h42: float
    h21: float
    h12: float
    h32: complex
    h41: complex
    P1: float
    P2: float

    def __post_init__(self):
        for name in ("h31", "h42", "h21", "h12"):
            object.__setattr__(self, name, _real(name, getattr(self, name)))
        for name in ("h32", "h41"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        for name in ("P1", "P2"):
            p = _real(name, getattr(self, name))
            if p < 0 or math.isnan(p):
                raise PowerConstraintError("%s must be nonnegative, got %s" % (name, p))
            object.__setattr__(self, name, p)

    def power(self, user):
        return self.P1 if user == 1 else self.P2


def symmetric_network(P, x, y, phase=0.0):
    r"""
    Gains inversely proportional to distance: sources `y` apart,
    destinations `x` from their own source.

    Parameters:
        P (float): power of both users
        x, y (float): distances
        phase (float): phase of the interfering gains :math:`h_{32}, h_{41}`
    """
    if x <= 0 or y <= 0:
        raise RateRegionError("distances must be positive, got x=%s y=%s" % (x, y))
    cross = cmath.exp(1j * phase) / math.sqrt(x * x + y * y)
    return GaussianScenario(1 / x, 1 / x, 1 / y, 1 / y, cross, cross, P, P)


def _enc(v):
    return {"re": v.real, "im": v.imag}


def _dec(v):
    if isinstance(v, dict):
        return complex(v.get("re", 0.0), v.get("im", 0.0))
    return v


def scenario_to_dict(scn):
    d = asdict(scn)
    d["h32"], d["h41"] = _enc(scn.h32), _enc(scn.h41)
    return d


def scenario_from_dict(d):
    keys = ("h31", "h42", "h21", "h12", "h32", "h41", "P1", "P2")
    missing = [k for k in keys if k not in d]
    if missing:
        raise RateRegionError("scenario is missing %s" % ", ".join(missing))
    return GaussianScenario(**{k: _dec(d[k]) for k in keys})


def load_scenario(path):
    "Read a scenario JSON file; malformed content raises :class:`ParseError`."
    with open(path) as f:
        try:
            return scenario_from_dict(json.load(f))
        except (TypeError, ValueError) as e:
            raise ParseError("bad scenario file %s: %s" % (path, e))


def dump_scenario(scn, path):
    with open(path, "w") as f:
        json.dump(scenario_to_dict(scn), f, indent=2, sort_keys=True)


@dataclass(frozen=True)
class PowerSplit:
    r"""
    Input parameterization: :math:`V_u = \alpha_u Q + X_{u0c}`,
    :math:`U_u = V_u + X_{u0n}`, :math:`T_u = X_u = U_u + X_{uun}`.

    Parameters:
        alpha1, alpha2 (complex): weights on the shared Q
        var_10c ... var_22n (float): component variances
    """

    alpha1: complex = 0j
    alpha2: complex = 0j
    var_10c: float = 0.0
    var_10n: float = 0.0
    var_11n: float = 0.0
    var_20c: float = 0.0
    var_20n: float = 0.0
    var_22n: float = 0.0

    def power(self, user):
        if user == 1:
            return abs(self.alpha1) ** 2 + self.var_10c + self.var_10n + self.var_11n
        return abs(self.alpha2) ** 2 + self.var_20c + self.var_20n + self.var_22n

    def check(self, scn, tol=1e-9):
        "Raise :class:`PowerConstraintError` unless the split fits `scn`."
        for name in VARIANCES:
            if getattr(self, name) < 0:
                raise PowerConstraintError("%s is negative" % name)
        for u in (1, 2):
            p, budget = self.power(u), scn.power(u)
            if p > budget * (1 + tol) + tol:
                raise PowerConstraintError(
                    "user %d uses power %.6g above its budget %.6g" % (u, p, budget)
                )
        return self

    def key(self):
        "Tie-break order among splits."
        a1, a2 = complex(self.alpha1), complex(self.alpha2)
        return (a1.real, a1.imag, a2.real, a2.imag) + tuple(getattr(self, v) for v in VARIANCES)

    def to_dict(self):
        d = asdict(self)
        d["alpha1"], d["alpha2"] = _enc(complex(self.alpha1)), _enc(complex(self.alpha2))
        return d

    @classmethod
    def from_dict(cls, d):
        return cls(**{k: _dec(v) for k, v in d.items()})


class SplitBatch:
    """
    A batch of power splits held as tensors, one entry per split.
    """

    def __init__(self, alpha1, alpha2, **variances):
        self.alpha1 = torch.as_tensor(alpha1, dtype=DTYPE)
        self.alpha2 = torch.as_tensor(alpha2, dtype=DTYPE)
        for v in VARIANCES:
            setattr(self, v, torch.as_tensor(variances[v], dtype=torch.float64).clamp(min=0))

    @classmethod
    def from_splits(cls, splits):
        splits = list(splits)
        return cls(
            [complex(s.alpha1) for s in splits],
            [complex(s.alpha2) for s in splits],
            **{v: [getattr(s, v) for s in splits] for v in VARIANCES}
        )

    @classmethod
    def cat(cls, batches):
        return cls(
            torch.cat([b.alpha1 for b in batches]),
            torch.cat([b.alpha2 for b in batches]),
            **{v: torch.cat([getattr(b, v) for b in batches]) for v in VARIANCES}
        )

    def __len__(self):
        return self.alpha1.shape[0]

    def __getitem__(self, idx):
        return SplitBatch(
            self.alpha1[idx], self.alpha2[idx], **{v: getattr(self, v)[idx] for v in VARIANCES}
        )

    def split(self, i):
        return PowerSplit(
            complex(self.alpha1[i].item()),
            complex(self.alpha2[i].item()),
            **{v: float(getattr(self, v)[i].item()) for v in VARIANCES}
        )

    def power(self, user):
        if user == 1:
            return self.alpha1.abs() ** 2 + self.var_10c + self.var_10n + self.var_11n
        return self.alpha2.abs() ** 2 + self.var_20c + self.var_20n + self.var_22n


def _as_batch(split):
    if isinstance(split, SplitBatch):
        return split, False
    return SplitBatch.from_splits([split]), True


class CovModel:
    """
    Linear model of every label over the independent Gaussian basis.

    Parameters:
        rows (dict): label -> complex tensor batch x r x len(BASIS); a label
            may span several rows or none
    """

    def __init__(self, rows):
        self.rows = dict(rows)
        self.batch = next(iter(self.rows.values())).shape[0]
        self._proj = {}

    def block(self, labels):
        try:
            parts = [self.rows[l] for l in labels]
        except KeyError as e:
            raise RateRegionError("label %s has no Gaussian model" % e)
        if not parts:
            return torch.zeros(self.batch, 0, len(BASIS), dtype=DTYPE)
        return torch.cat(parts, dim=1)

    def projector(self, cond):
        "Projector onto the complement of the span of the conditioning rows."
        cond = tuple(cond)
        if cond not in self._proj:
            eye = torch.eye(len(BASIS), dtype=DTYPE).expand(self.batch, -1, -1)
            r = self.block(cond)
            if r.shape[1] == 0:
                self._proj[cond] = eye
            else:
                self._proj[cond] = eye - torch.linalg.pinv(r, atol=PINV_ATOL) @ r
        return self._proj[cond]

    def cov(self, labels, given=()):
        "Conditional covariance, batch x n x n."
        a = self.block(labels)
        s = a @ self.projector(given) @ a.conj().transpose(-1, -2)
        return (s + s.conj().transpose(-1, -2)) / 2

    def transformed(self, mapping):
        """
        Regroup labels, e.g. `{"Q": ("Q", "V1"), "V1": ()}`. Unmapped labels
        keep their rows.
        """
        rows = dict(self.rows)
        for label, parts in mapping.items():
            rows[label] = self.block(parts)
        return CovModel(rows)


def build_cov(scn, split, check=True):
    """
    Covariance model of the input construction for one split or a batch.

    Raises:
        PowerConstraintError
    """
    batch, _ = _as_batch(split)
    if check:
        for u in (1, 2):
            over = batch.power(u) > scn.power(u) * (1 + 1e-9) + 1e-9
            if bool(over.any()):
                raise PowerConstraintError("user %d exceeds its power budget %.6g" % (u, scn.power(u)))
    n = len(batch)

    def e(name, coef):
        row = torch.zeros(n, len(BASIS), dtype=DTYPE)
        row[:, _B[name]] = torch.as_tensor(coef, dtype=DTYPE)
        return row

    def sd(name):
        return getattr(batch, name).sqrt()

    q = e("Q", torch.ones(n))
    v1 = e("Q", batch.alpha1) + e("X10c", sd("var_10c"))
    u1 = v1 + e("X10n", sd("var_10n"))
    x1 = u1 + e("X11n", sd("var_11n"))
    v2 = e("Q", batch.alpha2) + e("X20c", sd("var_20c"))
    u2 = v2 + e("X20n", sd("var_20n"))
    x2 = u2 + e("X22n", sd("var_22n"))
    one = torch.ones(n)
    rows = {
        "Q": q,
        "V1": v1,
        "U1": u1,
        "T1": x1,
        "X1": x1,
        "V2": v2,
        "U2": u2,
        "T2": x2,
        "X2": x2,
        "Y1": scn.h12 * x2 + e("N1", one),
        "Y2": scn.h21 * x1 + e("N2", one),
        "Y3": scn.h31 * x1 + scn.h32 * x2 + e("N3", one),
        "Y4": scn.h41 * x1 + scn.h42 * x2 + e("N4", one),
    }
    return CovModel({k: v[:, None, :] for k, v in rows.items()})


def _logpdet(s):
    ev = torch.linalg.eigvalsh(s)
    keep = ev > EIG_CUTOFF
    return torch.where(keep, ev.clamp(min=EIG_CUTOFF).log2(), torch.zeros_like(ev)).sum(-1), keep.sum(-1)


def _side(model, a, b, c):
    if not a:
        return None
    s_c = model.cov(a, c)
    s_bc = model.cov(a, tuple(b) + tuple(c))
    if s_c.shape[-1] == 0:
        return torch.zeros(model.batch, dtype=torch.float64), torch.ones(model.batch, dtype=torch.bool)
    l1, r1 = _logpdet(s_c)
    l2, r2 = _logpdet(s_bc)
    return l1 - l2, r1 == r2


def eval_term(t, model):
    """
    Mutual information in bits, one value per split in the model.

    The side whose conditional covariance keeps its rank when the other
    side is added to the conditioning is used.

    Raises:
        NumericalDegeneracyError when neither side has consistent rank
    """
    if t.is_zero:
        return torch.zeros(model.batch, dtype=torch.float64)
    val, ok = _side(model, t.left, t.right, t.cond)
    if not bool(ok.all()):
        alt, ok2 = _side(model, t.right, t.left, t.cond)
        if not bool((ok | ok2).all()):
            raise NumericalDegeneracyError(
                "no consistent pseudo-inverse for %s (labels %s)" % (t, ",".join(sorted(t.labels)))
            )
        val = torch.where(ok, val, alt)
    return val.clamp(min=0)


def evaluate(expr, model):
    "Evaluate an InfoExpr over a model, one value per split."
    return expr.evaluate(lambda a: eval_term(a, model))


# Closed forms of the superposition bounds, as functions of a SplitBatch.


def _abs2(h):
    return abs(h) ** 2


def _closed(scn, b):
    h31, h32, h21 = _abs2(scn.h31), _abs2(scn.h32), _abs2(scn.h21)
    h42, h41, h12 = _abs2(scn.h42), _abs2(scn.h41), _abs2(scn.h12)
    d1 = 1 + h32 * b.var_22n
    d2 = 1 + h41 * b.var_11n
    bf1 = (scn.h31 * b.alpha1 + scn.h32 * b.alpha2).abs() ** 2
    bf2 = (scn.h41 * b.alpha1 + scn.h42 * b.alpha2).abs() ** 2

    def lg(x):
        return torch.log2(1 + x)

    return {
        "13a": lambda: lg(h21 * b.var_10c / (1 + h21 * (b.var_10n + b.var_11n))),
        "13b": lambda: lg(h31 * b.var_11n / d1),
        "13c": lambda: lg((h31 * b.var_11n + h32 * b.var_20n) / d1),
        "13d": lambda: lg(h31 * (b.var_10n + b.var_11n) / d1),
        "13e": lambda: lg((h31 * (b.var_10n + b.var_11n) + h32 * b.var_20n) / d1),
        "13f": lambda: lg(
            (h31 * (b.var_10c + b.var_10n + b.var_11n) + h32 * (b.var_20c + b.var_20n) + bf1) / d1
        ),
        "14a": lambda: lg(h12 * b.var_20c / (1 + h12 * (b.var_20n + b.var_22n))),
        "14b": lambda: lg(h42 * b.var_22n / d2),
        "14c": lambda: lg((h42 * b.var_22n + h41 * b.var_10n) / d2),
        "14d": lambda: lg(h42 * (b.var_20n + b.var_22n) / d2),
        "14e": lambda: lg((h42 * (b.var_20n + b.var_22n) + h41 * b.var_10n) / d2),
        "14f": lambda: lg(
            (h42 * (b.var_20c + b.var_20n + b.var_22n) + h41 * (b.var_10c + b.var_10n) + bf2) / d2
        ),
    }


CLOSED_FORM_IDS = ("13a", "13b", "13c", "13d", "13e", "13f", "14a", "14b", "14c", "14d", "14e", "14f")


def closed_form(bound_id, scn, split):
    """
    Displayed closed-form rate of a superposition bound.

    Parameters:
        bound_id (str): one of CLOSED_FORM_IDS
        scn (GaussianScenario)
        split (PowerSplit or SplitBatch)

    Returns:
        rate (float or tensor)
    """
    batch, single = _as_batch(split)
    forms = _closed(scn, batch)
    if bound_id not in forms:
        raise RateRegionError("no closed form for %r" % bound_id)
    v = forms[bound_id]()
    return float(v[0]) if single else v


def random_splits(scn, n, generator=None, box="sup"):
    """
    Splits drawn uniformly on each user's full-power simplex.

    The Q weights are phased so that both users' beamforming components
    reach destination 1 in phase. `box="hk"` keeps only the private
    common/non-cooperative split (no Q, no cooperative common part).

    Parameters:
        scn (GaussianScenario)
        n (int): number of splits
        generator (torch.Generator): seeded source of randomness
        box (str): "sup" or "hk"

    Returns:
        batch (SplitBatch)
    """
    parts = 4 if box == "sup" else 2

    def simplex():
        u = torch.rand(n, parts, generator=generator, dtype=torch.float64)
        w = -torch.log(u.clamp(min=1e-300))
        return w / w.sum(-1, keepdim=True)

    w1, w2 = simplex(), simplex()
    p1, p2 = scn.P1, scn.P2
    ph1 = cmath.exp(-1j * cmath.phase(complex(scn.h31)))
    ph2 = cmath.exp(-1j * cmath.phase(complex(scn.h32)))
    zero = torch.zeros(n, dtype=torch.float64)
    if box == "sup":
        return SplitBatch(
            (w1[:, 0] * p1).sqrt().to(DTYPE) * ph1,
            (w2[:, 0] * p2).sqrt().to(DTYPE) * ph2,
            var_10c=w1[:, 1] * p1,
            var_10n=w1[:, 2] * p1,
            var_11n=w1[:, 3] * p1,
            var_20c=w2[:, 1] * p2,
            var_20n=w2[:, 2] * p2,
            var_22n=w2[:, 3] * p2,
        )
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


def random_scenarios(n, generator=None, gains=(0.1, 2.0), powers=(0.5, 20.0)):
    "Scenarios with gains and powers drawn uniformly in the given ranges."
    out = []
    for _ in range(n):
        u = torch.rand(9, generator=generator, dtype=torch.float64).tolist()
        g = [gains[0] + (gains[1] - gains[0]) * x for x in u[:6]]
        phase = 2 * math.pi * u[6]
        p = [powers[0] + (powers[1] - powers[0]) * x for x in u[7:9]]
        out.append(
            GaussianScenario(
                g[0], g[1], g[2], g[3], g[4] * cmath.exp(1j * phase), g[5] * cmath.exp(1j * phase), p[0], p[1]
            )
        )
    return out

