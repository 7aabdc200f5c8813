"""
Exact rational linear-inequality systems over rate symbols.

Left-hand sides are maps from rate symbols to :class:`fractions.Fraction`
coefficients; right-hand sides are :class:`rate_regions.info.InfoExpr`
values whose atoms are treated as opaque nonnegative symbols.
"""
import re
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

from scipy.optimize import linprog

from .errors import FourierMotzkinOverflow, ParseError
from .info import InfoExpr, parse_expr, format_expr

logger = logging.getLogger(__name__)

LE, EQ, GE = "<=", "=", ">="

RATE_SYMBOLS = (
    "R1",
    "R2",
    "R0",
    "R_10c",
    "R_10n",
    "R_11n",
    "R_11c",
    "R_20c",
    "R_20n",
    "R_22n",
    "R_22c",
    "R'_10c",
    "R'_10n",
    "R'_11n",
    "R'_11c",
    "R'_20c",
    "R'_20n",
    "R'_22n",
    "R'_22c",
    "R''_11c",
    "R''_22c",
    "R_Q",
    "R_V1",
    "R_U1",
    "R_T1",
    "R_S1",
    "R_Z1",
    "R_V2",
    "R_U2",
    "R_T2",
    "R_S2",
    "R_Z2",
)
_SYM_ORDER = {s: i for i, s in enumerate(RATE_SYMBOLS)}


def symbol_key(s):
    return (_SYM_ORDER.get(s, len(RATE_SYMBOLS)), s)


def _as_expr(rhs):
    if isinstance(rhs, InfoExpr):
        return rhs
    return InfoExpr.const(Fraction(rhs))


def _lcm(a, b):
    return a * b // gcd(a, b)


def _scale(coefs):
    "Positive factor turning `coefs` into coprime integers."
    coefs = [c for c in coefs if c != 0]
    if not coefs:
        return Fraction(1)
    den = 1
    for c in coefs:
        den = _lcm(den, c.denominator)
    num = 0
    for c in coefs:
        num = gcd(num, abs(c.numerator * (den // c.denominator)))
    return Fraction(den, num)


@dataclass(frozen=True)
class LinearConstraint:
    """
    One normalized constraint `sum(c * sym) REL rhs`.

    Use :meth:`make` to build constraints; it normalizes `>=` to `<=` and
    scales to coprime integer coefficients (equalities get a positive
    leading coefficient).

    Parameters:
        lhs (tuple): sorted (symbol, Fraction) pairs
        relation (str): "<=" or "="
        rhs (InfoExpr): right-hand side
        flag (str): optional marker, e.g. "union-redundant"
        label (str): optional name used in dumps and diagnostics
    """

    lhs: tuple
    relation: str
    rhs: InfoExpr
    flag: str = field(default=None, compare=False)
    label: str = field(default=None, compare=False)

    @classmethod
    def make(cls, lhs, relation, rhs, flag=None, label=None):
        assert relation in (LE, EQ, GE), "bad relation %r" % relation
        lhs = {s: Fraction(c) for s, c in dict(lhs).items() if c != 0}
        rhs = _as_expr(rhs)
        if relation == GE:
            lhs = {s: -c for s, c in lhs.items()}
            rhs = -rhs
            relation = LE
        coefs = list(lhs.values()) + [c for _, c in rhs.items()] + [rhs.constant]
        k = _scale(coefs)
        if relation == EQ and lhs and lhs[min(lhs, key=symbol_key)] < 0:
            k = -k
        lhs = tuple(sorted(((s, c * k) for s, c in lhs.items()), key=lambda x: symbol_key(x[0])))
        return cls(lhs, relation, rhs * k, flag, label)

    @property
    def coefs(self):
        return dict(self.lhs)

    def coef(self, s):
        return self.coefs.get(s, Fraction(0))

    @property
    def symbols(self):
        return [s for s, _ in self.lhs]

    @property
    def is_sign(self):
        "True for nonnegativity rows `-R <= 0`."
        return (
            self.relation == LE
            and len(self.lhs) == 1
            and self.lhs[0][1] < 0
            and self.rhs.is_zero
        )

    def replace(self, lhs=None, rhs=None, flag=None):
        return LinearConstraint.make(
            self.coefs if lhs is None else lhs,
            self.relation,
            self.rhs if rhs is None else rhs,
            self.flag if flag is None else flag,
            self.label,
        )

    def __str__(self):
        return format_constraint(self)


def constraint(lhs, relation, rhs, flag=None, label=None):
    "Shorthand for :meth:`LinearConstraint.make`."
    return LinearConstraint.make(lhs, relation, rhs, flag, label)


def nonneg(*symbols):
    return [LinearConstraint.make({s: 1}, GE, 0) for s in symbols]


class LinearSystem:
    """
    Ordered list of constraints with exact-duplicate merging.

    Parameters:
        constraints (iterable): :class:`LinearConstraint` values
        infeasible (bool): set when elimination found `0 <= negative`
    """

    def __init__(self, constraints=(), infeasible=False):
        out, seen = [], {}
        for c in constraints:
            if c in seen:
                i = seen[c]
                if out[i].flag and not c.flag:
                    out[i] = c
                continue
            seen[c] = len(out)
            out.append(c)
        self.constraints = tuple(out)
        self.infeasible = infeasible

    def __iter__(self):
        return iter(self.constraints)

    def __len__(self):
        return len(self.constraints)

    def __getitem__(self, i):
        return self.constraints[i]

    def __add__(self, other):
        return LinearSystem(
            list(self) + list(other), self.infeasible or getattr(other, "infeasible", False)
        )

    def __repr__(self):
        return "LinearSystem(%d constraints)" % len(self)

    def __str__(self):
        return format_system(self)

    @property
    def variables(self):
        return tuple(sorted({s for c in self for s in c.symbols}, key=symbol_key))

    def atoms(self):
        return {a for c in self for a in c.rhs.atoms()}

    def get(self, label):
        for c in self:
            if c.label == label:
                return c
        raise KeyError(label)

    def flagged(self):
        return LinearSystem(c for c in self if c.flag)

    def drop_flagged(self):
        return LinearSystem((c for c in self if not c.flag), self.infeasible)

    def without(self, labels):
        labels = set(labels)
        return LinearSystem((c for c in self if c.label not in labels), self.infeasible)

    def without_signs(self):
        return LinearSystem((c for c in self if not c.is_sign), self.infeasible)

    def with_nonnegativity(self, symbols=None):
        symbols = self.variables if symbols is None else symbols
        return self + LinearSystem(nonneg(*symbols))

    def map_rhs(self, f):
        return LinearSystem((c.replace(rhs=f(c.rhs)) for c in self), self.infeasible)

    def substitute_terms(self, sigma):
        "Apply a label map to every right-hand side."
        return self.map_rhs(lambda e: e.substitute(sigma))

    def pin_terms(self, pins):
        """
        Replace atoms by values. A pin of `None` means unbounded: every
        constraint whose rhs holds that atom with positive coefficient is
        deleted.

        Parameters:
            pins (dict): atom -> InfoExpr, number or None
        """
        inf = {a for a, v in pins.items() if v is None}
        fin = {a: _as_expr(v) for a, v in pins.items() if v is not None}
        out = []
        for c in self:
            hit = [k for a, k in c.rhs.items() if a in inf]
            if hit:
                assert all(k > 0 for k in hit), "unbounded term with negative sign in %s" % c
                continue
            out.append(c.replace(rhs=c.rhs.replace(fin)))
        return LinearSystem(out, self.infeasible)


def substitute_rates(system, values):
    """
    Fix rate symbols to constants and move them to the right-hand side.
    Rows left without symbols are dropped; a violated one marks the result
    infeasible.
    """
    values = {s: _as_expr(v) for s, v in values.items()}
    out, infeasible = [], system.infeasible
    for c in system:
        lhs = c.coefs
        rhs = c.rhs
        for s, v in values.items():
            k = lhs.pop(s, 0)
            if k:
                rhs = rhs - v * k
        if not lhs:
            if rhs.constant < 0 and rhs.nonpositive():
                infeasible = True
            elif c.relation == EQ and rhs.is_constant and not rhs.is_zero:
                infeasible = True
            continue
        out.append(LinearConstraint.make(lhs, c.relation, rhs, c.flag, c.label))
    return LinearSystem(out, infeasible)


# Fourier-Motzkin.


class _Row:
    __slots__ = ("lhs", "rhs", "anc")

    def __init__(self, lhs, rhs, anc):
        self.lhs = lhs
        self.rhs = rhs
        self.anc = anc

    def key(self):
        return tuple(sorted(self.lhs.items(), key=lambda x: symbol_key(x[0])))


def _lhs_normalized(lhs, rhs):
    k = _scale(list(lhs.values()))
    return {s: c * k for s, c in lhs.items()}, (rhs * k if rhs is not None else None)


def _eliminate_eq(lhs, rhs, eq_lhs, eq_rhs, v):
    c = lhs.get(v, 0)
    if c == 0:
        return lhs, rhs
    k = c / eq_lhs[v]
    out = dict(lhs)
    for s, e in eq_lhs.items():
        out[s] = out.get(s, 0) - k * e
    out = {s: x for s, x in out.items() if x != 0}
    return out, (rhs - eq_rhs * k if rhs is not None else None)


def _contradiction(rhs, relation):
    "`0 <= rhs` (or `0 = rhs`) fails for every nonnegative value of the atoms."
    if relation == EQ and rhs.is_constant:
        return not rhs.is_zero
    return rhs.constant < 0 and rhs.nonpositive()


def _rank(matrix):
    "Rank of a small Fraction matrix by Gaussian elimination."
    m = [list(r) for r in matrix]
    rank, cols = 0, len(m[0]) if m else 0
    for j in range(cols):
        piv = next((i for i in range(rank, len(m)) if m[i][j] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for i in range(len(m)):
            if i != rank and m[i][j] != 0:
                f = m[i][j] / m[rank][j]
                m[i] = [a - f * b for a, b in zip(m[i], m[rank])]
        rank += 1
    return rank


def _fm(system, victims, max_rows, lhs_only):
    eqs = [(c.coefs, c.rhs) for c in system if c.relation == EQ]
    les = [(c.coefs, None if lhs_only else c.rhs) for c in system if c.relation == LE]

    # Equalities first, in victim order.
    remaining = list(victims)
    progress = True
    while progress:
        progress = False
        for v in remaining:
            i = next((i for i, (l, _) in enumerate(eqs) if l.get(v, 0) != 0), None)
            if i is None:
                continue
            el, er = eqs.pop(i)
            er = None if lhs_only else er
            eqs = [_eliminate_eq(l, r, el, er, v) for l, r in eqs]
            les = [_eliminate_eq(l, r, el, er, v) for l, r in les]
            logger.debug("substituted %s from equality", v)
            remaining.remove(v)
            progress = True
            break

    infeasible = False
    if not lhs_only:
        infeasible = any(not l and _contradiction(r, EQ) for l, r in eqs) or any(
            not l and _contradiction(r, LE) for l, r in les
        )
    eqs = [(l, r) for l, r in eqs if l]
    les = [(l, r) for l, r in les if l]

    if lhs_only:
        uniq = {}
        for l, _ in les:
            l, _ = _lhs_normalized(l, None)
            uniq.setdefault(tuple(sorted(l.items(), key=lambda x: symbol_key(x[0]))), l)
        les = [(l, None) for l in uniq.values()]

    base = [l for l, _ in les]
    rows = [_Row(l, r, frozenset([i])) for i, (l, r) in enumerate(les)]
    eliminated = []

    for v in remaining:
        if not any(r.lhs.get(v, 0) != 0 for r in rows):
            logger.debug("victim %s absent, skipping", v)
            continue
        eliminated.append(v)
        k = len(eliminated)
        pos = [r for r in rows if r.lhs.get(v, 0) > 0]
        neg = [r for r in rows if r.lhs.get(v, 0) < 0]
        keep = [r for r in rows if r.lhs.get(v, 0) == 0]
        pairs = 0
        for p in pos:
            for n in neg:
                anc = p.anc | n.anc
                if len(anc) > k + 1:
                    continue
                sub = [[base[i].get(e, Fraction(0)) for e in eliminated] for i in sorted(anc)]
                if _rank(sub) != len(anc) - 1:
                    continue
                a, b = p.lhs[v], -n.lhs[v]
                lhs = {}
                for s, c in p.lhs.items():
                    lhs[s] = lhs.get(s, 0) + b * c
                for s, c in n.lhs.items():
                    lhs[s] = lhs.get(s, 0) + a * c
                lhs = {s: c for s, c in lhs.items() if c != 0}
                rhs = None if lhs_only else p.rhs * b + n.rhs * a
                lhs, rhs = _lhs_normalized(lhs, rhs)
                keep.append(_Row(lhs, rhs, anc))
                pairs += 1

        rows = []
        for r in keep:
            if r.lhs:
                rows.append(r)
            elif not lhs_only and _contradiction(r.rhs, LE):
                infeasible = True
        rows = _dedup(rows, lhs_only)
        logger.debug("eliminated %s: %d+/%d- rows, %d pairs, %d rows out", v, len(pos), len(neg), pairs, len(rows))
        if len(rows) > max_rows:
            raise FourierMotzkinOverflow(
                "elimination of %s produced %d rows (cap %d)" % (v, len(rows), max_rows)
            )
    return eqs, rows, infeasible


def _dedup(rows, lhs_only):
    if lhs_only:
        seen, out = set(), []
        for r in rows:
            k = (r.key(), r.anc)
            if k not in seen:
                seen.add(k)
                out.append(r)
        return out
    groups = {}
    for r in rows:
        groups.setdefault(r.key(), []).append(r)
    out = []
    for rs in groups.values():
        kept = []
        for r in rs:
            if any((r.rhs - s.rhs).nonnegative() for s in kept):
                continue
            kept = [s for s in kept if not (s.rhs - r.rhs).nonnegative()]
            kept.append(r)
        out.extend(kept)
    return out


def fm_eliminate(system, victims, max_rows=100000, prune=True):
    """
    Project a system onto the symbols that are not victims.

    Equalities are used for substitution first; remaining victims are
    removed by pairing opposite-sign rows, keeping only combinations whose
    ancestor sets pass Chernikov's bound and the exact rank test. Rows with
    the same left-hand side and ordered right-hand sides keep the tighter.
    Rows left with no rate symbol are dropped, or mark the result infeasible.

    Chernikov's test keeps some implied rows depending on the victim order;
    with `prune` they are removed by :func:`drop_redundant_symbolic`, so the
    result of a feasible full-dimensional system does not depend on the order.

    Parameters:
        system (LinearSystem): input
        victims (list): rate symbols to eliminate, in order
        max_rows (int): cap on intermediate rows
        prune (bool): drop implied rows of the projection

    Returns:
        projected (LinearSystem)

    Raises:
        FourierMotzkinOverflow
    """
    if not len(system):
        return system
    eqs, rows, infeasible = _fm(system, victims, max_rows, lhs_only=False)
    out = [LinearConstraint.make(l, EQ, r) for l, r in eqs if l]
    les = [LinearConstraint.make(r.lhs, LE, r.rhs) for r in rows]
    les.sort(key=lambda c: (tuple((symbol_key(s), -x) for s, x in c.lhs), str(c.rhs)))
    projected = LinearSystem(out + les, infeasible or system.infeasible)
    if not prune or projected.infeasible:
        return projected
    return drop_redundant_symbolic(projected)


def lhs_directions(system, victims, max_rows=100000):
    """
    Left-hand sides that can bound the projection of `system`, ignoring the
    right-hand sides. Each returned direction comes from an extreme
    combination of the input rows.

    Returns:
        directions (list): sorted tuples of (symbol, integer coefficient)
    """
    _, rows, _ = _fm(system, victims, max_rows, lhs_only=True)
    dirs = {r.key() for r in rows}
    return sorted(dirs, key=lambda d: tuple((symbol_key(s), c) for s, c in d))


# Redundancy.


def _certificate(target, others, eqs, facts):
    syms = sorted({s for c in [target] + others + eqs for s in c.symbols}, key=symbol_key)
    atoms = set(target.rhs.atoms())
    for c in others + eqs:
        atoms.update(c.rhs.atoms())
    for a, b in facts:
        atoms.update((a, b))
    atoms = sorted(atoms, key=lambda a: a.key())
    rows = [("s", s) for s in syms] + [("a", a) for a in atoms] + [("k", None)]
    ridx = {r: i for i, r in enumerate(rows)}

    def vec(c):
        v = [0.0] * len(rows)
        for s, x in c.lhs:
            v[ridx["s", s]] += float(x)
        for a, x in c.rhs.items():
            v[ridx["a", a]] += float(x)
        v[ridx["k", None]] += float(c.rhs.constant)
        return v

    cols, bounds, cost = [], [], []
    for c in others:
        cols.append(vec(c))
        bounds.append((0, None))
        cost.append(1.0)
    for c in eqs:
        cols.append(vec(c))
        bounds.append((None, None))
        cost.append(0.0)
    for a, b in facts:
        v = [0.0] * len(rows)
        v[ridx["a", b]] += 1.0
        v[ridx["a", a]] -= 1.0
        cols.append(v)
        bounds.append((0, None))
        cost.append(0.0)
    for r in rows:
        if r[0] != "s":
            v = [0.0] * len(rows)
            v[ridx[r]] = 1.0
            cols.append(v)
            bounds.append((0, None))
            cost.append(0.0)
    if not cols:
        return None
    a_eq = [[col[i] for col in cols] for i in range(len(rows))]
    b_eq = vec(target)
    res = linprog(cost, A_eq=a_eq, b_eq=b_eq, bounds=bounds, method="highs")
    if res.status != 0:
        return None
    x = [Fraction(float(v)).limit_denominator(10 ** 6) if abs(v) > 1e-9 else Fraction(0) for v in res.x]
    n1, n2 = len(others), len(others) + len(eqs)
    return x[:n1], x[n1:n2], x[n2 : n2 + len(facts)]


def _certified(target, others, eqs, facts, lam, eta, mu):
    lhs = {}
    rhs = InfoExpr()
    for c, k in list(zip(others, lam)) + list(zip(eqs, eta)):
        if k == 0:
            continue
        for s, x in c.lhs:
            lhs[s] = lhs.get(s, 0) + k * x
        rhs = rhs + c.rhs * k
    if {s: x for s, x in lhs.items() if x != 0} != target.coefs:
        return False
    rest = target.rhs - rhs
    for (a, b), k in zip(facts, mu):
        if k:
            rest = rest - (InfoExpr.atom(b) - InfoExpr.atom(a)) * k
    return rest.nonnegative()


def drop_redundant_symbolic(system, facts=None):
    """
    Remove constraints implied by the others, treating each rhs atom as an
    independent nonnegative symbol and using registered dominance facts.

    A constraint is dropped only with an exactly verified certificate:
    nonnegative multipliers on the remaining inequalities, free multipliers
    on equalities and nonnegative multipliers on facts. Flagged and sign
    constraints are always kept, and flagged ones never certify others.

    Parameters:
        system (LinearSystem)
        facts (DominanceRegistry): optional

    Returns:
        system (LinearSystem)
    """
    facts = list(facts or [])
    eqs = [c for c in system if c.relation == EQ]
    kept = list(system)
    for c in list(system):
        if c.relation != LE or c.flag or c.is_sign:
            continue
        others = [o for o in kept if o is not c and o.relation == LE and not o.flag]
        cert = _certificate(c, others, eqs, facts)
        if cert is None:
            continue
        if _certified(c, others, eqs, facts, *cert):
            logger.debug("dropping redundant %s", c)
            kept = [o for o in kept if o is not c]
        else:
            logger.debug("certificate for %s failed exact recheck", c)
    return LinearSystem(kept, system.infeasible)


def system_diff(a, b):
    """
    Constraints of `a` missing in `b` and constraints of `b` not in `a`,
    ignoring sign rows and flags.
    """
    sa = {c for c in a if not c.is_sign}
    sb = {c for c in b if not c.is_sign}
    return (
        [c for c in a if c in sa - sb],
        [c for c in b if c in sb - sa],
    )


def systems_equal(a, b):
    "Set equality of normalized constraints, ignoring sign rows and flags."
    missing, extra = system_diff(a, b)
    if missing or extra:
        logger.info(
            "systems differ: missing %s; extra %s",
            [str(c) for c in missing],
            [str(c) for c in extra],
        )
    return not missing and not extra


def numeric_vertices_2d(system, bindings, tol=1e-9):
    """
    Bind every rhs atom to a number and return the polygon in (R1, R2).

    Parameters:
        system (LinearSystem): over R1 and R2 only
        bindings (dict or callable): atom -> float

    Returns:
        polygon (RatePolygon)
    """
    from .polygon import halfplane_polygon

    extra = set(system.variables) - {"R1", "R2"}
    assert not extra, "symbols %s are not rates of the 2-D region" % sorted(extra)
    a, b = [], []
    for c in system:
        row = (float(c.coef("R1")), float(c.coef("R2")))
        val = c.rhs.evaluate(bindings)
        a.append(row)
        b.append(val)
        if c.relation == EQ:
            a.append((-row[0], -row[1]))
            b.append(-val)
    return halfplane_polygon(a, b, tol=tol)


# Text format.


def _fmt_coef(c):
    return str(c.numerator) if c.denominator == 1 else "%d/%d" % (c.numerator, c.denominator)


def format_constraint(c):
    parts = []
    for i, (s, x) in enumerate(c.lhs):
        sign = "-" if x < 0 else "+"
        m = abs(x)
        body = s if m == 1 else "%s*%s" % (_fmt_coef(m), s)
        if i == 0:
            parts.append(("-" if x < 0 else "") + body)
        else:
            parts.append("%s %s" % (sign, body))
    lhs = " ".join(parts) if parts else "0"
    out = "%s %s %s" % (lhs, c.relation, format_expr(c.rhs))
    if c.label:
        out = "[%s] %s" % (c.label, out)
    if c.flag:
        out += "  @%s" % c.flag
    return out


def format_system(system):
    return "".join(format_constraint(c) + "\n" for c in system)


_LINE = re.compile(r"^\s*(?:\[(?P<label>[^\]]+)\]\s*)?(?P<lhs>.*?)\s*(?P<rel><=|>=|=)\s*(?P<rhs>[^@]*?)\s*(?:@(?P<flag>[\w-]+))?\s*$")
_LHS_TERM = re.compile(r"\s*(?P<sign>[-+])?\s*(?:(?P<num>\d+(?:/\d+)?)\s*\*\s*)?(?P<sym>[A-Za-z_][\w']*)\s*")


def _parse_lhs(text, line):
    out, pos = {}, 0
    text = text.strip()
    first = True
    while pos < len(text):
        m = _LHS_TERM.match(text, pos)
        if not m or m.end() == pos or (not first and not m.group("sign")):
            raise ParseError("cannot parse left-hand side %r" % text, line)
        try:
            c = Fraction(m.group("num") or 1)
        except ZeroDivisionError:
            raise ParseError("zero denominator in %r" % m.group("num"), line)
        if m.group("sign") == "-":
            c = -c
        out[m.group("sym")] = out.get(m.group("sym"), 0) + c
        pos, first = m.end(), False
    if not out:
        raise ParseError("empty left-hand side", line)
    return out


def parse_constraint(text, line=None):
    m = _LINE.match(text)
    if not m:
        raise ParseError("expected `lhs <= rhs`, got %r" % text.strip(), line)
    lhs = _parse_lhs(m.group("lhs"), line)
    try:
        rhs = parse_expr(m.group("rhs"))
    except ZeroDivisionError:
        raise ParseError("zero denominator in %r" % m.group("rhs"), line)
    except ValueError as e:
        raise ParseError(str(e), line)
    return LinearConstraint.make(lhs, m.group("rel"), rhs, m.group("flag"), m.group("label"))


def parse_system(text):
    """
    Parse one constraint per line; `#` starts a comment.

    Raises:
        ParseError naming the offending line
    """
    out = []
    for i, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0].strip()
        if body:
            out.append(parse_constraint(body, i))
    return LinearSystem(out)
