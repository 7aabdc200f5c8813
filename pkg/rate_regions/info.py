import re
from dataclasses import dataclass
from fractions import Fraction
import logging

logger = logging.getLogger(__name__)


# Canonical label order. Sides of a term are sorted by position in this tuple.
LABELS = (
    "Q",
    "V1",
    "U1",
    "T1",
    "S1",
    "Z1",
    "X1",
    "V2",
    "U2",
    "T2",
    "S2",
    "Z2",
    "X2",
    "X1bar",
    "X2bar",
    "Y",
    "Y1",
    "Y2",
    "Y3",
    "Y4",
    "EMPTY",
)
EMPTY = "EMPTY"

# All that is known at source u.
BARS = {
    "X1bar": ("Q", "S1", "S2", "Z1", "V1", "U1", "T1", "X1"),
    "X2bar": ("Q", "S1", "S2", "Z2", "V2", "U2", "T2", "X2"),
}

USER_LABELS = {
    1: frozenset(("V1", "U1", "T1", "S1", "Z1", "X1")),
    2: frozenset(("V2", "U2", "T2", "S2", "Z2", "X2")),
}

_ORDER = {l: i for i, l in enumerate(LABELS)}


def _labels(spec):
    if isinstance(spec, str):
        spec = [s.strip() for s in spec.split(",")]
    out = []
    for l in spec:
        if not l:
            continue
        if l not in _ORDER:
            raise ValueError("unknown random variable label %r" % l)
        out.append(l)
    return out


def _sorted(labels):
    return tuple(sorted(set(labels), key=_ORDER.__getitem__))


def _expand(labels):
    out = []
    for l in labels:
        out.extend(BARS.get(l, (l,)))
    return [l for l in out if l != EMPTY]


@dataclass(frozen=True)
class InfoTerm:
    r"""
    Conditional mutual information :math:`I(A \wedge B | C)` over named labels.

    Build terms with :meth:`InfoTerm.of` which canonicalizes on the way in.
    A canonical term may be *zero* (one side empty); such terms drop out of
    any :class:`InfoExpr`.

    Parameters:
        left (tuple): labels of A
        right (tuple): labels of B
        cond (tuple): labels of C
    """

    left: tuple
    right: tuple
    cond: tuple = ()

    @classmethod
    def of(cls, left, right, cond=()):
        return canonicalize(cls(tuple(_labels(left)), tuple(_labels(right)), tuple(_labels(cond))))

    @property
    def is_zero(self):
        return not self.left or not self.right

    @property
    def labels(self):
        return frozenset(self.left + self.right + self.cond)

    def key(self):
        return (
            0,
            tuple(_ORDER[l] for l in self.left),
            tuple(_ORDER[l] for l in self.right),
            tuple(_ORDER[l] for l in self.cond),
        )

    def substitute(self, sigma):
        def m(ls):
            return [sigma.get(l, l) for l in _expand(ls)]

        return canonicalize(InfoTerm(tuple(m(self.left)), tuple(m(self.right)), tuple(m(self.cond))))

    def __str__(self):
        s = "I(%s ; %s" % (",".join(self.left), ",".join(self.right))
        if self.cond:
            s += " | " + ",".join(self.cond)
        return s + ")"


@dataclass(frozen=True)
class Handle:
    """
    Named nonnegative quantity that is not a mutual information, e.g. a
    conferencing link capacity or a min-group placeholder.
    """

    name: str

    def key(self):
        return (1, self.name)

    def substitute(self, sigma):
        return self

    @property
    def is_zero(self):
        return False

    def __str__(self):
        return "{%s}" % self.name


def canonicalize(t):
    """
    Canonical form of a term: bundles expanded, EMPTY removed, conditioned
    labels dropped from both sides, sides sorted and ordered.

    Parameters:
        t (InfoTerm): term

    Returns:
        t' (InfoTerm): canonical term (possibly zero)
    """
    cond = _sorted(_expand(t.cond))
    c = set(cond)
    left = _sorted(l for l in _expand(t.left) if l not in c)
    right = _sorted(l for l in _expand(t.right) if l not in c)
    if not left or not right:
        return InfoTerm((), (), ())
    ka = tuple(_ORDER[l] for l in left)
    kb = tuple(_ORDER[l] for l in right)
    if ka < kb:
        left, right = right, left
    return InfoTerm(left, right, cond)


def _atom_key(a):
    return a.key()


class InfoExpr:
    """
    Exact rational combination of atoms (:class:`InfoTerm` or
    :class:`Handle`) plus a rational constant. Immutable and hashable.

    Parameters:
        terms (dict): atom -> coefficient
        constant (number): rational constant
    """

    __slots__ = ("_terms", "_constant", "_hash")

    def __init__(self, terms=None, constant=0):
        acc = {}
        for a, c in (terms or {}).items():
            if a.is_zero:
                continue
            c = Fraction(c)
            acc[a] = acc.get(a, 0) + c
        items = sorted(((a, c) for a, c in acc.items() if c != 0), key=lambda x: _atom_key(x[0]))
        self._terms = tuple(items)
        self._constant = Fraction(constant)
        self._hash = hash((self._terms, self._constant))

    @classmethod
    def const(cls, value):
        return cls({}, value)

    @classmethod
    def atom(cls, a, coef=1):
        return cls({a: coef})

    @property
    def terms(self):
        return dict(self._terms)

    @property
    def constant(self):
        return self._constant

    def items(self):
        return self._terms

    def atoms(self):
        return [a for a, _ in self._terms]

    def coef(self, a):
        return self.terms.get(a, Fraction(0))

    @property
    def is_constant(self):
        return not self._terms

    @property
    def is_zero(self):
        return not self._terms and self._constant == 0

    def nonnegative(self):
        "True if the expression is provably >= 0 for nonnegative atoms."
        return self._constant >= 0 and all(c > 0 for _, c in self._terms)

    def nonpositive(self):
        return self._constant <= 0 and all(c < 0 for _, c in self._terms)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = InfoExpr.const(other)
        if not isinstance(other, InfoExpr):
            return NotImplemented
        return self._terms == other._terms and self._constant == other._constant

    def __hash__(self):
        return self._hash

    def __add__(self, other):
        if not isinstance(other, InfoExpr):
            other = InfoExpr.const(other)
        acc = dict(self._terms)
        for a, c in other._terms:
            acc[a] = acc.get(a, 0) + c
        return InfoExpr(acc, self._constant + other._constant)

    __radd__ = __add__

    def __neg__(self):
        return InfoExpr({a: -c for a, c in self._terms}, -self._constant)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, k):
        k = Fraction(k)
        return InfoExpr({a: c * k for a, c in self._terms}, self._constant * k)

    __rmul__ = __mul__

    def substitute(self, sigma):
        """
        Apply a label map to every atom and recanonicalize; collapsed terms
        vanish.

        Parameters:
            sigma (dict): label -> label (or EMPTY); unmapped labels stay

        Returns:
            expr (InfoExpr)
        """
        acc = {}
        for a, c in self._terms:
            b = a.substitute(sigma)
            if b.is_zero:
                continue
            acc[b] = acc.get(b, 0) + c
        return InfoExpr(acc, self._constant)

    def replace(self, mapping):
        """
        Replace atoms by expressions.

        Parameters:
            mapping (dict): atom -> InfoExpr

        Returns:
            expr (InfoExpr)
        """
        out = InfoExpr.const(self._constant)
        for a, c in self._terms:
            out = out + (mapping[a] if a in mapping else InfoExpr.atom(a)) * c
        return out

    def evaluate(self, values):
        """
        Numeric value under an atom binding. Works with floats and with
        batched tensors alike.

        Parameters:
            values (dict or callable): atom -> number or tensor
        """
        get = values if callable(values) else values.__getitem__
        v = float(self._constant)
        for a, c in self._terms:
            v = v + float(c) * get(a)
        return v

    def __str__(self):
        return format_expr(self)

    def __repr__(self):
        return "InfoExpr(%s)" % format_expr(self)


def _fmt_coef(c):
    return str(c.numerator) if c.denominator == 1 else "%d/%d" % (c.numerator, c.denominator)


def format_expr(e):
    "Text form, e.g. `2*I(Y3 ; T1 | Q) - {C21} + 3/2`."
    parts = []
    for a, c in e.items():
        sign = "-" if c < 0 else "+"
        m = abs(c)
        body = str(a) if m == 1 else "%s*%s" % (_fmt_coef(m), a)
        parts.append((sign, body))
    if e.constant != 0 or not parts:
        sign = "-" if e.constant < 0 else "+"
        parts.append((sign, _fmt_coef(abs(e.constant))))
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += " %s %s" % (sign, body)
    return out


_TOKEN = re.compile(
    r"\s*(?:(?P<term>I\((?P<l>[^;∧|)]*)[;∧](?P<r>[^|)]*)(?:\|(?P<c>[^)]*))?\))"
    r"|(?P<handle>\{(?P<name>\w+)\})"
    r"|(?P<num>\d+(?:/\d+)?)"
    r"|(?P<op>[-+*]))"
)


def parse_term(text):
    "Parse `I(Y3 ; T1,U1 | Q,V1)`."
    m = _TOKEN.match(text.strip())
    if not m or not m.group("term") or m.end() != len(text.strip()):
        raise ValueError("malformed term %r" % text)
    return InfoTerm.of(m.group("l"), m.group("r"), m.group("c") or "")


def parse_expr(text):
    """
    Parse the text form produced by :func:`format_expr`.

    Raises:
        ValueError on malformed input
    """
    pos, text = 0, text.strip()
    terms, const = {}, Fraction(0)
    sign, coef, expect_operand = 1, None, True
    if not text:
        raise ValueError("empty expression")
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError("cannot parse %r at %r" % (text, text[pos:]))
        pos = m.end()
        if m.group("op"):
            op = m.group("op")
            if op == "*":
                if coef is None or expect_operand:
                    raise ValueError("dangling '*' in %r" % text)
                expect_operand = True
                continue
            if coef is not None:
                const += sign * coef
                coef = None
            if not expect_operand or op == "-":
                sign = -sign if expect_operand else (1 if op == "+" else -1)
            expect_operand = True
            continue
        if not expect_operand:
            raise ValueError("missing operator in %r" % text)
        if m.group("num"):
            if coef is not None:
                raise ValueError("missing operator in %r" % text)
            coef = Fraction(m.group("num"))
            expect_operand = False
            continue
        if m.group("term"):
            a = InfoTerm.of(m.group("l"), m.group("r"), m.group("c") or "")
        else:
            a = Handle(m.group("name"))
        k = sign * (coef if coef is not None else 1)
        if not a.is_zero:
            terms[a] = terms.get(a, 0) + k
        coef, sign, expect_operand = None, 1, False
    if expect_operand:
        raise ValueError("dangling operator in %r" % text)
    if coef is not None:
        const += sign * coef
    return InfoExpr(terms, const)


def substitute(e, sigma):
    "Functional form of :meth:`InfoExpr.substitute`."
    return e.substitute(sigma)


def cross_user(t, cond_within=("Q",)):
    """
    True if a term measures dependence between the two users' own variables
    given only shared randomness.
    """
    if not isinstance(t, InfoTerm) or t.is_zero:
        return False
    l, r = set(t.left), set(t.right)
    if not set(t.cond) <= set(cond_within):
        return False
    return (l <= USER_LABELS[1] and r <= USER_LABELS[2]) or (
        l <= USER_LABELS[2] and r <= USER_LABELS[1]
    )


class DominanceRegistry:
    """
    Curated facts `a <= b` between atoms, used by redundancy removal.

    Facts are directional and are not closed transitively unless
    :meth:`close` is called.
    """

    def __init__(self):
        self._facts = []
        self._seen = set()

    def register(self, a, b):
        """
        Record `a <= b`.

        Returns:
            handle (int or None): index of the fact; None for `a <= a`

        Raises:
            ValueError if `b <= a` is already registered
        """
        if a == b:
            return None
        if (b, a) in self._seen:
            raise ValueError("conflicting dominance facts for %s and %s" % (a, b))
        if (a, b) in self._seen:
            return self._facts.index((a, b))
        self._seen.add((a, b))
        self._facts.append((a, b))
        return len(self._facts) - 1

    def close(self):
        "Add the transitive closure of the registered facts."
        changed = True
        while changed:
            changed = False
            for a, b in list(self._facts):
                for c, d in list(self._facts):
                    if b == c and a != d and (a, d) not in self._seen:
                        self.register(a, d)
                        changed = True
        return self

    def facts(self):
        return list(self._facts)

    def __len__(self):
        return len(self._facts)

    def __iter__(self):
        return iter(self._facts)

    def substitute(self, sigma=None, pins=None):
        """
        Map facts through a label substitution and term pinning. Facts whose
        lower side vanishes become trivial and are skipped, as are facts
        whose upper side vanishes or becomes unbounded.

        Parameters:
            sigma (dict): label map
            pins (dict): atom -> InfoExpr replacement (None means unbounded)
        """
        out = DominanceRegistry()
        pins = pins or {}
        for a, b in self._facts:
            if a in pins or b in pins:
                continue
            a2 = a.substitute(sigma or {})
            b2 = b.substitute(sigma or {})
            if a2.is_zero or b2.is_zero or a2 == b2:
                continue
            try:
                out.register(a2, b2)
            except ValueError:
                logger.debug("dropping fact %s <= %s: collapses to equality", a2, b2)
                out._facts = [(x, y) for x, y in out._facts if (x, y) != (b2, a2)]
                out._seen.discard((b2, a2))
        return out


def register_dominance(registry, a, b):
    "Record `a <= b` in `registry`; see :meth:`DominanceRegistry.register`."
    return registry.register(a, b)
