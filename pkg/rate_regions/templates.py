"""
Constraint templates of the interference channel with generalized feedback.

Every labelled bound is addressable by id through :data:`TERMS`; the
template ids of :data:`TEMPLATES` build the decoding systems, the regions
obtained after elimination, and the superposition-and-binning blocks.
"""
import logging
from dataclasses import dataclass, field

from . import binning
from .constraints import (
    EQ,
    LE,
    LinearConstraint,
    LinearSystem,
    drop_redundant_symbolic,
    fm_eliminate,
    lhs_directions,
    substitute_rates,
)
from .errors import NegativeBinningRate, UnknownTemplate
from .info import DominanceRegistry, Handle, InfoExpr, InfoTerm, cross_user, parse_term

logger = logging.getLogger(__name__)

UNION_REDUNDANT = "union-redundant"

# id -> (information term, rate symbols bounded by it)
_TERM_TABLE = {
    "5a": ("I(Y3 ; T1 | U1,U2,Q)", ("R_11n",)),
    "5b": ("I(Y3 ; T1,U2 | U1,Q)", ("R_20n", "R_11n")),
    "5c": ("I(Y3 ; T1,U1 | U2,Q)", ("R_10n", "R_11n")),
    "5d": ("I(Y3 ; T1,U1,U2 | Q)", ("R_20n", "R_10n", "R_11n")),
    "6a": ("I(Y4 ; T2 | U1,U2,Q)", ("R_22n",)),
    "6b": ("I(Y4 ; T2,U1 | U2,Q)", ("R_10n", "R_22n")),
    "6c": ("I(Y4 ; T2,U2 | U1,Q)", ("R_20n", "R_22n")),
    "6d": ("I(Y4 ; T2,U1,U2 | Q)", ("R_20n", "R_10n", "R_22n")),
    "13a": ("I(V1 ; Y2 | Q,V2,U2,T2,X2)", ("R_10c",)),
    "13b": ("I(Y3 ; T1 | Q,V1,V2,U1,U2)", ("R_11n",)),
    "13c": ("I(Y3 ; T1,U2 | Q,V1,V2,U1)", ("R_11n", "R_20n")),
    "13d": ("I(Y3 ; T1,U1 | Q,V1,V2,U2)", ("R_11n", "R_10n")),
    "13e": ("I(Y3 ; T1,U1,U2 | Q,V1,V2)", ("R_11n", "R_10n", "R_20n")),
    "13f": ("I(Y3 ; T1,U1,U2,Q,V1,V2)", ("R_11n", "R_10n", "R_20n", "R_20c", "R_10c")),
    "14a": ("I(V2 ; Y1 | Q,V1,U1,T1,X1)", ("R_20c",)),
    "14b": ("I(Y4 ; T2 | Q,V2,V1,U2,U1)", ("R_22n",)),
    "14c": ("I(Y4 ; T2,U1 | Q,V2,V1,U2)", ("R_22n", "R_10n")),
    "14d": ("I(Y4 ; T2,U2 | Q,V2,V1,U1)", ("R_20n", "R_22n")),
    "14e": ("I(Y4 ; T2,U2,U1 | Q,V1,V2)", ("R_20n", "R_22n", "R_10n")),
    "14f": ("I(Y4 ; T2,U1,U2,Q,V1,V2)", ("R_22n", "R_20n", "R_10n", "R_20c", "R_10c")),
    "b1ext1": ("I(V2,U2 ; Y1 | Q,V1,U1,T1,X1)", ("R_20n", "R_20c")),
    "b1ext2": ("I(T2,U2,V2 ; Y1 | Q,V1,U1,T1,X1)", ("R_22n", "R_20n", "R_20c")),
}

TERMS = {k: parse_term(t) for k, (t, _) in _TERM_TABLE.items()}


def term(name):
    """
    Information part of a labelled bound.

    Parameters:
        name (str): e.g. "13d", "b1ext1", "23b/2" or "22"

    Returns:
        expr (InfoExpr)
    """
    if name in TERMS:
        return InfoExpr.atom(TERMS[name])
    if name == "22":
        return binning.encoder_bc()[0].rhs * -1
    key, _, user = name.partition("/")
    values = binning.mdc_values(int(user or 1))
    if key in values:
        return values[key]
    raise UnknownTemplate("unknown bound %r" % name)


def expr(*parts):
    """
    Sum of labelled bounds, e.g. `expr("2*13a", "14a", "13b")`.
    """
    out = InfoExpr()
    for p in parts:
        k, _, name = p.rpartition("*")
        out = out + term(name) * int(k or 1)
    return out


def _bound(name, flag=None):
    _, syms = _TERM_TABLE[name]
    return LinearConstraint.make({s: 1 for s in syms}, LE, term(name), flag, label=name)


def _rows(spec, flag=None):
    "Rows `(label, {R1: a, R2: b}, [bound ids])`."
    return [
        LinearConstraint.make(lhs, LE, expr(*parts), flag, label=label)
        for label, lhs, parts in spec
    ]


R1, R2 = {"R1": 1}, {"R2": 1}
SUM, TWO1, TWO2 = {"R1": 1, "R2": 1}, {"R1": 2, "R2": 1}, {"R1": 1, "R2": 2}

HK_SPEC = [
    ("7a", R1, ["5c"]),
    ("7b", R2, ["6c"]),
    ("7c", SUM, ["5d", "6a"]),
    ("7d", SUM, ["5a", "6d"]),
    ("7e", SUM, ["5b", "6b"]),
    ("7f", TWO1, ["5d", "5a", "6b"]),
    ("7g", TWO2, ["5b", "6a", "6d"]),
]

HK_COMPANION_SPEC = [
    ("r1a", R1, ["5a", "6b"]),
    ("r1b", R2, ["6a", "5b"]),
]

SUP_SPEC = [
    ("c1f", R1, ["13f"]),
    ("c1", R1, ["13a", "13d"]),
    ("c2f", R2, ["14f"]),
    ("c2", R2, ["14a", "14d"]),
    ("c3", SUM, ["13f", "14b"]),
    ("c4", SUM, ["13b", "14f"]),
    ("c5", SUM, ["13a", "14a", "13e", "14b"]),
    ("c6", SUM, ["13a", "14a", "13b", "14e"]),
    ("c7", SUM, ["13a", "14a", "13c", "14c"]),
    ("c8", TWO1, ["13a", "13b", "13f", "14c"]),
    ("c9", TWO1, ["2*13a", "14a", "13b", "13e", "14c"]),
    ("c10", TWO2, ["14a", "13c", "14b", "14f"]),
    ("c11", TWO2, ["13a", "2*14a", "13c", "14b", "14e"]),
]

SUP_COMPANION_SPEC = [
    ("c1bis", R1, ["13a", "13b", "14c"]),
    ("c2bis", R2, ["14a", "14b", "13c"]),
]

EXT_SPEC = [
    ("17a1", R1, ["13f"]),
    ("17a2", R1, ["13a", "13d"]),
    ("17b1", R2, ["14f"]),
    ("17b2", R2, ["b1ext1", "14b"]),
    ("17c1", SUM, ["13f", "14b"]),
    ("17c2", SUM, ["13b", "14f"]),
    ("17c3", SUM, ["13a", "b1ext1", "13b", "14c"]),
    ("17d", TWO1, ["13a", "13b", "13f", "14c"]),
]

EXT_COMPANION_SPEC = [("17bis", R1, ["13a", "13b", "14c"])]

HK_VICTIMS = ["R_10n", "R_11n", "R_20n", "R_22n"]
SUP_VICTIMS = ["R_10c", "R_10n", "R_11n", "R_20c", "R_20n", "R_22n"]


def rate_sums(common=True):
    "Definitions of R1 and R2 from the split rates."
    if common:
        r1, r2 = ("R_10c", "R_10n", "R_11n"), ("R_20c", "R_20n", "R_22n")
    else:
        r1, r2 = ("R_10n", "R_11n"), ("R_20n", "R_22n")
    return [
        LinearConstraint.make(dict({"R1": 1}, **{s: -1 for s in r1}), EQ, 0, label="R1"),
        LinearConstraint.make(dict({"R2": 1}, **{s: -1 for s in r2}), EQ, 0, label="R2"),
    ]


def _chain(registry, pairs):
    for a, b in pairs:
        registry.register(TERMS[a], TERMS[b])
    return registry


_HK_PAIRS = [(u + x, u + y) for u in "56" for x, y in (("a", "b"), ("a", "c"), ("b", "d"), ("c", "d"))]

_SUP_PAIRS = [("14a", "b1ext1"), ("b1ext1", "b1ext2")] + [
    (u + x, u + y)
    for u in ("13", "14")
    for x, y in (("b", "c"), ("b", "d"), ("c", "e"), ("d", "e"), ("e", "f"))
]


def hk_facts():
    "Dominance chains of the no-feedback decoding bounds."
    return _chain(DominanceRegistry(), _HK_PAIRS).close()


def sup_facts():
    r"""
    The destination chains :math:`(b) \le \min\{(c),(d)\} \le \max\{(c),(d)\}
    \le (e) \le (f)`, closed transitively, and the extended cooperation
    bounds over the plain ones.
    """
    return _chain(DominanceRegistry(), _SUP_PAIRS).close()


def catalogue_facts():
    "Every dominance fact between catalogued bounds."
    return _chain(DominanceRegistry(), _HK_PAIRS + _SUP_PAIRS).close()


def binning_facts():
    """
    Catalogued facts plus, per destination, `I(Y ; wrong | correct)` of an
    error event below that of every event with fewer correct codewords.
    """
    registry = catalogue_facts()
    for user in (1, 2):
        rows = binning.destination_rows(user)
        for a in rows:
            for b in rows:
                if set(a.correct) < set(b.correct):
                    registry.register(b.info_term, a.info_term)
    return registry


# Template ids.


def _hk(user):
    return LinearSystem(_bound("%d%s" % (4 + user, k)) for k in "abcd")


def _sup_dec(user):
    return LinearSystem(_bound("%d%s" % (12 + user, k)) for k in "bcdef")


def _binning_dest(user):
    full = binning.build_full()
    rows = full.dest1 if user == 1 else full.dest2
    return LinearSystem([r.constraint() for r in rows] + list(full.equalities))


TEMPLATES = {
    "HK_DEC1": lambda: _hk(1),
    "HK_DEC2": lambda: _hk(2),
    "HK_REGION": lambda: LinearSystem(_rows(HK_SPEC)),
    "SUP_COOP1": lambda: LinearSystem([_bound("13a")]),
    "SUP_DEC1": lambda: _sup_dec(1),
    "SUP_COOP2": lambda: LinearSystem([_bound("14a")]),
    "SUP_DEC2": lambda: _sup_dec(2),
    "SUP_REGION": lambda: LinearSystem(_rows(SUP_SPEC) + _rows(SUP_COMPANION_SPEC, UNION_REDUNDANT)),
    "EXT_COOP": lambda: LinearSystem([_bound("b1ext1")]),
    "EXT_COOP2": lambda: LinearSystem([_bound("b1ext2")]),
    "EXT_REGION": lambda: LinearSystem(_rows(EXT_SPEC) + _rows(EXT_COMPANION_SPEC, UNION_REDUNDANT)),
    "BIN_ENC_BC": lambda: LinearSystem(binning.encoder_bc()),
    "BIN_ENC_MDC": lambda: LinearSystem(binning.encoder_mdc(1) + binning.encoder_mdc(2)),
    "BIN_ENC_COOP": lambda: LinearSystem(binning.encoder_coop(1) + binning.encoder_coop(2)),
    "BIN_DEC1": lambda: _binning_dest(1),
    "BIN_DEC2": lambda: _binning_dest(2),
}

# Short names accepted on the command line.
ALIASES = {"hk": "HK_REGION", "sup": "SUP_REGION", "ext": "EXT_REGION"}


def template_id(name):
    name = ALIASES.get(name, name)
    if name not in TEMPLATES:
        raise UnknownTemplate(
            "unknown template %r (known: %s)" % (name, ", ".join(sorted(TEMPLATES)))
        )
    return name


def build(template):
    """
    Constraint system of a template id.

    Raises:
        UnknownTemplate
    """
    return TEMPLATES[template_id(template)]()


def hk_companion_pair():
    "Single-rate bounds that also come out of the no-feedback elimination."
    return LinearSystem(_rows(HK_COMPANION_SPEC, UNION_REDUNDANT))


# Elimination inputs and derivations.


def hk_fm_input():
    return (build("HK_DEC1") + build("HK_DEC2") + LinearSystem(rate_sums(common=False))).with_nonnegativity(
        HK_VICTIMS
    )


def sup_fm_input(extended=False, common=False):
    """
    Decoding constraints at the sources and destinations with the rate sums.

    Parameters:
        extended (bool): source 1 decodes (V2, U2) instead of V2 alone
        common (bool): add a common-message rate R0 to the bounds that
            decode everything
    """
    coop2 = build("EXT_COOP") if extended else build("SUP_COOP2")
    rows = list(build("SUP_COOP1") + build("SUP_DEC1") + coop2 + build("SUP_DEC2"))
    victims = list(SUP_VICTIMS)
    if common:
        rows = [
            c.replace(lhs=dict(c.coefs, R0=1)) if c.label in ("13f", "14f") else c for c in rows
        ]
    system = LinearSystem(rows + rate_sums())
    return system.with_nonnegativity(victims + (["R0"] if common else []))


def _mark(system, reference):
    "Copy labels and flags from matching rows of `reference`."
    ref = {c: c for c in reference}
    out = []
    for c in system:
        r = ref.get(c)
        if r is not None:
            c = LinearConstraint(c.lhs, c.relation, c.rhs, r.flag, r.label)
        out.append(c)
    return LinearSystem(out, system.infeasible)


def eliminate_and_clean(system, victims, facts, reference=None):
    """
    Eliminate `victims`, drop redundant rows, and label the result against
    a reference region.
    """
    projected = fm_eliminate(system, victims)
    keep = [s for s in projected.variables if s in ("R0", "R1", "R2")]
    cleaned = drop_redundant_symbolic(projected.with_nonnegativity(keep), facts)
    return cleaned if reference is None else _mark(cleaned, reference)


def derive(template):
    """
    Region obtained by eliminating the split rates from the decoding
    constraints: HK_REGION (with its two single-rate companions),
    SUP_REGION or EXT_REGION.
    """
    template = template_id(template)
    if template == "HK_REGION":
        ref = build("HK_REGION") + hk_companion_pair()
        return eliminate_and_clean(hk_fm_input(), HK_VICTIMS, hk_facts(), ref)
    if template == "SUP_REGION":
        return eliminate_and_clean(sup_fm_input(), SUP_VICTIMS, sup_facts(), build(template))
    if template == "EXT_REGION":
        return eliminate_and_clean(
            sup_fm_input(extended=True), SUP_VICTIMS, sup_facts(), build(template)
        )
    raise UnknownTemplate("no elimination is defined for %s" % template)


# Reductions of the superposition region.

MAC_SIGMA = {"Y3": "Y", "Y4": "Y", "T1": "EMPTY", "T2": "EMPTY"}


@dataclass(frozen=True)
class Reduction:
    """
    A special case of the superposition region.

    Parameters:
        name (str): reduction id
        sigma (dict): label substitution
        pins (dict): bound id -> value; None means unbounded
        expected (list): rows `(label, lhs, [bound ids])` before pinning and `sigma`
        note (str): what the reduction models
    """

    name: str
    sigma: dict = field(default_factory=dict)
    pins: dict = field(default_factory=dict)
    expected: list = None
    note: str = ""

    def atom_pins(self):
        out = {}
        for k, v in self.pins.items():
            out[TERMS[k]] = v if v is None or isinstance(v, InfoExpr) else InfoExpr.const(v)
        return out

    def expected_system(self):
        if self.expected is None:
            return None
        return LinearSystem(_rows(self.expected)).pin_terms(self.atom_pins()).substitute_terms(self.sigma)


REDUCTIONS = {
    "NO_FEEDBACK": Reduction(
        "NO_FEEDBACK",
        {"V1": "Q", "V2": "Q"},
        {"13a": 0, "14a": 0},
        HK_SPEC,
        "interference channel without feedback",
    ),
    "OUTPUT_FEEDBACK": Reduction(
        "OUTPUT_FEEDBACK", {"Y1": "Y3", "Y2": "Y4"}, note="sources overhear the destination outputs"
    ),
    "COGNITIVE": Reduction(
        "COGNITIVE",
        {"U1": "Q", "V1": "Q", "V2": "Q"},
        {"13a": None, "14a": 0},
        [
            ("c1f", R1, ["13f"]),
            ("c2", R2, ["14d"]),
            ("c3", SUM, ["13f", "14b"]),
            ("c4", SUM, ["13b", "14f"]),
            ("c10", TWO2, ["13c", "14b", "14f"]),
        ],
        "source 2 knows the message of source 1",
    ),
    "BROADCAST": Reduction(
        "BROADCAST",
        {"U1": "Q", "V1": "Q", "U2": "Q", "V2": "Q"},
        {"13a": None, "14a": None},
        [
            ("c1f", R1, ["13f"]),
            ("c2f", R2, ["14f"]),
            ("c3", SUM, ["13f", "14b"]),
            ("c4", SUM, ["13b", "14f"]),
        ],
        "superposition coding over a broadcast channel",
    ),
    "MAC_GF": Reduction(
        "MAC_GF",
        MAC_SIGMA,
        expected=[
            ("c1", R1, ["13a", "13d"]),
            ("c2", R2, ["14a", "13c"]),
            ("c3", SUM, ["13f"]),
            ("c5", SUM, ["13a", "14a", "13e"]),
        ],
        note="multiple access channel with generalized feedback",
    ),
    "MAC_GF_COMMON": Reduction(
        "MAC_GF_COMMON",
        MAC_SIGMA,
        expected=[
            ("c1", R1, ["13a", "13d"]),
            ("c2", R2, ["14a", "13c"]),
            ("c3", {"R0": 1, "R1": 1, "R2": 1}, ["13f"]),
            ("c5", SUM, ["13a", "14a", "13e"]),
        ],
        note="Q also carries a message for both destinations",
    ),
    "RELAY_DF": Reduction(
        "RELAY_DF",
        MAC_SIGMA,
        expected=[("relay", R1, ["13a", "13d"]), ("relay-f", R1, ["13f"])],
        note="full-duplex relay channel, partial decode-and-forward",
    ),
    "CONFERENCING": Reduction(
        "CONFERENCING",
        pins={"13a": InfoExpr.atom(Handle("C21")), "14a": InfoExpr.atom(Handle("C12"))},
        expected=SUP_SPEC,
        note="conferencing encoders with link capacities C21 and C12",
    ),
}


def reduction_map(name):
    """
    Substitution, pinning and expected region of a reduction.

    Raises:
        UnknownTemplate
    """
    if name not in REDUCTIONS:
        raise UnknownTemplate(
            "unknown reduction %r (known: %s)" % (name, ", ".join(REDUCTIONS))
        )
    return REDUCTIONS[name]


def _reduce(system, red, facts):
    pins = red.atom_pins()
    reduced = system.pin_terms(pins).substitute_terms(red.sigma)
    facts = facts.substitute(red.sigma, pins)
    keep = [s for s in reduced.variables if s in ("R0", "R1", "R2")]
    return drop_redundant_symbolic(reduced.with_nonnegativity(keep), facts), facts


def apply_reduction(name, base=None):
    """
    Specialize the superposition region and clean it up.

    Parameters:
        name (str): reduction id
        base (LinearSystem): region to start from; defaults to the
            superposition region without its union-redundant rows

    Returns:
        result (LinearSystem), expected (LinearSystem or None)
    """
    red = reduction_map(name)
    facts = sup_facts()
    if name == "MAC_GF_COMMON" and base is None:
        flags = set(build("SUP_REGION").flagged())
        base = eliminate_and_clean(sup_fm_input(common=True), SUP_VICTIMS, facts)
        base = LinearSystem(c for c in base if c not in flags)
    if base is None:
        base = build("SUP_REGION").drop_flagged()
    if name == "RELAY_DF":
        mac, facts = _reduce(base, red, facts)
        relay = substitute_rates(mac, {"R2": 0})
        result = drop_redundant_symbolic(relay.with_nonnegativity(["R1"]), facts)
    else:
        result, _ = _reduce(base, red, facts)
    expected = red.expected_system()
    if expected is not None:
        result = _mark(result, expected)
    return result, expected


# Superposition and binning: binning rates chosen at equality.


@dataclass(frozen=True)
class BinningPinning:
    """
    A specialization of the binning system.

    Parameters:
        name (str): pinning id
        sigma (dict): label substitution
        rates (tuple): rate symbols fixed to zero
        cross_user_zero (bool): independent users given Q
        drop_coop (bool): remove the cooperation decoding bounds at the sources
    """

    name: str
    sigma: dict = field(default_factory=dict)
    rates: tuple = ()
    cross_user_zero: bool = False
    drop_coop: bool = False


BINNING_PINNINGS = {
    "DEGENERATE": BinningPinning(
        "DEGENERATE",
        {"S1": "Q", "Z1": "Q", "S2": "Q", "Z2": "Q"},
        ("R_11c", "R_22c"),
        cross_user_zero=True,
    ),
    "BROADCAST": BinningPinning(
        "BROADCAST",
        {l: "Q" for l in ("V1", "U1", "T1", "Z1", "V2", "U2", "T2", "Z2")},
        ("R_10c", "R_20c", "R_10n", "R_11n", "R_20n", "R_22n"),
        drop_coop=True,
    ),
}


def binning_pinning(name):
    if name not in BINNING_PINNINGS:
        raise UnknownTemplate("unknown binning pinning %r" % name)
    return BINNING_PINNINGS[name]


def _term_pins(atoms, pinning):
    if pinning is None or not pinning.cross_user_zero:
        return {}
    return {a: InfoExpr() for a in atoms if isinstance(a, InfoTerm) and cross_user(a)}


def binning_rates(pinning=None, historic=False):
    """
    Binning rates at equality in the per-user bounds, keyed by symbol.

    Raises:
        NegativeBinningRate when a required rate is provably negative
    """
    out = {}
    for user in (1, 2):
        v = binning.mdc_values(user, historic)
        if pinning is not None:
            v = {k: e.substitute(pinning.sigma) for k, e in v.items()}
            pins = _term_pins({a for e in v.values() for a in e.atoms()}, pinning)
            v = {k: e.replace(pins) for k, e in v.items()}
        rates = {
            "R'_10c": v["23a"],
            "R'_10n": v["23b"] - v["23a"],
            "R'_11n": v["23c"] - v["23b"],
            "R'_11c": v["24"],
        }
        if user == 2:
            rates = {binning.SWAP_RATES[s]: e for s, e in rates.items()}
        out.update(rates)
    for s, e in out.items():
        if e.nonpositive() and not e.is_zero:
            raise NegativeBinningRate("binning rate %s = %s is negative" % (s, e))
    return out


def _active_slots(pinning, rates, keep_bc):
    pinned = set(pinning.rates) if pinning is not None else set()

    def free(s):
        return s not in pinned

    def nz(s):
        return not rates[s].is_zero

    active = {"Q": free("R_10c") or free("R_20c")}
    for u, v in ((1, 2), (2, 1)):
        own = "%d%d" % (u, u)
        active["V%d" % u] = nz("R'_%d0c" % u)
        active["U%d" % u] = free("R_%d0n" % u) or nz("R'_%d0n" % u)
        active["T%d" % u] = free("R_%sn" % own) or nz("R'_%sn" % own)
        active["S%d" % u] = free("R_%sc" % own) or keep_bc
        active["Z%d" % u] = nz("R'_%sc" % own)
    return active


def binning_equality_eliminate(pinning=None, historic=False):
    """
    Binning system with the binning rates fixed at equality in their
    bounds and the aggregated rates eliminated.

    The joint bound on the two cooperative-private binning rates stays as
    an inequality unless its right-hand side vanishes, in which case both
    rates are zero. Error events that need a wrong codeword in a slot that
    carries no index are removed.

    Parameters:
        pinning (BinningPinning or str): optional specialization
        historic (bool): earlier form of the cooperative binning bound

    Returns:
        system (LinearSystem): over the split rates (and the joint binning
            rates when they survive)

    Raises:
        NegativeBinningRate
    """
    if isinstance(pinning, str):
        pinning = binning_pinning(pinning)
    rates = binning_rates(pinning, historic)
    full = binning.build_full(historic)
    sigma = pinning.sigma if pinning is not None else {}

    bc = full.enc_bc[0].rhs.substitute(sigma)
    keep_bc = not bc.replace(_term_pins(bc.atoms(), pinning)).is_zero
    active = _active_slots(pinning, rates, keep_bc)

    def possible(row):
        return all(active[s] for s in row.wrong_slots())

    dest = [r for r in full.rows() if possible(r)]
    logger.debug("binning rows kept: %d of %d", len(dest), len(full.rows()))
    rows = list(full.enc_bc) + [r.constraint() for r in dest] + list(full.equalities)
    if pinning is None or not pinning.drop_coop:
        rows += list(full.enc_coop)
    system = LinearSystem(rows).substitute_terms(sigma)
    system = system.pin_terms(_term_pins(system.atoms(), pinning))

    system = substitute_rates(system, rates)
    if not keep_bc:
        system = substitute_rates(system.without(["22"]), {"R''_11c": 0, "R''_22c": 0})
    if pinning is not None:
        system = substitute_rates(system, {s: 0 for s in pinning.rates})

    aggregated = [s for s in system.variables if s in binning.AGGREGATES]
    system = fm_eliminate(system, aggregated)
    return system.with_nonnegativity()


def degenerate_expected():
    "Superposition-only decoding constraints, the target of DEGENERATE."
    return build("SUP_COOP1") + build("SUP_DEC1") + build("SUP_COOP2") + build("SUP_DEC2")


def broadcast_expected():
    "Binning bounds left by BROADCAST."
    bc = binning.encoder_bc()[0]
    return LinearSystem(
        [
            LinearConstraint.make({"R_11c": 1, "R''_11c": 1}, LE, InfoExpr.atom(parse_term("I(Y3 ; S1 | Q)"))),
            LinearConstraint.make({"R_22c": 1, "R''_22c": 1}, LE, InfoExpr.atom(parse_term("I(Y4 ; S2 | Q)"))),
            bc,
        ]
    )


def marton(system):
    """
    Eliminate the joint binning rates from the BROADCAST system, with
    R1 = R_11c and R2 = R_22c.
    """
    sums = LinearSystem(
        [
            LinearConstraint.make({"R1": 1, "R_11c": -1}, EQ, 0),
            LinearConstraint.make({"R2": 1, "R_22c": -1}, EQ, 0),
        ]
    )
    projected = fm_eliminate(system + sums, ["R_11c", "R_22c", "R''_11c", "R''_22c"])
    return drop_redundant_symbolic(projected.with_nonnegativity(["R1", "R2"]))


def marton_expected():
    a = InfoExpr.atom(parse_term("I(Y3 ; S1 | Q)"))
    b = InfoExpr.atom(parse_term("I(Y4 ; S2 | Q)"))
    i = InfoExpr.atom(parse_term("I(S1 ; S2 | Q)"))
    return LinearSystem(
        [
            LinearConstraint.make(R1, LE, a),
            LinearConstraint.make(R2, LE, b),
            LinearConstraint.make(SUM, LE, a + b - i),
        ]
    )


FIVE_FAMILIES = ((0, 1), (1, 0), (1, 1), (1, 2), (2, 1))


def _families_input(historic):
    system = binning_equality_eliminate(None, historic)
    own = {1: ("R_10c", "R_10n", "R_11n", "R_11c"), 2: ("R_20c", "R_20n", "R_22n", "R_22c")}
    sums = [
        LinearConstraint.make(dict({"R%d" % u: 1}, **{s: -1 for s in own[u]}), EQ, 0)
        for u in (1, 2)
    ]
    victims = list(own[1] + own[2]) + [s for s in ("R''_11c", "R''_22c") if s in system.variables]
    return system + LinearSystem(sums), victims


def _rate_pairs(lhs_list):
    out = set()
    for c in lhs_list:
        a, b = c.get("R1", 0), c.get("R2", 0)
        if set(c) <= {"R1", "R2"} and a >= 0 and b >= 0 and (a or b):
            out.add((int(a), int(b)))
    return tuple(sorted(out))


def bound_families(historic=False):
    """
    Directions (a, b) of the bounds `a R1 + b R2 <= ...` left on the binning
    region once the split and joint binning rates are eliminated and the
    implied rows dropped.

    Returns:
        directions (tuple): sorted nonnegative coefficient pairs
    """
    system, victims = _families_input(historic)
    projected = fm_eliminate(system, victims, prune=False)
    cleaned = drop_redundant_symbolic(projected.with_nonnegativity(["R1", "R2"]), binning_facts())
    return _rate_pairs(row.coefs for row in cleaned if row.relation == LE and not row.is_sign)


def extreme_families(historic=False):
    "Directions of every extreme combination, before implied rows are dropped."
    system, victims = _families_input(historic)
    return _rate_pairs(dict(d) for d in lhs_directions(system, victims))
