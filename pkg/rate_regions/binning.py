"""
Superposition and binning constraint system.

Destination-1 error events are stored as a literal table: one row per event
class with its wrong/correct/any pattern over the codeword slots, the
multiplicity of patterns it covers, the correctly decoded set, and the
rate and information parts of its bound. Destination-2 rows are the
user-swapped copies.
"""
from dataclasses import dataclass, field, replace

from .constraints import EQ, GE, LE, LinearConstraint, LinearSystem
from .errors import UnknownTemplate
from .info import InfoExpr, InfoTerm, parse_term

# Codeword slots seen from destination 1.
SLOTS = ("Q", "V1", "U1", "T1", "S1", "Z1", "V2", "U2")

SWAP = {
    "V1": "V2",
    "U1": "U2",
    "T1": "T2",
    "S1": "S2",
    "Z1": "Z2",
    "X1": "X2",
    "X1bar": "X2bar",
    "Y1": "Y2",
    "Y3": "Y4",
}
SWAP.update({v: k for k, v in list(SWAP.items())})

SWAP_RATES = {
    "R1": "R2",
    "R_10c": "R_20c",
    "R_10n": "R_20n",
    "R_11n": "R_22n",
    "R_11c": "R_22c",
    "R'_10c": "R'_20c",
    "R'_10n": "R'_20n",
    "R'_11n": "R'_22n",
    "R'_11c": "R'_22c",
    "R''_11c": "R''_22c",
    "R_V1": "R_V2",
    "R_U1": "R_U2",
    "R_T1": "R_T2",
    "R_S1": "R_S2",
    "R_Z1": "R_Z2",
}
SWAP_RATES.update({v: k for k, v in list(SWAP_RATES.items())})

# Bin-index rate charged when a slot is wrong but its parent is right.
PENALTY = {"V1": "R'_10c", "S1": "R''_11c", "Z1": "R'_11c", "V2": "R'_20c"}

# Aggregated rates in terms of message and binning rates.
AGGREGATES = {
    "R_Q": ("R_10c", "R_20c"),
    "R_V1": ("R_10c", "R'_10c"),
    "R_U1": ("R_10n", "R'_10n"),
    "R_T1": ("R_11n", "R'_11n"),
    "R_S1": ("R_11c", "R''_11c"),
    "R_Z1": ("R_11c", "R'_11c"),
    "R_V2": ("R_20c", "R'_20c"),
    "R_U2": ("R_20n", "R'_20n"),
    "R_T2": ("R_22n", "R'_22n"),
    "R_S2": ("R_22c", "R''_22c"),
    "R_Z2": ("R_22c", "R'_22c"),
}

# (pattern, multiplicity, correct set, lhs slots, penalty slots, correction)
TABLE = (
    ("1*******", 2 ** 7, (), "V1 V2 U1 T1 U2 Z1", "S1", ()),
    ("01**1*1*", 2 ** 4, ("Q",), "U1 T1 Z1 U2", "V1 S1 V2", ()),
    ("01**1*01", 2 ** 3, ("Q", "V2"), "U1 T1 Z1 U2", "V1 S1", ()),
    ("01**1*00", 2 ** 3, ("Q", "V2", "U2"), "U1 T1 Z1", "V1 S1", ()),
    ("001*1*1*", 2 ** 3, ("Q", "V1"), "U1 T1 Z1 U2", "S1 V2", ()),
    ("001*1*01", 2 ** 2, ("Q", "V2", "V1"), "U1 T1 Z1 U2", "S1", ("I(V1 ; V2 | Q)",)),
    ("001*1*00", 2 ** 2, ("Q", "V2", "U2", "V1"), "U1 T1 Z1", "S1", ("I(V1 ; V2,U2 | Q)",)),
    ("00011*1*", 2 ** 2, ("Q", "V1", "U1"), "T1 Z1 U2", "S1 V2", ()),
    ("00011*01", 2, ("Q", "V2", "V1", "U1"), "T1 Z1 U2", "S1", ("I(V1,U1 ; V2 | Q)",)),
    ("00011*00", 2, ("Q", "V2", "U2", "V1", "U1"), "T1 Z1", "S1", ("I(V1,U1 ; V2,U2 | Q)",)),
    ("00001*1*", 2 ** 2, ("Q", "V1", "U1", "T1"), "Z1 U2", "S1 V2", ()),
    ("00001*01", 2, ("Q", "V2", "V1", "U1", "T1"), "Z1 U2", "S1", ("I(V1,U1,T1 ; V2 | Q)",)),
    ("00001*00", 2, ("Q", "V2", "U2", "V1", "U1", "T1"), "Z1", "S1", ("I(V1,U1,T1 ; V2,U2 | Q)",)),
    ("01**0*1*", 2 ** 4, ("Q", "S1"), "U1 T1 U2", "V1 Z1 V2", ()),
    ("01**0*01", 2 ** 3, ("Q", "S1", "V2"), "U1 T1 U2", "V1 Z1", ("I(S1 ; V2 | Q)",)),
    ("01**0*00", 2 ** 3, ("Q", "S1", "V2", "U2"), "U1 T1", "V1 Z1", ("I(S1 ; V2,U2 | Q)",)),
    ("001*011*", 2 ** 2, ("Q", "S1", "V1"), "U1 T1 U2", "Z1 V2", ("I(S1 ; V1 | Q)",)),
    ("001*0101", 2, ("Q", "S1", "V2", "V1"), "U1 T1 U2", "Z1", ("I(S1 ; V1 | Q)", "I(S1,V1 ; V2 | Q)")),
    ("001*0100", 2, ("Q", "S1", "V2", "U2", "V1"), "U1 T1", "Z1", ("I(S1 ; V1 | Q)", "I(S1,V1 ; V2,U2 | Q)")),
    ("0001011*", 2, ("Q", "S1", "V1", "U1"), "T1 U2", "Z1 V2", ("I(S1 ; V1,U1 | Q)",)),
    ("00010101", 1, ("Q", "S1", "V2", "V1", "U1"), "T1 U2", "Z1", ("I(S1 ; V1,U1 | Q)", "I(S1,V1,U1 ; V2 | Q)")),
    ("00010100", 1, ("Q", "S1", "V2", "U2", "V1", "U1"), "T1", "Z1", ("I(S1 ; V1,U1 | Q)", "I(S1,V1,U1 ; V2,U2 | Q)")),
    ("001*001*", 2 ** 2, ("Q", "S1", "Z1", "V1"), "U1 T1 U2", "V2", ("I(S1 ; V1 | Q)",)),
    ("001*0001", 2, ("Q", "S1", "Z1", "V2", "V1"), "U1 T1 U2", "", ("I(S1 ; V1 | Q)", "I(S1,Z1,V1 ; V2 | Q)")),
    ("001*0000", 2, ("Q", "S1", "Z1", "V2", "U2", "V1"), "U1 T1", "", ("I(S1 ; V1 | Q)", "I(S1,Z1,V1 ; V2,U2 | Q)")),
    ("0001001*", 2, ("Q", "S1", "Z1", "V1", "U1"), "T1 U2", "V2", ("I(S1 ; V1 | Q)", "I(S1,Z1 ; U1 | Q)")),
    ("00010001", 1, ("Q", "S1", "Z1", "V2", "V1", "U1"), "T1 U2", "", ("I(S1 ; V1 | Q)", "I(S1,Z1 ; U1 | Q)", "I(S1,Z1,V1,U1 ; V2 | Q)")),
    ("00010000", 1, ("Q", "S1", "Z1", "V2", "U2", "V1", "U1"), "T1", "", ("I(S1 ; V1 | Q)", "I(S1,Z1 ; U1 | Q)", "I(S1,Z1,V1,U1 ; V2,U2 | Q)")),
)

# Patterns that are not errors at destination 1.
OK_PATTERN = "00000***"

# Corrections obtained by expanding the product-form definition where it
# differs from the displayed one.
DERIVED_CORRECTIONS = {
    25: ("I(S1 ; V1 | Q)", "I(U1 ; S1,Z1 | Q,V1)"),
    26: ("I(S1 ; V1 | Q)", "I(U1 ; S1,Z1 | Q,V1)", "I(S1,Z1,V1,U1 ; V2 | Q)"),
    27: ("I(S1 ; V1 | Q)", "I(U1 ; S1,Z1 | Q,V1)", "I(S1,Z1,V1,U1 ; V2,U2 | Q)"),
}

VARIANTS = ("NO_VBIN", "NO_ZBIN", "TWO_STEP")


def _sum(terms):
    return sum((InfoExpr.atom(parse_term(t)) for t in terms), InfoExpr())


def delta(user=1):
    r"""
    The common additive term :math:`\Delta` of the destination bounds.
    """
    d = _sum(
        (
            "I(S1 ; V1,U1,T1 | Q)",
            "I(Z1 ; U1,T1 | Q,S1,V1)",
            "I(V2,U2 ; V1,U1,T1,S1,Z1 | Q)",
        )
    )
    return d if user == 1 else d.substitute(SWAP)


@dataclass(frozen=True)
class ErrorEventRow:
    """
    One error-event class at a destination.

    Parameters:
        index (int): event number 0..27
        pattern (str): per slot '1' wrong, '0' correct, '*' either
        multiplicity (int): number of patterns covered
        correct (tuple): correctly decoded labels
        lhs (tuple): aggregated-rate and penalty symbols, coefficient 1
        bound (InfoExpr): information part of the bound
        correction (InfoExpr): subtracted dependence term as displayed
        derived_correction (InfoExpr): product-form expansion where it differs
        user (int): destination index
    """

    index: int
    pattern: str
    multiplicity: int
    correct: tuple
    lhs: tuple
    bound: InfoExpr
    correction: InfoExpr
    derived_correction: InfoExpr = None
    user: int = 1

    @property
    def disagrees(self):
        return self.derived_correction is not None and self.derived_correction != self.correction

    @property
    def label(self):
        return "E%d/%d" % (self.index, self.user)

    @property
    def slots(self):
        return SLOTS if self.user == 1 else tuple(SWAP.get(s, s) for s in SLOTS)

    @property
    def info_term(self):
        "The output term `I(Y ; wrong | correct)` of the bound."
        out = "Y3" if self.user == 1 else "Y4"
        return InfoTerm.of([out], [s for s in self.slots if s not in self.correct], self.correct)

    def wrong_slots(self):
        "Slots marked as certainly wrong."
        return [s for s, p in zip(self.slots, self.pattern) if p == "1"]

    def constraint(self):
        return LinearConstraint.make({s: 1 for s in self.lhs}, LE, self.bound, label=self.label)

    def swap(self):
        return replace(
            self,
            correct=tuple(SWAP.get(l, l) for l in self.correct),
            lhs=tuple(SWAP_RATES.get(s, s) for s in self.lhs),
            bound=self.bound.substitute(SWAP),
            correction=self.correction.substitute(SWAP),
            derived_correction=None
            if self.derived_correction is None
            else self.derived_correction.substitute(SWAP),
            user=3 - self.user,
        )


def _row(index, pattern, mult, correct, lhs, penalties, correction):
    wrong = [s for s in SLOTS if s not in correct]
    info = InfoExpr.atom(InfoTerm.of(["Y3"], wrong, correct))
    corr = _sum(correction)
    symbols = ["R_" + s for s in lhs.split()] + [PENALTY[s] for s in penalties.split()]
    derived = DERIVED_CORRECTIONS.get(index)
    return ErrorEventRow(
        index,
        pattern,
        mult,
        tuple(correct),
        tuple(symbols),
        info + delta() - corr,
        corr,
        None if derived is None else _sum(derived),
    )


def destination_rows(user=1):
    "The 28 error-event rows of a destination."
    rows = [_row(i, *r) for i, r in enumerate(TABLE)]
    return rows if user == 1 else [r.swap() for r in rows]


def encoder_bc():
    "Joint binning of the two cooperative-private parts."
    return [
        LinearConstraint.make(
            {"R''_11c": 1, "R''_22c": 1}, GE, _sum(["I(S1 ; S2 | Q)"]), label="22"
        )
    ]


def mdc_values(user=1, historic=False):
    """
    Right-hand sides of the multiple-description binning bounds, by label.
    """
    v = {
        "23a": _sum(["I(V1 ; S1,S2 | Q)"]),
        "23b": _sum(["I(U1,V1 ; S1,S2 | Q)"]),
        "23c": _sum(["I(V1,U1,T1 ; S1,S2 | Q)"]),
        "24": _sum(
            ["I(Z1 ; U1,T1 | Q,S1,S2,V1)" if historic else "I(Z1 ; S2,U1,T1 | Q,S1,V1)"]
        ),
    }
    if user == 2:
        v = {k: e.substitute(SWAP) for k, e in v.items()}
    return v


_MDC_LHS = {
    "23a": ("R'_10c",),
    "23b": ("R'_10n", "R'_10c"),
    "23c": ("R'_11n", "R'_10n", "R'_10c"),
    "24": ("R'_11c",),
}


def encoder_mdc(user=1, historic=False):
    values = mdc_values(user, historic)
    out = []
    for k, lhs in _MDC_LHS.items():
        syms = lhs if user == 1 else tuple(SWAP_RATES[s] for s in lhs)
        out.append(
            LinearConstraint.make({s: 1 for s in syms}, GE, values[k], label="%s/%d" % (k, user))
        )
    return out


def encoder_coop(user=1):
    "Decoding at the other source of the cooperative parts."
    c1 = _sum(["I(Z1 ; Y2 | X2bar,V1)", "I(Z1 ; S2 | Q,S1,V1)"])
    c2 = _sum(["I(V1,Z1 ; Y2 | X2bar)", "I(Z1 ; S2 | Q,S1,V1)", "I(V1 ; S1,S2 | Q)"])
    rows = [({"R_Z1": 1}, c1, "C1"), ({"R_V1": 1, "R_Z1": 1}, c2, "C2")]
    out = []
    for lhs, rhs, name in rows:
        if user == 2:
            lhs = {SWAP_RATES[s]: c for s, c in lhs.items()}
            rhs = rhs.substitute(SWAP)
        out.append(LinearConstraint.make(lhs, LE, rhs, label="%s/%d" % (name, user)))
    return out


def aggregate_equalities(users=(1, 2)):
    out = []
    for s, parts in AGGREGATES.items():
        if s != "R_Q" and int(s[-1]) not in users:
            continue
        lhs = {s: 1}
        for p in parts:
            lhs[p] = -1
        out.append(LinearConstraint.make(lhs, EQ, 0, label=s))
    return out


@dataclass(frozen=True)
class BinningSystem:
    """
    The full superposition and binning constraint set.

    Parameters:
        enc_bc (tuple): joint binning bound
        enc_mdc (tuple): per-user binning bounds
        enc_coop (tuple): cooperation decoding bounds at the sources
        dest1 (tuple): destination-1 error-event rows
        dest2 (tuple): destination-2 error-event rows
        equalities (tuple): aggregated-rate definitions
        extra (tuple): variant-specific constraints
    """

    enc_bc: tuple
    enc_mdc: tuple
    enc_coop: tuple
    dest1: tuple
    dest2: tuple
    equalities: tuple
    extra: tuple = field(default=())
    variant: str = None

    def rows(self):
        return list(self.dest1) + list(self.dest2)

    def system(self):
        return LinearSystem(
            list(self.enc_bc)
            + list(self.enc_mdc)
            + list(self.enc_coop)
            + list(self.extra)
            + [r.constraint() for r in self.rows()]
            + list(self.equalities)
        )


def build_full(historic_encoding=False):
    """
    Complete binning system with both destinations.

    Parameters:
        historic_encoding (bool): use the earlier form of the cooperative
            binning bound, conditioned on both S's.
    """
    return BinningSystem(
        tuple(encoder_bc()),
        tuple(encoder_mdc(1, historic_encoding) + encoder_mdc(2, historic_encoding)),
        tuple(encoder_coop(1) + encoder_coop(2)),
        tuple(destination_rows(1)),
        tuple(destination_rows(2)),
        tuple(aggregate_equalities()),
    )


def _two_step_first(user):
    rows = [
        ({"R_S1": 1}, "I(Y3 ; S1 | Q)", "TS1"),
        ({"R_Q": 1, "R_S1": 1}, "I(Y3 ; S1,Q)", "TS2"),
    ]
    out = []
    for lhs, rhs, name in rows:
        e = _sum([rhs])
        if user == 2:
            lhs = {SWAP_RATES.get(s, s): c for s, c in lhs.items()}
            e = e.substitute(SWAP)
        out.append(LinearConstraint.make(lhs, LE, e, label="%s/%d" % (name, user)))
    return out


def build_variant(variant, historic_encoding=False):
    """
    Reduced binning systems.

    NO_VBIN drops events with a wrong bin index on V1 or V2. NO_ZBIN drops
    events 13 to 21 and the standalone bound on U2 (events 10 and 11).
    TWO_STEP decodes (Q, S1) first and keeps events 13 to 27 for the
    second step.

    Raises:
        UnknownTemplate
    """
    full = build_full(historic_encoding)
    if variant == "NO_VBIN":

        def keep(r):
            return r.pattern[1] != "1" and r.pattern[6] != "1"

        extra = ()
    elif variant == "NO_ZBIN":

        def keep(r):
            return not 13 <= r.index <= 21 and r.index not in (10, 11)

        extra = ()
    elif variant == "TWO_STEP":

        def keep(r):
            return r.index >= 13

        extra = tuple(_two_step_first(1) + _two_step_first(2))
    else:
        raise UnknownTemplate("unknown binning variant %r" % variant)
    return replace(
        full,
        dest1=tuple(r for r in full.dest1 if keep(r)),
        dest2=tuple(r for r in full.dest2 if keep(r)),
        extra=extra,
        variant=variant,
    )


def swap_users(sys):
    "Exchange the roles of the two users everywhere."

    def swap_constraint(c):
        lhs = {SWAP_RATES.get(s, s): x for s, x in c.lhs}
        label = c.label
        if label and label[-2:] in ("/1", "/2"):
            label = label[:-1] + str(3 - int(label[-1]))
        elif label in SWAP_RATES:
            label = SWAP_RATES[label]
        return LinearConstraint.make(lhs, c.relation, c.rhs.substitute(SWAP), c.flag, label)

    return replace(
        sys,
        enc_bc=tuple(swap_constraint(c) for c in sys.enc_bc),
        enc_mdc=tuple(swap_constraint(c) for c in sys.enc_mdc),
        enc_coop=tuple(swap_constraint(c) for c in sys.enc_coop),
        dest1=tuple(r.swap() for r in sys.dest2),
        dest2=tuple(r.swap() for r in sys.dest1),
        equalities=tuple(swap_constraint(c) for c in sys.equalities),
        extra=tuple(swap_constraint(c) for c in sys.extra),
    )
