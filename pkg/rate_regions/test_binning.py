import itertools

import pytest

from .binning import (
    AGGREGATES,
    OK_PATTERN,
    SLOTS,
    SWAP,
    TABLE,
    build_full,
    build_variant,
    delta,
    destination_rows,
    mdc_values,
    swap_users,
)
from .errors import UnknownTemplate
from .info import InfoExpr, InfoTerm


def _matches(pattern, bits):
    return all(c == "*" or c == b for c, b in zip(pattern, bits))


def test_table_partition():
    assert sum(r[1] for r in TABLE) == 2 ** len(SLOTS) - 8
    for r in TABLE:
        assert r[1] == 2 ** r[0].count("*")
    patterns = [r[0] for r in TABLE] + [OK_PATTERN]
    for bits in itertools.product("01", repeat=len(SLOTS)):
        assert sum(_matches(p, bits) for p in patterns) == 1


def test_destination_rows():
    rows = destination_rows(1)
    assert len(rows) == 28
    assert len(destination_rows(2)) == 28
    assert set(rows[0].lhs) == {"R_V1", "R_U1", "R_T1", "R_Z1", "R_V2", "R_U2", "R''_11c"}
    assert rows[0].bound == InfoExpr.atom(InfoTerm.of(["Y3"], SLOTS)) + delta()
    assert set(rows[12].lhs) == {"R_Z1", "R''_11c"}
    assert set(rows[27].lhs) == {"R_T1"}
    assert [r.index for r in rows if r.disagrees] == [25, 26, 27]
    for r in rows:
        assert r.correction.nonnegative()
        wrong = [s for s in SLOTS if s not in r.correct]
        assert r.bound - delta() + r.correction == InfoExpr.atom(InfoTerm.of(["Y3"], wrong, r.correct))


def test_destination_two_is_swapped():
    one, two = destination_rows(1), destination_rows(2)
    assert set(two[0].lhs) == {"R_V2", "R_U2", "R_T2", "R_Z2", "R_V1", "R_U1", "R''_22c"}
    assert two[0].label == "E0/2"
    assert two[5].bound == one[5].bound.substitute(SWAP)
    assert two[5].slots[1] == "V2"


def test_swap_involution():
    full = build_full()
    assert swap_users(swap_users(full)).system().constraints == full.system().constraints
    swapped = swap_users(full)
    assert [c.label for c in swapped.enc_mdc] == ["23a/2", "23b/2", "23c/2", "24/2"] + [
        "23a/1",
        "23b/1",
        "23c/1",
        "24/1",
    ]


def test_symbols_defined():
    defined = set(AGGREGATES) | {s for parts in AGGREGATES.values() for s in parts}
    assert set(build_full().system().variables) <= defined


def test_variants():
    no_v = build_variant("NO_VBIN")
    for r in no_v.rows():
        assert "1" not in (r.pattern[1], r.pattern[6])
    no_z = build_variant("NO_ZBIN")
    assert len(no_z.dest1) == 17
    assert not {10, 11} & {r.index for r in no_z.dest1}
    two = build_variant("TWO_STEP")
    assert [r.index for r in two.dest1] == list(range(13, 28))
    assert len(two.extra) == 4
    assert {c.label for c in two.system() if c.label and c.label.startswith("TS")} == {
        "TS1/1",
        "TS2/1",
        "TS1/2",
        "TS2/2",
    }
    with pytest.raises(UnknownTemplate):
        build_variant("NO_SUCH")


def test_historic_encoding():
    assert mdc_values(1)["23a"] == mdc_values(1, historic=True)["23a"]
    assert mdc_values(1)["24"] != mdc_values(1, historic=True)["24"]
    assert len(build_full(True).system()) == len(build_full().system())
