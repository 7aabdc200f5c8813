from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis.strategies import data, lists, sampled_from

from .info import (
    LABELS,
    DominanceRegistry,
    Handle,
    InfoExpr,
    InfoTerm,
    cross_user,
    format_expr,
    parse_expr,
    parse_term,
)

plain = sampled_from([l for l in LABELS if l not in ("EMPTY", "X1bar", "X2bar")])


@given(data())
@settings(max_examples=100, deadline=None)
def test_canonical_symmetric(data):
    a = data.draw(lists(plain, min_size=1, max_size=3))
    b = data.draw(lists(plain, min_size=1, max_size=3))
    c = data.draw(lists(plain, max_size=3))
    t = InfoTerm.of(a, b, c)
    assert t == InfoTerm.of(b, a, c)
    assert t == InfoTerm.of(list(reversed(a)), b, list(reversed(c)))
    if not t.is_zero:
        assert not set(t.left) & set(t.cond)
        assert not set(t.right) & set(t.cond)


def test_canonical_form():
    t = InfoTerm.of("T1", "Y3", "Q")
    assert str(t) == "I(Y3 ; T1 | Q)"
    assert InfoTerm.of("Y3", "T1,Q", "Q") == t
    assert InfoTerm.of("Y3", "Q", "Q").is_zero
    assert InfoTerm.of("Y3", "EMPTY").is_zero
    assert InfoTerm.of("Y3", "X1bar").right == ("Q", "V1", "U1", "T1", "S1", "Z1", "X1", "S2")


def test_unknown_label():
    with pytest.raises(ValueError):
        InfoTerm.of("Y3", "W7")
    with pytest.raises(ValueError):
        parse_term("I(Y3 ; Foo)")


def test_zero_terms_vanish():
    e = InfoExpr({InfoTerm.of("Y3", "Q", "Q"): 3}, 1)
    assert e.is_constant
    assert e == 1


def test_parse_format():
    text = "2*I(Y3 ; T1 | Q) - {C21} + 3/2"
    e = parse_expr(text)
    assert e.coef(parse_term("I(Y3 ; T1 | Q)")) == 2
    assert e.coef(Handle("C21")) == -1
    assert e.constant == Fraction(3, 2)
    assert format_expr(e) == text
    assert parse_expr("-I(T1 ; Y3 | Q)") == -InfoExpr.atom(parse_term("I(Y3 ; T1 | Q)"))


@pytest.mark.parametrize("text", ["", "2 *", "I(Y3 ; T1) I(Y4 ; T2)", "2 3", "I(Y3 ; T1"])
def test_parse_errors(text):
    with pytest.raises(ValueError):
        parse_expr(text)


def test_arithmetic():
    a = InfoExpr.atom(parse_term("I(Y3 ; T1 | Q)"))
    b = InfoExpr.atom(Handle("C12"))
    e = 2 * a - b + 1
    assert (e - e).is_zero
    assert (a + b).nonnegative()
    assert not e.nonnegative()
    assert (-a).nonpositive()
    assert e.evaluate({parse_term("I(Y3 ; T1 | Q)"): 1.5, Handle("C12"): 0.5}) == 3.5


def test_substitute():
    t = parse_term("I(Y3 ; T1,U1 | Q)")
    assert t.substitute({"U1": "EMPTY"}) == parse_term("I(Y3 ; T1 | Q)")
    assert t.substitute({"U1": "Q"}) == parse_term("I(Y3 ; T1 | Q)")
    assert t.substitute({"T1": "EMPTY", "U1": "EMPTY"}).is_zero
    e = InfoExpr.atom(t) + InfoExpr.atom(parse_term("I(Y3 ; T1 | Q)"))
    assert e.substitute({"U1": "Q"}).coef(parse_term("I(Y3 ; T1 | Q)")) == 2
    assert e.substitute({"T1": "EMPTY", "U1": "EMPTY"}).is_zero


def test_cross_user():
    assert cross_user(parse_term("I(V2 ; V1 | Q)"))
    assert cross_user(parse_term("I(S1,V1 ; V2,U2 | Q)"))
    assert not cross_user(parse_term("I(Y3 ; T1 | Q)"))
    assert not cross_user(parse_term("I(V2 ; V1 | Q,U1)"))
    assert not cross_user(Handle("C21"))


def test_registry():
    a, b, c = (parse_term(t) for t in ("I(Y3 ; T1 | Q)", "I(Y3 ; T1,U1 | Q)", "I(Y3 ; T1,U1,U2 | Q)"))
    reg = DominanceRegistry()
    assert reg.register(a, a) is None
    assert reg.register(a, b) == 0
    assert reg.register(a, b) == 0
    with pytest.raises(ValueError):
        reg.register(b, a)
    reg.register(b, c)
    reg.close()
    assert (a, c) in reg.facts()
    assert len(reg) == 3


def test_registry_substitute():
    a, b = parse_term("I(Y3 ; T1 | Q,U1)"), parse_term("I(Y3 ; T1,U1 | Q)")
    reg = DominanceRegistry()
    reg.register(a, b)
    assert len(reg.substitute({"U1": "Q"})) == 0
    assert len(reg.substitute(pins={b: None})) == 0
    assert reg.substitute({"Y3": "Y"}).facts() == [(a.substitute({"Y3": "Y"}), b.substitute({"Y3": "Y"}))]
