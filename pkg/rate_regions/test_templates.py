import pytest

from .constraints import systems_equal
from .errors import UnknownTemplate
from .info import Handle, InfoExpr
from .templates import (
    FIVE_FAMILIES,
    REDUCTIONS,
    TEMPLATES,
    TERMS,
    apply_reduction,
    binning_equality_eliminate,
    binning_facts,
    binning_rates,
    bound_families,
    build,
    catalogue_facts,
    degenerate_expected,
    derive,
    expr,
    extreme_families,
    hk_companion_pair,
    sup_facts,
    sup_fm_input,
    template_id,
    term,
)


def test_template_ids():
    assert template_id("sup") == "SUP_REGION"
    assert template_id("HK_DEC1") == "HK_DEC1"
    with pytest.raises(UnknownTemplate):
        template_id("NOPE")
    for name in TEMPLATES:
        assert len(build(name)) > 0


def test_terms():
    assert str(TERMS["13a"]) == "I(Y2 ; V1 | Q,V2,U2,T2,X2)"
    assert TERMS["13b"].substitute({"V1": "Q", "V2": "Q"}) == TERMS["5a"]
    assert TERMS["14e"].substitute({"V1": "Q", "V2": "Q"}) == TERMS["6d"]
    assert expr("2*13a", "14a").coef(TERMS["13a"]) == 2
    assert term("23a/2") == term("23a").substitute({"V1": "V2", "S1": "S2", "S2": "S1"})
    with pytest.raises(UnknownTemplate):
        term("99z")


def test_region_rows():
    sup = build("SUP_REGION")
    assert {c.label for c in sup.flagged()} == {"c1bis", "c2bis"}
    assert len(sup.drop_flagged()) == 13
    assert sup.get("c9").coef("R1") == 2
    assert sup.get("c9").rhs.coef(TERMS["13a"]) == 2
    ext = build("EXT_REGION")
    assert {c.label for c in ext.flagged()} == {"17bis"}
    assert len(build("HK_REGION")) == 7


def test_facts():
    facts = sup_facts().facts()
    assert (TERMS["13b"], TERMS["13f"]) in facts
    assert (TERMS["14a"], TERMS["b1ext2"]) in facts
    assert (TERMS["13c"], TERMS["13d"]) not in facts
    assert len(catalogue_facts()) > len(facts)


def test_fm_input():
    system = sup_fm_input()
    assert {c.label for c in system if c.label} >= {"13a", "14a", "13f", "14f", "R1", "R2"}
    common = sup_fm_input(common=True)
    assert common.get("13f").coef("R0") == 1
    assert "R0" in common.variables


def test_derive_hk():
    derived = derive("HK_REGION")
    assert systems_equal(derived, build("HK_REGION") + hk_companion_pair())
    assert {c.label for c in derived.flagged()} == {"r1a", "r1b"}


def test_derive_sup():
    derived = derive("sup")
    assert systems_equal(derived, build("SUP_REGION"))
    assert {c.label for c in derived.flagged()} == {"c1bis", "c2bis"}


def test_derive_ext():
    assert systems_equal(derive("ext"), build("EXT_REGION"))


@pytest.mark.parametrize(
    "name",
    ["NO_FEEDBACK", "COGNITIVE", "BROADCAST", "MAC_GF", "MAC_GF_COMMON", "RELAY_DF", "CONFERENCING"],
)
def test_reductions(name):
    result, expected = apply_reduction(name)
    assert systems_equal(result, expected)


def test_reduction_without_closed_form():
    result, expected = apply_reduction("OUTPUT_FEEDBACK")
    assert expected is None
    assert all("Y1" not in a.labels and "Y2" not in a.labels for a in result.atoms())
    assert set(REDUCTIONS) >= {"NO_FEEDBACK", "MAC_GF_COMMON"}


def test_conferencing_handles():
    result, _ = apply_reduction("CONFERENCING")
    assert Handle("C21") in result.get("c1").rhs.atoms()
    with pytest.raises(UnknownTemplate):
        apply_reduction("NO_SUCH")


def test_binning_degenerate():
    degenerate = binning_equality_eliminate("DEGENERATE")
    assert not degenerate.infeasible
    assert all(c.lhs for c in degenerate)
    assert systems_equal(degenerate, degenerate_expected())


def test_bound_families():
    assert FIVE_FAMILIES == ((0, 1), (1, 0), (1, 1), (1, 2), (2, 1))
    assert bound_families() == FIVE_FAMILIES
    assert set(extreme_families()) >= set(FIVE_FAMILIES)


def test_binning_facts():
    facts = binning_facts()
    assert len(facts.facts()) > len(catalogue_facts().facts())


def test_binning_rates():
    rates = binning_rates()
    assert set(rates) == {
        "R'_10c",
        "R'_10n",
        "R'_11n",
        "R'_11c",
        "R'_20c",
        "R'_20n",
        "R'_22n",
        "R'_22c",
    }
    for e in rates.values():
        assert isinstance(e, InfoExpr)
    with pytest.raises(UnknownTemplate):
        binning_equality_eliminate("NO_SUCH")
