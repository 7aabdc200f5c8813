import pytest

from .errors import RateRegionError
from .gaussian import GaussianScenario
from .verify import (
    CHECK_IDS,
    check_appendixA_redundancy,
    check_binning,
    check_corollary1,
    check_reductions,
    check_theorem1_fm,
    check_theorem2_fm,
    run_checks,
)


def test_hk_elimination():
    report = check_theorem1_fm()
    assert report.passed, report.diagnostics
    assert report.witness is None


def test_hk_elimination_detects_missing_bound():
    report = check_theorem1_fm(drop="6d")
    assert not report.passed
    assert report.witness["missing"]
    with pytest.raises(RateRegionError):
        check_theorem1_fm(drop="99z")


def test_sup_elimination():
    report = check_theorem2_fm()
    assert report.passed, report.diagnostics


def test_sup_elimination_detects_missing_term():
    report = check_theorem2_fm(drop="13a")
    assert not report.passed
    assert set(report.to_dict()) == {"id", "passed", "diagnostics", "witness"}


def test_extended_decoding():
    report = check_corollary1(draws=20)
    assert report.passed, report.diagnostics


def test_extended_decoding_needs_the_fold():
    report = check_corollary1(draws=20, fold=False)
    assert not report.passed
    assert set(report.witness) == {"scenario", "split", "seed", "draw"}


def test_union_redundancy():
    report = check_appendixA_redundancy(trials=20)
    assert report.passed, report.diagnostics
    scn = GaussianScenario(1.0, 1.0, 2.0, 2.0, 0.5, 0.5, 10.0, 10.0)
    assert check_appendixA_redundancy(scn, trials=20, seed=3).passed


def test_union_redundancy_trials():
    with pytest.raises(RateRegionError):
        check_appendixA_redundancy(trials=0)


def test_run_checks():
    reports = run_checks(["theorem2-fm", "theorem1-fm"])
    assert [r.id for r in reports] == ["theorem1-fm", "theorem2-fm"]
    assert all(r.passed for r in reports)
    with pytest.raises(RateRegionError):
        run_checks(["nope"])
    assert CHECK_IDS[0] == "theorem1-fm"


def test_reductions():
    report = check_reductions()
    assert report.passed, report.diagnostics
    assert "MAC_GF_COMMON: ok" in report.diagnostics
    assert "binning DEGENERATE: ok" in report.diagnostics


def test_binning():
    report = check_binning()
    assert report.passed, report.diagnostics
    assert "bound families: 0R1+1R2, 1R1+0R2, 1R1+1R2, 1R1+2R2, 2R1+1R2" in report.diagnostics


def test_run_all_checks():
    reports = run_checks(trials=200)
    assert [r.id for r in reports] == list(CHECK_IDS)
    for r in reports:
        assert r.passed, (r.id, r.diagnostics)
