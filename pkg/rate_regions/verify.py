"""
Executable checks of the symbolic and numeric claims about the regions.

Every check returns a :class:`CheckReport`; failing reports carry a witness
(the differing constraints, or the scenario, split and seed of a numeric
counterexample) that can be replayed from the command line.
"""
import itertools
import logging
from dataclasses import dataclass, field

import torch

from . import binning
from .constraints import format_constraint, system_diff
from .errors import RateRegionError
from .gaussian import build_cov, random_splits, scenario_to_dict, symmetric_network
from .geometry import bind, model_polygons, region_system
from .polygon import contains, halfplane_polygon, polygons_equal
from .templates import (
    FIVE_FAMILIES,
    HK_VICTIMS,
    REDUCTIONS,
    SUP_VICTIMS,
    TERMS,
    apply_reduction,
    binning_equality_eliminate,
    bound_families,
    broadcast_expected,
    build,
    degenerate_expected,
    eliminate_and_clean,
    extreme_families,
    hk_facts,
    hk_fm_input,
    hk_companion_pair,
    marton,
    marton_expected,
    sup_facts,
    sup_fm_input,
)

logger = logging.getLogger(__name__)


@dataclass
class CheckReport:
    """
    Outcome of one check.

    Parameters:
        id (str): check id
        passed (bool)
        diagnostics (list): human-readable lines
        witness (dict): smallest input that reproduces a failure
    """

    id: str
    passed: bool
    diagnostics: list = field(default_factory=list)
    witness: dict = None

    def to_dict(self):
        return {
            "id": self.id,
            "passed": self.passed,
            "diagnostics": list(self.diagnostics),
            "witness": self.witness,
        }


def _compare(check_id, derived, expected, notes=()):
    missing, extra = system_diff(expected, derived)
    diag = list(notes)
    diag += ["missing: %s" % format_constraint(c) for c in missing]
    diag += ["extra: %s" % format_constraint(c) for c in extra]
    if missing or extra:
        witness = {
            "missing": [format_constraint(c) for c in missing],
            "extra": [format_constraint(c) for c in extra],
        }
        return CheckReport(check_id, False, diag, witness)
    return CheckReport(check_id, True, diag or ["%d constraints match" % len(expected)])


def _without(system, drop):
    if drop is None:
        return system
    if drop not in {c.label for c in system}:
        raise RateRegionError("no input constraint labelled %r" % drop)
    return system.without([drop])


def check_theorem1_fm(drop=None):
    """
    Eliminating the split rates from the two no-feedback decoders gives
    the no-feedback region plus its two single-rate companions.

    Parameters:
        drop (str): bound id removed from the input first (mutation test)
    """
    expected = build("HK_REGION") + hk_companion_pair()
    derived = eliminate_and_clean(_without(hk_fm_input(), drop), HK_VICTIMS, hk_facts(), expected)
    report = _compare("theorem1-fm", derived, expected)
    flagged = derived.flagged()
    if report.passed and len(flagged) != len(hk_companion_pair()):
        report.passed = False
        report.diagnostics.append("single-rate companions are not flagged")
        report.witness = {"flagged": [format_constraint(c) for c in flagged]}
    return report


def check_theorem2_fm(drop=None):
    """
    Eliminating the split rates from the cooperation and destination
    bounds gives the superposition region with its two flagged rows, and
    the (c9) bound carries the cooperation term twice.
    """
    expected = build("SUP_REGION")
    derived = eliminate_and_clean(
        _without(sup_fm_input(), drop), SUP_VICTIMS, sup_facts(), expected
    )
    report = _compare("theorem2-fm", derived, expected)
    c9 = derived.get("c9") if report.passed else expected.get("c9")
    if c9.rhs.coef(TERMS["13a"]) != 2:
        report.passed = False
        report.diagnostics.append("c9 does not carry 2*(13a): %s" % format_constraint(c9))
    return report


def check_corollary1(scn=None, draws=100, seed=0, fold=True, tol=1e-9):
    """
    Decoding (V2, U2) at source 1 gives the same region as superposition
    with U2's power folded into V2.

    Symbolically the extended elimination gives EXT_REGION. Numerically
    EXT_REGION at a split equals SUP_REGION evaluated with V2' = (V2, U2)
    and U2' empty, for `draws` random splits.

    Parameters:
        fold (bool): evaluate SUP_REGION on the folded labels; False is a
            mutation that must fail
    """
    expected = build("EXT_REGION")
    derived = eliminate_and_clean(
        sup_fm_input(extended=True), SUP_VICTIMS, sup_facts(), expected
    )
    report = _compare("corollary1", derived, expected)
    if not report.passed:
        return report

    scn = scn or symmetric_network(6, 2, 1)
    gen = torch.Generator().manual_seed(seed)
    batch = random_splits(scn, draws, gen)
    model = build_cov(scn, batch)
    target = model.transformed({"V2": ("V2", "U2"), "U2": ()}) if fold else model
    ext = model_polygons(region_system("EXT_REGION", False), model)
    sup = model_polygons(region_system("SUP_REGION", False), target)
    for k, (a, b) in enumerate(zip(ext, sup)):
        if not polygons_equal(a, b, tol):
            report.passed = False
            report.diagnostics.append(
                "split %d: EXT %s differs from folded SUP %s" % (k, a.vertices, b.vertices)
            )
            report.witness = {
                "scenario": scenario_to_dict(scn),
                "split": batch.split(k).to_dict(),
                "seed": seed,
                "draw": k,
            }
            return report
    report.diagnostics.append("%d random splits agree within %g" % (draws, tol))
    return report


# Per user: flagged row, the two single-rate rows it competes with, and
# the fold that removes the non-cooperative common part.
_FOLDS = {
    1: ("c1bis", "c1", "c1f", {"U1": (), "T1": ("T1", "U1")}),
    2: ("c2bis", "c2", "c2f", {"U2": (), "T2": ("T2", "U2")}),
}


def check_appendixA_redundancy(scn=None, trials=100, seed=0, tol=1e-9):
    r"""
    The flagged single-rate rows of the superposition region never remove
    achievable points.

    For each random split where (c1bis) is tighter than both (c1f) and
    (c1), every point of the region without the flagged rows that has
    :math:`R_1 \ge` (c1bis) must lie in the full region evaluated with
    :math:`U_1' = \emptyset, T_1' = (T_1, U_1)`. The mirror is checked for
    (c2bis).

    Parameters:
        scn (GaussianScenario): defaults to the symmetric network (6, 2, 1)
        trials (int): random splits, at least 1
        seed (int)

    Raises:
        RateRegionError for trials < 1
    """
    if trials < 1:
        raise RateRegionError("appendixA needs at least one trial, got %d" % trials)
    scn = scn or symmetric_network(6, 2, 1)
    gen = torch.Generator().manual_seed(seed)
    batch = random_splits(scn, trials, gen)
    model = build_cov(scn, batch)
    full = build("SUP_REGION")
    index = {c.label: k for k, c in enumerate(full)}
    keep = [k for k, c in enumerate(full) if not c.flag]
    a, b = bind(full, model)
    a_keep = a[keep].tolist()
    report = CheckReport("appendixA", True)
    for user, (bis, single, forgotten, mapping) in _FOLDS.items():
        a2, b2 = bind(full, model.transformed(mapping))
        a2 = a2.tolist()
        active = 0
        for k in range(trials):
            lim = float(b[k, index[bis]])
            if lim >= min(float(b[k, index[single]]), float(b[k, index[forgotten]])) - 1e-12:
                continue
            active += 1
            row = [-1.0, 0.0] if user == 1 else [0.0, -1.0]
            cut = halfplane_polygon(a_keep + [row], b[k, keep].tolist() + [-lim])
            outer = halfplane_polygon(a2, b2[k].tolist())
            if not contains(outer, cut, tol):
                report.passed = False
                report.diagnostics.append(
                    "split %d: points above %s = %.6g escape the folded region" % (k, bis, lim)
                )
                report.witness = {
                    "scenario": scenario_to_dict(scn),
                    "split": batch.split(k).to_dict(),
                    "seed": seed,
                    "trial": k,
                    "row": bis,
                }
                return report
        report.diagnostics.append("%s active at %d of %d splits" % (bis, active, trials))
    return report


def check_reductions():
    "Every special case of the superposition region, and binning without binning."
    report = CheckReport("reductions", True)
    for name, red in REDUCTIONS.items():
        result, expected = apply_reduction(name)
        if expected is None:
            report.diagnostics.append("%s: %d constraints (no closed form)" % (name, len(result.without_signs())))
            continue
        sub = _compare(name, result, expected)
        _merge(report, sub, name)
    sub = _compare("DEGENERATE", binning_equality_eliminate("DEGENERATE"), degenerate_expected())
    _merge(report, sub, "binning DEGENERATE")
    return report


def _merge(report, sub, name):
    if sub.passed:
        report.diagnostics.append("%s: ok" % name)
        return
    report.passed = False
    report.diagnostics += ["%s: %s" % (name, d) for d in sub.diagnostics]
    if report.witness is None:
        report.witness = dict(sub.witness or {}, reduction=name)


def _table_partition():
    "Every slot pattern is an error class of exactly one row, or no error."
    patterns = [r[0] for r in binning.TABLE] + [binning.OK_PATTERN]
    hits = [0] * len(patterns)
    bad = []
    for bits in itertools.product("01", repeat=len(binning.SLOTS)):
        match = [
            i for i, p in enumerate(patterns) if all(c == "*" or c == b for c, b in zip(p, bits))
        ]
        if len(match) != 1:
            bad.append("".join(bits))
        for i in match:
            hits[i] += 1
    for i, r in enumerate(binning.TABLE):
        if hits[i] != r[1]:
            bad.append("row %d covers %d patterns, table says %d" % (i, hits[i], r[1]))
    return bad


# Rows whose dependence correction vanishes.
NO_CORRECTION = (0, 1, 2, 3, 4, 7, 10, 13)


def check_binning(historic=False):
    """
    Bookkeeping of the error-event table, user symmetry, the broadcast
    special case and the bound families of the binning region.
    """
    report = CheckReport("binning", True)

    def fail(msg, **witness):
        report.passed = False
        report.diagnostics.append(msg)
        if report.witness is None:
            report.witness = witness or {"message": msg}

    full = binning.build_full(historic)
    if len(full.dest1) != 28 or len(full.dest2) != 28:
        fail("expected 28 rows per destination, got %d and %d" % (len(full.dest1), len(full.dest2)))
    for msg in _table_partition():
        fail("table: %s" % msg)
    for r in full.dest1:
        if r.index in NO_CORRECTION and not r.correction.is_zero:
            fail("row %d has correction %s" % (r.index, r.correction), row=r.index)
        if r.disagrees:
            report.diagnostics.append(
                "row %d: displayed correction %s, product form %s"
                % (r.index, r.correction, r.derived_correction)
            )
    defined = set(binning.AGGREGATES) | {s for parts in binning.AGGREGATES.values() for s in parts}
    orphans = sorted(set(full.system().variables) - defined)
    if orphans:
        fail("symbols without a definition: %s" % ", ".join(orphans))
    twice = binning.swap_users(binning.swap_users(full))
    if twice.system().constraints != full.system().constraints:
        fail("swapping the users twice changes the system")

    bc = binning_equality_eliminate("BROADCAST", historic)
    missing, extra = system_diff(broadcast_expected(), bc)
    if missing or extra:
        fail(
            "BROADCAST binning differs",
            missing=[format_constraint(c) for c in missing],
            extra=[format_constraint(c) for c in extra],
        )
    else:
        m = marton(bc)
        missing, extra = system_diff(marton_expected(), m)
        if missing or extra:
            fail(
                "Marton elimination differs",
                missing=[format_constraint(c) for c in missing],
                extra=[format_constraint(c) for c in extra],
            )
        else:
            report.diagnostics.append("BROADCAST: Marton region recovered")

    families = bound_families(historic)
    if families != FIVE_FAMILIES:
        fail("bound families %s, expected %s" % (list(families), list(FIVE_FAMILIES)), families=families)
    else:
        report.diagnostics.append("bound families: %s" % ", ".join("%dR1+%dR2" % f for f in families))
    extreme = [f for f in extreme_families(historic) if f not in families]
    if extreme:
        report.diagnostics.append(
            "directions implied by the others: %s" % ", ".join("%dR1+%dR2" % f for f in extreme)
        )
    return report


CHECK_IDS = ("theorem1-fm", "theorem2-fm", "corollary1", "appendixA", "reductions", "binning")


def run_checks(ids=None, scn=None, seed=0, trials=100):
    """
    Run checks in the fixed id order.

    Parameters:
        ids (list): subset of CHECK_IDS; all when None

    Returns:
        reports (list of CheckReport)
    """
    ids = CHECK_IDS if ids is None else ids
    unknown = [i for i in ids if i not in CHECK_IDS]
    if unknown:
        raise RateRegionError(
            "unknown check %s (known: %s)" % (", ".join(unknown), ", ".join(CHECK_IDS))
        )
    checks = {
        "theorem1-fm": check_theorem1_fm,
        "theorem2-fm": check_theorem2_fm,
        "corollary1": lambda: check_corollary1(scn, seed=seed),
        "appendixA": lambda: check_appendixA_redundancy(scn, trials, seed),
        "reductions": check_reductions,
        "binning": check_binning,
    }
    out = []
    for i in CHECK_IDS:
        if i in ids:
            report = checks[i]()
            logger.info("%s: %s", i, "pass" if report.passed else "FAIL")
            out.append(report)
    return out
