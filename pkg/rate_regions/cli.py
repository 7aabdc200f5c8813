"""
Rate regions of the interference channel with generalized feedback.

Usage:
    rate-regions region (--symmetric <p> <x> <y> | --scenario FILE) [options]
    rate-regions sweep (--symmetric <p> <x> <y> | --scenario FILE) [options]
    rate-regions verify <check> [--symmetric <p> <x> <y> | --scenario FILE] [options]
    rate-regions fm <input> [--eliminate SYMS] [--clean] [options]
    rate-regions templates list
    rate-regions templates dump <template> [--derive | --fm-input] [options]
    rate-regions templates reduce <reduction> [options]
    rate-regions binning dump [--variant V] [--historic] [options]
    rate-regions binning eliminate [--pinning P] [--historic] [options]
    rate-regions -h | --help

Commands:
    region      Region of a template: the swept union, or one split with --split.
    sweep       Swept union with explicit grid settings.
    verify      Run a check (or all): theorem1-fm, theorem2-fm, corollary1,
                appendixA, reductions, binning.
    fm          Fourier-Motzkin elimination of a constraint file.
    templates   List, dump, derive or reduce constraint templates.
    binning     Dump or eliminate the superposition and binning system.

Options:
    --symmetric          Symmetric network from power <p> and distances <x>, <y>.
    --scenario FILE      Scenario JSON file.
    --template T         hk, sup, ext or a region template id [default: sup].
    --split FILE         Power split JSON file; evaluate that split only.
    --keep-flagged       Keep the union-redundant single-rate bounds.
    --resolution N       Lattice points per power-simplex axis [default: 9].
    --phases N           Relative Q phases for user 2 [default: 1].
    --refine N           Local refinement evaluations [default: 200].
    --chunk N            Splits per evaluation batch [default: 4096].
    --box B              Split box, sup or hk; default by template.
    --seed N             Seed of the numeric checks [default: 0].
    --trials N           Random splits of the appendixA check [default: 100].
    --eliminate SYMS     Comma-separated symbols to eliminate [default: ].
    --clean              Drop redundant rows using the catalogued dominance facts.
    --derive             Derive the region by elimination instead of dumping it.
    --fm-input           Dump the elimination input of the region.
    --variant V          NO_VBIN, NO_ZBIN or TWO_STEP.
    --pinning P          DEGENERATE or BROADCAST.
    --historic           Earlier form of the cooperative binning bound.
    --out FILE           Write to FILE instead of standard output.
    --format F           csv or json [default: csv].
    -v, --verbose        Log progress.
    -h, --help           Show this screen.

Environment:
    RATE_REGIONS_THREADS caps the number of torch threads.
"""
import json
import logging
import os
import sys
from dataclasses import asdict

import torch
from docopt import DocoptExit, docopt

from . import binning, templates
from .constraints import format_system, drop_redundant_symbolic, fm_eliminate, parse_system
from .errors import InfeasibleSystem, ParseError, RateRegionError, UsageError
from .gaussian import PowerSplit, load_scenario, scenario_to_dict, symmetric_network
from .geometry import SweepSpec, region_at, sweep_union
from .verify import CHECK_IDS, run_checks

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3


def _int(opts, name, low=0):
    try:
        v = int(opts[name])
    except ValueError:
        raise UsageError("%s must be an integer, got %r" % (name, opts[name]))
    if v < low:
        raise UsageError("%s must be at least %d" % (name, low))
    return v


def _float(text, name):
    try:
        return float(text)
    except ValueError:
        raise UsageError("%s must be a number, got %r" % (name, text))


def scenario(opts):
    if opts["--scenario"]:
        return load_scenario(opts["--scenario"])
    if opts["--symmetric"]:
        return symmetric_network(*(_float(opts[k], k) for k in ("<p>", "<x>", "<y>")))
    return None


def _write(text, opts):
    if opts["--out"]:
        with open(opts["--out"], "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _polygon_out(polygon, opts, **extra):
    fmt = opts["--format"]
    if fmt == "csv":
        return polygon.to_csv()
    if fmt == "json":
        return polygon.to_json(**extra) + "\n"
    raise UsageError("--format must be csv or json, got %r" % fmt)


def cmd_region(opts):
    scn = scenario(opts)
    template = templates.template_id(opts["--template"])
    drop = not opts["--keep-flagged"]
    extra = {"template": template, "scenario": scenario_to_dict(scn)}
    if opts["--split"]:
        with open(opts["--split"]) as f:
            try:
                split = PowerSplit.from_dict(json.load(f))
            except (TypeError, ValueError) as e:
                raise ParseError("bad split file %s: %s" % (opts["--split"], e))
        split.check(scn)
        polygon = region_at(scn, split, template, drop)
        extra["split"] = split.to_dict()
    else:
        polygon = sweep_union(scn, template, SweepSpec(), drop)
    _write(_polygon_out(polygon, opts, **extra), opts)
    return EXIT_OK


def cmd_sweep(opts):
    scn = scenario(opts)
    template = templates.template_id(opts["--template"])
    spec = SweepSpec(
        resolution=_int(opts, "--resolution", 2),
        phases=_int(opts, "--phases", 1),
        refine=_int(opts, "--refine"),
        chunk=_int(opts, "--chunk", 1),
        box=opts["--box"],
    )
    polygon = sweep_union(scn, template, spec, not opts["--keep-flagged"])
    extra = {"template": template, "scenario": scenario_to_dict(scn), "sweep": asdict(spec)}
    _write(_polygon_out(polygon, opts, **extra), opts)
    return EXIT_OK


def cmd_verify(opts):
    check = opts["<check>"]
    ids = list(CHECK_IDS) if check == "all" else [check]
    reports = run_checks(
        ids, scenario(opts), seed=_int(opts, "--seed"), trials=_int(opts, "--trials", 1)
    )
    for r in reports:
        logger.warning("%s: %s", r.id, "pass" if r.passed else "FAIL")
    _write(json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=True) + "\n", opts)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_CHECK


def cmd_fm(opts):
    with open(opts["<input>"]) as f:
        system = parse_system(f.read())
    victims = [s.strip() for s in opts["--eliminate"].split(",") if s.strip()]
    unknown = [s for s in victims if s not in system.variables]
    if unknown:
        raise UsageError("symbols not in the system: %s" % ", ".join(unknown))
    projected = fm_eliminate(system, victims)
    if projected.infeasible:
        raise InfeasibleSystem("the system has no solution")
    if opts["--clean"]:
        keep = [s for s in projected.variables if s in ("R0", "R1", "R2")]
        projected = drop_redundant_symbolic(
            projected.with_nonnegativity(keep), templates.catalogue_facts()
        )
    _write(format_system(projected), opts)
    return EXIT_OK


def cmd_templates(opts):
    if opts["list"]:
        aliases = {v: k for k, v in templates.ALIASES.items()}
        lines = [
            "%s%s" % (t, " (%s)" % aliases[t] if t in aliases else "") for t in templates.TEMPLATES
        ]
        _write("\n".join(lines) + "\n", opts)
        return EXIT_OK
    if opts["reduce"]:
        result, _ = templates.apply_reduction(opts["<reduction>"])
        _write(format_system(result.without_signs()), opts)
        return EXIT_OK
    name = templates.template_id(opts["<template>"])
    if opts["--derive"]:
        system = templates.derive(name)
    elif opts["--fm-input"]:
        if name == "HK_REGION":
            system = templates.hk_fm_input()
        elif name in ("SUP_REGION", "EXT_REGION"):
            system = templates.sup_fm_input(extended=name == "EXT_REGION")
        else:
            raise UsageError("%s has no elimination input" % name)
    else:
        system = templates.build(name)
    _write(format_system(system), opts)
    return EXIT_OK


def cmd_binning(opts):
    historic = opts["--historic"]
    if opts["dump"]:
        if opts["--variant"]:
            system = binning.build_variant(opts["--variant"], historic).system()
        else:
            system = binning.build_full(historic).system()
    else:
        system = templates.binning_equality_eliminate(opts["--pinning"], historic)
    _write(format_system(system), opts)
    return EXIT_OK


COMMANDS = {
    "region": cmd_region,
    "sweep": cmd_sweep,
    "verify": cmd_verify,
    "fm": cmd_fm,
    "templates": cmd_templates,
    "binning": cmd_binning,
}


def _threads():
    n = os.environ.get("RATE_REGIONS_THREADS")
    if not n:
        return
    try:
        n = int(n)
    except ValueError:
        raise UsageError("RATE_REGIONS_THREADS must be an integer, got %r" % n)
    if n < 1:
        raise UsageError("RATE_REGIONS_THREADS must be positive")
    torch.set_num_threads(n)


def main(argv=None):
    """
    Entry point of the `rate-regions` command.

    Returns:
        status (int): 0 ok, 1 failed check, 2 usage error, 3 I/O or parse error
    """
    try:
        opts = docopt(__doc__, argv)
    except DocoptExit as e:
        sys.stderr.write("%s\n" % e)
        return EXIT_USAGE
    logging.basicConfig(
        level=logging.INFO if opts["--verbose"] else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    command = next(c for c in COMMANDS if opts[c])
    try:
        _threads()
        return COMMANDS[command](opts)
    except (OSError, ParseError) as e:
        sys.stderr.write("rate-regions %s: %s\n" % (command, e))
        return EXIT_IO
    except RateRegionError as e:
        sys.stderr.write("rate-regions %s: %s\n" % (command, e))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
