from .info import InfoTerm, InfoExpr, Handle, DominanceRegistry, parse_term, parse_expr
from .constraints import (
    LinearConstraint,
    LinearSystem,
    fm_eliminate,
    drop_redundant_symbolic,
    systems_equal,
    numeric_vertices_2d,
    parse_system,
    format_system,
)
from .templates import (
    TEMPLATES,
    REDUCTIONS,
    build,
    derive,
    apply_reduction,
    reduction_map,
    binning_equality_eliminate,
)
from .binning import BinningSystem, build_full, build_variant, swap_users
from .gaussian import (
    GaussianScenario,
    PowerSplit,
    CovModel,
    build_cov,
    eval_term,
    closed_form,
    symmetric_network,
)
from .polygon import RatePolygon, metrics, contains, frontier
from .geometry import SweepSpec, region_at, sweep_union
from .verify import CheckReport, run_checks
from .errors import RateRegionError


version = "0.1"

# For flake8 compatibility.
__all__ = [
    InfoTerm,
    InfoExpr,
    Handle,
    DominanceRegistry,
    parse_term,
    parse_expr,
    LinearConstraint,
    LinearSystem,
    fm_eliminate,
    drop_redundant_symbolic,
    systems_equal,
    numeric_vertices_2d,
    parse_system,
    format_system,
    TEMPLATES,
    REDUCTIONS,
    build,
    derive,
    apply_reduction,
    reduction_map,
    binning_equality_eliminate,
    BinningSystem,
    build_full,
    build_variant,
    swap_users,
    GaussianScenario,
    PowerSplit,
    CovModel,
    build_cov,
    eval_term,
    closed_form,
    symmetric_network,
    RatePolygon,
    metrics,
    contains,
    frontier,
    SweepSpec,
    region_at,
    sweep_union,
    CheckReport,
    run_checks,
    RateRegionError,
]
