"""Discrete-time quantum walk with a linearly ramped coin.

The package simulates a walker on the integer line whose two-level coin
is rotated by a fixed bias plus a ramp that grows with the step index,
locates the parameter points where the walker returns to the origin
with certainty, and quantifies how coin dephasing degrades the return.
"""

from .coins import (
    CoinOperator,
    StepConvention,
    coin_at_step,
    compose,
    equal_up_to_global_phase,
    rx,
    ry,
    unitarity_defect,
)
from .states import (
    CoinVector,
    Lattice,
    PositionDistribution,
    WalkerCoinDensityMatrix,
    WalkerCoinPureState,
    coin_overlap,
    density_from_pure,
    initial_state,
    position_distribution,
    purity,
    reduced_coin_state,
    reduced_walker_state,
)
from .evolution import (
    BoundaryOverflowError,
    WalkSchedule,
    bisect_visibility,
    evolve,
    evolve_density,
    multi_step_operator,
    origin_probability_series,
    shift_operator,
    step,
    step_operator,
)
from .analysis import (
    RevivalReport,
    classify,
    effective_coin_balanced_strings,
    effective_coin_from_operator,
    is_revival_operator,
    polya_number,
    tv_distance,
    tv_from_origin_probability,
)
from .search import (
    CatalogEntry,
    RevivalCandidate,
    SearchConfig,
    TableDiff,
    load_reference_catalog,
    rationalize,
    scan,
    verify_table,
)

__all__ = [
    "BoundaryOverflowError",
    "CatalogEntry",
    "CoinOperator",
    "CoinVector",
    "Lattice",
    "PositionDistribution",
    "RevivalCandidate",
    "RevivalReport",
    "SearchConfig",
    "StepConvention",
    "TableDiff",
    "WalkSchedule",
    "WalkerCoinDensityMatrix",
    "WalkerCoinPureState",
    "bisect_visibility",
    "classify",
    "coin_at_step",
    "coin_overlap",
    "compose",
    "density_from_pure",
    "effective_coin_balanced_strings",
    "effective_coin_from_operator",
    "equal_up_to_global_phase",
    "evolve",
    "evolve_density",
    "initial_state",
    "is_revival_operator",
    "load_reference_catalog",
    "multi_step_operator",
    "origin_probability_series",
    "polya_number",
    "position_distribution",
    "purity",
    "rationalize",
    "reduced_coin_state",
    "reduced_walker_state",
    "rx",
    "ry",
    "scan",
    "shift_operator",
    "step",
    "step_operator",
    "tv_distance",
    "tv_from_origin_probability",
    "unitarity_defect",
    "verify_table",
]

__version__ = "0.1.0"
