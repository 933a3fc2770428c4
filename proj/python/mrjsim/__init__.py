"""Multiresource-job queue simulator and stability toolkit."""

from ._core import (
    ConfigError,
    ConstructionInfeasible,
    Distribution,
    EnumerationTooLarge,
    Error,
    MassOverflow,
    NoStableK,
    NotStabilizable,
    TraceError,
    arrival_rates,
    candidate_set,
    construction_delta,
    is_feasible,
    job_type,
    known_stability_boundary,
    lipschitz_sup_bound,
    max_dominance,
    nearest_rank_quantile,
    normalize_trace,
    parse_trace,
    run_experiment,
    select_k_2b,
    select_k_2j,
    select_k_2j_lipschitz,
    simulate,
    type_coords,
)

__all__ = [name for name in dir() if not name.startswith("_")]
