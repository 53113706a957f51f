"""Finite-blocklength sum-rate optimization for rate-splitting downlinks.

Thin re-export of the compiled core; see the C++ headers for the full
documentation of each type.
"""

from ._core import (  # noqa: F401
    BestOfReport,
    ChannelSet,
    FblParams,
    FeasibilityCheck,
    Outcome,
    PowerBudget,
    Precoders,
    RateBreakdown,
    ScaResult,
    ScenarioConfig,
    SchemeBlers,
    SchemeKind,
    SolveOptions,
    SubSolution,
    SummaryRow,
    SweepRecord,
    aggregate,
    candidates_for,
    config_template,
    default_qos_bits,
    dispersion,
    dispersion_penalty,
    evaluate_solution,
    fbl_rate,
    load_config,
    load_config_file,
    per_scheme_params,
    q_function,
    q_inverse,
    random_channels,
    read_records_csv_file,
    run_sweep,
    sca_solve,
    sinr_common,
    sinr_private,
    solve_best,
    structured_channels_overloaded,
    structured_channels_underloaded,
    template_names,
    verify_exact_feasibility,
    write_csv_file,
    write_summary_csv_file,
)

__all__ = [name for name in dir() if not name.startswith("_")]
