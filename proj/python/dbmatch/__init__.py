"""Database matching under random column repetitions.

Core pipeline: generate a database of Markov rows, shuffle its rows, pass it
through the column-repetition channel, recover the repetition pattern from
column histograms, reduce replicas, match rows back, and score the result.
Capacity routines give the information-theoretic threshold the empirical error
curves are compared against.
"""

from __future__ import annotations

import json as _json

from ._core import (
    DEFAULT_MEMORY_BUDGET,
    ERASED,
    STAGE_DATABASE,
    STAGE_PATTERN,
    STAGE_PERMUTATION,
    UNMATCHED,
    CapacityResult,
    CapacityRow,
    CellSummary,
    CollisionCell,
    Database,
    DetectedPattern,
    DetectionStatus,
    DimensionOverflow,
    Error,
    ExperimentConfig,
    ExperimentResult,
    GammaOutOfRange,
    HistogramVector,
    InvalidDelta,
    InvalidDistribution,
    InvalidEpsilon,
    IoError,
    MarkovParams,
    MatchMethod,
    MatchResult,
    MatcherConfig,
    OutputPaths,
    ParseError,
    PatternMismatch,
    PatternSource,
    Permutation,
    ReducedDatabase,
    RepetitionDistribution,
    RepetitionPattern,
    RowCountMismatch,
    SizeMismatch,
    SymbolOutOfRange,
    TrialRecord,
    ValidationError,
    WidthMismatch,
    WilsonInterval,
    apply_permutation,
    apply_repetitions,
    capacity_table,
    collapse,
    collision_probe,
    column_histograms,
    conditional_entropy_rate,
    database_from_array,
    derive_seed,
    detect_pattern,
    evaluate,
    evaluate_errors,
    gamma_lower_bound,
    generate_database,
    has_duplicate_counts,
    iid_capacity,
    load_config,
    load_database,
    match_consistency,
    match_typicality,
    matching_capacity,
    parse_config,
    pattern_from_json,
    pattern_to_json,
    reduce,
    reduced_from_array,
    run_experiment,
    run_trial,
    sample_pattern,
    sample_permutation,
    save_database,
    shannon_entropy_bits,
    summary_csv_text,
    transition_power,
    trials_jsonl_text,
    validate_params,
    validate_repetition,
    wilson_interval,
    write_outputs,
)

__version__ = "0.1.0"


def config_from_dict(config: dict) -> ExperimentConfig:
    """Build a validated experiment config from a plain dict.

    The dict uses the same schema as the JSON config files consumed by the
    command-line tool.
    """
    return parse_config(_json.dumps(config))


__all__ = [
    "DEFAULT_MEMORY_BUDGET",
    "ERASED",
    "STAGE_DATABASE",
    "STAGE_PATTERN",
    "STAGE_PERMUTATION",
    "UNMATCHED",
    "CapacityResult",
    "CapacityRow",
    "CellSummary",
    "CollisionCell",
    "Database",
    "DetectedPattern",
    "DetectionStatus",
    "DimensionOverflow",
    "Error",
    "ExperimentConfig",
    "ExperimentResult",
    "GammaOutOfRange",
    "HistogramVector",
    "InvalidDelta",
    "InvalidDistribution",
    "InvalidEpsilon",
    "IoError",
    "MarkovParams",
    "MatchMethod",
    "MatchResult",
    "MatcherConfig",
    "OutputPaths",
    "ParseError",
    "PatternMismatch",
    "PatternSource",
    "Permutation",
    "ReducedDatabase",
    "RepetitionDistribution",
    "RepetitionPattern",
    "RowCountMismatch",
    "SizeMismatch",
    "SymbolOutOfRange",
    "TrialRecord",
    "ValidationError",
    "WidthMismatch",
    "WilsonInterval",
    "apply_permutation",
    "apply_repetitions",
    "capacity_table",
    "collapse",
    "collision_probe",
    "column_histograms",
    "conditional_entropy_rate",
    "config_from_dict",
    "database_from_array",
    "derive_seed",
    "detect_pattern",
    "evaluate",
    "evaluate_errors",
    "gamma_lower_bound",
    "generate_database",
    "has_duplicate_counts",
    "iid_capacity",
    "load_config",
    "load_database",
    "match_consistency",
    "match_typicality",
    "matching_capacity",
    "parse_config",
    "pattern_from_json",
    "pattern_to_json",
    "reduce",
    "reduced_from_array",
    "run_experiment",
    "run_trial",
    "sample_pattern",
    "sample_permutation",
    "save_database",
    "shannon_entropy_bits",
    "summary_csv_text",
    "transition_power",
    "trials_jsonl_text",
    "validate_params",
    "validate_repetition",
    "wilson_interval",
    "write_outputs",
]
