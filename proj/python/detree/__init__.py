"""Density estimation trees: growth, pruning, kernel cross-validation and analysis helpers."""

from ._detree import (  # noqa: F401
    Bandwidths,
    Box,
    ConfigError,
    DataError,
    DataTable,
    DensityTree,
    DetreeError,
    KdeModel,
    NumericError,
    PruneProfile,
    SmearedModel,
    StopCondition,
    Triangulation,
    UsageError,
    apply_alpha,
    delta_log_likelihood,
    grow,
    integrate_region,
    interpolate,
    load_csv,
    optimize_selection,
    overlap_integral,
    prune_sequence,
    quality_kernel,
    silverman_bandwidths,
    synthetic,
    synthetic_presets,
    train,
    triangulate,
)

__version__ = "0.1.0"
