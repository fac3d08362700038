"""Outlier screening of longitudinal biomarker sequences."""

from ._core import (
    InputError,
    StatisticalError,
    __version__,
    apply_transformation,
    calibrate,
    format_cell,
    ks_uniform,
    lambert_w0,
    run_cli,
    select_transformation,
    shapiro_wilk,
    t0_last,
    t1_max_outlier,
    t2_subsequence,
    t3_multivariate,
    t4_linear_model,
    tabulate,
)

__all__ = [
    "InputError",
    "StatisticalError",
    "__version__",
    "apply_transformation",
    "calibrate",
    "format_cell",
    "ks_uniform",
    "lambert_w0",
    "run_cli",
    "select_transformation",
    "shapiro_wilk",
    "t0_last",
    "t1_max_outlier",
    "t2_subsequence",
    "t3_multivariate",
    "t4_linear_model",
    "tabulate",
]
