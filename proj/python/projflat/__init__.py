"""Numerical checks for projectively flat (alpha, beta)-metrics of constant flag curvature."""

import json

from ._core import (
    ConfigError,
    ConstraintViolation,
    ConvergenceError,
    DomainError,
    Error,
    InvalidParameter,
    Metric,
    NotProjectivelyFlatError,
    Phi,
    SingularMatrixError,
    default_tolerances,
    engine_version,
    eta_metric,
    explain,
    flat_parallel_metric,
    list_suites,
    run_suite_json,
    ode_residual,
    randers_klein,
    schema_version,
    series_closed_form,
    series_coefficients,
    square_klein,
)


def verify(suite, *, tol=None, **options):
    """Run a suite and return the report as a dict.

    Keyword options are config keys (dim, samples, seed, m, k, box, ...);
    ``tol`` maps tolerance classes to values.
    """
    config = dict(options, suite=suite)
    if tol:
        config["tol"] = dict(tol)
    return json.loads(run_suite_json(json.dumps(config)))


__all__ = [name for name in dir() if not name.startswith("_") and name != "json"]
