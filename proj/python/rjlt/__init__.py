"""Python access to the rjlt library."""

from ._core import (
    ConfigError,
    DataError,
    NumericalError,
    dependence_test,
    estimate,
    f_cov_u,
    f_cov_v,
    run_table1,
    simulate,
    u_async,
)

__all__ = [
    "ConfigError",
    "DataError",
    "NumericalError",
    "dependence_test",
    "estimate",
    "f_cov_u",
    "f_cov_v",
    "run_table1",
    "simulate",
    "u_async",
]
