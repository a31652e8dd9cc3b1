"""Exact one-sided matching mechanisms and equilibrium tooling.

Thin wrapper over the compiled core. Exact rationals cross the boundary as
strings like ``"3/4"``; use :func:`exact` to lift results into
:class:`fractions.Fraction` values. Agents and items are 0-based.
"""

from fractions import Fraction

from ._core import (
    Error,
    audit,
    best_response_dynamics,
    check_envy_free,
    check_safe_strategy,
    construct,
    enumerate_nash,
    naive_max_welfare,
    no_regret,
    optimal_matching,
    ps,
    ps_bounds_suite,
    random_dictatorial,
    random_priority,
    random_priority_sampled,
    run,
    serial_dictatorship,
    social_welfare,
    verify_nash,
)

__all__ = [
    "Error",
    "audit",
    "best_response_dynamics",
    "check_envy_free",
    "check_safe_strategy",
    "construct",
    "enumerate_nash",
    "exact",
    "naive_max_welfare",
    "no_regret",
    "optimal_matching",
    "ps",
    "ps_bounds_suite",
    "random_dictatorial",
    "random_priority",
    "random_priority_sampled",
    "run",
    "serial_dictatorship",
    "social_welfare",
    "verify_nash",
]


def exact(value):
    """Recursively turn rational strings from the core into Fractions."""
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, list):
        return [exact(v) for v in value]
    if isinstance(value, dict):
        return {k: exact(v) for k, v in value.items()}
    return value
