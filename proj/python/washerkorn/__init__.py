"""Korn constants, inequality audits and buckling loads for thin washers."""

from ._washerkorn import (
    DomainError,
    Error,
    HypothesisViolation,
    InvalidArgument,
    NonFiniteError,
    SolverError,
    ansatz_norms,
    assemble_forms,
    audit,
    calibrate,
    critical_load,
    fit_exponent,
    inequalities,
    korn15_constant,
    korn_constant,
    min_rayleigh,
    stress_test,
    sweep,
)

__all__ = [
    "DomainError",
    "Error",
    "HypothesisViolation",
    "InvalidArgument",
    "NonFiniteError",
    "SolverError",
    "ansatz_norms",
    "assemble_forms",
    "audit",
    "calibrate",
    "critical_load",
    "fit_exponent",
    "inequalities",
    "korn15_constant",
    "korn_constant",
    "min_rayleigh",
    "stress_test",
    "sweep",
]
