"""Python access to the mfilm thin-film bifurcation toolkit."""

from ._mfilm import (
    BranchError,
    ConnectionNotFound,
    DegenerateEigenvalueError,
    DomainError,
    ExtractionError,
    PropertyViolation,
    RangeError,
    ReducedParams,
    SimulationAbort,
    UsageError,
    acceptance_ids,
    beta_on_curve,
    coefficients,
    critical_point,
    dispersion_coeffs,
    fixed_points,
    growth_rates,
    heteroclinic,
    hex_regime,
    kappa,
    pattern_field,
    reduced_rhs,
    simulate,
    square_regime,
)

__version__ = "0.1.0"
