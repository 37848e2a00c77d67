"""Python access to the qsf simulation core."""

from ._core import (
    ApproximationError,
    ArgumentError,
    CapacityError,
    DensityMatrix,
    Mode,
    ParseError,
    PolySpec,
    QsfError,
    SearchError,
    ValidationError,
    entropy_taylor_spec,
    estimate_entropy,
    estimate_fidelity,
    estimate_poly,
    expectation_x_full,
    fidelity_exact,
    max_eigenvalue,
    poly_function_exact,
    random_state,
    run_cli,
    shots_for,
    sqrt_taylor_spec,
    step_poly_spec,
    trace_power,
    von_neumann_entropy,
)

__all__ = [name for name in dir() if not name.startswith("_")]
