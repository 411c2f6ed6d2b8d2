"""Jordan-chain resonance states: evolution, density operators, line shapes, pole fits."""

from ._core import (
    ComplexPole,
    FitOptions,
    FitResult,
    GamowError,
    ModelPole,
    PoleModel,
    binomial,
    build_density,
    check_exponential,
    evolution_matrix,
    evolve_density,
    evolve_ket,
    evolve_state,
    expm_oracle,
    exponential_subspace,
    fit_poles,
    hamiltonian_matrix,
    higher_order_lineshape,
    lorentzian,
    lorentzian_derivative,
    model_intensity,
    pole_position,
    pole_term,
    projection_residual,
    select_order,
)

__all__ = [name for name in dir() if not name.startswith("_")]
