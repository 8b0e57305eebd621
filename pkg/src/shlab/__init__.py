"""Numerical laboratory for the supercritical semilinear heat equation u_t = laplace(u) + u^p."""

from .exponents import (
    ExponentSet,
    HardyBranch,
    ProblemParams,
    compute_exponents,
    envelope_max,
    hardy_admissible,
)
from .nonlinear import InitialDataSpec, nonlinear_defect
from .radial_pde import EvolutionConfig, LogGrid, RadialField
from .steady_states import integrate_psi1, psi_k, v_infinity

__version__ = "0.1.0"

__all__ = [
    "ExponentSet",
    "HardyBranch",
    "ProblemParams",
    "compute_exponents",
    "envelope_max",
    "hardy_admissible",
    "InitialDataSpec",
    "nonlinear_defect",
    "EvolutionConfig",
    "LogGrid",
    "RadialField",
    "integrate_psi1",
    "psi_k",
    "v_infinity",
    "__version__",
]
