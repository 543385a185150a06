"""Strongly anisotropic heat conduction in fibered magnetic fields.

Modules: :mod:`~fiberheat.field` (field catalog), :mod:`~fiberheat.fluxgeom`
(grids and co-area quadrature), :mod:`~fiberheat.effective` (homogenised
profile), :mod:`~fiberheat.solver` (finite-volume operator and PCG),
:mod:`~fiberheat.ergodic` (Diophantine sets), :mod:`~fiberheat.mde`
(field-line equation on a surface), :mod:`~fiberheat.analysis` (norms and
rates) and :mod:`~fiberheat.cli` (experiments).
"""

__version__ = "0.1.0"

from .analysis import aniso_norm, error_report, fit_rate, noninteg_volume, resonant_surface_diagnostic
from .effective import compatibility_residual, effective_profile
from .ergodic import IotaProfile, check_ergodicity_condition, ergodicity_constant, excluded_intervals
from .field import eval_contravariant_B, eval_diffusion_tensor, make_field, rotational_transform
from .fluxgeom import FluxGrid, ScalarField, gamma_derivative_residual, surface_integral, volume_integral
from .mde import forward_transform, inverse_transform, sobolev_norm, solve_mde
from .solver import assemble, solve_temperature

__all__ = [
    "FluxGrid", "IotaProfile", "ScalarField", "aniso_norm", "assemble",
    "check_ergodicity_condition", "compatibility_residual", "effective_profile",
    "ergodicity_constant", "error_report", "eval_contravariant_B", "eval_diffusion_tensor",
    "excluded_intervals", "fit_rate", "forward_transform", "gamma_derivative_residual",
    "inverse_transform", "make_field", "noninteg_volume", "resonant_surface_diagnostic",
    "rotational_transform", "sobolev_norm", "solve_mde", "solve_temperature",
    "surface_integral", "volume_integral",
]
