"""Homogenised temperature profile Theta(psi).

Theta solves the one-dimensional problem d/dpsi(Gamma Theta') = 0 with
Theta(psi_-) = T_minus and Theta(psi_+) = T_plus, where
Gamma(psi) = int_{S_psi} |grad psi| dH. Its closed form is

    Theta = T_minus + (T_plus - T_minus) H(psi) / H(psi_+),   H(psi) = int_{psi_-}^{psi} ds / Gamma(s),

and that is what is evaluated here (cumulative trapezoid for H).
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.integrate import cumulative_trapezoid
from scipy.interpolate import PchipInterpolator

from .errors import DegenerateGamma, GridMismatch, WrongKind
from .field import TWO_PI, FieldModel
from .fluxgeom import FluxGrid, surface_integrals
from .solver import node_tensor
from ._stencil import CornerStencil


@dataclass(frozen=True)
class EffectiveProfile:
    psi_nodes: np.ndarray
    gamma: np.ndarray
    H: np.ndarray
    theta_values: np.ndarray
    T_minus: float
    T_plus: float

    def theta(self, psi):
        """Theta at arbitrary psi (monotone cubic through the nodal values)."""
        if self.T_minus == self.T_plus:
            return np.full(np.shape(psi), float(self.T_minus))
        return PchipInterpolator(self.psi_nodes, self.theta_values, extrapolate=False)(psi)

    def dtheta(self):
        """Theta' at the nodes from the closed form (T_+ - T_-) / (H(psi_+) Gamma)."""
        return (self.T_plus - self.T_minus) / (self.H[-1] * self.gamma)

    def ode_residual(self):
        """d/dpsi(Gamma Theta') at interior nodes, in conservative three-point form.

        Half-node fluxes use the arithmetic mean of Gamma, so the residual is a
        second-order consistency measure of the nodal profile.
        """
        h = np.diff(self.psi_nodes)
        flux = 0.5 * (self.gamma[1:] + self.gamma[:-1]) * np.diff(self.theta_values) / h
        return np.diff(flux) / (0.5 * (h[1:] + h[:-1]))

    def heat_flux(self):
        """Total flux Gamma Theta', constant in psi (the effective conductance times the drop)."""
        return (self.T_plus - self.T_minus) / self.H[-1]

    def on_grid(self, grid: FluxGrid):
        """T_0 = Theta(psi) broadcast to every node of ``grid``."""
        if not np.array_equal(grid.psi_nodes, self.psi_nodes):
            raise GridMismatch("profile and grid use different psi nodes")
        shape = (-1,) + (1,) * (grid.dim - 1)
        return np.broadcast_to(self.theta_values.reshape(shape), grid.shape).copy()

    def to_csv(self, path):
        data = np.column_stack([self.psi_nodes, self.gamma, self.H, self.theta_values])
        np.savetxt(path, data, delimiter=",", header="psi,gamma,H,theta", comments="", fmt="%.17g")
        return Path(path)


def effective_profile(field: FieldModel, grid: FluxGrid, T_minus: float, T_plus: float) -> EffectiveProfile:
    if grid.field != field:
        raise GridMismatch("grid was built for a different field")
    if not (np.isfinite(T_minus) and np.isfinite(T_plus)):
        raise ValueError("boundary temperatures must be finite")
    gamma = surface_integrals(grid, grid.grad_psi)
    if np.any(~np.isfinite(gamma)) or np.min(gamma) <= 0.0:
        raise DegenerateGamma(f"Gamma(psi) is not positive (min {np.min(gamma):.3e})")
    psi = np.asarray(grid.psi_nodes)
    H = cumulative_trapezoid(1.0 / gamma, psi, initial=0.0)
    theta = T_minus + (T_plus - T_minus) * (H / H[-1])
    theta[0], theta[-1] = T_minus, T_plus
    return EffectiveProfile(psi.copy(), gamma, H, theta, float(T_minus), float(T_plus))


def compatibility_residual(profile: EffectiveProfile, field: FieldModel, grid: FluxGrid) -> np.ndarray:
    """int_{S_psi} Delta T_0 / |grad psi| dH on the interior surfaces.

    Delta is the eps = 1 (Laplace-Beltrami) operator of the solver's stencil,
    applied matrix-free so constants map to zero exactly. The nodal value of
    ``-A T_0`` is sqrt(g) Delta T_0 times the node's control volume, so summing
    over a surface and dividing by h_psi gives the surface integral.
    """
    if grid.field != field:
        raise GridMismatch("grid was built for a different field")
    T0 = profile.on_grid(grid)
    if profile.T_minus == profile.T_plus:
        return np.zeros(grid.n_psi - 2)
    st = CornerStencil(grid)
    AT = st.apply(T0, node_tensor(field, grid, 1.0))
    per_surface = AT.reshape(grid.n_psi, -1).sum(axis=1)
    return -per_surface[1:-1] / grid.h_psi


def circulation(field: FieldModel, psi: float, n_theta: int = 256) -> float:
    """Line integral of B along the level set S_psi of a planar field (periodic trapezoid)."""
    if field.dim != 2:
        raise WrongKind("circulation is defined for planar fields")
    theta = np.arange(n_theta) * TWO_PI / n_theta
    point = (np.full_like(theta, psi), theta)
    metric = field.metric(point)
    B = field.contravariant_B(point)
    B_theta = np.einsum("...j,...j->...", metric.g[..., 1, :], B)
    return float(abs(np.sum(B_theta)) * TWO_PI / n_theta)
