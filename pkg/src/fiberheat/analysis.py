"""Error norms, anisotropic norms, non-integrability volume and rate fits.

Gradient norms use the solver's corner gradients: on every cell corner the
one-sided edge differences give the covariant gradient, and corner values are
integrated with the same weights ``w sqrt(g)`` the operator is built from.
With these weights ``rho^T A rho`` at eps = 1 is exactly ``||grad rho||^2``,
and the L2 part coincides with the node trapezoid rule of ``volume_integral``.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy.stats import linregress

from ._stencil import CornerStencil
from .effective import EffectiveProfile
from .errors import GridMismatch, NonPositiveData, WrongDimension
from .field import FieldModel
from .fluxgeom import FluxGrid, ScalarField, spectral_derivative, surface_integrals, volume_integral
from .mde import forward_transform, sobolev_norm

REPORT_COLUMNS = ("eps", "n_psi", "n_theta", "n_phi", "L2_rho", "Hb_rho", "Hperp_rho",
                  "grad_rho", "H1_rho", "Hb0_rho", "Hperp0_rho", "noninteg_volume")


@dataclass
class ErrorReport:
    eps: float
    n_psi: int
    n_theta: int
    n_phi: int
    L2_rho: float
    Hb_rho: float
    Hperp_rho: float
    grad_rho: float
    H1_rho: float
    noninteg_volume: float
    Hb0_rho: float | None = None
    Hperp0_rho: float | None = None

    def row(self):
        d = asdict(self)
        return [d[c] for c in REPORT_COLUMNS]


def _check_same_grid(f: ScalarField, grid: FluxGrid):
    if not grid.same_as(f.grid):
        raise GridMismatch("scalar field lives on a different grid")


def _unit(grid, B):
    mod = np.sqrt(np.einsum("...i,...ij,...j->...", B, grid.g, B))
    return B / mod[..., None]


def directional_norms(grid: FluxGrid, rho, b):
    """(||b . grad rho||, ||grad rho - b (b . grad rho)||, ||grad rho||) by corner quadrature.

    ``b`` is a unit contravariant field sampled at the nodes.
    """
    st = CornerStencil(grid)
    grads = st.corner_gradients(np.asarray(rho, dtype=float))
    par = perp = full = 0.0
    for c in st.offsets:
        gcov = np.stack(grads[c], axis=-1)
        bc = st.take(b, c)
        ginv = st.take(grid.ginv, c)
        gmet = st.take(grid.g, c)
        w = st.weight * st.take(grid.sqrt_g, c)
        db = np.einsum("...i,...i->...", bc, gcov)
        up = np.einsum("...ij,...j->...i", ginv, gcov)
        v = up - bc * db[..., None]
        par += np.sum(w * db**2)
        perp += np.sum(w * np.einsum("...i,...ij,...j->...", v, gmet, v))
        full += np.sum(w * np.einsum("...i,...i->...", up, gcov))
    return float(np.sqrt(par)), float(np.sqrt(max(perp, 0.0))), float(np.sqrt(full))


def error_report(T_eps: ScalarField, profile: EffectiveProfile, field: FieldModel,
                 grid: FluxGrid, eps: float) -> ErrorReport:
    """Norms of rho = T_eps - Theta(psi)."""
    _check_same_grid(T_eps, grid)
    if grid.field != field:
        raise GridMismatch("grid was built for a different field")
    rho = T_eps.values - profile.on_grid(grid)
    b, _ = field.unit_vectors(grid.coords, eps, grid.metric)
    Hb, Hperp, grad = directional_norms(grid, rho, b)
    L2 = float(np.sqrt(volume_integral(grid, rho**2)))
    report = ErrorReport(
        float(eps), grid.n_psi, grid.n_theta, grid.n_phi,
        L2, Hb, Hperp, grad, float(np.hypot(L2, grad)),
        noninteg_volume(T_eps, field, grid, eps),
    )
    if field.kind == "TorusPerturbed":
        b0 = _unit(grid, field.unperturbed_B(grid.coords))
        report.Hb0_rho, report.Hperp0_rho, _ = directional_norms(grid, rho, b0)
    return report


def nodal_gradient(grid: FluxGrid, u):
    """Covariant gradient at the nodes: centred second-order in psi, spectral in the angles."""
    u = np.asarray(u, dtype=float)
    parts = [np.gradient(u, grid.h_psi, axis=0, edge_order=2)]
    parts += [spectral_derivative(u, a) for a in range(1, grid.dim)]
    return np.stack(parts, axis=-1)


def _parallel_perp(T: ScalarField, field: FieldModel, grid: FluxGrid, eps: float):
    _check_same_grid(T, grid)
    b, _ = field.unit_vectors(grid.coords, eps, grid.metric)
    gcov = nodal_gradient(grid, T.values)
    db = np.einsum("...i,...i->...", b, gcov)
    full = np.einsum("...i,...ij,...j->...", gcov, grid.ginv, gcov)
    return db**2, np.maximum(full - db**2, 0.0)


def noninteg_mask(T: ScalarField, field: FieldModel, grid: FluxGrid, eps: float):
    """Nodes where |grad_b T|^2 >= eps |grad_perp T|^2."""
    par, perp = _parallel_perp(T, field, grid, eps)
    return par >= eps * perp


def max_noninteg_ratio(T: ScalarField, field: FieldModel, grid: FluxGrid, eps: float) -> float:
    """max over nodes of |grad_b T|^2 / (eps |grad_perp T|^2); the indicator fires where it is >= 1."""
    par, perp = _parallel_perp(T, field, grid, eps)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(perp > 0, par / (eps * perp), np.where(par > 0, np.inf, 0.0))
    return float(np.max(ratio))


def noninteg_volume(T: ScalarField, field: FieldModel, grid: FluxGrid, eps: float) -> float:
    """Measure of the set where parallel conduction dominates eps-weighted perpendicular conduction.

    Node-wise indicator integrated with the node quadrature weights; the set
    measure is therefore first-order accurate in the grid spacing.
    """
    mask = noninteg_mask(T, field, grid, eps)
    return float(np.sum(grid.node_weights()[mask]))


def aniso_norm(f: ScalarField, gamma: float) -> float:
    """sqrt of int dpsi ||f(psi, .)||^2 in the homogeneous H^gamma of each surface."""
    grid = f.grid
    if grid.dim != 3:
        raise WrongDimension("anisotropic surface norms need a toroidal (3D) grid")
    per_surface = np.array([
        sobolev_norm(forward_transform(f.values[k], grid.psi_nodes[k]), gamma) ** 2
        for k in range(grid.n_psi)
    ])
    return float(np.sqrt(np.dot(grid.psi_weights, per_surface)))


def fit_rate(eps_list, err_list):
    """Least-squares line through (log eps, log err): returns (slope, intercept, r^2)."""
    x = np.asarray(eps_list, dtype=float)
    y = np.asarray(err_list, dtype=float)
    if x.shape != y.shape or x.size < 3:
        raise NonPositiveData("need at least three (eps, err) pairs")
    if np.any(~np.isfinite(x)) or np.any(~np.isfinite(y)) or np.any(x <= 0) or np.any(y <= 0):
        raise NonPositiveData("rate fits need finite, strictly positive data")
    fit = linregress(np.log(x), np.log(y))
    return float(fit.slope), float(fit.intercept), float(fit.rvalue**2)


@dataclass
class SurfaceDiagnostic:
    psi: np.ndarray
    iota: np.ndarray
    mean_abs_rho: np.ndarray
    diophantine: np.ndarray  # True where the truncated condition holds

    def rows(self):
        return list(zip(self.psi.tolist(), self.iota.tolist(),
                        self.mean_abs_rho.tolist(), self.diophantine.tolist()))


def diophantine_flags(iota_values, gamma, K, M):
    """Truncated Diophantine test |m + iota n| >= 1 / (M |(m, n)|^gamma) for |m|, |n| <= K."""
    k = np.arange(-K, K + 1)
    m, n = np.meshgrid(k, k, indexing="ij")
    keep = (m != 0) | (n != 0)
    m, n = m[keep], n[keep]
    thresh = 1.0 / (M * np.hypot(m, n) ** gamma)
    iota_values = np.atleast_1d(np.asarray(iota_values, dtype=float))
    return np.array([np.all(np.abs(m + i * n) >= thresh) for i in iota_values])


def resonant_surface_diagnostic(rho: ScalarField, field: FieldModel, grid: FluxGrid,
                                gamma: float, K: int, M: float = 100.0) -> SurfaceDiagnostic:
    """Area-weighted mean |rho| on each psi surface next to that surface's Diophantine flag."""
    _check_same_grid(rho, grid)
    area = surface_integrals(grid, np.ones(grid.shape))
    mean_abs = surface_integrals(grid, np.abs(rho.values)) / area
    iota = np.asarray(field.iota(grid.psi_nodes), dtype=float)
    return SurfaceDiagnostic(np.asarray(grid.psi_nodes).copy(), iota, mean_abs,
                             diophantine_flags(iota, gamma, K, M))
