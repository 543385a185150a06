"""Fourier solution of the magnetic differential equation on a flux surface.

Surface functions are expanded as

    u(theta, phi) = sum_{m, n} u_hat(m, n) exp(-i (n theta + m phi)),
    u_hat(m, n)   = mean over the surface of u exp(+i (n theta + m phi)),

so ``m`` counts toroidal (phi) and ``n`` poloidal (theta) periods. With this
convention the field-line derivative ``L = 2 pi (d_phi + iota d_theta)`` has the
symbol ``-2 pi i (m + iota n)``, and ``L w = V`` is solved mode by mode:

    w_hat(m, n) = (i / 2 pi) V_hat(m, n) / (m + iota n),     w_hat(0, 0) = 0.

Spectra keep the box |m|, |n| <= K. On a grid with N points along an angle
all modes are represented when N = 2K + 1; for even N the unpaired Nyquist
mode is dropped.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InvalidParameter, NotSolvable, SmallDivisor, WrongKind
from .field import TWO_PI, FieldModel
from .fluxgeom import spectral_derivative

RESONANCE_TOL = 1e-12


def default_cutoff(n_theta, n_phi):
    """Largest K whose box fits both angular grids without the Nyquist mode."""
    return min((n - 1) // 2 for n in (n_theta, n_phi))


@dataclass
class SurfaceSpectrum:
    """Coefficients ``coeffs[m + K, n + K]`` of one surface function."""

    psi: float
    K: int
    coeffs: np.ndarray

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=complex)
        if self.coeffs.shape != (2 * self.K + 1, 2 * self.K + 1):
            raise InvalidParameter(f"coefficients must have shape {(2 * self.K + 1,) * 2}")

    @classmethod
    def zeros(cls, K, psi=float("nan")):
        return cls(psi, K, np.zeros((2 * K + 1, 2 * K + 1), dtype=complex))

    @classmethod
    def single_mode(cls, K, m, n, amplitude=1.0, psi=float("nan"), real=True):
        """One mode, plus its conjugate partner when ``real`` (so the function is real)."""
        s = cls.zeros(K, psi)
        s[m, n] = amplitude
        if real and (m, n) != (0, 0):
            s[-m, -n] = np.conj(amplitude)
        return s

    def modes(self):
        k = np.arange(-self.K, self.K + 1)
        return np.meshgrid(k, k, indexing="ij")

    def __getitem__(self, mn):
        m, n = mn
        return self.coeffs[m + self.K, n + self.K]

    def __setitem__(self, mn, value):
        m, n = mn
        self.coeffs[m + self.K, n + self.K] = value

    def conjugate_defect(self):
        """max |u_hat(-m, -n) - conj(u_hat(m, n))|; zero for real functions."""
        return float(np.max(np.abs(self.coeffs[::-1, ::-1] - np.conj(self.coeffs))))

    def with_coeffs(self, coeffs):
        return SurfaceSpectrum(self.psi, self.K, coeffs)

    def to_csv(self, path):
        m, n = self.modes()
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["m", "n", "re", "im"])
            for mm, nn, c in zip(m.ravel(), n.ravel(), self.coeffs.ravel()):
                w.writerow([int(mm), int(nn), repr(float(c.real)), repr(float(c.imag))])
        return Path(path)


def forward_transform(values, psi=float("nan"), K=None) -> SurfaceSpectrum:
    """Spectrum of samples ``values[j_theta, j_phi]`` on the uniform periodic surface grid."""
    values = np.asarray(values)
    if values.ndim != 2:
        raise InvalidParameter("surface values must be a (n_theta, n_phi) array")
    n_theta, n_phi = values.shape
    K = default_cutoff(n_theta, n_phi) if K is None else int(K)
    if K > default_cutoff(n_theta, n_phi):
        raise InvalidParameter(f"cutoff K={K} is not resolved by a {values.shape} grid")
    full = np.fft.ifft2(values)  # mean of u exp(+i(n theta + m phi)) at [n, m]
    m, n = np.meshgrid(np.arange(-K, K + 1), np.arange(-K, K + 1), indexing="ij")
    return SurfaceSpectrum(psi, K, full[n % n_theta, m % n_phi])


def inverse_transform(spec: SurfaceSpectrum, shape=None, real=True):
    """Samples of the expansion on an (n_theta, n_phi) grid (default 2K + 1 per angle)."""
    n_theta, n_phi = shape if shape is not None else (2 * spec.K + 1,) * 2
    if spec.K > default_cutoff(n_theta, n_phi):
        raise InvalidParameter(f"a {(n_theta, n_phi)} grid cannot hold modes up to K={spec.K}")
    m, n = spec.modes()
    full = np.zeros((n_theta, n_phi), dtype=complex)
    full[n % n_theta, m % n_phi] = spec.coeffs
    values = np.fft.fft2(full)  # sum of u_hat exp(-i(n theta + m phi))
    return values.real if real else values


def _iota(field, psi):
    if getattr(field, "dim", None) != 3 or not hasattr(field, "iota"):
        raise WrongKind(f"{getattr(field, 'kind', type(field).__name__)}: "
                        "the field-line equation needs a toroidal field")
    return float(np.asarray(field.iota(psi), dtype=float))


def symbol(spec_or_K, iota):
    """-2 pi i (m + iota n) on the mode box."""
    K = spec_or_K.K if isinstance(spec_or_K, SurfaceSpectrum) else int(spec_or_K)
    k = np.arange(-K, K + 1)
    m, n = np.meshgrid(k, k, indexing="ij")
    return -2j * np.pi * (m + iota * n)


def apply_symbol(spec: SurfaceSpectrum, iota: float) -> SurfaceSpectrum:
    """Spectrum of 2 pi (d_phi + iota d_theta) u."""
    return spec.with_coeffs(symbol(spec, iota) * spec.coeffs)


def field_line_derivative(values, iota):
    """2 pi (d_phi + iota d_theta) of surface samples, by spectral differentiation."""
    values = np.asarray(values, dtype=float)
    return TWO_PI * (spectral_derivative(values, 1) + iota * spectral_derivative(values, 0))


def surface_weight(field: FieldModel, psi, n_theta, n_phi):
    """|J| |grad psi| sampled on the surface grid (J = B^phi)."""
    theta = np.arange(n_theta) * TWO_PI / n_theta
    phi = np.arange(n_phi) * TWO_PI / n_phi
    th, ph = np.meshgrid(theta, phi, indexing="ij")
    point = (np.full_like(th, psi), th, ph)
    metric = field.metric(point)
    J = field.unperturbed_B(point)[..., 2]
    return np.abs(J) * np.sqrt(metric.ginv[..., 0, 0])


def mde_rhs(field, psi, v: SurfaceSpectrum, weight=None) -> SurfaceSpectrum:
    """Spectrum of V = |J| |grad psi| v (or ``weight * v`` when a constant weight is given).

    The product is formed on a grid of 4K + 1 points per angle and truncated
    back to the box, so aliasing only enters beyond twice the cutoff.
    """
    if weight is not None:
        return v.with_coeffs(float(weight) * v.coeffs)
    n = 4 * v.K + 1
    w = surface_weight(field, psi, n, n)
    return forward_transform(w * inverse_transform(v, (n, n)), psi, v.K)


def solve_mde(field, psi, v: SurfaceSpectrum, weight=None, tol=RESONANCE_TOL) -> SurfaceSpectrum:
    """Solve 2 pi (d_phi + iota d_theta) w = V with V = |J| |grad psi| v on the surface psi.

    ``weight`` replaces |J| |grad psi| by a constant (the model problem with
    J |grad psi| = 1). Raises :class:`NotSolvable` when V has nonzero mean and
    :class:`SmallDivisor` when a mode with |m + iota n| < ``tol`` carries data.
    """
    iota = _iota(field, psi)
    V = mde_rhs(field, psi, v, weight)
    scale = max(1.0, float(np.max(np.abs(V.coeffs))))
    if abs(V[0, 0]) > tol * scale:
        raise NotSolvable(f"V has nonzero mean (|V_hat(0, 0)| = {abs(V[0, 0]):.3e}); the equation has no periodic solution")
    m, n = V.modes()
    div = m + iota * n
    resonant = (np.abs(div) < tol) & ((m != 0) | (n != 0)) & (np.abs(V.coeffs) > tol * scale)
    if np.any(resonant):
        mm, nn = m[resonant], n[resonant]
        # report the lowest offending mode, written with m > 0 (or m = 0, n > 0)
        order = np.lexsort((np.abs(nn), np.abs(mm), mm**2 + nn**2))
        a, b = int(mm[order[0]]), int(nn[order[0]])
        if a < 0 or (a == 0 and b < 0):
            a, b = -a, -b
        raise SmallDivisor((a, b), float(abs(div[resonant][order[0]])))
    w = np.zeros_like(V.coeffs)
    ok = np.abs(div) >= tol
    w[ok] = (1j / TWO_PI) * V.coeffs[ok] / div[ok]
    w[V.K, V.K] = 0.0
    return SurfaceSpectrum(float(psi), V.K, w)


def sobolev_norm(spec: SurfaceSpectrum, gamma: float) -> float:
    """Homogeneous norm sqrt(sum_{k != 0} |k|^(2 gamma) |u_hat(k)|^2)."""
    m, n = spec.modes()
    k2 = (m**2 + n**2).astype(float)
    k2[spec.K, spec.K] = 1.0
    weights = k2 ** float(gamma)
    weights[spec.K, spec.K] = 0.0
    return float(np.sqrt(np.sum(weights * np.abs(spec.coeffs) ** 2)))
