"""Catalog of fibered and nearly integrable magnetic fields in flux coordinates.

Every model is given directly in straight-field-line coordinates ``(psi, theta)``
(2D) or ``(psi, theta, phi)`` (3D) together with a closed-form embedding into
Cartesian space. All evaluation methods are vectorised: coordinates are arrays
that broadcast against each other, and tensor results carry the component axes
last.

Parameter schema accepted by :func:`make_field` (``kind`` plus keywords):

``Annulus2D``
    ``r_inner`` (1.0), ``r_outer`` (2.0), ``label`` ("radius" -> psi = r,
    "half_square" -> psi = r**2 / 2; psi_range follows the label).
``Channel2D``
    ``delta`` (0.15). psi = y + delta sin(2 pi x) y (1 - y) on the periodic strip
    [0, 1) x [0, 1]; theta = 2 pi x.
``TorusIntegrable``
    ``major_radius`` (3.0), ``psi_min`` (0.5), ``psi_max`` (1.5),
    ``iota`` (polynomial coefficients in psi, lowest order first; default
    ``[0, 1]`` i.e. iota = psi). psi is the minor radius of a circular torus.
``TorusPerturbed``
    everything from ``TorusIntegrable`` plus ``amplitude`` (0.1),
    ``a_exponent`` (0.5), ``harmonics`` (list of ``(p, q, weight)``, default
    ``[(2, 1, 1.0)]`` for sin(2 theta - phi)) and ``envelope`` ("shell" ->
    (psi - psi_min)(psi_max - psi), "psi" -> psi (psi_max - psi)).
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.polynomial import Polynomial

from .errors import (
    BoundaryViolation,
    DegenerateMetric,
    InvalidParameter,
    NullPoint,
    OutOfDomain,
    PerturbationTooLarge,
    WrongKind,
    ZeroField,
)

KINDS = ("Annulus2D", "Channel2D", "TorusIntegrable", "TorusPerturbed")
SAMPLE_POINTS = 64
TWO_PI = 2.0 * np.pi


class Metric(NamedTuple):
    sqrt_g: np.ndarray  # |det d(x)/d(q)|
    g: np.ndarray       # covariant g_ij, (..., d, d)
    ginv: np.ndarray    # contravariant g^ij, (..., d, d)
    orientation: np.ndarray  # sign of det d(x)/d(q)


def _stack_matrix(rows):
    return np.stack([np.stack(r, axis=-1) for r in rows], axis=-2)


@dataclass(frozen=True)
class FieldModel:
    """Base class. Subclasses provide the geometry and the contravariant field."""

    psi_range: tuple[float, float]

    kind = "abstract"
    dim = 0

    # -- domain --------------------------------------------------------------
    def check_domain(self, psi):
        lo, hi = self.psi_range
        slack = 1e-12 * (hi - lo)
        psi = np.asarray(psi, dtype=float)
        if np.any(psi < lo - slack) or np.any(psi > hi + slack):
            raise OutOfDomain(f"psi outside [{lo}, {hi}]")
        return psi

    def _coords(self, point):
        if len(point) != self.dim:
            raise OutOfDomain(f"{self.kind} expects {self.dim} flux coordinates, got {len(point)}")
        arrays = np.broadcast_arrays(*[np.asarray(c, dtype=float) for c in point])
        self.check_domain(arrays[0])
        return arrays

    # -- geometry (implemented by subclasses) -------------------------------
    def embedding(self, point):
        raise NotImplementedError

    def jacobian(self, point):
        """d(cartesian)/d(flux coordinates), shape (..., dim, dim)."""
        raise NotImplementedError

    def metric(self, point) -> Metric:
        raise NotImplementedError

    def grad_psi_norm(self, point):
        return np.sqrt(self.metric(point).ginv[..., 0, 0])

    # -- field ---------------------------------------------------------------
    def contravariant_B(self, point, eps=0.0):
        raise NotImplementedError

    def unperturbed_B(self, point):
        return self.contravariant_B(point, 0.0)

    def field_strength(self, point, eps=0.0, metric=None):
        metric = self.metric(point) if metric is None else metric
        B = self.contravariant_B(point, eps)
        return np.sqrt(np.einsum("...i,...ij,...j->...", B, metric.g, B))

    def unit_vectors(self, point, eps=0.0, metric=None):
        """Return ``(b, b0)`` with b = B/|B| and b0 = B0/|B| (same normaliser)."""
        metric = self.metric(point) if metric is None else metric
        B = self.contravariant_B(point, eps)
        mod = np.sqrt(np.einsum("...i,...ij,...j->...", B, metric.g, B))
        if np.any(mod <= 0.0):
            raise ZeroField(f"|B| = 0 somewhere in {self.kind}")
        B0 = self.unperturbed_B(point)
        return B / mod[..., None], B0 / mod[..., None]

    def cartesian_B(self, point, eps=0.0):
        jac = self.jacobian(point)
        return np.einsum("...ai,...i->...a", jac, self.contravariant_B(point, eps))

    # -- rotational transform (3D only) -------------------------------------
    def iota(self, psi):
        raise WrongKind(f"{self.kind} has no rotational transform")

    def iota_prime(self, psi):
        raise WrongKind(f"{self.kind} has no rotational transform")

    def chi0(self, psi):
        raise WrongKind(f"{self.kind} has no rotational transform")

    # -- validation ----------------------------------------------------------
    def sample_lattice(self, n=SAMPLE_POINTS):
        lo, hi = self.psi_range
        axes = [np.linspace(lo, hi, n)] + [np.arange(n) * TWO_PI / n] * (self.dim - 1)
        return np.meshgrid(*axes, indexing="ij")

    def validate(self, n=SAMPLE_POINTS):
        lo, hi = self.psi_range
        if not (np.isfinite(lo) and np.isfinite(hi) and hi > lo):
            raise InvalidParameter(f"degenerate psi_range {self.psi_range}")
        point = self.sample_lattice(n)
        metric = self.metric(point)
        if not np.all(np.isfinite(metric.sqrt_g)) or np.min(metric.sqrt_g) <= 0.0:
            raise DegenerateMetric(f"{self.kind}: sqrt(g) is not positive on the domain")
        grad = np.sqrt(metric.ginv[..., 0, 0])
        if np.min(grad) <= 0.0:
            raise NullPoint(f"{self.kind}: |grad psi| vanishes on the sample lattice")
        B = self.contravariant_B(point, 0.0)
        if self.kind != "TorusPerturbed" and np.max(np.abs(B[..., 0])) != 0.0:
            raise InvalidParameter(f"{self.kind}: B . grad psi is not identically zero")
        return self

    def describe(self):
        return {"kind": self.kind, "psi_range": list(self.psi_range)}


# ---------------------------------------------------------------------------
# 2D models
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Annulus2D(FieldModel):
    r_inner: float = 1.0
    r_outer: float = 2.0
    label: str = "radius"

    kind = "Annulus2D"
    dim = 2

    def _radius(self, psi):
        return psi if self.label == "radius" else np.sqrt(2.0 * psi)

    def embedding(self, point):
        psi, theta = self._coords(point)
        r = self._radius(psi)
        return np.stack([r * np.cos(theta), r * np.sin(theta)], axis=-1)

    def jacobian(self, point):
        psi, theta = self._coords(point)
        r = self._radius(psi)
        drdpsi = np.ones_like(r) if self.label == "radius" else 1.0 / r
        c, s = np.cos(theta), np.sin(theta)
        return _stack_matrix([[drdpsi * c, -r * s], [drdpsi * s, r * c]])

    def metric(self, point):
        psi, theta = self._coords(point)
        r = self._radius(psi)
        zero = np.zeros_like(r)
        if self.label == "radius":
            gpp, sqrt_g = np.ones_like(r), r
        else:
            gpp, sqrt_g = r**2, np.ones_like(r)
        g = _stack_matrix([[1.0 / gpp, zero], [zero, r**2]])
        ginv = _stack_matrix([[gpp, zero], [zero, 1.0 / r**2]])
        return Metric(sqrt_g, g, ginv, np.ones_like(r))

    def contravariant_B(self, point, eps=0.0):
        psi, theta = self._coords(point)
        r = self._radius(psi)
        Btheta = 1.0 / r if self.label == "radius" else np.ones_like(r)
        return np.stack([np.zeros_like(r), Btheta], axis=-1)

    def describe(self):
        return {**super().describe(), "r_inner": self.r_inner, "r_outer": self.r_outer,
                "label": self.label}


@dataclass(frozen=True)
class Channel2D(FieldModel):
    """Wavy channel psi(x, y) = y + delta sin(2 pi x) y (1 - y), periodic in x."""

    delta: float = 0.15

    kind = "Channel2D"
    dim = 2

    def psi_xy(self, x, y):
        return y + self.delta * np.sin(TWO_PI * x) * y * (1.0 - y)

    def grad_xy(self, x, y):
        s = self.delta * np.sin(TWO_PI * x)
        px = TWO_PI * self.delta * np.cos(TWO_PI * x) * y * (1.0 - y)
        py = 1.0 + s * (1.0 - 2.0 * y)
        return px, py

    def _y(self, psi, theta):
        # root of s y^2 - (1 + s) y + psi = 0 lying in [0, 1], written without cancellation
        s = self.delta * np.sin(theta)
        disc = (1.0 + s) ** 2 - 4.0 * s * psi
        return 2.0 * psi / ((1.0 + s) + np.sqrt(np.maximum(disc, 0.0)))

    def embedding(self, point):
        psi, theta = self._coords(point)
        return np.stack([theta / TWO_PI, self._y(psi, theta)], axis=-1)

    def _xy_grad(self, point):
        psi, theta = self._coords(point)
        x, y = theta / TWO_PI, self._y(psi, theta)
        return (x, y) + self.grad_xy(x, y)

    def jacobian(self, point):
        x, y, px, py = self._xy_grad(point)
        zero = np.zeros_like(x)
        return _stack_matrix([[zero, np.full_like(x, 1.0 / TWO_PI)],
                              [1.0 / py, -px / (TWO_PI * py)]])

    def metric(self, point):
        x, y, px, py = self._xy_grad(point)
        gpp = px**2 + py**2
        gpt = TWO_PI * px
        gtt = np.full_like(x, TWO_PI**2)
        ginv = _stack_matrix([[gpp, gpt], [gpt, gtt]])
        det = gpp * gtt - gpt**2  # = (2 pi py)^2
        g = _stack_matrix([[gtt / det, -gpt / det], [-gpt / det, gpp / det]])
        sqrt_g = 1.0 / (TWO_PI * np.abs(py))
        return Metric(sqrt_g, g, ginv, -np.sign(py))

    def contravariant_B(self, point, eps=0.0):
        x, y, px, py = self._xy_grad(point)
        # B = grad-perp psi; B^theta = 1 / det d(x,y)/d(psi,theta) = -2 pi psi_y
        return np.stack([np.zeros_like(x), -TWO_PI * py], axis=-1)

    def validate(self, n=SAMPLE_POINTS):
        x, y = np.meshgrid(np.arange(n) / n, np.linspace(0.0, 1.0, n), indexing="ij")
        px, py = self.grad_xy(x, y)
        if np.min(py) <= 0.0 or np.min(np.hypot(px, py)) <= 0.0:
            # folding level sets: |s| >= 1 puts a critical point on the line where s' = 0
            i = np.unravel_index(np.argmin(py), py.shape)
            raise NullPoint(
                f"Channel2D(delta={self.delta}): level sets fold (psi_y = {py[i]:.3g} "
                f"at (x, y) = ({x[i]:.3f}, {y[i]:.3f})), so grad psi vanishes in the strip"
            )
        return super().validate(n)

    def describe(self):
        return {**super().describe(), "delta": self.delta}


# ---------------------------------------------------------------------------
# 3D models
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TorusIntegrable(FieldModel):
    """Circular torus, psi = minor radius, B = grad psi x grad theta + grad phi x grad chi0."""

    major_radius: float = 3.0
    iota_coeffs: tuple[float, ...] = (0.0, 1.0)

    kind = "TorusIntegrable"
    dim = 3

    @property
    def iota_poly(self):
        return Polynomial(self.iota_coeffs)

    def iota(self, psi):
        return self.iota_poly(np.asarray(psi, dtype=float))

    def iota_prime(self, psi):
        return self.iota_poly.deriv()(np.asarray(psi, dtype=float))

    def chi0(self, psi):
        return self.iota_poly.integ()(np.asarray(psi, dtype=float))

    def embedding(self, point):
        psi, theta, phi = self._coords(point)
        big = self.major_radius + psi * np.cos(theta)
        return np.stack([big * np.cos(phi), big * np.sin(phi), psi * np.sin(theta)], axis=-1)

    def jacobian(self, point):
        psi, theta, phi = self._coords(point)
        big = self.major_radius + psi * np.cos(theta)
        ct, st, cp, sp = np.cos(theta), np.sin(theta), np.cos(phi), np.sin(phi)
        zero = np.zeros_like(psi)
        return _stack_matrix([
            [ct * cp, -psi * st * cp, -big * sp],
            [ct * sp, -psi * st * sp, big * cp],
            [st, psi * ct, zero],
        ])

    def metric(self, point):
        psi, theta, phi = self._coords(point)
        big = self.major_radius + psi * np.cos(theta)
        one, zero = np.ones_like(psi), np.zeros_like(psi)
        g = _stack_matrix([[one, zero, zero], [zero, psi**2, zero], [zero, zero, big**2]])
        ginv = _stack_matrix([[one, zero, zero], [zero, 1.0 / psi**2, zero],
                              [zero, zero, 1.0 / big**2]])
        # (psi, theta, phi) is left-handed for this embedding
        return Metric(psi * big, g, ginv, -one)

    def jacobian_J(self, point):
        """J = (grad psi x grad theta) . grad phi, signed."""
        m = self.metric(point)
        return m.orientation / m.sqrt_g

    def contravariant_B(self, point, eps=0.0):
        psi, theta, phi = self._coords(point)
        J = self.jacobian_J((psi, theta, phi))
        return np.stack([np.zeros_like(psi), self.iota(psi) * J, J], axis=-1)

    def describe(self):
        return {**super().describe(), "major_radius": self.major_radius,
                "iota": list(self.iota_coeffs)}


@dataclass(frozen=True)
class TorusPerturbed(TorusIntegrable):
    """chi = chi0(psi) + eps**a * chi1(psi, theta, phi)."""

    amplitude: float = 0.1
    a_exponent: float = 0.5
    harmonics: tuple[tuple[int, int, float], ...] = ((2, 1, 1.0),)
    envelope: str = "shell"

    kind = "TorusPerturbed"

    def _envelope(self, psi):
        lo, hi = self.psi_range
        if self.envelope == "shell":
            return self.amplitude * (psi - lo) * (hi - psi), self.amplitude * (lo + hi - 2.0 * psi)
        return self.amplitude * psi * (hi - psi), self.amplitude * (hi - 2.0 * psi)

    def chi1_parts(self, point):
        """Return chi1 and its (psi, theta, phi) partial derivatives."""
        psi, theta, phi = (np.asarray(c, dtype=float) for c in point)
        env, denv = self._envelope(psi)
        s = np.zeros(np.broadcast(psi, theta, phi).shape)
        c_theta = np.zeros_like(s)
        c_phi = np.zeros_like(s)
        for p, q, w in self.harmonics:
            arg = p * theta - q * phi
            s = s + w * np.sin(arg)
            c_theta = c_theta + w * p * np.cos(arg)
            c_phi = c_phi - w * q * np.cos(arg)
        return env * s, denv * s, env * c_theta, env * c_phi

    def contravariant_B(self, point, eps=0.0):
        psi, theta, phi = self._coords(point)
        J = self.jacobian_J((psi, theta, phi))
        _, d_psi, d_theta, _ = self.chi1_parts((psi, theta, phi))
        scale = float(eps) ** self.a_exponent if eps > 0 else 0.0
        return np.stack([-scale * d_theta * J, (self.iota(psi) + scale * d_psi) * J, J], axis=-1)

    def unperturbed_B(self, point):
        return TorusIntegrable.contravariant_B(self, point, 0.0)

    def validate(self, n=SAMPLE_POINTS):
        if self.a_exponent < 0.5:
            raise InvalidParameter("a_exponent must be >= 1/2")
        point = self.sample_lattice(n)
        d_theta = self.chi1_parts(point)[2]
        sup = float(np.max(np.abs(d_theta)))
        if sup >= 1.0:
            raise PerturbationTooLarge(f"sup |d chi1/d theta| = {sup:.4g} >= 1")
        edge = np.max(np.abs(d_theta[[0, -1]]))
        if edge > 1e-12:
            raise BoundaryViolation(
                f"d chi1/d theta does not vanish on the boundary surfaces (max {edge:.3g})")
        return super().validate(n)

    def dtheta_chi1_sup(self, n=SAMPLE_POINTS):
        return float(np.max(np.abs(self.chi1_parts(self.sample_lattice(n))[2])))

    def describe(self):
        return {**super().describe(), "amplitude": self.amplitude,
                "a_exponent": self.a_exponent,
                "harmonics": [list(h) for h in self.harmonics], "envelope": self.envelope}


# ---------------------------------------------------------------------------
# construction and module-level operations
# ---------------------------------------------------------------------------

_ALIASES = {k.lower(): k for k in KINDS}
_ALIASES.update({"annulus": "Annulus2D", "channel": "Channel2D",
                 "torus-integrable": "TorusIntegrable", "torus-perturbed": "TorusPerturbed"})


def canonical_kind(kind):
    try:
        return _ALIASES[str(kind).lower()]
    except KeyError:
        raise InvalidParameter(f"unknown field kind {kind!r}; expected one of {KINDS}") from None


def make_field(spec=None, **params) -> FieldModel:
    """Build and validate a field model from a parameter mapping.

    ``spec`` may be a mapping with a ``kind`` entry; keyword arguments override
    it. Raises one of the :mod:`fiberheat.errors` field errors when an invariant
    fails on the 64-point sample lattice.
    """
    params = {**(spec or {}), **params}
    kind = canonical_kind(params.pop("kind", None))
    try:
        if kind == "Annulus2D":
            r_in = float(params.pop("r_inner", 1.0))
            r_out = float(params.pop("r_outer", 2.0))
            label = params.pop("label", "radius")
            if label not in ("radius", "half_square"):
                raise InvalidParameter(f"label must be 'radius' or 'half_square', got {label!r}")
            if not 0.0 < r_in < r_out:
                raise InvalidParameter("need 0 < r_inner < r_outer")
            rng = (r_in, r_out) if label == "radius" else (r_in**2 / 2.0, r_out**2 / 2.0)
            model = Annulus2D(rng, r_in, r_out, label)
        elif kind == "Channel2D":
            model = Channel2D((0.0, 1.0), float(params.pop("delta", 0.15)))
        else:
            R = float(params.pop("major_radius", 3.0))
            rng = (float(params.pop("psi_min", 0.5)), float(params.pop("psi_max", 1.5)))
            if rng[1] >= R:
                raise InvalidParameter("psi_max must stay below the major radius")
            iota = tuple(float(c) for c in np.atleast_1d(params.pop("iota", (0.0, 1.0))))
            if kind == "TorusIntegrable":
                model = TorusIntegrable(rng, R, iota)
            else:
                harmonics = tuple(
                    (int(p), int(q), float(w))
                    for p, q, w in params.pop("harmonics", ((2, 1, 1.0),))
                )
                envelope = params.pop("envelope", "shell")
                if envelope not in ("shell", "psi"):
                    raise InvalidParameter(f"envelope must be 'shell' or 'psi', got {envelope!r}")
                model = TorusPerturbed(
                    rng, R, iota,
                    float(params.pop("amplitude", 0.1)),
                    float(params.pop("a_exponent", 0.5)),
                    harmonics, envelope,
                )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, InvalidParameter):
            raise
        raise InvalidParameter(str(exc)) from exc
    if params:
        raise InvalidParameter(f"unknown parameters for {kind}: {sorted(params)}")
    return model.validate()


def eval_contravariant_B(field: FieldModel, point, eps=0.0):
    if eps < 0:
        raise InvalidParameter("eps must be >= 0")
    return field.contravariant_B(point, eps)


def eval_diffusion_tensor(field: FieldModel, point, eps, metric=None):
    """Contravariant tensor D = eps g^-1 + (1 - eps) b b (flux = D grad T)."""
    if not 0.0 < eps <= 1.0:
        raise InvalidParameter(f"eps must lie in (0, 1], got {eps}")
    metric = field.metric(point) if metric is None else metric
    b, _ = field.unit_vectors(point, eps, metric)
    D = eps * metric.ginv + (1.0 - eps) * b[..., :, None] * b[..., None, :]
    return 0.5 * (D + np.swapaxes(D, -1, -2))


def rotational_transform(field: FieldModel, psi):
    if field.dim != 3:
        raise WrongKind(f"{field.kind} has no rotational transform")
    return field.iota(field.check_domain(psi))
