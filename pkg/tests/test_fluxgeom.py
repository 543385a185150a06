import numpy as np
import pytest
from hypothesis import given, strategies as st

from fiberheat.errors import GridMismatch, IndexOutOfRange, InvalidParameter
from fiberheat.field import make_field
from fiberheat.fluxgeom import (FluxGrid, ScalarField, gamma_derivative_residual, load_scalar_field,
                                spectral_derivative, surface_integral, surface_integrals, volume_integral)


def _order(fine, coarse, n_fine, n_coarse):
    return np.log(coarse / fine) / np.log((n_fine - 1) / (n_coarse - 1))


def test_annulus_circumference(annulus):
    g = FluxGrid(annulus, 33, 64)
    for k in (0, 7, 32):
        r = g.psi_nodes[k]
        assert surface_integral(g, k, g.grad_psi[k]) == pytest.approx(2 * np.pi * r, rel=1e-12)


def test_torus_surface_area(torus):
    g = FluxGrid(torus, 9, 32, 32)
    for k in range(g.n_psi):
        r = g.psi_nodes[k]
        assert surface_integral(g, k, 1.0) == pytest.approx(4 * np.pi**2 * 3.0 * r, rel=1e-10)


def test_zero_integrand(torus):
    g = FluxGrid(torus, 5, 8, 8)
    assert surface_integral(g, 2, 0.0) == 0.0
    assert volume_integral(g, 0.0) == 0.0


def test_surface_index_checked(annulus):
    g = FluxGrid(annulus, 5, 8)
    with pytest.raises(IndexOutOfRange):
        surface_integral(g, 5, 1.0)


def test_annulus_area(annulus):
    assert volume_integral(FluxGrid(annulus, 33, 64), 1.0) == pytest.approx(3 * np.pi, abs=1e-10)


def test_torus_shell_volume(torus):
    assert volume_integral(FluxGrid(torus, 9, 16, 16), 1.0) == pytest.approx(12 * np.pi**2, abs=1e-8)


def test_volume_matches_node_weights(perturbed):
    g = FluxGrid(perturbed, 9, 12, 12)
    f = np.cos(g.coords[1]) ** 2 + g.coords[0]
    assert volume_integral(g, f) == pytest.approx(np.sum(g.node_weights() * f), rel=1e-13)


def test_channel_area_is_unit_strip(channel):
    # the strip [0,1) x [0,1] has area 1 for every delta
    assert volume_integral(FluxGrid(channel, 129, 64), 1.0) == pytest.approx(1.0, abs=1e-4)


def test_derivative_identity_constant_on_annulus(annulus):
    # d/dr (2 pi r) = 2 pi = int div(grad psi / |grad psi|) / |grad psi|; both sides are
    # differences of functions linear in r, so the O(h^2) bound holds at roundoff level
    for n in (33, 65):
        assert np.max(gamma_derivative_residual(FluxGrid(annulus, n, 32), 1.0)) <= 1e-12


def test_derivative_identity_zero(torus):
    assert np.all(gamma_derivative_residual(FluxGrid(torus, 9, 8, 8), 0.0) == 0.0)


@pytest.mark.parametrize("kind,angles,ns", [
    ("TorusIntegrable", (16, 16), (33, 65)),
    ("TorusPerturbed", (16, 16), (33, 65)),
    ("Channel2D", (64,), (129, 257)),
    ("Annulus2D", (32,), (33, 65)),
])
def test_derivative_identity_second_order(kind, angles, ns):
    f = make_field(kind=kind)
    errs = []
    for n in ns:
        g = FluxGrid(f, n, *angles)
        errs.append(np.max(gamma_derivative_residual(g, g.coords[0] ** 2 * (1 + 0.3 * np.cos(g.coords[1])))))
    assert _order(errs[1], errs[0], ns[1], ns[0]) >= 1.9


def test_spectral_derivative_exact_for_trig():
    x = np.arange(16) * 2 * np.pi / 16
    u = np.sin(3 * x)[:, None] * np.ones((1, 4))
    assert np.allclose(spectral_derivative(u, 0), 3 * np.cos(3 * x)[:, None], atol=1e-12)


@given(st.integers(3, 40), st.integers(3, 40))
def test_grid_shapes(n_psi, n_theta):
    g = FluxGrid(make_field(kind="Annulus2D"), n_psi, n_theta)
    assert g.shape == (n_psi, n_theta)
    assert g.psi_nodes[0] == 1.0 and g.psi_nodes[-1] == 2.0
    assert np.sum(g.psi_weights) == pytest.approx(1.0)


def test_grid_dimension_checks(annulus, torus):
    with pytest.raises(InvalidParameter):
        FluxGrid(annulus, 9, 8, 4)
    with pytest.raises(InvalidParameter):
        FluxGrid(torus, 9, 8, 1)
    with pytest.raises(InvalidParameter):
        FluxGrid(annulus, 2, 8)


def test_scalar_field_shape_checked(annulus):
    g = FluxGrid(annulus, 5, 8)
    assert ScalarField(g, np.zeros(40)).values.shape == (5, 8)
    with pytest.raises(GridMismatch):
        ScalarField(g, np.zeros(41))


def test_scalar_field_roundtrip(tmp_path, torus):
    g = FluxGrid(torus, 5, 6, 7)
    vals = np.sin(g.coords[1]) + g.coords[0] * np.cos(g.coords[2])
    f = ScalarField(g, vals, {"T_minus": 0.0, "T_plus": 1.0})
    f.save(tmp_path / "t")
    back = load_scalar_field(tmp_path / "t", g)
    assert np.array_equal(back.values, vals) and back.bc == f.bc
    header, raw = load_scalar_field(tmp_path / "t")
    assert header["model"] == "TorusIntegrable" and raw.shape == g.shape
    with pytest.raises(GridMismatch):
        load_scalar_field(tmp_path / "t", FluxGrid(torus, 5, 6, 8))


def test_scalar_field_csv(tmp_path, annulus):
    g = FluxGrid(annulus, 3, 4)
    ScalarField(g, np.arange(12.0)).to_csv(tmp_path / "f.csv")
    data = np.loadtxt(tmp_path / "f.csv", delimiter=",", skiprows=1)
    assert data.shape == (12, 3) and data[-1, -1] == 11.0


def test_surface_integrals_vectorised(perturbed):
    g = FluxGrid(perturbed, 7, 10, 10)
    f = g.coords[0] * np.sin(g.coords[2]) ** 2
    assert np.allclose(surface_integrals(g, f), [surface_integral(g, k, f[k]) for k in range(7)], rtol=1e-13)
