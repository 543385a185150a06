import dataclasses

import numpy as np
import pytest

from fiberheat.effective import circulation, compatibility_residual, effective_profile
from fiberheat.errors import GridMismatch, WrongKind
from fiberheat.field import make_field
from fiberheat.fluxgeom import FluxGrid


def test_constant_gamma_gives_linear_profile():
    flat = make_field(kind="Channel2D", delta=0.0)
    g = FluxGrid(flat, 33, 16)
    p = effective_profile(flat, g, 0.0, 1.0)
    assert np.allclose(p.gamma, 1.0, rtol=1e-13)
    assert np.allclose(p.theta_values, g.psi_nodes, atol=1e-13)


def test_annulus_log_profile(annulus):
    g = FluxGrid(annulus, 129, 64)
    p = effective_profile(annulus, g, 0.0, 1.0)
    assert np.allclose(p.gamma, 2 * np.pi * g.psi_nodes, rtol=1e-12)
    assert np.max(np.abs(p.theta_values - np.log(g.psi_nodes) / np.log(2))) < 1e-5
    assert p.theta(np.sqrt(2.0)) == pytest.approx(0.5, abs=1e-5)


def test_equal_boundary_values_give_constant(torus):
    g = FluxGrid(torus, 9, 8, 8)
    p = effective_profile(torus, g, 5.0, 5.0)
    assert np.all(p.theta_values == 5.0) and np.all(p.theta(np.array([0.7, 1.2])) == 5.0)
    assert np.all(compatibility_residual(p, torus, g) == 0.0)


def test_profile_is_monotone_and_flux_constant(perturbed):
    g = FluxGrid(perturbed, 17, 12, 12)
    p = effective_profile(perturbed, g, 2.0, -1.0)
    assert np.all(np.diff(p.theta_values) < 0)
    assert p.theta_values[0] == 2.0 and p.theta_values[-1] == -1.0
    assert np.allclose(p.gamma * p.dtheta(), p.heat_flux(), rtol=1e-13)


def test_ode_residual_small(channel):
    errs = []
    for n in (65, 129):
        g = FluxGrid(channel, n, 64)
        errs.append(np.max(np.abs(effective_profile(channel, g, 0.0, 1.0).ode_residual())))
    assert np.log(errs[0] / errs[1]) / np.log(2) >= 1.9


def test_compatibility_with_exact_log_profile_below_bound(annulus):
    g = FluxGrid(annulus, 128, 64)
    p = effective_profile(annulus, g, 0.0, 1.0)
    exact = dataclasses.replace(p, theta_values=np.log(g.psi_nodes) / np.log(2.0))
    assert np.max(np.abs(compatibility_residual(exact, annulus, g))) <= 1e-4


@pytest.mark.parametrize("kind,angles", [("Annulus2D", (64,)), ("Channel2D", (64,)),
                                         ("TorusIntegrable", (16, 16)), ("TorusPerturbed", (16, 16))])
def test_compatibility_second_order(kind, angles):
    f = make_field(kind=kind)
    errs = []
    for n in (65, 129):
        g = FluxGrid(f, n, *angles)
        errs.append(np.max(np.abs(compatibility_residual(effective_profile(f, g, 0.0, 1.0), f, g))))
    order = np.log(errs[0] / errs[1]) / np.log(128 / 64)
    assert order >= 1.9


def test_profile_grid_mismatch(annulus, torus):
    g = FluxGrid(annulus, 9, 8)
    p = effective_profile(annulus, g, 0.0, 1.0)
    with pytest.raises(GridMismatch):
        p.on_grid(FluxGrid(annulus, 11, 8))
    with pytest.raises(GridMismatch):
        effective_profile(torus, g, 0.0, 1.0)


def test_circulation_equals_gamma(annulus, channel):
    for f in (annulus, channel):
        g = FluxGrid(f, 33, 128)
        p = effective_profile(f, g, 0.0, 1.0)
        assert circulation(f, g.psi_nodes[10], 128) == pytest.approx(p.gamma[10], rel=1e-10)


def test_circulation_planar_only(torus):
    with pytest.raises(WrongKind):
        circulation(torus, 1.0)


def test_profile_csv(tmp_path, annulus):
    g = FluxGrid(annulus, 5, 8)
    path = effective_profile(annulus, g, 0.0, 1.0).to_csv(tmp_path / "p.csv")
    assert path.read_text().splitlines()[0] == "psi,gamma,H,theta"
