import numpy as np
import pytest
from hypothesis import given, strategies as st

from fiberheat.errors import InvalidParameter, NotSolvable, SmallDivisor, WrongKind
from fiberheat.field import make_field
from fiberheat.mde import (SurfaceSpectrum, apply_symbol, field_line_derivative, forward_transform,
                           inverse_transform, mde_rhs, sobolev_norm, solve_mde, surface_weight)

GOLDEN = (1 + 5**0.5) / 2


def _surface(n):
    th = np.arange(n) * 2 * np.pi / n
    return np.meshgrid(th, th, indexing="ij")  # theta first, phi second


def _field(iota):
    return make_field(kind="TorusIntegrable", iota=[iota])


def test_cos_theta_modes():
    th, ph = _surface(9)
    spec = forward_transform(np.cos(th))
    # m counts phi periods and n theta periods
    assert spec[0, 1] == pytest.approx(0.5) and spec[0, -1] == pytest.approx(0.5)
    spec[0, 1] = spec[0, -1] = 0.0
    assert np.max(np.abs(spec.coeffs)) < 1e-15


def test_mode_convention_phi():
    th, ph = _surface(9)
    spec = forward_transform(np.exp(-1j * (2 * th + 3 * ph)).real)
    assert spec[3, 2] == pytest.approx(0.5)


@given(st.integers(0, 10_000))
def test_round_trip(seed):
    u = np.random.default_rng(seed).standard_normal((15, 15))
    back = inverse_transform(forward_transform(u), (15, 15))
    assert np.max(np.abs(back - u)) <= 1e-12


@given(st.integers(0, 10_000))
def test_parseval(seed):
    u = np.random.default_rng(seed).standard_normal((13, 13))
    spec = forward_transform(u)
    assert np.sum(np.abs(spec.coeffs) ** 2) == pytest.approx(np.mean(u**2), rel=1e-12)
    assert spec.conjugate_defect() < 1e-15


def test_cutoff_checks():
    with pytest.raises(InvalidParameter):
        forward_transform(np.zeros((9, 9)), K=5)
    with pytest.raises(InvalidParameter):
        inverse_transform(SurfaceSpectrum.zeros(6), (9, 9))
    with pytest.raises(InvalidParameter):
        forward_transform(np.zeros(9))


def test_single_mode_division_golden():
    v = SurfaceSpectrum.single_mode(4, 1, -1, 1.0, real=False)
    w = solve_mde(_field(GOLDEN), 1.0, v, weight=1.0)
    assert abs(w[1, -1]) == pytest.approx(1 / (2 * np.pi * abs(1 - GOLDEN)), rel=1e-12)
    assert abs(w[1, -1]) == pytest.approx(0.2575, abs=1e-4)


def test_zero_data():
    w = solve_mde(_field(GOLDEN), 1.0, SurfaceSpectrum.zeros(5), weight=1.0)
    assert np.all(w.coeffs == 0)


def test_resonance_reported():
    v = SurfaceSpectrum.single_mode(4, 1, -2)
    with pytest.raises(SmallDivisor) as info:
        solve_mde(_field(0.5), 1.0, v, weight=1.0)
    assert info.value.mode == (1, -2)


def test_resonant_mode_without_data_is_fine():
    v = SurfaceSpectrum.single_mode(4, 1, 1)
    w = solve_mde(_field(0.5), 1.0, v, weight=1.0)
    assert w[1, -2] == 0


def test_nonzero_mean_not_solvable():
    v = SurfaceSpectrum.single_mode(3, 0, 0, 1.0)
    with pytest.raises(NotSolvable):
        solve_mde(_field(GOLDEN), 1.0, v, weight=1.0)


def test_planar_field_rejected():
    with pytest.raises(WrongKind):
        solve_mde(make_field(kind="Annulus2D"), 1.5, SurfaceSpectrum.zeros(2))


@given(st.integers(0, 10_000))
def test_symbol_inverts_solution(seed):
    rng = np.random.default_rng(seed)
    K = 8
    u = rng.standard_normal((2 * K + 1, 2 * K + 1))
    v = forward_transform(u - u.mean())
    v[0, 0] = 0.0
    w = solve_mde(_field(GOLDEN - 1), 1.0, v, weight=1.0)
    back = apply_symbol(w, GOLDEN - 1).coeffs
    assert np.max(np.abs(back - v.coeffs)) <= 1e-12 * np.max(np.abs(v.coeffs))
    assert w.conjugate_defect() < 1e-14


def test_physical_weight_solution_matches_field_line_derivative():
    f = _field(GOLDEN - 1)
    K, psi = 6, 1.2
    n = 2 * K + 1
    th, ph = _surface(n)
    u = np.cos(th - 2 * ph) + 0.3 * np.sin(2 * th + ph)
    weight = surface_weight(f, psi, n, n)
    v = forward_transform(field_line_derivative(u, GOLDEN - 1) / weight, psi)
    w = solve_mde(f, psi, v)
    V = mde_rhs(f, psi, v)
    assert np.max(np.abs(apply_symbol(w, GOLDEN - 1).coeffs - V.coeffs)) <= 1e-12 * np.max(np.abs(V.coeffs))


def test_surface_weight_on_circular_torus():
    f = _field(GOLDEN)
    w = surface_weight(f, 1.0, 5, 5)
    th, _ = _surface(5)
    assert np.allclose(w, 1.0 / (3.0 + np.cos(th)), rtol=1e-14)  # |J| = 1 / (psi (R + psi cos theta))


def test_sobolev_single_mode():
    spec = SurfaceSpectrum.single_mode(3, 1, 0, 1.0, real=False)
    assert sobolev_norm(spec, -3.0) ** 2 == pytest.approx(1.0)


@pytest.mark.parametrize("gamma", [-2.0, 0.0, 1.5, 3.0])
def test_sobolev_cos_theta(gamma):
    th, _ = _surface(9)
    assert sobolev_norm(forward_transform(np.cos(th)), gamma) ** 2 == pytest.approx(0.5)


def test_regularity_gain():
    # |w_hat| = |v_hat| / (2 pi |m + iota n|) <= M(psi) |k|^gamma |v_hat| on a Diophantine surface
    from fiberheat.ergodic import ergodicity_constant
    f = _field(GOLDEN - 1)
    K, gamma, s = 12, 2.5, 1.0
    Mpsi = ergodicity_constant(f, 1.0, gamma, K)
    rng = np.random.default_rng(7)
    for _ in range(20):
        u = rng.standard_normal((2 * K + 1, 2 * K + 1))
        v = forward_transform(u - u.mean())
        v[0, 0] = 0.0
        w = solve_mde(f, 1.0, v, weight=1.0)
        assert sobolev_norm(w, s) <= Mpsi * sobolev_norm(v, s + gamma) * (1 + 1e-12)


def test_spectrum_csv(tmp_path):
    path = SurfaceSpectrum.single_mode(1, 1, 0).to_csv(tmp_path / "s.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == "m,n,re,im" and len(lines) == 10
