import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from fiberheat.errors import InvalidParameter, NonMonotoneIota, WrongKind
from fiberheat.ergodic import (IotaProfile, check_ergodicity_condition, ergodicity_constant,
                               excluded_intervals, measure_bound_constant, merge_intervals,
                               pointwise_excluded)
from fiberheat.field import make_field

IDENTITY = IotaProfile(lambda p: np.asarray(p, dtype=float), (0.0, 1.0))
GOLDEN = (1 + 5**0.5) / 2


def _grid_scan(iota_values, gamma, M, K):
    """Exhaustive test over the full mode box (small K only)."""
    m, n = np.meshgrid(np.arange(-K, K + 1), np.arange(-K, K + 1), indexing="ij")
    keep = (m != 0) | (n != 0)
    m, n = m[keep], n[keep]
    thresh = 1.0 / (M * np.hypot(m, n) ** gamma)
    return np.array([np.any(np.abs(m + i * n) < thresh) for i in iota_values])


def test_single_interval_half_width():
    rep = excluded_intervals(IDENTITY, 3.0, 10.0, 2)
    hits = [(lo, hi) for lo, hi, m, n in rep.intervals if (m, n) == (-1, 2)]
    assert len(hits) == 1
    lo, hi = hits[0]
    assert 0.5 * (lo + hi) == pytest.approx(0.5, abs=1e-12)
    assert 0.5 * (hi - lo) == pytest.approx(1.0 / (10 * 2 * 5**1.5), rel=1e-10)
    assert 0.5 * (hi - lo) == pytest.approx(0.004472, abs=1e-6)


def test_interval_matches_dense_scan():
    rep = excluded_intervals(IDENTITY, 3.0, 10.0, 2)
    psi = np.linspace(0.0, 1.0, 1_000_001)
    scan = _grid_scan([0.5], 3.0, 10.0, 2)
    assert scan[0]
    dense = np.abs(-1 + 2 * psi) < 1 / (10 * 5**1.5)
    lo, hi = [(a, b) for a, b, m, n in rep.intervals if (m, n) == (-1, 2)][0]
    inside = (psi > lo) & (psi < hi)
    assert np.array_equal(inside, dense)


def test_measure_decreases_with_M():
    mus = [excluded_intervals(IDENTITY, 3.0, M, 20).excluded_measure for M in (10, 100, 1000, 1e4, 1e5)]
    assert all(b < a for a, b in zip(mus, mus[1:]))


def test_M_times_measure_bounded():
    K = 50
    bound = measure_bound_constant(3.0, K)
    scaled = [M * excluded_intervals(IDENTITY, 3.0, M, K).excluded_measure for M in (10, 100, 1000, 1e4)]
    assert max(scaled) <= bound
    assert max(scaled) / min(scaled) < 1.5


def test_union_membership_matches_exhaustive_scan():
    K, M = 12, 20.0
    rep = excluded_intervals(IDENTITY, 3.0, M, K)
    x = np.modf(np.arange(1, 5001) * (GOLDEN - 1))[0]
    assert np.array_equal(rep.contains(x), _grid_scan(x, 3.0, M, K))


def test_pointwise_scan_matches_exhaustive():
    x = np.linspace(0, 1, 3001)
    assert np.array_equal(pointwise_excluded(x, 3.0, 5.0, 10), _grid_scan(x, 3.0, 5.0, 10))


def test_nonlinear_decreasing_profile():
    prof = IotaProfile(lambda p: 1.0 - np.asarray(p, float) ** 2, (0.0, 1.0))
    rep = excluded_intervals(prof, 3.0, 30.0, 8)
    x = np.linspace(0.0, 1.0, 20001)
    assert np.array_equal(rep.contains(x), _grid_scan(1.0 - x**2, 3.0, 30.0, 8))


def test_small_M_excludes_everything():
    rep = excluded_intervals(IDENTITY, 3.0, 0.5, 3)  # |m|^(1+gamma) < 1/M = 2 for m = 1
    assert rep.excluded_measure == pytest.approx(1.0)


def test_monotonicity_required():
    with pytest.raises(NonMonotoneIota):
        excluded_intervals(IotaProfile(lambda p: np.full_like(np.asarray(p, float), 0.3), (0, 1)), 3.0, 10.0, 5)
    with pytest.raises(NonMonotoneIota):
        check_ergodicity_condition(make_field(kind="TorusIntegrable", iota=[0.7]), 3.0, 0.5, [10, 100], 5)


def test_parameter_checks():
    with pytest.raises(InvalidParameter):
        excluded_intervals(IDENTITY, 2.0, 10.0, 5)
    with pytest.raises(InvalidParameter):
        excluded_intervals(IDENTITY, 3.0, -1.0, 5)
    with pytest.raises(InvalidParameter):
        check_ergodicity_condition(IDENTITY, 3.0, 0.5, [100, 10], 5)
    with pytest.raises(WrongKind):
        excluded_intervals(make_field(kind="Annulus2D"), 3.0, 10.0, 5)


def test_works_on_torus_field():
    rep = excluded_intervals(make_field(kind="TorusIntegrable"), 3.0, 100.0, 10)
    assert all(0.5 <= lo < hi <= 1.5 for lo, hi, _, _ in rep.intervals)


@given(st.lists(st.tuples(st.floats(0, 1), st.floats(0, 0.2)), max_size=30))
def test_merge_intervals_properties(raw):
    ivs = [(a, a + w) for a, w in raw]
    merged = merge_intervals(ivs)
    assert all(a <= b for a, b in merged)
    assert all(b1 < a2 for (_, b1), (a2, _) in zip(merged, merged[1:]))
    assert sum(b - a for a, b in merged) <= sum(b - a for a, b in ivs) + 1e-12
    for a, b in ivs:
        assert any(lo <= a and b <= hi for lo, hi in merged)


def test_rational_iota_is_resonant():
    f = make_field(kind="TorusIntegrable", iota=[0.0, 1.0])
    assert math.isinf(ergodicity_constant(f, 1.0, 3.0, 10))  # iota = 1
    prof = IotaProfile(lambda p: np.asarray(p, float), (0.0, 1.0))
    assert math.isinf(ergodicity_constant(prof, 2.0 / 7.0, 3.0, 10))


def test_golden_constant_matches_exhaustive_max():
    f = make_field(kind="TorusIntegrable", iota=[GOLDEN])
    K = 100
    m, n = np.meshgrid(np.arange(-K, K + 1), np.arange(-K, K + 1), indexing="ij")
    keep = (m != 0) | (n != 0)
    best = 0.0
    for mm, nn in zip(m[keep], n[keep]):
        val = (mm * mm + nn * nn) ** -1.5 / (2 * np.pi * abs(mm + GOLDEN * nn))
        best = max(best, val)
    value = ergodicity_constant(f, 1.0, 3.0, K)
    assert np.isfinite(value) and value == pytest.approx(best, rel=1e-12)


def test_planar_constant():
    assert ergodicity_constant(make_field(kind="Annulus2D"), 1.5, 3.0, 20) == pytest.approx(1 / (2 * np.pi))


def test_sequence_decreasing_for_c_half():
    chk = check_ergodicity_condition(IDENTITY, 3.0, 0.5, [10, 100, 1000], 100)
    assert chk.decreasing


def test_sequence_bounded_for_c_one():
    chk = check_ergodicity_condition(IDENTITY, 3.0, 1.0, [10, 100, 1000, 1e4], 100)
    assert chk.bound <= measure_bound_constant(3.0, 100)


def test_report_csv(tmp_path):
    rep = excluded_intervals(IDENTITY, 3.0, 10.0, 3, n_constants=5)
    assert len(rep.constants) == 5
    assert rep.intervals_to_csv(tmp_path / "i.csv").read_text().startswith("psi_lo,psi_hi,m,n")
    assert rep.constants_to_csv(tmp_path / "c.csv").read_text().startswith("psi,M_psi")
    chk = check_ergodicity_condition(IDENTITY, 3.0, 0.5, [10, 100], 3)
    assert chk.to_csv(tmp_path / "e.csv").read_text().startswith("M,measure,scaled")
