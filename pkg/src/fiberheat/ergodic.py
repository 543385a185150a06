"""Diophantine excluded sets, their measure, and per-surface ergodicity constants.

A surface psi is Diophantine at level (gamma, M) when

    |m + iota(psi) n| >= 1 / (M |(m, n)|**gamma)    for all (m, n) != 0.

Only the box |m|, |n| <= K is examined. For n > 0 the violating set of
(m, n) is the preimage under iota of the open interval of half-width
1 / (M n |(m, n)|**gamma) around -m / n; (-m, -n) gives the same set and is not
listed twice. For n = 0 the inequality fails on the whole range exactly when
|m|**(1 + gamma) < 1 / M.
"""
from __future__ import annotations

import csv
from dataclasses import dataclass, field as dc_field
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import InvalidParameter, NonMonotoneIota, WrongKind
from .field import TWO_PI

MONOTONE_SAMPLES = 1001
RESONANCE_FLOOR = 1e-14


@dataclass(frozen=True)
class IotaProfile:
    """Bare rotational-transform profile; stands in for a field in this module."""

    iota: Callable
    psi_range: tuple[float, float]
    dim = 3


@dataclass
class DiophantineReport:
    gamma: float
    M: float
    K: int
    psi_range: tuple[float, float]
    intervals: list = dc_field(default_factory=list)  # (psi_lo, psi_hi, m, n)
    excluded_measure: float = 0.0
    constants: list = dc_field(default_factory=list)  # (psi, M(psi))

    @property
    def total_length(self):
        return float(sum(hi - lo for lo, hi, _, _ in self.intervals))

    def union(self):
        return merge_intervals([(lo, hi) for lo, hi, _, _ in self.intervals])

    def contains(self, psi):
        """Membership of psi in the union of the excluded intervals.

        Intervals are open, except at an end cut off by the edge of psi_range,
        where the violating set continues past the domain and the edge belongs to it.
        """
        psi = np.asarray(psi, dtype=float)
        merged = self.union()
        if not merged:
            return np.zeros(psi.shape, dtype=bool)
        lo = np.array([a for a, _ in merged])
        hi = np.array([b for _, b in merged])
        k = np.searchsorted(lo, psi, side="right") - 1
        kc = np.clip(k, 0, len(lo) - 1)
        a, b = lo[kc], hi[kc]
        above = (psi > a) | ((psi == a) & (a == self.psi_range[0]))
        below = (psi < b) | ((psi == b) & (b == self.psi_range[1]))
        return (k >= 0) & above & below

    def intervals_to_csv(self, path):
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["psi_lo", "psi_hi", "m", "n"])
            for lo, hi, m, n in self.intervals:
                w.writerow([repr(float(lo)), repr(float(hi)), m, n])
        return Path(path)

    def constants_to_csv(self, path):
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["psi", "M_psi"])
            for psi, c in self.constants:
                w.writerow([repr(float(psi)), repr(float(c))])
        return Path(path)


def merge_intervals(intervals):
    """Sort-and-sweep union of (lo, hi) pairs; returns disjoint sorted pairs."""
    merged = []
    for lo, hi in sorted(intervals):
        if merged and lo <= merged[-1][1]:
            if hi > merged[-1][1]:
                merged[-1][1] = hi
        else:
            merged.append([lo, hi])
    return [(a, b) for a, b in merged]


def _iota_function(field):
    if getattr(field, "dim", 3) != 3 or not hasattr(field, "iota"):
        raise WrongKind(f"{getattr(field, 'kind', type(field).__name__)} has no rotational transform")
    return field.iota


def check_monotone(field, samples=MONOTONE_SAMPLES):
    """Return +1 / -1 for strictly increasing / decreasing iota, else raise NonMonotoneIota."""
    iota = _iota_function(field)
    lo, hi = field.psi_range
    d = np.diff(np.asarray(iota(np.linspace(lo, hi, samples)), dtype=float))
    if np.all(d > 0):
        return 1
    if np.all(d < 0):
        return -1
    raise NonMonotoneIota("iota is not strictly monotone on psi_range")


def _invert(iota, sign, targets, psi_range, iterations=80):
    """psi with iota(psi) = target by bisection (targets clipped to the range of iota)."""
    lo = np.full(targets.shape, float(psi_range[0]))
    hi = np.full(targets.shape, float(psi_range[1]))
    def f(p):  # increasing in psi
        return sign * np.asarray(iota(p), dtype=float)

    t = sign * targets
    f_lo, f_hi = f(lo), f(hi)
    t = np.clip(t, f_lo, f_hi)
    a, b = lo.copy(), hi.copy()
    for _ in range(iterations):
        mid = 0.5 * (a + b)
        up = f(mid) < t
        a = np.where(up, mid, a)
        b = np.where(up, b, mid)
    # targets at or past the ends of the range map to the exact edges
    return np.where(t <= f_lo, lo, np.where(t >= f_hi, hi, 0.5 * (a + b)))


def _mode_box(K):
    m, n = np.meshgrid(np.arange(-K, K + 1), np.arange(-K, K + 1), indexing="ij")
    keep = (m != 0) | (n != 0)
    return m[keep], n[keep]


def excluded_intervals(field, gamma, M, K, n_constants=0) -> DiophantineReport:
    """Excluded intervals of the truncated Diophantine condition and their union measure.

    ``n_constants`` > 0 also tabulates :func:`ergodicity_constant` on that many
    evenly spaced surfaces.
    """
    if gamma <= 2:
        raise InvalidParameter("gamma must exceed 2")
    if M <= 0 or K < 1:
        raise InvalidParameter("need M > 0 and K >= 1")
    sign = check_monotone(field)
    iota = field.iota
    lo, hi = (float(v) for v in field.psi_range)
    iota_ends = np.asarray(iota(np.array([lo, hi])), dtype=float)
    i_min, i_max = float(iota_ends.min()), float(iota_ends.max())

    m, n = _mode_box(K)
    positive = n > 0
    m, n = m[positive], n[positive]
    norm = np.hypot(m, n)
    half = 1.0 / (M * n * norm**gamma)  # half-width in iota
    centre = -m / n
    hit = (centre + half > i_min) & (centre - half < i_max)
    m, n, half, centre = m[hit], n[hit], half[hit], centre[hit]
    a = _invert(iota, sign, centre - half, (lo, hi))
    b = _invert(iota, sign, centre + half, (lo, hi))
    p_lo, p_hi = np.minimum(a, b), np.maximum(a, b)

    intervals = [
        (float(x), float(y), int(mm), int(nn))
        for x, y, mm, nn in zip(p_lo, p_hi, m, n)
        if y > x
    ]
    for mm in range(1, K + 1):
        if mm ** (1.0 + gamma) < 1.0 / M:
            intervals.append((lo, hi, mm, 0))
    intervals.sort(key=lambda t: (t[0], t[1], t[2], t[3]))
    report = DiophantineReport(float(gamma), float(M), int(K), (lo, hi), intervals)
    report.excluded_measure = float(sum(y - x for x, y in report.union()))
    if n_constants:
        psis = np.linspace(lo, hi, n_constants)
        report.constants = [(float(p), ergodicity_constant(field, p, gamma, K)) for p in psis]
    return report


def pointwise_excluded(iota_values, gamma, M, K):
    """Direct test of each iota value against every mode of the box.

    Returns True where some 0 < |(m, n)|, |m|, |n| <= K has
    |m + iota n| < 1 / (M |(m, n)|**gamma). Since that bound is below 1 only the
    two integers next to -iota n can violate it for a given n, so the scan
    checks those and the n = 0 row.
    """
    iota_values = np.atleast_1d(np.asarray(iota_values, dtype=float))
    hit = np.zeros(iota_values.shape, dtype=bool)
    for n in range(1, K + 1):
        base = np.floor(-iota_values * n)
        for m in (base, base + 1.0):
            inside = np.abs(m) <= K
            bound = 1.0 / (M * np.hypot(m, n) ** gamma)
            hit |= inside & (np.abs(m + iota_values * n) < bound)
    m0 = np.arange(1, K + 1, dtype=float)
    if np.any(m0 < 1.0 / (M * m0**gamma)):
        hit[:] = True
    return hit


def ergodicity_constant(field, psi, gamma, K) -> float:
    """max over 0 < |m|, |n| <= K of |(m, n)|**-gamma / (2 pi |m + iota n|).

    Returns ``inf`` on resonant surfaces (some |m + iota n| < 1e-14). Planar
    fields have the single-angle symbol 2 pi i m, which gives 1 / (2 pi).
    """
    if K < 1:
        raise InvalidParameter("K must be >= 1")
    if getattr(field, "dim", None) == 2:
        m = np.arange(1, K + 1, dtype=float)
        return float(np.max(m ** (-gamma) / (TWO_PI * m)))
    iota = float(np.asarray(_iota_function(field)(psi), dtype=float))
    m, n = _mode_box(K)
    div = np.abs(m + iota * n)
    if np.min(div) < RESONANCE_FLOOR:
        return float("inf")
    return float(np.max(np.hypot(m, n) ** (-gamma) / (TWO_PI * div)))


@dataclass
class ErgodicityCheck:
    gamma: float
    c: float
    K: int
    M_list: list
    measures: list
    scaled: list  # M**c * measure

    @property
    def decreasing(self):
        return all(b < a for a, b in zip(self.scaled, self.scaled[1:]))

    @property
    def bound(self):
        return max(self.scaled)

    def to_csv(self, path):
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["M", "measure", "scaled"])
            for row in zip(self.M_list, self.measures, self.scaled):
                w.writerow([repr(float(v)) for v in row])
        return Path(path)


def check_ergodicity_condition(field, gamma, c, M_list, K) -> ErgodicityCheck:
    """M**c times the excluded measure for each M in the increasing list ``M_list``."""
    M_list = [float(v) for v in M_list]
    if any(b <= a for a, b in zip(M_list, M_list[1:])):
        raise InvalidParameter("M_list must be strictly increasing")
    check_monotone(field)
    measures = [excluded_intervals(field, gamma, M, K).excluded_measure for M in M_list]
    scaled = [M**c * mu for M, mu in zip(M_list, measures)]
    return ErgodicityCheck(float(gamma), float(c), int(K), M_list, measures, scaled)


def measure_bound_constant(gamma, K):
    """Sum over the truncated box of the individual interval lengths times M (iota = psi).

    An M-independent upper bound on M * excluded_measure for the identity profile.
    """
    m, n = _mode_box(K)
    pos = n > 0
    return float(np.sum(2.0 / (n[pos] * np.hypot(m[pos], n[pos]) ** gamma)))

