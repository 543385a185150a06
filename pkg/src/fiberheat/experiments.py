"""Named experiments: sweeps over eps, grids and field parameters.

Every experiment returns an :class:`ExperimentResult` holding data tables
(written as CSV), summary rows with fitted rates and pass/fail flags, and the
solver reports (written to the timing log, the only place wall-clock values
appear). Solves are independent: each :class:`SolveCase` builds its own field,
grid and operator, so an eps sweep can be spread over a process pool.

Data tables per experiment (columns in order):

``annulus2d``
    annulus_runs.csv: eps, n_psi, n_theta, max_err, max_err_profile, bound, iters
``channel2d`` / ``torus-integrable``
    <name>_runs.csv: the columns of :data:`fiberheat.analysis.REPORT_COLUMNS`, iters
``torus-perturbed``
    perturbed_runs.csv: amplitude, a_exponent, then the same columns
``noninteg-volume``
    noninteg_runs.csv: model, amplitude, a_exponent, eps, noninteg_volume, fraction, max_ratio
``diophantine-scan``
    diophantine_runs.csv: M, excluded_measure, M_measure, Mc_measure, n_intervals, mismatches;
    diophantine_intervals.csv (largest M); diophantine_constants.csv
``mde-demo``
    mde_runs.csv: case, iota, K, v_norm, w_norm, rel_error, status
``geometry-selftest``
    geometry_runs.csv: model, check, n_psi, value

summary.csv always has: quantity, value, target, passed.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field as dc_field
from typing import Callable

import numpy as np
from numpy.polynomial import Polynomial

from .analysis import REPORT_COLUMNS, error_report, fit_rate, max_noninteg_ratio
from .config import ExperimentConfig
from .effective import compatibility_residual, effective_profile
from .ergodic import (IotaProfile, check_ergodicity_condition, ergodicity_constant,
                      excluded_intervals, measure_bound_constant, pointwise_excluded)
from .errors import FiberHeatError, InvariantViolation, NonPositiveData, SmallDivisor
from .field import make_field
from .fluxgeom import FluxGrid, gamma_derivative_residual, volume_integral
from .mde import (SurfaceSpectrum, apply_symbol, field_line_derivative, forward_transform,
                  inverse_transform, mde_rhs, solve_mde, sobolev_norm, surface_weight)
from .solver import assemble, solve_temperature, surface_fluxes

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
BRUTE_FORCE_POINTS = 100_000
MAX_PRINCIPLE_SLACK = 1e-12


@dataclass
class Table:
    filename: str
    columns: tuple
    rows: list = dc_field(default_factory=list)


@dataclass
class ExperimentResult:
    tables: list = dc_field(default_factory=list)
    summary: list = dc_field(default_factory=list)  # (quantity, value, target, passed)
    solves: list = dc_field(default_factory=list)

    def add_summary(self, quantity, value, target="", passed=None):
        self.summary.append((quantity, value, target, "" if passed is None else bool(passed)))


# ---------------------------------------------------------------------------
# independent solves
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SolveCase:
    field_spec: tuple  # sorted (key, value) pairs, hashable and picklable
    dims: tuple
    eps: float
    T_minus: float
    T_plus: float
    tol: float
    preconditioner: str
    maxiter: int | None


@dataclass
class CaseResult:
    report: object = None
    solve: object = None
    max_abs_rho: float = float("nan")
    max_err_exact: float = float("nan")
    max_ratio: float = float("nan")
    volume: float = float("nan")
    failure: tuple | None = None  # (exception class name, message, invariant?)


def _freeze(spec):
    return tuple(sorted((k, tuple(map(tuple, v)) if k == "harmonics" else
                         tuple(v) if isinstance(v, list) else v) for k, v in spec.items()))


def annulus_theta_exact(field, psi, T_minus, T_plus):
    """Radial oracle: Theta is linear in log r on the annulus."""
    r = np.asarray(psi, dtype=float)
    if field.label == "half_square":
        r = np.sqrt(2.0 * r)
    frac = np.log(r / field.r_inner) / np.log(field.r_outer / field.r_inner)
    return T_minus + (T_plus - T_minus) * frac


def annulus_theta_curvature(field, T_minus, T_plus):
    """sup |Theta''| in the annulus label."""
    r = np.linspace(field.r_inner, field.r_outer, 4001)
    L = np.log(field.r_outer / field.r_inner)
    if field.label == "half_square":  # Theta = log(2 psi) / (2 L): Theta'' = -1 / (2 L psi^2)
        second = 1.0 / (2.0 * L * (r**2 / 2.0) ** 2)
    else:
        second = 1.0 / (L * r**2)
    return float(abs(T_plus - T_minus) * np.max(second))


def solve_case(case: SolveCase) -> CaseResult:
    """Assemble, solve and measure one configuration; never raises library errors."""
    try:
        field = make_field(dict(case.field_spec))
        grid = FluxGrid(field, *case.dims)
        op = assemble(field, grid, case.eps)
        T, rep = solve_temperature(op, case.T_minus, case.T_plus, tol=case.tol,
                                   preconditioner=case.preconditioner, maxiter=case.maxiter)
        lo, hi = sorted((case.T_minus, case.T_plus))
        overshoot = max(float(T.values.max()) - hi, lo - float(T.values.min()))
        if overshoot > MAX_PRINCIPLE_SLACK * max(1.0, hi - lo):
            raise InvariantViolation(f"maximum principle violated by {overshoot:.3e} at eps={case.eps}")
        flux = surface_fluxes(op, T)
        if case.T_minus != case.T_plus:
            spread = float(np.max(np.abs(flux - flux[0])) / abs(flux[0]))
            if spread > 10.0 * case.tol:
                raise InvariantViolation(f"surface fluxes differ by {spread:.3e} relative at eps={case.eps}")
        profile = effective_profile(field, grid, case.T_minus, case.T_plus)
        out = CaseResult(error_report(T, profile, field, grid, case.eps), rep)
        out.max_abs_rho = float(np.max(np.abs(T.values - profile.on_grid(grid))))
        out.max_ratio = max_noninteg_ratio(T, field, grid, case.eps)
        out.volume = volume_integral(grid, 1.0)
        if field.kind == "Annulus2D":
            exact = annulus_theta_exact(field, grid.coords[0], case.T_minus, case.T_plus)
            out.max_err_exact = float(np.max(np.abs(T.values - exact)))
        return out
    except FiberHeatError as exc:
        return CaseResult(failure=(type(exc).__name__, str(exc), isinstance(exc, InvariantViolation)))


class CaseFailed(FiberHeatError):
    """A solve in the sweep failed; carries the original error's name."""

    def __init__(self, name, message, invariant):
        super().__init__(f"{name}: {message}")
        self.invariant = invariant


def run_cases(cases, workers=1):
    """Solve every case, in order; a pool of ``workers`` processes when > 1."""
    if workers > 1 and len(cases) > 1:
        with ProcessPoolExecutor(max_workers=min(workers, len(cases))) as pool:
            results = list(pool.map(solve_case, cases))
    else:
        results = [solve_case(c) for c in cases]
    for r in results:
        if r.failure:
            raise CaseFailed(*r.failure)
    return results


def _cases(cfg: ExperimentConfig, field_spec, dims, eps_list):
    return [SolveCase(_freeze(field_spec), tuple(dims), float(e), cfg.T_minus, cfg.T_plus,
                      cfg.tol, cfg.preconditioner, cfg.maxiter) for e in eps_list]


def _report_rows(results):
    return [r.report.row() + [r.solve.iters] for r in results]


def _safe_fit(x, y):
    try:
        return fit_rate(x, y)
    except NonPositiveData:
        return (float("nan"),) * 3


# ---------------------------------------------------------------------------
# experiments
# ---------------------------------------------------------------------------

def run_annulus2d(cfg: ExperimentConfig, workers=1) -> ExperimentResult:
    """Exactness on the annulus: max |T_eps - Theta| against 5 h^2 sup|Theta''| and its refinement slope."""
    res = ExperimentResult()
    field = make_field(cfg.field)
    grids = [(n, n) for n in cfg.refinements] or [(cfg.n_psi, cfg.n_theta)]
    cases = [c for dims in grids for c in _cases(cfg, cfg.field, dims, cfg.eps_list)]
    results = run_cases(cases, workers)
    curv = annulus_theta_curvature(field, cfg.T_minus, cfg.T_plus)
    lo, hi = field.psi_range
    table = Table("annulus_runs.csv", ("eps", "n_psi", "n_theta", "max_err", "max_err_profile", "bound", "iters"))
    errs = {}
    for case, r in zip(cases, results):
        h = (hi - lo) / (case.dims[0] - 1)
        bound = 5.0 * h**2 * curv
        table.rows.append([case.eps, case.dims[0], case.dims[1], r.max_err_exact, r.max_abs_rho, bound, r.solve.iters])
        errs.setdefault(case.eps, []).append((h, r.max_err_exact))
        res.add_summary(f"max_err[eps={case.eps:g},n={case.dims[0]}]", r.max_err_exact, f"<= {bound:.6g}",
                        r.max_err_exact <= bound)
        res.solves.append(r.solve)
    for eps, pairs in errs.items():
        if len(pairs) >= 2:
            (h1, e1), (h2, e2) = pairs[-2], pairs[-1]
            slope = math.log(e1 / e2) / math.log(h1 / h2)
            res.add_summary(f"richardson_slope[eps={eps:g}]", slope, ">= 1.9", slope >= 1.9)
    res.tables.append(table)
    return res


def _rate_experiment(cfg, workers, filename, target_slope, require_decreasing=False):
    res = ExperimentResult()
    results = run_cases(_cases(cfg, cfg.field, cfg.grid_dims, cfg.eps_list), workers)
    res.tables.append(Table(filename, REPORT_COLUMNS + ("iters",), _report_rows(results)))
    res.solves = [r.solve for r in results]
    eps = [r.report.eps for r in results]
    h1 = [r.report.H1_rho for r in results]
    slope, intercept, r2 = _safe_fit(eps, h1)
    res.add_summary("H1_slope", slope, f">= {target_slope}", slope >= target_slope)
    res.add_summary("H1_r2", r2)
    res.add_summary("H1_intercept", intercept)
    for col in ("L2_rho", "Hb_rho", "Hperp_rho"):
        res.add_summary(f"{col}_slope", _safe_fit(eps, [getattr(r.report, col) for r in results])[0])
    if require_decreasing:
        dec = all(b < a for a, b in zip(h1, h1[1:]))
        res.add_summary("H1_strictly_decreasing", dec, "True", dec)
    return res


def run_channel2d(cfg, workers=1):
    """H1 error of the wavy channel against eps: first-order rate expected."""
    return _rate_experiment(cfg, workers, "channel_runs.csv", 0.9)


def run_torus_integrable(cfg, workers=1):
    """H1 error on the integrable torus: decreasing, at least eps^(1/3)."""
    return _rate_experiment(cfg, workers, "torus_integrable_runs.csv", 0.30, require_decreasing=True)


def run_torus_perturbed(cfg, workers=1):
    """Error norms with respect to b and the unperturbed b0 over amplitude and exponent sweeps."""
    res = ExperimentResult()
    combos = [(A, a) for a in (cfg.a_list or [0.5]) for A in (cfg.amplitudes or [0.1])]
    cases, tags = [], []
    for A, a in combos:
        spec = {**cfg.field, "amplitude": A, "a_exponent": a}
        new = _cases(cfg, spec, cfg.grid_dims, cfg.eps_list)
        cases += new
        tags += [(A, a)] * len(new)
    results = run_cases(cases, workers)
    table = Table("perturbed_runs.csv", ("amplitude", "a_exponent") + REPORT_COLUMNS + ("iters",))
    for (A, a), row in zip(tags, _report_rows(results)):
        table.rows.append([A, a] + row)
    res.tables.append(table)
    res.solves = [r.solve for r in results]
    for A, a in combos:
        sel = [r.report for t, r in zip(tags, results) if t == (A, a)]
        eps = [s.eps for s in sel]
        res.add_summary(f"H1_slope[A={A:g},a={a:g}]", _safe_fit(eps, [s.H1_rho for s in sel])[0])
        res.add_summary(f"Hb0_slope[A={A:g},a={a:g}]", _safe_fit(eps, [s.Hb0_rho for s in sel])[0])
    return res


def run_noninteg_volume(cfg, workers=1):
    """Measure of the set where parallel conduction dominates, integrable and perturbed."""
    res = ExperimentResult()
    base = {k: v for k, v in cfg.field.items() if k not in ("kind", "amplitude", "a_exponent", "harmonics", "envelope")}
    integ = {**base, "kind": "TorusIntegrable"}
    a = (cfg.a_list or [0.5])[0]
    pert = [{**cfg.field, "kind": "TorusPerturbed", "amplitude": A, "a_exponent": a}
            for A in (cfg.amplitudes or [0.05, 0.1, 0.2])]
    cases, tags = [], []
    for spec in [integ] + pert:
        new = _cases(cfg, spec, cfg.grid_dims, cfg.eps_list)
        cases += new
        tags += [(spec["kind"], spec.get("amplitude", 0.0))] * len(new)
    results = run_cases(cases, workers)
    table = Table("noninteg_runs.csv", ("model", "amplitude", "a_exponent", "eps", "noninteg_volume", "fraction", "max_ratio"))
    mu = {}
    for (kind, A), c, r in zip(tags, cases, results):
        vol = r.report.noninteg_volume
        table.rows.append([kind, A, a if kind == "TorusPerturbed" else 0.0, c.eps, vol, vol / r.volume, r.max_ratio])
        mu.setdefault((kind, A), []).append(vol / r.volume)
    res.tables.append(table)
    res.solves = [r.solve for r in results]

    fr = mu[("TorusIntegrable", 0.0)]
    mono = all(b <= a_ for a_, b in zip(fr, fr[1:]))
    res.add_summary("integrable_monotone", mono, "True", mono)
    res.add_summary("integrable_final_fraction", fr[-1], "<= 0.05", fr[-1] <= 0.05)
    amps = [A for kind, A in mu if kind == "TorusPerturbed"]
    for A in amps:
        f = mu[("TorusPerturbed", A)]
        ratio = f[-1] / f[-2] if len(f) >= 2 and f[-2] > 0 else float("nan")
        res.add_summary(f"plateau_ratio[A={A:g}]", ratio, "in [0.5, 2]", 0.5 <= ratio <= 2.0)
    last = [mu[("TorusPerturbed", A)][-1] for A in amps]
    if len(amps) >= 2:
        ok = all(y > 0 for y in last) and all(
            0.5 <= (y2 / y1) / (A2 / A1) ** 2 <= 2.0
            for (A1, y1), (A2, y2) in zip(zip(amps, last), zip(amps[1:], last[1:])))
        exponent = _safe_fit(amps, last)[0] if len(amps) >= 3 else float("nan")
        res.add_summary("amplitude_exponent", exponent, "~ 2 (ratios within 2x of A^2)", ok)
    return res


def _iota_profile(cfg):
    poly = Polynomial(cfg.iota)
    return IotaProfile(lambda psi: poly(np.asarray(psi, dtype=float)), (cfg.psi_min, cfg.psi_max))


def run_diophantine_scan(cfg, workers=1):
    """Excluded measure of the truncated Diophantine condition over M, checked pointwise."""
    res = ExperimentResult()
    prof = _iota_profile(cfg)
    lo, hi = prof.psi_range
    check = check_ergodicity_condition(prof, cfg.gamma, cfg.c, cfg.M_list, cfg.K)
    frac, _ = np.modf(np.arange(1, BRUTE_FORCE_POINTS + 1) * GOLDEN)
    psi = lo + (hi - lo) * frac
    iota_vals = prof.iota(psi)
    table = Table("diophantine_runs.csv", ("M", "excluded_measure", "M_measure", "Mc_measure", "n_intervals", "mismatches"))
    report = None
    total_mismatch = 0
    for M, mu, scaled in zip(check.M_list, check.measures, check.scaled):
        report = excluded_intervals(prof, cfg.gamma, M, cfg.K)
        mism = int(np.sum(report.contains(psi) != pointwise_excluded(iota_vals, cfg.gamma, M, cfg.K)))
        total_mismatch += mism
        table.rows.append([M, mu, M * mu, scaled, len(report.intervals), mism])
    res.tables.append(table)
    if report is not None:
        rows = [[x, y, m, n] for x, y, m, n in report.intervals]
        res.tables.append(Table("diophantine_intervals.csv", ("psi_lo", "psi_hi", "m", "n"), rows))
    psis = np.linspace(lo, hi, cfg.samples)
    consts = [[float(p), float(prof.iota(p)), ergodicity_constant(prof, p, cfg.gamma, cfg.K)] for p in psis]
    res.tables.append(Table("diophantine_constants.csv", ("psi", "iota", "M_psi"), consts))
    M_mu = [row[2] for row in table.rows]
    # each interval has iota-length 2 / (M n |k|^gamma); psi-length divides by |iota'|
    slope = np.abs(Polynomial(cfg.iota).deriv()(np.linspace(lo, hi, 1001)))
    bound = measure_bound_constant(cfg.gamma, cfg.K) / float(slope.min()) if slope.min() > 0 else float("inf")
    res.add_summary("max_M_measure", max(M_mu) if M_mu else float("nan"),
                    f"<= {bound:.6g}", bool(M_mu) and max(M_mu) <= bound)
    res.add_summary("Mc_measure_decreasing", check.decreasing, "True", check.decreasing)
    res.add_summary("membership_mismatches", total_mismatch, "0", total_mismatch == 0)
    return res


def _weyl_spectrum(K, index, psi):
    """Mean-free real spectrum with deterministic coefficients from the golden-ratio sequence."""
    spec = SurfaceSpectrum.zeros(K, psi)
    m, n = spec.modes()
    half = (n > 0) | ((n == 0) & (m > 0))
    count = int(np.sum(half))
    j = index * 2 * count + np.arange(2 * count)
    u, _ = np.modf((j + 1) * GOLDEN)
    coef = ((u[:count] - 0.5) + 1j * (u[count:] - 0.5)) / (1.0 + m[half] ** 2 + n[half] ** 2)
    spec.coeffs[half] = coef
    spec.coeffs[::-1, ::-1][half] = np.conj(coef)
    return spec


def run_mde_demo(cfg, workers=1):
    """Fourier inversion of the field-line operator on one surface, and the resonant obstruction."""
    res = ExperimentResult()
    field = make_field(cfg.field)
    iota = float(field.iota(cfg.psi))
    table = Table("mde_runs.csv", ("case", "iota", "K", "v_norm", "w_norm", "rel_error", "status"))
    worst = 0.0
    for k in range(cfg.samples):
        v = _weyl_spectrum(cfg.K, k, cfg.psi)
        w = solve_mde(field, cfg.psi, v, weight=1.0)
        back = apply_symbol(w, iota).coeffs
        err = float(np.max(np.abs(back - v.coeffs)) / np.max(np.abs(v.coeffs)))
        worst = max(worst, err)
        table.rows.append([f"sample{k}", iota, cfg.K, sobolev_norm(v, 0.0), sobolev_norm(w, 0.0), err, "ok"])
    res.add_summary("max_rel_error", worst, "<= 1e-12", worst <= 1e-12)

    # physical weight |J| |grad psi|: choose v = L(u) / weight so that V = L(u) has zero mean
    n = 2 * cfg.K + 1
    u_spec = _weyl_spectrum(cfg.K, cfg.samples, cfg.psi)
    weight = surface_weight(field, cfg.psi, n, n)
    u = inverse_transform(u_spec, (n, n))
    v = forward_transform(field_line_derivative(u, iota) / weight, cfg.psi, cfg.K)
    # truncation to the mode box leaves V a small mean; V_hat(0, 0) is linear in v_hat(0, 0)
    unit = mde_rhs(field, cfg.psi, SurfaceSpectrum.single_mode(cfg.K, 0, 0, 1.0, cfg.psi))[0, 0]
    v[0, 0] -= mde_rhs(field, cfg.psi, v)[0, 0] / unit
    w = solve_mde(field, cfg.psi, v)
    V = mde_rhs(field, cfg.psi, v)
    err = float(np.max(np.abs(apply_symbol(w, iota).coeffs - V.coeffs)) / np.max(np.abs(V.coeffs)))
    table.rows.append(["physical", iota, cfg.K, sobolev_norm(v, 0.0), sobolev_norm(w, 0.0), err, "ok"])
    res.add_summary("physical_rel_error", err, "<= 1e-12", err <= 1e-12)

    resonant = make_field({**cfg.field, "iota": [0.5]})
    v = SurfaceSpectrum.single_mode(cfg.K, 1, -2, 1.0, cfg.psi)
    try:
        solve_mde(resonant, cfg.psi, v, weight=1.0)
        status, mode = "solved", ""
    except SmallDivisor as exc:
        status, mode = f"SmallDivisor{exc.mode}", exc.mode
    table.rows.append(["resonant(1,-2)", 0.5, cfg.K, sobolev_norm(v, 0.0), "", "", status])
    res.add_summary("resonant_mode", str(mode), "(1, -2)", mode == (1, -2))
    res.tables.append(table)
    return res


CATALOG = (
    ("Annulus2D", {"kind": "Annulus2D"}, (64,)),
    ("Channel2D", {"kind": "Channel2D"}, (64,)),
    ("TorusIntegrable", {"kind": "TorusIntegrable"}, (16, 16)),
    ("TorusPerturbed", {"kind": "TorusPerturbed"}, (16, 16)),
)


def _order(ns, errs):
    return math.log(errs[-2] / errs[-1]) / math.log((ns[-1] - 1) / (ns[-2] - 1))


def run_geometry_selftest(cfg, workers=1):
    """Co-area identities and discrete-operator invariants on every catalog model."""
    res = ExperimentResult()
    table = Table("geometry_runs.csv", ("model", "check", "n_psi", "value"))
    ns = cfg.refinements or [65, 129, 257]
    for name, spec, angles in CATALOG:
        field = make_field(spec)
        deriv, compat = [], []
        for n in ns:
            grid = FluxGrid(field, n, *angles)
            F = grid.coords[0] ** 2 * (1.0 + 0.3 * np.cos(grid.coords[1]))
            deriv.append(float(np.max(gamma_derivative_residual(grid, F))))
            prof = effective_profile(field, grid, cfg.T_minus, cfg.T_plus)
            compat.append(float(np.max(np.abs(compatibility_residual(prof, field, grid)))))
            table.rows.append([name, "derivative_identity", n, deriv[-1]])
            table.rows.append([name, "compatibility", n, compat[-1]])
        for label, errs in (("derivative_identity", deriv), ("compatibility", compat)):
            order = _order(ns, errs) if len(ns) >= 2 else float("nan")
            res.add_summary(f"{label}_order[{name}]", order, ">= 1.9", order >= 1.9)

        grid = FluxGrid(field, 17, *[a // 2 for a in angles])
        op = assemble(field, grid, 0.01)
        sym = op.symmetry_defect()
        kernel = float(np.max(np.abs(op.matrix @ np.ones(op.dimension))))
        scale = float(np.max(np.abs(op.matrix.data)))
        table.rows.append([name, "symmetry_defect", grid.n_psi, sym])
        table.rows.append([name, "constant_kernel", grid.n_psi, kernel])
        res.add_summary(f"symmetry_defect[{name}]", sym, "0", sym == 0.0)
        res.add_summary(f"constant_kernel[{name}]", kernel, f"<= {1e-13 * scale:.3g}", kernel <= 1e-13 * scale)
        vol = volume_integral(grid, 1.0)
        table.rows.append([name, "volume", grid.n_psi, vol])
    res.tables.append(table)
    return res


@dataclass(frozen=True)
class Experiment:
    name: str
    runner: Callable
    defaults: Callable
    description: str


def _cfg(name, **kw):
    return ExperimentConfig(name, **kw)


TORUS = {"kind": "TorusIntegrable", "major_radius": 3.0, "psi_min": 0.5, "psi_max": 1.5, "iota": [0.0, 1.0]}

EXPERIMENTS = {e.name: e for e in (
    Experiment("annulus2d", run_annulus2d, lambda: _cfg(
        "annulus2d", field={"kind": "Annulus2D"}, n_psi=256, n_theta=256,
        eps_list=[1.0, 0.1, 0.01], refinements=[128, 256]),
        "exactness of the solver against the radial oracle"),
    Experiment("channel2d", run_channel2d, lambda: _cfg(
        "channel2d", field={"kind": "Channel2D", "delta": 0.15}, n_psi=256, n_theta=256,
        eps_list=[float(e) for e in np.logspace(-1, -3, 5)]),
        "first-order H1 rate in the wavy channel"),
    Experiment("torus-integrable", run_torus_integrable, lambda: _cfg(
        "torus-integrable", field=dict(TORUS), n_psi=48, n_theta=64, n_phi=64,
        eps_list=[1e-1, 3e-2, 1e-2, 3e-3]),
        "H1 bound on the integrable torus"),
    Experiment("torus-perturbed", run_torus_perturbed, lambda: _cfg(
        "torus-perturbed", field={**TORUS, "kind": "TorusPerturbed"}, n_psi=32, n_theta=48, n_phi=48,
        eps_list=[1e-1, 1e-2, 1e-3], amplitudes=[0.05, 0.1, 0.2], a_list=[0.5, 1.0]),
        "norms along b and b0 under amplitude and exponent sweeps"),
    Experiment("diophantine-scan", run_diophantine_scan, lambda: _cfg(
        "diophantine-scan", gamma=3.0, c=0.5, K=100, M_list=[10.0, 100.0, 1000.0, 10000.0],
        iota=[0.0, 1.0], psi_min=0.0, psi_max=1.0, samples=101),
        "measure of the excluded set and pointwise membership"),
    Experiment("mde-demo", run_mde_demo, lambda: _cfg(
        "mde-demo", field={**TORUS, "iota": [GOLDEN]}, n_phi=64, K=16, psi=1.0, samples=20),
        "spectral inversion of the field-line operator"),
    Experiment("noninteg-volume", run_noninteg_volume, lambda: _cfg(
        "noninteg-volume", field={**TORUS, "kind": "TorusPerturbed"}, n_psi=48, n_theta=64, n_phi=64,
        eps_list=[1e-2, 1e-3, 1e-4], amplitudes=[0.05, 0.1, 0.2], a_list=[0.5]),
        "volume of the region dominated by parallel conduction"),
    Experiment("geometry-selftest", run_geometry_selftest, lambda: _cfg(
        "geometry-selftest", refinements=[65, 129, 257]),
        "co-area identities and operator invariants on the catalog"),
)}


def default_config(name):
    """Defaults for a named experiment, or None when the name is unknown."""
    exp = EXPERIMENTS.get(name)
    return exp.defaults() if exp else None
