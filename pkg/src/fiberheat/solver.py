"""Assembly and solution of the anisotropic heat equation on a flux grid.

The flux ``b grad_b T + eps grad_perp T`` is written as ``D grad T`` with
``D = eps g^-1 + (1 - eps) b b``, and the divergence-form operator
``-(1/sqrt g) d_i (sqrt g D^ij d_j T)`` is discretised with the corner-gradient
finite-volume scheme of :mod:`fiberheat._stencil`. Dirichlet values sit on the
two psi-extreme surfaces and are eliminated, leaving an SPD system for the
interior nodes that is solved with preconditioned conjugate gradients.
"""
from __future__ import annotations

import csv
import math
import time
from dataclasses import asdict, dataclass, field as dc_field
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from scipy.linalg import eigvalsh_tridiagonal
from scipy.sparse.linalg import spsolve_triangular, splu

from ._stencil import CornerStencil
from .errors import GridMismatch, InvalidParameter, NonSPD, NoConvergence
from .field import FieldModel, eval_diffusion_tensor
from .fluxgeom import FluxGrid, ScalarField

PRECONDITIONERS = ("jacobi", "sgs", "surface", "none")
PROBE_SIZE = 500
LOG_COLUMNS = ("model", "eps", "n_psi", "n_theta", "n_phi", "iters", "residual", "seconds")


@dataclass(eq=False)
class SparseOperator:
    """Assembled operator on all grid nodes, plus what is needed to apply it matrix-free."""

    grid: FluxGrid
    field: FieldModel
    eps: float
    matrix: sp.csr_matrix
    tensor: np.ndarray  # sqrt(g) D at the nodes
    stencil: CornerStencil = dc_field(repr=False)

    @property
    def dimension(self):
        return self.matrix.shape[0]

    @property
    def dirichlet(self):
        mask = np.zeros(self.grid.shape, dtype=bool)
        mask[[0, -1]] = True
        return mask.ravel()

    @property
    def surface_size(self):
        return int(np.prod(self.grid.surface_shape))

    def interior_slice(self):
        ns = self.surface_size
        return slice(ns, self.dimension - ns)

    def interior_matrix(self):
        if not hasattr(self, "_A_II"):
            s = self.interior_slice()
            self._A_II = self.matrix[s, s].tocsr()
        return self._A_II

    def apply(self, u):
        """Matrix-free product on node arrays (no boundary masking)."""
        u = np.asarray(u, dtype=float).reshape(self.grid.shape)
        return self.stencil.apply(u, self.tensor)

    def symmetry_defect(self):
        diff = self.matrix - self.matrix.T
        return float(np.max(np.abs(diff.data))) if diff.nnz else 0.0


@dataclass
class SolveReport:
    model: str
    eps: float
    n_psi: int
    n_theta: int
    n_phi: int
    iters: int
    residual: float
    seconds: float
    preconditioner: str = "jacobi"
    tol: float = 1e-10
    ritz_min: float | None = None
    ritz_max: float | None = None

    def log_row(self):
        d = asdict(self)
        return [d[c] for c in LOG_COLUMNS]


def node_tensor(field: FieldModel, grid: FluxGrid, eps: float):
    """sqrt(g) D at every node, shape ``grid.shape + (dim, dim)``."""
    D = eval_diffusion_tensor(field, grid.coords, eps, grid.metric)
    return grid.sqrt_g[..., None, None] * D


def assemble(field: FieldModel, grid: FluxGrid, eps: float, probe=True, seed=0) -> SparseOperator:
    """Assemble the symmetric finite-volume operator for ``eps``.

    With ``probe`` set, a Cholesky factorisation of a random principal
    submatrix (500 interior nodes, fixed seed) is attempted and
    :class:`NonSPD` raised if it fails.
    """
    if grid.field != field:
        raise GridMismatch("grid was built for a different field")
    K = node_tensor(field, grid, eps)
    st = CornerStencil(grid)
    G = st.gradient_matrix()
    idx = np.arange(grid.size).reshape(grid.shape)
    n_loc = len(st.offsets)
    local = np.stack([st.take(idx, o).ravel() for o in st.offsets], axis=1)
    n_cells = local.shape[0]

    elem = np.zeros((n_cells, n_loc, n_loc))
    for ci, c in enumerate(st.offsets):
        Kc = st.take(K, c).reshape(n_cells, grid.dim, grid.dim)
        KG = np.einsum("nij,jb->nib", Kc, G[ci])
        elem += np.einsum("ia,nib->nab", G[ci], KG)
    elem *= st.weight
    elem = 0.5 * (elem + np.swapaxes(elem, 1, 2))

    rows = np.repeat(local, n_loc, axis=1).ravel()
    cols = np.tile(local, (1, n_loc)).ravel()
    A = sp.coo_matrix((elem.ravel(), (rows, cols)), shape=(grid.size, grid.size)).tocsr()
    A = ((A + A.T) * 0.5).tocsr()
    A.sort_indices()
    op = SparseOperator(grid, field, float(eps), A, K, st)
    if probe:
        cholesky_probe(op, seed=seed)
    return op


def cholesky_probe(op: SparseOperator, size=PROBE_SIZE, seed=0):
    A_II = op.interior_matrix()
    n = A_II.shape[0]
    rng = np.random.default_rng(seed)
    pick = np.sort(rng.choice(n, size=min(size, n), replace=False))
    block = A_II[pick][:, pick].toarray()
    try:
        np.linalg.cholesky(block)
    except np.linalg.LinAlgError:
        raise NonSPD(f"Cholesky probe of a {len(pick)}-node principal submatrix failed") from None


# ---------------------------------------------------------------------------
# preconditioners
# ---------------------------------------------------------------------------

def _jacobi(A):
    inv = 1.0 / A.diagonal()
    return lambda r: inv * r


def _sgs(A):
    d = A.diagonal()
    lower = sp.tril(A, format="csr")
    upper = sp.triu(A, format="csr")

    def apply(r):
        y = spsolve_triangular(lower, r, lower=True)
        return spsolve_triangular(upper, d * y, lower=False)

    return apply


def _surface_blocks(A, block):
    """Exact solves with the couplings inside each psi surface (block Jacobi)."""
    coo = A.tocoo()
    keep = (coo.row // block) == (coo.col // block)
    Ab = sp.csc_matrix((coo.data[keep], (coo.row[keep], coo.col[keep])), shape=A.shape)
    lu = splu(Ab)
    return lu.solve


def make_preconditioner(A, kind, block=None):
    if kind == "jacobi":
        return _jacobi(A)
    if kind == "sgs":
        return _sgs(A)
    if kind == "surface":
        return _surface_blocks(A, block)
    if kind == "none":
        return lambda r: r
    raise InvalidParameter(f"unknown preconditioner {kind!r}; expected one of {PRECONDITIONERS}")


# ---------------------------------------------------------------------------
# conjugate gradients
# ---------------------------------------------------------------------------

def pcg(A, b, x0, precond, tol=1e-10, maxiter=None, ritz=False, accept=None):
    """Preconditioned CG stopping at ||b - A x|| <= tol ||b||.

    ``accept(x, r)``, when given, is an extra stopping test consulted once the
    residual norm is small enough; iteration continues until it also holds.
    When the recursively updated residual has drifted from the true one, the
    iteration restarts from the true residual. Returns
    ``(x, iterations, relative_residual, ritz_values)``; the Ritz values of the
    preconditioned operator come from the Lanczos tridiagonal assembled from
    the CG coefficients of the first cycle (empty when ``ritz`` is false).
    """
    n = b.shape[0]
    maxiter = math.ceil(50 * math.sqrt(n)) if maxiter is None else maxiter
    bnorm = np.linalg.norm(b)
    x = np.array(x0, dtype=float)
    if bnorm == 0.0:
        x[:] = 0.0
        return x, 0, 0.0, np.array([])
    target = tol * bnorm
    alphas, betas = [], []
    it = 0
    first_cycle = True
    while True:
        r = b - A @ x
        rnorm = np.linalg.norm(r)
        if rnorm <= target and (accept is None or accept(x, r)):
            break
        if it >= maxiter:
            raise NoConvergence(
                f"PCG reached the iteration cap ({maxiter}) at relative residual "
                f"{rnorm / bnorm:.3e} (tol {tol:.1e})", iterations=it, residual=rnorm / bnorm)
        z = precond(r)
        p = z.copy()
        rz = r @ z
        while it < maxiter:
            Ap = A @ p
            pAp = p @ Ap
            if pAp <= 0.0:
                raise NonSPD(f"non-positive curvature p.Ap = {pAp:.3e} at iteration {it}")
            alpha = rz / pAp
            x += alpha * p
            r -= alpha * Ap
            it += 1
            rnorm = np.linalg.norm(r)
            z = precond(r)
            rz_new = r @ z
            beta = rz_new / rz
            rz = rz_new
            p = z + beta * p
            if first_cycle:
                alphas.append(alpha)
                betas.append(beta)
            if rnorm <= target and (accept is None or accept(x, r)):
                break
        first_cycle = False
    relres = float(rnorm / bnorm)
    return x, it, relres, (_ritz(alphas, betas) if ritz and alphas else np.array([]))


def _ritz(alphas, betas):
    a = np.asarray(alphas)
    b = np.asarray(betas)
    diag = 1.0 / a
    diag[1:] += b[:-1] / a[:-1]
    off = np.sqrt(b[:-1]) / a[:-1]
    return eigvalsh_tridiagonal(diag, off)


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------

def solve_temperature(op: SparseOperator, T_minus: float, T_plus: float, tol=1e-10,
                      preconditioner="jacobi", maxiter=None, ritz=False, flux_check=True):
    """Solve for the interior temperatures with T = T_minus / T_plus on the extreme surfaces.

    Besides ``||r|| <= tol ||b||``, the iteration by default also requires the
    heat flux through every intermediate surface to match the flux through
    the first one to ``tol`` relative (``flux_check``). A small residual that
    is smooth along the surfaces can otherwise add up to a flux drift of
    order ``sqrt(n_psi) * tol``.

    Returns ``(ScalarField, SolveReport)``. Raises :class:`NoConvergence` when
    the iteration cap (default ``ceil(50 sqrt(n_interior))``) is reached first.
    """
    if not 0.0 < tol < 1.0:
        raise InvalidParameter(f"tol must lie in (0, 1), got {tol}")
    grid = op.grid
    start = time.perf_counter()
    ns = op.surface_size
    s = op.interior_slice()
    A = op.matrix
    A_II = op.interior_matrix()
    b = -(A[s, :ns] @ np.full(ns, float(T_minus)) + A[s, -ns:] @ np.full(ns, float(T_plus)))

    lo, hi = grid.field.psi_range
    frac = (grid.coords[0] - lo) / (hi - lo)
    T = T_minus + (T_plus - T_minus) * frac
    T = np.array(T, dtype=float)
    T[0], T[-1] = T_minus, T_plus
    flat = T.reshape(-1)

    M = make_preconditioner(A_II, preconditioner, block=ns)
    boundary_rows = A[:ns]
    boundary_T = np.full(ns, float(T_minus))
    abs_A = abs(A_II)
    unit = np.finfo(float).eps

    def flux_consistent(x, r):
        # flux through psi_{k+1/2} minus flux through psi_{1/2} = -(cumulative layer sums of r)
        phi = -(boundary_rows @ np.concatenate([boundary_T, x, np.full(ns, float(T_plus))])).sum()
        drift = np.max(np.abs(np.cumsum(r.reshape(-1, ns).sum(axis=1))))
        # rounding in forming r limits how small its layer sums can get; the
        # per-row errors add up like a random walk, hence the 2-norm
        floor = 16.0 * unit * float(np.linalg.norm(np.abs(b) + abs_A @ np.abs(x)))
        return drift <= max(tol * abs(phi), floor)

    check = flux_consistent if flux_check and T_minus != T_plus else None
    x, iters, relres, ritz_vals = pcg(A_II, b, flat[s], M, tol=tol, maxiter=maxiter,
                                      ritz=ritz, accept=check)
    flat[s] = x
    seconds = time.perf_counter() - start
    report = SolveReport(
        grid.field.kind, float(op.eps), grid.n_psi, grid.n_theta, grid.n_phi,
        int(iters), relres, seconds, preconditioner, tol,
        float(ritz_vals[0]) if ritz_vals.size else None,
        float(ritz_vals[-1]) if ritz_vals.size else None,
    )
    return ScalarField(grid, T, {"T_minus": T_minus, "T_plus": T_plus}), report


def surface_fluxes(op: SparseOperator, T) -> np.ndarray:
    """Discrete heat flux through each half-way surface psi_{k+1/2}, k = 0 .. n_psi - 2.

    The flux between the layers ``<= k`` and ``> k`` is ``sum A_ij (T_i - T_j)``
    over the crossing couplings, which equals ``-sum_{layers <= k} (A T)_i``
    because the rows of ``A`` sum to zero. It is positive when T increases with psi.
    """
    values = T.values if isinstance(T, ScalarField) else np.asarray(T)
    AT = (op.matrix @ values.reshape(-1)).reshape(op.grid.shape)
    per_layer = AT.reshape(op.grid.n_psi, -1).sum(axis=1)
    return -np.cumsum(per_layer)[:-1]


def append_solve_log(path, reports):
    """Append SolveReport rows to a CSV log, writing the header on first use."""
    path = Path(path)
    new = not path.exists() or path.stat().st_size == 0
    with path.open("a", newline="") as fh:
        w = csv.writer(fh)
        if new:
            w.writerow(LOG_COLUMNS)
        for rep in reports:
            w.writerow(rep.log_row())
    return path
