"""Corner-gradient machinery for the cell-vertex finite-volume scheme.

A cell spans two consecutive psi surfaces and one angular step per angle. At
each of its ``2**dim`` corners the gradient is taken from the one-sided edge
differences that meet at that corner. The discrete energy is

    E(T) = sum_cells sum_corners w * g_c . K(corner) g_c,    w = prod(h) / 2**dim,

with ``K = sqrt(g) D`` sampled at the corner node. The operator ``A`` is the
Hessian of ``E / 2``: it is symmetric, positive semidefinite, annihilates
constants, and reproduces the usual 5-point/7-point stencil for diagonal K
together with a centred treatment of the mixed derivatives.
"""
from __future__ import annotations

from itertools import product

import numpy as np


class CornerStencil:
    def __init__(self, grid):
        self.dim = grid.dim
        self.h = np.asarray(grid.spacing, dtype=float)
        self.node_shape = grid.shape
        self.n_cells_psi = grid.n_psi - 1
        self.cell_shape = (self.n_cells_psi,) + grid.shape[1:]
        # local node / corner offsets, ordered like the bits of an integer
        self.offsets = [tuple(o) for o in product((0, 1), repeat=self.dim)]
        self.weight = float(np.prod(self.h)) / 2**self.dim
        self._index = {o: i for i, o in enumerate(self.offsets)}

    # -- gather / scatter ----------------------------------------------------
    def take(self, u, offset):
        """Values of node array ``u`` at local node ``offset`` of every cell.

        Trailing axes beyond the grid axes (tensor components) are carried along.
        """
        s = u[offset[0]: offset[0] + self.n_cells_psi]
        for axis in range(1, self.dim):
            if offset[axis]:
                s = np.roll(s, -1, axis=axis)
        return s

    def put(self, out, vals, offset):
        """Inverse of :meth:`take`: add per-cell ``vals`` onto ``out`` at ``offset``."""
        for axis in range(1, self.dim):
            if offset[axis]:
                vals = np.roll(vals, 1, axis=axis)
        out[offset[0]: offset[0] + self.n_cells_psi] += vals

    def edge(self, corner, axis):
        """Offsets of the two ends (low, high) of the edge along ``axis`` through ``corner``."""
        lo = list(corner)
        hi = list(corner)
        lo[axis], hi[axis] = 0, 1
        return tuple(lo), tuple(hi)

    # -- derived quantities --------------------------------------------------
    def corner_gradients(self, u):
        """Dict corner -> list of per-cell partial derivatives (one per axis)."""
        vals = {o: self.take(u, o) for o in self.offsets}
        grads = {}
        for c in self.offsets:
            g = []
            for i in range(self.dim):
                lo, hi = self.edge(c, i)
                g.append((vals[hi] - vals[lo]) / self.h[i])
            grads[c] = g
        return grads

    def gradient_matrix(self):
        """G[c, i, a]: derivative along axis i at corner c as a combination of local nodes."""
        n = len(self.offsets)
        G = np.zeros((n, self.dim, n))
        for ci, c in enumerate(self.offsets):
            for i in range(self.dim):
                lo, hi = self.edge(c, i)
                G[ci, i, self._index[hi]] = 1.0 / self.h[i]
                G[ci, i, self._index[lo]] = -1.0 / self.h[i]
        return G

    def apply(self, u, K):
        """Matrix-free ``A u`` for the node tensor field ``K`` (shape node_shape + (d, d))."""
        out = np.zeros(self.node_shape)
        grads = self.corner_gradients(u)
        for c in self.offsets:
            Kc = self.take(K, c)
            g = grads[c]
            for i in range(self.dim):
                q = sum(Kc[..., i, j] * g[j] for j in range(self.dim)) * (self.weight / self.h[i])
                lo, hi = self.edge(c, i)
                self.put(out, q, hi)
                self.put(out, -q, lo)
        return out

    def corner_average(self, per_corner):
        """Spread per-corner cell quantities back to nodes with the corner weights.

        Returns node sums of ``w * value``; dividing by the node sums of ``w``
        (``corner_average(1)``) gives the lumped nodal average.
        """
        out = np.zeros(self.node_shape)
        for c in self.offsets:
            v = per_corner(c) if callable(per_corner) else per_corner
            self.put(out, np.broadcast_to(v * self.weight, self.cell_shape).copy(), c)
        return out
