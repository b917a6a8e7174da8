"""Interior active cloak: single and double layer potentials on a closed curve.

For an incident field analytic inside the curve, the layer potentials with
monopole density -n.grad(u_i) and dipole density u_i produce a field equal to
-u_i inside the curve and zero outside. Both are discretized with the
trapezoidal rule on the curve nodes.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from activecloak.errors import NearBoundaryWarning, SingularityError
from activecloak.geometry import Curve
from activecloak.specfun import WaveContext, bessel_tables

BASE_NODES = 256
NODES_PER_WAVELENGTH = 8


@dataclass(frozen=True, eq=False)
class LayerDensities:
    """Monopole and dipole densities sampled at the nodes of ``curve``."""

    ctx: WaveContext
    curve: Curve
    monopole: np.ndarray
    dipole: np.ndarray

    def __post_init__(self):
        if self.monopole.shape != (self.curve.n,) or self.dipole.shape != (self.curve.n,):
            raise ValueError("densities must have one entry per curve node")
        if not (np.all(np.isfinite(self.monopole)) and np.all(np.isfinite(self.dipole))):
            raise ValueError("densities must be finite")

    def value(self, x):
        return interior_cloak_eval(self, x)


def default_node_count(ctx, curve_length, base=BASE_NODES):
    """Double ``base`` until the curve carries at least 8 nodes per wavelength."""
    n = int(base)
    while n * ctx.wavelength < NODES_PER_WAVELENGTH * curve_length:
        n *= 2
    return n


def build_densities(u_i, D, ctx):
    """Sample -n.grad(u_i) and u_i at the nodes of ``D``."""
    grad = np.asarray(u_i.gradient(D.points))
    mono = -np.einsum("ij,ij->i", D.normals, grad)
    dip = np.asarray(u_i.value(D.points), dtype=complex)
    return LayerDensities(ctx, D, mono.astype(complex), dip)


def layer_potential_kernels(ctx, x, nodes, normals):
    """G(x, y) and n(y).grad_y G(x, y) for every pair (point, node).

    Returns two arrays of shape (len(x), len(nodes)).
    """
    d = nodes[None, :, :] - x[:, None, :]
    r = np.hypot(d[..., 0], d[..., 1])
    if np.any(r == 0):
        raise SingularityError("evaluation point coincides with a quadrature node")
    J, Y = bessel_tables(1, ctx.k * r)
    h0 = J[0] + 1j * Y[0]
    h1 = J[1] + 1j * Y[1]
    G = 0.25j * h0
    ndot = np.einsum("pnc,nc->pn", d, normals) / r
    dG = -0.25j * ctx.k * h1 * ndot
    return G, dG


def interior_cloak_eval(dens, x, chunk=1024):
    """Trapezoidal Green's formula field at points ``x`` of shape (..., 2).

    Emits :class:`NearBoundaryWarning` when a point lies within two mean node
    spacings of the curve nodes, where plain quadrature loses accuracy.
    """
    x = np.asarray(x, dtype=float)
    flat = x.reshape(-1, 2)
    curve = dens.curve
    keep = curve.weights != 0
    nodes, normals, w = curve.points[keep], curve.normals[keep], curve.weights[keep]
    wm = w * dens.monopole[keep]
    wd = w * dens.dipole[keep]
    band = 2.0 * curve.speed.sum() * (2 * np.pi / curve.n) / curve.n
    out = np.empty(len(flat), dtype=complex)
    near = False
    for lo in range(0, len(flat), chunk):
        p = flat[lo:lo + chunk]
        G, dG = layer_potential_kernels(dens.ctx, p, nodes, normals)
        out[lo:lo + chunk] = G @ wm + dG @ wd
        if not near:
            dmin = np.min(np.hypot(*(curve.points[None] - p[:, None]).transpose(2, 0, 1)), axis=1)
            near = bool(np.any(dmin < band))
    if near:
        warnings.warn("evaluation within two node spacings of the quadrature curve",
                      NearBoundaryWarning, stacklevel=2)
    return out.reshape(x.shape[:-1])[()] if x.ndim == 1 else out.reshape(x.shape[:-1])
