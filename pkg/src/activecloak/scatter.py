"""Sound-soft scattering by the method of fundamental solutions.

The scattered field is a sum of outgoing monopoles placed on a curve inside
the obstacle; strengths are fitted so the total field vanishes at boundary
collocation points.

For curves whose parametrization extends to complex arguments the sources sit
on z(t + i tau) with tau = -log(shrink), where z = x + i y is the boundary in
complex notation. For a circle this is the boundary scaled by ``shrink`` about
its center; for other analytic curves it follows the analytic continuation of
the boundary, which keeps the sources clear of the singularities of the
continued scattered field. Non-analytic curves fall back to scaling about the
centroid.
"""

from dataclasses import dataclass

import numpy as np

from activecloak.errors import GeometryError
from activecloak.geometry import in_region_R, inside_curve
from activecloak.specfun import bessel_tables
from activecloak.svd_cloak import truncated_lstsq

MFS_CUTOFF = 1e-13
DEFAULT_SHRINK = 0.7
# the kite's continued field is singular beyond tau ~ 0.3; 0.85 gives tau ~ 0.16
CURVE_SHRINK = {"circle": 0.7, "kite": 0.85}


def _monopole_matrix(ctx, x, sources):
    d = x[:, None, :] - sources[None, :, :]
    r = np.hypot(d[..., 0], d[..., 1])
    J, Y = bessel_tables(0, ctx.k * r)
    return 0.25j * (J[0] + 1j * Y[0])


@dataclass(frozen=True, eq=False)
class ScatteredField:
    """Outgoing field sum_k strengths[k] G(x, sources[k])."""

    ctx: object
    obstacle: object
    sources: np.ndarray
    strengths: np.ndarray
    residual: float

    def value(self, x, chunk=2048):
        x = np.asarray(x, dtype=float)
        flat = x.reshape(-1, 2)
        out = np.empty(len(flat), dtype=complex)
        for lo in range(0, len(flat), chunk):
            out[lo:lo + chunk] = _monopole_matrix(self.ctx, flat[lo:lo + chunk], self.sources) @ self.strengths
        return out.reshape(x.shape[:-1])


class _FieldSum:
    def __init__(self, *fields):
        self.fields = fields

    def value(self, x):
        return sum(np.asarray(f.value(x)) for f in self.fields)


def _boundary(obstacle, n):
    t = 2 * np.pi * np.arange(n) / n
    return np.asarray(obstacle.param(t), dtype=float)


def source_points(obstacle, n, shrink):
    """Auxiliary source locations for ``n`` sources; see the module docstring."""
    t = 2 * np.pi * np.arange(n) / n
    if obstacle.analytic:
        xy = np.asarray(obstacle.param(t + 1j * (-np.log(shrink))))
        z = xy[:, 0] + 1j * xy[:, 1]
        return np.stack([z.real, z.imag], axis=-1)
    c = obstacle.centroid
    return c + shrink * (_boundary(obstacle, n) - c)


def solve_scattering(ctx, obstacle, incident, n_src=256, src_shrink=None):
    """Fit monopole strengths so incident + scattered vanishes on the obstacle.

    ``incident`` only needs a ``value`` method. The achieved residual is the
    maximum of |incident + scattered| at 4 * n_src boundary check points,
    relative to the maximum of |incident| there (absolute when the incident
    field vanishes on the boundary). ``src_shrink`` defaults to a per-curve
    value from ``CURVE_SHRINK``.
    """
    if n_src < 16:
        raise ValueError("n_src must be at least 16")
    if src_shrink is None:
        src_shrink = CURVE_SHRINK.get(obstacle.name, DEFAULT_SHRINK)
    if not 0 < src_shrink < 1:
        raise ValueError("src_shrink must lie in (0, 1)")
    sources = source_points(obstacle, n_src, src_shrink)
    if not np.all(inside_curve(sources, obstacle)):
        raise GeometryError("shrunken source curve leaves the obstacle")
    colloc = _boundary(obstacle, 2 * n_src)
    A = _monopole_matrix(ctx, colloc, sources)
    rhs = -np.asarray(incident.value(colloc), dtype=complex)
    if np.any(rhs != 0):
        strengths, _, _ = truncated_lstsq(A, rhs, MFS_CUTOFF)
    else:
        strengths = np.zeros(n_src, dtype=complex)
    check = _boundary(obstacle, 4 * n_src)
    field = ScatteredField(ctx, obstacle, sources, strengths, 0.0)
    inc = np.asarray(incident.value(check))
    total = np.abs(inc + field.value(check))
    scale = np.max(np.abs(inc))
    residual = float(np.max(total) / scale) if scale > 0 else float(np.max(total))
    return ScatteredField(ctx, obstacle, sources, strengths, residual)


def scattering_suppression(obstacle, u_i, sol, probe_radius, n_src=256, n_probe=256, src_shrink=None):
    """||u_s with cloak|| / ||u_s without cloak|| on a circle of radius ``probe_radius``.

    ``sol`` is any field with a ``value`` method placed around the obstacle
    (typically a :class:`CloakSolution`); when it carries a layout the
    obstacle must lie inside the effective cloaked region.
    """
    layout = getattr(sol, "layout", None)
    if layout is not None:
        pts = obstacle.dense(1024)
        if not (np.all(in_region_R(pts, layout)) and np.all(inside_curve(pts, layout.curve))):
            raise GeometryError("obstacle is not inside the effective cloaked region")
    ctx = sol.ctx
    t = 2 * np.pi * np.arange(n_probe) / n_probe
    probe = probe_radius * np.stack([np.cos(t), np.sin(t)], axis=-1)
    bare = solve_scattering(ctx, obstacle, u_i, n_src, src_shrink)
    cloaked = solve_scattering(ctx, obstacle, _FieldSum(u_i, sol), n_src, src_shrink)
    num = np.linalg.norm(cloaked.value(probe))
    den = np.linalg.norm(bare.value(probe))
    return float(num / den)
