"""Cloak performance measures and the device-size estimate."""

from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from activecloak.errors import LevelSetNotFound
from activecloak.geometry import optimal_effective_radius
from activecloak.multipole_cloak import eval_device_field

N_CIRC = 256
TOUCHING_RADIUS = np.sqrt(3.0) / 2.0


def _circle(radius, n):
    t = 2 * np.pi * np.arange(n) / n
    return radius * np.stack([np.cos(t), np.sin(t)], axis=-1)


def _l2(values):
    # equispaced trapezoid; the common 2*pi*r/n factor cancels in every ratio
    return float(np.sqrt(np.sum(np.abs(values) ** 2)))


def interior_error(u_i, sol, delta, n_circ=N_CIRC):
    """||u_i + u_d|| / ||u_i|| on the circle of radius (1 - sqrt(3)/2) delta."""
    pts = _circle(optimal_effective_radius(delta), n_circ)
    ui = np.asarray(u_i.value(pts))
    return _l2(ui + eval_device_field(sol, pts)) / _l2(ui)


def radiation_error(u_i, sol, delta, n_circ=N_CIRC):
    """||u_d|| / ||u_i|| on the circle of radius 2 delta."""
    pts = _circle(2.0 * delta, n_circ)
    return _l2(eval_device_field(sol, pts)) / _l2(u_i.value(pts))


def _first_crossing(f, start, stop, step, tol):
    """Distance from ``start`` along the segment to the first point where f < 0."""
    seg = stop - start
    length = float(np.hypot(*seg))
    unit = seg / length
    ss = np.arange(step, length + 0.5 * step, step)
    ss[-1] = min(ss[-1], length)
    vals = f(start + ss[:, None] * unit)
    below = np.nonzero(vals < 0)[0]
    if below.size == 0:
        raise LevelSetNotFound("field magnitude stays above the level along the whole segment")
    i = below[0]
    if i == 0:
        # already below at the first step: a crossing exists only if the
        # field rises above the level closer to the start
        if f(start + tol * unit) < 0:
            raise LevelSetNotFound("field magnitude is below the level next to the device")
        lo, hi = tol, ss[0]
    else:
        lo, hi = ss[i - 1], ss[i]
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if f(start + mid * unit) < 0:
            hi = mid
        else:
            lo = mid
    return float(0.5 * (lo + hi))


def device_radius_estimate(sol, beta, delta=None, step=None, tol=None):
    """Largest distance, over devices and half-segments, to the level set |u_d| = beta.

    From each device, march toward the midpoint of the segment to each other
    device in steps of ``step`` (default one twentieth of a wavelength) and
    bisect the first crossing to ``tol`` (default delta * 1e-6). Returned as a
    fraction of ``delta`` (default: mean device distance from the origin).
    """
    if not beta > 0:
        raise ValueError("beta must be positive")
    pos = sol.layout.positions
    if len(pos) < 2:
        raise ValueError("need at least two devices")
    delta = float(np.mean(np.hypot(*pos.T))) if delta is None else float(delta)
    step = sol.ctx.wavelength / 20 if step is None else float(step)
    tol = delta * 1e-6 if tol is None else float(tol)

    def f(p):
        return np.abs(eval_device_field(sol, p)) - beta

    best = 0.0
    for i, xi in enumerate(pos):
        for j, xj in enumerate(pos):
            if i != j:
                best = max(best, _first_crossing(f, xi, 0.5 * (xi + xj), step, tol))
    return best / delta


@dataclass(frozen=True)
class CloakReport:
    interior_error: float
    radiation_error: float
    device_radius_over_delta: Optional[float]
    delta: float
    sigma: float
    M: int
    method: str
    beta: Optional[float]

    def as_dict(self):
        return asdict(self)


def cloak_report(u_i, sol, delta, sigma, beta=None, n_circ=N_CIRC):
    radius = None if beta is None else device_radius_estimate(sol, beta, delta)
    return CloakReport(
        interior_error(u_i, sol, delta, n_circ),
        radiation_error(u_i, sol, delta, n_circ),
        radius,
        float(delta),
        float(sigma),
        int(sol.M),
        sol.method,
        None if beta is None else float(beta),
    )
