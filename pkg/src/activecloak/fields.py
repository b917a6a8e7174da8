"""Incident fields with analytic gradients, superposition and raster sampling.

Any object with a ``value(points)`` method taking an array of shape (..., 2)
counts as a field for :func:`eval_grid`. Incident fields additionally provide
``gradient(points)`` returning shape (..., 2) complex.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from activecloak.errors import SingularityError
from activecloak.specfun import WaveContext, greens, greens_grad_y


class Field:
    """Base class: a time-harmonic field with value and gradient."""

    def value(self, x):
        raise NotImplementedError

    def gradient(self, x):
        raise NotImplementedError

    def __call__(self, x):
        return self.value(x)


@dataclass(frozen=True)
class ZeroField(Field):
    def value(self, x):
        x = np.asarray(x, dtype=float)
        return np.zeros(x.shape[:-1], dtype=complex)

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        return np.zeros(x.shape, dtype=complex)


@dataclass(frozen=True)
class PlaneWave(Field):
    """u(x) = exp(i k d.x) with d = (cos angle, sin angle)."""

    ctx: WaveContext
    angle: float
    amplitude: complex = 1.0

    @property
    def direction(self):
        return np.array([np.cos(self.angle), np.sin(self.angle)])

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return self.amplitude * np.exp(1j * self.ctx.k * (x @ self.direction))

    def gradient(self, x):
        u = self.value(x)
        return (1j * self.ctx.k * np.asarray(u))[..., None] * self.direction


@dataclass(frozen=True)
class PointSource(Field):
    """u(x) = G(x, y0), the outgoing field of a unit monopole at ``y0``."""

    ctx: WaveContext
    y0: tuple
    amplitude: complex = 1.0

    def value(self, x):
        return self.amplitude * np.asarray(greens(self.ctx, x, np.asarray(self.y0, dtype=float)))

    def gradient(self, x):
        # G is symmetric, so the x-gradient is the y-gradient with roles swapped
        return self.amplitude * greens_grad_y(self.ctx, np.asarray(self.y0, dtype=float), x)


@dataclass(frozen=True)
class Superposition(Field):
    """Weighted sum of fields. Gradients require every member to have one."""

    fields: tuple
    weights: tuple

    def value(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape[:-1], dtype=complex)
        for f, w in zip(self.fields, self.weights):
            out = out + w * np.asarray(f.value(x))
        return out

    def gradient(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        for f, w in zip(self.fields, self.weights):
            out = out + w * np.asarray(f.gradient(x))
        return out


def plane_wave(ctx, angle, amplitude=1.0):
    return PlaneWave(ctx, float(angle), amplitude)


def point_source(ctx, y0, amplitude=1.0):
    return PointSource(ctx, tuple(float(c) for c in y0), amplitude)


def superpose(fields: Sequence, weights: Sequence):
    fields, weights = tuple(fields), tuple(complex(w) for w in weights)
    if len(fields) != len(weights):
        raise ValueError(f"got {len(fields)} fields but {len(weights)} weights")
    return Superposition(fields, weights)


@dataclass(frozen=True, eq=False)
class FieldGrid:
    """Complex samples on a uniform rectangular raster.

    ``values[i, j]`` sits at ``(xs[j], ys[i])``: rows run along x, and row 0 is
    the bottom edge (y increasing with the row index). ``singular`` flags
    samples where the field could not be evaluated; their values are NaN.
    """

    window: tuple
    resolution: tuple
    values: np.ndarray
    singular: np.ndarray

    @property
    def xs(self):
        return np.linspace(self.window[0], self.window[1], self.resolution[0])

    @property
    def ys(self):
        return np.linspace(self.window[2], self.window[3], self.resolution[1])

    def points(self):
        return grid_points(self.window, self.resolution)


def grid_points(window, resolution):
    x0, x1, y0, y1 = (float(w) for w in window)
    nx, ny = (int(n) for n in resolution)
    X, Y = np.meshgrid(np.linspace(x0, x1, nx), np.linspace(y0, y1, ny))
    return np.stack([X, Y], axis=-1)


def _safe_values(field, pts):
    try:
        with np.errstate(all="ignore"):
            return np.asarray(field.value(pts), dtype=complex)
    except SingularityError:
        if len(pts) == 1:
            return np.array([np.nan + 0j])
        half = len(pts) // 2
        return np.concatenate([_safe_values(field, pts[:half]), _safe_values(field, pts[half:])])


def eval_grid(field, window, resolution, chunk=8192):
    """Sample ``field`` on the raster; singular points become flagged NaNs.

    Chunks that hit a singularity are bisected so only the offending samples
    are lost.
    """
    nx, ny = (int(n) for n in resolution)
    if nx < 2 or ny < 2:
        raise ValueError(f"resolution must be at least 2x2, got {resolution!r}")
    x0, x1, y0, y1 = (float(w) for w in window)
    if not (x1 > x0 and y1 > y0):
        raise ValueError(f"window must have x_min < x_max and y_min < y_max, got {window!r}")
    pts = grid_points(window, (nx, ny)).reshape(-1, 2)
    vals = np.concatenate([_safe_values(field, pts[i:i + chunk]) for i in range(0, len(pts), chunk)])
    bad = ~np.isfinite(vals)
    vals[bad] = np.nan
    return FieldGrid((x0, x1, y0, y1), (nx, ny), vals.reshape(ny, nx), bad.reshape(ny, nx))
