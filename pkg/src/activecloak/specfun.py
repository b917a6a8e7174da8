"""Bessel and Hankel functions, cylindrical waves and the 2D Green's function.

Points are numpy arrays with a trailing axis of length 2; every function
broadcasts over the leading axes. Angles are taken with ``arctan2`` and lie
in (-pi, pi].
"""

from dataclasses import dataclass

import numpy as np

from activecloak import kernels
from activecloak.errors import DomainError, SingularityError

MAX_ORDER = 1024


@dataclass(frozen=True)
class WaveContext:
    """Fixed-frequency setting: wavenumber ``k`` and wavelength 2*pi/k."""

    k: float

    def __post_init__(self):
        if not (np.isfinite(self.k) and self.k > 0):
            raise ValueError(f"wavenumber must be positive and finite, got {self.k!r}")

    @property
    def wavelength(self):
        return 2.0 * np.pi / self.k

    @classmethod
    def from_wavelength(cls, wavelength):
        return cls(2.0 * np.pi / wavelength)


def _scalarize(a):
    a = np.asarray(a)
    return a[()] if a.ndim == 0 else a


def _check_order(n):
    if not isinstance(n, (int, np.integer)):
        raise DomainError(f"order must be an integer, got {n!r}")
    if abs(n) > MAX_ORDER:
        raise DomainError(f"|order| {abs(n)} exceeds supported maximum {MAX_ORDER}")
    return int(n)


def bessel_tables(nmax, t, want_y=True):
    """J_n(t), Y_n(t) for n = 0..nmax, shape (nmax + 1,) + t.shape."""
    return kernels.jy_table(int(nmax), np.asarray(t, dtype=float), want_y)


def bessel_j(n, t):
    """Bessel function of the first kind J_n(t) for t >= 0."""
    n = _check_order(n)
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or not np.all(np.isfinite(t)):
        raise DomainError("J_n requires finite t >= 0")
    J, _ = bessel_tables(abs(n), t, want_y=False)
    sign = -1.0 if (n < 0 and n % 2) else 1.0
    return _scalarize(sign * J[abs(n)])


def bessel_j_y(n, t):
    """Return ``(J_n(t), Y_n(t))`` for t > 0.

    Negative orders use J_{-n} = (-1)^n J_n and Y_{-n} = (-1)^n Y_n.
    """
    n = _check_order(n)
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0) or not np.all(np.isfinite(t)):
        raise DomainError("Y_n requires finite t > 0")
    J, Y = bessel_tables(abs(n), t)
    sign = -1.0 if (n < 0 and n % 2) else 1.0
    return _scalarize(sign * J[abs(n)]), _scalarize(sign * Y[abs(n)])


def hankel1(n, t):
    """Hankel function of the first kind H_n^(1)(t) = J_n(t) + i Y_n(t)."""
    j, y = bessel_j_y(n, t)
    return _scalarize(np.asarray(j) + 1j * np.asarray(y))


def perp(v):
    """Rotate vectors by +90 degrees: (x, y) -> (-y, x)."""
    v = np.asarray(v)
    return np.stack([-v[..., 1], v[..., 0]], axis=-1)


def polar(v):
    v = np.asarray(v, dtype=float)
    return np.hypot(v[..., 0], v[..., 1]), np.arctan2(v[..., 1], v[..., 0])


def cyl_wave(kind, m, ctx, v):
    """Entire wave U_m or radiating wave V_m evaluated at ``v``.

    U_m(v) = J_m(k|v|) exp(i m arg v),  V_m(v) = H_m^(1)(k|v|) exp(i m arg v).
    """
    m = _check_order(m)
    r, theta = polar(v)
    phase = np.exp(1j * m * theta)
    if kind == "entire":
        return _scalarize(bessel_j(m, ctx.k * r) * phase)
    if kind == "radiating":
        if np.any(r == 0):
            raise SingularityError("radiating cylindrical wave is singular at the origin")
        return _scalarize(hankel1(m, ctx.k * r) * phase)
    raise ValueError(f"kind must be 'entire' or 'radiating', got {kind!r}")


def _j_and_derivative(m, t):
    p = abs(m)
    J, _ = bessel_tables(p + 1, t, want_y=False)
    jm = J[p]
    djm = -J[1] if p == 0 else 0.5 * (J[p - 1] - J[p + 1])
    if m < 0 and p % 2:
        jm, djm = -jm, -djm
    return jm, djm


def grad_conj_entire(m, ctx, v):
    """Gradient with respect to y of conj(U_m(y - x_j)), evaluated at v = y - x_j.

    Returns complex components with shape v.shape.
    """
    m = _check_order(m)
    v = np.asarray(v, dtype=float)
    r, theta = polar(v)
    if np.any(r == 0):
        raise SingularityError("angular gradient is singular at v = 0")
    jm, djm = (np.asarray(a) for a in _j_and_derivative(m, ctx.k * r))
    phase = np.exp(-1j * m * theta)
    radial = np.asarray(ctx.k * djm / r)[..., None] * v
    angular = np.asarray(-1j * m * jm / r**2)[..., None] * perp(v)
    return np.asarray(phase)[..., None] * (radial + angular)


def greens(ctx, x, y):
    """Free-space Green's function G(x, y) = (i/4) H_0^(1)(k|x - y|)."""
    d = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    r = np.hypot(d[..., 0], d[..., 1])
    if np.any(r == 0):
        raise SingularityError("Green's function is singular at x = y")
    J, Y = bessel_tables(0, ctx.k * r)
    return _scalarize(0.25j * (J[0] + 1j * Y[0]))


def greens_grad_y(ctx, x, y):
    """Gradient of G(x, y) in y: -(i k / 4) H_1^(1)(k r) (y - x) / r."""
    d = np.asarray(y, dtype=float) - np.asarray(x, dtype=float)
    r = np.hypot(d[..., 0], d[..., 1])
    if np.any(r == 0):
        raise SingularityError("Green's function is singular at x = y")
    J, Y = bessel_tables(1, ctx.k * r)
    h1 = J[1] + 1j * Y[1]
    return np.asarray(-0.25j * ctx.k * h1 / r)[..., None] * d
