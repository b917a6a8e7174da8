"""Independent reference computations used to derive frozen test values.

Nothing here calls into ``activecloak``.
"""

import mpmath as mp
import numpy as np
from scipy import special


def series_j(n, t, dps=60):
    """J_n(t) from its ascending power series in high precision."""
    with mp.workdps(dps):
        t = mp.mpf(t)
        half = t / 2
        total = mp.mpf(0)
        k = 0
        while True:
            term = (-1) ** k * half ** (2 * k + n) / (mp.factorial(k) * mp.factorial(k + n))
            total += term
            if k > 5 and abs(term) < mp.mpf(10) ** (-dps):
                break
            k += 1
        return total


def series_y(n, t, dps=60):
    """Y_n(t) from the logarithmic series for integer order n >= 0."""
    with mp.workdps(dps):
        t = mp.mpf(t)
        half = t / 2
        q = half**2

        def psi(m):  # digamma at positive integer m
            return -mp.euler + mp.fsum(mp.mpf(1) / j for j in range(1, m))

        first = mp.fsum(
            mp.factorial(n - k - 1) / mp.factorial(k) * q**k for k in range(n)
        )
        total = -(half ** (-n)) / mp.pi * first
        total += 2 / mp.pi * mp.log(half) * series_j(n, t, dps)
        acc = mp.mpf(0)
        k = 0
        while True:
            term = (psi(k + 1) + psi(n + k + 1)) * (-q) ** k / (
                mp.factorial(k) * mp.factorial(n + k)
            )
            acc += term
            if k > 5 and abs(term) < mp.mpf(10) ** (-dps):
                break
            k += 1
        total -= half**n / mp.pi * acc
        return total


def central_gradient(f, x, h):
    """Central-difference gradient of a scalar complex function of a 2D point."""
    x = np.asarray(x, dtype=float)
    ex = np.array([h, 0.0])
    ey = np.array([0.0, h])
    return np.array([(f(x + ex) - f(x - ex)) / (2 * h), (f(x + ey) - f(x - ey)) / (2 * h)])


def five_point_laplacian(f, x, h):
    x = np.asarray(x, dtype=float)
    ex = np.array([h, 0.0])
    ey = np.array([0.0, h])
    return (f(x + ex) + f(x - ex) + f(x + ey) + f(x - ey) - 4 * f(x)) / h**2


def sound_soft_cylinder(k, a, angle, points, M=None):
    """Scattered field of a sound-soft disk of radius ``a`` at the origin.

    u_s = -sum_m J_m(ka)/H_m(ka) i^m e^{-i m angle} H_m(k r) e^{i m theta},
    evaluated with scipy's Bessel routines.
    """
    points = np.asarray(points, dtype=float)
    r = np.hypot(points[..., 0], points[..., 1])
    th = np.arctan2(points[..., 1], points[..., 0])
    if M is None:
        M = int(k * max(a, 1.0) + 40)
    total = np.zeros(r.shape, dtype=complex)
    for m in range(-M, M + 1):
        c = special.jv(m, k * a) / special.hankel1(m, k * a)
        total -= c * (1j**m) * np.exp(-1j * m * angle) * special.hankel1(m, k * r) * np.exp(1j * m * th)
    return total
