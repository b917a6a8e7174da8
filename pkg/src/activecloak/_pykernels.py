"""Pure numpy implementation of the hot kernels.

Mirrors ``_ckernels.pyx`` function for function. Loops run over Bessel
orders and are vectorized over evaluation points, so the cost per order is
one numpy pass over a block of arguments.
"""

import numpy as np

EULER_GAMMA = 0.57721566490153286061
ASYMPTOTIC_THRESHOLD = 25.0
ASYMPTOTIC_TERMS = 30
RESCALE_LIMIT = 1e250
RESCALE_FACTOR = 1e-250
BLOCK = 512


def miller_start(nmax, tmax):
    """Even starting order for the downward recurrence."""
    s = int(max(nmax, tmax) + 10.0 * np.cbrt(tmax) + 40.0)
    return s + (s % 2)


def _odd_neumann_coeff(o):
    # weight of J_o in sum_{k>=1} (-1)^k (J_{2k-1} - J_{2k+1}) / k
    k = (o + 1) // 2
    c = (-1.0) ** k / k
    if o >= 3:
        k = (o - 1) // 2
        c -= (-1.0) ** k / k
    return c


def hankel_asymptotic(t):
    """J0, Y0, J1, Y1 from the Hankel expansion; accurate for t > 25."""
    t = np.asarray(t, dtype=float)
    ct, st = np.cos(t), np.sin(t)
    amp = np.sqrt(2.0 / (np.pi * t))
    out = []
    for nu in (0, 1):
        mu = 4.0 * nu * nu
        p = np.ones_like(t)
        q = np.zeros_like(t)
        term = np.ones_like(t)
        for k in range(1, ASYMPTOTIC_TERMS + 1):
            term = term * (mu - (2 * k - 1) ** 2) / (8.0 * k * t)
            if k % 2 == 0:
                p += (-1.0) ** (k // 2) * term
            else:
                q += (-1.0) ** ((k - 1) // 2) * term
        # cos/sin of t - (nu/2 + 1/4) pi without rounding t
        if nu == 0:
            cchi, schi = (ct + st) / np.sqrt(2.0), (st - ct) / np.sqrt(2.0)
        else:
            cchi, schi = (st - ct) / np.sqrt(2.0), -(st + ct) / np.sqrt(2.0)
        out.append(amp * (p * cchi - q * schi))
        out.append(amp * (p * schi + q * cchi))
    return tuple(out)


def _jy_block(nmax, t, want_y):
    npts = t.size
    J = np.zeros((nmax + 1, npts))
    Y = np.zeros((nmax + 1, npts)) if want_y else None
    big = t > ASYMPTOTIC_THRESHOLD

    if nmax <= 1 and big.all():
        j0, y0, j1, y1 = hankel_asymptotic(t)
        J[0] = j0
        if nmax == 1:
            J[1] = j1
        if want_y:
            Y[0] = y0
            if nmax == 1:
                Y[1] = y1
        return J, Y

    start = miller_start(nmax, float(t.max()))
    nxt = np.zeros(npts)
    cur = np.full(npts, 1e-30)
    norm = np.zeros(npts)
    neu_even = np.zeros(npts)
    neu_odd = np.zeros(npts)
    j0 = np.zeros(npts)
    j1 = np.zeros(npts)
    inv_t = 1.0 / t

    n = start
    while True:
        if n <= nmax:
            J[n] = cur
        if n % 2 == 0:
            norm += cur if n == 0 else 2.0 * cur
            if n >= 2:
                k = n // 2
                neu_even += ((-1.0) ** k / k) * cur
        else:
            neu_odd += _odd_neumann_coeff(n) * cur
        if n == 1:
            j1 = cur.copy()
        if n == 0:
            j0 = cur.copy()
            break
        prev = (2.0 * n) * inv_t * cur - nxt
        nxt, cur = cur, prev
        n -= 1
        big_vals = np.abs(cur) > RESCALE_LIMIT
        if big_vals.any():
            s = np.where(big_vals, RESCALE_FACTOR, 1.0)
            cur *= s
            nxt *= s
            norm *= s
            neu_even *= s
            neu_odd *= s
            J *= s
            if n < 1:
                j1 *= s

    scale = 1.0 / norm
    if big.any():
        a0, b0, a1, b1 = hankel_asymptotic(np.where(big, t, 2.0 * ASYMPTOTIC_THRESHOLD))
        r = np.hypot(j0, j1)
        fit = (a0 * (j0 / r) + a1 * (j1 / r)) / r
        scale = np.where(big, fit, scale)
    J *= scale

    if want_y:
        with np.errstate(over="ignore", invalid="ignore"):
            j0s, j1s = j0 * scale, j1 * scale
            lg = np.log(0.5 * t) + EULER_GAMMA
            y0 = (2.0 / np.pi) * (lg * j0s - 2.0 * neu_even * scale)
            y1 = (2.0 / np.pi) * (-j0s * inv_t + lg * j1s + neu_odd * scale)
            if big.any():
                y0 = np.where(big, b0, y0)
                y1 = np.where(big, b1, y1)
            Y[0] = y0
            if nmax >= 1:
                Y[1] = y1
            for m in range(1, nmax):
                Y[m + 1] = (2.0 * m) * inv_t * Y[m] - Y[m - 1]
    return J, Y


def jy_table(nmax, t, want_y=True):
    """Bessel J_n(t) and Y_n(t) for n = 0..nmax.

    Parameters
    ----------
    nmax : int
        Highest order, >= 0.
    t : array_like
        Non-negative arguments (any shape).
    want_y : bool
        Skip the Y table when False.

    Returns
    -------
    J, Y : ndarray, shape (nmax + 1,) + t.shape
        ``Y`` is None when ``want_y`` is False. At t = 0 the J column is
        exact and the Y column is -inf.
    """
    t = np.asarray(t, dtype=float)
    shape = t.shape
    flat = t.ravel()
    J = np.zeros((nmax + 1, flat.size))
    Y = np.zeros((nmax + 1, flat.size)) if want_y else None

    zero = flat == 0.0
    if zero.any():
        J[0, zero] = 1.0
        if want_y:
            Y[:, zero] = -np.inf
    idx = np.flatnonzero(~zero)
    if idx.size:
        order = idx[np.argsort(flat[idx], kind="stable")]
        for lo in range(0, order.size, BLOCK):
            sel = order[lo:lo + BLOCK]
            Jb, Yb = _jy_block(nmax, flat[sel], want_y)
            J[:, sel] = Jb
            if want_y:
                Y[:, sel] = Yb

    J = J.reshape((nmax + 1,) + shape)
    if want_y:
        Y = Y.reshape((nmax + 1,) + shape)
    return J, Y


def multipole_sum(coeffs, kr, theta):
    """Sum_{|m|<=M} coeffs[m + M] H_m^(1)(kr) exp(i m theta) at each point.

    ``coeffs`` has length 2M + 1; ``kr`` must be strictly positive.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    M = (coeffs.size - 1) // 2
    kr = np.asarray(kr, dtype=float).ravel()
    theta = np.asarray(theta, dtype=float).ravel()
    J, Y = jy_table(M, kr)
    m = np.arange(M + 1)
    with np.errstate(over="ignore", invalid="ignore"):
        H = J + 1j * Y
        phase = np.exp(1j * np.outer(m, theta))
        sign = (-1.0) ** m
        pos = coeffs[M:][:, None]
        neg = (sign * coeffs[M::-1])[:, None]
        # zero coefficients must not meet overflowed Hankel values
        terms = np.where(pos != 0, pos * H * phase, 0.0)
        terms = terms + np.where(neg != 0, neg * H * np.conj(phase), 0.0)
        terms[0] = np.where(coeffs[M] != 0, coeffs[M] * H[0], 0.0)
    return terms.sum(axis=0)
