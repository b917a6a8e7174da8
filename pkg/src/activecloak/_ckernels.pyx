# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: per-point Bessel recurrences and multipole sums.

Same algorithms and constants as ``_pykernels``; the loops run per point
instead of per order.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, log, cos, sin, cbrt, fabs, hypot, M_PI, INFINITY
from libc.stdlib cimport malloc, free

cnp.import_array()

cdef double EULER_GAMMA = 0.57721566490153286061
cdef double ASYMPTOTIC_THRESHOLD = 25.0
cdef int ASYMPTOTIC_TERMS = 30
cdef double RESCALE_LIMIT = 1e250
cdef double RESCALE_FACTOR = 1e-250


cdef inline int miller_start(int nmax, double t) noexcept nogil:
    cdef double top = nmax if nmax > t else t
    cdef int s = <int>(top + 10.0 * cbrt(t) + 40.0)
    return s + (s % 2)


cdef inline double odd_neumann_coeff(int o) noexcept nogil:
    cdef int k = (o + 1) // 2
    cdef double c = (1.0 if k % 2 == 0 else -1.0) / k
    if o >= 3:
        k = (o - 1) // 2
        c -= (1.0 if k % 2 == 0 else -1.0) / k
    return c


cdef void hankel_asymptotic(double t, double* out) noexcept nogil:
    # out = J0, Y0, J1, Y1
    cdef double ct = cos(t), st = sin(t)
    cdef double amp = sqrt(2.0 / (M_PI * t))
    cdef double r2 = sqrt(2.0)
    cdef double mu, p, q, term, cchi, schi
    cdef int nu, k
    for nu in range(2):
        mu = 4.0 * nu * nu
        p = 1.0
        q = 0.0
        term = 1.0
        for k in range(1, ASYMPTOTIC_TERMS + 1):
            term = term * (mu - (2 * k - 1) * (2 * k - 1)) / (8.0 * k * t)
            if k % 2 == 0:
                p += (1.0 if (k // 2) % 2 == 0 else -1.0) * term
            else:
                q += (1.0 if ((k - 1) // 2) % 2 == 0 else -1.0) * term
        if nu == 0:
            cchi = (ct + st) / r2
            schi = (st - ct) / r2
        else:
            cchi = (st - ct) / r2
            schi = -(st + ct) / r2
        out[2 * nu] = amp * (p * cchi - q * schi)
        out[2 * nu + 1] = amp * (p * schi + q * cchi)


cdef void jy_point(int nmax, double t, double* J, double* Y, bint want_y) noexcept nogil:
    cdef int n, i, k
    cdef double asym[4]
    cdef double nxt, cur, prev, norm, neu_even, neu_odd, j0 = 0.0, j1 = 0.0
    cdef double scale, r, lg, y0, y1, inv_t
    cdef bint big = t > ASYMPTOTIC_THRESHOLD

    if t == 0.0:
        for i in range(nmax + 1):
            J[i] = 0.0
            if want_y:
                Y[i] = -INFINITY
        J[0] = 1.0
        return

    if big:
        hankel_asymptotic(t, asym)
        if nmax <= 1:
            J[0] = asym[0]
            if want_y:
                Y[0] = asym[1]
            if nmax == 1:
                J[1] = asym[2]
                if want_y:
                    Y[1] = asym[3]
            return

    inv_t = 1.0 / t
    n = miller_start(nmax, t)
    nxt = 0.0
    cur = 1e-30
    norm = 0.0
    neu_even = 0.0
    neu_odd = 0.0
    for i in range(nmax + 1):
        J[i] = 0.0
    while True:
        if n <= nmax:
            J[n] = cur
        if n % 2 == 0:
            norm += cur if n == 0 else 2.0 * cur
            if n >= 2:
                k = n // 2
                neu_even += (1.0 if k % 2 == 0 else -1.0) / k * cur
        else:
            neu_odd += odd_neumann_coeff(n) * cur
        if n == 1:
            j1 = cur
        if n == 0:
            j0 = cur
            break
        prev = (2.0 * n) * inv_t * cur - nxt
        nxt = cur
        cur = prev
        n -= 1
        if fabs(cur) > RESCALE_LIMIT:
            cur *= RESCALE_FACTOR
            nxt *= RESCALE_FACTOR
            norm *= RESCALE_FACTOR
            neu_even *= RESCALE_FACTOR
            neu_odd *= RESCALE_FACTOR
            for i in range(n + 1, nmax + 1):
                J[i] *= RESCALE_FACTOR
            if n < 1:
                j1 *= RESCALE_FACTOR

    if big:
        r = hypot(j0, j1)
        scale = (asym[0] * (j0 / r) + asym[2] * (j1 / r)) / r
    else:
        scale = 1.0 / norm
    for i in range(nmax + 1):
        J[i] *= scale

    if want_y:
        if big:
            y0 = asym[1]
            y1 = asym[3]
        else:
            lg = log(0.5 * t) + EULER_GAMMA
            y0 = (2.0 / M_PI) * (lg * j0 * scale - 2.0 * neu_even * scale)
            y1 = (2.0 / M_PI) * (-j0 * scale * inv_t + lg * j1 * scale + neu_odd * scale)
        Y[0] = y0
        if nmax >= 1:
            Y[1] = y1
        for i in range(1, nmax):
            Y[i + 1] = (2.0 * i) * inv_t * Y[i] - Y[i - 1]


def jy_table(int nmax, t, bint want_y=True):
    """Bessel J_n(t) and Y_n(t) for n = 0..nmax; see ``_pykernels.jy_table``."""
    t_arr = np.asarray(t, dtype=np.float64)
    shape = t_arr.shape
    cdef double[::1] flat = np.ascontiguousarray(t_arr.ravel())
    cdef Py_ssize_t npts = flat.shape[0], p
    cdef int i
    J_out = np.zeros((nmax + 1, npts))
    cdef double[:, ::1] Jv = J_out
    cdef double[:, ::1] Yv
    Y_out = None
    if want_y:
        Y_out = np.zeros((nmax + 1, npts))
        Yv = Y_out
    cdef double* jbuf = <double*>malloc((nmax + 1) * sizeof(double))
    cdef double* ybuf = <double*>malloc((nmax + 1) * sizeof(double))
    if jbuf == NULL or ybuf == NULL:
        free(jbuf)
        free(ybuf)
        raise MemoryError()
    try:
        with nogil:
            for p in range(npts):
                jy_point(nmax, flat[p], jbuf, ybuf, want_y)
                for i in range(nmax + 1):
                    Jv[i, p] = jbuf[i]
                if want_y:
                    for i in range(nmax + 1):
                        Yv[i, p] = ybuf[i]
    finally:
        free(jbuf)
        free(ybuf)
    J_out = J_out.reshape((nmax + 1,) + shape)
    if want_y:
        Y_out = Y_out.reshape((nmax + 1,) + shape)
    return J_out, Y_out


def multipole_sum(coeffs, kr, theta):
    """Sum_{|m|<=M} coeffs[m + M] H_m^(1)(kr) exp(i m theta) at each point."""
    cdef double complex[::1] b = np.ascontiguousarray(coeffs, dtype=np.complex128)
    cdef int M = (b.shape[0] - 1) // 2
    cdef double[::1] r = np.ascontiguousarray(np.asarray(kr, dtype=np.float64).ravel())
    cdef double[::1] th = np.ascontiguousarray(np.asarray(theta, dtype=np.float64).ravel())
    cdef Py_ssize_t npts = r.shape[0], p
    out = np.zeros(npts, dtype=np.complex128)
    cdef double complex[::1] ov = out
    cdef double* jbuf = <double*>malloc((M + 1) * sizeof(double))
    cdef double* ybuf = <double*>malloc((M + 1) * sizeof(double))
    cdef int m
    cdef double complex acc, h, ph, bp, bn
    cdef double sgn
    if jbuf == NULL or ybuf == NULL:
        free(jbuf)
        free(ybuf)
        raise MemoryError()
    try:
        with nogil:
            for p in range(npts):
                jy_point(M, r[p], jbuf, ybuf, True)
                acc = 0.0
                if b[M] != 0:
                    acc = b[M] * (jbuf[0] + 1j * ybuf[0])
                sgn = 1.0
                for m in range(1, M + 1):
                    ph = cos(m * th[p]) + 1j * sin(m * th[p])
                    sgn = -sgn
                    h = jbuf[m] + 1j * ybuf[m]
                    bp = b[M + m]
                    bn = b[M - m]
                    if bp != 0:
                        acc = acc + bp * h * ph
                    if bn != 0:
                        acc = acc + (sgn * bn) * h * ph.conjugate()
                ov[p] = acc
    finally:
        free(jbuf)
        free(ybuf)
    return out
