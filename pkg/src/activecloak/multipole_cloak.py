"""Exterior cloak built from a few multipolar devices.

Each device j radiates sum_{|m|<=M} b_{j,m} V_m(x - x_j). The coefficients
come from expanding the Green's function of the layer potentials on the arc
assigned to device j about x_j, so the device field matches the interior
cloak wherever every expansion converges.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from activecloak import kernels
from activecloak.errors import SingularityError
from activecloak.fields import superpose
from activecloak.geometry import Curve, DeviceLayout
from activecloak.specfun import WaveContext, bessel_tables, polar

METHODS = ("green", "svd", "illusion")


def truncation_M(ctx, delta):
    """Heuristic order ceil((k delta / 2)(1 + sqrt(3)/2))."""
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta!r}")
    return int(np.ceil(0.5 * ctx.k * delta * (1.0 + np.sqrt(3.0) / 2.0)))


@dataclass(frozen=True, eq=False)
class MultipoleSource:
    """One device: ``coeffs[m + M]`` multiplies V_m(x - center)."""

    center: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 1 or c.size % 2 != 1:
            raise ValueError("coefficient array must have odd length 2M + 1")
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "center", np.asarray(self.center, dtype=float))

    @property
    def M(self):
        return (self.coeffs.size - 1) // 2

    def value(self, ctx, x):
        x = np.asarray(x, dtype=float)
        r, theta = polar(x - self.center)
        if np.any(r == 0):
            raise SingularityError("device field is singular at the device center")
        out = kernels.multipole_sum(self.coeffs, (ctx.k * r).ravel(), theta.ravel())
        return out.reshape(r.shape)


@dataclass(frozen=True, eq=False)
class CloakSolution:
    """Device coefficients together with the layout they were built for."""

    ctx: WaveContext
    layout: DeviceLayout
    sources: tuple
    method: str
    diagnostics: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {self.method!r}")
        if len(self.sources) != self.layout.n_dev:
            raise ValueError("need exactly one source per device")

    @property
    def M(self):
        return max(s.M for s in self.sources)

    def coefficient_matrix(self):
        return np.stack([s.coeffs for s in self.sources])

    def scaled(self, factor):
        srcs = tuple(MultipoleSource(s.center, factor * s.coeffs) for s in self.sources)
        return CloakSolution(self.ctx, self.layout, srcs, self.method, dict(self.diagnostics))

    def value(self, x):
        return eval_device_field(self, x)


def eval_device_field(sol, x):
    """Sum of all device fields at points ``x`` of shape (..., 2)."""
    x = np.asarray(x, dtype=float)
    total = np.zeros(x.shape[:-1], dtype=complex)
    for src in sol.sources:
        total = total + src.value(sol.ctx, x)
    return total[()] if total.ndim == 0 else total


def _conj_entire_terms(ctx, v, normals, M):
    """conj(U_m(v)) and n.grad conj(U_m(v)) for m = -M..M at every row of ``v``.

    Returns two arrays of shape (2M + 1, len(v)).
    """
    r, theta = polar(v)
    if np.any(r == 0):
        raise SingularityError("device center coincides with a boundary node")
    J, _ = bessel_tables(M + 1, ctx.k * r, want_y=False)
    Jp = J[: M + 1]
    dJ = np.empty_like(Jp)
    dJ[0] = -J[1]
    dJ[1:] = 0.5 * (J[:M] - J[2:])
    n_dot_v = np.einsum("nc,nc->n", normals, v)
    # perp(v) = (-v_y, v_x)
    n_dot_perp = normals[:, 1] * v[:, 0] - normals[:, 0] * v[:, 1]

    m = np.arange(-M, M + 1)
    sign = np.where((m < 0) & (np.abs(m) % 2 == 1), -1.0, 1.0)[:, None]
    Jm = sign * Jp[np.abs(m)]
    dJm = sign * dJ[np.abs(m)]
    phase = np.exp(-1j * np.outer(m, theta))
    conj_u = Jm * phase
    dn = phase * (ctx.k * dJm * (n_dot_v / r) - 1j * m[:, None] * Jm * (n_dot_perp / r**2))
    return conj_u, dn


def green_coefficients(u_i, layout, ctx, D: Optional[Curve] = None, M=None, method="green"):
    """Device coefficients from the layer densities of ``u_i`` on ``D``.

    b_{j,m} = (i/4) sum over the nodes y of arc j of
    w(y) [ -n.grad(u_i)(y) conj(U_m(y - x_j)) + u_i(y) n.grad conj(U_m(y - x_j)) ].

    Nodes with zero quadrature weight (see ``Curve.drop_nodes``) contribute
    nothing.
    """
    D = layout.curve if D is None else D
    if M is None:
        M = truncation_M(ctx, float(np.max(np.hypot(*layout.positions.T))))
    M = int(M)
    if M < 0:
        raise ValueError("M must be non-negative")
    grad = np.asarray(u_i.gradient(D.points))
    mono = -np.einsum("ij,ij->i", D.normals, grad)
    dip = np.asarray(u_i.value(D.points), dtype=complex)
    owner = layout.arc_index(D.t)
    sources = []
    for j, xj in enumerate(layout.positions):
        sel = (owner == j) & (D.weights != 0)
        if not np.any(sel):
            sources.append(MultipoleSource(xj, np.zeros(2 * M + 1, dtype=complex)))
            continue
        conj_u, dn = _conj_entire_terms(ctx, D.points[sel] - xj, D.normals[sel], M)
        w = D.weights[sel]
        b = 0.25j * (conj_u @ (w * mono[sel]) + dn @ (w * dip[sel]))
        sources.append(MultipoleSource(xj, b))
    return CloakSolution(ctx, layout, tuple(sources), method, {"M": M, "nodes": int(D.n)})


def illusion_coefficients(u_i, u_s_virt, layout, ctx, D=None, M=None):
    """Green coefficients of the combined field u_i - u_s_virt.

    Inside the effective region the devices still cancel u_i. Outside D the
    radiating part reproduces itself with a sign flip, so the devices emit
    -u_s_virt there. To make the scene look like u_i + w for a radiating w,
    pass ``u_s_virt = -w``.
    """
    combined = superpose([u_i, u_s_virt], [1.0, -1.0])
    return green_coefficients(combined, layout, ctx, D, M, method="illusion")


def term_magnitudes(sol, x):
    """|b_{j,m} V_m(x - x_j)| for one point ``x``, shape (n_dev, 2M + 1)."""
    x = np.asarray(x, dtype=float)
    M = sol.M
    out = np.zeros((len(sol.sources), 2 * M + 1))
    for j, src in enumerate(sol.sources):
        r, _ = polar(x - src.center)
        J, Y = bessel_tables(src.M, np.array([sol.ctx.k * r]))
        h = np.abs(J[:, 0] + 1j * Y[:, 0])
        hm = np.concatenate([h[:0:-1], h])
        lo = M - src.M
        out[j, lo:lo + 2 * src.M + 1] = np.abs(src.coeffs) * hm
    return out
