"""Boundary curves, device layouts and the closed-form cloak geometry.

Curves are parametrized on [0, 2*pi) and discretized with N equispaced
nodes; the trapezoidal rule on those nodes is the quadrature used for every
boundary integral in the package.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from activecloak.errors import GeometryError

TWO_PI = 2.0 * np.pi
KITE_BULGE = 0.65
KITE_STRETCH = 1.5
ARC_EPS = 1e-12


def _valid_node_count(n):
    # 2^p or 3 * 2^p, so equal thirds of the circle start on nodes when 12 | n
    if n < 8:
        return False
    while n % 2 == 0:
        n //= 2
    return n in (1, 3)


@dataclass(frozen=True, eq=False)
class Curve:
    """Closed parametrized curve with trapezoidal quadrature nodes.

    Attributes
    ----------
    param, dparam : callable
        ``p(t)`` and ``p'(t)``, vectorized, returning arrays of shape t.shape + (2,).
        The parametrization runs counterclockwise.
    n : int
        Number of nodes.
    active : ndarray of bool, optional
        Nodes with ``False`` get zero quadrature weight.
    analytic : bool
        Whether ``param`` also accepts complex parameter values (used to
        place auxiliary sources inside the curve).
    """

    param: Callable
    dparam: Callable
    n: int
    name: str = "curve"
    active: Optional[np.ndarray] = None
    analytic: bool = False
    t: np.ndarray = field(init=False, repr=False)
    points: np.ndarray = field(init=False, repr=False)
    normals: np.ndarray = field(init=False, repr=False)
    speed: np.ndarray = field(init=False, repr=False)
    weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        t = TWO_PI * np.arange(self.n) / self.n
        pts = np.asarray(self.param(t), dtype=float)
        der = np.asarray(self.dparam(t), dtype=float)
        speed = np.hypot(der[:, 0], der[:, 1])
        if np.any(speed <= 0):
            raise GeometryError(f"{self.name}: parametrization is not regular")
        normals = np.stack([der[:, 1], -der[:, 0]], axis=-1) / speed[:, None]
        weights = speed * (TWO_PI / self.n)
        if self.active is not None:
            weights = np.where(self.active, weights, 0.0)
        for name, val in (("t", t), ("points", pts), ("normals", normals),
                          ("speed", speed), ("weights", weights)):
            object.__setattr__(self, name, val)

    @property
    def perimeter(self):
        return float(self.weights.sum())

    @property
    def node_spacing(self):
        return float(self.speed.sum() * TWO_PI / self.n / self.n)

    @property
    def centroid(self):
        """Area centroid by the trapezoidal rule applied to Green's theorem."""
        x, y = self.points[:, 0], self.points[:, 1]
        der = self.dparam(self.t)
        h = TWO_PI / self.n
        area = 0.5 * h * np.sum(x * der[:, 1] - y * der[:, 0])
        cx = h * np.sum(0.5 * x**2 * der[:, 1]) / area
        cy = -h * np.sum(0.5 * y**2 * der[:, 0]) / area
        return np.array([cx, cy])

    def resample(self, n):
        return Curve(self.param, self.dparam, n, self.name, analytic=self.analytic)

    def drop_nodes(self, mask):
        """Copy with the nodes selected by ``mask`` removed from the quadrature."""
        mask = np.asarray(mask, dtype=bool)
        active = np.ones(self.n, dtype=bool) if self.active is None else self.active.copy()
        active[mask] = False
        return Curve(self.param, self.dparam, self.n, self.name, active, self.analytic)

    def dense(self, n=4096):
        t = TWO_PI * np.arange(n) / n
        return np.asarray(self.param(t), dtype=float)


def circle_curve(radius, center=(0.0, 0.0), n=256):
    """Circle of the given radius, counterclockwise from angle 0."""
    if not radius > 0:
        raise GeometryError(f"circle radius must be positive, got {radius!r}")
    if not _valid_node_count(n):
        raise GeometryError(f"circle node count must be 2^p or 3*2^p and >= 8, got {n!r}")
    c = np.asarray(center, dtype=float)

    def p(t):
        t = np.asarray(t)
        return c + radius * np.stack([np.cos(t), np.sin(t)], axis=-1)

    def dp(t):
        t = np.asarray(t)
        return radius * np.stack([-np.sin(t), np.cos(t)], axis=-1)

    return Curve(p, dp, n, "circle", analytic=True)


def kite_curve(scale, center=(0.0, 0.0), n=128):
    """Kite p(t) = scale * (cos t + 0.65 cos 2t - 0.65, 1.5 sin t) + center."""
    if not scale > 0:
        raise GeometryError(f"kite scale must be positive, got {scale!r}")
    if n < 32:
        raise GeometryError(f"kite needs at least 32 nodes, got {n!r}")
    c = np.asarray(center, dtype=float)

    def p(t):
        t = np.asarray(t)
        x = np.cos(t) + KITE_BULGE * np.cos(2 * t) - KITE_BULGE
        y = KITE_STRETCH * np.sin(t)
        return c + scale * np.stack([x, y], axis=-1)

    def dp(t):
        t = np.asarray(t)
        x = -np.sin(t) - 2 * KITE_BULGE * np.sin(2 * t)
        y = KITE_STRETCH * np.cos(t)
        return scale * np.stack([x, y], axis=-1)

    return Curve(p, dp, n, "kite", analytic=True)


def inside_curve(points, curve, n_poly=2048):
    """Even-odd point-in-polygon test against a dense polygonal version of ``curve``."""
    points = np.asarray(points, dtype=float)
    flat = points.reshape(-1, 2)
    poly = curve.dense(n_poly)
    x0, y0 = poly[:, 0], poly[:, 1]
    x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
    inside = np.zeros(len(flat), dtype=bool)
    for lo in range(0, len(flat), 4096):
        px = flat[lo:lo + 4096, 0][:, None]
        py = flat[lo:lo + 4096, 1][:, None]
        crosses = (y0 > py) != (y1 > py)
        with np.errstate(divide="ignore", invalid="ignore"):
            xint = x0 + (py - y0) * (x1 - x0) / (y1 - y0)
        hits = crosses & (px < xint)
        inside[lo:lo + 4096] = np.count_nonzero(hits, axis=1) % 2 == 1
    return inside.reshape(points.shape[:-1])


@dataclass(frozen=True, eq=False)
class DeviceLayout:
    """Device positions with the boundary arc assigned to each device.

    ``arcs[j] = (a, b)`` is the half-open parameter interval [a, b) of the
    boundary curve handled by device j (taken modulo 2*pi). ``reach[j]`` is
    the largest distance from device j to a point of its arc.
    """

    positions: np.ndarray
    arcs: np.ndarray
    reach: np.ndarray
    curve: Curve

    @property
    def n_dev(self):
        return len(self.positions)

    def arc_index(self, t):
        """Index of the arc containing each parameter value (-1 if none)."""
        t = np.asarray(t, dtype=float)
        out = np.full(t.shape, -1, dtype=int)
        for j, (a, b) in enumerate(self.arcs):
            rel = np.mod(t - a, TWO_PI)
            # a node sitting on the start of an arc may round to just below 2*pi
            rel = np.where(rel > TWO_PI - ARC_EPS, rel - TWO_PI, rel)
            inside = (rel > -ARC_EPS) & (rel < b - a - ARC_EPS)
            out = np.where((out < 0) & inside, j, out)
        return out

    def arc_points(self, j, n=4097):
        a, b = self.arcs[j]
        return np.asarray(self.curve.param(np.linspace(a, b, n)), dtype=float)


def device_layout(positions, arcs, curve, n_dense=4097):
    """Validate an arc partition and compute each device's reach."""
    positions = np.atleast_2d(np.asarray(positions, dtype=float))
    arcs = np.atleast_2d(np.asarray(arcs, dtype=float))
    if arcs.shape != (len(positions), 2):
        raise GeometryError("need exactly one arc (a, b) per device")
    lengths = arcs[:, 1] - arcs[:, 0]
    if np.any(lengths <= 0):
        raise GeometryError("arcs must have positive parameter length")
    if not np.isclose(lengths.sum(), TWO_PI, rtol=0, atol=1e-12):
        raise GeometryError("arcs must cover the whole curve")
    starts = np.mod(arcs[:, 0], TWO_PI)
    order = np.argsort(starts)
    ends = np.mod(arcs[order, 1], TWO_PI)
    gaps = np.mod(np.roll(starts[order], -1) - ends + np.pi, TWO_PI) - np.pi
    if np.any(np.abs(gaps) > 1e-12):
        raise GeometryError("arcs overlap or leave gaps")

    dense = curve.dense(n_dense)
    scale = np.max(np.abs(dense - dense.mean(axis=0)))
    for x in positions:
        if np.min(np.hypot(*(dense - x).T)) < 1e-9 * scale:
            raise GeometryError("device lies on the boundary curve")

    reach = np.empty(len(positions))
    for j, ((a, b), x) in enumerate(zip(arcs, positions)):
        pts = np.asarray(curve.param(np.linspace(a, b, n_dense)), dtype=float)
        reach[j] = np.max(np.hypot(*(pts - x).T))
    return DeviceLayout(positions, arcs, reach, curve)


@dataclass(frozen=True)
class CloakGeometry:
    """Equilateral three-device configuration: devices at distance ``delta``
    from the origin, Green's formula applied on the disk of radius ``sigma``."""

    delta: float
    sigma: float

    @property
    def shadow_radius(self):
        return shadow_radius(self.sigma, self.delta)

    @property
    def effective_radius(self):
        return effective_radius(self.sigma, self.delta)

    @property
    def optimal_effective_radius(self):
        return optimal_effective_radius(self.delta)


def shadow_radius(sigma, delta):
    """Radius ((sigma - delta/2)^2 + 3 delta^2 / 4)^(1/2) of each exclusion disk."""
    if sigma < 0 or delta <= 0:
        raise GeometryError("need sigma >= 0 and delta > 0")
    return float(np.sqrt((sigma - 0.5 * delta) ** 2 + 0.75 * delta**2))


def effective_radius(sigma, delta):
    """Largest disk inscribed in the effective cloaked region; may be <= 0."""
    return delta - shadow_radius(sigma, delta)


def optimal_effective_radius(delta):
    if delta <= 0:
        raise GeometryError("delta must be positive")
    return (1.0 - np.sqrt(3.0) / 2.0) * delta


def equilateral_layout(delta, sigma, n=384, orientation=np.pi / 2):
    """Three devices on a circle of radius ``delta`` and the disk boundary of
    radius ``sigma`` split into three equal arcs, each centered on the
    direction of its device.

    Returns
    -------
    (DeviceLayout, CloakGeometry)
    """
    if not (delta > 0 and sigma > 0):
        raise GeometryError("delta and sigma must be positive")
    curve = circle_curve(sigma, n=n)
    angles = orientation + TWO_PI * np.arange(3) / 3
    positions = delta * np.stack([np.cos(angles), np.sin(angles)], axis=-1)
    arcs = np.stack([angles - np.pi / 3, angles + np.pi / 3], axis=-1)
    layout = device_layout(positions, arcs, curve)
    return layout, CloakGeometry(delta, sigma)


def in_region_R(x, layout):
    """True where x is strictly outside every device's exclusion disk."""
    x = np.asarray(x, dtype=float)
    ok = np.ones(x.shape[:-1], dtype=bool)
    for pos, rad in zip(layout.positions, layout.reach):
        ok &= np.hypot(x[..., 0] - pos[0], x[..., 1] - pos[1]) > rad
    return ok


def min_device_check(layout, D, n_grid=512):
    """Whether the effective cloaked region D ∩ R contains any grid sample."""
    pts = D.dense(2048)
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    xs = np.linspace(lo[0], hi[0], n_grid)
    ys = np.linspace(lo[1], hi[1], n_grid)
    grid = np.stack(np.meshgrid(xs, ys), axis=-1).reshape(-1, 2)
    cand = grid[in_region_R(grid, layout)]
    if len(cand) == 0:
        return False
    return bool(np.any(inside_curve(cand, D)))
