"""Least-squares device design solved with a truncated SVD.

Device coefficients are fitted so the device field is close to -u_i on a small
control circle of radius ``alpha`` and close to zero on a large circle of
radius ``gamma``.
"""

from dataclasses import dataclass

import numpy as np

from activecloak.errors import GeometryError, NumericalError
from activecloak.multipole_cloak import CloakSolution, MultipoleSource
from activecloak.specfun import bessel_tables, polar


@dataclass(frozen=True, eq=False)
class LeastSquaresSystem:
    """Weighted system ``matrix @ coeffs ~ rhs``.

    Rows are the alpha-circle samples followed by the gamma-circle samples,
    already multiplied by ``row_weights``. Columns are ordered device-major,
    then m = -M..M.
    """

    matrix: np.ndarray
    rhs: np.ndarray
    row_weights: np.ndarray
    points: np.ndarray
    layout: object
    ctx: object
    M: int


def default_sample_count(M):
    """Smallest multiple of 3 that is at least 4M + 2."""
    n = 4 * M + 2
    return n + (-n) % 3


def circle_samples(radius, n):
    t = 2 * np.pi * np.arange(n) / n
    return radius * np.stack([np.cos(t), np.sin(t)], axis=-1)


def radiating_basis(ctx, points, centers, M):
    """Matrix of V_m(x - x_j), rows over points, columns over (j, m)."""
    cols = []
    m = np.arange(-M, M + 1)
    sign = np.where((m < 0) & (np.abs(m) % 2 == 1), -1.0, 1.0)
    for c in centers:
        r, theta = polar(points - c)
        if np.any(r == 0):
            raise GeometryError("a sample point coincides with a device center")
        J, Y = bessel_tables(M, ctx.k * r)
        H = (J + 1j * Y)[np.abs(m)] * sign[:, None]
        cols.append((H * np.exp(1j * np.outer(m, theta))).T)
    return np.concatenate(cols, axis=1)


def build_system(u_i, layout, ctx, alpha, gamma, M, n_alpha=None, n_gamma=None, weight_ratio=1.0):
    """Stack the alpha-circle (target -u_i) and gamma-circle (target 0) rows."""
    M = int(M)
    n_alpha = default_sample_count(M) if n_alpha is None else int(n_alpha)
    n_gamma = default_sample_count(M) if n_gamma is None else int(n_gamma)
    dist = np.hypot(*layout.positions.T)
    if not (0 < alpha < dist.min()):
        raise GeometryError(f"alpha={alpha!r} must lie strictly inside the device circle")
    if not gamma > dist.max():
        raise GeometryError(f"gamma={gamma!r} must lie strictly outside the device circle")
    if min(n_alpha, n_gamma) < 2 * M + 2:
        raise ValueError("each control circle needs at least 2M + 2 samples")
    if not weight_ratio > 0:
        raise ValueError("weight_ratio must be positive")
    pa = circle_samples(alpha, n_alpha)
    pg = circle_samples(gamma, n_gamma)
    pts = np.concatenate([pa, pg])
    weights = np.concatenate([np.ones(n_alpha), np.full(n_gamma, float(weight_ratio))])
    A = radiating_basis(ctx, pts, layout.positions, M) * weights[:, None]
    rhs = np.concatenate([-np.asarray(u_i.value(pa), dtype=complex), np.zeros(n_gamma, dtype=complex)])
    return LeastSquaresSystem(A, rhs * weights, weights, pts, layout, ctx, M)


def truncated_lstsq(A, b, rel_cutoff):
    """Minimum-norm least squares keeping singular values above rel_cutoff * s_max.

    Returns ``(x, rank, s)``.
    """
    if not 0 < rel_cutoff <= 1:
        raise ValueError(f"rel_cutoff must lie in (0, 1], got {rel_cutoff!r}")
    try:
        U, s, Vh = np.linalg.svd(A, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge: {exc}") from exc
    keep = s > rel_cutoff * s[0] if s.size else s.astype(bool)
    rank = int(np.count_nonzero(keep))
    proj = U[:, keep].conj().T @ b
    x = Vh[keep].conj().T @ (proj / s[keep])
    return x, rank, s


def svd_solve(system, rel_cutoff=1e-12, equilibrate=True):
    """Truncated-SVD solution packaged as a :class:`CloakSolution`.

    With ``equilibrate`` the columns are scaled to unit norm before the SVD.
    High-order Hankel columns are many orders of magnitude larger than
    low-order ones near the devices; without scaling they alone set s_max
    and the relative cutoff discards the low orders.
    """
    scale = np.ones(system.matrix.shape[1])
    if equilibrate:
        norms = np.linalg.norm(system.matrix, axis=0)
        scale = np.where(norms > 0, 1.0 / norms, 1.0)
    y, rank, s = truncated_lstsq(system.matrix * scale, system.rhs, rel_cutoff)
    x = y * scale
    residual = float(np.linalg.norm(system.matrix @ x - system.rhs))
    per = 2 * system.M + 1
    sources = tuple(
        MultipoleSource(c, x[j * per:(j + 1) * per]) for j, c in enumerate(system.layout.positions)
    )
    diag = {
        "M": system.M,
        "rank": rank,
        "residual": residual,
        "rhs_norm": float(np.linalg.norm(system.rhs)),
        "singular_max": float(s[0]) if s.size else 0.0,
        "singular_min": float(s[-1]) if s.size else 0.0,
        "rel_cutoff": float(rel_cutoff),
        "equilibrate": bool(equilibrate),
    }
    return CloakSolution(system.ctx, system.layout, sources, "svd", diag)
