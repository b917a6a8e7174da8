import numpy as np
import pytest

from activecloak.errors import GeometryError
from activecloak.fields import ZeroField, plane_wave
from activecloak.geometry import equilateral_layout, optimal_effective_radius
from activecloak.metrics import interior_error, radiation_error
from activecloak.svd_cloak import (
    build_system,
    default_sample_count,
    svd_solve,
    truncated_lstsq,
)

from conftest import ANGLE, LAM

DELTA = 10 * LAM
ALPHA = optimal_effective_radius(DELTA)
GAMMA = 2 * DELTA


def ring(radius, n=128):
    t = np.linspace(0, 2 * np.pi, n, endpoint=False) + 0.1
    return radius * np.stack([np.cos(t), np.sin(t)], axis=-1)


@pytest.fixture(scope="module")
def system59(ctx, incident, layout10):
    return build_system(incident, layout10[0], ctx, ALPHA, GAMMA, 59)


@pytest.fixture(scope="module")
def svd59(system59):
    return svd_solve(system59)


def test_sample_count_default():
    assert default_sample_count(59) == 240
    assert default_sample_count(1) == 6
    for M in range(0, 50):
        n = default_sample_count(M)
        assert n % 3 == 0 and 4 * M + 2 <= n < 4 * M + 5


def test_system_shape(system59, layout10):
    n = default_sample_count(59)
    assert system59.matrix.shape == (2 * n, 3 * 119)
    assert system59.rhs.shape == (2 * n,)
    assert np.all(np.isfinite(system59.matrix))
    np.testing.assert_allclose(np.hypot(*system59.points[:n].T), ALPHA)
    np.testing.assert_allclose(np.hypot(*system59.points[n:].T), GAMMA)


def test_zero_rhs_gives_zero_coefficients(ctx, layout10):
    sys = build_system(ZeroField(), layout10[0], ctx, ALPHA, GAMMA, 10)
    assert np.all(sys.rhs == 0)
    sol = svd_solve(sys)
    assert np.all(sol.coefficient_matrix() == 0)


def test_full_cutoff_gives_zero(system59):
    sol = svd_solve(system59, rel_cutoff=1.0)
    assert np.all(sol.coefficient_matrix() == 0)
    assert sol.diagnostics["rank"] == 0


def test_cutoff_range(system59):
    with pytest.raises(ValueError):
        svd_solve(system59, rel_cutoff=0.0)
    with pytest.raises(ValueError):
        truncated_lstsq(np.eye(2), np.ones(2), 1.5)


def test_weight_ratio_scales_gamma_rows(ctx, incident, layout10):
    a = build_system(incident, layout10[0], ctx, ALPHA, GAMMA, 5)
    b = build_system(incident, layout10[0], ctx, ALPHA, GAMMA, 5, weight_ratio=3.0)
    n = default_sample_count(5)
    np.testing.assert_array_equal(b.matrix[:n], a.matrix[:n])
    np.testing.assert_allclose(b.matrix[n:], 3.0 * a.matrix[n:], rtol=1e-15)


def test_reported_residual_consistent(system59, svd59):
    x = svd59.coefficient_matrix().ravel()
    res = np.linalg.norm(system59.matrix @ x - system59.rhs)
    assert res == pytest.approx(svd59.diagnostics["residual"], rel=1e-10)


def test_residual_monotone_in_M(ctx, incident, layout10):
    n = default_sample_count(118)
    res = []
    for M in (59, 118):
        sys = build_system(incident, layout10[0], ctx, ALPHA, GAMMA, M, n_alpha=n, n_gamma=n)
        res.append(svd_solve(sys).diagnostics["residual"])
    assert res[1] <= res[0]


def test_sample_doubling_stable(ctx, incident, layout10, svd59):
    n = default_sample_count(59)
    sys = build_system(incident, layout10[0], ctx, ALPHA, GAMMA, 59, n_alpha=2 * n)
    sol = svd_solve(sys)
    probe = np.concatenate([ring(0.5 * ALPHA), ring(2 * DELTA)])
    a, b = svd59.value(probe), sol.value(probe)
    assert np.linalg.norm(b - a) <= 0.01 * np.linalg.norm(a)


def test_rotation_equivariance(ctx):
    rot = 2 * np.pi / 3
    c, s = np.cos(rot), np.sin(rot)
    R = np.array([[c, -s], [s, c]])
    la, _ = equilateral_layout(DELTA, DELTA / 2)
    lb, _ = equilateral_layout(DELTA, DELTA / 2, orientation=np.pi / 2 + rot)
    sa = svd_solve(build_system(plane_wave(ctx, ANGLE), la, ctx, ALPHA, GAMMA, 59), rel_cutoff=1e-8)
    sb = svd_solve(build_system(plane_wave(ctx, ANGLE + rot), lb, ctx, ALPHA, GAMMA, 59), rel_cutoff=1e-8)
    probe = np.concatenate([ring(0.5 * ALPHA, 32), ring(2 * DELTA, 64)])
    fa = sa.value(probe)
    fb = sb.value(probe @ R.T)
    assert np.max(np.abs(fb - fa)) < 1e-8


def test_svd_beats_green_on_interior(incident, svd59, green59):
    assert interior_error(incident, svd59, DELTA) < interior_error(incident, green59, DELTA)
    assert radiation_error(incident, svd59, DELTA) < radiation_error(incident, green59, DELTA)


def test_geometry_errors(ctx, incident, layout10):
    layout = layout10[0]
    with pytest.raises(GeometryError):
        build_system(incident, layout, ctx, DELTA, GAMMA, 5)
    with pytest.raises(GeometryError):
        build_system(incident, layout, ctx, 0.0, GAMMA, 5)
    with pytest.raises(GeometryError):
        build_system(incident, layout, ctx, ALPHA, 0.9 * DELTA, 5)
    with pytest.raises(ValueError):
        build_system(incident, layout, ctx, ALPHA, GAMMA, 5, n_alpha=10)


def test_diagnostics(svd59):
    d = svd59.diagnostics
    assert d["M"] == 59 and svd59.method == "svd"
    assert 0 < d["rank"] <= 3 * 119
    assert d["singular_max"] >= d["singular_min"] >= 0
    assert d["residual"] < 1e-6 * d["rhs_norm"]
