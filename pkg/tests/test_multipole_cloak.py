import math

import numpy as np
import pytest

from activecloak.errors import SingularityError
from activecloak.fields import ZeroField, plane_wave, point_source, superpose
from activecloak.geometry import equilateral_layout
from activecloak.interior_cloak import build_densities, interior_cloak_eval
from activecloak.metrics import radiation_error
from activecloak.multipole_cloak import (
    CloakSolution,
    MultipoleSource,
    eval_device_field,
    green_coefficients,
    illusion_coefficients,
    term_magnitudes,
    truncation_M,
)
from activecloak.specfun import WaveContext

from conftest import ANGLE, LAM

DELTA = 10 * LAM


def ring(radius, n=128, center=(0.0, 0.0)):
    t = np.linspace(0, 2 * np.pi, n, endpoint=False)
    return np.asarray(center) + radius * np.stack([np.cos(t), np.sin(t)], axis=-1)


def rotation(a):
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, -s], [s, c]])


@pytest.fixture(scope="module")
def interior(ctx, incident, layout10):
    return build_densities(incident, layout10[0].curve, ctx)


def test_truncation_examples():
    assert truncation_M(WaveContext(1.0), 20 * np.pi) == 59
    assert truncation_M(WaveContext(1.0), 10 * np.pi) == 30
    # k delta / 2 = 1
    assert truncation_M(WaveContext(0.5), 4.0) == 2


def test_truncation_rejects_nonpositive():
    with pytest.raises(ValueError):
        truncation_M(WaveContext(1.0), 0.0)


def test_zero_field_gives_zero_coefficients(ctx, layout10):
    sol = green_coefficients(ZeroField(), layout10[0], ctx, M=10)
    assert np.all(sol.coefficient_matrix() == 0)
    assert eval_device_field(sol, np.array([1.0, 2.0])) == 0


def test_default_M_follows_heuristic(ctx, incident, layout10):
    sol = green_coefficients(incident, layout10[0], ctx)
    assert sol.M == 59
    assert sol.coefficient_matrix().shape == (3, 119)


def test_origin_matches_interior_cloak(green59, interior):
    ext = eval_device_field(green59, np.zeros(2))
    inner = interior_cloak_eval(interior, np.zeros(2))
    assert abs(inner + 1) < 1e-6
    assert abs(ext - inner) < 0.01


def test_far_field_small(incident, green59):
    assert radiation_error(incident, green59, DELTA) < 0.01


def test_device_field_approaches_layer_potential_with_M(green59, green118, interior, layout10):
    layout = layout10[0]
    rng = np.random.default_rng(3)
    pts = []
    while len(pts) < 100:
        p = rng.uniform(-3 * DELTA, 3 * DELTA, 2)
        d = np.hypot(*(layout.positions - p).T)
        if np.all(d >= 1.1 * layout.reach):
            pts.append(p)
    pts = np.array(pts)
    target = interior_cloak_eval(interior, pts)
    e59 = np.max(np.abs(eval_device_field(green59, pts) - target))
    e118 = np.max(np.abs(eval_device_field(green118, pts) - target))
    assert e118 < e59


def test_rotation_symmetry(ctx):
    rot = 2 * np.pi / 3
    la, _ = equilateral_layout(DELTA, DELTA / 2)
    lb, _ = equilateral_layout(DELTA, DELTA / 2, orientation=np.pi / 2 + rot)
    sa = green_coefficients(plane_wave(ctx, ANGLE), la, ctx, M=59)
    sb = green_coefficients(plane_wave(ctx, ANGLE + rot), lb, ctx, M=59)
    probe = ring(0.1 * DELTA, 16) + np.array([0.01, 0.02])
    probe = np.concatenate([probe, ring(2 * DELTA, 64)])
    fa = eval_device_field(sa, probe)
    fb = eval_device_field(sb, probe @ rotation(rot).T)
    np.testing.assert_allclose(fb, fa, atol=1e-12)
    # the coefficient magnitudes are the same up to relabeling devices
    ma = np.sort(np.abs(sa.coefficient_matrix()).ravel())
    mb = np.sort(np.abs(sb.coefficient_matrix()).ravel())
    np.testing.assert_allclose(mb, ma, rtol=1e-9, atol=1e-14)


@pytest.mark.parametrize(
    "x", [(0.0, 0.0), (0.0, -15.0), (0.0, 130.0), (100.0, -80.0)], ids=["origin", "pocket", "far", "oblique"]
)
def test_term_decay_ratio(ctx, incident, layout10, x):
    layout = layout10[0]
    sol = green_coefficients(incident, layout, ctx, M=240)
    x = np.array(x)
    terms = term_magnitudes(sol, x)
    m = np.abs(np.arange(-240, 241))
    dist = np.hypot(*(layout.positions - x).T)
    bound = np.max(layout.reach / dist) + 0.05
    for j in range(3):
        # geometric decay sets in once |m| exceeds k |x - x_j|
        tail = m >= min(1.3 * ctx.k * dist[j], 200)
        slope = np.polyfit(m[tail], np.log(terms[j, tail]), 1)[0]
        assert np.exp(slope) <= bound


def test_linearity(ctx, layout10):
    f = plane_wave(ctx, 0.3)
    g = point_source(ctx, (3 * DELTA, 0.5 * DELTA))
    a, b = 0.7 - 0.2j, -1.3
    lhs = green_coefficients(superpose([f, g], [a, b]), layout10[0], ctx, M=30).coefficient_matrix()
    rhs = (
        a * green_coefficients(f, layout10[0], ctx, M=30).coefficient_matrix()
        + b * green_coefficients(g, layout10[0], ctx, M=30).coefficient_matrix()
    )
    assert np.max(np.abs(lhs - rhs)) <= 1e-12 * np.max(np.abs(rhs))


def test_blow_up_near_centers(green59, layout10):
    layout = layout10[0]
    for xj in layout.positions:
        near = np.max(np.abs(eval_device_field(green59, ring(LAM / 10, 32, xj))))
        mid = np.max(np.abs(eval_device_field(green59, ring(LAM, 32, xj))))
        assert near > 10 * mid


def test_singular_at_center(green59, layout10):
    with pytest.raises(SingularityError):
        eval_device_field(green59, layout10[0].positions[1])


def test_small_opening_spoils_cloak(ctx, incident, layout10, green59):
    layout = layout10[0]
    D = layout.curve
    owner = layout.arc_index(D.t)
    arc0 = np.flatnonzero(owner == 0)
    mask = np.zeros(D.n, bool)
    drop = max(1, round(0.1 * len(arc0)))
    start = (len(arc0) - drop) // 2
    mask[arc0[start:start + drop]] = True
    opened = green_coefficients(incident, layout, ctx, D=D.drop_nodes(mask), M=59)
    full = radiation_error(incident, green59, DELTA)
    broken = radiation_error(incident, opened, DELTA)
    assert broken >= 10 * full


def test_illusion_without_virtual_equals_green(ctx, incident, layout10, green59):
    sol = illusion_coefficients(incident, ZeroField(), layout10[0], ctx, M=59)
    np.testing.assert_array_equal(sol.coefficient_matrix(), green59.coefficient_matrix())
    assert sol.method == "illusion"


def test_illusion_linearity(ctx, incident, layout10, green59):
    virt = point_source(ctx, (1.0, 0.5))
    sol = illusion_coefficients(incident, virt, layout10[0], ctx, M=59)
    ref = green59.coefficient_matrix() - green_coefficients(virt, layout10[0], ctx, M=59).coefficient_matrix()
    assert np.max(np.abs(sol.coefficient_matrix() - ref)) <= 1e-12 * np.max(np.abs(ref))


def test_illusion_emits_virtual_scatterer(ctx, layout10):
    # with no incident wave, the devices radiate -u_s_virt outside D
    virt = point_source(ctx, (1.0, 0.5))
    sol = illusion_coefficients(ZeroField(), virt, layout10[0], ctx, M=118)
    probe = ring(2 * DELTA, 256)
    v = virt.value(probe)
    err = np.max(np.abs(eval_device_field(sol, probe) + v)) / np.max(np.abs(v))
    assert err < 1e-6


def test_scaled_solution(green59):
    x = np.array([[0.0, 0.0], [130.0, 20.0]])
    np.testing.assert_allclose(green59.scaled(2j).value(x), 2j * green59.value(x), rtol=1e-14)
    assert np.all(green59.scaled(0).value(x) == 0)


def test_solution_validation(ctx, layout10):
    layout = layout10[0]
    srcs = tuple(MultipoleSource(p, np.zeros(3)) for p in layout.positions)
    with pytest.raises(ValueError):
        CloakSolution(ctx, layout, srcs[:2], "green")
    with pytest.raises(ValueError):
        CloakSolution(ctx, layout, srcs, "nope")
    with pytest.raises(ValueError):
        MultipoleSource(layout.positions[0], np.zeros(4))
    with pytest.raises(ValueError):
        MultipoleSource(layout.positions[0], np.array([np.nan, 0, 0]))
