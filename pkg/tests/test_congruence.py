import numpy as np
import pytest

from clab import gallery
from clab.congruence import (
    CallableChart, JetChart, chart_fundamentals, eval_frame, recenter_directrix, sigma_n_function,
)
from clab.errors import DerivativeUnavailable, OutOfDomain
from clab.formfields import q_forms
from clab.jets import Poly
from clab.quadform import coefficient_angle

CHARTS = sorted(gallery.GALLERY)


def random_points(chart, n, seed=0):
    rng = np.random.default_rng(seed)
    umin, umax, vmin, vmax = chart.domain
    u = rng.uniform(umin, umax, 4 * n)
    v = rng.uniform(vmin, vmax, 4 * n)
    ok = np.asarray(chart.contains(u, v), bool)
    return u[ok][:n], v[ok][:n]


def test_frame_identity_jet_at_origin():
    F = eval_frame(JetChart({"10": 1.0}, {"11": 1.0}), 0.0, 0.0)
    assert np.allclose(F.n, [0, 0, 1])
    assert np.allclose(F.n_u, [1, 0, 0]) and np.allclose(F.n_v, [0, 1, 0])
    assert (F.A, F.B, F.C) == (1.0, 0.0, 1.0)
    assert (F.a, F.c, F.b1, F.b2, F.bbar) == (-1.0, -1.0, 0.0, 0.0, 0.0)


def test_frame_linear_jet_at_origin():
    a10, a11, b10, b11 = 0.7, -0.4, 1.3, 0.2
    F = eval_frame(JetChart({"10": a10, "11": a11}, {"10": b10, "11": b11}), 0.0, 0.0)
    assert F.a == pytest.approx(-a10) and F.b1 == pytest.approx(-a11)
    assert F.b2 == pytest.approx(-b10) and F.c == pytest.approx(-b11)
    assert F.bbar == pytest.approx((a11 - b10) / 2)
    assert F.b == pytest.approx((a11 + b10) / 2)


def test_sphere_frame_is_umbilic():
    ch = gallery.build("sphere-normals")
    for u, v in zip(*random_points(ch, 20)):
        F = eval_frame(ch, u, v)
        assert F.a / F.A == pytest.approx(F.c / F.C, rel=1e-10)
        assert F.b1 == pytest.approx(F.b2, abs=1e-12)


def test_third_partials_of_sqrt_normal():
    # n3 = sqrt(1 - u^2 - v^2): d^3/du^3 at u = v = 0 is 0, d^2/du^2 is -1
    F = eval_frame(JetChart({}, {}), 0.0, 0.0)
    assert F.n_uu[2] == pytest.approx(-1.0)
    assert F.n_uuu[2] == pytest.approx(0.0)
    F = eval_frame(JetChart({}, {}), 0.3, 0.0)
    # third derivative of sqrt(1-u^2) is -3u/(1-u^2)^(5/2)
    assert F.n_uuu[2] == pytest.approx(-3 * 0.3 / (1 - 0.09) ** 2.5, rel=1e-12)


@pytest.mark.parametrize("name", CHARTS)
def test_unit_normal_invariants(name):
    ch = gallery.build(name)
    u, v = random_points(ch, 1000, seed=1)
    n, _ = ch.jets(u, v, 1)
    val = np.stack([np.asarray(t.value) for t in n])
    nu = np.stack([np.asarray(t.coeff(1, 0)) for t in n])
    nv = np.stack([np.asarray(t.coeff(0, 1)) for t in n])
    assert np.max(np.abs(np.sum(val * val, axis=0) - 1)) < 1e-12
    assert np.max(np.abs(np.sum(val * nu, axis=0))) < 1e-10
    assert np.max(np.abs(np.sum(val * nv, axis=0))) < 1e-10
    F = chart_fundamentals(ch, u, v, 0)
    A, B, C = (np.asarray(getattr(F, k).value) for k in "ABC")
    assert np.all(B * B - A * C <= 1e-10)


@pytest.mark.parametrize("name", CHARTS)
def test_derivatives_match_finite_differences(name):
    ch = gallery.build(name)
    umin, umax, vmin, vmax = ch.domain
    u, v = random_points(ch, 100, seed=2)
    keep = (u > umin + 1e-3) & (u < umax - 1e-3) & (v > vmin + 1e-3) & (v < vmax - 1e-3)
    u, v = u[keep], v[keep]
    h = 1e-5
    nx = lambda uu, vv: np.concatenate([np.stack([np.asarray(t.value) for t in m]) for m in ch.jets(uu, vv, 0)])
    d1 = lambda uu, vv, i, j: np.concatenate(
        [np.stack([np.asarray(t.coeff(i, j)) for t in m]) for m in ch.jets(uu, vv, 1)])
    n2, x2 = ch.jets(u, v, 2)
    # first partials against differences of values
    for (i, j), (du, dv) in (((1, 0), (h, 0)), ((0, 1), (0, h))):
        fd = (nx(u + du, v + dv) - nx(u - du, v - dv)) / (2 * h)
        ex = d1(u, v, i, j)
        assert np.max(np.abs(fd - ex) / np.maximum(np.abs(ex), 1.0)) < 1e-6
    # second partials against differences of the (exact) first partials
    sec = lambda i, j: np.concatenate([np.stack([np.asarray(t.partial(i, j)) for t in m]) for m in (n2, x2)])
    fd_uu = (d1(u + h, v, 1, 0) - d1(u - h, v, 1, 0)) / (2 * h)
    fd_uv = (d1(u, v + h, 1, 0) - d1(u, v - h, 1, 0)) / (2 * h)
    fd_vv = (d1(u, v + h, 0, 1) - d1(u, v - h, 0, 1)) / (2 * h)
    for fd, (i, j) in ((fd_uu, (2, 0)), (fd_uv, (1, 1)), (fd_vv, (0, 2))):
        ex = sec(i, j)
        assert np.max(np.abs(fd - ex) / np.maximum(np.abs(ex), 1.0)) < 1e-6


def test_recenter_zero_is_identity():
    ch = gallery.build("skew-jet")
    assert recenter_directrix(ch, {}) is ch


@pytest.mark.parametrize("name", ["skew-jet", "folded-torsal", "ellipsoid-normals", "lemon-umbilic"])
def test_recenter_changes_q_by_f_q1(name):
    ch = gallery.build(name)
    f = Poly({(0, 0): 1.0, (1, 0): 1.0})
    rc = recenter_directrix(ch, f)
    u, v = random_points(ch, 100, seed=3)
    for uu, vv in zip(u, v):
        q0 = q_forms(eval_frame(ch, uu, vv))
        q1 = q_forms(eval_frame(rc, uu, vv))
        fval = 1.0 + uu
        target = q0["Q"] + q0["Q1"].scale(fval)
        sc = max(q0["Q"].norm(), q0["Q1"].norm())
        assert all(abs(x - y) <= 1e-10 * sc for x, y in zip(q1["Q"], target))
        for k in ("Q2", "Q3", "Q4"):
            if q0[k].norm() > 1e-8 * sc * q0["Q1"].norm():
                assert coefficient_angle(q0[k], q1[k]) < 1e-8


def test_out_of_domain_and_missing_derivatives():
    ch = gallery.build("skew-jet")
    with pytest.raises(OutOfDomain):
        eval_frame(ch, 2.0, 0.0)
    cc = CallableChart(lambda u, v: ((0.0 * u, 0.0 * u, 1.0 + 0.0 * u), (u, v, 0.0 * u)),
                       (-1, 1, -1, 1), jet_aware=False)
    with pytest.raises(DerivativeUnavailable):
        eval_frame(cc, 0.0, 0.0)


def test_sigma_function_sign():
    f = sigma_n_function(gallery.build("skew-jet"))
    u, v = np.meshgrid(np.linspace(-0.5, 0.5, 21), np.linspace(-0.5, 0.5, 21))
    assert np.all(f(u, v) < 0)
    g = sigma_n_function(gallery.build("parabolic-graph-normals"))
    # parabolic set of z = u^2/2 + v^3/6 is v = 0
    assert abs(g(np.array([0.1]), np.array([0.0]))[0]) < 1e-14
    assert g(np.array([0.1]), np.array([0.2]))[0] < 0


def test_paraboloid_curvatures_at_origin():
    F = eval_frame(gallery.build("paraboloid-normals"), 0.0, 0.0)
    # principal curvatures 1, 1 at the vertex: A = C = 1, |a| = |c| = 1
    assert (F.A, F.B, F.C) == pytest.approx((1.0, 0.0, 1.0))
    assert (abs(F.a), F.b, abs(F.c)) == pytest.approx((1.0, 0.0, 1.0))


def test_normal_congruence_bbar_vanishes():
    for name in gallery.NORMAL_CONGRUENCES:
        ch = gallery.build(name)
        u, v = random_points(ch, 200, seed=4)
        F = chart_fundamentals(ch, u, v, 0)
        assert np.max(np.abs(np.asarray(F.bbar.value))) <= 1e-9
