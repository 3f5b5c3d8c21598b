import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from clab.errors import AllDirectionsNull, DegeneratePencil
from clab.quadform import (
    Direction, QuadForm, angular_distance, coefficient_angle, discriminant, eigen_residual,
    evaluate, generalized_eigenpairs, is_self_polar_triangle, jacobian, polar_pairing,
    polarization, proportional, quotient_extrema_oracle, roots,
)

R2 = math.sqrt(0.5)
coef = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
forms = st.builds(QuadForm, coef, coef, coef)


def close_form(p, q, tol=1e-12):
    return all(abs(x - y) <= tol * max(1.0, p.norm(), q.norm()) for x, y in zip(p, q))


@pytest.mark.parametrize("q, d, expected", [
    ((1, 0, 1), (1, 0), 1.0),
    ((1, 0, -1), (R2, R2), 0.0),
    ((0, 2, 0), (R2, R2), 1.0),
])
def test_evaluate_examples(q, d, expected):
    assert evaluate(QuadForm(*q), Direction.of(*d)) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("q, expected", [((1, 0, 1), -1), ((0, 2, 0), 1), ((1, 2, 1), 0)])
def test_discriminant_examples(q, expected):
    assert discriminant(QuadForm(*q)) == expected


def test_roots_examples():
    r = roots(QuadForm(1, 0, -1))
    assert len(r) == 2
    got = sorted((d.du, d.dv) for d in r)
    assert np.allclose(got, [(R2, -R2), (R2, R2)])
    assert roots(QuadForm(1, 0, 1)) == []
    (d,) = roots(QuadForm(1, 2, 1))
    assert d.multiplicity == 2
    assert (d.du, d.dv) == pytest.approx((R2, -R2))


def test_roots_of_zero_form():
    with pytest.raises(AllDirectionsNull):
        roots(QuadForm(0.0, 0.0, 0.0))


def test_roots_pure_cross_term():
    r = roots(QuadForm(0.0, 2.0, 0.0))
    assert {(d.du, d.dv) for d in r} == {(1.0, 0.0), (0.0, 1.0)}


@given(forms)
def test_roots_are_zeros(q):
    s = q.norm()
    assume(s > 1e-3)
    try:
        rs = roots(q)
    except AllDirectionsNull:
        return
    for d in rs:
        assert abs(evaluate(q, d)) <= 1e-10 * s
        assert math.hypot(d.du, d.dv) == pytest.approx(1.0)
        assert d.du > 0 or (d.du == 0 and d.dv > 0)
    if discriminant(q) < -1e-9 * s * s:
        assert rs == []


def test_jacobian_examples():
    J = jacobian(QuadForm(1, 0, 1), QuadForm(0, 1, 0))
    assert proportional(J, QuadForm(1, 0, -1))
    assert jacobian(QuadForm(3, 5, 7), QuadForm(3, 5, 7)).norm() == 0.0
    assert proportional(jacobian(QuadForm(1, 0, 1), QuadForm(2, 0, 3)), QuadForm(0, 1, 0))


@given(forms, forms, coef)
def test_jacobian_antisymmetric_and_pencil_invariant(p, q, t):
    assert close_form(jacobian(p, q), -jacobian(q, p), 1e-12)
    lhs = jacobian(p + q.scale(t), q)
    rhs = jacobian(p, q)
    sc = max(1.0, p.norm() * q.norm(), abs(t) * q.norm() ** 2)
    assert all(abs(x - y) <= 1e-10 * sc for x, y in zip(lhs, rhs))


@given(forms, forms, forms, coef)
def test_jacobian_bilinear(p, q, r, t):
    lhs = jacobian(p + r.scale(t), q)
    rhs = jacobian(p, q) + jacobian(r, q).scale(t)
    sc = max(1.0, (p.norm() + abs(t) * r.norm()) * q.norm())
    assert all(abs(x - y) <= 1e-10 * sc for x, y in zip(lhs, rhs))


@pytest.mark.parametrize("p, q, expected", [
    ((1, 0, 1), (1, 0, -1), 0.0),
    ((1, 0, 0), (1, 0, 0), 0.0),
    ((1, 0, 1), (1, 0, 1), -2.0),
])
def test_polar_pairing_examples(p, q, expected):
    assert polar_pairing(QuadForm(*p), QuadForm(*q)) == expected


@given(forms, forms)
def test_polar_pairing_of_jacobian_vanishes(q, p):
    J = jacobian(q, p)
    sc = max(1.0, q.norm() ** 2 * p.norm())
    assert abs(polar_pairing(q, J)) <= 1e-9 * sc
    assert abs(polar_pairing(p, J)) <= 1e-9 * max(1.0, p.norm() ** 2 * q.norm())
    assert polar_pairing(q, p) == pytest.approx(polar_pairing(p, q), rel=1e-14, abs=1e-14)


@given(forms, st.floats(0.1, 10))
def test_discriminant_scales_quadratically(q, t):
    assert discriminant(q.scale(t)) == pytest.approx(t * t * discriminant(q), rel=1e-9, abs=1e-9)


def test_eigenpairs_examples():
    pairs = generalized_eigenpairs(QuadForm(1, 0, 1), QuadForm(2, 0, 3))
    assert [p.mu for p in pairs] == pytest.approx([3.0, 2.0])
    assert (pairs[0].dir.du, pairs[0].dir.dv) == pytest.approx((1.0, 0.0))
    assert (pairs[1].dir.du, pairs[1].dir.dv) == pytest.approx((0.0, 1.0))
    with pytest.raises(DegeneratePencil):
        generalized_eigenpairs(QuadForm(1, 0, 1), QuadForm(1, 0, 1))
    pairs = generalized_eigenpairs(QuadForm(1, 0, 1), QuadForm(0, 1, 0))
    assert sorted(p.mu for p in pairs) == pytest.approx([-0.5, 0.5])
    for p in pairs:
        assert abs(p.dir.du) == pytest.approx(R2)
        assert p.dir.dv == pytest.approx(R2 if p.mu > 0 else -R2)


def test_self_polar_examples():
    assert is_self_polar_triangle(QuadForm(1, 0, 1), QuadForm(1, 0, -1), QuadForm(0, 1, 0))
    assert not is_self_polar_triangle(QuadForm(1, 0, 1), QuadForm(1, 0, 1), QuadForm(0, 1, 0))
    both = is_self_polar_triangle(QuadForm(1, 0, 1), QuadForm(1, 0, -1), QuadForm(0, 1, 0),
                                  check_jacobians=True)
    assert both == (True, True)


@given(forms, forms)
def test_self_polar_characterizations_agree(q1, q2):
    assume(q1.norm() > 0.1 and q2.norm() > 0.1)
    J = jacobian(q1, q2)
    assume(J.norm() > 1e-3 * q1.norm() * q2.norm())
    q4 = jacobian(q1, J)
    # (q1, J, jacobian(q1, J)) is self-polar when q1 and J are off the conic
    assume(abs(discriminant(q1)) > 1e-2 * q1.norm() ** 2)
    assume(abs(discriminant(J)) > 1e-2 * J.norm() ** 2)
    assume(q4.norm() > 1e-3 * q1.norm() ** 2 * J.norm())
    by_pairing, by_jac = is_self_polar_triangle(q1, J, q4, tol=1e-8, check_jacobians=True)
    assert by_pairing and by_jac


def test_oracle_examples():
    got = quotient_extrema_oracle(QuadForm(1, 0, 1), QuadForm(2, 0, 3), 10_000)
    assert len(got) == 2
    assert min(angular_distance(d, Direction(1.0, 0.0)) for d in got) < 1e-3
    assert min(angular_distance(d, Direction(0.0, 1.0)) for d in got) < 1e-3
    with pytest.raises(DegeneratePencil):
        quotient_extrema_oracle(QuadForm(1, 0, 1), QuadForm(1, 0, 1), 1000)
    got = quotient_extrema_oracle(QuadForm(1, 0, 1), QuadForm(0, 1, 0), 10_000)
    assert sorted(math.degrees(d.angle) for d in got) == pytest.approx([-45.0, 45.0], abs=0.06)


def random_definite(rng):
    L = rng.normal(size=(2, 2))
    M = L @ L.T + 0.2 * np.eye(2)
    return QuadForm(M[1, 1], 2 * M[0, 1], M[0, 0])


def test_q2_orthogonality_and_bisection():
    rng = np.random.default_rng(3)
    for _ in range(200):
        q2 = random_definite(rng)
        q1 = QuadForm(*rng.normal(size=3))
        assume_ok = discriminant(q1) > 1e-2
        if not assume_ok:
            continue
        pairs = generalized_eigenpairs(q1, q2)
        if len(pairs) != 2:
            continue
        d1, d2 = pairs[0].dir, pairs[1].dir
        assert abs(polarization(q2, d1, d2)) <= 1e-8 * q2.norm()
        for p in pairs:
            assert eigen_residual(q1, q2, p) <= 1e-9 * max(q1.norm(), q2.norm()) * max(1, abs(p.mu))
        # bisection of the roots of q1 in the q2 metric
        r1, r2 = roots(q1)
        G = np.array([[q2.a2, q2.a1 / 2], [q2.a1 / 2, q2.a0]])

        def ang(a, b):
            a, b = np.array(tuple(a)), np.array(tuple(b))
            c = abs(a @ G @ b) / math.sqrt((a @ G @ a) * (b @ G @ b))
            return math.acos(min(1.0, c))

        assert ang(d1, r1) == pytest.approx(ang(d1, r2), abs=1e-6)


def test_coefficient_angle_projective():
    q = QuadForm(1.0, -2.0, 0.5)
    assert coefficient_angle(q, q.scale(-3.0)) < 1e-12
