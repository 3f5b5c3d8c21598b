"""Binary quadratic forms ``a0*dv**2 + a1*du*dv + a2*du**2``.

The middle coefficient ``a1`` is stored in full (it is twice the "b" of the
``(a, 2b, c)`` display convention).  The algebraic operations (discriminant,
Jacobian, polar pairing) are polynomial in the coefficients and work
unchanged when the coefficients are numpy arrays or :class:`~clab.jets.Jet`
objects, which is how whole fields of forms are handled elsewhere.
"""
from dataclasses import dataclass
import math

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import AllDirectionsNull, DegeneratePencil

ZERO_TOL = 1e-12


@dataclass(frozen=True)
class QuadForm:
    a0: object  # dv^2
    a1: object  # du dv (full coefficient)
    a2: object  # du^2

    def __iter__(self):
        return iter((self.a0, self.a1, self.a2))

    def __add__(self, other):
        return QuadForm(self.a0 + other.a0, self.a1 + other.a1, self.a2 + other.a2)

    def __sub__(self, other):
        return QuadForm(self.a0 - other.a0, self.a1 - other.a1, self.a2 - other.a2)

    def __neg__(self):
        return QuadForm(-self.a0, -self.a1, -self.a2)

    def scale(self, t):
        return QuadForm(t * self.a0, t * self.a1, t * self.a2)

    def as_array(self):
        return np.array([float(self.a0), float(self.a1), float(self.a2)])

    def map(self, fn):
        return QuadForm(fn(self.a0), fn(self.a1), fn(self.a2))

    def norm(self):
        return max(abs(self.a0), abs(self.a1), abs(self.a2))

    def is_zero(self, scale=1.0, tol=ZERO_TOL):
        return self.norm() <= tol * scale


@dataclass(frozen=True, eq=False)
class Direction:
    """Projective direction (du, dv), unit length, first nonzero component
    positive.  ``multiplicity`` is 2 for the double root of a degenerate form."""

    du: float
    dv: float
    multiplicity: int = 1

    @classmethod
    def of(cls, du, dv, multiplicity=1):
        r = math.hypot(du, dv)
        if r == 0.0:
            raise ValueError("zero direction")
        du, dv = du / r, dv / r
        if du < 0.0 or (du == 0.0 and dv < 0.0):
            du, dv = -du, -dv
        return cls(du + 0.0, dv + 0.0, multiplicity)

    @classmethod
    def at_angle(cls, theta):
        return cls.of(math.cos(theta), math.sin(theta))

    @property
    def angle(self):
        """Angle in (-pi/2, pi/2]."""
        return math.atan2(self.dv, self.du)

    def __iter__(self):
        return iter((self.du, self.dv))

    def __eq__(self, other):
        return isinstance(other, Direction) and (self.du, self.dv) == (other.du, other.dv)

    def __hash__(self):
        return hash((self.du, self.dv))


@dataclass(frozen=True)
class EigenPair:
    mu: float
    dir: Direction


def angular_distance(d1, d2):
    """Distance between two projective directions, in [0, pi/2]."""
    c = abs(d1.du * d2.du + d1.dv * d2.dv)
    s = abs(d1.du * d2.dv - d1.dv * d2.du)
    return math.atan2(s, c)


def evaluate(q, d):
    du, dv = d
    return q.a0 * dv * dv + q.a1 * du * dv + q.a2 * du * du


def polarization(q, d1, d2):
    """Symmetric bilinear form of ``q`` evaluated on two directions."""
    u1, v1 = d1
    u2, v2 = d2
    return q.a0 * v1 * v2 + 0.5 * q.a1 * (u1 * v2 + u2 * v1) + q.a2 * u1 * u2


def discriminant(q):
    return 0.25 * q.a1 * q.a1 - q.a0 * q.a2


def jacobian(q1, q2):
    """Determinant with first row (du^2, -du dv, dv^2) and rows of the two
    forms' (dv^2, half-middle, du^2) coefficients; roots are the
    stationary directions of q2/q1."""
    p0, p1, p2 = q1
    r0, r1, r2 = q2
    return QuadForm(
        0.5 * (p0 * r1 - p1 * r0),
        p0 * r2 - p2 * r0,
        0.5 * (p1 * r2 - p2 * r1),
    )


def polar_pairing(q1, q2):
    """Zero iff each form lies on the polar line of the other with respect
    to the conic of degenerate forms."""
    return 0.5 * q1.a1 * q2.a1 - q1.a0 * q2.a2 - q2.a0 * q1.a2


def matrix(q):
    """Symmetric matrix of ``q`` in the (du, dv) basis."""
    return np.array([[q.a2, 0.5 * q.a1], [0.5 * q.a1, q.a0]], dtype=float)


def _scale(*forms):
    return max((f.norm() for f in forms), default=0.0)


def roots(q, tol=1e-12):
    """Real root directions of ``q``; a double root is returned once with
    ``multiplicity == 2``."""
    a0, a1, a2 = (float(x) for x in q)
    s = max(abs(a0), abs(a1), abs(a2))
    if s <= ZERO_TOL * max(s, 1e-300) or s == 0.0:
        raise AllDirectionsNull("all directions are null for a zero form")
    a0, a1, a2 = a0 / s, a1 / s, a2 / s
    disc = a1 * a1 - 4.0 * a0 * a2
    if disc < -tol:
        return []
    double = abs(disc) <= tol
    sq = 0.0 if double else math.sqrt(disc)
    # solve for the slope in whichever variable has the larger leading coefficient
    if abs(a0) >= abs(a2):
        lead, mid, const = a0, a1, a2
        make = lambda t: Direction.of(1.0, t)  # t = dv/du
    else:
        lead, mid, const = a2, a1, a0
        make = lambda t: Direction.of(t, 1.0)  # t = du/dv
    if lead == 0.0:
        # pure cross term: the coordinate directions
        return [Direction(1.0, 0.0), Direction(0.0, 1.0)]
    if double:
        d = make(-mid / (2.0 * lead))
        return [Direction(d.du, d.dv, 2)]
    t = -0.5 * (mid + math.copysign(sq, mid))
    if t == 0.0:
        # mid == 0 and const == 0 would be a double root, handled above
        return [make(0.0)]
    return sorted({make(t / lead), make(const / t)}, key=lambda d: d.angle)


def generalized_eigenpairs(q1, q2, tol=1e-12):
    """Pairs (mu, w) with E2 w = mu E1 w, using the roots of jacobian(q1, q2)
    as directions and the Rayleigh quotient for mu."""
    s1, s2 = q1.norm(), q2.norm()
    J = jacobian(q1, q2)
    if J.norm() <= tol * max(s1 * s2, 1e-300):
        raise DegeneratePencil("q2 is a multiple of q1: every direction is stationary")
    pairs = []
    for d in roots(J):
        den = evaluate(q1, d)
        if abs(den) <= tol * s1:
            continue
        pairs.append(EigenPair(evaluate(q2, d) / den, d))
    pairs.sort(key=lambda p: -p.mu)
    return pairs


def eigen_residual(q1, q2, pair):
    w = np.array([pair.dir.du, pair.dir.dv])
    return float(np.linalg.norm(matrix(q2) @ w - pair.mu * matrix(q1) @ w))


def proportional(p, q, tol=1e-7):
    """True when the two forms are parallel as vectors of coefficients
    (angular distance in coefficient space at most ``tol``)."""
    x, y = p.as_array(), q.as_array()
    nx, ny = np.linalg.norm(x), np.linalg.norm(y)
    if nx == 0.0 or ny == 0.0:
        return nx == ny
    c = abs(float(x @ y)) / (nx * ny)
    return math.acos(min(1.0, c)) <= tol if c < 1.0 - 1e-3 else float(np.linalg.norm(np.cross(x / nx, y / ny))) <= tol


def coefficient_angle(p, q):
    """Angle between two forms as points of the projective plane."""
    x, y = p.as_array(), q.as_array()
    x, y = x / np.linalg.norm(x), y / np.linalg.norm(y)
    return float(math.atan2(np.linalg.norm(np.cross(x, y)), abs(x @ y)))


def is_self_polar_triangle(q1, q2, q3, tol=1e-8, check_jacobians=False):
    """All three pairwise polar pairings vanish within ``tol * scale``.

    With ``check_jacobians`` the function also requires each vertex to be
    proportional to the Jacobian of the other two, and returns the pair
    ``(by_pairing, by_jacobian)``.
    """
    forms = (q1, q2, q3)
    for f in forms:
        if f.norm() == 0.0:
            raise ValueError("self-polar test needs nonzero forms")
    ok = True
    for i in range(3):
        for j in range(i + 1, 3):
            sc = forms[i].norm() * forms[j].norm()
            if abs(polar_pairing(forms[i], forms[j])) > tol * sc:
                ok = False
    if not check_jacobians:
        return ok
    jok = True
    for i in range(3):
        a, b = forms[(i + 1) % 3], forms[(i + 2) % 3]
        J = jacobian(a, b)
        if J.norm() <= 1e-14 * a.norm() * b.norm() or coefficient_angle(J, forms[i]) > math.sqrt(tol):
            jok = False
    return ok, jok


def quotient_extrema_oracle(q1, q2, samples=10_000):
    """Brute-force local extremizers of q2/q1 over directions.

    Scans ``samples`` angles of the half circle, keeps discrete local
    extrema (cyclically), and polishes each with a golden-section search.
    Raises DegeneratePencil when the quotient is flat.
    """
    if samples < 1000:
        raise ValueError("need at least 1000 samples")
    th = np.linspace(0.0, np.pi, samples, endpoint=False)
    c, s = np.cos(th), np.sin(th)
    f = (q2.a0 * s * s + q2.a1 * c * s + q2.a2 * c * c) / (q1.a0 * s * s + q1.a1 * c * s + q1.a2 * c * c)
    if np.ptp(f) <= 1e-12 * max(np.max(np.abs(f)), 1e-300):
        raise DegeneratePencil("quotient is constant")

    def quot(t):
        ct, st = math.cos(t), math.sin(t)
        return float(evaluate(q2, (ct, st)) / evaluate(q1, (ct, st)))

    h = np.pi / samples
    out = []
    prev, nxt = np.roll(f, 1), np.roll(f, -1)
    for idx in np.flatnonzero(((f > prev) & (f >= nxt)) | ((f < prev) & (f <= nxt))):
        t0 = th[idx]
        sign = -1.0 if f[idx] > prev[idx] else 1.0
        res = minimize_scalar(lambda t: sign * quot(t), bracket=(t0 - h, t0, t0 + h),
                              method="golden", tol=1e-12)
        out.append(Direction.at_angle(res.x))
    return out
