"""Local charts of line congruences and their pointwise differential data.

A chart maps parameters ``(u, v)`` to a unit direction ``n`` and a point
``x`` on each line.  Every chart exposes ``jets(u, v, order)`` which returns
the Taylor expansions of ``n`` and ``x`` (as 3-tuples of
:class:`~clab.jets.Jet`) at a point or a batch of points; all derivative
data downstream is read off these expansions.
"""
from dataclasses import dataclass, field

import numpy as np

from . import jets as J
from .errors import DegenerateImmersion, DerivativeUnavailable, OutOfDomain
from .jets import Jet, Jet3Scalar, Poly

U_POLY = Poly({(1, 0): 1.0})
V_POLY = Poly({(0, 1): 1.0})


class CongruenceChart:
    """Base class.  ``domain`` is ``(umin, umax, vmin, vmax)``."""

    kind = "chart"

    def __init__(self, domain=(-0.5, 0.5, -0.5, 0.5), name=None):
        umin, umax, vmin, vmax = (float(t) for t in domain)
        if not (umin < umax and vmin < vmax):
            raise ValueError("empty chart domain")
        self.domain = (umin, umax, vmin, vmax)
        self.name = name or self.kind

    def contains(self, u, v):
        umin, umax, vmin, vmax = self.domain
        u, v = np.asarray(u), np.asarray(v)
        return (u >= umin) & (u <= umax) & (v >= vmin) & (v <= vmax) & self._valid(u, v)

    def _valid(self, u, v):
        return np.ones(np.broadcast(u, v).shape, dtype=bool)

    def check_domain(self, u, v):
        if not np.all(self.contains(u, v)):
            raise OutOfDomain(f"({u}, {v}) outside the domain of {self.name}")

    def map(self, u, v, order):
        """Return ``(n, x)`` as 3-tuples of jets; implemented by subclasses."""
        raise NotImplementedError

    def jets(self, u, v, order=3):
        u = np.asarray(u, dtype=float)
        v = np.asarray(v, dtype=float)
        self.check_domain(u, v)
        uu = Jet.variable(u, 0, order)
        vv = Jet.variable(v, 1, order)
        return self.map(uu, vv, order)

    def __call__(self, u, v):
        n, x = self.jets(u, v, 0)
        return np.array([J.value(t) for t in n]), np.array([J.value(t) for t in x])


class JetChart(CongruenceChart):
    """Directrix ``x = (x1, x2, 0)`` with polynomial components and line
    directions ``n = (n1, n2, sqrt(1 - n1**2 - n2**2))``; by default
    ``n1 = u`` and ``n2 = v``."""

    kind = "jet"

    def __init__(self, alpha, beta, n1=None, n2=None, domain=(-0.5, 0.5, -0.5, 0.5), name=None):
        super().__init__(domain, name)
        self.alpha = alpha if isinstance(alpha, Poly) else Jet3Scalar.from_subscripts(alpha)
        self.beta = beta if isinstance(beta, Poly) else Jet3Scalar.from_subscripts(beta)
        self.n1 = n1 if n1 is not None else U_POLY
        self.n2 = n2 if n2 is not None else V_POLY

    def _valid(self, u, v):
        return self.n1(u, v) ** 2 + self.n2(u, v) ** 2 < 1.0

    def map(self, u, v, order):
        n1, n2 = self.n1(u, v), self.n2(u, v)
        n = (n1, n2, J.sqrt(1.0 - n1 * n1 - n2 * n2))
        x = (self.alpha(u, v) + 0.0 * u, self.beta(u, v) + 0.0 * u, 0.0 * u)
        return n, x


class SurfaceNormal(CongruenceChart):
    """Normals of a parametrized surface ``X(u, v)``; the directrix is the
    surface itself.  ``surface`` must accept jets as well as arrays."""

    kind = "surface"

    def __init__(self, surface, domain, orientation=1, name=None, valid=None):
        super().__init__(domain, name)
        self.surface = surface
        self.orientation = 1.0 if orientation >= 0 else -1.0
        self.valid = valid

    def _valid(self, u, v):
        if self.valid is None:
            return super()._valid(u, v)
        return np.asarray(self.valid(u, v), bool)

    def map(self, u, v, order):
        # one extra order so that the normal keeps ``order``
        uu = Jet.variable(u.value, 0, order + 1)
        vv = Jet.variable(v.value, 1, order + 1)
        X = self.surface(uu, vv)
        Xu = tuple(t.du for t in X)
        Xv = tuple(t.dv for t in X)
        m = J.cross(Xu, Xv)
        norm2 = J.dot(m, m)
        if np.any(J.value(norm2) <= 1e-24):
            raise DegenerateImmersion(f"surface {self.name} is not immersive here")
        inv = norm2 ** -0.5 * self.orientation
        n = tuple(t * inv for t in m)
        x = tuple(t.truncate(order) for t in X)
        return n, x


class CallableChart(CongruenceChart):
    """A user map ``fn(u, v) -> (n, x)``.

    With ``jet_aware=True`` the function is assumed to be written with the
    jet-aware helpers in :mod:`clab.jets`, so it can be differentiated
    exactly.  Otherwise only values are available.
    """

    kind = "callable"

    def __init__(self, fn, domain, jet_aware=True, name=None):
        super().__init__(domain, name)
        self.fn = fn
        self.jet_aware = jet_aware

    def jets(self, u, v, order=3):
        if order > 0 and not self.jet_aware:
            raise DerivativeUnavailable(f"chart {self.name} has no derivative data")
        return super().jets(u, v, order)

    def map(self, u, v, order):
        if order == 0:
            n, x = self.fn(u.value, v.value)
            return tuple(Jet.constant(t, 0) for t in n), tuple(Jet.constant(t, 0) for t in x)
        n, x = self.fn(u, v)
        return tuple(_as_jet(t, u) for t in n), tuple(_as_jet(t, u) for t in x)


def _as_jet(t, like):
    return t if isinstance(t, Jet) else like * 0.0 + t


class RecenteredChart(CongruenceChart):
    """The same lines with directrix moved to ``x + f n``."""

    kind = "recentered"

    def __init__(self, base, f):
        super().__init__(base.domain, f"{base.name}+f")
        self.base = base
        self.f = f

    def _valid(self, u, v):
        return self.base._valid(u, v)

    def jets(self, u, v, order=3):
        n, x = self.base.jets(u, v, order)
        uu = Jet.variable(np.asarray(u, dtype=float), 0, order)
        vv = Jet.variable(np.asarray(v, dtype=float), 1, order)
        f = _as_jet(self.f(uu, vv), uu)
        return n, tuple(xi + f * ni for xi, ni in zip(x, n))


def recenter_directrix(chart, f):
    if isinstance(f, dict):
        f = Jet3Scalar.from_subscripts(f)
    if not f.coeffs:
        return chart
    return RecenteredChart(chart, f)


def normal_congruence_of(surface, domain, orientation=1, name=None, valid=None):
    """Congruence of normals of ``surface``; ``valid(u, v)`` optionally
    restricts the rectangle further."""
    return SurfaceNormal(surface, domain, orientation, name, valid)


# --- fundamentals -------------------------------------------------------------

@dataclass
class Fundamentals:
    """Coefficients built from first derivatives of ``n`` and ``x``.

    Entries are floats, arrays or jets depending on the input.  ``sigma``
    is the signed triple product ``[n, n_u, n_v]``; its square is
    ``A*C - B**2`` and its zero set is the singular set of ``n``.
    ``pitch_form`` is the quadratic form ``[x', n, n']`` whose quotient by
    ``Q1`` is the pitch of the ruled surface in a given direction.
    """

    A: object
    B: object
    C: object
    a: object
    b1: object
    b2: object
    c: object
    b: object
    bbar: object
    sigma: object
    pitch_form: tuple


def fundamentals(n, nu, nv, xu, xv):
    A, B, C = J.dot(nu, nu), J.dot(nu, nv), J.dot(nv, nv)
    a, b1 = -J.dot(nu, xu), -J.dot(nu, xv)
    b2, c = -J.dot(nv, xu), -J.dot(nv, xv)
    pitch = (
        J.triple(xv, n, nv),
        J.triple(xu, n, nv) + J.triple(xv, n, nu),
        J.triple(xu, n, nu),
    )
    return Fundamentals(
        A, B, C, a, b1, b2, c,
        -0.5 * (b1 + b2), -0.5 * (b1 - b2),
        J.triple(n, nu, nv),
        pitch,
    )


def chart_fundamentals(chart, u, v, order=1):
    """Fundamentals as jets of the given order at ``(u, v)`` (batched)."""
    n, x = chart.jets(u, v, order + 1)
    nu = tuple(t.du for t in n)
    nv = tuple(t.dv for t in n)
    xu = tuple(t.du for t in x)
    xv = tuple(t.dv for t in x)
    n = tuple(t.truncate(order) for t in n)
    return fundamentals(n, nu, nv, xu, xv)


def fundamentals_values(chart, u, v):
    """Fundamentals as plain floats/arrays (no derivative data kept)."""
    F = chart_fundamentals(chart, u, v, order=0)
    return Fundamentals(**{k: _val(getattr(F, k)) for k in F.__dataclass_fields__})


def _val(t):
    if isinstance(t, tuple):
        return tuple(_val(s) for s in t)
    return np.asarray(J.value(t)) if isinstance(t, Jet) else t


_PARTIALS = {
    "": (0, 0), "_u": (1, 0), "_v": (0, 1),
    "_uu": (2, 0), "_uv": (1, 1), "_vv": (0, 2),
    "_uuu": (3, 0), "_uuv": (2, 1), "_uvv": (1, 2), "_vvv": (0, 3),
}


@dataclass
class PointFrame:
    u: float
    v: float
    partials: dict = field(repr=False)
    A: float = 0.0
    B: float = 0.0
    C: float = 0.0
    a: float = 0.0
    b1: float = 0.0
    b2: float = 0.0
    c: float = 0.0
    b: float = 0.0
    bbar: float = 0.0
    sigma: float = 0.0
    pitch_form: tuple = ()

    def __getattr__(self, name):
        # n, x, n_u, x_vv, n_uuv, ... live in ``partials``
        partials = self.__dict__.get("partials")
        if partials is not None and name in partials:
            return partials[name]
        raise AttributeError(name)


def eval_frame(chart, u, v):
    """All partials of ``n`` and ``x`` up to order 3 and the fundamentals
    at one parameter point (``u``, ``v`` may also be arrays)."""
    n, x = chart.jets(u, v, 3)
    partials = {}
    for suffix, (i, j) in _PARTIALS.items():
        partials["n" + suffix] = np.array([t.partial(i, j) for t in n])
        partials["x" + suffix] = np.array([t.partial(i, j) for t in x])
    p = partials
    F = fundamentals(p["n"], p["n_u"], p["n_v"], p["x_u"], p["x_v"])
    vals = {k: getattr(F, k) for k in F.__dataclass_fields__}
    vals["pitch_form"] = tuple(float(t) if np.ndim(t) == 0 else t for t in vals["pitch_form"])
    return PointFrame(u=u, v=v, partials=partials, **vals)


def sigma_n_function(chart):
    """Field ``(u, v) -> B**2 - A*C``, zero exactly on the singular set of n."""
    def field(u, v):
        F = fundamentals_values(chart, u, v)
        return F.B * F.B - F.A * F.C
    return field


def sigma_signed_function(chart):
    """The signed triple product ``[n, n_u, n_v]``; it vanishes to first
    order on the singular set, so it is the field to contour."""
    def field(u, v):
        return fundamentals_values(chart, u, v).sigma
    return field
