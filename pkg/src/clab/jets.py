"""Truncated bivariate Taylor polynomials ("jets") with exact arithmetic.

A :class:`Jet` of order ``N`` at a base point ``(u0, v0)`` stores the Taylor
coefficients ``c[i, j]`` of ``du**i * dv**j`` for ``i + j <= N``.  Coefficient
arrays may carry trailing batch dimensions, so one Jet can represent the
same germ computation at many base points at once.

Monomials are laid out by total degree, then by the power of ``dv``::

    index(i, j) = d * (d + 1) // 2 + j,   d = i + j

so truncating to a lower order is a prefix slice.
"""
from functools import lru_cache
from math import factorial

import numpy as np

from . import _kernels


def n_monomials(order):
    return (order + 1) * (order + 2) // 2


def mono_index(i, j):
    d = i + j
    return d * (d + 1) // 2 + j


@lru_cache(maxsize=None)
def monomials(order):
    return tuple((d - j, j) for d in range(order + 1) for j in range(d + 1))


@lru_cache(maxsize=None)
def _mul_tables(order):
    mons = monomials(order)
    rows = []
    for k, (ik, jk) in enumerate(mons):
        for a, (ia, ja) in enumerate(mons):
            ib, jb = ik - ia, jk - ja
            if ib >= 0 and jb >= 0:
                rows.append((k, a, mono_index(ib, jb)))
    K, I, J = (np.array(col, dtype=np.int64) for col in zip(*rows))
    starts = np.flatnonzero(np.r_[True, K[1:] != K[:-1]])
    return I, J, K, starts


@lru_cache(maxsize=None)
def _diff_tables(order):
    """Source indices and factors for d/du and d/dv (result has order-1)."""
    mons = monomials(order - 1)
    su = np.array([mono_index(i + 1, j) for i, j in mons], dtype=np.int64)
    fu = np.array([i + 1 for i, j in mons], dtype=float)
    sv = np.array([mono_index(i, j + 1) for i, j in mons], dtype=np.int64)
    fv = np.array([j + 1 for i, j in mons], dtype=float)
    return su, fu, sv, fv


class Jet:
    """Truncated Taylor polynomial in (du, dv)."""

    __slots__ = ("c", "order")
    __array_ufunc__ = None

    def __init__(self, coeffs, order):
        self.c = coeffs
        self.order = order

    # construction ---------------------------------------------------------
    @classmethod
    def constant(cls, value, order):
        value = np.asarray(value, dtype=float)
        c = np.zeros((n_monomials(order),) + value.shape)
        c[0] = value
        return cls(c, order)

    @classmethod
    def variable(cls, value, which, order):
        """The coordinate function ``u`` (which=0) or ``v`` (which=1)."""
        jet = cls.constant(value, order)
        if order >= 1:
            jet.c[1 + which] = 1.0
        return jet

    @property
    def value(self):
        return self.c[0]

    @property
    def batch_shape(self):
        return self.c.shape[1:]

    def coeff(self, i, j):
        return self.c[mono_index(i, j)]

    def partial(self, i, j):
        """The partial derivative d^(i+j) / du^i dv^j at the base point."""
        return self.c[mono_index(i, j)] * (factorial(i) * factorial(j))

    def truncate(self, order):
        if order >= self.order:
            return self
        return Jet(self.c[: n_monomials(order)], order)

    # calculus -------------------------------------------------------------
    def d(self, which):
        """Formal partial derivative; the result has order ``order - 1``."""
        if self.order == 0:
            raise ValueError("cannot differentiate an order-0 jet")
        su, fu, sv, fv = _diff_tables(self.order)
        src, fac = (su, fu) if which == 0 else (sv, fv)
        fac = fac.reshape((-1,) + (1,) * len(self.batch_shape))
        return Jet(self.c[src] * fac, self.order - 1)

    @property
    def du(self):
        return self.d(0)

    @property
    def dv(self):
        return self.d(1)

    def compose(self, taylor):
        """Apply a univariate function given its Taylor coefficients at
        ``self.value``: ``sum(taylor[k] * (self - value)**k)``."""
        h = Jet(self.c.copy(), self.order)
        h.c[0] = 0.0
        out = Jet.constant(taylor[self.order], self.order)
        for k in range(self.order - 1, -1, -1):
            out = out * h
            out.c[0] = out.c[0] + taylor[k]
        return out

    # arithmetic -----------------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, Jet):
            if other.order == self.order:
                return self, other
            order = min(self.order, other.order)
            return self.truncate(order), other.truncate(order)
        return None

    def __add__(self, other):
        pair = self._coerce(other)
        if pair is None:
            c = self.c.copy()
            c[0] = c[0] + other
            return Jet(c, self.order)
        a, b = pair
        return Jet(a.c + b.c, a.order)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.c, self.order)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        pair = self._coerce(other)
        if pair is None:
            return Jet(self.c * np.asarray(other, dtype=float), self.order)
        a, b = pair
        return Jet(_mul(a.c, b.c, a.order), a.order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return Jet(self.c / np.asarray(other, dtype=float), self.order)

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            return self.compose(_power_taylor(self.value, n, self.order))
        out = Jet.constant(np.ones(self.batch_shape), self.order)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def reciprocal(self):
        g0 = self.value
        return self.compose([(-1.0) ** k * g0 ** (-k - 1.0) for k in range(self.order + 1)])

    def sqrt(self):
        g0 = self.value
        return self.compose([comb_half(k) * g0 ** (0.5 - k) for k in range(self.order + 1)])

    def sin(self):
        s, c = np.sin(self.value), np.cos(self.value)
        cyc = (s, c, -s, -c)
        return self.compose([cyc[k % 4] / factorial(k) for k in range(self.order + 1)])

    def cos(self):
        s, c = np.sin(self.value), np.cos(self.value)
        cyc = (c, -s, -c, s)
        return self.compose([cyc[k % 4] / factorial(k) for k in range(self.order + 1)])

    def exp(self):
        e = np.exp(self.value)
        return self.compose([e / factorial(k) for k in range(self.order + 1)])

    def linear_change(self, M):
        """The jet of ``f(M @ (s, t))`` in the new variables ``(s, t)``."""
        M = np.asarray(M, dtype=float)
        zero = np.zeros(self.batch_shape)
        s = Jet.variable(zero, 0, self.order)
        t = Jet.variable(zero, 1, self.order)
        u = s * M[0, 0] + t * M[0, 1]
        v = s * M[1, 0] + t * M[1, 1]
        upow, vpow = [Jet.constant(np.ones(self.batch_shape), self.order)], None
        for _ in range(self.order):
            upow.append(upow[-1] * u)
        vpow = [upow[0]]
        for _ in range(self.order):
            vpow.append(vpow[-1] * v)
        out = Jet(np.zeros_like(self.c), self.order)
        for k, (i, j) in enumerate(monomials(self.order)):
            out = out + (upow[i] * vpow[j]) * self.c[k]
        return out

    def __repr__(self):
        return f"Jet(order={self.order}, c={self.c!r})"


def comb_half(k):
    """Generalized binomial coefficient C(1/2, k)."""
    out = 1.0
    for i in range(k):
        out *= (0.5 - i) / (i + 1)
    return out


def _power_taylor(g0, p, order):
    out = []
    coef = 1.0
    for k in range(order + 1):
        out.append(coef * g0 ** (p - k))
        coef *= (p - k) / (k + 1)
    return out


def _mul(a, b, order):
    if order == 0:
        return a * b
    batch = a.shape[1:]
    M = a.shape[0]
    a2 = a.reshape(M, -1)
    b2 = b.reshape(M, -1)
    I, J, K, starts = _mul_tables(order)
    if _kernels.USE_NUMBA:
        out = _kernels.jet_mul_numba(
            np.ascontiguousarray(a2), np.ascontiguousarray(b2), I, J, K, M
        )
    else:
        out = _kernels.jet_mul_numpy(a2, b2, I, J, starts)
    return out.reshape((M,) + batch)


# --- jet-aware elementary functions -------------------------------------------

def sqrt(x):
    return x.sqrt() if isinstance(x, Jet) else np.sqrt(x)


def sin(x):
    return x.sin() if isinstance(x, Jet) else np.sin(x)


def cos(x):
    return x.cos() if isinstance(x, Jet) else np.cos(x)


def exp(x):
    return x.exp() if isinstance(x, Jet) else np.exp(x)


def value(x):
    return x.value if isinstance(x, Jet) else x


# --- 3-vectors of jets -----------------------------------------------------------

def dot(p, q):
    return p[0] * q[0] + p[1] * q[1] + p[2] * q[2]


def cross(p, q):
    return (
        p[1] * q[2] - p[2] * q[1],
        p[2] * q[0] - p[0] * q[2],
        p[0] * q[1] - p[1] * q[0],
    )


def triple(p, q, r):
    return dot(p, cross(q, r))


# --- polynomials in (u, v) -----------------------------------------------------------

class Poly:
    """A bivariate polynomial ``sum c[(i, j)] u**i v**j`` in absolute
    coordinates; evaluates on floats, arrays, or jets."""

    def __init__(self, coeffs=None):
        self.coeffs = {k: float(v) for k, v in (coeffs or {}).items() if v != 0.0}

    @property
    def degree(self):
        return max((i + j for i, j in self.coeffs), default=0)

    def __call__(self, u, v):
        out = 0.0
        upow, vpow = {0: 1.0}, {0: 1.0}
        for (i, j), c in sorted(self.coeffs.items()):
            for cache, base, e in ((upow, u, i), (vpow, v, j)):
                if e not in cache:
                    cache[e] = _pow_cached(cache, base, e)
            out = out + c * (upow[i] * vpow[j])
        return out

    def __add__(self, other):
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0.0) + v
        return Poly(out)

    def __eq__(self, other):
        return isinstance(other, Poly) and self.coeffs == other.coeffs

    def __repr__(self):
        return f"Poly({self.coeffs})"


def _pow_cached(cache, base, e):
    k = max(k for k in cache if k < e)
    out = cache[k]
    for _ in range(e - k):
        out = out * base
    return out


class Jet3Scalar(Poly):
    """Degree <= 3 polynomial keyed by the ``"dk"`` subscripts used for
    directrix coefficients: ``"dk"`` multiplies ``u**(d-k) * v**k``."""

    def __init__(self, coeffs=None):
        super().__init__(coeffs)
        if self.degree > 3:
            raise ValueError("Jet3Scalar has degree at most 3")

    @classmethod
    def from_subscripts(cls, table):
        coeffs = {}
        for key, val in (table or {}).items():
            key = str(key)
            if len(key) != 2 or not key.isdigit():
                raise ValueError(f"bad coefficient subscript {key!r}")
            d, k = int(key[0]), int(key[1])
            if k > d or d > 3:
                raise ValueError(f"bad coefficient subscript {key!r}")
            coeffs[(d - k, k)] = coeffs.get((d - k, k), 0.0) + float(val)
        return cls(coeffs)

    def to_subscripts(self):
        return {f"{i + j}{j}": c for (i, j), c in sorted(self.coeffs.items(), key=lambda t: (sum(t[0]), t[0][1]))}
