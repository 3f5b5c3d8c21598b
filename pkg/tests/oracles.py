"""Independent reference computations shared by the test suites."""
import math

import numpy as np
import sympy as sp
from scipy.integrate import solve_ivp

from clab.foliation import PortraitSpec, trace

U, V = sp.symbols("u v")


def curvature_slope_field(height):
    """Coefficients ``(e2, e1, e0)`` of ``e2 p^2 + e1 p + e0 = 0`` (``p =
    dv/du``) for the lines of curvature of the graph ``z = height(u, v)``,
    from its two fundamental forms."""
    X = sp.Matrix([U, V, height])
    Xu, Xv = X.diff(U), X.diff(V)
    N = Xu.cross(Xv)
    N = N / sp.sqrt(N.dot(N))
    E, F, G = Xu.dot(Xu), Xu.dot(Xv), Xv.dot(Xv)
    L, M, Nn = X.diff(U, 2).dot(N), X.diff(U, V).dot(N), X.diff(V, 2).dot(N)
    return sp.lambdify((U, V), [F * Nn - G * M, E * Nn - G * L, E * M - F * L], "math")


def curvature_line_deviation(chart, height, seed, branch, tol=1e-10, max_steps=150):
    """Largest distance between a traced principal leaf through ``seed``
    and the line of curvature integrated with scipy from the same seed,
    over the stretch where the leaf is a graph with slope at most 2.
    Returns ``(deviation, vertices compared)``."""
    coeffs = curvature_slope_field(height)
    c = trace(chart, seed, branch, PortraitSpec(tol=tol, max_steps=max_steps), "Q2")
    i0 = int(np.argmin(np.hypot(*(c.points - np.asarray(seed)).T)))
    d0 = c.directions[i0]
    swap = abs(d0[1]) > abs(d0[0])  # integrate u as a function of v
    ind = 1 if swap else 0
    ref = [None]

    def slope(t, y):
        uu, vv = (y[0], t) if swap else (t, y[0])
        e2, e1, e0 = coeffs(uu, vv)
        if swap:
            e2, e0 = e0, e2
        s = math.sqrt(max(e1 * e1 - 4 * e2 * e0, 0.0))
        if e2 == 0.0:
            r = [-e0 / e1 if e1 else math.inf]
        else:
            r = [(-e1 + s) / (2 * e2), (-e1 - s) / (2 * e2)]
        pick = min(r, key=lambda x: abs(x - ref[0]))
        ref[0] = pick
        return [pick]

    t = c.points[:, ind]
    d = c.directions
    steep = np.abs(d[:, 1 - ind]) > 2 * np.abs(d[:, ind])
    worst, compared = 0.0, 0
    for seg in (slice(i0, None), slice(i0, None, -1)):
        tt = t[seg]
        if len(tt) < 3:
            continue
        steps = np.sign(np.diff(tt))
        n = (np.argmax(steps != steps[0]) or len(steps)) + 1
        n = min(n, int(np.argmax(steep[seg])) or n)
        tt = tt[:n]
        if len(tt) < 3:
            continue
        ref[0] = d0[0] / d0[1] if swap else d0[1] / d0[0]
        sol = solve_ivp(slope, (tt[0], tt[-1]), [c.points[i0, 1 - ind]], t_eval=tt,
                        rtol=1e-11, atol=1e-12, method="DOP853")
        worst = max(worst, float(np.max(np.abs(sol.y[0] - c.points[seg][:n, 1 - ind]))))
        compared += n
    return worst, compared
