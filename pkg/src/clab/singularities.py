"""Singular loci of the congruence BDEs and the local classification of
their singular points.

Classification follows the standard jet criteria for binary differential
equations:

* at a point of the discriminant where the coefficients do not all vanish,
  rotate so that the double direction is ``dt = 0`` and read the 2-jet as
  ``a0 p^2 + (b0 + b1 s + b2 t) p + c1 s + c2 t + c3 s^2 + ...`` with
  ``p = dt/ds``; ``c1 != 0`` gives a family of cusps, otherwise the folded
  type is decided by ``lam = (4 a0 c3 - b1^2 - b1 c2) / (4 c2^2)``;
* at a point where all coefficients vanish, the 1-jet
  ``(a1 u + a2 v, 2 b1 u + 2 b2 v, c1 u + c2 v)`` gives the cubic
  ``phi`` and the quadratic ``alpha`` which separate lemon, star and monstar.
"""
from dataclasses import dataclass, field
import math

import numpy as np

from . import _kernels
from .congruence import chart_fundamentals, fundamentals_values
from .errors import (
    AllCoefficientsZero, NotMorse, NotOnDiscriminant, NotOnSigmaN, NotUmbilic,
)
from .formfields import FormField, LensField, pitch_form, q_forms
from .jets import Jet
from .quadform import QuadForm, discriminant

LABELS = (
    "CuspFamily", "FoldedSaddle", "FoldedNode", "FoldedFocus",
    "Lemon", "Star", "Monstar", "SigmaFold", "SigmaCusp", "Degenerate",
)
FOLDED = ("FoldedSaddle", "FoldedNode", "FoldedFocus")
LAMBDA_BAND = 1e-9


@dataclass
class LocusCurve:
    kind: str
    points: np.ndarray
    refined: bool = True
    closed: bool = False


@dataclass
class SingularityReport:
    at: tuple
    lens: str
    label: str
    kind: str = ""
    diagnostics: dict = field(default_factory=dict)

    def tsv(self):
        diag = ";".join(f"{k}={_fmt(v)}" for k, v in sorted(self.diagnostics.items()))
        return "\t".join([self.kind, self.lens, _fmt(self.at[0]), _fmt(self.at[1]), self.label, diag])


REPORT_HEADER = "kind\tlens\tu\tv\tlabel\tdiagnostics"


def _fmt(x):
    if isinstance(x, (list, tuple)):
        return "[" + ",".join(_fmt(t) for t in x) + "]"
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.12g}"
    return str(x)


def write_reports(reports, path):
    with open(path, "w") as fh:
        fh.write(REPORT_HEADER + "\n")
        for r in reports:
            fh.write(r.tsv() + "\n")


def as_field(source, lens=None):
    if isinstance(source, FormField):
        return source
    return LensField(source, lens or "Q2")


# --- locus extraction ------------------------------------------------------------

def _grid(domain, grid):
    umin, umax, vmin, vmax = domain
    n = int(grid)
    return np.linspace(umin, umax, n), np.linspace(vmin, vmax, n)


def extract_locus(fn, domain, grid=256, kind="Locus", mask=None, bisect_tol=1e-12):
    """Zero set of ``fn(u, v)`` (vectorized) as a list of polylines.

    Marching squares on a ``grid x grid`` lattice, saddle cells decided by
    the cell-centre value, every vertex refined by bisection along its grid
    edge.  ``mask(u, v)`` (optional) marks where ``fn`` may be evaluated;
    cells touching an invalid node are skipped.
    """
    if grid < 32:
        raise ValueError("grid must be at least 32")
    us, vs = _grid(domain, grid)
    uu, vv = np.meshgrid(us, vs, indexing="ij")
    ok = np.ones(uu.shape, bool) if mask is None else np.asarray(mask(uu, vv), bool)
    vals = np.full(uu.shape, np.nan)
    vals[ok] = fn(uu[ok], vv[ok])
    cu = 0.5 * (us[:-1] + us[1:])
    cv = 0.5 * (vs[:-1] + vs[1:])
    cuu, cvv = np.meshgrid(cu, cv, indexing="ij")
    good = ok[:-1, :-1] & ok[1:, :-1] & ok[:-1, 1:] & ok[1:, 1:]
    center = np.zeros(cuu.shape)
    center[good] = fn(cuu[good], cvv[good])
    field_vals = np.where(np.isnan(vals), 0.0, vals)
    segs = _kernels.cell_segments(field_vals, center)
    if len(segs):
        keep = good[segs[:, 0], segs[:, 1]]
        segs = segs[keep]
    if len(segs) == 0:
        return []
    # edge keys: (axis, i, j); axis 0 joins (i,j)-(i+1,j), axis 1 joins (i,j)-(i,j+1)
    edge_of = {0: (0, 0, 0), 1: (1, 1, 0), 2: (0, 0, 1), 3: (1, 0, 0)}
    keys = []
    for i, j, e0, e1 in segs.tolist():
        a = edge_of[e0]
        b = edge_of[e1]
        keys.append(((a[0], i + a[1], j + a[2]), (b[0], i + b[1], j + b[2])))
    uniq = sorted({k for pair in keys for k in pair})
    index = {k: n for n, k in enumerate(uniq)}
    pts = _refine_edges(fn, uniq, us, vs, vals, bisect_tol)
    adj = [[] for _ in uniq]
    for a, b in keys:
        ia, ib = index[a], index[b]
        adj[ia].append(ib)
        adj[ib].append(ia)
    curves = []
    used = set()

    def walk(start):
        chain = [start]
        prev, cur = None, start
        while True:
            nxt = [n for n in adj[cur] if n != prev and (min(cur, n), max(cur, n)) not in used]
            if not nxt:
                return chain, False
            n = nxt[0]
            used.add((min(cur, n), max(cur, n)))
            if n == start:
                return chain + [start], True
            chain.append(n)
            prev, cur = cur, n

    order = sorted(range(len(uniq)), key=lambda n: (len(adj[n]) != 1, n))
    for s in order:
        if all((min(s, n), max(s, n)) in used for n in adj[s]):
            continue
        chain, closed = walk(s)
        if len(chain) >= 2:
            curves.append(LocusCurve(kind, pts[chain], True, closed))
    return curves


def _refine_edges(fn, keys, us, vs, vals, tol):
    ax = np.array([k[0] for k in keys])
    i = np.array([k[1] for k in keys])
    j = np.array([k[2] for k in keys])
    i2 = i + (ax == 0)
    j2 = j + (ax == 1)
    p0 = np.stack([us[i], vs[j]], axis=1)
    p1 = np.stack([us[i2], vs[j2]], axis=1)
    f0 = vals[i, j]
    f1 = vals[i2, j2]
    lo, hi = p0.copy(), p1.copy()
    flo = f0.copy()
    h = np.max(np.abs(p1 - p0))
    iters = int(math.ceil(math.log2(max(h, 1e-300) / tol))) + 1
    for _ in range(max(iters, 1)):
        mid = 0.5 * (lo + hi)
        fm = fn(mid[:, 0], mid[:, 1])
        same = np.sign(fm) == np.sign(flo)
        lo = np.where(same[:, None], mid, lo)
        flo = np.where(same, fm, flo)
        hi = np.where(same[:, None], hi, mid)
    return 0.5 * (lo + hi)


# --- scalar fields used as loci ------------------------------------------------

ZERO_BAND = 1e-12


def _clamp(val, scale):
    """Values below round-off relative to ``scale`` are set to exact zero
    so that identically vanishing fields produce no spurious loci."""
    return np.where(np.abs(val) <= ZERO_BAND * scale, 0.0, val)


def sigma_field(chart):
    def fn(u, v):
        F = fundamentals_values(chart, u, v)
        return _clamp(F.sigma, np.abs(F.A) + np.abs(F.C))
    return fn


def parabolic_field(chart):
    """Discriminant of the torsal BDE, extended across the singular set."""
    def fn(u, v):
        F = fundamentals_values(chart, u, v)
        sx = np.abs(F.a) + np.abs(F.b1) + np.abs(F.b2) + np.abs(F.c)
        return _clamp(discriminant(pitch_form(F)), (np.abs(F.A) + np.abs(F.C)) * sx * sx)
    return fn


def discriminant_field(source, lens=None):
    fld = as_field(source, lens)

    def fn(u, v):
        q = fld.values(u, v)
        return _clamp(discriminant(q), q.norm() ** 2 if np.ndim(q.a0) == 0 else
                      np.maximum.reduce([np.abs(q.a0), np.abs(q.a1), np.abs(q.a2)]) ** 2)
    return fn


def chart_loci(chart, grid=256, lenses=()):
    mask = chart.contains
    out = extract_locus(sigma_field(chart), chart.domain, grid, "SigmaN", mask)
    out += extract_locus(parabolic_field(chart), chart.domain, grid, "Parabolic", mask)
    for lens in lenses:
        if lens in ("Q5",):
            out += extract_locus(discriminant_field(chart, lens), chart.domain, grid,
                                 f"Discriminant:{lens}", mask)
    return out


# --- jet helpers ----------------------------------------------------------------

def rotation(d):
    """Orthogonal matrix with first column ``d`` (unit) and positive det."""
    du, dv = d
    return np.array([[du, -dv], [dv, du]])


def rotate_form(q, R):
    """Coefficients (as jets) of the form after ``(u, v) = R (s, t)``."""
    a0, a1, a2 = (c.linear_change(R) for c in q)
    # du = p ds + qq dt, dv = r ds + w dt
    p, qq = R[0, 0], R[0, 1]
    r, w = R[1, 0], R[1, 1]
    A0 = a0 * (w * w) + a1 * (qq * w) + a2 * (qq * qq)
    A1 = a0 * (2 * r * w) + a1 * (p * w + qq * r) + a2 * (2 * p * qq)
    A2 = a0 * (r * r) + a1 * (p * r) + a2 * (p * p)
    return QuadForm(A0, A1, A2)


def _value_form(q):
    return QuadForm(*(float(c.value) for c in q))


def _norm(q):
    return max(abs(float(c.value)) for c in q)


# --- folded singularities -----------------------------------------------------

def fold_lambda(a0, b1, c2, c3):
    return (4 * a0 * c3 - b1 * b1 - b1 * c2) / (4 * c2 * c2)


def label_from_lambda(lam):
    if abs(lam) <= LAMBDA_BAND or abs(lam - 1.0 / 16.0) <= LAMBDA_BAND:
        return "Degenerate"
    if lam < 0:
        return "FoldedSaddle"
    return "FoldedNode" if lam < 1.0 / 16.0 else "FoldedFocus"


def classify_on_discriminant(source, at, lens=None, disc_tol=1e-6, fold_tol=1e-6):
    """Cusp family or folded saddle/node/focus at a discriminant point."""
    fld = as_field(source, lens)
    lens = lens or getattr(fld, "lens", "BDE")
    u0, v0 = at
    q = fld.jets(u0, v0, 2)
    qv = _value_form(q)
    s = qv.norm()
    if s == 0.0:
        raise AllCoefficientsZero(f"all coefficients vanish at {at}")
    if abs(discriminant(qv)) > disc_tol * s * s:
        raise NotOnDiscriminant(f"discriminant {discriminant(qv):.3g} at {at}")
    if s <= 1e-12 * _jet_scale(q):
        raise AllCoefficientsZero(f"all coefficients vanish at {at}")
    # double direction: the root of the (numerically) degenerate form
    if abs(qv.a0) >= abs(qv.a2):
        d = np.array([2 * qv.a0, -qv.a1])
    else:
        d = np.array([-qv.a1, 2 * qv.a2])
    d /= np.linalg.norm(d)
    R = rotation(d)
    Q = rotate_form(q, R)
    a0 = float(Q.a0.value)
    b0 = float(Q.a1.value)
    b1, b2 = float(Q.a1.coeff(1, 0)), float(Q.a1.coeff(0, 1))
    c0 = float(Q.a2.value)
    c1, c2 = float(Q.a2.coeff(1, 0)), float(Q.a2.coeff(0, 1))
    c3 = float(Q.a2.coeff(2, 0))
    diag = {
        "a0": a0, "b0": b0, "b1": b1, "b2": b2, "c0": c0, "c1": c1, "c2": c2, "c3": c3,
        "direction": [float(d[0]), float(d[1])],
    }
    kind = "Discriminant"
    if abs(c1) > fold_tol * max(abs(c2), abs(c1), 1e-300):
        return SingularityReport((u0, v0), lens, "CuspFamily", kind, diag)
    if abs(c2) <= 1e-12 * max(abs(a0), abs(b1), abs(c3), 1e-300):
        diag["lambda"] = float("nan")
        return SingularityReport((u0, v0), lens, "Degenerate", kind, diag)
    lam = fold_lambda(a0, b1, c2, c3)
    diag["lambda"] = lam
    return SingularityReport((u0, v0), lens, label_from_lambda(lam), "Folded", diag)


def _jet_scale(q):
    return max(float(np.max(np.abs(c.c))) for c in q)


def folded_indicator(q):
    """Jets (order >= 1 less than ``q``) of the discriminant and of its
    derivative along the double direction; folded points are common zeros."""
    a0, a1, a2 = q
    delta = a1 * a1 * 0.25 - a0 * a2
    val = _value_form(q)
    if abs(val.a0) >= abs(val.a2):
        du, dv = a0 * 2.0, -a1
    else:
        du, dv = -a1, a2 * 2.0
    g = delta.du * du.truncate(q.a0.order - 1) + delta.dv * dv.truncate(q.a0.order - 1)
    return delta, g


def _newton_fold(fld, u, v, iters=40):
    for _ in range(iters):
        if not bool(fld.contains(u, v)):
            return None
        q = fld.jets(u, v, 2)
        delta, g = folded_indicator(q)
        s = _norm(q)
        if s == 0.0:
            return None
        r = np.array([float(delta.value) / s ** 2, float(g.value) / s ** 3])
        Jm = np.array([
            [float(delta.coeff(1, 0)), float(delta.coeff(0, 1))],
            [float(g.coeff(1, 0)) / s, float(g.coeff(0, 1)) / s],
        ]) / s ** 2
        try:
            step = np.linalg.solve(Jm, -r)
        except np.linalg.LinAlgError:
            return None
        n = np.hypot(*step)
        if n > 0.05:
            step *= 0.05 / n
        u, v = u + step[0], v + step[1]
        if n < 1e-14:
            break
    if not bool(fld.contains(u, v)):
        return None
    q = fld.jets(u, v, 2)
    delta, g = folded_indicator(q)
    s = max(_norm(q), 1e-300)
    if abs(float(delta.value)) <= 1e-11 * s * s and abs(float(g.value)) <= 1e-8 * s ** 3:
        return float(u), float(v)
    return None


def find_folded_points(source, lens=None, grid=128, loci=None):
    """Points of the lens discriminant where the double direction is
    tangent to it, located by sign changes of the tangency indicator along
    the extracted discriminant followed by 2D Newton."""
    fld = as_field(source, lens)
    if loci is None:
        if isinstance(fld, LensField) and fld.lens == "Q3":
            fn = parabolic_field(fld.chart)
        else:
            fn = discriminant_field(fld)
        loci = extract_locus(fn, fld.domain, grid, "Discriminant", fld.contains)
    seeds = []
    for curve in loci:
        P = curve.points
        q = fld.jets(P[:, 0], P[:, 1], 2)
        _, g = folded_indicator_batch(q)
        for k in range(len(P) - 1):
            if g[k] == 0.0 or np.sign(g[k]) != np.sign(g[k + 1]):
                t = g[k] / (g[k] - g[k + 1]) if g[k] != g[k + 1] else 0.0
                seeds.append(P[k] + t * (P[k + 1] - P[k]))
    found = []
    for s in seeds:
        p = _newton_fold(fld, float(s[0]), float(s[1]))
        if p is not None and all(math.hypot(p[0] - f[0], p[1] - f[1]) > 1e-6 for f in found):
            found.append(p)
    return sorted(found)


def folded_indicator_batch(q):
    a0, a1, a2 = q
    delta = a1 * a1 * 0.25 - a0 * a2
    v0, v2 = np.asarray(a0.value), np.asarray(a2.value)
    use0 = np.abs(v0) >= np.abs(v2)
    du = np.where(use0, 2.0 * v0, -np.asarray(a1.value))
    dv = np.where(use0, -np.asarray(a1.value), 2.0 * v2)
    nrm = np.hypot(du, dv)
    nrm[nrm == 0] = 1.0
    g = (np.asarray(delta.coeff(1, 0)) * du + np.asarray(delta.coeff(0, 1)) * dv) / nrm
    return np.asarray(delta.value), g


# --- umbilics ------------------------------------------------------------------

class UmbilicList(list):
    """Located umbilics; ``degenerate_everywhere`` is set when the principal
    form vanishes identically on the sampled domain (e.g. a sphere)."""

    degenerate_everywhere = False


def _q2_scale(F):
    return np.maximum(np.abs(F.A) + np.abs(F.C), 1e-300) * np.maximum(
        np.abs(F.a) + np.abs(F.c) + np.abs(F.b), 1e-300)


def find_umbilics(chart, grid=64, tol=1e-9):
    us, vs = _grid(chart.domain, grid)
    uu, vv = np.meshgrid(us, vs, indexing="ij")
    ok = chart.contains(uu, vv)
    m = np.full(uu.shape, np.inf)
    F = fundamentals_values(chart, uu[ok], vv[ok])
    Q2 = q_forms(F)["Q2"]
    mag = np.max(np.abs(np.stack(list(Q2))), axis=0)
    scale = _q2_scale(F)
    m[ok] = mag / scale
    out = UmbilicList()
    if np.all(m[ok] <= 1e-10):
        out.degenerate_everywhere = True
        return out
    # seeds: discrete local minima of the relative magnitude
    seeds = []
    n0, n1 = m.shape
    for i in range(n0):
        for j in range(n1):
            if not np.isfinite(m[i, j]):
                continue
            nb = m[max(i - 1, 0):i + 2, max(j - 1, 0):j + 2]
            if m[i, j] <= nb.min() and m[i, j] < 0.25:
                seeds.append((uu[i, j], vv[i, j]))
    for su, sv in seeds:
        p = _newton_umbilic(chart, su, sv, tol)
        if p is not None and all(math.hypot(p[0] - f[0], p[1] - f[1]) > 1e-7 for f in out):
            out.append(p)
    out.sort()
    return out


def _newton_umbilic(chart, u, v, tol, iters=50):
    fld = LensField(chart, "Q2")
    for _ in range(iters):
        if not bool(chart.contains(u, v)):
            return None
        q = fld.jets(u, v, 1)
        r = np.array([float(c.value) for c in q])
        Jm = np.array([[float(c.coeff(1, 0)), float(c.coeff(0, 1))] for c in q])
        step, *_ = np.linalg.lstsq(Jm, -r, rcond=None)
        n = np.hypot(*step)
        if n > 0.05:
            step *= 0.05 / n
        u, v = u + step[0], v + step[1]
        if n < 1e-15:
            break
    if not bool(chart.contains(u, v)):
        return None
    F = chart_fundamentals(chart, u, v, 0)
    Q2 = q_forms(F)["Q2"]
    res = max(abs(float(c.value)) for c in Q2)
    sc = float(_q2_scale(_valued(F)))
    if res <= tol * max(sc, 1.0):
        return float(u), float(v)
    return None


def _valued(F):
    class _V:
        pass
    out = _V()
    for k in ("A", "C", "a", "b", "c"):
        setattr(out, k, float(getattr(F, k).value))
    return out


def darboux_coefficients(q):
    """``(a1, a2, b1, b2, c1, c2)`` of the 1-jet ``(a1 u + a2 v,
    2 b1 u + 2 b2 v, c1 u + c2 v)``."""
    return (
        float(q.a0.coeff(1, 0)), float(q.a0.coeff(0, 1)),
        0.5 * float(q.a1.coeff(1, 0)), 0.5 * float(q.a1.coeff(0, 1)),
        float(q.a2.coeff(1, 0)), float(q.a2.coeff(0, 1)),
    )


def classify_darboux(a1, a2, b1, b2, c1, c2, root_tol=1e-7):
    """Lemon / Star / Monstar (or Degenerate) from a 1-jet, using the cubic
    ``phi`` and the sign test on ``alpha``."""
    phi = np.array([a2, 2 * b2 + a1, 2 * b1 + c2, c1])
    scale = max(np.max(np.abs(phi)), 1e-300)
    diag = {}
    # Morse test: the quadratic part of the discriminant must be definite
    h = np.array([[b1 * b1 - a1 * c1, b1 * b2 - 0.5 * (a1 * c2 + a2 * c1)],
                  [b1 * b2 - 0.5 * (a1 * c2 + a2 * c1), b2 * b2 - a2 * c2]])
    ev = np.linalg.eigvalsh(h)
    diag["hessian_eigs"] = [float(e) for e in ev]
    if ev[0] * ev[1] <= 1e-14 * max(np.max(np.abs(ev)), 1e-300) ** 2:
        raise NotMorse(f"discriminant is not a Morse A1+ zero (eigenvalues {ev})")
    if abs(a2) <= 1e-9 * scale:
        return None, diag
    rts = np.roots(phi)
    real = sorted(float(r.real) for r in rts if abs(r.imag) <= root_tol * max(1.0, abs(r)))
    diag["phi_roots"] = real
    if len(real) == 1:
        diag["alpha_signs"] = []
        return "Lemon", diag
    if len(real) != 3 or min(np.diff(real)) <= root_tol:
        return "Degenerate", diag
    dphi = np.polyder(phi)
    alpha = np.array([a2, b2 + a1, b1])
    tests = [float(np.polyval(alpha, p) * np.polyval(dphi, p)) for p in real]
    diag["alpha_signs"] = [int(np.sign(t)) for t in tests]
    if any(abs(t) <= 1e-12 * scale ** 2 for t in tests):
        return "Degenerate", diag
    return ("Star" if all(t > 0 for t in tests) else "Monstar"), diag


_ROTATIONS = (0.0, 0.4, 0.9, 1.3, 2.0, 2.6)


def classify_umbilic(source, at, lens="Q2", tol=1e-7):
    """Lemon/Star/Monstar at a point where all lens coefficients vanish."""
    fld = as_field(source, lens)
    u0, v0 = at
    q2 = fld.jets(u0, v0, 2)
    q = QuadForm(*(c.truncate(1) for c in q2))
    sc = _jet_scale(q)
    sc2 = max(float(np.max(np.abs(c.c[3:]))) for c in q2)
    if sc <= 1e-8 * sc2 or sc == 0.0:
        return SingularityReport((u0, v0), lens, "Degenerate", "Umbilic", {"reason": "vanishing 1-jet"})
    if _norm(q) > tol * sc:
        raise NotUmbilic(f"lens {lens} coefficients do not vanish at {at}")
    # the cubic criterion needs phi to have no root at p = infinity; pick a
    # rotation of the coordinates that keeps the leading coefficient large
    best = None
    for th in _ROTATIONS:
        R = rotation((math.cos(th), math.sin(th)))
        coeffs = darboux_coefficients(rotate_form(q, R))
        a1, a2, b1, b2, c1, c2 = coeffs
        lead = abs(a2) / max(abs(a2), abs(2 * b2 + a1), abs(2 * b1 + c2), abs(c1), 1e-300)
        if best is None or lead > best[0] + 1e-3:
            best = (lead, th, coeffs)
    _, th, coeffs = best
    label, diag = classify_darboux(*coeffs)
    diag["rotation"] = th
    diag["jet"] = list(coeffs)
    return SingularityReport((u0, v0), lens, label or "Degenerate", "Umbilic", diag)


# --- singular set of the direction map ------------------------------------------

def kernel_direction(F):
    """Unit kernel of the (degenerate) first form ``Q1`` at a point."""
    A, B, C = (float(getattr(F, k)) for k in ("A", "B", "C"))
    k1 = np.array([-B, A])
    k2 = np.array([C, -B])
    k = k1 if np.hypot(*k1) >= np.hypot(*k2) else k2
    return k / np.linalg.norm(k)


def classify_sigma_n(chart, at, tol=1e-7, transverse_tol=1e-6):
    """SigmaFold / SigmaCusp at a point of the singular set of ``n``, with
    the contact order of the two extended principal foliations and the
    parabolic flag of the extended torsal BDE."""
    u0, v0 = at
    F = chart_fundamentals(chart, u0, v0, 2)
    A, C = float(F.A.value), float(F.C.value)
    sig = F.sigma
    if abs(float(sig.value)) > tol * max(A + C, 1e-300):
        raise NotOnSigmaN(f"[n, n_u, n_v] = {float(sig.value):.3g} at {at}")
    Fv = _valued_all(F)
    k = kernel_direction(Fv)
    grad = np.array([float(sig.coeff(1, 0)), float(sig.coeff(0, 1))])
    gn = np.linalg.norm(grad)
    transversality = abs(grad @ k) / max(gn, 1e-300)
    diag = {"kernel": [float(k[0]), float(k[1])], "transversality": float(transversality)}
    label = "SigmaFold" if transversality > transverse_tol else "SigmaCusp"
    if label == "SigmaCusp":
        # second derivative of sigma along the kernel must not vanish
        H = np.array([[2 * sig.coeff(2, 0), sig.coeff(1, 1)], [sig.coeff(1, 1), 2 * sig.coeff(0, 2)]], float)
        diag["cusp_nondegeneracy"] = float(gn * abs(k @ H @ k))
        if diag["cusp_nondegeneracy"] <= 1e-9 * max(gn, 1e-300) ** 2:
            label = "Degenerate"
    # contact order of the extended principal leaves through the point:
    # rotate so ker dn is the t-axis, leaves s = m t^2/2 satisfy
    # a2 m^2 + (a1)_t m + (a0)_tt / 2 = 0
    R = np.array([[k[1], k[0]], [-k[0], k[1]]])  # second column = kernel
    q2 = LensField(chart, "Q2").jets(u0, v0, 2)
    Q = rotate_form(q2, R)
    a2 = float(Q.a2.value)
    a1t = float(Q.a1.coeff(0, 1))
    a0tt = float(Q.a0.coeff(0, 2))  # Taylor coefficient = half the second derivative
    disc = a1t * a1t - 4 * a2 * a0tt
    ref = max(float(np.max(np.abs(t.c[1:]))) for t in Q)
    sc = max(a1t * a1t, abs(4 * a2 * a0tt), ref * ref, 1e-300)
    diag["leaf_curvature_disc"] = disc / sc
    diag["contact_order"] = 2 if abs(disc) > 1e-6 * sc else 3
    # parabolic point on the singular set: middle coefficient of the
    # extended torsal form vanishes
    P = pitch_form(_valued_all(F))
    pn = max(abs(P.a0), abs(P.a1), abs(P.a2), 1e-300)
    diag["torsal_middle"] = float(P.a1 / pn)
    parabolic = abs(P.a1) <= 1e-6 * pn
    diag["parabolic"] = bool(parabolic)
    if parabolic:
        diag["parabolic_tangency_order"] = sigma_parabolic_tangency(chart, (u0, v0), k)
    return SingularityReport((u0, v0), "Q2", label, "SigmaN", diag)


def _valued_all(F):
    vals = {}
    for k in F.__dataclass_fields__:
        t = getattr(F, k)
        if isinstance(t, tuple):
            vals[k] = tuple(float(s.value) for s in t)
        else:
            vals[k] = float(t.value) if isinstance(t, Jet) else float(t)
    return type(F)(**vals)


def project_to_sigma(chart, p, iters=30):
    """Newton projection of a point onto the singular set of ``n``."""
    p = np.array(p, float)
    for _ in range(iters):
        F = chart_fundamentals(chart, p[0], p[1], 1)
        s = float(F.sigma.value)
        g = np.array([float(F.sigma.coeff(1, 0)), float(F.sigma.coeff(0, 1))])
        step = -s * g / (g @ g)
        p = p + step
        if np.linalg.norm(step) < 1e-15:
            break
    return p


def sigma_parabolic_tangency(chart, at, kernel=None, hs=(2e-2, 1e-2, 5e-3)):
    """Vanishing order of the torsal discriminant restricted to the singular
    set near ``at`` (2 means ordinary tangency with the parabolic curve)."""
    F = chart_fundamentals(chart, at[0], at[1], 1)
    g = np.array([float(F.sigma.coeff(1, 0)), float(F.sigma.coeff(0, 1))])
    tdir = np.array([-g[1], g[0]]) / np.linalg.norm(g)
    fn = parabolic_field(chart)
    vals = []
    for h in hs:
        acc = 0.0
        for sgn in (1.0, -1.0):
            p = project_to_sigma(chart, np.asarray(at) + sgn * h * tdir)
            acc += abs(float(fn(p[0], p[1])))
        vals.append(acc / 2)
    slopes = [math.log(vals[i] / vals[i + 1]) / math.log(hs[i] / hs[i + 1]) for i in range(len(hs) - 1)]
    return int(round(slopes[-1]))


def find_sigma_points(chart, grid=128):
    """Polylines of the singular set (refined vertices)."""
    return extract_locus(sigma_field(chart), chart.domain, grid, "SigmaN", chart.contains)


def classify_chart(chart, grid=128, lenses=("Q2", "Q3", "Q4", "Q5")):
    """All singular points of a chart: umbilics (for Q2/Q4/Q5), folded
    points of the torsal and characteristic BDEs, and special points of the
    singular set of ``n``.  Deterministically ordered."""
    reports = []
    umb = find_umbilics(chart, max(grid // 2, 32))
    for p in umb:
        for lens in lenses:
            if lens == "Q3":
                continue
            try:
                reports.append(classify_umbilic(chart, p, lens))
            except NotMorse as exc:
                reports.append(SingularityReport(p, lens, "Degenerate", "Umbilic", {"reason": str(exc)}))
    for lens in lenses:
        if lens not in ("Q3", "Q5"):
            continue
        for p in find_folded_points(chart, lens, grid):
            try:
                reports.append(classify_on_discriminant(chart, p, lens))
            except (NotOnDiscriminant, AllCoefficientsZero):
                continue
    for curve in find_sigma_points(chart, grid):
        for p in _sigma_special_points(chart, curve):
            r = classify_sigma_n(chart, p)
            reports.append(r)
            # where the parabolic curve touches the singular set the torsal
            # leaves form a family of cusps
            if r.diagnostics.get("parabolic") and "Q3" in lenses:
                try:
                    reports.append(classify_on_discriminant(chart, p, "Q3"))
                except (NotOnDiscriminant, AllCoefficientsZero):
                    pass
    return reports, umb


def _sigma_special_points(chart, curve):
    """Points of a singular-set polyline where the kernel becomes tangent
    (cusps) or the torsal middle coefficient changes sign (parabolic)."""
    P = curve.points
    F = chart_fundamentals(chart, P[:, 0], P[:, 1], 1)
    g = np.stack([np.asarray(F.sigma.coeff(1, 0)), np.asarray(F.sigma.coeff(0, 1))], axis=1)
    A, B, C = (np.asarray(getattr(F, k).value) for k in ("A", "B", "C"))
    k1 = np.stack([-B, A], axis=1)
    k2 = np.stack([C, -B], axis=1)
    use1 = np.hypot(k1[:, 0], k1[:, 1]) >= np.hypot(k2[:, 0], k2[:, 1])
    k = np.where(use1[:, None], k1, k2)
    for i in range(1, len(k)):
        if k[i] @ k[i - 1] < 0:
            k[i] = -k[i]
    tang = np.sum(g * k, axis=1) / np.maximum(np.linalg.norm(g, axis=1) * np.linalg.norm(k, axis=1), 1e-300)
    mid = np.asarray(F.pitch_form[1].value)
    out = []
    for ind in (tang, mid):
        for i in range(len(P) - 1):
            if np.sign(ind[i]) != np.sign(ind[i + 1]):
                p = _bisect_on_sigma(chart, P[i], P[i + 1], ind is tang, k[i])
                out.append((float(p[0]), float(p[1])))
    return out


def _bisect_on_sigma(chart, p0, p1, use_tangency, kref, iters=60):
    def ind(p):
        Fj = chart_fundamentals(chart, p[0], p[1], 1)
        F = _valued_all(Fj)
        if use_tangency:
            g = np.array([float(Fj.sigma.coeff(1, 0)), float(Fj.sigma.coeff(0, 1))])
            k = kernel_direction(F)
            return float(g @ k) * (1.0 if k @ kref >= 0 else -1.0)
        return float(F.pitch_form[1])
    a = project_to_sigma(chart, p0)
    b = project_to_sigma(chart, p1)
    fa = ind(a)
    for _ in range(iters):
        m = project_to_sigma(chart, 0.5 * (a + b))
        fm = ind(m)
        if np.sign(fm) == np.sign(fa):
            a, fa = m, fm
        else:
            b = m
        if np.linalg.norm(b - a) < 1e-13:
            break
    return 0.5 * (a + b)
