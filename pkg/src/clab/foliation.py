"""Tracing the solution curves of a BDE ``a0 dv^2 + a1 du dv + a2 du^2 = 0``.

Leaves are integrated on the lifted surface ``F(u, v, p) = 0`` with
``F = a0 p^2 + a1 p + a2`` and ``p = dv/du`` (or, where ``|p| > 1``, with
``G = a0 + a1 q + a2 q^2`` and ``q = du/dv``).  The lifted field

    (F_p, p F_p, -(F_u + p F_v))

is tangent to the surface and smooth across the discriminant, so a leaf
meeting the discriminant simply turns back (a cusp in the plane) and the
tracer needs no special case there.  All active leaves are advanced
together: every field evaluation is one batched jet computation.
"""
from dataclasses import dataclass, field
import csv
import json
import math
import os

import numpy as np

from .errors import (
    AllDirectionsNull, DegeneratePoint, EllipticPoint, SeedDegenerate, SeedElliptic,
)
from .formfields import FormField, LensField
from .quadform import QuadForm, angular_distance, discriminant, roots

TERMINATIONS = ("DomainExit", "DiscriminantContact", "StepLimit", "SingularPoint")


@dataclass
class TracedCurve:
    """A leaf as a polyline.  ``branches`` labels each vertex with its root
    sheet (it flips where the leaf turns back at the discriminant) and
    ``directions`` holds the exact unit tangent from the lift."""

    points: np.ndarray
    branch: int
    lens: str
    termination: str
    start_termination: str = ""
    branches: np.ndarray = None
    directions: np.ndarray = None
    seed: tuple = ()
    seed_index: int = -1

    def __len__(self):
        return len(self.points)


@dataclass
class PortraitSpec:
    region: tuple = None
    seed_density: int = 8
    max_steps: int = 1500
    tol: float = 1e-8
    h_max: float = None
    h_min: float = 1e-10
    singular_radius: float = 1e-4
    stop_at_discriminant: bool = False
    singular_points: tuple = ()

    def __post_init__(self):
        if self.seed_density <= 0 or self.max_steps <= 0:
            raise ValueError("seed density and step count must be positive")
        if self.tol <= 0 or self.h_min <= 0 or self.singular_radius <= 0:
            raise ValueError("tolerances must be positive")
        if self.h_max is not None and self.h_max <= 0:
            raise ValueError("h_max must be positive")
        if self.region is not None:
            umin, umax, vmin, vmax = self.region
            if not (umin < umax and vmin < vmax):
                raise ValueError("empty region")


def _field(source, lens):
    if isinstance(source, FormField):
        return source
    return LensField(source, lens or "Q2")


def _lens_name(fld):
    return getattr(fld, "lens", fld.name)


# --- pointwise directions -----------------------------------------------------------

def branch_fields(source, at, lens=None, previous=None):
    """The (up to two) solution directions at ``at``.

    Without ``previous`` they are sorted by angle; with a previous pair they
    are matched to it by nearest angle, so that labels follow continuity.
    """
    fld = _field(source, lens)
    q = fld.values(*at).map(float)
    try:
        dirs = roots(q)
    except AllDirectionsNull:
        raise DegeneratePoint(f"all coefficients vanish at {at}") from None
    if not dirs:
        raise EllipticPoint(f"no real directions at {at} (discriminant {discriminant(q):.3g})")
    if len(dirs) == 1 and dirs[0].multiplicity == 2:
        dirs = [dirs[0], dirs[0]]
    if previous is not None and len(previous) == 2 and len(dirs) == 2:
        straight = angular_distance(previous[0], dirs[0]) + angular_distance(previous[1], dirs[1])
        crossed = angular_distance(previous[0], dirs[1]) + angular_distance(previous[1], dirs[0])
        if crossed < straight:
            dirs = [dirs[1], dirs[0]]
    return dirs


def bde_residuals(source, curve, lens=None):
    """``|form(tangent)| / max|coeff|`` at every vertex of a traced curve."""
    fld = _field(source, lens)
    q = fld.values(curve.points[:, 0], curve.points[:, 1])
    d = curve.directions
    val = q.a0 * d[:, 1] ** 2 + q.a1 * d[:, 0] * d[:, 1] + q.a2 * d[:, 0] ** 2
    sc = np.maximum.reduce([np.abs(q.a0), np.abs(q.a1), np.abs(q.a2)])
    return np.abs(val) / np.maximum(sc, 1e-300)


# --- the lifted field -------------------------------------------------------------

def _coeff_jets(fld, u, v):
    q = fld.jets(u, v, 1)
    return [np.broadcast_to(c.c, (3,) + np.shape(u)) for c in q]


def _lifted(fld, y, mode, sign, full=False):
    """Unit lifted field at the states ``y`` (3, M); NaN where the state is
    outside the domain.  Also returns the raw field norm relative to the
    coefficient scale (small near singular points of the lift) and, with
    ``full``, the slope derivative ``F_w`` and the coefficient scale."""
    u, v, w = y
    M = u.shape[0]
    out = np.full((3, M), np.nan)
    rel = np.full(M, np.nan)
    fw_all = np.full(M, np.nan)
    sc_all = np.full(M, np.nan)
    ok = np.asarray(fld.contains(u, v), bool) & np.isfinite(w)
    if not np.any(ok):
        return (out, rel, fw_all, sc_all) if full else (out, rel)
    c = _coeff_jets(fld, u[ok], v[ok])
    w_ = w[ok]
    qm = mode[ok] == 1
    one = np.ones_like(w_)
    zero = np.zeros_like(w_)
    # multipliers of (a0, a1, a2) and their w-derivatives
    m = [np.where(qm, one, w_ * w_), w_, np.where(qm, w_ * w_, one)]
    dm = [np.where(qm, zero, 2 * w_), one, np.where(qm, 2 * w_, zero)]
    Fw = sum(ci[0] * d for ci, d in zip(c, dm))
    Fu = sum(ci[1] * mi for ci, mi in zip(c, m))
    Fv = sum(ci[2] * mi for ci, mi in zip(c, m))
    V = np.where(qm, [w_ * Fw, Fw, -(w_ * Fu + Fv)], [Fw, w_ * Fw, -(Fu + w_ * Fv)])
    n = np.sqrt(np.sum(V * V, axis=0))
    sc = np.maximum.reduce([np.abs(ci[0]) for ci in c]) * (1.0 + w_ * w_)
    rel[ok] = n / np.maximum(sc, 1e-300)
    with np.errstate(invalid="ignore", divide="ignore"):
        out[:, ok] = V / n * sign[ok]
    if full:
        fw_all[ok] = Fw
        sc_all[ok] = sc
        return out, rel, fw_all, sc_all
    return out, rel


def _rk4(fld, y, h, mode, sign):
    k1, _ = _lifted(fld, y, mode, sign)
    k2, _ = _lifted(fld, y + 0.5 * h * k1, mode, sign)
    k3, _ = _lifted(fld, y + 0.5 * h * k2, mode, sign)
    k4, _ = _lifted(fld, y + h * k3, mode, sign)
    return y + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def _project(fld, y, mode):
    """One guarded Newton step in the slope variable back onto F = 0."""
    u, v, w = y
    q = fld.values(u, v)
    a0, a1, a2 = (np.broadcast_to(np.asarray(t, float), u.shape) for t in q)
    qm = mode == 1
    F = np.where(qm, a0 + a1 * w + a2 * w * w, a0 * w * w + a1 * w + a2)
    Fw = np.where(qm, a1 + 2 * a2 * w, 2 * a0 * w + a1)
    with np.errstate(invalid="ignore", divide="ignore"):
        step = np.where(np.abs(Fw) > 0, F / Fw, 0.0)
    step = np.where(np.abs(step) < 1e-4, step, 0.0)
    return np.array([u, v, w - step])


def _direction_of(y, mode):
    w = y[2]
    du = np.where(mode == 1, w, 1.0)
    dv = np.where(mode == 1, 1.0, w)
    n = np.hypot(du, dv)
    return np.stack([du / n, dv / n], axis=1)


def _fw(fld, y, mode):
    q = fld.values(y[0], y[1])
    a0, a1, a2 = (np.broadcast_to(np.asarray(t, float), y[0].shape) for t in q)
    w = y[2]
    Fw = np.where(mode == 1, a1 + 2 * a2 * w, 2 * a0 * w + a1)
    sc = np.maximum.reduce([np.abs(a0), np.abs(a1), np.abs(a2)]) * (1 + np.abs(w))
    return Fw, sc


def _integrate(fld, y0, mode0, sign0, spec, size, singular, ref_scale):
    """Advance all lanes until each terminates.  Returns per-lane lists of
    vertices, per-vertex directions, per-vertex sheet flips and the reason."""
    y = np.array(y0, float).reshape(3, -1).copy()
    M = y.shape[1]
    mode = np.asarray(mode0, int).copy()
    sign = np.asarray(sign0, float).copy()
    h_max = spec.h_max or 0.05 * size
    h = np.full(M, 0.25 * h_max)
    h_exit = 1e-7 * size
    active = np.ones(M, bool)
    steps = np.zeros(M, int)
    reason = np.array([""] * M, dtype=object)
    prev_disp = np.zeros((M, 2))
    flips = np.zeros(M, int)
    fw_sign = np.sign(_fw(fld, y, mode)[0])
    hist = [(np.arange(M), y[0].copy(), y[1].copy(), _direction_of(y, mode), flips.copy())]
    sing = np.asarray(singular, float).reshape(-1, 2)
    guard = 0
    while np.any(active) and guard < 40 * spec.max_steps:
        guard += 1
        idx = np.flatnonzero(active)
        ya, ha, ma, sa = y[:, idx], h[idx], mode[idx], sign[idx]
        full = _rk4(fld, ya, ha, ma, sa)
        half = _rk4(fld, ya, 0.5 * ha, ma, sa)
        half = _rk4(fld, half, 0.5 * ha, ma, sa)
        err = np.max(np.abs(half - full), axis=0) / 15.0
        bad = ~np.isfinite(err)
        # the field is unit length, so a short chord means the step jumped
        # over a zero of the field and came back
        stuck = np.sqrt(np.sum((half - ya) ** 2, axis=0)) < 0.5 * ha
        accept = ~bad & ~stuck & (err <= spec.tol)
        # rejected steps
        with np.errstate(divide="ignore"):
            fac = np.clip(0.9 * (spec.tol / np.maximum(err, 1e-300)) ** 0.2, 0.2, 4.0)
        hn = np.where(bad, 0.5 * ha, ha * np.where(accept, fac, np.minimum(fac, 0.5)))
        h[idx] = np.minimum(hn, h_max)
        # lanes whose step has collapsed
        exited = bad & (h[idx] < h_exit)
        stalled = ~bad & ~accept & (h[idx] < spec.h_min)
        for k in np.flatnonzero(exited):
            reason[idx[k]] = "DomainExit"
        if np.any(stalled):
            Fw, sc = _fw(fld, ya[:, stalled], ma[stalled])
            near = np.abs(Fw) <= 1e-6 * sc
            for k, nd in zip(np.flatnonzero(stalled), near):
                reason[idx[k]] = "DiscriminantContact" if nd else "SingularPoint"
        active[idx[exited | stalled]] = False
        if not np.any(accept):
            continue
        ia = idx[accept]
        ynew = half[:, accept] + (half[:, accept] - full[:, accept]) / 15.0
        ynew = _project(fld, ynew, mode[ia])
        disp = (ynew[:2] - y[:2, ia]).T
        turned = np.sum(disp * prev_disp[ia], axis=1) < 0
        flips[ia] += turned
        prev_disp[ia] = disp
        y[:, ia] = ynew
        steps[ia] += 1
        # chart swap p <-> q
        swap = np.abs(y[2, ia]) > 1.0
        if np.any(swap):
            js = ia[swap]
            sign[js] = -sign[js] * np.sign(y[2, js])
            y[2, js] = 1.0 / y[2, js]
            mode[js] = 1 - mode[js]
        hist.append((ia, y[0, ia].copy(), y[1, ia].copy(), _direction_of(y[:, ia], mode[ia]), flips[ia].copy()))
        # terminations after an accepted step
        _, rel, Fw, sc = _lifted(fld, y[:, ia], mode[ia], sign[ia], full=True)
        small = sc <= spec.singular_radius * ref_scale
        folded = ~small & (rel <= spec.singular_radius)
        if len(sing):
            d = np.min(np.hypot(y[0, ia][:, None] - sing[:, 0], y[1, ia][:, None] - sing[:, 1]), axis=1)
            small |= d <= spec.singular_radius
        crossed = np.sign(Fw) != fw_sign[ia]
        fw_sign[ia] = np.sign(Fw)
        stop_disc = spec.stop_at_discriminant & crossed & (steps[ia] > 1)
        stop_disc |= folded
        for k in np.flatnonzero(small):
            reason[ia[k]] = "SingularPoint"
        for k in np.flatnonzero(stop_disc & ~small):
            reason[ia[k]] = "DiscriminantContact"
        limit = steps[ia] >= spec.max_steps
        for k in np.flatnonzero(limit & ~small & ~stop_disc):
            reason[ia[k]] = "StepLimit"
        active[ia[small | stop_disc | limit]] = False
    for k in np.flatnonzero(active):
        reason[k] = "StepLimit"
    # assemble per-lane polylines
    lane = np.concatenate([h_[0] for h_ in hist])
    order = np.argsort(lane, kind="stable")
    lane = lane[order]
    uu = np.concatenate([h_[1] for h_ in hist])[order]
    vv = np.concatenate([h_[2] for h_ in hist])[order]
    dd = np.concatenate([h_[3] for h_ in hist])[order]
    ff = np.concatenate([h_[4] for h_ in hist])[order]
    cuts = np.searchsorted(lane, np.arange(M + 1))
    out = []
    for k in range(M):
        s, e = cuts[k], cuts[k + 1]
        out.append((np.stack([uu[s:e], vv[s:e]], axis=1), dd[s:e], ff[s:e], reason[k]))
    return out


def _field_scale(fld, n=9):
    umin, umax, vmin, vmax = fld.domain
    uu, vv = np.meshgrid(np.linspace(umin, umax, n), np.linspace(vmin, vmax, n), indexing="ij")
    ok = np.asarray(fld.contains(uu, vv), bool)
    if not np.any(ok):
        return 1.0
    q = fld.values(uu[ok], vv[ok])
    mag = np.maximum.reduce([np.abs(np.broadcast_to(t, uu[ok].shape)) for t in q])
    return float(np.median(mag)) or 1.0


def _seed_state(fld, seed, branch):
    """Initial lifted state and the orientation sign for the forward run."""
    q = fld.values(*seed).map(float)
    try:
        dirs = roots(q)
    except AllDirectionsNull:
        raise SeedDegenerate(f"all coefficients vanish at seed {seed}") from None
    if not dirs:
        raise SeedElliptic(f"no real directions at seed {seed}")
    d = dirs[min(branch, len(dirs)) - 1]
    if abs(d.dv) <= abs(d.du):
        mode, w = 0, d.dv / d.du
        Fw = 2 * q.a0 * w + q.a1
        s = math.copysign(1.0, Fw * d.du) if Fw != 0 else 1.0
    else:
        mode, w = 1, d.du / d.dv
        Fw = q.a1 + 2 * q.a2 * w
        s = math.copysign(1.0, Fw * d.dv) if Fw != 0 else 1.0
    return (seed[0], seed[1], w), mode, s


def _region_size(domain):
    umin, umax, vmin, vmax = domain
    return max(umax - umin, vmax - vmin)


def _trace_many(fld, seeds, branches, spec, singular=()):
    states, modes, signs, keep = [], [], [], []
    for k, (seed, br) in enumerate(zip(seeds, branches)):
        try:
            st, m, s = _seed_state(fld, seed, br)
        except (SeedElliptic, SeedDegenerate):
            continue
        keep.append(k)
        for sg in (s, -s):
            states.append(st)
            modes.append(m)
            signs.append(sg)
    if not keep:
        return {}
    y0 = np.array(states, float).T
    size = _region_size(spec.region or fld.domain)
    runs = _integrate(fld, y0, modes, signs, spec, size, tuple(singular) + tuple(spec.singular_points),
                      _field_scale(fld))
    lens = _lens_name(fld)
    out = {}
    for n, k in enumerate(keep):
        fwd, bwd = runs[2 * n], runs[2 * n + 1]
        br = branches[k]
        pts = np.concatenate([bwd[0][::-1], fwd[0][1:]])
        dirs = np.concatenate([bwd[1][::-1], fwd[1][1:]])
        fb = np.concatenate([bwd[2][::-1], fwd[2][1:]])
        sheet = np.where(fb % 2 == 0, br, 3 - br)
        out[k] = TracedCurve(pts, br, lens, fwd[3], bwd[3], sheet, dirs, tuple(seeds[k]), k)
    return out


def trace(source, seed, branch=1, spec=None, lens=None):
    """The leaf of sheet ``branch`` (1 or 2, by angle at the seed) through
    ``seed``, integrated in both directions."""
    fld = _field(source, lens)
    spec = spec or PortraitSpec()
    if branch not in (1, 2):
        raise ValueError("branch must be 1 or 2")
    if not bool(fld.contains(*seed)):
        raise ValueError(f"seed {seed} outside the domain")
    _seed_state(fld, seed, branch)
    return _trace_many(fld, [tuple(seed)], [branch], spec)[0]


# --- portraits ---------------------------------------------------------------------

@dataclass
class Portrait:
    lens: str
    curves: list
    loci: list = field(default_factory=list)
    reports: list = field(default_factory=list)
    spec: PortraitSpec = None


def portrait_seeds(fld, spec):
    umin, umax, vmin, vmax = spec.region or fld.domain
    n = int(spec.seed_density)
    du, dv = (umax - umin) / n, (vmax - vmin) / n
    us = umin + du * (np.arange(n) + 0.5)
    vs = vmin + dv * (np.arange(n) + 0.5)
    uu, vv = np.meshgrid(us, vs, indexing="ij")
    uu, vv = uu.ravel(), vv.ravel()
    ok = np.asarray(fld.contains(uu, vv), bool)
    q = fld.values(uu[ok], vv[ok])
    d = discriminant(q)
    sc = np.maximum.reduce([np.abs(np.broadcast_to(t, d.shape)) for t in q]) ** 2
    good = d >= 1e-9 * sc
    pts = np.stack([uu[ok][good], vv[ok][good]], axis=1)
    return pts, min(du, dv)


def portrait(source, spec=None, lens=None, overlays=True, singular=()):
    """Both foliations seeded on a uniform grid over the hyperbolic part of
    the region, with near-duplicate leaves removed in seed order."""
    from .singularities import discriminant_field, extract_locus, sigma_field

    fld = _field(source, lens)
    spec = spec or PortraitSpec()
    seeds, spacing = portrait_seeds(fld, spec)
    all_seeds = [tuple(p) for p in seeds for _ in (1, 2)]
    branches = [b for _ in seeds for b in (1, 2)]
    traced = _trace_many(fld, all_seeds, branches, spec, singular)
    kept = []
    kp, kd = np.zeros((0, 2)), np.zeros((0, 2))
    for k in sorted(traced):
        c = traced[k]
        i0 = int(np.argmin(np.hypot(c.points[:, 0] - c.seed[0], c.points[:, 1] - c.seed[1])))
        d0 = c.directions[i0]
        if len(kp):
            near = np.hypot(kp[:, 0] - c.seed[0], kp[:, 1] - c.seed[1]) < 0.5 * spacing
            if np.any(near):
                cosang = np.abs(kd[near] @ d0)
                if np.any(cosang > math.cos(0.15)):
                    continue
        kept.append(c)
        kp = np.concatenate([kp, c.points])
        kd = np.concatenate([kd, c.directions])
    loci = []
    if overlays:
        region = spec.region or fld.domain
        loci += extract_locus(discriminant_field(fld), region, 128, f"Discriminant:{_lens_name(fld)}",
                              fld.contains)
        chart = getattr(fld, "chart", None)
        if chart is not None:
            loci += extract_locus(sigma_field(chart), region, 128, "SigmaN", chart.contains)
    return Portrait(_lens_name(fld), kept, loci, [], spec)


def write_curves(portrait_, outdir, prefix="curve"):
    """One CSV per curve (columns u, v, branch; 17 significant digits)
    plus ``manifest.json``.  Returns the manifest dict."""
    os.makedirs(outdir, exist_ok=True)
    manifest = {"lens": portrait_.lens, "curves": [], "loci": [], "reports": []}
    for n, c in enumerate(portrait_.curves):
        name = f"{prefix}_{n:04d}.csv"
        with open(os.path.join(outdir, name), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["u", "v", "branch"])
            for (u, v), b in zip(c.points, c.branches):
                w.writerow([f"{u:.17g}", f"{v:.17g}", int(b)])
        manifest["curves"].append({
            "file": name, "branch": int(c.branch), "lens": c.lens, "points": len(c),
            "seed": [float(c.seed[0]), float(c.seed[1])],
            "termination": [c.start_termination, c.termination],
        })
    for n, loc in enumerate(portrait_.loci):
        name = f"locus_{n:04d}.csv"
        with open(os.path.join(outdir, name), "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["u", "v"])
            for u, v in loc.points:
                w.writerow([f"{u:.17g}", f"{v:.17g}"])
        manifest["loci"].append({"file": name, "kind": loc.kind, "closed": bool(loc.closed)})
    for r in portrait_.reports:
        manifest["reports"].append(r.tsv())
    with open(os.path.join(outdir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return manifest


# --- local configuration tests ---------------------------------------------------

def separatrix_count(source, at, lens=None, radius=0.05, samples=1440):
    """Topological data of a BDE on a small circle around an isolated zero
    of its coefficients.

    ``radial`` is the number of lines through ``at`` along which the
    solution direction is radial (sign changes of the form on the radial
    direction, halved); ``index`` is the rotation of one solution sheet
    around the circle divided by ``2 pi``.  Lemon: (1, 1/2); star: (3, -1/2);
    monstar: (3, 1/2).
    """
    fld = _field(source, lens)
    t = np.linspace(0.0, 2 * np.pi, samples, endpoint=False)
    u = at[0] + radius * np.cos(t)
    v = at[1] + radius * np.sin(t)
    q = fld.values(u, v)
    c, s = np.cos(t), np.sin(t)
    radial = q.a0 * s * s + q.a1 * c * s + q.a2 * c * c
    sg = np.sign(radial)
    sg = sg[sg != 0]  # a sample exactly on a radial line is not a change by itself
    changes = int(np.sum(sg != np.roll(sg, 1)))
    # follow one sheet around the circle by nearest-angle matching
    a0, a1, a2 = (np.broadcast_to(np.asarray(x, float), t.shape) for x in q)
    ang = None
    total = 0.0
    first = None
    for k in range(samples + 1):
        i = k % samples
        dirs = roots(QuadForm(a0[i], a1[i], a2[i]))
        if not dirs:
            raise EllipticPoint(f"no real directions on the circle at angle {t[i]:.3g}")
        cands = [d.angle for d in dirs]
        if ang is None:
            ang = first = cands[0]
            continue
        best = min(((c_ - ang + np.pi / 2) % np.pi - np.pi / 2 for c_ in cands), key=abs)
        total += best
        ang = ang + best
    index = total / (2 * np.pi)
    return {"radial": changes // 2, "index": round(2 * index) / 2, "raw_index": index}


def umbilic_label_from_topology(radial, index):
    if radial == 1 and index == 0.5:
        return "Lemon"
    if radial == 3 and index == -0.5:
        return "Star"
    if radial == 3 and index == 0.5:
        return "Monstar"
    return "Degenerate"


def lifted_linearization(source, at, lens=None):
    """Eigenvalues of the lifted field at a folded singular point, on the
    lifted surface: saddle (real, opposite signs), node (real, same sign)
    or focus (complex).  Independent of the normal-form coefficient test."""
    fld = _field(source, lens)
    u0, v0 = at
    q = fld.jets(u0, v0, 2)
    qv = QuadForm(*(float(c.value) for c in q))
    dirs = roots(qv)
    if len(dirs) != 1:
        raise ValueError(f"{at} is not on the discriminant")
    d = dirs[0]
    use_q = abs(d.dv) > abs(d.du)
    w0 = d.du / d.dv if use_q else d.dv / d.du
    a = list(q) if not use_q else [q.a2, q.a1, q.a0]
    # with q = du/dv the roles of (u, v) swap in the lifted field
    def part(c, i, j):
        if use_q:
            i, j = j, i
        return float(c.coeff(i, j)) * math.factorial(i) * math.factorial(j)
    # F = A p^2 + Bm p + C with p the slope in the chosen chart
    A, Bm, C = a
    # Jacobian of (F_p, p F_p, -(F_x + p F_y)) in (x, y, p), x the
    # independent coordinate of the chart
    def Fx(i, j, p):
        return part(A, i, j) * p * p + part(Bm, i, j) * p + part(C, i, j)
    Fp = 2 * part(A, 0, 0) * w0 + part(Bm, 0, 0)
    # derivative of F_p w.r.t. x, y, p
    dFp = np.array([2 * part(A, 1, 0) * w0 + part(Bm, 1, 0),
                    2 * part(A, 0, 1) * w0 + part(Bm, 0, 1),
                    2 * part(A, 0, 0)])
    # third component g = -(F_x + p F_y)
    dg = -np.array([
        Fx(2, 0, w0) + w0 * Fx(1, 1, w0),
        Fx(1, 1, w0) + w0 * Fx(0, 2, w0),
        (2 * part(A, 1, 0) * w0 + part(Bm, 1, 0)) + Fx(0, 1, w0)
        + w0 * (2 * part(A, 0, 1) * w0 + part(Bm, 0, 1)),
    ])
    Jm = np.array([dFp, w0 * dFp + np.array([0, 0, Fp]), dg])
    ev = np.linalg.eigvals(Jm)
    ev = ev[np.argsort(np.abs(ev))][1:]  # drop the eigenvalue along the line of zeros
    tr, det = float(np.real(ev.sum())), float(np.real(ev.prod()))
    if det < 0:
        kind = "FoldedSaddle"
    elif tr * tr > 4 * det:
        kind = "FoldedNode"
    else:
        kind = "FoldedFocus"
    return kind, ev
