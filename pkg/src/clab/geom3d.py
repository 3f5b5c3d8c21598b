"""Distinguished points on each line of a congruence and the surfaces they
sweep.

Positions on a line are signed offsets ``r`` along ``n`` from the directrix
point ``x``; the 3-space point is ``x + r n``.  Along a direction ``d`` the
central point is at ``r = -Q(d)/Q1(d)`` and the pitch is ``P(d)/Q1(d)``
with ``P`` the pitch form.
"""
from dataclasses import dataclass, field
import csv
import math
import os

import numpy as np

from .congruence import eval_frame, fundamentals_values
from .errors import KernelDirection, NormalCongruenceDegenerate, OnSigmaN
from .formfields import DELTA_Q2_FACTOR, mean_and_gauss, pitch_form, q1_form, q_forms, q_form
from .quadform import Direction, discriminant, evaluate, roots

KINDS = ("Boundary", "Middle", "Focal", "Characteristic")


@dataclass(frozen=True)
class RuledData:
    at: tuple
    dir: Direction
    r: float
    pitch: float
    r_direct: float
    pitch_direct: float


def ruled_data(frame, d, tol=1e-12):
    """Central-point offset and pitch of the ruled surface of lines along
    the direction ``d`` at ``frame``, from the forms and directly from
    ``x'`` and ``n'``."""
    if not isinstance(d, Direction):
        d = Direction.of(*d)
    qs = q_forms(frame)
    q1 = float(evaluate(qs["Q1"], d))
    if abs(q1) <= tol * max(abs(frame.A), abs(frame.C), 1e-300):
        raise KernelDirection(f"{tuple(d)} is in the kernel of dn at ({frame.u}, {frame.v})")
    r = -float(evaluate(qs["Q"], d)) / q1
    pitch = float(evaluate(qs["P"], d)) / q1
    xp = frame.x_u * d.du + frame.x_v * d.dv
    np_ = frame.n_u * d.du + frame.n_v * d.dv
    nn = float(np_ @ np_)
    r_direct = -float(xp @ np_) / nn
    pitch_direct = float(np.dot(xp, np.cross(frame.n, np_))) / nn
    return RuledData((frame.u, frame.v), d, r, pitch, r_direct, pitch_direct)


def half_width_sq(F, qs=None):
    """``H^2 - K`` from the discriminant of the principal form.  Computing
    it as ``H*H - K`` cancels catastrophically near umbilics, where the
    principal form itself is small."""
    Q2 = (qs or q_forms(F))["Q2"]
    det = F.A * F.C - F.B * F.B
    return discriminant(Q2) / (DELTA_Q2_FACTOR * det * det)


@dataclass
class LinePoints:
    at: tuple
    boundary: tuple
    middle: float
    focal: tuple
    characteristic: tuple
    characteristic_from_q5: tuple = ()
    diagnostics: dict = field(default_factory=dict)


def line_points(frame, sigma_tol=1e-12):
    """Boundary, middle, focal and characteristic points of the line at
    ``frame``.

    The characteristic pair is computed twice: from the quadratic
    ``r^2 - 2Hr + K + (AC - B^2)(H^2 - K)^2 / bbar^2 = 0`` and as the
    central points along the real directions of ``Q5``.
    """
    det = frame.A * frame.C - frame.B ** 2
    s = max(abs(frame.A), abs(frame.C), 1e-300)
    if abs(det) <= sigma_tol * s * s:
        raise OnSigmaN(f"({frame.u}, {frame.v}) is on the singular set")
    H, K = (float(t) for t in mean_and_gauss(frame))
    qs = q_forms(frame)
    hk = max(float(half_width_sq(frame, qs)), 0.0)  # a square, negative only by round-off
    w = math.sqrt(hk)
    boundary = (H - w, H + w)
    focal = _central_at_roots(qs, qs["P"])
    diag = {"HsqMinusK": hk, "delta_torsal": float(discriminant(qs["P"]))}
    bbar = float(frame.bbar)
    if abs(bbar) <= 1e-12 * max(abs(frame.b1), abs(frame.b2), 1e-300):
        raise NormalCongruenceDegenerate(
            f"bbar = 0 at ({frame.u}, {frame.v}): the characteristic quadratic is undefined")
    shift = det * hk * hk / (bbar * bbar)
    c2 = hk - shift
    characteristic = (H - math.sqrt(c2), H + math.sqrt(c2)) if c2 >= 0 else ()
    from_q5 = _central_at_roots(qs, qs["Q5"])
    diag["half_width_gap"] = shift
    return LinePoints((frame.u, frame.v), boundary, H, focal, characteristic, from_q5, diag)


def _central_at_roots(qs, form):
    try:
        dirs = roots(form.map(float))
    except Exception:
        return ()
    if len(dirs) != 2:
        return ()
    return tuple(sorted(-float(evaluate(qs["Q"], d)) / float(evaluate(qs["Q1"], d)) for d in dirs))


def line_points_at(chart, u, v):
    return line_points(eval_frame(chart, u, v))


# --- vectorized offsets over grids -------------------------------------------------

def _root_slopes(a0, a1, a2):
    """Unit root directions of ``a0 dv^2 + a1 du dv + a2 du^2`` for arrays;
    returns ``(d1, d2, real)`` with d's of shape (..., 2)."""
    disc = a1 * a1 - 4 * a0 * a2
    real = disc >= 0
    sq = np.sqrt(np.where(real, disc, 0.0))
    t = -0.5 * (a1 + np.where(a1 >= 0, sq, -sq))
    use0 = np.abs(a0) >= np.abs(a2)
    lead = np.where(use0, a0, a2)
    const = np.where(use0, a2, a0)
    with np.errstate(divide="ignore", invalid="ignore"):
        s1 = np.where(lead != 0, t / lead, 0.0)
        s2 = np.where(t != 0, const / t, np.inf)
    dirs = []
    for s_ in (s1, s2):
        du = np.where(use0, 1.0, s_)
        dv = np.where(use0, s_, 1.0)
        inf = ~np.isfinite(s_)
        du = np.where(inf, np.where(use0, 0.0, 1.0), du)
        dv = np.where(inf, np.where(use0, 1.0, 0.0), dv)
        n = np.hypot(du, dv)
        dirs.append(np.stack([du / n, dv / n], axis=-1))
    return dirs[0], dirs[1], real


def _eval(q, d):
    du, dv = d[..., 0], d[..., 1]
    return q.a0 * dv * dv + q.a1 * du * dv + q.a2 * du * du


def offsets(chart, u, v, kind):
    """Offsets ``r`` of the given kind on arrays of points: shape
    ``(n_sheets, ...)`` with NaN where the point is not real."""
    if kind not in KINDS:
        raise ValueError(f"unknown surface kind {kind!r}")
    F = fundamentals_values(chart, u, v)
    with np.errstate(divide="ignore", invalid="ignore"):
        H, K = mean_and_gauss(F)
        if kind == "Middle":
            return np.asarray(H)[None]
        hk = np.maximum(half_width_sq(F), 0.0)
        if kind == "Boundary":
            return _pair(H, hk)
        if kind == "Characteristic":
            det = F.A * F.C - F.B ** 2
            return _pair(H, hk - det * hk * hk / (F.bbar * F.bbar))
        P = pitch_form(F)
        Q1, Q = q1_form(F), q_form(F)
        d1, d2, real = _root_slopes(*(np.broadcast_to(t, np.shape(H)) for t in P))
        r = np.stack([-_eval(Q, d) / _eval(Q1, d) for d in (d1, d2)])
        r = np.sort(r, axis=0)
        return np.where(real[None], r, np.nan)


def _pair(mid, hw2):
    """``mid -+ sqrt(hw2)``, NaN where ``hw2 < 0``."""
    hw2 = np.broadcast_to(hw2, np.shape(mid))
    w = np.sqrt(np.where(hw2 >= 0, hw2, np.nan))
    return np.stack([mid - w, mid + w])


@dataclass
class Sheet:
    vertices: np.ndarray  # (N, 3)
    faces: np.ndarray  # (F, 4), zero-based vertex indices
    offsets: np.ndarray  # grid of r values, NaN at holes


@dataclass
class SurfaceMesh:
    kind: str
    sheets: list
    us: np.ndarray
    vs: np.ndarray


def sweep_surface(chart, kind, grid=64, region=None):
    """Quad meshes of the points ``x + r n`` of the given kind over a
    ``grid x grid`` lattice.  Sheets are the sorted offsets; nodes without a
    real point are holes (their quads are dropped)."""
    if grid < 16:
        raise ValueError("grid must be at least 16")
    umin, umax, vmin, vmax = region or chart.domain
    us, vs = np.linspace(umin, umax, grid), np.linspace(vmin, vmax, grid)
    uu, vv = np.meshgrid(us, vs, indexing="ij")
    ok = np.asarray(chart.contains(uu, vv), bool)
    n_sheets = 1 if kind == "Middle" else 2
    R = np.full((n_sheets,) + uu.shape, np.nan)
    R[:, ok] = offsets(chart, uu[ok], vv[ok], kind)
    X = np.full(uu.shape + (3,), np.nan)
    N = np.full(uu.shape + (3,), np.nan)
    n, x = chart(uu[ok], vv[ok])
    X[ok] = np.stack([np.broadcast_to(t, uu[ok].shape) for t in x], axis=-1)
    N[ok] = np.stack([np.broadcast_to(t, uu[ok].shape) for t in n], axis=-1)
    sheets = []
    for k in range(n_sheets):
        r = R[k]
        good = np.isfinite(r)
        idx = np.full(r.shape, -1)
        idx[good] = np.arange(int(good.sum()))
        verts = (X + r[..., None] * N)[good]
        quad = good[:-1, :-1] & good[1:, :-1] & good[1:, 1:] & good[:-1, 1:]
        i, j = np.nonzero(quad)
        faces = np.stack([idx[i, j], idx[i + 1, j], idx[i + 1, j + 1], idx[i, j + 1]], axis=1)
        sheets.append(Sheet(verts, faces, r))
    return SurfaceMesh(kind, sheets, us, vs)


def write_obj(mesh, outdir, prefix=None):
    """One OBJ file per sheet, ``v`` and ``f`` records only, 12 significant
    digits.  Returns the written paths."""
    os.makedirs(outdir, exist_ok=True)
    prefix = prefix or mesh.kind.lower()
    paths = []
    for k, sh in enumerate(mesh.sheets, start=1):
        path = os.path.join(outdir, f"{prefix}_sheet{k}.obj")
        with open(path, "w") as fh:
            for p in sh.vertices:
                fh.write("v %.12g %.12g %.12g\n" % tuple(p))
            for f in sh.faces + 1:
                fh.write("f %d %d %d %d\n" % tuple(f))
        paths.append(path)
    return paths


LINE_POINT_COLUMNS = ["u", "v", "boundary1", "boundary2", "middle", "focal1", "focal2",
                      "characteristic1", "characteristic2"]


def write_line_points_csv(chart, us, vs, path):
    uu, vv = np.meshgrid(np.asarray(us, float), np.asarray(vs, float), indexing="ij")
    uu, vv = uu.ravel(), vv.ravel()
    ok = np.asarray(chart.contains(uu, vv), bool)
    uu, vv = uu[ok], vv[ok]
    cols = [uu, vv]
    for kind in ("Boundary", "Middle", "Focal", "Characteristic"):
        cols.extend(offsets(chart, uu, vv, kind))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(LINE_POINT_COLUMNS)
        for row in zip(*cols):
            w.writerow(["" if not np.isfinite(t) else f"{float(t):.17g}" for t in row])
