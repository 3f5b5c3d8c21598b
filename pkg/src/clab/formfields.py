"""The quadratic differential forms of a congruence and their invariants.

Forms are stored as :class:`~clab.quadform.QuadForm` with coefficients
``(dv^2, du dv, du^2)``:

* ``Q1 = |n'|^2``                      first form of the direction map
* ``Q  = x'.n'``                       central-point numerator, ``r = -Q/Q1``
* ``Q2 = jacobian(Q, Q1)``             principal directions
* ``Q3 = Q2 - bbar*Q1``                torsal directions
* ``Q4 = jacobian(Q1, Q2)``            mean directions
* ``Q5 = -d(Q2)*Q1 - bbar*d(Q1)*Q2``   characteristic directions

``d`` is :func:`~clab.quadform.discriminant`.  With these normalizations the
identities used throughout hold with the constants below (they are
re-derived symbolically in the test suite).
"""
from dataclasses import dataclass
import csv

import numpy as np

from . import jets as J
from .congruence import chart_fundamentals, eval_frame, fundamentals_values
from .errors import DegeneratePencil, OnSigmaN
from .quadform import QuadForm, discriminant, generalized_eigenpairs, jacobian

# d(Q2) = DELTA_Q2_FACTOR * (B^2 - AC)^2 * (H^2 - K)
DELTA_Q2_FACTOR = 1.0
# d(Q3) - d(Q2) = TORSAL_SHIFT_FACTOR * bbar^2 * d(Q1)
TORSAL_SHIFT_FACTOR = 1.0

FORM_NAMES = ("Q1", "Q2", "Q3", "Q4", "Q5")
LENSES = ("Q2", "Q3", "Q4", "Q5")


def q1_form(F):
    return QuadForm(F.C, 2.0 * F.B, F.A)


def q_form(F):
    return QuadForm(-F.c, 2.0 * F.b, -F.a)


def pitch_form(F):
    """``[x', n, n']``; equals ``Q3 / sigma`` where ``sigma = [n, n_u, n_v]``
    and stays nondegenerate across the singular set of ``n``."""
    return QuadForm(*F.pitch_form)


def q_forms(F, cross_check=False):
    """All forms at a frame (or at batched / jet-valued fundamentals)."""
    Q1 = q1_form(F)
    Q = q_form(F)
    Q2 = jacobian(Q, Q1)
    Q3 = Q2 - Q1.scale(F.bbar)
    Q4 = jacobian(Q1, Q2)
    Q5 = Q1.scale(-discriminant(Q2)) - Q2.scale(F.bbar * discriminant(Q1))
    out = {"Q1": Q1, "Q": Q, "Q2": Q2, "Q3": Q3, "Q4": Q4, "Q5": Q5, "P": pitch_form(F)}
    if cross_check:
        out["Q5jac"] = jacobian(Q3, Q4)
    return out


@dataclass(frozen=True)
class FormAtPoint:
    which: str
    form: QuadForm
    at: tuple


def forms_at(frame):
    qs = q_forms(frame)
    return [FormAtPoint(k, qs[k].map(float), (frame.u, frame.v)) for k in ("Q1", "Q", "Q2", "Q3", "Q4", "Q5")]


def mean_and_gauss(F):
    """Closed forms of ``H = (mu1 + mu2)/2`` and ``K = mu1*mu2`` for the
    extreme values ``mu`` of ``r = -Q/Q1``; valid for arrays and jets."""
    det = F.A * F.C - F.B * F.B
    H = (F.a * F.C + F.c * F.A + 2.0 * F.b * F.B) / (2.0 * det)
    K = (F.a * F.c - F.b * F.b) / det
    return H, K


@dataclass(frozen=True)
class PointInvariants:
    H: float
    K: float
    HsqMinusK: float
    bbar: float
    deltas: tuple
    eq6_residual: float


def point_invariants(frame, sigma_tol=1e-12):
    qs = q_forms(frame)
    deltas = tuple(float(discriminant(qs[k])) for k in FORM_NAMES)
    s = max(abs(frame.A), abs(frame.C), 1e-300)
    if abs(frame.A * frame.C - frame.B ** 2) <= sigma_tol * s * s:
        raise OnSigmaN(f"({frame.u}, {frame.v}) is on the singular set; deltas={deltas}")
    try:
        mus = [p.mu for p in generalized_eigenpairs(qs["Q1"].map(float), (-qs["Q"]).map(float))]
        if len(mus) != 2:
            raise DegeneratePencil("missing eigenvalue")
        H, K = 0.5 * (mus[0] + mus[1]), mus[0] * mus[1]
        hk = 0.25 * (mus[0] - mus[1]) ** 2
    except DegeneratePencil:
        H, K = mean_and_gauss(frame)
        hk = 0.0
    det = frame.B ** 2 - frame.A * frame.C
    rhs = DELTA_Q2_FACTOR * det * det * hk
    scale = max(abs(deltas[1]), abs(rhs), 1e-300)
    return PointInvariants(float(H), float(K), float(hk), float(frame.bbar), deltas,
                           abs(deltas[1] - rhs) / scale)


def hyperbolicity(frame, tol=1e-9):
    """Hyperbolic / Parabolic / Elliptic from the sign of the torsal
    discriminant.  The pitch form is used, whose discriminant has the same
    sign as ``d(Q3)`` off the singular set and extends across it."""
    P = pitch_form(frame)
    d = float(discriminant(P))
    sx = max(abs(frame.a), abs(frame.b1), abs(frame.b2), abs(frame.c), 1e-300)
    s1 = max(abs(frame.A), abs(frame.C), 1e-300)
    if abs(d) <= tol * s1 * sx * sx:
        return "Parabolic"
    return "Hyperbolic" if d > 0 else "Elliptic"


# --- fields of forms -------------------------------------------------------------

class FormField:
    """A smooth field of binary quadratic forms over a rectangle."""

    domain = (-1.0, 1.0, -1.0, 1.0)
    name = "field"

    def jets(self, u, v, order):
        """QuadForm whose coefficients are jets of the given order."""
        raise NotImplementedError

    def values(self, u, v):
        q = self.jets(u, v, 0)
        return QuadForm(*(np.asarray(J.value(t)) for t in q))

    def contains(self, u, v):
        umin, umax, vmin, vmax = self.domain
        u, v = np.asarray(u), np.asarray(v)
        return (u >= umin) & (u <= umax) & (v >= vmin) & (v <= vmax)


class LensField(FormField):
    """One of the congruence BDEs as a field.

    ``Q3`` is represented by the pitch form (same solutions off the singular
    set of ``n``, smooth across it); ``Q3raw`` gives ``Q2 - bbar*Q1``.
    """

    def __init__(self, chart, lens):
        if lens not in ("Q1", "Q", "Q2", "Q3", "Q3raw", "Q4", "Q5"):
            raise ValueError(f"unknown lens {lens!r}")
        self.chart = chart
        self.lens = lens
        self.domain = chart.domain
        self.name = f"{chart.name}:{lens}"

    def contains(self, u, v):
        return self.chart.contains(u, v)

    def jets(self, u, v, order):
        F = chart_fundamentals(self.chart, u, v, order)
        q = lens_form(F, self.lens)
        return QuadForm(*(_ensure_jet(t, F.A) for t in q))


def lens_form(F, lens):
    """A single form, computing only what it depends on."""
    if lens == "Q3":
        return pitch_form(F)
    Q1 = q1_form(F)
    if lens == "Q1":
        return Q1
    Q = q_form(F)
    if lens == "Q":
        return Q
    Q2 = jacobian(Q, Q1)
    if lens == "Q2":
        return Q2
    if lens == "Q3raw":
        return Q2 - Q1.scale(F.bbar)
    if lens == "Q4":
        return jacobian(Q1, Q2)
    return Q1.scale(-discriminant(Q2)) - Q2.scale(F.bbar * discriminant(Q1))


def _ensure_jet(t, like):
    return t if isinstance(t, J.Jet) else like * 0.0 + t


class PolyFormField(FormField):
    """Form with polynomial coefficients ``a0, a1, a2`` (``Poly`` objects
    or dicts ``{(i, j): c}``); useful for prescribed BDE jets."""

    def __init__(self, a0, a1, a2, domain=(-1.0, 1.0, -1.0, 1.0), name="poly"):
        self.coeffs = tuple(p if isinstance(p, J.Poly) else J.Poly(p) for p in (a0, a1, a2))
        self.domain = tuple(float(t) for t in domain)
        self.name = name

    def jets(self, u, v, order):
        uu = J.Jet.variable(np.asarray(u, dtype=float), 0, order)
        vv = J.Jet.variable(np.asarray(v, dtype=float), 1, order)
        return QuadForm(*(_ensure_jet(p(uu, vv), uu) for p in self.coeffs))


def lens_field(chart, lens):
    return LensField(chart, lens)


def grid_values(chart, u, v):
    """Fundamentals, forms and invariants on arrays of points."""
    F = fundamentals_values(chart, u, v)
    qs = q_forms(F)
    with np.errstate(divide="ignore", invalid="ignore"):
        H, K = mean_and_gauss(F)
    return F, qs, H, K


CSV_COLUMNS = (
    ["u", "v"]
    + [f"{q}_{k}" for q in FORM_NAMES for k in ("a0", "a1", "a2")]
    + [f"delta_{q}" for q in FORM_NAMES]
    + ["HsqMinusK", "bbar"]
)


def dump_fields(chart, us, vs, path):
    """CSV of all form coefficients over the grid ``us x vs`` (17
    significant digits, columns as in ``CSV_COLUMNS``)."""
    uu, vv = np.meshgrid(np.asarray(us, float), np.asarray(vs, float), indexing="ij")
    uu, vv = uu.ravel(), vv.ravel()
    F, qs, H, K = grid_values(chart, uu, vv)
    cols = [uu, vv]
    for q in FORM_NAMES:
        cols.extend(np.broadcast_to(t, uu.shape) for t in qs[q])
    cols.extend(np.broadcast_to(discriminant(qs[q]), uu.shape) for q in FORM_NAMES)
    cols.append(H * H - K)
    cols.append(np.broadcast_to(F.bbar, uu.shape))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for row in zip(*cols):
            w.writerow([f"{float(t):.17g}" for t in row])


def frame_forms(chart, u, v):
    """Convenience: forms at one point as float QuadForms."""
    return {k: q.map(float) for k, q in q_forms(eval_frame(chart, u, v)).items()}
