"""Identity suites evaluated on random points of a chart.

Each check reports the largest residual over the sample and passes iff that
residual is within its tolerance.  Residuals are relative to the natural
scale of the quantities involved.
"""
from dataclasses import dataclass
import numpy as np

from .congruence import fundamentals_values
from .formfields import DELTA_Q2_FACTOR, TORSAL_SHIFT_FACTOR, mean_and_gauss, q_forms
from .quadform import discriminant, jacobian, polar_pairing
from .singularities import find_umbilics

SAMPLES = 500


@dataclass
class Check:
    name: str
    residual: float
    tolerance: float
    count: int
    note: str = ""

    @property
    def passed(self):
        return self.count == 0 or self.residual <= self.tolerance

    def row(self):
        status = "PASS" if self.passed else "FAIL"
        note = f"  {self.note}" if self.note else ""
        return f"{status}  {self.name:<34s} max={self.residual:.3e}  tol={self.tolerance:.1e}  n={self.count}{note}"


@dataclass
class Verification:
    chart: str
    checks: list
    notes: list

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def table(self):
        lines = [f"verify {self.chart}"]
        lines += [c.row() for c in self.checks]
        lines += [f"note: {n}" for n in self.notes]
        return "\n".join(lines) + "\n"


def _arr(t, shape):
    return np.broadcast_to(np.asarray(t, float), shape)


def _coeffs(q, shape):
    return np.stack([_arr(t, shape) for t in q])


def sample_points(chart, n=SAMPLES, seed=0, region=None):
    """Random points of the chart's domain away from the singular set of n."""
    rng = np.random.default_rng(seed)
    umin, umax, vmin, vmax = region or chart.domain
    u = rng.uniform(umin, umax, 4 * n)
    v = rng.uniform(vmin, vmax, 4 * n)
    ok = np.asarray(chart.contains(u, v), bool)
    u, v = u[ok], v[ok]
    F = fundamentals_values(chart, u, v)
    s = np.maximum(np.abs(F.A), np.abs(F.C))
    keep = np.abs(F.A * F.C - F.B ** 2) > 1e-3 * s * s
    return u[keep][:n], v[keep][:n]


def _max(x):
    x = np.asarray(x, float)
    return float(np.max(x)) if x.size else 0.0


def run_identities(chart, tolerances=None, seed=0, n=SAMPLES, region=None):
    tol = {"identity": 1e-7, "polar": 1e-8, "umbilic": 1e-9}
    tol.update(tolerances or {})
    u, v = sample_points(chart, n, seed, region)
    shape = u.shape
    F = fundamentals_values(chart, u, v)
    qs = q_forms(F, cross_check=True)
    Q1, Q2, Q3, Q4, Q5 = (qs[k] for k in ("Q1", "Q2", "Q3", "Q4", "Q5"))
    d1, d2, d3, d4, d5 = (_arr(discriminant(q), shape) for q in (Q1, Q2, Q3, Q4, Q5))
    checks = []
    notes = []
    tid, tpol = tol["identity"], tol["polar"]

    n_, nu, nv = _unit_frame(chart, u, v)
    checks.append(Check("unit normal |n| = 1, n.n_u = n.n_v = 0",
                        _max(np.abs(np.einsum("ij,ij->j", n_, n_) - 1.0)
                             + np.abs(np.einsum("ij,ij->j", n_, nu)) / np.linalg.norm(nu, axis=0)
                             + np.abs(np.einsum("ij,ij->j", n_, nv)) / np.linalg.norm(nv, axis=0)),
                        tid, len(u)))

    # natural magnitudes: Q1 ~ s1, Q ~ sq, Q2 ~ s1 sq, Q4 ~ s1^2 sq, Q5 ~ s1^3 sq^2
    s1 = np.max(np.abs(_coeffs(Q1, shape)), axis=0)
    sq = np.max(np.abs(_coeffs(qs["Q"], shape)), axis=0)
    s2 = s1 * sq
    mags = {"Q1": s1, "Q2": s2, "Q3": s2, "Q4": s1 * s2, "Q5": s1 * s1 * s2 * sq}
    floor = 1e-300

    with np.errstate(divide="ignore", invalid="ignore"):
        H, K = mean_and_gauss(F)
    det = F.B ** 2 - F.A * F.C
    rhs = DELTA_Q2_FACTOR * det * det * (H * H - K)
    sc = np.maximum(np.abs(d2), s2 * s2) + floor
    checks.append(Check("d(Q2) = (B^2-AC)^2 (H^2-K)", _max(np.abs(d2 - rhs) / sc), tid, len(u)))

    sc = np.maximum(np.abs(d4), s1 * s1 * s2 * s2) + floor
    checks.append(Check("d(Q4) = -d(Q1) d(Q2)", _max(np.abs(d4 + d1 * d2) / sc), tid, len(u)))

    shift = TORSAL_SHIFT_FACTOR * _arr(F.bbar, shape) ** 2 * d1
    sc = np.maximum.reduce([np.abs(d3), s2 * s2, np.abs(shift)]) + floor
    checks.append(Check("d(Q3) - d(Q2) = bbar^2 d(Q1)", _max(np.abs(d3 - d2 - shift) / sc), tid, len(u)))

    sQ3 = _coeffs(Q3, shape)
    sP = _coeffs(qs["P"], shape) * _arr(F.sigma, shape)
    sc = np.maximum(np.max(np.abs(sQ3), axis=0), s2) + floor
    checks.append(Check("Q3 = [n,n_u,n_v] * pitch form", _max(np.max(np.abs(sQ3 - sP), axis=0) / sc), tid, len(u)))

    J = _coeffs(jacobian(Q3, Q4), shape)
    sc = mags["Q5"] + floor
    checks.append(Check("Q5 = Jacobian(Q3, Q4)", _max(np.max(np.abs(J - _coeffs(Q5, shape)), axis=0) / sc),
                        tid, len(u)))

    for names in (("Q1", "Q2", "Q4"), ("Q3", "Q4", "Q5")):
        trio = [qs[k] for k in names]
        norms = [np.max(np.abs(_coeffs(q, shape)), axis=0) for q in trio]
        # a vanishing vertex (umbilic, or the whole sphere) has no polar line
        live = np.all([nm > 1e-6 * mags[k] for nm, k in zip(norms, names)], axis=0)
        worst = np.zeros(shape)
        for i in range(3):
            for j in range(i + 1, 3):
                pij = np.abs(_arr(polar_pairing(trio[i], trio[j]), shape))
                worst = np.maximum(worst, pij / (norms[i] * norms[j] + floor))
        checks.append(Check(f"self-polar ({','.join(names)})", _max(worst[live]), tpol, int(live.sum())))

    big = np.abs(d5) > 1e-9 * mags["Q5"] ** 2
    mismatch = (np.sign(d5) != np.sign(d1 * d2 * d3)) & big
    checks.append(Check("sign d(Q5) = sign d(Q1)d(Q2)d(Q3)", float(mismatch.sum()), 0.0, int(big.sum())))

    bbar = np.abs(_arr(F.bbar, shape))
    bscale = np.maximum(np.abs(_arr(F.b1, shape)) + np.abs(_arr(F.b2, shape)), 1e-300)
    normal = _max(bbar / bscale) <= 1e-9
    if normal:
        notes.append("bbar vanishes on the sample: normal congruence, Q3 = Q2 and Q5 = -d(Q2) Q1")
    else:
        checks.append(_line_point_check(F, qs, shape, H, K, tid))

    umb = find_umbilics(chart, 32, tol["umbilic"])
    if umb.degenerate_everywhere:
        notes.append("umbilic everywhere: Q2 vanishes identically, every direction is principal")
    elif umb:
        notes.append("umbilics at " + ", ".join(f"({p[0]:.6g}, {p[1]:.6g})" for p in umb))
    return Verification(chart.name, checks, notes)


def _unit_frame(chart, u, v):
    n, _ = chart.jets(u, v, 1)
    val = np.stack([_arr(t.value, u.shape) for t in n])
    du = np.stack([_arr(t.coeff(1, 0), u.shape) for t in n])
    dv = np.stack([_arr(t.coeff(0, 1), u.shape) for t in n])
    return val, du, dv


def _line_point_check(F, qs, shape, H, K, tol):
    """Characteristic pair from its quadratic against the central points of
    the real Q5 directions; only where both are real."""
    from .geom3d import _root_slopes, _eval

    det = F.A * F.C - F.B ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        shift = det * (H * H - K) ** 2 / (F.bbar * F.bbar)
        p, q = H, K + shift
        disc = p * p - q
        s = np.sqrt(np.maximum(disc, 0.0))
        quad = np.sort(np.stack([p - s, p + s]), axis=0)
        Q, Q1 = qs["Q"], qs["Q1"]
        d1, d2, real = _root_slopes(*(_arr(t, shape) for t in qs["Q5"]))
        r = np.sort(np.stack([-_eval(Q, d) / _eval(Q1, d) for d in (d1, d2)]), axis=0)
        sc = np.maximum(np.abs(quad).max(axis=0), np.sqrt(np.abs(K)) + np.abs(H))
        good = real & (disc > 1e-6 * sc * sc) & np.isfinite(sc)
        res = np.max(np.abs(r - quad), axis=0) / sc
    return Check("characteristic pair: quadratic = Q5", _max(res[good]), tol, int(good.sum()))


def summary_line(v):
    worst = max((c for c in v.checks if c.count), key=lambda c: c.residual / max(c.tolerance, 1e-300),
                default=None)
    state = "all identities pass" if v.passed else "FAILED"
    if worst is None:
        return f"{v.chart}: {state}"
    return f"{v.chart}: {state} (tightest: {worst.name}, {worst.residual:.2e})"

