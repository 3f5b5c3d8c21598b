import math

import numpy as np
import pytest

from clab import gallery
from clab.errors import NotMorse, NotOnDiscriminant, NotOnSigmaN, NotUmbilic
from clab.foliation import lifted_linearization, separatrix_count, umbilic_label_from_topology
from clab.formfields import PolyFormField
from clab.singularities import (
    classify_chart, classify_darboux, classify_on_discriminant, classify_sigma_n, classify_umbilic,
    extract_locus, find_folded_points, find_umbilics, fold_lambda, label_from_lambda,
)


def folded_jet(lam, a0=1.0, c2=1.0):
    # a0 dv^2 + 0 du dv + (c2 v + lam * (4 c2^2 / 4 a0) u^2) du^2
    return PolyFormField({(0, 0): a0}, {}, {(0, 1): c2, (2, 0): lam * c2 * c2 / a0})


@pytest.mark.parametrize("lam,label", [(-1.0, "FoldedSaddle"), (1 / 32, "FoldedNode"), (1.0, "FoldedFocus")])
def test_lambda_windows(lam, label):
    r = classify_on_discriminant(folded_jet(lam), (0.0, 0.0))
    assert r.label == label
    assert r.diagnostics["lambda"] == pytest.approx(lam, rel=1e-12)
    # independent: eigenvalues of the lifted field on its line of zeros
    assert lifted_linearization(folded_jet(lam), (0.0, 0.0))[0] == label


def test_lambda_windows_rotated_and_scaled():
    # same jets after a rotation of the (u, v) plane and with a0 = -2
    th = 0.7
    c, s = math.cos(th), math.sin(th)
    for lam, label in ((-1.0, "FoldedSaddle"), (1 / 32, "FoldedNode"), (1.0, "FoldedFocus")):
        base = folded_jet(lam, a0=-2.0, c2=0.5)

        class Rotated(PolyFormField):
            def jets(self, u, v, order):
                from clab.jets import Jet
                from clab.quadform import QuadForm
                uu = Jet.variable(np.asarray(u, float), 0, order)
                vv = Jet.variable(np.asarray(v, float), 1, order)
                U, V = c * uu + s * vv, -s * uu + c * vv
                a0, a1, a2 = (p(U, V) + uu * 0.0 for p in base.coeffs)
                # pull back the form: dU = c du + s dv, dV = -s du + c dv
                A0 = a0 * c * c + a1 * (-s * c) + a2 * s * s
                A1 = a0 * (-2 * s * c) + a1 * (c * c - s * s) + a2 * (2 * s * c)
                A2 = a0 * s * s + a1 * (s * c) + a2 * c * c
                return QuadForm(A0, A1, A2)

        f = Rotated({}, {}, {})
        r = classify_on_discriminant(f, (0.0, 0.0))
        assert r.label == label
        assert r.diagnostics["lambda"] == pytest.approx(lam, rel=1e-9)


def test_label_boundaries():
    assert label_from_lambda(0.0) == "Degenerate"
    assert label_from_lambda(1 / 16) == "Degenerate"
    assert label_from_lambda(-1e-6) == "FoldedSaddle"
    assert label_from_lambda(1 / 16 + 1e-6) == "FoldedFocus"
    assert fold_lambda(1.0, 0.0, 1.0, 0.25) == pytest.approx(0.25)


def test_cusp_family():
    # b0 = 0 and a0 c1 != 0
    r = classify_on_discriminant(PolyFormField({(0, 0): 1.0}, {(0, 1): 0.4}, {(1, 0): 1.0}), (0.0, 0.0))
    assert r.label == "CuspFamily"


def test_not_on_discriminant():
    with pytest.raises(NotOnDiscriminant):
        classify_on_discriminant(PolyFormField({(0, 0): 1.0}, {}, {(0, 0): -1.0}), (0.0, 0.0))


def test_worked_monstar_jet():
    # (v, 2u, -3v): a0 = v, a1 = 2u, a2 = -3v
    label, diag = classify_darboux(0.0, 1.0, 1.0, 0.0, 0.0, -3.0)
    assert label == "Monstar"
    assert len(diag["phi_roots"]) == 3
    f = PolyFormField({(0, 1): 1.0}, {(1, 0): 2.0}, {(0, 1): -3.0})
    assert classify_umbilic(f, (0.0, 0.0), "BDE").label == "Monstar"
    s = separatrix_count(f, (0.0, 0.0), radius=0.3)
    assert umbilic_label_from_topology(s["radial"], s["index"]) == "Monstar"


def _random_jets(seed, count):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        yield tuple(rng.normal(size=6))


def test_darboux_agrees_with_topology():
    seen = {"Lemon": 0, "Star": 0, "Monstar": 0}
    for a1, a2, b1, b2, c1, c2 in _random_jets(5, 400):
        try:
            label, diag = classify_darboux(a1, a2, b1, b2, c1, c2)
        except NotMorse:
            continue
        if min(diag["hessian_eigs"]) <= 0.05:
            continue  # near-degenerate or elliptic quadratic part
        f = PolyFormField({(1, 0): a1, (0, 1): a2}, {(1, 0): 2 * b1, (0, 1): 2 * b2}, {(1, 0): c1, (0, 1): c2})
        s = separatrix_count(f, (0.0, 0.0), radius=0.5, samples=2880)
        assert umbilic_label_from_topology(s["radial"], s["index"]) == label
        seen[label] += 1
    assert min(seen.values()) >= 3


@pytest.mark.parametrize("name,label", [("lemon-umbilic", "Lemon"), ("star-umbilic", "Star"),
                                        ("monstar-umbilic", "Monstar")])
def test_gallery_umbilics(name, label):
    ch = gallery.build(name)
    umb = find_umbilics(ch, 32)
    assert len(umb) == 1 and math.hypot(*umb[0]) < 1e-9
    r = classify_umbilic(ch, umb[0], "Q2")
    assert r.label == label
    s = separatrix_count(ch, umb[0], "Q2", radius=0.02)
    assert umbilic_label_from_topology(s["radial"], s["index"]) == label
    # the characteristic lens sees the same umbilic type
    assert classify_umbilic(ch, umb[0], "Q5").label == label


def test_not_umbilic():
    with pytest.raises(NotUmbilic):
        classify_umbilic(gallery.build("skew-jet"), (0.0, 0.0))


def test_sphere_is_umbilic_everywhere():
    umb = find_umbilics(gallery.build("sphere-normals"), 32)
    assert umb.degenerate_everywhere and len(umb) == 0


def test_ellipsoid_umbilics():
    # four umbilics of the ellipsoid x^2/a^2 + y^2/b^2 + z^2/c^2 = 1 at
    # x^2 = a^2 (a^2 - b^2) / (a^2 - c^2), y = 0; the chart sees two
    ch = gallery.build("ellipsoid-normals")
    umb = find_umbilics(ch, 64)
    a, b, c = 1.4, 1.0, 0.7
    x = a * math.sqrt((a * a - b * b) / (a * a - c * c))
    assert len(umb) == 2
    for p in umb:
        assert abs(abs(p[0]) - x) < 1e-7 and abs(p[1]) < 1e-9
        assert classify_umbilic(ch, p, "Q5").label == "Degenerate"


def test_extract_locus_circle():
    loci = extract_locus(lambda u, v: u * u + v * v - 0.25, (-1, 1, -1, 1), 64)
    assert len(loci) == 1 and loci[0].closed
    r = np.hypot(loci[0].points[:, 0], loci[0].points[:, 1])
    assert np.max(np.abs(r - 0.5)) < 1e-10


def test_extract_locus_two_lines():
    loci = extract_locus(lambda u, v: (u - 0.3) * (u + 0.3), (-1, 1, -1, 1), 64)
    assert len(loci) == 2
    assert all(np.max(np.abs(np.abs(c.points[:, 0]) - 0.3)) < 1e-10 for c in loci)


def test_folded_points_of_torsal_chart():
    ch = gallery.build("folded-torsal")
    pts = find_folded_points(ch, "Q3", 128)
    labels = sorted(classify_on_discriminant(ch, p, "Q3").label for p in pts)
    assert labels == ["FoldedFocus", "FoldedSaddle"]
    for p in pts:
        lab = classify_on_discriminant(ch, p, "Q3").label
        assert lifted_linearization(ch, p, "Q3")[0] == lab


def test_sigma_fold_and_cusp():
    r = classify_sigma_n(gallery.build("sigma-fold"), (0.0, 0.0))
    assert r.label == "SigmaFold" and r.diagnostics["contact_order"] == 2
    r = classify_sigma_n(gallery.build("sigma-cusp"), (0.0, 0.0))
    assert r.label == "SigmaCusp"
    with pytest.raises(NotOnSigmaN):
        classify_sigma_n(gallery.build("sigma-fold"), (0.2, 0.2))


def test_sigma_parabolic_point():
    reports, _ = classify_chart(gallery.build("sigma-parabolic"), 96)
    sig = [r for r in reports if r.kind == "SigmaN"]
    assert len(sig) == 1
    d = sig[0].diagnostics
    assert d["parabolic"] and d["parabolic_tangency_order"] == 2
    assert math.hypot(*sig[0].at) < 1e-9


def test_classify_chart_is_deterministic():
    ch = gallery.build("folded-torsal")
    a = [r.tsv() for r in classify_chart(ch, 96)[0]]
    b = [r.tsv() for r in classify_chart(ch, 96)[0]]
    assert a == b and a
