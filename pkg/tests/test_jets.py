import math

import numpy as np
import pytest
import sympy as sp

from clab import _kernels
from clab import jets as J
from clab.jets import Jet, Jet3Scalar, _mul_tables, n_monomials


def taylor_coeffs(expr, u0, v0, order):
    u, v = sp.symbols("u v")
    out = []
    for d in range(order + 1):
        for j in range(d + 1):
            i = d - j
            val = sp.diff(expr, u, i, v, j).subs({u: u0, v: v0})
            out.append(float(val) / (math.factorial(i) * math.factorial(j)))
    return np.array(out)


def test_jet_arithmetic_matches_sympy():
    u, v = sp.symbols("u v")
    u0, v0, order = 0.3, -0.2, 3
    uu, vv = Jet.variable(u0, 0, order), Jet.variable(v0, 1, order)
    got = J.sqrt(1.0 - uu * uu - vv * vv) * (uu + 2.0 * vv) / (1.5 + uu * vv)
    expr = sp.sqrt(1 - u * u - v * v) * (u + 2 * v) / (sp.Rational(3, 2) + u * v)
    assert np.allclose(got.c, taylor_coeffs(expr, u0, v0, order), rtol=1e-12, atol=1e-13)


def test_jet_elementary_functions():
    u, v = sp.symbols("u v")
    uu, vv = Jet.variable(0.1, 0, 3), Jet.variable(0.4, 1, 3)
    for jet, expr in ((J.sin(uu * vv), sp.sin(u * v)), (J.cos(uu + vv), sp.cos(u + v)),
                      (J.exp(uu - vv), sp.exp(u - v))):
        assert np.allclose(jet.c, taylor_coeffs(expr, 0.1, 0.4, 3), atol=1e-13)


def test_partials_and_derivative():
    uu, vv = Jet.variable(0.5, 0, 3), Jet.variable(-0.5, 1, 3)
    f = uu ** 3 * vv + vv * vv
    assert f.partial(3, 0) == pytest.approx(6 * -0.5)
    assert f.partial(2, 1) == pytest.approx(6 * 0.5)
    assert float(f.du.value) == pytest.approx(3 * 0.25 * -0.5)
    assert f.truncate(1).order == 1


def test_subscript_convention():
    p = Jet3Scalar.from_subscripts({"10": 2.0, "11": 3.0, "21": 5.0, "33": 7.0})
    assert p(0.5, 2.0) == pytest.approx(2 * 0.5 + 3 * 2.0 + 5 * 0.5 * 2.0 + 7 * 8.0)
    assert Jet3Scalar.from_subscripts(p.to_subscripts()) == p
    with pytest.raises(ValueError):
        Jet3Scalar.from_subscripts({"12": 1.0})


@pytest.mark.parametrize("order", [2, 3, 4])
def test_numba_and_numpy_products_agree(order):
    if not _kernels.HAVE_NUMBA:
        pytest.skip("numba unavailable")
    rng = np.random.default_rng(order)
    M = n_monomials(order)
    a, b = rng.normal(size=(M, 37)), rng.normal(size=(M, 37))
    I, Jx, K, starts = _mul_tables(order)
    assert np.allclose(_kernels.jet_mul_numpy(a, b, I, Jx, starts),
                       _kernels.jet_mul_numba(a, b, I, Jx, K, M), rtol=1e-13, atol=1e-13)


def test_cell_segments_paths_agree():
    if not _kernels.HAVE_NUMBA:
        pytest.skip("numba unavailable")
    rng = np.random.default_rng(0)
    vals = rng.normal(size=(40, 30))
    center = rng.normal(size=(39, 29))
    a = _kernels.cell_segments(vals, center, use_numba=False)
    b = _kernels.cell_segments(vals, center, use_numba=True)
    order = lambda s: np.lexsort(s.T[::-1])
    assert np.array_equal(a[order(a)], b[order(b)])
