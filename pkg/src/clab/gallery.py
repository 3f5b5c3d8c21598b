"""Built-in charts covering every classification branch.

Each entry is a factory ``fn(**params) -> CongruenceChart``; ``build(name,
params)`` looks one up by name.
"""
from . import jets as J
from .congruence import JetChart, normal_congruence_of
from .jets import Jet3Scalar, Poly


def sphere_normals(radius=1.0, domain=None):
    R = float(radius)
    d = 0.5 * R
    return normal_congruence_of(
        lambda u, v: (u, v, J.sqrt(R * R - u * u - v * v)),
        domain or (-d, d, -d, d), name="sphere-normals",
        valid=lambda u, v: u * u + v * v < 0.98 * R * R)


def ellipsoid_normals(a=1.4, b=1.0, c=0.7, domain=None):
    """Upper half of ``x^2/a^2 + y^2/b^2 + z^2/c^2 = 1`` as a graph; with
    ``a > b > c`` it contains the two umbilics at ``y = 0``."""
    a, b, c = float(a), float(b), float(c)
    return normal_congruence_of(
        lambda u, v: (u, v, c * J.sqrt(1.0 - u * u / (a * a) - v * v / (b * b))),
        domain or (-0.85 * a, 0.85 * a, -0.6 * b, 0.6 * b), name="ellipsoid-normals",
        valid=lambda u, v: u * u / (a * a) + v * v / (b * b) < 0.95)


def monkey_saddle_normals(domain=None):
    return normal_congruence_of(
        lambda u, v: (u, v, u * u * u - 3.0 * u * v * v),
        domain or (-0.5, 0.5, -0.5, 0.5), name="monkey-saddle-normals")


def paraboloid_normals(k1=1.0, k2=1.0, domain=None):
    k1, k2 = float(k1), float(k2)
    return normal_congruence_of(
        lambda u, v: (u, v, 0.5 * (k1 * u * u + k2 * v * v)),
        domain or (-0.5, 0.5, -0.5, 0.5), name="paraboloid-normals")


def parabolic_graph_normals(domain=None):
    """``z = u^2/2 + v^3/6``: the parabolic set of the surface is ``v = 0``,
    which is also the singular set of the normal map."""
    return normal_congruence_of(
        lambda u, v: (u, v, 0.5 * u * u + v * v * v / 6.0 + 0.0 * u),
        domain or (-0.4, 0.4, -0.4, 0.4), name="parabolic-graph-normals")


def jet_chart(alpha=None, beta=None, n1=None, n2=None, domain=None, name="jet"):
    return JetChart(alpha or {}, beta or {}, _poly(n1), _poly(n2),
                    domain or (-0.5, 0.5, -0.5, 0.5), name)


def _poly(spec):
    if spec is None or isinstance(spec, Poly):
        return spec
    return Jet3Scalar.from_subscripts(spec) if all(isinstance(k, str) for k in spec) else Poly(spec)


def skew_jet(domain=None):
    """Non-normal jet chart; real torsal directions on part of the domain,
    with a parabolic curve and folded torsal points."""
    return jet_chart(
        {"10": 1.0, "11": 0.8, "20": 0.5, "21": -0.3, "22": 0.4, "31": 0.2},
        {"10": -0.2, "11": 0.6, "20": 0.7, "21": 0.5, "22": -0.6, "33": 0.3},
        domain=domain or (-0.5, 0.5, -0.5, 0.5), name="skew-jet")


def folded_torsal(domain=None):
    """Non-normal jet chart whose parabolic curve carries a folded saddle and
    a folded focus of the torsal BDE."""
    return jet_chart(
        {"10": 0.55, "11": -0.17, "20": 0.02, "21": -0.29, "22": -0.47,
         "30": -0.11, "31": 0.12, "32": 1.1, "33": 0.03},
        {"10": 0.81, "11": 1.06, "20": 0.05, "21": 0.96, "22": 0.43,
         "30": -0.25, "31": 0.16, "32": 0.01, "33": -0.14},
        domain=domain or (-0.5, 0.5, -0.5, 0.5), name="folded-torsal")


# umbilic at the origin (beta10 = -alpha11, beta11 = alpha10) with 2-jets
# chosen to realize each generic configuration
_UMBILIC_BASE_A = {"10": 1.0, "11": 0.3, "30": 0.1, "33": -0.2}
_UMBILIC_BASE_B = {"10": -0.3, "11": 1.0, "31": 0.15}
_UMBILIC_2JETS = {
    "lemon": ({"20": 0.94, "21": 0.55, "22": 0.58}, {"20": 0.52, "21": 0.19, "22": 0.84}),
    "star": ({"20": 0.02, "21": 0.9, "22": -0.71}, {"20": 0.9, "21": -0.38, "22": -0.15}),
    "monstar": ({"20": -0.7, "21": 0.64, "22": 0.37}, {"20": 0.57, "21": -0.62, "22": 0.6}),
}


def umbilic_chart(kind, domain=None):
    a2, b2 = _UMBILIC_2JETS[kind]
    return jet_chart({**_UMBILIC_BASE_A, **a2}, {**_UMBILIC_BASE_B, **b2},
                     domain=domain or (-0.25, 0.25, -0.25, 0.25), name=f"{kind}-umbilic")


def sigma_fold(k10=0.3, k11=-0.2, l2=0.5, alpha=None, beta=None, domain=None):
    """Direction map ``n = (u, (1 + k10 u + k11 v) v^2 + l2 u^2, .)``, folded
    along ``v = 0`` with kernel ``d/dv``."""
    n2 = Poly({(0, 2): 1.0, (1, 2): k10, (0, 3): k11, (2, 0): l2})
    return jet_chart(alpha or {"10": 1.0, "11": 0.6, "21": 0.3, "22": -0.2},
                     beta or {"10": 0.5, "11": 0.8, "20": 0.2, "21": 0.4, "22": 0.3},
                     None, n2, domain or (-0.4, 0.4, -0.4, 0.4), "sigma-fold")


def sigma_parabolic(domain=None):
    """Fold chart with ``beta11 = 0``: the parabolic curve touches the
    singular set at the origin."""
    ch = sigma_fold(alpha={"10": 1.0, "11": 0.6, "21": 0.3, "22": -0.2},
                    beta={"10": 0.5, "11": 0.0, "20": 0.2, "21": 0.4, "22": 0.3},
                    domain=domain)
    ch.name = "sigma-parabolic"
    return ch


def sigma_cusp(domain=None):
    """``n = (u, v^3 + u v, .)``: cusp of the direction map at the origin."""
    n2 = Poly({(0, 3): 1.0, (1, 1): 1.0})
    return jet_chart({"10": 1.0, "11": 0.6, "21": 0.3}, {"10": 0.5, "11": 0.8, "20": 0.2, "22": 0.3},
                     None, n2, domain or (-0.3, 0.3, -0.3, 0.3), "sigma-cusp")


GALLERY = {
    "sphere-normals": sphere_normals,
    "ellipsoid-normals": ellipsoid_normals,
    "monkey-saddle-normals": monkey_saddle_normals,
    "paraboloid-normals": paraboloid_normals,
    "parabolic-graph-normals": parabolic_graph_normals,
    "skew-jet": skew_jet,
    "folded-torsal": folded_torsal,
    "lemon-umbilic": lambda **kw: umbilic_chart("lemon", **kw),
    "star-umbilic": lambda **kw: umbilic_chart("star", **kw),
    "monstar-umbilic": lambda **kw: umbilic_chart("monstar", **kw),
    "sigma-fold": sigma_fold,
    "sigma-parabolic": sigma_parabolic,
    "sigma-cusp": sigma_cusp,
}

NORMAL_CONGRUENCES = ("sphere-normals", "ellipsoid-normals", "monkey-saddle-normals",
                      "paraboloid-normals", "parabolic-graph-normals")


def build(name, params=None):
    try:
        factory = GALLERY[name]
    except KeyError:
        raise KeyError(f"unknown gallery chart {name!r}") from None
    params = dict(params or {})
    if "domain" in params:
        params["domain"] = tuple(params["domain"])
    return factory(**params)
