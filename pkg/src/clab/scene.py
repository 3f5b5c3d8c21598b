"""Scene files: strict JSON describing a chart, a region and what to compute.

Example::

    {
      "chart": {"jet": {"alpha": {"10": 1.0, "11": 0.3},
                        "beta": {"10": -0.3, "11": 1.0}}},
      "region": [-0.25, 0.25, -0.25, 0.25],
      "grid": 128,
      "lens": "Q2",
      "outputs": {"dir": "out"}
    }

``chart`` is one of ``{"gallery": name, "params": {...}}``,
``{"jet": {"alpha": ..., "beta": ..., "n1": ..., "n2": ...}}`` (subscript
maps ``"dk"`` for the coefficient of ``u^(d-k) v^k``) or
``{"surface": id, "params": {...}}`` for the normals of a built-in surface.
Optional top-level keys: ``tolerances``, ``seed``, ``seed_density``.
"""
from dataclasses import dataclass, field
import json
import re

from . import gallery
from .errors import ParseError, RangeError, SchemaError
from .formfields import LENSES

TOP_KEYS = ("chart", "region", "grid", "lens", "outputs", "tolerances", "seed", "seed_density")
REQUIRED = ("chart", "region", "grid", "lens", "outputs")
OUTPUT_KEYS = ("dir", "prefix")
SURFACES = {
    "sphere": "sphere-normals",
    "ellipsoid": "ellipsoid-normals",
    "monkey-saddle": "monkey-saddle-normals",
    "paraboloid": "paraboloid-normals",
    "parabolic-graph": "parabolic-graph-normals",
}
DEFAULT_TOLERANCES = {
    "umbilic": 1e-9,
    "discriminant": 1e-6,
    "fold": 1e-6,
    "lambda_band": 1e-9,
    "trace": 1e-8,
    "identity": 1e-7,
    "polar": 1e-8,
}


@dataclass
class Scene:
    chart: dict
    region: tuple
    grid: int
    lens: str
    outputs: dict
    tolerances: dict = field(default_factory=dict)
    seed: int = 0
    seed_density: int = 8

    def build_chart(self):
        return build_chart(self.chart, self.region)

    def tolerance(self, name):
        return self.tolerances.get(name, DEFAULT_TOLERANCES[name])

    def to_dict(self):
        out = {
            "chart": self.chart,
            "region": list(self.region),
            "grid": self.grid,
            "lens": self.lens,
            "outputs": self.outputs,
        }
        if self.tolerances:
            out["tolerances"] = self.tolerances
        if self.seed:
            out["seed"] = self.seed
        if self.seed_density != 8:
            out["seed_density"] = self.seed_density
        return out

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _reject_duplicates(pairs):
    seen = {}
    for k, v in pairs:
        if k in seen:
            raise ValueError(f"duplicate key {k!r}")
        seen[k] = v
    return seen


def _locate(text, key):
    m = re.search(r'"%s"\s*:' % re.escape(key), text)
    if not m:
        return None, None
    line = text.count("\n", 0, m.start()) + 1
    col = m.start() - (text.rfind("\n", 0, m.start()) + 1) + 1
    return line, col


def _schema(text, msg, key=None):
    line, col = _locate(text, key) if key else (None, None)
    return SchemaError(msg, line, col)


def _range(text, msg, key):
    line, col = _locate(text, key)
    return RangeError(msg, line, col)


def parse_scene(text):
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    try:
        doc = json.loads(text, object_pairs_hook=_reject_duplicates)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    if not isinstance(doc, dict):
        raise SchemaError("top level must be an object", 1, 1)
    for k in doc:
        if k not in TOP_KEYS:
            raise _schema(text, f"unknown key {k!r}", k)
    for k in REQUIRED:
        if k not in doc:
            raise SchemaError(f"missing key {k!r}", 1, 1)
    chart = _check_chart(text, doc["chart"])
    region = doc["region"]
    if (not isinstance(region, list) or len(region) != 4
            or not all(_is_number(t) for t in region)):
        raise _schema(text, "region must be [umin, umax, vmin, vmax]", "region")
    region = tuple(float(t) for t in region)
    if not (region[0] < region[1] and region[2] < region[3]):
        raise _range(text, "region is empty", "region")
    grid = doc["grid"]
    if not isinstance(grid, int) or isinstance(grid, bool):
        raise _schema(text, "grid must be an integer", "grid")
    if not 32 <= grid <= 4096:
        raise _range(text, "grid must be between 32 and 4096", "grid")
    lens = doc["lens"]
    if lens not in LENSES:
        raise _schema(text, f"lens must be one of {', '.join(LENSES)}", "lens")
    outputs = doc["outputs"]
    if not isinstance(outputs, dict):
        raise _schema(text, "outputs must be an object", "outputs")
    for k, v in outputs.items():
        if k not in OUTPUT_KEYS:
            raise _schema(text, f"unknown key {k!r}", k)
        if not isinstance(v, str):
            raise _schema(text, f"outputs.{k} must be a string", k)
    tolerances = doc.get("tolerances", {})
    if not isinstance(tolerances, dict):
        raise _schema(text, "tolerances must be an object", "tolerances")
    for k, v in tolerances.items():
        if k not in DEFAULT_TOLERANCES:
            raise _schema(text, f"unknown key {k!r}", k)
        if not _is_number(v):
            raise _schema(text, f"tolerance {k!r} must be a number", k)
        if not v > 0:
            raise _range(text, f"tolerance {k!r} must be positive", k)
    seed = doc.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise _schema(text, "seed must be a non-negative integer", "seed")
    density = doc.get("seed_density", 8)
    if not isinstance(density, int) or isinstance(density, bool):
        raise _schema(text, "seed_density must be an integer", "seed_density")
    if not 1 <= density <= 256:
        raise _range(text, "seed_density must be between 1 and 256", "seed_density")
    scene = Scene(chart, region, grid, lens, dict(outputs), dict(tolerances), seed, density)
    if "jet" in chart:
        _check_jet_region(text, scene)
    return scene


def load_scene(path):
    with open(path, "rb") as fh:
        return parse_scene(fh.read())


def _is_number(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _check_coeffs(text, table, name):
    if not isinstance(table, dict):
        raise _schema(text, f"{name} must be an object of subscript: value", name)
    for k, v in table.items():
        if not re.fullmatch(r"[0-3][0-3]", k) or int(k[1]) > int(k[0]):
            raise _schema(text, f"bad coefficient subscript {k!r} in {name}", k)
        if not _is_number(v):
            raise _schema(text, f"{name}[{k!r}] must be a number", k)


def _check_chart(text, chart):
    if not isinstance(chart, dict):
        raise _schema(text, "chart must be an object", "chart")
    kinds = [k for k in ("gallery", "jet", "surface") if k in chart]
    if len(kinds) != 1:
        raise _schema(text, "chart needs exactly one of gallery, jet, surface", "chart")
    kind = kinds[0]
    allowed = {"gallery": ("gallery", "params"), "jet": ("jet",), "surface": ("surface", "params")}[kind]
    for k in chart:
        if k not in allowed:
            raise _schema(text, f"unknown key {k!r}", k)
    if kind == "gallery":
        if chart["gallery"] not in gallery.GALLERY:
            raise _schema(text, f"unknown gallery chart {chart['gallery']!r}", "gallery")
    elif kind == "surface":
        if chart["surface"] not in SURFACES:
            raise _schema(text, f"unknown surface {chart['surface']!r}", "surface")
    else:
        jet = chart["jet"]
        if not isinstance(jet, dict):
            raise _schema(text, "jet must be an object", "jet")
        for k in jet:
            if k not in ("alpha", "beta", "n1", "n2"):
                raise _schema(text, f"unknown key {k!r}", k)
        for k in ("alpha", "beta"):
            if k not in jet:
                raise _schema(text, f"jet chart needs {k!r}", "jet")
        for k, table in jet.items():
            _check_coeffs(text, table, k)
    params = chart.get("params", {})
    if not isinstance(params, dict):
        raise _schema(text, "params must be an object", "params")
    for k, v in params.items():
        if not (_is_number(v) or (k == "domain" and isinstance(v, list))):
            raise _schema(text, f"parameter {k!r} must be a number", k)
    return chart


def _check_jet_region(text, scene):
    umin, umax, vmin, vmax = scene.region
    jet = scene.chart["jet"]
    if "n1" in jet or "n2" in jet:
        return
    r2 = max(umin * umin, umax * umax) + max(vmin * vmin, vmax * vmax)
    if r2 >= 1.0:
        raise _range(text, "region leaves the unit disc u^2 + v^2 < 1 of the jet chart", "region")


def build_chart(spec, region=None):
    """Chart from the ``chart`` entry of a scene, restricted to ``region``."""
    domain = tuple(region) if region is not None else None
    if "gallery" in spec:
        params = dict(spec.get("params", {}))
        if domain is not None:
            params["domain"] = domain
        try:
            return gallery.build(spec["gallery"], params)
        except TypeError as exc:
            raise SchemaError(f"bad parameters for {spec['gallery']}: {exc}") from None
    if "surface" in spec:
        params = dict(spec.get("params", {}))
        if domain is not None:
            params["domain"] = domain
        try:
            return gallery.build(SURFACES[spec["surface"]], params)
        except TypeError as exc:
            raise SchemaError(f"bad parameters for {spec['surface']}: {exc}") from None
    jet = spec["jet"]
    return gallery.jet_chart(jet["alpha"], jet["beta"], jet.get("n1"), jet.get("n2"),
                             domain=domain, name="jet")
