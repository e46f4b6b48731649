"""Run configuration: a flat, line-oriented `key = value` format.

Sections are bracketed headers; `[layer]`, `[patch_layer]`, and `[patch]`
repeat (layers bottom to top). All numbers are SI (meters, kg/m^3, Pa, Hz)
except phases, which are degrees. Unknown sections or keys are rejected
with the offending line.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

from .drive import ActuatorPatch
from .errors import ConfigurationError, ParseError
from .fluid import FluidModel
from .laminate import Layer
from .mesh import Circle, Cross, Rectangle

_LAYER_KEYS = {"thickness", "density", "elastic_modulus", "poisson_ratio"}

_SCHEMA = {
    "geometry": {"planform", "length", "width", "radius", "arm_width"},
    "mesh": {"element_size"},
    "boundary": {"condition", "edge"},
    "layer": _LAYER_KEYS,
    "patch_layer": _LAYER_KEYS,
    "patch": {"x0", "y0", "x1", "y1", "amplitude"},
    "fluid": {"density", "calibration_factor", "char_length"},
    "solver": {"mode_count", "shift_hz", "degenerate_tol"},
    "drive": {"frequencies_hz", "phases_deg", "damping_ratio", "axis"},
    "validate": {
        "air_f1_hz", "air_f2_hz", "wet_f1_target_hz", "wet_f2_hz",
        "tolerance_pct", "measured_air_f1_hz", "measured_air_f2_hz",
        "measured_wet_f1_hz", "measured_wet_f2_hz",
        "measured_air_tolerance_pct", "measured_wet_factor",
    },
}
_REPEATABLE = {"layer", "patch_layer", "patch"}


@dataclass
class RunConfig:
    geometry: object
    element_size: float
    boundary: str
    boundary_edge: str | None
    layers: list
    patch_layers: list
    patches: list
    fluid: FluidModel
    char_length: float | None
    mode_count: int
    shift_hz: float
    degenerate_tol: float
    frequencies: list
    phases: list
    damping_ratio: float
    axis: tuple | None
    validate: dict = field(default_factory=dict)

    def body_char_length(self):
        return self.char_length if self.char_length else self.geometry.min_span

    def forward_axis(self):
        """Configured symmetry axis, or the bisector pointing from the
        two-patch corner through the plate center when left on auto."""
        if self.axis is not None:
            return self.axis
        if len(self.patches) != 2:
            return (1.0, 0.0)
        x0, y0, x1, y1 = self.geometry.bounding_box()
        cx, cy = (x0 + x1) / 2.0, (y0 + y1) / 2.0
        mx = my = 0.0
        for p in self.patches:
            px0, py0, px1, py1 = p.footprint
            mx += (px0 + px1) / 4.0
            my += (py0 + py1) / 4.0
        dx, dy = cx - mx, cy - my
        norm = (dx * dx + dy * dy) ** 0.5
        if norm == 0:
            return (1.0, 0.0)
        return (dx / norm, dy / norm)


def _tokenize(text):
    sections = []
    current = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if name not in _SCHEMA:
                raise ParseError(f"unknown section [{name}]", line=lineno)
            current = (name, {}, lineno)
            sections.append(current)
            continue
        if "=" not in line:
            raise ParseError("expected 'key = value'", line=lineno)
        if current is None:
            raise ParseError("key before any section header", line=lineno)
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _SCHEMA[current[0]]:
            raise ParseError(f"unknown key in [{current[0]}]", line=lineno, key=key)
        if key in current[1]:
            raise ParseError(f"duplicate key in [{current[0]}]", line=lineno, key=key)
        current[1][key] = (value, lineno)
    return sections


def _need_float(table, key, section, lineno, default=None):
    if key not in table:
        if default is not None:
            return default
        raise ParseError(f"[{section}] is missing '{key}'", line=lineno, key=key)
    value, vline = table[key]
    try:
        return float(value)
    except ValueError as exc:
        raise ParseError(f"expected a number, got '{value}'", line=vline, key=key) from exc


def _float_list(table, key, section, lineno):
    if key not in table:
        raise ParseError(f"[{section}] is missing '{key}'", line=lineno, key=key)
    value, vline = table[key]
    try:
        items = [float(v) for v in value.split(",") if v.strip()]
    except ValueError as exc:
        raise ParseError(f"expected comma-separated numbers", line=vline, key=key) from exc
    if not items:
        raise ParseError("list must be non-empty", line=vline, key=key)
    return items


def _build_layer(table, section, lineno):
    return Layer(
        thickness=_need_float(table, "thickness", section, lineno),
        density=_need_float(table, "density", section, lineno),
        elastic_modulus=_need_float(table, "elastic_modulus", section, lineno),
        poisson_ratio=_need_float(table, "poisson_ratio", section, lineno),
    )


def parse(text):
    """Parse configuration text into a validated RunConfig."""
    sections = _tokenize(text)
    seen = {}
    layers, patch_layers, patches = [], [], []
    for name, table, lineno in sections:
        if name in _REPEATABLE:
            if name == "layer":
                layers.append(_build_layer(table, name, lineno))
            elif name == "patch_layer":
                patch_layers.append(_build_layer(table, name, lineno))
            else:
                fp = tuple(_need_float(table, k, name, lineno)
                           for k in ("x0", "y0", "x1", "y1"))
                amp = _need_float(table, "amplitude", name, lineno, default=1.0)
                patches.append(ActuatorPatch(footprint=fp, amplitude=amp))
            continue
        if name in seen:
            raise ParseError(f"section [{name}] appears twice", line=lineno)
        seen[name] = (table, lineno)

    if "geometry" not in seen:
        raise ConfigurationError("configuration needs a [geometry] section")
    gtable, gline = seen["geometry"]
    if "planform" not in gtable:
        raise ParseError("[geometry] is missing 'planform'", line=gline)
    planform = gtable["planform"][0]
    if planform == "rectangle":
        geometry = Rectangle(a=_need_float(gtable, "length", "geometry", gline),
                             b=_need_float(gtable, "width", "geometry", gline))
    elif planform == "circle":
        geometry = Circle(radius=_need_float(gtable, "radius", "geometry", gline))
    elif planform == "cross":
        geometry = Cross(
            overall_length=_need_float(gtable, "length", "geometry", gline),
            overall_width=_need_float(gtable, "width", "geometry", gline),
            arm_width=_need_float(gtable, "arm_width", "geometry", gline))
    else:
        raise ParseError(f"unknown planform '{planform}'",
                         line=gtable["planform"][1], key="planform")

    if "mesh" not in seen:
        raise ConfigurationError("configuration needs a [mesh] section")
    element_size = _need_float(seen["mesh"][0], "element_size", "mesh", seen["mesh"][1])

    boundary, edge = "free", None
    if "boundary" in seen:
        btable, bline = seen["boundary"]
        boundary = btable.get("condition", ("free", bline))[0]
        if boundary not in ("free", "simply_supported", "clamped_edge"):
            raise ParseError(f"unknown boundary condition '{boundary}'",
                             line=bline, key="condition")
        if "edge" in btable:
            edge = btable["edge"][0]
        if boundary == "clamped_edge" and edge is None:
            raise ParseError("clamped_edge needs an 'edge'", line=bline)

    if not layers:
        raise ConfigurationError("configuration needs at least one [layer]")

    fluid = FluidModel(density=0.0)
    char_length = None
    if "fluid" in seen:
        ftable, fline = seen["fluid"]
        fluid = FluidModel(
            density=_need_float(ftable, "density", "fluid", fline),
            calibration_factor=_need_float(ftable, "calibration_factor", "fluid",
                                           fline, default=1.0))
        if "char_length" in ftable:
            char_length = _need_float(ftable, "char_length", "fluid", fline)

    mode_count, shift_hz, degenerate_tol = 12, 0.0, 0.02
    if "solver" in seen:
        stable, sline = seen["solver"]
        mode_count = int(_need_float(stable, "mode_count", "solver", sline, default=12))
        shift_hz = _need_float(stable, "shift_hz", "solver", sline, default=0.0)
        degenerate_tol = _need_float(stable, "degenerate_tol", "solver", sline,
                                     default=0.02)

    frequencies, phases, damping, axis = [], [], 0.02, None
    if "drive" in seen:
        dtable, dline = seen["drive"]
        frequencies = _float_list(dtable, "frequencies_hz", "drive", dline)
        phases = _float_list(dtable, "phases_deg", "drive", dline)
        damping = _need_float(dtable, "damping_ratio", "drive", dline, default=0.02)
        if "axis" in dtable:
            parts = _float_list(dtable, "axis", "drive", dline)
            if len(parts) != 2:
                raise ParseError("axis needs two components",
                                 line=dtable["axis"][1], key="axis")
            axis = (parts[0], parts[1])

    validate = {}
    if "validate" in seen:
        vtable, _ = seen["validate"]
        validate = {k: float(v[0]) for k, v in vtable.items()}

    config = RunConfig(
        geometry=geometry, element_size=element_size, boundary=boundary,
        boundary_edge=edge, layers=layers, patch_layers=patch_layers,
        patches=patches, fluid=fluid, char_length=char_length,
        mode_count=mode_count, shift_hz=shift_hz, degenerate_tol=degenerate_tol,
        frequencies=frequencies, phases=phases, damping_ratio=damping,
        axis=axis, validate=validate)
    _check_referential(config)
    return config


def _check_referential(config):
    for p in config.patches:
        x0, y0, x1, y1 = p.footprint
        for cx, cy in ((x0, y0), (x1, y0), (x1, y1), (x0, y1)):
            if not config.geometry.contains(cx, cy):
                raise ConfigurationError(
                    f"patch corner ({cx:g}, {cy:g}) lies outside the planform")
    if config.patches and not config.patch_layers:
        raise ConfigurationError("patches need a [patch_layer] stack")
    for dphi in config.phases:
        if not -180.0 < dphi <= 180.0:
            raise ConfigurationError(
                f"phase difference {dphi:g} outside (-180, 180]")
    for f in config.frequencies:
        if f <= 0:
            raise ConfigurationError(f"drive frequency {f:g} must be > 0")
    if not 0.0 <= config.damping_ratio < 1.0:
        raise ConfigurationError(
            f"damping ratio {config.damping_ratio:g} outside [0, 1)")
    v = config.validate
    if v and "wet_f1_target_hz" in v and "air_f1_hz" in v:
        if not v["wet_f1_target_hz"] < v["air_f1_hz"]:
            raise ConfigurationError(
                "calibration targets out of order: wet target must be below dry")


def parse_file(path):
    with open(path, "r", encoding="utf-8") as fh:
        return parse(fh.read())


def config_digest(text):
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _layer_lines(name, layer):
    return [f"[{name}]",
            f"thickness = {layer.thickness!r}",
            f"density = {layer.density!r}",
            f"elastic_modulus = {layer.elastic_modulus!r}",
            f"poisson_ratio = {layer.poisson_ratio!r}", ""]


def serialize(config: RunConfig):
    """Canonical text form; parse(serialize(parse(t))) == parse(t)."""
    g = config.geometry
    lines = ["[geometry]"]
    if isinstance(g, Rectangle):
        lines += [f"planform = rectangle", f"length = {g.a!r}", f"width = {g.b!r}"]
    elif isinstance(g, Circle):
        lines += [f"planform = circle", f"radius = {g.radius!r}"]
    else:
        lines += [f"planform = cross", f"length = {g.overall_length!r}",
                  f"width = {g.overall_width!r}", f"arm_width = {g.arm_width!r}"]
    lines += ["", "[mesh]", f"element_size = {config.element_size!r}", ""]
    lines += ["[boundary]", f"condition = {config.boundary}"]
    if config.boundary_edge:
        lines.append(f"edge = {config.boundary_edge}")
    lines.append("")
    for layer in config.layers:
        lines += _layer_lines("layer", layer)
    for layer in config.patch_layers:
        lines += _layer_lines("patch_layer", layer)
    for p in config.patches:
        x0, y0, x1, y1 = p.footprint
        lines += ["[patch]", f"x0 = {x0!r}", f"y0 = {y0!r}",
                  f"x1 = {x1!r}", f"y1 = {y1!r}",
                  f"amplitude = {p.amplitude!r}", ""]
    lines += ["[fluid]", f"density = {config.fluid.density!r}",
              f"calibration_factor = {config.fluid.calibration_factor!r}"]
    if config.char_length is not None:
        lines.append(f"char_length = {config.char_length!r}")
    lines += ["", "[solver]", f"mode_count = {config.mode_count}",
              f"shift_hz = {config.shift_hz!r}",
              f"degenerate_tol = {config.degenerate_tol!r}", ""]
    if config.frequencies:
        lines += ["[drive]",
                  "frequencies_hz = " + ",".join(repr(f) for f in config.frequencies),
                  "phases_deg = " + ",".join(repr(p) for p in config.phases),
                  f"damping_ratio = {config.damping_ratio!r}"]
        if config.axis is not None:
            lines.append(f"axis = {config.axis[0]!r},{config.axis[1]!r}")
        lines.append("")
    if config.validate:
        lines.append("[validate]")
        lines += [f"{k} = {v!r}" for k, v in sorted(config.validate.items())]
        lines.append("")
    return "\n".join(lines)
