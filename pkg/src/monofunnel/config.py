"""Run configuration: flat dotted keys, one `key = value` per line.

Lines starting with # are comments.  Every key has a typed default;
unknown and duplicate keys are errors.  Parsing collects all problems
and reports them together, each with its line number, instead of
stopping at the first one.  render_config writes a dict back out in a
form that parses to the same values.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import ModelParams
from .funnel import FunnelSpec, ControllerConfig
from .integrate import IntegratorConfig

__all__ = [
    "ConfigError",
    "SCHEMA",
    "default_config",
    "parse_config",
    "load_config",
    "apply_overrides",
    "render_config",
    "parse_windows",
    "parse_times",
    "model_params",
    "funnel_spec",
    "controller_config",
    "integrator_config",
]


class ConfigError(ValueError):
    """One or more invalid configuration entries."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("\n".join(self.errors))


@dataclass(frozen=True)
class _Key:
    default: object
    kind: str  # float | int | bool | str


SCHEMA = {
    "domain.lx": _Key(1.0, "float"),
    "domain.ly": _Key(1.0, "float"),
    "model.c1": _Key(1.614, "float"),
    "model.c2": _Key(0.1403, "float"),
    "model.c3": _Key(0.012, "float"),
    "model.c4": _Key(0.00015, "float"),
    "model.c5": _Key(0.015, "float"),
    "model.d11": _Key(0.015, "float"),
    "model.d12": _Key(0.0, "float"),
    "model.d22": _Key(0.015, "float"),
    "mesh.nx": _Key(64, "int"),
    "mesh.ny": _Key(64, "int"),
    "modes.x": _Key(20, "int"),
    "modes.y": _Key(20, "int"),
    "modes.quad_points": _Key(0, "int"),  # 0 picks the default rule
    "funnel.gamma": _Key(0.05, "float"),
    "funnel.tau": _Key(100.0, "float"),
    "controller.k0": _Key(0.75, "float"),
    "controller.guard_margin": _Key(1.0 - 1e-9, "float"),
    "integrator.rtol": _Key(1e-3, "float"),
    "integrator.atol": _Key(1e-6, "float"),
    "integrator.dt_init": _Key(1e-3, "float"),
    "integrator.dt_min": _Key(1e-12, "float"),
    "integrator.dt_max": _Key(1.0, "float"),
    "integrator.safety": _Key(0.9, "float"),
    "integrator.max_rejects": _Key(50, "int"),
    "stimulus.amplitude": _Key(101.0, "float"),
    "stimulus.center_x": _Key(0.5, "float"),
    "stimulus.center_y": _Key(0.5, "float"),
    "stimulus.r_sq": _Key(0.0225, "float"),
    "stimulus.windows": _Key("49:51,299:301", "str"),
    "stimulus.halfwidth": _Key(0.5, "float"),
    "reentry.s1_amplitude": _Key(101.0, "float"),
    "reentry.s1_xmax": _Key(0.1, "float"),
    "reentry.s1_start": _Key(0.0, "float"),
    "reentry.s1_duration": _Key(1.0, "float"),
    "reentry.s2_amplitude": _Key(101.0, "float"),
    "reentry.s2_xmax": _Key(0.5, "float"),
    "reentry.s2_ymax": _Key(0.5, "float"),
    "reentry.s2_start": _Key(70.0, "float"),
    "reentry.s2_duration": _Key(1.0, "float"),
    "reentry.halfwidth": _Key(0.25, "float"),
    "reentry.snapshot_time": _Key(100.0, "float"),
    "reentry.hold": _Key(50.0, "float"),
    "reentry.activity_floor": _Key(0.05, "float"),
    "reentry.floor_fraction": _Key(0.01, "float"),
    "run.t_end": _Key(400.0, "float"),
    "run.sample_dt": _Key(0.1, "float"),
    "run.track_stimulus": _Key(True, "bool"),
    "run.snapshot_times": _Key("", "str"),
}

_POSITIVE_INTS = ("mesh.nx", "mesh.ny", "modes.x", "modes.y")
_POSITIVE_FLOATS = ("run.t_end", "run.sample_dt")


def default_config():
    return {key: spec.default for key, spec in SCHEMA.items()}


def _coerce(key, raw, where, errors):
    spec = SCHEMA[key]
    raw = raw.strip()
    if spec.kind == "str":
        return raw
    if spec.kind == "bool":
        if raw == "true":
            return True
        if raw == "false":
            return False
        errors.append(f"{where}: {key} expects true or false, got {raw!r}")
        return spec.default
    try:
        if spec.kind == "int":
            value = int(raw)
        else:
            value = float(raw)
    except ValueError:
        errors.append(f"{where}: {key} expects {spec.kind}, got {raw!r}")
        return spec.default
    if key in _POSITIVE_INTS and value < 1:
        errors.append(f"{where}: {key} must be at least 1")
    if key in _POSITIVE_FLOATS and not value > 0.0:
        errors.append(f"{where}: {key} must be positive")
    if key == "modes.quad_points" and value < 0:
        errors.append(f"{where}: {key} must be nonnegative")
    return value


def parse_config(text, source="<config>"):
    """Parse config text into a full values dict, defaults filled in."""
    values = default_config()
    seen = set()
    errors = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        where = f"{source}:{lineno}"
        if "=" not in stripped:
            errors.append(f"{where}: expected key = value")
            continue
        key, _, raw = stripped.partition("=")
        key = key.strip()
        if key not in SCHEMA:
            errors.append(f"{where}: unknown key {key!r}")
            continue
        if key in seen:
            errors.append(f"{where}: duplicate key {key!r}")
            continue
        seen.add(key)
        values[key] = _coerce(key, raw, where, errors)
    if errors:
        raise ConfigError(errors)
    return values


def load_config(path):
    with open(path, "r") as handle:
        return parse_config(handle.read(), source=str(path))


def apply_overrides(values, overrides):
    """Apply {key: raw string} overrides with the same coercion rules."""
    out = dict(values)
    errors = []
    for key, raw in overrides.items():
        if key not in SCHEMA:
            errors.append(f"override: unknown key {key!r}")
            continue
        out[key] = _coerce(key, str(raw), "override", errors)
    if errors:
        raise ConfigError(errors)
    return out


def _render_value(key, value):
    kind = SCHEMA[key].kind
    if kind == "bool":
        return "true" if value else "false"
    if kind == "float":
        return repr(float(value))
    return str(value)


def render_config(values):
    """Write values back out; parsing the result reproduces them."""
    lines = []
    for key in SCHEMA:
        lines.append(f"{key} = {_render_value(key, values[key])}")
    return "\n".join(lines) + "\n"


def parse_windows(raw):
    """Parse 'a:b,c:d' into ((a, b), (c, d)); an empty string is ()."""
    raw = raw.strip()
    if not raw:
        return ()
    windows = []
    for part in raw.split(","):
        bits = part.split(":")
        if len(bits) != 2:
            raise ConfigError([f"window {part!r} is not start:end"])
        try:
            a, b = float(bits[0]), float(bits[1])
        except ValueError:
            raise ConfigError([f"window {part!r} is not numeric"]) from None
        if not a < b:
            raise ConfigError([f"window {part!r} must have start < end"])
        windows.append((a, b))
    return tuple(windows)


def parse_times(raw):
    """Parse a comma-separated list of times; empty string is ()."""
    raw = raw.strip()
    if not raw:
        return ()
    try:
        return tuple(float(p) for p in raw.split(","))
    except ValueError:
        raise ConfigError([f"bad time list {raw!r}"]) from None


def model_params(values):
    return ModelParams(
        c1=values["model.c1"], c2=values["model.c2"],
        c3=values["model.c3"], c4=values["model.c4"],
        c5=values["model.c5"], d11=values["model.d11"],
        d12=values["model.d12"], d22=values["model.d22"])


def funnel_spec(values):
    return FunnelSpec(gamma=values["funnel.gamma"],
                      tau=values["funnel.tau"])


def controller_config(values):
    return ControllerConfig(k0=values["controller.k0"],
                            guard_margin=values["controller.guard_margin"])


def integrator_config(values):
    return IntegratorConfig(
        rtol=values["integrator.rtol"], atol=values["integrator.atol"],
        dt_init=values["integrator.dt_init"],
        dt_min=values["integrator.dt_min"],
        dt_max=values["integrator.dt_max"],
        safety=values["integrator.safety"],
        max_rejects=values["integrator.max_rejects"])
