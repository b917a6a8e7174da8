"""Scenario configuration: JSON files validated against a schema.

All lengths in a config (delta, sigma, alpha, gamma, windows, positions) are
in wavelengths; ``wave.k`` is the wavenumber in inverse length units. Missing
keys are filled from ``DEFAULTS`` before validation.
"""

import copy
import json
import math

import jsonschema

DEFAULTS = {
    "wave": {"k": 1.0},
    "incident": {"type": "plane", "angle": 5 * math.pi / 13, "position": [0.0, 0.0]},
    "geometry": {"delta": 10.0, "sigma": None, "nodes": "auto", "orientation": math.pi / 2},
    "method": {
        "name": "green",
        "M": "auto",
        "M_multiplier": 1,
        "compare": [],
        "svd": {
            "alpha": None,
            "gamma": None,
            "n_alpha": None,
            "n_gamma": None,
            "weight_ratio": 1.0,
            "rel_cutoff": 1e-12,
        },
        "virtual": {"position": [0.2, 0.1], "amplitude": 1.0},
    },
    "scatterer": {
        "type": "none",
        "size": 0.8,
        "center": [0.0, 0.0],
        "n_src": 256,
        "src_shrink": None,
    },
    "outputs": {"grids": [], "metrics": True, "image": False, "coefficients": True, "betas": []},
    "sweep": {"deltas": [], "methods": ["green"], "multipliers": [1], "workers": 1},
}

_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_point = {"type": "array", "items": _num, "minItems": 2, "maxItems": 2}
_opt_pos = {"anyOf": [_pos, {"type": "null"}]}
_opt_count = {"anyOf": [{"type": "integer", "minimum": 2}, {"type": "null"}]}
_method_name = {"enum": ["green", "svd", "illusion"]}
_field_name = {"enum": ["incident", "device", "total", "scattered", "total_scatterer", "interior"]}


def _obj(props, required=()):
    return {
        "type": "object",
        "properties": props,
        "required": list(required),
        "additionalProperties": False,
    }


SCHEMA = _obj(
    {
        "wave": _obj({"k": _pos}, ["k"]),
        "incident": _obj(
            {"type": {"enum": ["plane", "point"]}, "angle": _num, "position": _point}, ["type"]
        ),
        "geometry": _obj(
            {
                "delta": _pos,
                "sigma": _opt_pos,
                "nodes": {"anyOf": [{"type": "integer", "minimum": 8}, {"const": "auto"}]},
                "orientation": _num,
            },
            ["delta"],
        ),
        "method": _obj(
            {
                "name": _method_name,
                "M": {"anyOf": [{"type": "integer", "minimum": 0}, {"const": "auto"}]},
                "M_multiplier": {"type": "integer", "minimum": 1},
                "compare": {"type": "array", "items": _method_name},
                "svd": _obj(
                    {
                        "alpha": _opt_pos,
                        "gamma": _opt_pos,
                        "n_alpha": _opt_count,
                        "n_gamma": _opt_count,
                        "weight_ratio": _pos,
                        "rel_cutoff": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                    }
                ),
                "virtual": _obj({"position": _point, "amplitude": _num}),
            },
            ["name"],
        ),
        "scatterer": _obj(
            {
                "type": {"enum": ["none", "kite", "circle"]},
                "size": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                "center": _point,
                "n_src": {"type": "integer", "minimum": 16},
                "src_shrink": {
                    "anyOf": [
                        {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                        {"type": "null"},
                    ]
                },
            },
            ["type"],
        ),
        "outputs": _obj(
            {
                "grids": {
                    "type": "array",
                    "items": _obj(
                        {
                            "name": {"type": "string", "pattern": "^[A-Za-z0-9_-]+$"},
                            "window": {"type": "array", "items": _num, "minItems": 4, "maxItems": 4},
                            "resolution": {
                                "type": "array",
                                "items": {"type": "integer", "minimum": 2},
                                "minItems": 2,
                                "maxItems": 2,
                            },
                            "fields": {"type": "array", "items": _field_name, "minItems": 1},
                        },
                        ["name", "window", "resolution", "fields"],
                    ),
                },
                "metrics": {"type": "boolean"},
                "image": {"type": "boolean"},
                "coefficients": {"type": "boolean"},
                "betas": {"type": "array", "items": _pos},
            }
        ),
        "sweep": _obj(
            {
                "deltas": {"type": "array", "items": _pos},
                "methods": {"type": "array", "items": _method_name},
                "multipliers": {"type": "array", "items": {"type": "integer", "minimum": 1}},
                "workers": {"type": "integer", "minimum": 1},
            }
        ),
    }
)


class ConfigError(ValueError):
    """Invalid scenario configuration; the message names the offending key."""


def _merge(base, over):
    out = copy.deepcopy(base)
    for key, val in over.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = copy.deepcopy(val)
    return out


def parse_override(text):
    """Split ``a.b.c=value``; the value is parsed as JSON when possible."""
    if "=" not in text:
        raise ConfigError(f"override {text!r} is not of the form key=value")
    key, raw = text.split("=", 1)
    path = [p for p in key.strip().split(".") if p]
    if not path:
        raise ConfigError(f"override {text!r} has an empty key")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return path, value


def _step(node, part, where):
    if isinstance(node, list):
        try:
            return int(part)
        except ValueError:
            raise ConfigError(f"override key {where!r} needs a list index") from None
    if isinstance(node, dict):
        return part
    raise ConfigError(f"override key {where!r} is not a section")


def apply_override(cfg, path, value):
    """Set ``cfg[path[0]][path[1]]...``; integer parts index into lists."""
    node = cfg
    for i, part in enumerate(path):
        where = ".".join(path[:i + 1])
        key = _step(node, part, where)
        if i == len(path) - 1:
            try:
                node[key] = value
            except IndexError:
                raise ConfigError(f"override key {where!r} is out of range") from None
            return
        try:
            node = node[key]
        except (KeyError, IndexError):
            raise ConfigError(f"override key {where!r} does not exist") from None


def validate(cfg):
    try:
        jsonschema.validate(cfg, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = ".".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"invalid config at {where}: {exc.message}") from None
    for i, g in enumerate(cfg["outputs"]["grids"]):
        x0, x1, y0, y1 = g["window"]
        if not (x1 > x0 and y1 > y0):
            raise ConfigError(f"invalid config at outputs.grids.{i}.window: need x_min < x_max, y_min < y_max")
    return cfg


def load_config(source=None, overrides=()):
    """Merge defaults, a config (path, dict or None) and ``key=value`` overrides."""
    if source is None:
        user = {}
    elif isinstance(source, dict):
        user = source
    else:
        try:
            with open(source) as fh:
                user = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {source!r}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {source!r} is not valid JSON: {exc}") from None
    if not isinstance(user, dict):
        raise ConfigError("config must be a JSON object")
    cfg = _merge(DEFAULTS, user)
    for text in overrides:
        path, value = parse_override(text)
        apply_override(cfg, path, value)
    return validate(cfg)
