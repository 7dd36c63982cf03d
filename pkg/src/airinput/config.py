"""Engine configuration: schema, defaults, validation, field editing.

The config is a plain nested dict mirroring one human-editable YAML
document. Every leaf is declared in FIELD_SPECS with its type, default
and bounds; the same table drives file loading, control-protocol edits,
and the panel's form generation, so they can never disagree.
"""

import copy
from dataclasses import dataclass
from typing import Any, Dict, Mapping, Optional, Tuple

import yaml

from airinput.errors import ConfigError

MODULE_SOURCES = ("hand", "gaze", "head")


@dataclass(frozen=True)
class FieldSpec:
    type: str                      # bool | int | float | str | source_list
    default: Any
    min: Optional[float] = None
    max: Optional[float] = None
    choices: Optional[Tuple[str, ...]] = None
    nullable: bool = False


FIELD_SPECS: Dict[str, FieldSpec] = {
    "modules.hand": FieldSpec("bool", True),
    "modules.head": FieldSpec("bool", False),
    "modules.gaze": FieldSpec("bool", False),
    "modules.exercise": FieldSpec("bool", False),
    "mode": FieldSpec("str", "sitting", choices=("sitting", "standing")),
    "max_range_mm": FieldSpec("float", 2000.0, min=1e-9),
    "profile": FieldSpec("str", "creativity"),
    "cursor_priority": FieldSpec("source_list", list(MODULE_SOURCES)),

    "screen.width_px": FieldSpec("int", 1920, min=1),
    "screen.height_px": FieldSpec("int", 1080, min=1),
    "screen.width_mm": FieldSpec("float", 600.0, min=1e-9),
    "screen.height_mm": FieldSpec("float", 340.0, min=1e-9),
    "screen.camera_offset_x_mm": FieldSpec("float", 0.0),
    "screen.camera_offset_y_mm": FieldSpec("float", 0.0),

    "camera.f_px": FieldSpec("float", None, min=1e-9, nullable=True),
    "camera.cx": FieldSpec("float", None, nullable=True),
    "camera.cy": FieldSpec("float", None, nullable=True),

    "hand.cursor_hand": FieldSpec("str", "right", choices=("left", "right")),
    "hand.pinch_on": FieldSpec("float", 0.35, min=0.0),
    "hand.pinch_off": FieldSpec("float", 0.45, min=0.0),
    "hand.idle_hold_ms": FieldSpec("float", 300.0, min=0.0),
    "hand.c_scale": FieldSpec("float", 3.0, min=1e-9),
    "hand.angle_extended_deg": FieldSpec("float", 160.0, min=0.0, max=180.0),
    "hand.angle_bent_deg": FieldSpec("float", 130.0, min=0.0, max=180.0),
    "hand.scroll_gain": FieldSpec("float", 8.0, min=0.0),
    "hand.fc_min": FieldSpec("float", 1.0, min=1e-9),
    "hand.beta": FieldSpec("float", 0.5, min=0.0),
    "hand.d_cutoff": FieldSpec("float", 1.0, min=1e-9),

    "head.ear_on": FieldSpec("float", 0.20, min=0.0),
    "head.ear_off": FieldSpec("float", 0.25, min=0.0),
    "head.mar_on": FieldSpec("float", 0.55, min=0.0),
    "head.mar_off": FieldSpec("float", 0.45, min=0.0),
    "head.blink_frames": FieldSpec("int", 2, min=1),
    "head.wink_frames": FieldSpec("int", 3, min=1),
    "head.profile_enter_deg": FieldSpec("float", 25.0, min=0.0, max=90.0),
    "head.profile_exit_deg": FieldSpec("float", 20.0, min=0.0, max=90.0),
    "head.profile_hold_ms": FieldSpec("float", 200.0, min=0.0),
    "head.mode": FieldSpec("str", "triggers-only",
                           choices=("cursor", "scroll", "triggers-only")),
    "head.cursor_gain": FieldSpec("float", 12.0, min=0.0),
    "head.deadzone_deg": FieldSpec("float", 3.0, min=0.0),
    "head.scroll_threshold_deg": FieldSpec("float", 10.0, min=0.0),
    "head.scroll_rate": FieldSpec("float", 4.0, min=0.0),

    "gaze.iris_gain_deg": FieldSpec("float", 20.0, min=0.0),
    "gaze.default_depth_mm": FieldSpec("float", 600.0, min=1e-9),
    "gaze.iris_mm": FieldSpec("float", 11.7, min=1e-9),
    "gaze.palm_k": FieldSpec("float", None, min=1e-9, nullable=True),
    "gaze.fc_min": FieldSpec("float", 1.0, min=1e-9),
    "gaze.beta": FieldSpec("float", 0.5, min=0.0),
    "gaze.d_cutoff": FieldSpec("float", 1.0, min=1e-9),

    "exercise.squat_enter_deg": FieldSpec("float", 100.0, min=0.0, max=180.0),
    "exercise.squat_exit_deg": FieldSpec("float", 160.0, min=0.0, max=180.0),
    "exercise.jump_rise_frac": FieldSpec("float", 0.25, min=1e-9),
    "exercise.punch_low": FieldSpec("float", 0.6, min=0.0, max=1.0),
    "exercise.punch_high": FieldSpec("float", 0.9, min=0.0, max=1.0),
    "exercise.punch_within_ms": FieldSpec("float", 300.0, min=0.0),
    "exercise.kick_rise_frac": FieldSpec("float", 0.5, min=1e-9),
    "exercise.cycle_band_deg": FieldSpec("float", 5.0, min=1e-9),
    "exercise.template_on": FieldSpec("float", 0.8, min=0.0, max=1.0),
    "exercise.template_off": FieldSpec("float", 0.7, min=0.0, max=1.0),
}

# predicates that span more than one field, checked after merging
_CROSS_CHECKS = (
    (lambda c: c["hand"]["pinch_on"] < c["hand"]["pinch_off"],
     "hand.pinch_on must be < hand.pinch_off"),
    (lambda c: c["hand"]["angle_bent_deg"] < c["hand"]["angle_extended_deg"],
     "hand.angle_bent_deg must be < hand.angle_extended_deg"),
    (lambda c: c["head"]["ear_on"] < c["head"]["ear_off"],
     "head.ear_on must be < head.ear_off"),
    (lambda c: c["head"]["mar_on"] > c["head"]["mar_off"],
     "head.mar_on must be > head.mar_off"),
    (lambda c: c["head"]["profile_exit_deg"] < c["head"]["profile_enter_deg"],
     "head.profile_exit_deg must be < head.profile_enter_deg"),
    (lambda c: c["exercise"]["squat_enter_deg"] < c["exercise"]["squat_exit_deg"],
     "exercise.squat_enter_deg must be < exercise.squat_exit_deg"),
    (lambda c: c["exercise"]["punch_low"] < c["exercise"]["punch_high"],
     "exercise.punch_low must be < exercise.punch_high"),
    (lambda c: c["exercise"]["template_off"] < c["exercise"]["template_on"],
     "exercise.template_off must be < exercise.template_on"),
    # keeps a half-specified pinhole model from slipping past validation
    # and failing only when the engine rebuilds its camera
    (lambda c: c["camera"]["f_px"] is None
     or (c["camera"]["cx"] is not None and c["camera"]["cy"] is not None),
     "camera.cx and camera.cy are required with camera.f_px"),
    (lambda c: any(c["modules"].values()),
     "at least one module must be enabled"),
)


def default_config() -> dict:
    cfg: dict = {}
    for path, spec in FIELD_SPECS.items():
        node = cfg
        parts = path.split(".")
        for p in parts[:-1]:
            node = node.setdefault(p, {})
        node[parts[-1]] = copy.deepcopy(spec.default)
    return cfg


def _check_value(path: str, spec: FieldSpec, value: Any) -> Any:
    if value is None:
        if spec.nullable:
            return None
        raise ConfigError(f"{path} must not be null")
    if spec.type == "bool":
        if not isinstance(value, bool):
            raise ConfigError(f"{path} must be a boolean")
        return value
    if spec.type == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{path} must be an integer")
    elif spec.type == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{path} must be a number")
        value = float(value)
    elif spec.type == "str":
        if not isinstance(value, str):
            raise ConfigError(f"{path} must be a string")
        if spec.choices and value not in spec.choices:
            raise ConfigError(f"{path} must be one of {', '.join(spec.choices)}")
    elif spec.type == "source_list":
        if (not isinstance(value, list)
                or sorted(value) != sorted(MODULE_SOURCES)):
            raise ConfigError(
                f"{path} must be a permutation of {', '.join(MODULE_SOURCES)}")
        return list(value)
    if spec.min is not None and value < spec.min:
        if spec.min == 1e-9:
            raise ConfigError(f"{path} must be > 0")
        raise ConfigError(f"{path} must be >= {spec.min}")
    if spec.max is not None and value > spec.max:
        raise ConfigError(f"{path} must be <= {spec.max}")
    return value


def _walk(doc: Mapping, prefix: str, out: Dict[str, Any]) -> None:
    for key, value in doc.items():
        if not isinstance(key, str):
            raise ConfigError(f"non-string key {key!r} in config")
        path = f"{prefix}{key}"
        if isinstance(value, Mapping):
            if not any(p.startswith(path + ".") for p in FIELD_SPECS):
                raise ConfigError(f"unknown config section {path!r}")
            _walk(value, path + ".", out)
        else:
            out[path] = value


def validate_config(doc: Optional[Mapping]) -> dict:
    """Fill defaults, check every field, return a normalized config."""
    flat: Dict[str, Any] = {}
    if doc:
        _walk(doc, "", flat)
    cfg = default_config()
    for path, value in flat.items():
        spec = FIELD_SPECS.get(path)
        if spec is None:
            raise ConfigError(f"unknown config field {path!r}")
        node = cfg
        parts = path.split(".")
        for p in parts[:-1]:
            node = node[p]
        node[parts[-1]] = _check_value(path, spec, value)
    for check, message in _CROSS_CHECKS:
        if not check(cfg):
            raise ConfigError(message)
    _check_profile_exists(cfg["profile"])
    return cfg


def _check_profile_exists(name: str) -> None:
    import os

    from airinput.bindings import shipped_profile_names

    if name.endswith(".json"):
        if not os.path.isfile(name):
            raise ConfigError(f"profile file {name!r} does not exist")
    elif name not in shipped_profile_names():
        raise ConfigError(
            f"unknown profile {name!r} "
            f"(shipped: {', '.join(shipped_profile_names())})")


def load_config(text: Optional[str]) -> dict:
    """Parse one YAML document and validate it. Empty text means all
    defaults."""
    doc = yaml.safe_load(text) if text else None
    if doc is not None and not isinstance(doc, Mapping):
        raise ConfigError("config document must be a mapping")
    return validate_config(doc)


def load_config_file(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return load_config(fh.read())


def get_field(cfg: Mapping, path: str) -> Any:
    if path not in FIELD_SPECS:
        raise ConfigError(f"unknown config field {path!r}")
    node = cfg
    for p in path.split("."):
        node = node[p]
    return node


def set_field(cfg: Mapping, path: str, value: Any) -> dict:
    """Copy-on-write single-field edit with full revalidation."""
    spec = FIELD_SPECS.get(path)
    if spec is None:
        raise ConfigError(f"unknown config field {path!r}")
    new = copy.deepcopy(dict(cfg))
    node = new
    parts = path.split(".")
    for p in parts[:-1]:
        node = node[p]
    node[parts[-1]] = _check_value(path, spec, value)
    for check, message in _CROSS_CHECKS:
        if not check(new):
            raise ConfigError(message)
    if path == "profile":
        _check_profile_exists(new["profile"])
    return new


def exercise_section(cfg: Mapping) -> dict:
    """The exercise tracker also needs the top-level sitting/standing
    mode; merge it into its section view."""
    section = dict(cfg["exercise"])
    section["mode"] = cfg["mode"]
    return section
