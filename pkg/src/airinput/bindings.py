"""Gesture-to-input translation: profiles, actions, input commands.

A profile is a map from event selectors to actions. Selectors are
matched most-specific first: "source.kind:label", "source.kind",
"kind:label", then "kind". The source form exists because one kind can
carry different payloads per module (hand cursor moves are absolute,
head cursor moves are velocity deltas).

Holding actions (key_hold, mouse press) bind to the entering half of a
paired kind; the leaving half releases them automatically, so a single
profile line expresses hold-while-active.
"""

import json
from dataclasses import dataclass
from importlib import resources
from typing import Dict, List, Mapping, Optional

from airinput import events as ev
from airinput.errors import ConfigError
from airinput.events import GestureEvent

KEY_DOWN = "key_down"
KEY_UP = "key_up"
MOUSE_DOWN = "mouse_down"
MOUSE_UP = "mouse_up"
MOUSE_MOVE_ABS = "mouse_move_abs"
MOUSE_MOVE_REL = "mouse_move_rel"
WHEEL = "wheel"

MOUSE_BUTTONS = ("left", "right", "middle")

# entering kind -> leaving kind for hold-style actions
PAIRED = {
    ev.ACTIVATE: ev.DEACTIVATE,
    ev.PINCH_PRESS: ev.PINCH_RELEASE,
    ev.MOUTH_OPEN: ev.MOUTH_CLOSE,
    ev.IDLE_EXIT: ev.IDLE_ENTER,
}
LEAVING = {v: k for k, v in PAIRED.items()}


@dataclass(frozen=True)
class InputCommand:
    """One synthetic input operation. key doubles as the button name
    for mouse_down/mouse_up so the log schema stays flat."""

    t_ms: float
    cmd: str
    key: Optional[str] = None
    x: Optional[float] = None
    y: Optional[float] = None
    delta: Optional[int] = None

    def as_dict(self) -> dict:
        t = self.t_ms
        if isinstance(t, float) and t.is_integer():
            t = int(t)  # fixtures carry integer ms; keep logs bit-stable
        d = {"t": t, "cmd": self.cmd}
        if self.key is not None:
            d["key"] = self.key
        if self.x is not None:
            d["x"] = int(round(self.x))
            d["y"] = int(round(self.y))
        if self.delta is not None:
            d["delta"] = self.delta
        return d


_ACTION_KINDS = ("key_tap", "key_hold", "mouse_button", "wheel",
                 "cursor_absolute", "cursor_relative")


def _base_kind(selector: str) -> str:
    kind = selector.split(":", 1)[0]
    return kind.split(".", 1)[1] if "." in kind else kind


def _validate_action(selector: str, action: Mapping) -> dict:
    a = dict(action)
    kind = a.get("action")
    if kind not in _ACTION_KINDS:
        raise ConfigError(f"binding {selector!r}: unknown action {kind!r}")
    if kind in ("key_tap", "key_hold"):
        key = a.get("key")
        if not isinstance(key, str) or not key:
            raise ConfigError(f"binding {selector!r}: {kind} needs a key name")
    if kind == "key_hold" and _base_kind(selector) not in PAIRED:
        raise ConfigError(
            f"binding {selector!r}: key_hold must bind to a paired kind "
            f"({', '.join(sorted(PAIRED))})")
    if kind == "mouse_button":
        if a.get("button") not in MOUSE_BUTTONS:
            raise ConfigError(f"binding {selector!r}: bad mouse button")
        mode = a.setdefault("mode", "click")
        if mode not in ("press", "release", "click", "double"):
            raise ConfigError(f"binding {selector!r}: bad mouse mode {mode!r}")
        if mode == "press" and _base_kind(selector) not in PAIRED:
            raise ConfigError(
                f"binding {selector!r}: mouse press must bind to a paired kind")
    if kind == "wheel":
        scale = a.setdefault("scale", 1.0)
        if not isinstance(scale, (int, float)) or isinstance(scale, bool):
            raise ConfigError(f"binding {selector!r}: wheel scale must be a number")
    if kind == "cursor_relative":
        gain = a.setdefault("gain", 1.0)
        if not isinstance(gain, (int, float)) or isinstance(gain, bool):
            raise ConfigError(f"binding {selector!r}: cursor gain must be a number")
    return a


class Profile:
    """Validated selector -> action table."""

    def __init__(self, name: str, bindings: Mapping[str, Mapping]):
        self.name = name
        self.bindings: Dict[str, dict] = {}
        for selector, action in bindings.items():
            base = _base_kind(selector)
            if base not in ev.KINDS:
                raise ConfigError(f"binding {selector!r}: unknown event kind {base!r}")
            self.bindings[selector] = _validate_action(selector, action)

    @staticmethod
    def from_dict(doc: Mapping) -> "Profile":
        if "name" not in doc or "bindings" not in doc:
            raise ConfigError("profile document needs 'name' and 'bindings'")
        return Profile(doc["name"], doc["bindings"])

    @staticmethod
    def from_file(path: str) -> "Profile":
        with open(path, "r", encoding="utf-8") as fh:
            return Profile.from_dict(json.load(fh))

    def as_dict(self) -> dict:
        return {"name": self.name, "bindings": self.bindings}

    def lookup(self, event: GestureEvent) -> Optional[dict]:
        label = event.label
        candidates = []
        if label is not None:
            candidates.append(f"{event.source}.{event.kind}:{label}")
        candidates.append(f"{event.source}.{event.kind}")
        if label is not None:
            candidates.append(f"{event.kind}:{label}")
        candidates.append(event.kind)
        for sel in candidates:
            if sel in self.bindings:
                return self.bindings[sel]
        return None

    def _lookup_entering_twin(self, event: GestureEvent) -> Optional[dict]:
        enter_kind = LEAVING.get(event.kind)
        if enter_kind is None:
            return None
        twin = GestureEvent(event.t_ms, event.source, enter_kind,
                            label=event.label, data=event.data)
        return self.lookup(twin)


def bind(event: GestureEvent, profile: Profile) -> List[InputCommand]:
    """Pure translation of one event; unbound events produce nothing."""
    t = event.t_ms
    action = profile.lookup(event)
    entering = event.kind in PAIRED
    leaving = event.kind in LEAVING

    if action is None:
        if leaving:
            # entering half held something: release it
            twin = profile._lookup_entering_twin(event)
            if twin is not None:
                if twin["action"] == "key_hold":
                    return [InputCommand(t, KEY_UP, key=twin["key"])]
                if twin["action"] == "mouse_button" and twin["mode"] == "press":
                    return [InputCommand(t, MOUSE_UP, key=twin["button"])]
        return []

    kind = action["action"]
    if kind == "key_tap":
        if leaving:
            return []
        return [InputCommand(t, KEY_DOWN, key=action["key"]),
                InputCommand(t, KEY_UP, key=action["key"])]
    if kind == "key_hold":
        if entering:
            return [InputCommand(t, KEY_DOWN, key=action["key"])]
        if leaving:
            return [InputCommand(t, KEY_UP, key=action["key"])]
        return []
    if kind == "mouse_button":
        b = action["button"]
        mode = action["mode"]
        if mode == "press":
            if entering:
                return [InputCommand(t, MOUSE_DOWN, key=b)]
            if leaving:
                return [InputCommand(t, MOUSE_UP, key=b)]
            return []
        if mode == "release":
            return [InputCommand(t, MOUSE_UP, key=b)]
        if leaving:
            return []
        pair = [InputCommand(t, MOUSE_DOWN, key=b), InputCommand(t, MOUSE_UP, key=b)]
        return pair * 2 if mode == "double" else pair
    if kind == "wheel":
        notches = event.data.get("delta")
        if notches is None:
            return []
        delta = int(round(notches * action["scale"]))
        if delta == 0:
            return []
        return [InputCommand(t, WHEEL, delta=delta)]
    if kind == "cursor_absolute":
        if "x" not in event.data:
            return []
        return [InputCommand(t, MOUSE_MOVE_ABS, x=event.data["x"], y=event.data["y"])]
    if kind == "cursor_relative":
        if "dx" not in event.data:
            return []
        g = action["gain"]
        return [InputCommand(t, MOUSE_MOVE_REL,
                             x=event.data["dx"] * g, y=event.data["dy"] * g)]
    return []


def shipped_profile_names() -> List[str]:
    names = []
    for entry in resources.files("airinput").joinpath("profiles").iterdir():
        if entry.name.endswith(".json"):
            names.append(entry.name[:-5])
    return sorted(names)


def load_profile(name_or_path: str) -> Profile:
    """Shipped profile by name, or any profile JSON by path."""
    if name_or_path.endswith(".json"):
        return Profile.from_file(name_or_path)
    pkg = resources.files("airinput").joinpath("profiles", name_or_path + ".json")
    if not pkg.is_file():
        raise ConfigError(f"unknown profile {name_or_path!r} "
                          f"(shipped: {', '.join(shipped_profile_names())})")
    return Profile.from_dict(json.loads(pkg.read_text(encoding="utf-8")))
