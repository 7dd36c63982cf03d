"""Gesture events: the semantic layer between recognition and bindings.

Modules emit GestureEvent values; the binding layer turns them into
input commands. Kinds are plain strings so binding selectors can be
written as "kind" or "kind:label" in profile files.
"""

from dataclasses import dataclass, field
from typing import Any, Mapping, Optional

CURSOR_MOVE = "cursor_move"
PINCH_PRESS = "pinch_press"
PINCH_RELEASE = "pinch_release"
BLINK = "blink"
WINK_LEFT = "wink_left"
WINK_RIGHT = "wink_right"
MOUTH_OPEN = "mouth_open"
MOUTH_CLOSE = "mouth_close"
PROFILE_LEFT = "profile_left"
PROFILE_RIGHT = "profile_right"
SCROLL = "scroll"
SQUAT_REP = "squat_rep"
JUMP_REP = "jump_rep"
PUNCH_LEFT = "punch_left"
PUNCH_RIGHT = "punch_right"
KICK_LEFT = "kick_left"
KICK_RIGHT = "kick_right"
CYCLE_REP = "cycle_rep"
TEMPLATE_REP = "template_rep"
ACTIVATE = "activate"
DEACTIVATE = "deactivate"
IDLE_ENTER = "idle_enter"
IDLE_EXIT = "idle_exit"
POSE_CHANGED = "pose_changed"

KINDS = frozenset({
    CURSOR_MOVE, PINCH_PRESS, PINCH_RELEASE, BLINK, WINK_LEFT, WINK_RIGHT,
    MOUTH_OPEN, MOUTH_CLOSE, PROFILE_LEFT, PROFILE_RIGHT, SCROLL,
    SQUAT_REP, JUMP_REP, PUNCH_LEFT, PUNCH_RIGHT, KICK_LEFT, KICK_RIGHT,
    CYCLE_REP, TEMPLATE_REP, ACTIVATE, DEACTIVATE,
    IDLE_ENTER, IDLE_EXIT, POSE_CHANGED,
})


@dataclass(frozen=True)
class GestureEvent:
    """One semantic occurrence: a pinch, a blink, a completed squat...

    label distinguishes instances of the same kind (exercise class name,
    hand pose code); data carries kind-specific payload such as cursor
    pixels or scroll notches.
    """

    t_ms: float
    source: str
    kind: str
    label: Optional[str] = None
    data: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown event kind {self.kind!r}")

    def as_dict(self) -> dict:
        d = {"t": self.t_ms, "source": self.source, "kind": self.kind}
        if self.label is not None:
            d["label"] = self.label
        if self.data:
            d["data"] = dict(self.data)
        return d
