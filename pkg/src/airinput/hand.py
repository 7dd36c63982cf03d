"""Hand gestures: idle gating, cursor mapping, pinch click, poses, scroll.

The cursor lives inside a Dynamic Area of Interest: a rectangle around
the hand whose corners map to the corners of the screen. The rectangle
scales with apparent palm size, so the reachable region shrinks as the
user steps back and the hand-to-cursor gain stays roughly constant in
physical terms.
"""

from dataclasses import dataclass
from typing import List, Optional, Tuple

from airinput import events as ev
from airinput.errors import DegenerateHand
from airinput.events import GestureEvent
from airinput.filters import ACTIVATE_BELOW, Debounce, Hysteresis, LowPass
from airinput.kernels import dist, joint_angle_deg
from airinput.model import RIGHT, HandFrame, Point2

WRIST = 0
THUMB_TIP = 4
INDEX_MCP = 5
INDEX_TIP = 8
MIDDLE_MCP = 9
PINKY_MCP = 17

TOWARD_CAMERA = "toward"
AWAY = "away"

EXTENDED = "E"
BENT = "B"
INDETERMINATE = "I"

# MCP-PIP-TIP chains per finger; thumb uses MCP-IP-TIP
FINGER_CHAINS = (
    (2, 3, 4),      # thumb
    (5, 6, 8),      # index
    (9, 10, 12),    # middle
    (13, 14, 16),   # ring
    (17, 18, 20),   # pinky
)


def palm_size_px(hand: HandFrame, image_w: int, image_h: int) -> float:
    """Wrist to middle-finger MCP distance in pixels."""
    p0 = hand.points[WRIST]
    p9 = hand.points[MIDDLE_MCP]
    d = dist(p0.x * image_w, p0.y * image_h, p9.x * image_w, p9.y * image_h)
    if d == 0.0:
        raise DegenerateHand("wrist and middle MCP coincide")
    return d


def estimate_depth_from_palm(palm_px: float, k_mm_px: float) -> float:
    """Pinhole inverse-size law: depth_mm = k / palm_px."""
    if palm_px <= 0.0:
        raise DegenerateHand(f"palm_px must be > 0, got {palm_px}")
    if k_mm_px <= 0.0:
        raise ValueError(f"k_mm_px must be > 0, got {k_mm_px}")
    return k_mm_px / palm_px


def palm_facing(hand: HandFrame, image_w: int, image_h: int) -> str:
    """Palm orientation from the winding of wrist, index MCP, pinky MCP.

    In image coordinates (y down) a right palm held toward the camera
    winds its index MCP counterclockwise of the pinky MCP as seen from
    the wrist; the left hand is the mirror image.
    """
    p0 = hand.points[WRIST]
    p5 = hand.points[INDEX_MCP]
    p17 = hand.points[PINKY_MCP]
    ax = (p5.x - p0.x) * image_w
    ay = (p5.y - p0.y) * image_h
    bx = (p17.x - p0.x) * image_w
    by = (p17.y - p0.y) * image_h
    cross_z = ax * by - ay * bx
    if cross_z == 0.0:
        raise DegenerateHand("collinear wrist / index MCP / pinky MCP")
    if hand.handedness == RIGHT:
        return TOWARD_CAMERA if cross_z > 0.0 else AWAY
    return TOWARD_CAMERA if cross_z < 0.0 else AWAY


def is_idle(hand: Optional[HandFrame], image_w: int, image_h: int) -> bool:
    """Raw (pre-debounce) idle test.

    Idle when the hand is absent, the palm faces away, or the index tip
    rests below the thumb tip. A geometrically degenerate hand cannot be
    classified and is treated as idle rather than raising.
    """
    if hand is None:
        return True
    try:
        if palm_facing(hand, image_w, image_h) == AWAY:
            return True
    except DegenerateHand:
        return True
    return hand.points[INDEX_TIP].y > hand.points[THUMB_TIP].y


def pinch_ratio(hand: HandFrame, image_w: int, image_h: int) -> float:
    """Thumb-to-index fingertip gap over palm size; scale invariant."""
    palm = palm_size_px(hand, image_w, image_h)
    p4 = hand.points[THUMB_TIP]
    p8 = hand.points[INDEX_TIP]
    gap = dist(p4.x * image_w, p4.y * image_h, p8.x * image_w, p8.y * image_h)
    return gap / palm


def finger_states(hand: HandFrame, image_w: int, image_h: int,
                  extended_deg: float = 160.0, bent_deg: float = 130.0) -> Tuple[str, ...]:
    """Classify each finger by the interior angle at its middle joint."""
    out = []
    for a, b, c in FINGER_CHAINS:
        pa, pb, pc = hand.points[a], hand.points[b], hand.points[c]
        try:
            ang = joint_angle_deg(
                pa.x * image_w, pa.y * image_h,
                pb.x * image_w, pb.y * image_h,
                pc.x * image_w, pc.y * image_h,
            )
        except ValueError as e:
            raise DegenerateHand(str(e)) from e
        if ang >= extended_deg:
            out.append(EXTENDED)
        elif ang <= bent_deg:
            out.append(BENT)
        else:
            out.append(INDETERMINATE)
    return tuple(out)


@dataclass(frozen=True)
class DAoI:
    """Normalized rectangle whose corners map to the screen corners."""

    cx: float
    cy: float
    width: float
    height: float

    @property
    def left(self) -> float:
        return self.cx - self.width / 2.0

    @property
    def top(self) -> float:
        return self.cy - self.height / 2.0


def make_daoi(anchor_x: float, anchor_y: float, palm_px: float,
              image_w: int, screen_aspect: float, c_scale: float) -> DAoI:
    """Build the interaction rectangle around an anchor point.

    Width scales with apparent palm size; height follows the screen
    aspect ratio. An oversized rectangle is shrunk uniformly (aspect
    preserved) and one poking past the frame edge is translated back in,
    size preserved.
    """
    width = c_scale * palm_px / image_w
    height = width / screen_aspect
    s = min(1.0, 1.0 / width, 1.0 / height)
    width *= s
    height *= s
    cx = min(max(anchor_x, width / 2.0), 1.0 - width / 2.0)
    cy = min(max(anchor_y, height / 2.0), 1.0 - height / 2.0)
    return DAoI(cx, cy, width, height)


def map_to_screen(p: Point2, daoi: DAoI, screen_w: int, screen_h: int) -> Tuple[float, float]:
    """Affine map sending DAoI corners to screen corners, clamped."""
    u = (p.x - daoi.left) / daoi.width
    v = (p.y - daoi.top) / daoi.height
    sx = min(max(u * screen_w, 0.0), screen_w - 1.0)
    sy = min(max(v * screen_h, 0.0), screen_h - 1.0)
    return sx, sy


class HandTracker:
    """Per-hand gesture state machine, stepped once per frame.

    Only the cursor hand emits cursor, pinch, and scroll events; the
    other hand contributes pose classification alone, for bindings that
    key off the off-hand.
    """

    def __init__(self, side: str, is_cursor_hand: bool = True):
        self.side = side
        self.is_cursor_hand = is_cursor_hand
        self.pinch_on = 0.35
        self.pinch_off = 0.45
        self.idle_hold_ms = 300.0
        self.c_scale = 3.0
        self.angle_extended_deg = 160.0
        self.angle_bent_deg = 130.0
        self.scroll_gain = 8.0
        self.screen_w = 1920
        self.screen_h = 1080
        self._fc_min = 1.0
        self._beta = 0.5
        self._d_cutoff = 1.0
        self._cursor_x = LowPass(self._fc_min, self._beta, self._d_cutoff)
        self._cursor_y = LowPass(self._fc_min, self._beta, self._d_cutoff)
        self._scroll_y = LowPass(self._fc_min, self._beta, self._d_cutoff)
        self._pinch = Hysteresis(self.pinch_on, self.pinch_off, ACTIVATE_BELOW)
        self._idle = Debounce(self.idle_hold_ms, initial=False)
        self._anchor: Optional[Tuple[float, float]] = None
        self._pose_label: Optional[str] = None
        self._scroll_accum = 0.0
        self._prev_scroll_y: Optional[float] = None
        self.daoi: Optional[DAoI] = None
        self.last_pinch: Optional[float] = None

    def configure(self, cfg: dict) -> None:
        """Apply a hand-config subtree; called between frames only."""
        self.pinch_on = cfg["pinch_on"]
        self.pinch_off = cfg["pinch_off"]
        self.idle_hold_ms = cfg["idle_hold_ms"]
        self.c_scale = cfg["c_scale"]
        self.angle_extended_deg = cfg["angle_extended_deg"]
        self.angle_bent_deg = cfg["angle_bent_deg"]
        self.scroll_gain = cfg["scroll_gain"]
        self._pinch.on_threshold = self.pinch_on
        self._pinch.off_threshold = self.pinch_off
        self._idle.hold_ms = self.idle_hold_ms
        for f in (self._cursor_x, self._cursor_y, self._scroll_y):
            f.fc_min = cfg["fc_min"]
            f.beta = cfg["beta"]
            f.d_cutoff = cfg["d_cutoff"]

    def set_screen(self, width_px: int, height_px: int) -> None:
        self.screen_w = width_px
        self.screen_h = height_px

    @property
    def pinch_held(self) -> bool:
        return self._pinch.active

    @property
    def idle(self) -> bool:
        return self._idle.stable

    def step(self, hand: Optional[HandFrame], t_ms: float,
             image_w: int, image_h: int) -> List[GestureEvent]:
        out: List[GestureEvent] = []
        raw_idle = is_idle(hand, image_w, image_h)
        was_idle = self._idle.stable
        now_idle = self._idle.step(raw_idle, t_ms)
        if now_idle and not was_idle:
            if self._pinch.active:
                out.append(self._event(t_ms, ev.PINCH_RELEASE))
                self._pinch.reset()
            self._enter_idle()
            out.append(self._event(t_ms, ev.IDLE_ENTER))
            return out
        if was_idle and not now_idle:
            out.append(self._event(t_ms, ev.IDLE_EXIT))
            if hand is not None:
                self._anchor = (hand.points[WRIST].x, hand.points[WRIST].y)
        if now_idle or raw_idle or hand is None:
            return out

        try:
            palm = palm_size_px(hand, image_w, image_h)
            fingers = finger_states(hand, image_w, image_h,
                                    self.angle_extended_deg, self.angle_bent_deg)
            ratio = pinch_ratio(hand, image_w, image_h)
        except DegenerateHand:
            return out  # unusable geometry this frame; hold state

        self.last_pinch = ratio
        pose = "".join(fingers)
        if pose != self._pose_label:
            self._pose_label = pose
            out.append(self._event(t_ms, ev.POSE_CHANGED, label=f"{self.side}:{pose}"))

        if not self.is_cursor_hand:
            return out

        if self._anchor is None:
            self._anchor = (hand.points[WRIST].x, hand.points[WRIST].y)
        self.daoi = make_daoi(self._anchor[0], self._anchor[1], palm,
                              image_w, self.screen_w / self.screen_h, self.c_scale)

        fist = all(f == BENT for f in fingers[1:])
        if fist:
            if self._pinch.active:
                out.append(self._event(t_ms, ev.PINCH_RELEASE))
                self._pinch.reset()
            y = self._scroll_y.step(hand.points[WRIST].y, t_ms)
            if self._prev_scroll_y is not None:
                # hand up (y shrinking) scrolls up: positive notches
                self._scroll_accum += (self._prev_scroll_y - y) * self.scroll_gain
                notches = int(self._scroll_accum)
                if notches != 0:
                    self._scroll_accum -= notches
                    out.append(self._event(t_ms, ev.SCROLL, data={"delta": notches}))
            self._prev_scroll_y = y
            return out
        self._prev_scroll_y = None

        tip = hand.points[INDEX_TIP]
        x = self._cursor_x.step(tip.x, t_ms)
        y = self._cursor_y.step(tip.y, t_ms)
        sx, sy = map_to_screen(Point2(x, y), self.daoi, self.screen_w, self.screen_h)
        out.append(self._event(t_ms, ev.CURSOR_MOVE, data={"x": sx, "y": sy}))

        was_pinched = self._pinch.active
        pinched = self._pinch.step(ratio)
        if pinched and not was_pinched:
            out.append(self._event(t_ms, ev.PINCH_PRESS))
        elif was_pinched and not pinched:
            out.append(self._event(t_ms, ev.PINCH_RELEASE))
        return out

    def release_all(self, t_ms: float) -> List[GestureEvent]:
        """Balance dangling presses at shutdown or hand-role changes."""
        out: List[GestureEvent] = []
        if self._pinch.active:
            out.append(self._event(t_ms, ev.PINCH_RELEASE))
            self._pinch.reset()
        return out

    def _enter_idle(self) -> None:
        self._cursor_x.reset()
        self._cursor_y.reset()
        self._scroll_y.reset()
        self._scroll_accum = 0.0
        self._prev_scroll_y = None
        self._anchor = None
        self._pose_label = None
        self.daoi = None
        self.last_pinch = None

    def _event(self, t_ms: float, kind: str, label: Optional[str] = None,
               data: Optional[dict] = None) -> GestureEvent:
        return GestureEvent(t_ms, "hand", kind, label=label, data=data or {})
