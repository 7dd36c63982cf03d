"""Face and head gestures: blinks, winks, mouth, profile turns, head cursor.

Works on the 68-point face annotation (iBUG ordering, pixel coords).
Head pose is recovered geometrically: roll from the eye-line, then yaw
and pitch from nose-tip offsets inside the de-rolled face box. No 3D
model fitting, so identical input always yields identical output.
"""

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from airinput import events as ev
from airinput.errors import DegenerateEye, DegenerateFace, DegenerateMouth
from airinput.events import GestureEvent
from airinput.filters import ACTIVATE_ABOVE, ACTIVATE_BELOW, Debounce, Hysteresis, LowPass
from airinput.kernels import dist, eye_aspect_ratio, mouth_aspect_ratio
from airinput.model import FaceFrame, Point2

# iBUG-68 landmark groups
RIGHT_EYE = (36, 37, 38, 39, 40, 41)   # subject's right eye (image left)
LEFT_EYE = (42, 43, 44, 45, 46, 47)    # subject's left eye
INNER_MOUTH = (60, 61, 62, 63, 64, 65, 66, 67)
JAW_RIGHT = 0    # top of the jaw on the subject's right
JAW_LEFT = 16
CHIN = 8
NOSE_TIP = 30

FRONTAL = "frontal"
PROFILE_LEFT = "left"
PROFILE_RIGHT = "right"

MODE_CURSOR = "cursor"
MODE_SCROLL = "scroll"
MODE_TRIGGERS = "triggers-only"

# frontal reference: nose tip sits 45% of the way from eye line to chin
PITCH_REF_RATIO = 0.45


def eye_ear(points: Sequence[Point2]) -> float:
    """EAR of one eye given its six landmarks in order."""
    if len(points) != 6:
        raise DegenerateEye(f"need 6 eye points, got {len(points)}")
    p = points
    try:
        return eye_aspect_ratio(
            p[0].x, p[0].y, p[1].x, p[1].y, p[2].x, p[2].y,
            p[3].x, p[3].y, p[4].x, p[4].y, p[5].x, p[5].y,
        )
    except ValueError as e:
        raise DegenerateEye(str(e)) from e


def mouth_mar(points: Sequence[Point2]) -> float:
    """MAR of the inner-lip octagon, corner-to-corner order."""
    if len(points) != 8:
        raise DegenerateMouth(f"need 8 mouth points, got {len(points)}")
    p = points
    try:
        return mouth_aspect_ratio(
            p[0].x, p[0].y, p[1].x, p[1].y, p[2].x, p[2].y, p[3].x, p[3].y,
            p[4].x, p[4].y, p[5].x, p[5].y, p[6].x, p[6].y, p[7].x, p[7].y,
        )
    except ValueError as e:
        raise DegenerateMouth(str(e)) from e


def face_ears(face: FaceFrame) -> Tuple[float, float]:
    """(left, right) subject-eye EARs from a face frame."""
    left = eye_ear([face.points68[i] for i in LEFT_EYE])
    right = eye_ear([face.points68[i] for i in RIGHT_EYE])
    return left, right


def face_mar(face: FaceFrame) -> float:
    return mouth_mar([face.points68[i] for i in INNER_MOUTH])


@dataclass(frozen=True)
class HeadPose:
    """Degrees. yaw > 0: nose toward image right; pitch > 0: looking up;
    roll > 0: eye line tilted clockwise on screen."""

    yaw: float
    pitch: float
    roll: float


def _centroid(points: Sequence[Point2]) -> Tuple[float, float]:
    n = len(points)
    return sum(p.x for p in points) / n, sum(p.y for p in points) / n


def head_pose(face: FaceFrame) -> HeadPose:
    """Geometric pose from eye line, jaw span, and nose-tip offsets."""
    pts = face.points68
    eye_r = _centroid([pts[i] for i in RIGHT_EYE])
    eye_l = _centroid([pts[i] for i in LEFT_EYE])
    vx = eye_l[0] - eye_r[0]
    vy = eye_l[1] - eye_r[1]
    # fold so roll stays in (-90, 90] and mirroring negates it
    if vx < 0.0:
        vx, vy = -vx, -vy
    roll_rad = math.atan2(vy, vx)

    mid_x = (eye_r[0] + eye_l[0]) / 2.0
    mid_y = (eye_r[1] + eye_l[1]) / 2.0
    cos_r = math.cos(-roll_rad)
    sin_r = math.sin(-roll_rad)

    def deroll(p: Point2) -> Tuple[float, float]:
        dx = p.x - mid_x
        dy = p.y - mid_y
        return (mid_x + dx * cos_r - dy * sin_r,
                mid_y + dx * sin_r + dy * cos_r)

    jr = deroll(pts[JAW_RIGHT])
    jl = deroll(pts[JAW_LEFT])
    nose = deroll(pts[NOSE_TIP])
    chin = deroll(pts[CHIN])

    jaw_w = dist(jr[0], jr[1], jl[0], jl[1])
    if jaw_w == 0.0:
        raise DegenerateFace("zero jaw width")
    jaw_mid_x = (jr[0] + jl[0]) / 2.0
    yaw_arg = 2.0 * (nose[0] - jaw_mid_x) / jaw_w
    yaw = math.degrees(math.asin(max(-1.0, min(1.0, yaw_arg))))

    if chin[1] == mid_y:
        raise DegenerateFace("zero eye-chin distance")
    r = (nose[1] - mid_y) / (chin[1] - mid_y)
    pitch_arg = 2.0 * (PITCH_REF_RATIO - r)
    pitch = math.degrees(math.asin(max(-1.0, min(1.0, pitch_arg))))

    clamp = lambda a: max(-90.0, min(90.0, a))
    return HeadPose(clamp(yaw), clamp(pitch), clamp(math.degrees(roll_rad)))


def classify_profile(current: str, yaw: float,
                     enter_deg: float = 25.0, exit_deg: float = 20.0) -> str:
    """One automaton step of the frontal/left/right classification."""
    if current == FRONTAL:
        if yaw > enter_deg:
            return PROFILE_RIGHT
        if yaw < -enter_deg:
            return PROFILE_LEFT
        return FRONTAL
    if current == PROFILE_RIGHT:
        return FRONTAL if yaw < exit_deg else PROFILE_RIGHT
    return FRONTAL if yaw > -exit_deg else PROFILE_LEFT


class _EyeEpisode:
    """Blink/wink episode tracker. One closure episode emits at most one
    event: a blink (both eyes) or a wink (one eye), never both."""

    def __init__(self, blink_frames: int = 2, wink_frames: int = 3):
        self.blink_frames = blink_frames
        self.wink_frames = wink_frames
        self.reset()

    def reset(self) -> None:
        self.streak_l = 0
        self.streak_r = 0
        self.peak_both = 0
        self.wink_ok_l = True
        self.wink_ok_r = True
        self.consumed = False

    def step(self, closed_l: bool, closed_r: bool,
             ear_l: float, ear_r: float, open_thresh: float) -> Optional[str]:
        self.streak_l = self.streak_l + 1 if closed_l else 0
        self.streak_r = self.streak_r + 1 if closed_r else 0
        if closed_l and closed_r:
            self.peak_both = max(self.peak_both, min(self.streak_l, self.streak_r))
        if self.streak_l == 0:
            self.wink_ok_l = True
        else:
            self.wink_ok_l = self.wink_ok_l and ear_r > open_thresh
        if self.streak_r == 0:
            self.wink_ok_r = True
        else:
            self.wink_ok_r = self.wink_ok_r and ear_l > open_thresh

        if not closed_l and not closed_r:
            fire = None
            if not self.consumed and self.peak_both >= self.blink_frames:
                fire = ev.BLINK
            self.peak_both = 0
            self.consumed = False
            self.wink_ok_l = True
            self.wink_ok_r = True
            return fire
        if not self.consumed:
            if self.streak_l == self.wink_frames and self.streak_r == 0 and self.wink_ok_l:
                self.consumed = True
                return ev.WINK_LEFT
            if self.streak_r == self.wink_frames and self.streak_l == 0 and self.wink_ok_r:
                self.consumed = True
                return ev.WINK_RIGHT
        return None


class HeadTracker:
    """Per-frame face/head state machine."""

    def __init__(self):
        self.ear_on = 0.20
        self.ear_off = 0.25
        self.mar_on = 0.55
        self.mar_off = 0.45
        self.blink_frames = 2
        self.wink_frames = 3
        self.profile_enter_deg = 25.0
        self.profile_exit_deg = 20.0
        self.profile_hold_ms = 200.0
        self.mode = MODE_TRIGGERS
        self.cursor_gain = 12.0       # px/s per degree past the deadzone
        self.deadzone_deg = 3.0
        self.scroll_threshold_deg = 10.0
        self.scroll_rate = 4.0        # notches/s past the threshold
        self._hyst_l = Hysteresis(self.ear_on, self.ear_off, ACTIVATE_BELOW)
        self._hyst_r = Hysteresis(self.ear_on, self.ear_off, ACTIVATE_BELOW)
        self._hyst_mar = Hysteresis(self.mar_on, self.mar_off, ACTIVATE_ABOVE)
        self._episode = _EyeEpisode(self.blink_frames, self.wink_frames)
        self._lp_yaw = LowPass(1.0, 0.5, 1.0)
        self._lp_pitch = LowPass(1.0, 0.5, 1.0)
        self._profile = FRONTAL
        self._deb_right = Debounce(self.profile_hold_ms)
        self._deb_left = Debounce(self.profile_hold_ms)
        self._armed_right = True
        self._armed_left = True
        self._neutral: Optional[Tuple[float, float]] = None
        self._prev_t_ms: Optional[float] = None
        self._scroll_accum = 0.0
        # last observed values, for telemetry
        self.last_ear_l: Optional[float] = None
        self.last_ear_r: Optional[float] = None
        self.last_mar: Optional[float] = None
        self.last_pose: Optional[HeadPose] = None

    def configure(self, cfg: dict) -> None:
        old_mode = self.mode
        self.ear_on = cfg["ear_on"]
        self.ear_off = cfg["ear_off"]
        self.mar_on = cfg["mar_on"]
        self.mar_off = cfg["mar_off"]
        self.blink_frames = cfg["blink_frames"]
        self.wink_frames = cfg["wink_frames"]
        self.profile_enter_deg = cfg["profile_enter_deg"]
        self.profile_exit_deg = cfg["profile_exit_deg"]
        self.profile_hold_ms = cfg["profile_hold_ms"]
        self.mode = cfg["mode"]
        self.cursor_gain = cfg["cursor_gain"]
        self.deadzone_deg = cfg["deadzone_deg"]
        self.scroll_threshold_deg = cfg["scroll_threshold_deg"]
        self.scroll_rate = cfg["scroll_rate"]
        self._hyst_l.on_threshold = self.ear_on
        self._hyst_l.off_threshold = self.ear_off
        self._hyst_r.on_threshold = self.ear_on
        self._hyst_r.off_threshold = self.ear_off
        self._hyst_mar.on_threshold = self.mar_on
        self._hyst_mar.off_threshold = self.mar_off
        self._episode.blink_frames = self.blink_frames
        self._episode.wink_frames = self.wink_frames
        self._deb_right.hold_ms = self.profile_hold_ms
        self._deb_left.hold_ms = self.profile_hold_ms
        if self.mode != old_mode:
            self._neutral = None  # recapture the neutral pose
            self._scroll_accum = 0.0

    @property
    def mouth_open(self) -> bool:
        return self._hyst_mar.active

    @property
    def profile(self) -> str:
        return self._profile

    def step(self, face: Optional[FaceFrame], t_ms: float) -> List[GestureEvent]:
        if face is None:
            self._reset_counters()
            return []
        try:
            ear_l, ear_r = face_ears(face)
            mar = face_mar(face)
            pose = head_pose(face)
        except (DegenerateEye, DegenerateMouth, DegenerateFace):
            return []  # unusable geometry; hold state
        self.last_ear_l, self.last_ear_r = ear_l, ear_r
        self.last_mar = mar

        out: List[GestureEvent] = []

        closed_l = self._hyst_l.step(ear_l)
        closed_r = self._hyst_r.step(ear_r)
        fired = self._episode.step(closed_l, closed_r, ear_l, ear_r, self.ear_off)
        if fired is not None:
            out.append(self._event(t_ms, fired))

        was_open = self._hyst_mar.active
        now_open = self._hyst_mar.step(mar)
        if now_open and not was_open:
            out.append(self._event(t_ms, ev.MOUTH_OPEN))
        elif was_open and not now_open:
            out.append(self._event(t_ms, ev.MOUTH_CLOSE))

        yaw = self._lp_yaw.step(pose.yaw, t_ms)
        pitch = self._lp_pitch.step(pose.pitch, t_ms)
        self.last_pose = HeadPose(yaw, pitch, pose.roll)

        prev_class = self._profile
        self._profile = classify_profile(prev_class, yaw,
                                         self.profile_enter_deg, self.profile_exit_deg)
        if self._profile == FRONTAL:
            self._armed_right = True
            self._armed_left = True
        # events debounce the raw enter condition so flapping around the
        # threshold never fires; the class above gates refiring per side
        was_r = self._deb_right.stable
        now_r = self._deb_right.step(yaw > self.profile_enter_deg, t_ms)
        if now_r and not was_r and self._armed_right:
            self._armed_right = False
            out.append(self._event(t_ms, ev.PROFILE_RIGHT))
        was_l = self._deb_left.stable
        now_l = self._deb_left.step(yaw < -self.profile_enter_deg, t_ms)
        if now_l and not was_l and self._armed_left:
            self._armed_left = False
            out.append(self._event(t_ms, ev.PROFILE_LEFT))

        dt_s = 0.0 if self._prev_t_ms is None else (t_ms - self._prev_t_ms) / 1000.0
        self._prev_t_ms = t_ms
        if self.mode == MODE_CURSOR:
            if self._neutral is None:
                self._neutral = (yaw, pitch)
            dx_deg = self._deadzoned(yaw - self._neutral[0])
            dy_deg = self._deadzoned(pitch - self._neutral[1])
            if dt_s > 0.0 and (dx_deg != 0.0 or dy_deg != 0.0):
                # pitch up moves the cursor up (screen y shrinks)
                dx = self.cursor_gain * dx_deg * dt_s
                dy = -self.cursor_gain * dy_deg * dt_s
                out.append(self._event(t_ms, ev.CURSOR_MOVE, data={"dx": dx, "dy": dy}))
        elif self.mode == MODE_SCROLL:
            if self._neutral is None:
                self._neutral = (yaw, pitch)
            off = pitch - self._neutral[1]
            if dt_s > 0.0 and abs(off) > self.scroll_threshold_deg:
                self._scroll_accum += math.copysign(self.scroll_rate * dt_s, off)
                notches = int(self._scroll_accum)
                if notches != 0:
                    self._scroll_accum -= notches
                    out.append(self._event(t_ms, ev.SCROLL, data={"delta": notches}))
        return out

    def release_all(self, t_ms: float) -> List[GestureEvent]:
        """Balance a dangling MouthOpen at shutdown."""
        out: List[GestureEvent] = []
        if self._hyst_mar.active:
            out.append(self._event(t_ms, ev.MOUTH_CLOSE))
            self._hyst_mar.reset()
        return out

    def _deadzoned(self, offset_deg: float) -> float:
        mag = abs(offset_deg) - self.deadzone_deg
        return 0.0 if mag <= 0.0 else math.copysign(mag, offset_deg)

    def _reset_counters(self) -> None:
        self._hyst_l.reset()
        self._hyst_r.reset()
        self._episode.reset()
        self._lp_yaw.reset()
        self._lp_pitch.reset()
        self._deb_right.reset()
        self._deb_left.reset()
        self._profile = FRONTAL
        self._armed_right = True
        self._armed_left = True
        self._prev_t_ms = None
        self._scroll_accum = 0.0

    def _event(self, t_ms: float, kind: str, data: Optional[dict] = None) -> GestureEvent:
        return GestureEvent(t_ms, "head", kind, data=data or {})
