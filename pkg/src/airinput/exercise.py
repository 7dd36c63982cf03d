"""Exercise recognition: joint features, rep detectors, gesture templates.

Detectors are small per-frame automata over joint-angle and position
features extracted from the 33-point body topology. Every detector is
hysteresis-based so a single physical motion can never double-count.
Events within one frame follow the fixed detector order: squat, jump,
punch L/R, kick L/R, cycling, then templates in name order.
"""

from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Tuple

from airinput import events as ev
from airinput.errors import EmptyTemplate
from airinput.events import GestureEvent
from airinput.kernels import dist, joint_angle_deg
from airinput.model import PoseFrame

# 33-point body topology indices
NOSE = 0
L_SHOULDER, R_SHOULDER = 11, 12
L_ELBOW, R_ELBOW = 13, 14
L_WRIST, R_WRIST = 15, 16
L_HIP, R_HIP = 23, 24
L_KNEE, R_KNEE = 25, 26
L_ANKLE, R_ANKLE = 27, 28

VIS_MIN = 0.5

MODE_SITTING = "sitting"
MODE_STANDING = "standing"

TEMPLATE_HOLD = "hold"
TEMPLATE_REP = "rep"

# features usable in templates: all similarity-invariant
TEMPLATE_FEATURES = ("knee_l", "knee_r", "elbow_l", "elbow_r",
                     "wrist_ext_l", "wrist_ext_r")


@dataclass(frozen=True)
class PoseFeatures:
    """Per-frame measurements; None marks an unavailable feature
    (occluded landmark or degenerate geometry), never a zero fill."""

    knee_l: Optional[float]
    knee_r: Optional[float]
    elbow_l: Optional[float]
    elbow_r: Optional[float]
    hip_y: Optional[float]
    ankle_l: Optional[float]
    ankle_r: Optional[float]
    wrist_ext_l: Optional[float]
    wrist_ext_r: Optional[float]
    torso: Optional[float]

    def get(self, name: str) -> Optional[float]:
        return getattr(self, name)


def extract_features(pose: PoseFrame, image_w: int, image_h: int) -> PoseFeatures:
    pts = pose.points

    def px(i: int) -> Tuple[float, float]:
        return pts[i].x * image_w, pts[i].y * image_h

    def vis(*idx: int) -> bool:
        return all(pts[i].visibility >= VIS_MIN for i in idx)

    def angle(a: int, b: int, c: int) -> Optional[float]:
        if not vis(a, b, c):
            return None
        ax, ay = px(a)
        bx, by = px(b)
        cx, cy = px(c)
        try:
            return joint_angle_deg(ax, ay, bx, by, cx, cy)
        except ValueError:
            return None

    def extension(shoulder: int, elbow: int, wrist: int) -> Optional[float]:
        if not vis(shoulder, elbow, wrist):
            return None
        sx, sy = px(shoulder)
        ex, ey = px(elbow)
        wx, wy = px(wrist)
        arm = dist(sx, sy, ex, ey) + dist(ex, ey, wx, wy)
        if arm == 0.0:
            return None
        return dist(sx, sy, wx, wy) / arm

    hip_y = torso = None
    if vis(L_HIP, R_HIP):
        hx = (px(L_HIP)[0] + px(R_HIP)[0]) / 2.0
        hy = (px(L_HIP)[1] + px(R_HIP)[1]) / 2.0
        hip_y = hy
        if vis(L_SHOULDER, R_SHOULDER):
            sx = (px(L_SHOULDER)[0] + px(R_SHOULDER)[0]) / 2.0
            sy = (px(L_SHOULDER)[1] + px(R_SHOULDER)[1]) / 2.0
            t = dist(sx, sy, hx, hy)
            torso = t if t > 0.0 else None

    return PoseFeatures(
        knee_l=angle(L_HIP, L_KNEE, L_ANKLE),
        knee_r=angle(R_HIP, R_KNEE, R_ANKLE),
        elbow_l=angle(L_SHOULDER, L_ELBOW, L_WRIST),
        elbow_r=angle(R_SHOULDER, R_ELBOW, R_WRIST),
        hip_y=hip_y,
        ankle_l=px(L_ANKLE)[1] if vis(L_ANKLE) else None,
        ankle_r=px(R_ANKLE)[1] if vis(R_ANKLE) else None,
        wrist_ext_l=extension(L_SHOULDER, L_ELBOW, L_WRIST),
        wrist_ext_r=extension(R_SHOULDER, R_ELBOW, R_WRIST),
        torso=torso,
    )


class SquatCounter:
    """Down below the enter angle, rep on rising past the exit angle."""

    def __init__(self, enter_deg: float = 100.0, exit_deg: float = 160.0):
        self.enter_deg = enter_deg
        self.exit_deg = exit_deg
        self.down = False
        self.count = 0

    def step(self, knee_l: Optional[float], knee_r: Optional[float]) -> bool:
        knees = [k for k in (knee_l, knee_r) if k is not None]
        if not knees:
            return False
        knee = min(knees)
        if not self.down and knee < self.enter_deg:
            self.down = True
        elif self.down and knee > self.exit_deg:
            self.down = False
            self.count += 1
            return True
        return False

    def reset(self) -> None:
        self.down = False


class JumpDetector:
    """Hip rises off a rolling 2 s baseline and returns within 1 s.

    Image y grows downward, so a rise means hip_y drops. The baseline
    freezes while airborne; slow drift is absorbed while grounded.
    """

    def __init__(self, rise_frac: float = 0.25, window_ms: float = 2000.0,
                 max_air_ms: float = 1000.0):
        self.rise_frac = rise_frac
        self.window_ms = window_ms
        self.max_air_ms = max_air_ms
        self._samples: deque = deque()
        self._airborne_since: Optional[float] = None
        self.count = 0

    def step(self, hip_y: Optional[float], torso: Optional[float], t_ms: float) -> bool:
        if hip_y is None or torso is None:
            self.reset()
            return False
        if self._airborne_since is None:
            self._samples.append((t_ms, hip_y))
            while self._samples and t_ms - self._samples[0][0] > self.window_ms:
                self._samples.popleft()
        baseline = sum(y for _, y in self._samples) / len(self._samples)
        rise = baseline - hip_y
        threshold = self.rise_frac * torso
        if self._airborne_since is None:
            if rise > threshold:
                self._airborne_since = t_ms
            return False
        if rise <= threshold:
            landed_fast = t_ms - self._airborne_since <= self.max_air_ms
            self._airborne_since = None
            if landed_fast:
                self.count += 1
                return True
            return False
        if t_ms - self._airborne_since > self.max_air_ms:
            # not a jump; adopt the new height as posture change
            self._airborne_since = None
            self._samples.clear()
            self._samples.append((t_ms, hip_y))
        return False

    def reset(self) -> None:
        self._samples.clear()
        self._airborne_since = None


class PunchDetector:
    """Arm extension 0.6 -> 0.9 within 300 ms, 250 ms refractory."""

    def __init__(self, low: float = 0.6, high: float = 0.9,
                 within_ms: float = 300.0, refractory_ms: float = 250.0):
        self.low = low
        self.high = high
        self.within_ms = within_ms
        self.refractory_ms = refractory_ms
        self._last_low_ms: Optional[float] = None
        self._armed = False
        self._last_fire_ms: Optional[float] = None
        self.count = 0

    def step(self, extension: Optional[float], t_ms: float) -> bool:
        if extension is None:
            return False
        if extension < self.low:
            self._last_low_ms = t_ms
            self._armed = True
            return False
        if extension > self.high and self._armed and self._last_low_ms is not None:
            self._armed = False
            fast = t_ms - self._last_low_ms <= self.within_ms
            cooled = (self._last_fire_ms is None
                      or t_ms - self._last_fire_ms >= self.refractory_ms)
            if fast and cooled:
                self._last_fire_ms = t_ms
                self.count += 1
                return True
        return False

    def reset(self) -> None:
        self._last_low_ms = None
        self._armed = False


class KickDetector:
    """Ankle rises more than rise_frac * torso above its rolling baseline."""

    def __init__(self, rise_frac: float = 0.5, window_ms: float = 2000.0,
                 refractory_ms: float = 250.0):
        self.rise_frac = rise_frac
        self.window_ms = window_ms
        self.refractory_ms = refractory_ms
        self._samples: deque = deque()
        self._armed = True
        self._last_fire_ms: Optional[float] = None
        self.count = 0

    def step(self, ankle_y: Optional[float], torso: Optional[float], t_ms: float) -> bool:
        if ankle_y is None or torso is None:
            self.reset()
            return False
        if not self._samples:
            self._samples.append((t_ms, ankle_y))
            return False
        baseline = sum(y for _, y in self._samples) / len(self._samples)
        rising = baseline - ankle_y > self.rise_frac * torso
        if not rising:
            # grounded: baseline follows the foot, detector re-arms
            self._samples.append((t_ms, ankle_y))
            while self._samples and t_ms - self._samples[0][0] > self.window_ms:
                self._samples.popleft()
            self._armed = True
            return False
        if self._armed:
            self._armed = False
            if self._last_fire_ms is None or t_ms - self._last_fire_ms >= self.refractory_ms:
                self._last_fire_ms = t_ms
                self.count += 1
                return True
        return False

    def reset(self) -> None:
        self._samples.clear()
        self._armed = True


class CycleDetector:
    """Anti-phase knee oscillation. The knee-angle difference must swing
    across a +-band; each swing whose spacing fits a plausible pedaling
    half-period counts as one alternation. Two alternations make a rep;
    four in rhythm activate the class; 2 s of silence deactivates it."""

    def __init__(self, band_deg: float = 5.0, min_half_s: float = 0.15,
                 max_half_s: float = 1.5, activate_after: int = 4,
                 silence_ms: float = 2000.0):
        self.band_deg = band_deg
        self.min_half_s = min_half_s
        self.max_half_s = max_half_s
        self.activate_after = activate_after
        self.silence_ms = silence_ms
        self._region = 0          # -1 low, +1 high, 0 unknown
        self._last_alt_ms: Optional[float] = None
        self._alternations = 0
        self.active = False
        self.count = 0

    def step(self, knee_l: Optional[float], knee_r: Optional[float],
             t_ms: float) -> Tuple[bool, bool, bool]:
        """Returns (rep_fired, activated, deactivated)."""
        rep = activated = deactivated = False
        if (self._last_alt_ms is not None
                and t_ms - self._last_alt_ms > self.silence_ms):
            deactivated = self.active
            self._soft_reset()
        if knee_l is None or knee_r is None:
            if self.active:
                deactivated = True
            self._soft_reset()
            self.active = False
            return rep, activated, deactivated
        diff = knee_l - knee_r
        region = 1 if diff >= self.band_deg else (-1 if diff <= -self.band_deg else 0)
        if region != 0 and region != self._region:
            if self._region != 0:  # a genuine flip, not the first entry
                if self._last_alt_ms is None:
                    qualifying = True
                else:
                    half_s = (t_ms - self._last_alt_ms) / 1000.0
                    qualifying = self.min_half_s <= half_s <= self.max_half_s
                if qualifying:
                    self._alternations += 1
                    if self._alternations % 2 == 0:
                        self.count += 1
                        rep = True
                    if not self.active and self._alternations >= self.activate_after:
                        self.active = True
                        activated = True
                self._last_alt_ms = t_ms
            self._region = region
        if deactivated:
            self.active = False
        return rep, activated, deactivated

    def _soft_reset(self) -> None:
        self._last_alt_ms = None
        self._alternations = 0

    def reset(self) -> None:
        self._soft_reset()
        self._region = 0
        self.active = False


@dataclass(frozen=True)
class GestureTemplate:
    """User-recorded pose signature matched by feature similarity."""

    name: str
    features: Mapping[str, float]
    tolerances: Mapping[str, float]
    mode: str = TEMPLATE_HOLD

    def __post_init__(self):
        if not self.features:
            raise EmptyTemplate(f"template {self.name!r} has no features")
        for k, tol in self.tolerances.items():
            if tol <= 0.0:
                raise ValueError(f"tolerance for {k!r} must be > 0")
        if self.mode not in (TEMPLATE_HOLD, TEMPLATE_REP):
            raise ValueError(f"unknown template mode {self.mode!r}")


def match_template(feats: PoseFeatures, template: GestureTemplate) -> float:
    """1 at the template means, 0 at one full tolerance away (mean)."""
    total = 0.0
    n = 0
    for name, mu in template.features.items():
        f = feats.get(name)
        if f is None:
            continue
        tol = template.tolerances.get(name, 1.0)
        total += abs(f - mu) / tol
        n += 1
    if n == 0:
        raise EmptyTemplate(f"no live features overlap template {template.name!r}")
    return max(0.0, 1.0 - total / n)


class ExerciseTracker:
    """Runs every enabled detector and template per frame, accumulates
    per-label stats (reps, active milliseconds)."""

    def __init__(self):
        self.mode = MODE_SITTING
        self.squat = SquatCounter()
        self.jump = JumpDetector()
        self.punch_l = PunchDetector()
        self.punch_r = PunchDetector()
        self.kick_l = KickDetector()
        self.kick_r = KickDetector()
        self.cycle = CycleDetector()
        self.templates: List[GestureTemplate] = []
        self._template_on: Dict[str, bool] = {}
        self._conf_on = 0.8
        self._conf_off = 0.7
        self._active_since: Dict[str, float] = {}
        self._prev_t_ms: Optional[float] = None
        self.stats: Dict[str, Dict[str, float]] = {}
        self._base_cycle_band = self.cycle.band_deg

    def configure(self, cfg: dict) -> None:
        if cfg["mode"] != self.mode:
            self.jump.reset()
            self.kick_l.reset()
            self.kick_r.reset()
        self.mode = cfg["mode"]
        self.squat.enter_deg = cfg["squat_enter_deg"]
        self.squat.exit_deg = cfg["squat_exit_deg"]
        self.jump.rise_frac = cfg["jump_rise_frac"]
        for p in (self.punch_l, self.punch_r):
            p.low = cfg["punch_low"]
            p.high = cfg["punch_high"]
            p.within_ms = cfg["punch_within_ms"]
        for k in (self.kick_l, self.kick_r):
            k.rise_frac = cfg["kick_rise_frac"]
        self._base_cycle_band = cfg["cycle_band_deg"]
        self._conf_on = cfg["template_on"]
        self._conf_off = cfg["template_off"]
        # seated pedaling swings the knees less: narrow the band
        self.cycle.band_deg = (self._base_cycle_band * 0.6
                               if self.mode == MODE_SITTING else self._base_cycle_band)

    def set_templates(self, templates: List[GestureTemplate]) -> None:
        names = [t.name for t in templates]
        if len(set(names)) != len(names):
            raise ValueError("template names must be unique")
        self.templates = sorted(templates, key=lambda t: t.name)
        self._template_on = {t.name: False for t in self.templates}

    def step(self, pose: Optional[PoseFrame], t_ms: float,
             image_w: int, image_h: int) -> List[GestureEvent]:
        out: List[GestureEvent] = []
        self._account_time(t_ms)
        if pose is None:
            out.extend(self._deactivate_all(t_ms))
            self.squat.reset()
            self.jump.reset()
            self.punch_l.reset()
            self.punch_r.reset()
            self.kick_l.reset()
            self.kick_r.reset()
            self.cycle.reset()
            self._prev_t_ms = t_ms
            return out
        f = extract_features(pose, image_w, image_h)
        standing = self.mode == MODE_STANDING

        if self.squat.step(f.knee_l, f.knee_r):
            out.append(self._rep(t_ms, ev.SQUAT_REP, "squat"))
        if standing and self.jump.step(f.hip_y, f.torso, t_ms):
            out.append(self._rep(t_ms, ev.JUMP_REP, "jump"))
        if self.punch_l.step(f.wrist_ext_l, t_ms):
            out.append(self._rep(t_ms, ev.PUNCH_LEFT, "punch"))
        if self.punch_r.step(f.wrist_ext_r, t_ms):
            out.append(self._rep(t_ms, ev.PUNCH_RIGHT, "punch"))
        if standing and self.kick_l.step(f.ankle_l, f.torso, t_ms):
            out.append(self._rep(t_ms, ev.KICK_LEFT, "kick"))
        if standing and self.kick_r.step(f.ankle_r, f.torso, t_ms):
            out.append(self._rep(t_ms, ev.KICK_RIGHT, "kick"))

        rep, activated, deactivated = self.cycle.step(f.knee_l, f.knee_r, t_ms)
        if deactivated:
            out.append(self._deactivate(t_ms, "cycling"))
        if activated:
            out.append(self._activate(t_ms, "cycling"))
        if rep:
            out.append(self._rep(t_ms, ev.CYCLE_REP, "cycling"))

        for tpl in self.templates:
            try:
                conf = match_template(f, tpl)
            except EmptyTemplate:
                conf = None
            on = self._template_on[tpl.name]
            if conf is not None and not on and conf >= self._conf_on:
                self._template_on[tpl.name] = True
                if tpl.mode == TEMPLATE_HOLD:
                    out.append(self._activate(t_ms, tpl.name, confidence=conf))
                else:
                    out.append(self._rep(t_ms, ev.TEMPLATE_REP, tpl.name,
                                         label=tpl.name, confidence=conf))
            elif on and (conf is None or conf < self._conf_off):
                self._template_on[tpl.name] = False
                if tpl.mode == TEMPLATE_HOLD:
                    out.append(self._deactivate(t_ms, tpl.name))

        self._prev_t_ms = t_ms
        return out

    def release_all(self, t_ms: float) -> List[GestureEvent]:
        """Deactivate everything still active (shutdown balancing)."""
        self._account_time(t_ms)
        out = self._deactivate_all(t_ms)
        self._prev_t_ms = t_ms
        return out

    @property
    def active_labels(self) -> List[str]:
        return sorted(self._active_since)

    # -- internals ----------------------------------------------------------

    def _account_time(self, t_ms: float) -> None:
        if self._prev_t_ms is None:
            return
        dt = t_ms - self._prev_t_ms
        for label in self._active_since:
            self._label_stats(label)["active_ms"] += dt

    def _deactivate_all(self, t_ms: float) -> List[GestureEvent]:
        out = []
        for label in sorted(self._active_since):
            out.append(GestureEvent(t_ms, "exercise", ev.DEACTIVATE, label=label))
        self._active_since = {}
        for name in self._template_on:
            self._template_on[name] = False
        self.cycle.active = False
        return out

    def _activate(self, t_ms: float, label: str, confidence: Optional[float] = None) -> GestureEvent:
        self._active_since[label] = t_ms
        self._label_stats(label)
        data = {} if confidence is None else {"confidence": confidence}
        return GestureEvent(t_ms, "exercise", ev.ACTIVATE, label=label, data=data)

    def _deactivate(self, t_ms: float, label: str) -> GestureEvent:
        self._active_since.pop(label, None)
        return GestureEvent(t_ms, "exercise", ev.DEACTIVATE, label=label)

    def _rep(self, t_ms: float, kind: str, stats_label: str,
             label: Optional[str] = None, confidence: Optional[float] = None) -> GestureEvent:
        st = self._label_stats(stats_label)
        st["reps"] += 1
        data = {"count": int(st["reps"])}
        if confidence is not None:
            data["confidence"] = confidence
        return GestureEvent(t_ms, "exercise", kind, label=label, data=data)

    def _label_stats(self, label: str) -> Dict[str, float]:
        return self.stats.setdefault(label, {"reps": 0, "active_ms": 0.0})
