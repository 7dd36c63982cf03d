"""The per-frame pipeline: range gate, modules, binding, balancing.

One Engine owns all module trackers and processes frames strictly in
order. Everything it does is a pure function of (frame stream, config,
profile): no wall clock, no randomness, so replaying a fixture twice
produces byte-identical command logs.

Config edits arrive through request() from any thread and are drained
at frame boundaries, so no frame ever runs under a half-applied config.
"""

import threading
from collections import deque
from dataclasses import replace
from typing import Callable, Dict, Iterable, List, Optional, Set, Tuple

from airinput import events as ev
from airinput.bindings import (
    KEY_DOWN,
    KEY_UP,
    MOUSE_DOWN,
    MOUSE_UP,
    InputCommand,
    Profile,
    bind,
    load_profile,
)
from airinput.config import exercise_section, validate_config
from airinput.errors import (
    ConfigError,
    EngineError,
    MalformedRecord,
    NonMonotonicTime,
    SchemaViolation,
)
from airinput.events import GestureEvent
from airinput.exercise import ExerciseTracker, GestureTemplate, extract_features
from airinput.facehead import HeadTracker
from airinput.gaze import DEPTH_DEFAULT, CameraModel, GazeTracker, ScreenGeometry, resolve_depth
from airinput.hand import HandTracker
from airinput.model import LandmarkFrame, parse_frame


class Engine:
    def __init__(self, config: Optional[dict] = None,
                 profile: Optional[str] = None):
        self.config = validate_config(config)
        if profile is not None:
            self.config = dict(self.config, profile=profile)
        self.profile: Profile = load_profile(self.config["profile"])
        self.hand_left = HandTracker("left")
        self.hand_right = HandTracker("right")
        self.head = HeadTracker()
        self.gaze = GazeTracker()
        self.exercise = ExerciseTracker()
        self.frame_index = 0
        self.config_epoch = 0
        self.last_t_ms: Optional[float] = None
        self.last_depth_mm: Optional[float] = None
        self.last_depth_source: Optional[str] = None
        self.last_gated = False
        self.recent_events: deque = deque(maxlen=20)
        self.frames_seen = 0
        self.lines_skipped = 0
        self._held_keys: Set[str] = set()
        self._held_buttons: Set[str] = set()
        self._pending: deque = deque()
        self._pending_lock = threading.Lock()
        self._recording: Optional[dict] = None
        self._templates: List[GestureTemplate] = []
        self._apply_config()

    # -- configuration -------------------------------------------------------

    def _apply_config(self) -> None:
        cfg = self.config
        for tracker in (self.hand_left, self.hand_right):
            tracker.configure(cfg["hand"])
            tracker.set_screen(cfg["screen"]["width_px"], cfg["screen"]["height_px"])
        cursor_side = cfg["hand"]["cursor_hand"]
        self.hand_left.is_cursor_hand = cursor_side == "left"
        self.hand_right.is_cursor_hand = cursor_side == "right"
        self.head.configure(cfg["head"])
        self.gaze.configure(cfg["gaze"])
        self.gaze.set_screen(ScreenGeometry(
            cfg["screen"]["width_px"], cfg["screen"]["height_px"],
            cfg["screen"]["width_mm"], cfg["screen"]["height_mm"],
            cfg["screen"]["camera_offset_x_mm"], cfg["screen"]["camera_offset_y_mm"]))
        self.gaze.set_camera(self._camera_from_config())
        self.exercise.configure(exercise_section(cfg))
        self.config_epoch += 1

    def _camera_from_config(self) -> Optional[CameraModel]:
        cam = self.config["camera"]
        if cam["f_px"] is None:
            return None
        cx = cam["cx"]
        cy = cam["cy"]
        if cx is None or cy is None:
            raise ConfigError("camera.cx and camera.cy are required with camera.f_px")
        return CameraModel(cam["f_px"], cx, cy)

    def apply_config(self, new_config: dict) -> None:
        """Swap in an already-validated config document."""
        self.config = new_config
        self._apply_config()

    def set_profile(self, name: str) -> None:
        self.profile = load_profile(name)
        self.config = dict(self.config, profile=self.profile.name
                           if not name.endswith(".json") else name)

    def set_templates(self, templates: List[GestureTemplate]) -> None:
        self._templates = list(templates)
        self.exercise.set_templates(self._templates)

    def request(self, change: Callable[["Engine"], dict],
                done: Optional[Callable[[dict], None]] = None) -> None:
        """Queue a change to run at the next frame boundary (thread-safe).

        change receives the engine and returns a reply document; done,
        when given, is called with that reply plus the effective frame."""
        with self._pending_lock:
            self._pending.append((change, done))

    def _drain_pending(self) -> None:
        while True:
            with self._pending_lock:
                if not self._pending:
                    return
                change, done = self._pending.popleft()
            try:
                reply = change(self)
            except EngineError as exc:
                reply = {"ok": False, "error": type(exc).__name__,
                         "message": str(exc)}
                field = getattr(exc, "field", None)
                if field is not None:
                    reply["field"] = field
            if done is not None:
                reply.setdefault("effective_frame", self.frame_index)
                done(reply)

    # -- template recording --------------------------------------------------

    def start_recording(self, name: str, mode: str = "hold") -> dict:
        self._recording = {"name": name, "mode": mode, "rows": []}
        return {"ok": True, "recording": name}

    def stop_recording(self) -> dict:
        rec = self._recording
        self._recording = None
        if rec is None:
            return {"ok": False, "error": "NotRecording",
                    "message": "no template recording in progress"}
        template = build_template(rec["name"], rec["rows"], rec["mode"])
        self.set_templates(self._templates + [template])
        return {"ok": True, "template": {
            "name": template.name,
            "features": dict(template.features),
            "tol": dict(template.tolerances),
            "mode": template.mode,
        }}

    # -- pipeline ------------------------------------------------------------

    def step(self, frame: LandmarkFrame) -> List[InputCommand]:
        self._drain_pending()
        if self.last_t_ms is not None and frame.t_ms <= self.last_t_ms:
            raise NonMonotonicTime(
                f"frame at {frame.t_ms} ms not after {self.last_t_ms} ms")
        cfg = self.config
        t = frame.t_ms

        camera = self.gaze.camera or CameraModel.from_image(frame.image_w, frame.image_h)
        depth, source = resolve_depth(
            frame, camera, cfg["gaze"]["palm_k"],
            cfg["gaze"]["default_depth_mm"], cfg["gaze"]["iris_mm"])
        self.last_depth_mm = depth
        self.last_depth_source = source
        gated = source != DEPTH_DEFAULT and depth > cfg["max_range_mm"]
        self.last_gated = gated
        effective = replace(frame, hands=(), face=None, pose=None) if gated else frame

        events: List[GestureEvent] = []
        if cfg["modules"]["hand"]:
            by_side = {h.handedness: h for h in effective.hands}
            for tracker in (self.hand_left, self.hand_right):
                events.extend(tracker.step(by_side.get(tracker.side), t,
                                           frame.image_w, frame.image_h))
        if cfg["modules"]["head"]:
            events.extend(self.head.step(effective.face, t))
        if cfg["modules"]["gaze"]:
            events.extend(self.gaze.step(effective, t))
        if cfg["modules"]["exercise"]:
            events.extend(self.exercise.step(effective.pose, t,
                                             frame.image_w, frame.image_h))

        if self._recording is not None and effective.pose is not None:
            self._recording["rows"].append(
                extract_features(effective.pose, frame.image_w, frame.image_h))

        events = self._resolve_cursor_contention(events)
        self.recent_events.extend(events)

        commands: List[InputCommand] = []
        for event in events:
            for cmd in bind(event, self.profile):
                balanced = self._balance(cmd)
                if balanced is not None:
                    commands.append(balanced)

        self.frame_index += 1
        self.frames_seen += 1
        self.last_t_ms = t
        return commands

    def _resolve_cursor_contention(self, events: List[GestureEvent]) -> List[GestureEvent]:
        movers = {e.source for e in events if e.kind == ev.CURSOR_MOVE}
        if len(movers) <= 1:
            return events
        winner = next(s for s in self.config["cursor_priority"] if s in movers)
        return [e for e in events
                if e.kind != ev.CURSOR_MOVE or e.source == winner]

    def _balance(self, cmd: InputCommand) -> Optional[InputCommand]:
        """Suppress double-presses and spurious releases so completed
        sessions always have matched press/release multisets."""
        if cmd.cmd == KEY_DOWN:
            if cmd.key in self._held_keys:
                return None
            self._held_keys.add(cmd.key)
        elif cmd.cmd == KEY_UP:
            if cmd.key not in self._held_keys:
                return None
            self._held_keys.discard(cmd.key)
        elif cmd.cmd == MOUSE_DOWN:
            if cmd.key in self._held_buttons:
                return None
            self._held_buttons.add(cmd.key)
        elif cmd.cmd == MOUSE_UP:
            if cmd.key not in self._held_buttons:
                return None
            self._held_buttons.discard(cmd.key)
        return cmd

    def shutdown(self) -> List[InputCommand]:
        """Release everything still held; call once at end of stream."""
        t = self.last_t_ms if self.last_t_ms is not None else 0.0
        events: List[GestureEvent] = []
        for tracker in (self.hand_left, self.hand_right):
            events.extend(tracker.release_all(t))
        events.extend(self.head.release_all(t))
        events.extend(self.gaze.release_all(t))
        events.extend(self.exercise.release_all(t))
        commands: List[InputCommand] = []
        for event in events:
            for cmd in bind(event, self.profile):
                balanced = self._balance(cmd)
                if balanced is not None:
                    commands.append(balanced)
        # anything a profile held without a leaving twin gets released here
        for key in sorted(self._held_keys):
            commands.append(InputCommand(t, KEY_UP, key=key))
        for button in sorted(self._held_buttons):
            commands.append(InputCommand(t, MOUSE_UP, key=button))
        self._held_keys.clear()
        self._held_buttons.clear()
        return commands

    # -- introspection -------------------------------------------------------

    def telemetry(self) -> dict:
        cursor_hand = (self.hand_left if self.hand_left.is_cursor_hand
                       else self.hand_right)
        daoi = cursor_hand.daoi
        pose = self.head.last_pose
        return {
            "type": "telemetry",
            "frame": self.frame_index,
            "epoch": self.config_epoch,
            "t_ms": self.last_t_ms,
            "depth_mm": self.last_depth_mm,
            "depth_source": self.last_depth_source,
            "gated": self.last_gated,
            "config": self.config,
            "ear_l": self.head.last_ear_l,
            "ear_r": self.head.last_ear_r,
            "mar": self.head.last_mar,
            "head_pose": None if pose is None else
                {"yaw": pose.yaw, "pitch": pose.pitch, "roll": pose.roll},
            "pinch": cursor_hand.last_pinch,
            "daoi": None if daoi is None else
                {"cx": daoi.cx, "cy": daoi.cy,
                 "width": daoi.width, "height": daoi.height},
            "active_labels": self.exercise.active_labels,
            "events": [e.as_dict() for e in self.recent_events],
        }

    def summary(self) -> dict:
        return {
            "frames": self.frames_seen,
            "lines_skipped": self.lines_skipped,
            "exercise": {label: {"reps": int(s["reps"]),
                                 "active_ms": s["active_ms"]}
                         for label, s in sorted(self.exercise.stats.items())},
        }


def build_template(name: str, rows: List, mode: str = "hold") -> GestureTemplate:
    """Mean/tolerance template from recorded PoseFeatures rows. Only
    similarity-invariant features participate; tolerance is twice the
    observed spread with a sane floor per feature family."""
    from airinput.exercise import TEMPLATE_FEATURES

    features: Dict[str, float] = {}
    tols: Dict[str, float] = {}
    for fname in TEMPLATE_FEATURES:
        values = [row.get(fname) for row in rows]
        values = [v for v in values if v is not None]
        if not values:
            continue
        mean = sum(values) / len(values)
        var = sum((v - mean) ** 2 for v in values) / len(values)
        floor = 5.0 if fname.startswith(("knee", "elbow")) else 0.05
        features[fname] = mean
        tols[fname] = max(2.0 * var ** 0.5, floor)
    return GestureTemplate(name=name, features=features, tolerances=tols, mode=mode)


def run_stream(engine: Engine, lines: Iterable[str], sink,
               strict: bool = False,
               on_frame: Optional[Callable[[Engine], None]] = None,
               warn: Optional[Callable[[str], None]] = None) -> int:
    """Feed NDJSON lines through the engine into a sink.

    Lenient mode (default) skips malformed or out-of-order lines with a
    warning; strict mode stops at the first one. Returns the exit code
    (0 clean, 2 strict abort)."""
    code = 0
    for lineno, line in enumerate(lines, start=1):
        line = line.strip()
        if not line:
            continue
        try:
            if _is_meta_line(line):
                continue
            frame = parse_frame(line)
            commands = engine.step(frame)
        except (MalformedRecord, SchemaViolation, NonMonotonicTime) as exc:
            engine.lines_skipped += 1
            if warn is not None:
                warn(f"line {lineno}: {type(exc).__name__}: {exc}")
            if strict:
                code = 2
                break
            continue
        for cmd in commands:
            sink.write(cmd)
        if on_frame is not None:
            on_frame(engine)
    for cmd in engine.shutdown():
        sink.write(cmd)
    return code


def _is_meta_line(line: str) -> bool:
    # fixture headers: {"meta": {...}} written by recorders
    if '"meta"' not in line:
        return False
    import json

    try:
        doc = json.loads(line)
    except ValueError:
        return False
    return isinstance(doc, dict) and "meta" in doc
