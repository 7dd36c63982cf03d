#!/usr/bin/env python3
"""Regenerate the committed replay fixtures and their expected logs.

Each fixture is a synthetic landmark stream plus the config/profile it
replays under; the .expected.ndjson next to it is the engine's exact
command log, committed as the golden reference. Rerun after any
intentional behavior change:

    python3 tools/make_fixtures.py
"""

import json
import sys
from pathlib import Path

import yaml

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))
sys.path.insert(0, str(ROOT / "src"))

from synth import (  # noqa: E402
    cycling_trace,
    make_face,
    make_frame,
    make_hand,
    squat_trace,
)

from airinput.config import validate_config  # noqa: E402
from airinput.engine import Engine, run_stream  # noqa: E402
from airinput.model import serialize_frame  # noqa: E402
from airinput.sinks import NdjsonSink  # noqa: E402

FIXTURES = ROOT / "tests" / "fixtures"
DT = 40.0  # 25 fps keeps every timestamp an integer

HEAD_DEMO_PROFILE = {
    "name": "head-demo",
    "bindings": {
        "blink": {"action": "key_tap", "key": "b"},
        "wink_left": {"action": "mouse_button", "button": "left",
                      "mode": "click"},
        "wink_right": {"action": "mouse_button", "button": "right",
                       "mode": "click"},
        "mouth_open": {"action": "key_hold", "key": "m"},
        "profile_left": {"action": "key_tap", "key": "comma"},
        "profile_right": {"action": "key_tap", "key": "period"},
    },
}


def seq(t0, *frame_groups):
    """Chain frame factories into a timed list; each group is (count, fn(i))."""
    frames = []
    t = t0
    for count, fn in frame_groups:
        for i in range(count):
            frames.append(fn(t, i))
            t += DT
    return frames


def pinch_click_frames():
    open_hand = lambda t, i: make_frame(t, hands=[make_hand(pinch=0.8)])
    closed = lambda t, i: make_frame(t, hands=[make_hand(pinch=0.2)])
    return seq(0.0, (15, open_hand), (4, closed), (4, open_hand))


def idle_hand_frames():
    # palm away the whole time; pinch distance wiggles to prove the
    # idle gate wins over everything downstream
    def idle(t, i):
        return make_frame(t, hands=[make_hand(toward=False,
                                              pinch=0.8 if i % 4 < 2 else 0.2)])
    return seq(0.0, (30, idle))


def cursor_diagonal_frames():
    away = lambda t, i: make_frame(t, hands=[make_hand(toward=False, wrist=(0.5, 0.70))])
    anchor = lambda t, i: make_frame(t, hands=[make_hand(wrist=(0.5, 0.70), pinch=0.8)])

    def drop(t, i):
        # hand falls from the anchor point toward the sweep start
        f = (i + 1) / 6.0
        wrist = (0.5 - 0.08 * f, 0.70 + 0.19 * f)
        return make_frame(t, hands=[make_hand(wrist=wrist, pinch=0.8)])

    def sweep(t, i):
        f = i / 29.0
        wrist = (0.42 + 0.16 * f, 0.89 + 0.08 * f)
        return make_frame(t, hands=[make_hand(wrist=wrist, pinch=0.8)])

    hold = lambda t, i: make_frame(t, hands=[make_hand(wrist=(0.58, 0.97), pinch=0.8)])
    return seq(0.0, (10, away), (9, anchor), (6, drop), (30, sweep), (3, hold))


def head_triggers_frames():
    neutral = lambda t, i: make_frame(t, face=make_face())
    blink = lambda t, i: make_frame(t, face=make_face(ear=0.12))
    wink_l = lambda t, i: make_frame(t, face=make_face(ear_left=0.12))
    wink_r = lambda t, i: make_frame(t, face=make_face(ear_right=0.12))
    mouth = lambda t, i: make_frame(t, face=make_face(mar=0.7))
    right = lambda t, i: make_frame(t, face=make_face(yaw=30.0))
    left = lambda t, i: make_frame(t, face=make_face(yaw=-30.0))
    return seq(0.0,
               (10, neutral), (3, blink), (8, neutral),
               (4, wink_l), (8, neutral), (4, wink_r), (8, neutral),
               (6, mouth), (8, neutral),
               (8, right), (10, neutral), (8, left), (6, neutral))


def gaze_sweep_frames():
    def look(t, i):
        f = i / 39.0
        yaw = -6.0 + 12.0 * f
        return make_frame(t, face=make_face(center=(320.0, 280.0), yaw=yaw,
                                            iris_left=20.0, iris_right=20.0))

    still = lambda t, i: make_frame(t, face=make_face(center=(320.0, 280.0),
                                                      iris_left=20.0,
                                                      iris_right=20.0))
    return seq(0.0, (40, look), (5, still))


def out_of_range_frames():
    # iris diameter 3 px at f=640 -> resolved depth 2496 mm, past the
    # 2000 mm default ceiling; the pinching hand must stay suppressed
    def far(t, i):
        return make_frame(t, hands=[make_hand(pinch=0.8 if i % 4 < 2 else 0.2)],
                          face=make_face(iris_left=3.0, iris_right=3.0))
    return seq(0.0, (30, far))


def build_all():
    FIXTURES.mkdir(parents=True, exist_ok=True)
    profile_path = FIXTURES / "head_demo.profile.json"
    profile_path.write_text(json.dumps(HEAD_DEMO_PROFILE, indent=2,
                                       sort_keys=True) + "\n",
                            encoding="utf-8")

    specs = [
        ("pinch_click", pinch_click_frames(), {}, None),
        ("idle_hand", idle_hand_frames(), {}, None),
        ("cursor_diagonal", cursor_diagonal_frames(), {}, None),
        ("squat_5", squat_trace(5, fps=25.0),
         {"modules": {"hand": False, "exercise": True},
          "mode": "standing", "profile": "gaming"}, None),
        ("cycling_10s", cycling_trace(10, fps=25.0),
         {"modules": {"hand": False, "exercise": True},
          "profile": "gaming"}, None),
        ("head_triggers", head_triggers_frames(),
         {"modules": {"hand": False, "head": True}}, str(profile_path)),
        ("gaze_sweep", gaze_sweep_frames(),
         {"modules": {"hand": False, "gaze": True}}, None),
        ("out_of_range", out_of_range_frames(), {}, None),
    ]

    for name, frames, overrides, profile in specs:
        fixture = FIXTURES / f"{name}.ndjson"
        meta = {"meta": {"fixture": name, "fps": 1000.0 / DT,
                         "frames": len(frames)}}
        with fixture.open("w", encoding="utf-8") as out:
            out.write(json.dumps(meta, separators=(",", ":"),
                                 sort_keys=True) + "\n")
            for frame in frames:
                out.write(serialize_frame(frame) + "\n")

        config_path = FIXTURES / f"{name}.config.yaml"
        if overrides:
            config_path.write_text(yaml.safe_dump(overrides, sort_keys=True),
                                   encoding="utf-8")
        elif config_path.exists():
            config_path.unlink()

        engine = Engine(validate_config(overrides), profile=profile)
        sink = NdjsonSink(str(FIXTURES / f"{name}.expected.ndjson"))
        with fixture.open("r", encoding="utf-8") as lines:
            code = run_stream(engine, lines, sink)
        sink.close()
        if code != 0:
            raise SystemExit(f"{name}: replay failed with exit {code}")
        expected = (FIXTURES / f"{name}.expected.ndjson").read_text().splitlines()
        print(f"{name}: {len(frames)} frames -> {len(expected)} commands")


if __name__ == "__main__":
    build_all()
