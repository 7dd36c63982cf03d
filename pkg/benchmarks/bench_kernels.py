#!/usr/bin/env python3
"""Compare the compiled kernel extension against the pure-Python fallback.

Two measurements:

  kernels   tight-loop microbenchmarks over each hot function, importing
            both backend modules side by side (best of 5 runs each)
  engine    end-to-end frames/sec over a synthetic all-modules stream,
            re-executing this script under AIRINPUT_PURE=0/1 because the
            backend is frozen at import time

Usage: python3 benchmarks/bench_kernels.py [--engine] [--frames N]
"""

import argparse
import json
import math
import os
import random
import subprocess
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

REPEATS = 5
CALLS = 200_000


def _time_loop(fn, args_seq):
    best = math.inf
    for _ in range(REPEATS):
        start = time.perf_counter()
        for args in args_seq:
            fn(*args)
        best = min(best, time.perf_counter() - start)
    return best


def bench_kernels():
    from airinput import _kernels_py as pure

    try:
        from airinput import _kernels as compiled
    except ImportError:
        print("compiled extension not built; nothing to compare", file=sys.stderr)
        return 1

    rng = random.Random(2024)

    def pts(n):
        return [tuple(rng.uniform(-2.0, 2.0) for _ in range(n)) for _ in range(CALLS)]

    workloads = [
        ("dist", pts(4)),
        ("joint_angle_deg", pts(6)),
        ("eye_aspect_ratio", pts(12)),
        ("mouth_aspect_ratio", pts(16)),
        ("smoothing_alpha", [(rng.uniform(0.01, 0.1), rng.uniform(0.5, 5.0))
                             for _ in range(CALLS)]),
        ("one_euro_step", [(rng.uniform(-1, 1), rng.uniform(0.01, 0.05),
                            rng.uniform(-1, 1), rng.uniform(-5, 5),
                            1.0, 0.007, 1.0) for _ in range(CALLS)]),
    ]

    print(f"{CALLS} calls per function, best of {REPEATS} runs\n")
    print(f"{'function':<20} {'pure':>10} {'compiled':>10} {'speedup':>9}")
    for name, args_seq in workloads:
        t_pure = _time_loop(getattr(pure, name), args_seq)
        t_comp = _time_loop(getattr(compiled, name), args_seq)
        print(f"{name:<20} {t_pure * 1e9 / CALLS:>8.0f} ns "
              f"{t_comp * 1e9 / CALLS:>8.0f} ns {t_pure / t_comp:>8.1f}x")
    return 0


def bench_engine_once(frames):
    """Measure frames/sec under whatever backend this process imported."""
    from synth import make_face, make_frame, make_hand, squat_trace

    from airinput.config import validate_config
    from airinput.engine import Engine, run_stream
    from airinput.kernels import BACKEND
    from airinput.model import serialize_frame
    from airinput.sinks import NullSink

    squat = squat_trace(1, fps=30.0)
    lines = []
    for i in range(frames):
        phase = i % 60
        frame = make_frame(
            i * (1000.0 / 30.0),
            hands=[make_hand(pinch=0.2 if phase < 30 else 0.8,
                             wrist=(0.4 + 0.002 * phase, 0.7))],
            face=make_face(center=(320.0, 280.0), iris_left=20.0,
                           iris_right=20.0),
            pose=squat[phase].pose)
        lines.append(serialize_frame(frame))

    engine = Engine(validate_config(
        {"modules": {"hand": True, "head": True, "gaze": True,
                     "exercise": True}}))
    start = time.perf_counter()
    run_stream(engine, lines, NullSink())
    elapsed = time.perf_counter() - start
    print(json.dumps({"backend": BACKEND, "frames": frames,
                      "seconds": round(elapsed, 4),
                      "fps": round(frames / elapsed, 1)}))
    return 0


def bench_engine(frames):
    results = {}
    for pure in ("0", "1"):
        env = dict(os.environ, AIRINPUT_PURE=pure)
        proc = subprocess.run(
            [sys.executable, __file__, "--engine-child", "--frames", str(frames)],
            env=env, capture_output=True, text=True)
        if proc.returncode != 0:
            print(proc.stderr, file=sys.stderr)
            return 1
        row = json.loads(proc.stdout.strip().splitlines()[-1])
        results[row["backend"]] = row
        print(f"{row['backend']:<10} {row['frames']} frames in "
              f"{row['seconds']:.2f} s = {row['fps']:.0f} fps")
    if "pure" in results and "compiled" in results:
        ratio = results["pure"]["seconds"] / results["compiled"]["seconds"]
        print(f"compiled end-to-end speedup: {ratio:.2f}x")
    return 0


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--engine", action="store_true",
                        help="also measure end-to-end stream throughput")
    parser.add_argument("--engine-child", action="store_true",
                        help=argparse.SUPPRESS)
    parser.add_argument("--frames", type=int, default=1800)
    args = parser.parse_args(argv)

    if args.engine_child:
        return bench_engine_once(args.frames)
    code = bench_kernels()
    if code == 0 and args.engine:
        print()
        code = bench_engine(args.frames)
    return code


if __name__ == "__main__":
    sys.exit(main())
