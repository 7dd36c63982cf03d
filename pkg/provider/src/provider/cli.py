"""provider CLI: stream, record, replay."""

import argparse
import itertools
import json
import sys
from typing import Iterator, Optional

from provider.config import MODELS, ProviderConfig, ProviderError
from provider.io import meta_line, open_out, pace_sleep, replay_lines, serialize
from provider.synthetic import SyntheticScene


def _config_from(args) -> ProviderConfig:
    models = frozenset(m for m in args.models.split(",") if m)
    return ProviderConfig(camera=args.camera, fps=args.fps, models=models,
                          mirror=args.mirror, backend=args.backend,
                          seed=args.seed)


def _frame_count(args) -> Optional[int]:
    if args.frames is not None:
        return args.frames
    if args.duration is not None:
        return max(1, round(args.duration * args.fps))
    return None


def _frames(config: ProviderConfig, count: Optional[int]) -> Iterator[dict]:
    if config.backend == "synthetic":
        scene = SyntheticScene(config)
        indices = range(count) if count is not None else itertools.count()
        return (scene.frame(i) for i in indices)
    from provider.camera import CameraScene

    frames = CameraScene(config).frames()
    return itertools.islice(frames, count) if count is not None else frames


def _emit(lines: Iterator[str], out_spec: str) -> int:
    out, owned = open_out(out_spec)
    try:
        for line in lines:
            out.write(line + "\n")
        out.flush()
    except BrokenPipeError:
        pass   # the consumer hung up; that is its call to make
    finally:
        if owned:
            out.close()
    return 0


def _cmd_stream(args) -> int:
    config = _config_from(args)
    count = _frame_count(args)
    frames = _frames(config, count)
    if args.pace and config.backend == "synthetic":
        # a real camera paces itself; the synthetic scene must sleep to
        # honor the target fps
        def paced(source):
            prev = None
            for frame in source:
                pace_sleep(prev, frame["t"])
                prev = frame["t"]
                yield frame

        frames = paced(frames)
    return _emit((serialize(f) for f in frames), args.out)


def _cmd_record(args) -> int:
    config = _config_from(args)
    count = _frame_count(args)
    if count is None:
        print("error: record needs --duration or --frames", file=sys.stderr)
        return 1
    body = (serialize(f) for f in _frames(config, count))
    return _emit(itertools.chain([meta_line(config, count)], body), args.out)


def _cmd_replay(args) -> int:
    def lines():
        prev_t = None
        for line in replay_lines(args.path):
            if args.pace:
                t = json.loads(line).get("t")
                pace_sleep(prev_t, t)
                prev_t = t
            yield line

    return _emit(lines(), args.out)


def _capture_flags(sub):
    sub.add_argument("--backend", choices=("synthetic", "camera"),
                     default="synthetic")
    sub.add_argument("--camera", type=int, default=0, help="camera index")
    sub.add_argument("--fps", type=float, default=30.0)
    sub.add_argument("--models", default=",".join(MODELS),
                     help="comma list from hands,face,iris,pose")
    sub.add_argument("--mirror", action="store_true",
                     help="flip x and swap handedness")
    sub.add_argument("--seed", type=int, default=0,
                     help="synthetic scene phase seed")
    sub.add_argument("--frames", type=int, default=None,
                     help="stop after N frames")
    sub.add_argument("--duration", type=float, default=None,
                     help="stop after this many seconds of frames")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="provider", description="Emit landmark NDJSON frames.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_stream = sub.add_parser("stream", help="capture and emit frames")
    _capture_flags(p_stream)
    p_stream.add_argument("--out", default="-",
                          help="-, a file path, or tcp://HOST:PORT to serve")
    p_stream.add_argument("--pace", action="store_true",
                          help="emit synthetic frames at the target fps "
                               "instead of as fast as possible")
    p_stream.set_defaults(fn=_cmd_stream)

    p_record = sub.add_parser("record", help="capture to a fixture file")
    _capture_flags(p_record)
    p_record.add_argument("--out", required=True)
    p_record.set_defaults(fn=_cmd_record)

    p_replay = sub.add_parser("replay", help="re-emit a recorded fixture")
    p_replay.add_argument("path")
    p_replay.add_argument("--out", default="-")
    p_replay.add_argument("--pace", action="store_true",
                          help="sleep to reproduce original timing")
    p_replay.set_defaults(fn=_cmd_replay)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ProviderError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":
    sys.exit(main())
