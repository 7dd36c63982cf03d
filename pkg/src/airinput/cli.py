"""Command line entry points: run, replay, record-template."""

import argparse
import json
import socket
import sys
from typing import Iterable, Optional

from airinput.config import default_config, load_config_file
from airinput.engine import Engine, _is_meta_line, build_template, run_stream
from airinput.errors import ConfigError, EngineError, MalformedRecord, SchemaViolation
from airinput.model import parse_frame
from airinput.sinks import make_sink


def _load_config(path: Optional[str]) -> dict:
    if path is None:
        return default_config()
    return load_config_file(path)


def _open_input(spec: str):
    """Returns (line iterator, closer) for --input stdin|tcp://HOST:PORT.

    tcp inputs connect to an already-listening frame source (the
    provider binds, this side dials)."""
    if spec == "stdin":
        return sys.stdin, lambda: None
    if spec.startswith("tcp://"):
        host, _, port = spec[len("tcp://"):].partition(":")
        if not host or not port:
            raise ConfigError(f"bad --input {spec!r}: expected tcp://HOST:PORT")
        try:
            port_no = int(port)
        except ValueError:
            raise ConfigError(f"bad --input {spec!r}: port must be an integer")
        conn = socket.create_connection((host, port_no))
        reader = conn.makefile("r", encoding="utf-8", newline="\n")
        return reader, conn.close
    raise ConfigError(f"bad --input {spec!r}: expected stdin or tcp://HOST:PORT")


def _cmd_run(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    engine = Engine(config, profile=args.profile)
    sink = make_sink(args.sink)
    server = None
    on_frame = None
    if args.control_port is not None:
        from airinput.control import ControlServer

        server = ControlServer(engine, port=args.control_port)
        port = server.start()
        print(f"control listening on 127.0.0.1:{port}", file=sys.stderr)
        on_frame = server.publish_telemetry
    lines, close_input = _open_input(args.input)
    try:
        code = run_stream(engine, lines, sink, strict=args.strict,
                          on_frame=on_frame,
                          warn=lambda m: print(f"warning: {m}", file=sys.stderr))
    finally:
        close_input()
        sink.close()
        if server is not None:
            server.stop()
    print(json.dumps(engine.summary(), sort_keys=True), file=sys.stderr)
    return code


def _cmd_replay(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    engine = Engine(config, profile=args.profile)
    sink = make_sink(f"log:{args.out}")
    with open(args.fixture, "r", encoding="utf-8") as fixture:
        try:
            code = run_stream(
                engine, fixture, sink, strict=args.strict,
                warn=lambda m: print(f"warning: {m}", file=sys.stderr))
        finally:
            sink.close()
    print(json.dumps(engine.summary(), sort_keys=True), file=sys.stderr)
    return code


def _cmd_record_template(args: argparse.Namespace) -> int:
    from airinput.exercise import extract_features

    rows = []
    with open(args.fixture, "r", encoding="utf-8") as fixture:
        for line in fixture:
            line = line.strip()
            if not line or _is_meta_line(line):
                continue
            try:
                frame = parse_frame(line)
            except (MalformedRecord, SchemaViolation):
                continue
            if frame.t_ms < args.from_ms or frame.t_ms > args.to_ms:
                continue
            if frame.pose is None:
                continue
            rows.append(extract_features(frame.pose, frame.image_w,
                                         frame.image_h))
    if not rows:
        print(f"error: no pose frames between {args.from_ms} and "
              f"{args.to_ms} ms in {args.fixture}", file=sys.stderr)
        return 1
    template = build_template(args.name, rows, args.mode)
    doc = {"name": template.name, "features": dict(template.features),
           "tol": dict(template.tolerances), "mode": template.mode}
    line = json.dumps(doc, sort_keys=True)
    if args.out is None or args.out == "-":
        print(line)
    else:
        with open(args.out, "a", encoding="utf-8") as out:
            out.write(line + "\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="engine",
        description="Turn landmark NDJSON streams into input commands.")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="process a live stream")
    run_p.add_argument("--input", default="stdin",
                       help="stdin or tcp://HOST:PORT (default stdin)")
    run_p.add_argument("--config", help="config file (YAML or JSON)")
    run_p.add_argument("--profile", help="binding profile name or .json path")
    run_p.add_argument("--sink", default="log:-",
                       help="log:PATH, log:- for stdout, or null")
    run_p.add_argument("--control-port", type=int, default=None,
                       help="serve the control protocol on this port (0 = ephemeral)")
    run_p.add_argument("--strict", action="store_true",
                       help="abort on the first malformed input line")
    run_p.set_defaults(func=_cmd_run)

    replay_p = sub.add_parser("replay", help="replay a fixture to a log file")
    replay_p.add_argument("--fixture", required=True)
    replay_p.add_argument("--config", help="config file (YAML or JSON)")
    replay_p.add_argument("--profile", help="binding profile name or .json path")
    replay_p.add_argument("--out", required=True, help="command log path")
    replay_p.add_argument("--strict", action="store_true")
    replay_p.set_defaults(func=_cmd_replay)

    rec_p = sub.add_parser("record-template",
                           help="build a pose template from a fixture segment")
    rec_p.add_argument("--fixture", required=True)
    rec_p.add_argument("--from", dest="from_ms", type=float, required=True)
    rec_p.add_argument("--to", dest="to_ms", type=float, required=True)
    rec_p.add_argument("--name", required=True)
    rec_p.add_argument("--mode", choices=("hold", "rep"), default="hold")
    rec_p.add_argument("--out", help="append the template line here (default stdout)")
    rec_p.set_defaults(func=_cmd_record_template)
    return parser


def main(argv: Optional[Iterable[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv if argv is None else list(argv))
    try:
        return args.func(args)
    except EngineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":
    sys.exit(main())
