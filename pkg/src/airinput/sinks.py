"""Input-command sinks.

A sink is anything that accepts a totally ordered stream of
InputCommand values. The NDJSON sink is the reference implementation
and the golden-test format; OS injection is a declared interface so a
platform backend can slot in without touching the engine.
"""

import json
from typing import IO, Optional

from airinput.bindings import (
    KEY_DOWN,
    KEY_UP,
    MOUSE_DOWN,
    MOUSE_MOVE_ABS,
    MOUSE_MOVE_REL,
    MOUSE_UP,
    WHEEL,
    InputCommand,
)


class NullSink:
    """Swallows everything; useful for timing runs and idle checks."""

    def write(self, cmd: InputCommand) -> None:
        pass

    def close(self) -> None:
        pass


class NdjsonSink:
    """One compact JSON object per command, bit-stable across runs."""

    def __init__(self, target):
        if hasattr(target, "write"):
            self._fh: IO[str] = target
            self._owned = False
        else:
            self._fh = open(target, "w", encoding="utf-8")
            self._owned = True

    def write(self, cmd: InputCommand) -> None:
        self._fh.write(json.dumps(cmd.as_dict(), separators=(",", ":")) + "\n")

    def close(self) -> None:
        self._fh.flush()
        if self._owned:
            self._fh.close()


class OsInjectionSink:
    """Declared adapter from commands to native input injection.

    Subclasses implement the low-level methods for their platform
    (XTest, SendInput, CGEvent...). No backend ships here; the engine
    only relies on the write/close surface.
    """

    def write(self, cmd: InputCommand) -> None:
        if cmd.cmd == KEY_DOWN:
            self.inject_key(cmd.key, True)
        elif cmd.cmd == KEY_UP:
            self.inject_key(cmd.key, False)
        elif cmd.cmd == MOUSE_DOWN:
            self.inject_button(cmd.key, True)
        elif cmd.cmd == MOUSE_UP:
            self.inject_button(cmd.key, False)
        elif cmd.cmd == MOUSE_MOVE_ABS:
            self.inject_move(int(round(cmd.x)), int(round(cmd.y)), absolute=True)
        elif cmd.cmd == MOUSE_MOVE_REL:
            self.inject_move(int(round(cmd.x)), int(round(cmd.y)), absolute=False)
        elif cmd.cmd == WHEEL:
            self.inject_wheel(cmd.delta)

    def close(self) -> None:
        pass

    # platform surface -------------------------------------------------------

    def inject_key(self, key: str, down: bool) -> None:
        raise NotImplementedError("no OS injection backend in this build")

    def inject_button(self, button: str, down: bool) -> None:
        raise NotImplementedError("no OS injection backend in this build")

    def inject_move(self, x: int, y: int, absolute: bool) -> None:
        raise NotImplementedError("no OS injection backend in this build")

    def inject_wheel(self, delta: int) -> None:
        raise NotImplementedError("no OS injection backend in this build")


def make_sink(spec: Optional[str]):
    """CLI sink selector: "null", "log:PATH", or "log:-" for stdout."""
    import sys

    if spec is None or spec == "null":
        return NullSink()
    if spec.startswith("log:"):
        path = spec[4:]
        if path == "-" or path == "":
            return NdjsonSink(sys.stdout)
        return NdjsonSink(path)
    raise ValueError(f"unknown sink {spec!r} (use null or log:PATH)")
