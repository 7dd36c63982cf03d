"""Frame serialization, output destinations, and fixture files."""

import json
import socket
import sys
import time
from typing import IO, Iterator, Optional, Tuple

from provider.config import ProviderConfig, ProviderError


def serialize(frame: dict) -> str:
    return json.dumps(frame, separators=(",", ":"))


def meta_line(config: ProviderConfig, frames: Optional[int]) -> str:
    return serialize({"meta": {
        "provider": "synthetic" if config.backend == "synthetic" else "camera",
        "fps": config.fps,
        "models": sorted(config.models),
        "mirror": config.mirror,
        "seed": config.seed,
        "img": {"w": config.image_w, "h": config.image_h},
        "frames": frames,
    }})


def read_meta(path: str) -> Optional[dict]:
    with open(path, "r", encoding="utf-8") as fh:
        first = fh.readline()
    try:
        doc = json.loads(first)
    except json.JSONDecodeError:
        return None
    if isinstance(doc, dict) and "meta" in doc:
        return doc["meta"]
    return None


class _TcpWriter:
    """Bind, wait for one consumer, then stream lines to it."""

    def __init__(self, host: str, port: int):
        self._server = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        self._server.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        self._server.bind((host, port))
        self._server.listen(1)
        print(f"provider listening on {host}:{self._server.getsockname()[1]}",
              file=sys.stderr, flush=True)
        conn, _ = self._server.accept()
        self._file = conn.makefile("w", encoding="utf-8")
        self._conn = conn

    def write(self, text: str):
        self._file.write(text)

    def flush(self):
        self._file.flush()

    def close(self):
        self._file.close()
        self._conn.close()
        self._server.close()


def open_out(spec: str) -> Tuple[IO, bool]:
    """Resolve an output spec to (writer, owned). '-' is stdout."""
    if spec == "-":
        return sys.stdout, False
    if spec.startswith("tcp://"):
        rest = spec[len("tcp://"):]
        host, _, port = rest.rpartition(":")
        if not host or not port.isdigit():
            raise ProviderError(f"bad tcp destination: {spec!r}")
        return _TcpWriter(host, int(port)), True
    return open(spec, "w", encoding="utf-8"), True


def replay_lines(path: str) -> Iterator[str]:
    """Body lines of a fixture, verbatim, stopping cleanly at a torn tail.

    The metadata header is dropped. A final line cut off mid-record (a
    truncated download, a crashed recorder) ends the stream instead of
    emitting garbage.
    """
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh):
            stripped = line.strip()
            if not stripped:
                continue
            try:
                doc = json.loads(stripped)
            except json.JSONDecodeError:
                return
            if lineno == 0 and isinstance(doc, dict) and "meta" in doc:
                continue
            yield stripped


def pace_sleep(prev_t: Optional[float], t: float):
    if prev_t is not None and t > prev_t:
        time.sleep((t - prev_t) / 1000.0)
