"""Control channel: a local TCP socket speaking NDJSON messages.

Clients send {"type": "get"|"set"|"profile"|"record", ...} and receive
{"type": "ack"|"error", ...} replies; the server pushes one
{"type": "telemetry", ...} message per processed frame. Mutating
requests are queued to the engine and applied at the next frame
boundary; their acks carry the frame index at which they took effect.
The engine thread never blocks on a slow client: writes that would
block drop the client instead.
"""

import json
import socket
import threading
from typing import Optional

from airinput.config import set_field
from airinput.engine import Engine


def _dumps(doc: dict) -> bytes:
    return (json.dumps(doc, separators=(",", ":")) + "\n").encode("utf-8")


class _Client:
    def __init__(self, server: "ControlServer", conn: socket.socket):
        self.server = server
        self.conn = conn
        self.lock = threading.Lock()
        self.alive = True

    def send(self, payload: bytes) -> None:
        with self.lock:
            if not self.alive:
                return
            try:
                self.conn.sendall(payload)
            except OSError:
                self.alive = False

    def close(self) -> None:
        with self.lock:
            self.alive = False
            try:
                self.conn.shutdown(socket.SHUT_RDWR)
            except OSError:
                pass
            self.conn.close()

    def run(self) -> None:
        reader = self.conn.makefile("r", encoding="utf-8", newline="\n")
        try:
            for line in reader:
                line = line.strip()
                if not line:
                    continue
                try:
                    msg = json.loads(line)
                    if not isinstance(msg, dict):
                        raise ValueError("message must be an object")
                except ValueError as exc:
                    self.send(_dumps({"type": "error", "ok": False,
                                      "error": "MalformedMessage",
                                      "message": str(exc)}))
                    continue
                self.server.handle(self, msg)
        except OSError:
            pass
        finally:
            self.alive = False
            self.server.forget(self)


class ControlServer:
    def __init__(self, engine: Engine, port: int = 0, host: str = "127.0.0.1"):
        self.engine = engine
        self.host = host
        self.port = port
        self._sock: Optional[socket.socket] = None
        self._clients: list = []
        self._clients_lock = threading.Lock()
        self._accept_thread: Optional[threading.Thread] = None
        self._stopping = False

    def start(self) -> int:
        """Bind and start accepting; returns the bound port."""
        sock = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        sock.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        sock.bind((self.host, self.port))
        sock.listen(8)
        self._sock = sock
        self.port = sock.getsockname()[1]
        self._accept_thread = threading.Thread(target=self._accept_loop,
                                               daemon=True)
        self._accept_thread.start()
        return self.port

    def stop(self) -> None:
        self._stopping = True
        if self._sock is not None:
            try:
                self._sock.close()
            except OSError:
                pass
        with self._clients_lock:
            clients = list(self._clients)
            self._clients.clear()
        for client in clients:
            client.close()

    def _accept_loop(self) -> None:
        assert self._sock is not None
        while not self._stopping:
            try:
                conn, _addr = self._sock.accept()
            except OSError:
                return
            client = _Client(self, conn)
            with self._clients_lock:
                self._clients.append(client)
            threading.Thread(target=client.run, daemon=True).start()

    def forget(self, client: _Client) -> None:
        with self._clients_lock:
            if client in self._clients:
                self._clients.remove(client)

    # -- engine-side hook ------------------------------------------------

    def publish_telemetry(self, engine: Engine) -> None:
        """Called once per processed frame from the pipeline thread."""
        with self._clients_lock:
            clients = list(self._clients)
        if not clients:
            return
        payload = _dumps(engine.telemetry())
        for client in clients:
            client.send(payload)

    # -- request handling --------------------------------------------------

    def handle(self, client: _Client, msg: dict) -> None:
        kind = msg.get("type")
        if kind == "get":
            client.send(_dumps({"type": "ack", "ok": True,
                                "config": self.engine.config,
                                "profile": self.engine.profile.name,
                                "epoch": self.engine.config_epoch,
                                "frame": self.engine.frame_index}))
        elif kind == "set":
            self._handle_set(client, msg)
        elif kind == "profile":
            self._handle_profile(client, msg)
        elif kind == "record":
            self._handle_record(client, msg)
        else:
            client.send(_dumps({"type": "error", "ok": False,
                                "error": "UnknownType",
                                "message": f"unknown message type {kind!r}"}))

    def _handle_set(self, client: _Client, msg: dict) -> None:
        field = msg.get("field")
        if not isinstance(field, str) or "value" not in msg:
            client.send(_dumps({"type": "error", "ok": False,
                                "field": field,
                                "error": "MalformedMessage",
                                "message": "set needs string 'field' and 'value'"}))
            return
        value = msg["value"]

        def change(engine: Engine) -> dict:
            engine.apply_config(set_field(engine.config, field, value))
            return {"type": "ack", "ok": True, "field": field, "value": value,
                    "epoch": engine.config_epoch}

        def done(reply: dict) -> None:
            if not reply.get("ok"):
                reply = {"type": "error", **reply, "field": field}
            client.send(_dumps(reply))

        self.engine.request(change, done)

    def _handle_profile(self, client: _Client, msg: dict) -> None:
        name = msg.get("name")
        if not isinstance(name, str):
            client.send(_dumps({"type": "error", "ok": False,
                                "error": "MalformedMessage",
                                "message": "profile needs string 'name'"}))
            return

        def change(engine: Engine) -> dict:
            engine.set_profile(name)
            return {"type": "ack", "ok": True, "profile": engine.profile.name}

        def done(reply: dict) -> None:
            if not reply.get("ok"):
                reply = {"type": "error", **reply}
            client.send(_dumps(reply))

        self.engine.request(change, done)

    def _handle_record(self, client: _Client, msg: dict) -> None:
        action = msg.get("action")
        if action not in ("start", "stop"):
            client.send(_dumps({"type": "error", "ok": False,
                                "error": "MalformedMessage",
                                "message": "record needs action start|stop"}))
            return
        if action == "start":
            name = msg.get("name")
            if not isinstance(name, str) or not name:
                client.send(_dumps({"type": "error", "ok": False,
                                    "error": "MalformedMessage",
                                    "message": "record start needs string 'name'"}))
                return
            mode = msg.get("mode", "hold")

            def change(engine: Engine) -> dict:
                reply = engine.start_recording(name, mode)
                return {"type": "ack", **reply}
        else:
            def change(engine: Engine) -> dict:
                reply = engine.stop_recording()
                kind = "ack" if reply.get("ok") else "error"
                return {"type": kind, **reply}

        def done(reply: dict) -> None:
            if not reply.get("ok") and reply.get("type") != "error":
                reply = {"type": "error", **reply}
            client.send(_dumps(reply))

        self.engine.request(change, done)
