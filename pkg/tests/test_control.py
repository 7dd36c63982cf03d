"""Control socket: get/set/profile/record round-trips and telemetry."""

import json
import socket
import time

import pytest

from synth import make_frame, make_hand, make_pose

from airinput.config import validate_config
from airinput.control import ControlServer
from airinput.engine import Engine


class Client:
    def __init__(self, port):
        self.sock = socket.create_connection(("127.0.0.1", port), timeout=5.0)
        self.reader = self.sock.makefile("r", encoding="utf-8")

    def send(self, msg):
        self.sock.sendall((json.dumps(msg) + "\n").encode())

    def recv(self):
        line = self.reader.readline()
        assert line, "server closed the connection"
        return json.loads(line)

    def recv_until(self, type_, limit=50):
        for _ in range(limit):
            msg = self.recv()
            if msg["type"] == type_:
                return msg
        raise AssertionError(f"no {type_} message within {limit} reads")

    def close(self):
        self.sock.close()


@pytest.fixture
def rig():
    engine = Engine(validate_config({}))
    server = ControlServer(engine, port=0)
    port = server.start()
    client = Client(port)
    # accept loop runs in a thread; wait for the session to register
    deadline = time.time() + 5.0
    while not server._clients and time.time() < deadline:
        time.sleep(0.005)
    assert server._clients
    yield engine, server, client
    client.close()
    server.stop()


def step(engine, server, n=1, t0=None):
    start = engine.last_t_ms + 40.0 if t0 is None and engine.last_t_ms is not None else (t0 or 0.0)
    for i in range(n):
        engine.step(make_frame(start + i * 40.0, hands=[make_hand(pinch=0.8)]))
        server.publish_telemetry(engine)


class TestGet:
    def test_returns_full_config(self, rig):
        engine, server, client = rig
        client.send({"type": "get"})
        reply = client.recv()
        assert reply["type"] == "ack" and reply["ok"]
        assert reply["config"] == engine.config
        assert reply["profile"] == "creativity"


class TestSet:
    def test_applies_at_next_frame_with_effective_index(self, rig):
        engine, server, client = rig
        step(engine, server, 3)
        client.send({"type": "set", "field": "head.ear_on", "value": 0.22})
        time.sleep(0.05)  # let the reader thread queue the request
        assert engine.config["head"]["ear_on"] == 0.20  # not yet applied
        step(engine, server, 1)
        ack = client.recv_until("ack")
        assert ack["ok"] and ack["field"] == "head.ear_on"
        assert ack["effective_frame"] == 3
        assert engine.config["head"]["ear_on"] == 0.22

    def test_invalid_field_errors_and_keeps_session(self, rig):
        engine, server, client = rig
        client.send({"type": "set", "field": "head.no_such", "value": 1})
        time.sleep(0.05)
        step(engine, server, 1)
        err = client.recv_until("error")
        assert err["ok"] is False
        assert err["field"] == "head.no_such"
        # session still works
        client.send({"type": "get"})
        assert client.recv_until("ack")["ok"]

    def test_invalid_value_leaves_config_untouched(self, rig):
        engine, server, client = rig
        before = engine.config
        client.send({"type": "set", "field": "max_range_mm", "value": -5})
        time.sleep(0.05)
        step(engine, server, 1)
        err = client.recv_until("error")
        assert err["ok"] is False
        assert engine.config == before

    def test_malformed_set_rejected_without_queueing(self, rig):
        engine, server, client = rig
        client.send({"type": "set", "value": 3})
        err = client.recv_until("error")
        assert err["ok"] is False


class TestProfile:
    def test_switch_acks_with_name(self, rig):
        engine, server, client = rig
        client.send({"type": "profile", "name": "gaming"})
        time.sleep(0.05)
        step(engine, server, 1)
        ack = client.recv_until("ack")
        assert ack["profile"] == "gaming"
        assert engine.profile.name == "gaming"

    def test_unknown_profile_errors(self, rig):
        engine, server, client = rig
        client.send({"type": "profile", "name": "nope"})
        time.sleep(0.05)
        step(engine, server, 1)
        assert client.recv_until("error")["ok"] is False


class TestRecord:
    def test_start_stop_builds_template(self, rig):
        engine, server, client = rig
        client.send({"type": "record", "action": "start", "name": "tpose"})
        time.sleep(0.05)
        # feed pose frames while recording
        engine.step(make_frame(0.0, hands=[make_hand(pinch=0.8)],
                               pose=make_pose(knee_l=120.0, knee_r=120.0)))
        server.publish_telemetry(engine)
        ack = client.recv_until("ack")
        assert ack["recording"] == "tpose"
        for i in range(1, 5):
            engine.step(make_frame(i * 40.0, hands=[make_hand(pinch=0.8)],
                                   pose=make_pose(knee_l=120.0, knee_r=120.0)))
        client.send({"type": "record", "action": "stop"})
        time.sleep(0.05)
        engine.step(make_frame(240.0, hands=[make_hand(pinch=0.8)]))
        ack = client.recv_until("ack")
        assert ack["template"]["name"] == "tpose"
        assert ack["template"]["features"]["knee_l"] == pytest.approx(120.0)
        assert any(t.name == "tpose" for t in engine._templates)

    def test_stop_without_start_errors(self, rig):
        engine, server, client = rig
        client.send({"type": "record", "action": "stop"})
        time.sleep(0.05)
        step(engine, server, 1)
        assert client.recv_until("error")["ok"] is False


class TestTelemetry:
    def test_one_message_per_frame(self, rig):
        engine, server, client = rig
        step(engine, server, 5)
        got = [client.recv_until("telemetry") for _ in range(5)]
        frames = [m["frame"] for m in got]
        assert frames == [1, 2, 3, 4, 5]

    def test_carries_module_values_and_events(self, rig):
        engine, server, client = rig
        step(engine, server, 2)
        msg = client.recv_until("telemetry")
        assert "pinch" in msg and "daoi" in msg and "config" in msg
        assert "ear_l" in msg and "mar" in msg and "head_pose" in msg
        assert isinstance(msg["events"], list)
        assert msg["epoch"] == engine.config_epoch


class TestErrors:
    def test_unknown_type_answered_not_dropped(self, rig):
        engine, server, client = rig
        client.send({"type": "dance"})
        assert client.recv_until("error")["ok"] is False
        client.send({"type": "get"})
        assert client.recv_until("ack")["ok"]

    def test_non_json_line_answered(self, rig):
        engine, server, client = rig
        client.sock.sendall(b"not json at all\n")
        assert client.recv_until("error")["ok"] is False
        client.send({"type": "get"})
        assert client.recv_until("ack")["ok"]
