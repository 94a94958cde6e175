import json
import socket
import struct
import threading
import urllib.request

import pytest

from housesim import serialization as ser
from housesim.kinematics import Action
from housesim.model import initial_world
from housesim.server import (Client, Session, SimServer, handle_message,
                             read_frame, write_frame)
from housesim.trajectory import encode, replay


@pytest.fixture(scope="module")
def server(houses):
    srv = SimServer(houses, host="127.0.0.1", port=0, bridge_port=0)
    srv.start()
    yield srv
    srv.stop()


@pytest.fixture
def client(server):
    c = Client("127.0.0.1", server.port)
    yield c
    c.close()


# --- session unit level --------------------------------------------------------

def test_hello_lists_houses(houses):
    session = Session(houses)
    (resp,) = handle_message(session, {"id": 1, "tag": "hello"})
    assert resp["status"] == "ok" and resp["id"] == 1
    assert resp["houses"] == ["bungalow", "loft"]
    assert resp["protocol"] == "housesim/1"


def test_requests_before_init_fail(houses):
    session = Session(houses)
    (resp,) = handle_message(session, {"id": 2, "tag": "action",
                                       "name": "move-forward"})
    assert resp["status"] == "error" and resp["code"] == "no-session"


def test_unknown_tag_is_error_not_crash(houses):
    session = Session(houses)
    (resp,) = handle_message(session, {"id": 3, "tag": "defragment"})
    assert resp["status"] == "error" and resp["code"] == "unknown-tag"


def test_init_rejects_wide_agent(houses):
    session = Session(houses)
    (resp,) = handle_message(session, {
        "id": 4, "tag": "init", "house_id": "bungalow",
        "config": {"agent_radius": 0.6}})
    assert resp["status"] == "error" and resp["code"] == "bad-config"


def test_init_with_inline_house_round_trips_state(houses):
    session = Session(houses)
    doc = ser.house_to_json(houses["loft"])
    (resp,) = handle_message(session, {"id": 5, "tag": "init", "house": doc})
    assert resp["status"] == "ok"
    (resp,) = handle_message(session, {"id": 6, "tag": "state"})
    world = ser.world_from_json(resp["world"])
    assert world == initial_world(houses["loft"])


def test_init_with_scenario_is_seeded(houses):
    worlds = []
    for _ in range(2):
        session = Session(houses)
        (resp,) = handle_message(session, {
            "tag": "init", "house_id": "bungalow", "seed": 5,
            "scenario": [{"type": "plate", "count": 2}]})
        assert resp["status"] == "ok"
        (resp,) = handle_message(session, {"tag": "state"})
        worlds.append(ser.dumps(resp["world"]))
    assert worlds[0] == worlds[1]


def test_reset_restores_start(houses):
    session = Session(houses)
    handle_message(session, {"tag": "init", "house_id": "bungalow"})
    (before,) = handle_message(session, {"tag": "state"})
    handle_message(session, {"tag": "action", "name": "move-forward"})
    (moved,) = handle_message(session, {"tag": "state"})
    assert moved["world"] != before["world"]
    handle_message(session, {"tag": "reset"})
    (after,) = handle_message(session, {"tag": "state"})
    assert after["world"] == before["world"]


def test_eval_manip_over_protocol(houses):
    house = houses["bungalow"]
    demo = replay(house, initial_world(house),
                  [Action.MOVE_FORWARD, Action.INTERACT])
    doc = json.loads(encode(demo))
    session = Session(houses)
    (resp,) = handle_message(session, {"tag": "eval-manip",
                                       "agent_traj": doc, "ref_traj": doc})
    assert resp["status"] == "ok"
    assert resp["f1"] == 1.0


# --- wire level -----------------------------------------------------------------

def test_tcp_round_trip(client):
    resp = client.request("hello")
    assert resp["status"] == "ok" and resp["id"] == 1
    resp = client.request("init", house_id="bungalow")
    assert resp["status"] == "ok"
    resp = client.request("action", name="move-forward")
    assert resp["events"] == [{"kind": "moved", "distance": 0.25}]


def test_fifo_ids_echoed(client):
    client.request("init", house_id="loft")
    for expect in range(2, 12):
        resp = client.request("state")
        assert resp["id"] == expect


def test_sessions_are_isolated(server):
    a = Client("127.0.0.1", server.port)
    b = Client("127.0.0.1", server.port)
    try:
        a.request("init", house_id="bungalow")
        b.request("init", house_id="loft")
        for _ in range(4):
            a.request("action", name="move-forward")
        wa = a.request("state")["world"]
        wb = b.request("state")["world"]
        assert wa["house"]["house_id"] == "bungalow"
        assert wb["house"]["house_id"] == "loft"
        assert wb["agent"]["x"] == 2.0  # loft bedroom center, untouched
    finally:
        a.close()
        b.close()


def test_malformed_json_frame_closes_connection(server):
    sock = socket.create_connection(("127.0.0.1", server.port))
    try:
        write_frame(sock, b"this is not json")
        sock.settimeout(2.0)
        assert sock.recv(1) == b""  # orderly close, no response
    finally:
        sock.close()


def test_oversized_frame_rejected(server):
    sock = socket.create_connection(("127.0.0.1", server.port))
    try:
        sock.sendall(struct.pack(">I", 1 << 30))
        sock.settimeout(2.0)
        assert sock.recv(1) == b""
    finally:
        sock.close()


def test_error_frames_keep_session_alive(client):
    resp = client.request("action", name="move-forward")  # before init
    assert resp["status"] == "error"
    resp = client.request("init", house_id="bungalow")
    assert resp["status"] == "ok"  # same connection still works


def test_bye_closes(server):
    c = Client("127.0.0.1", server.port)
    resp = c.request("bye")
    assert resp["status"] == "ok"
    c.sock.settimeout(2.0)
    assert c.sock.recv(1) == b""
    c.close()


# --- HTTP bridge ----------------------------------------------------------------

def _post(url, doc):
    req = urllib.request.Request(url, method="POST",
                                 data=json.dumps(doc).encode("utf-8"),
                                 headers={"Content-Type": "application/json"})
    try:
        with urllib.request.urlopen(req, timeout=5) as resp:
            return resp.status, json.loads(resp.read())
    except urllib.error.HTTPError as err:
        return err.code, json.loads(err.read())


def test_bridge_session_lifecycle(server):
    base = f"http://127.0.0.1:{server.bridge_port}"
    status, doc = _post(f"{base}/session", {})
    assert status == 200
    token = doc["session"]
    status, doc = _post(f"{base}/session/{token}",
                        {"id": 1, "tag": "init", "house_id": "bungalow"})
    assert doc["status"] == "ok"
    status, doc = _post(f"{base}/session/{token}",
                        {"id": 2, "tag": "action", "name": "move-forward"})
    assert doc["events"][0]["kind"] == "moved"
    status, doc = _post(f"{base}/session/{token}", {"id": 3, "tag": "bye"})
    assert doc["status"] == "ok"
    status, doc = _post(f"{base}/session/{token}", {"id": 4, "tag": "state"})
    assert doc["code"] == "unknown-session"


def test_bridge_houses_and_cors(server):
    base = f"http://127.0.0.1:{server.bridge_port}"
    with urllib.request.urlopen(f"{base}/houses", timeout=5) as resp:
        assert resp.headers["Access-Control-Allow-Origin"] == "*"
        assert json.loads(resp.read())["houses"] == ["bungalow", "loft"]
    req = urllib.request.Request(f"{base}/session", method="OPTIONS")
    with urllib.request.urlopen(req, timeout=5) as resp:
        assert resp.status == 204


def test_concurrent_clients(server):
    errors = []

    def worker(house_id):
        try:
            c = Client("127.0.0.1", server.port)
            c.request("init", house_id=house_id)
            for _ in range(30):
                resp = c.request("action", name="move-forward")
                assert resp["status"] == "ok"
            c.request("bye")
            c.close()
        except Exception as exc:  # pragma: no cover
            errors.append(exc)

    threads = [threading.Thread(target=worker,
                                args=(("bungalow", "loft")[i % 2],))
               for i in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join(timeout=30)
    assert errors == []
