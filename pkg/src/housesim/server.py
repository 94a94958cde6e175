"""Session server: a length-prefixed TCP socket for programmatic clients
and an HTTP bridge exposing the identical message schema to browsers.

Wire framing on the stream socket: 4-byte big-endian unsigned length,
then a UTF-8 JSON message. Every request carries a client-chosen `id`
echoed in the response; responses are `ok` or `error` with a code.
One world per connection; sessions never share mutable state.
"""

from __future__ import annotations

import json
import socket
import socketserver
import struct
import threading
import uuid
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Optional

from . import serialization as ser
from .config import DEFAULT_CONFIG, StepConfig
from .errors import (CollisionAtTarget, HeldObject, HouseSimError,
                     MalformedFile, OutOfBounds, PlacementBudgetExceeded,
                     PointOutsideRoom, ProtocolError, SessionError,
                     UnknownInstance, UnknownSurface, UnknownType,
                     Unreachable, UnsupportedVersion, ValidationFailed)
from .events import (Blocked, ContainerAdjusted, Disengaged, Engaged, Moved,
                     NoTarget, Pick, Place, SetState, Turned)
from .evaluation import manipulation_accuracy, navigation_error
from .kinematics import action_from_name, apply_action
from .model import AgentState, House, WorldState, initial_world
from .observation import ObsConfig, observation_to_json, observe
from .scenario import generate_scenario, load_house, place_object, remove_object
from .trajectory import decode as decode_traj
from .trajectory import extract_interactions

PROTOCOL = "housesim/1"
SERVER_NAME = "housesim 0.1.0"
DEFAULT_PORT = 9361
DEFAULT_BRIDGE_PORT = 9362
MAX_FRAME = 16 * 1024 * 1024

_ERROR_CODES = {
    UnknownInstance: "unknown-instance",
    UnknownType: "unknown-type",
    UnknownSurface: "unknown-surface",
    OutOfBounds: "out-of-bounds",
    CollisionAtTarget: "collision-at-target",
    HeldObject: "held-object",
    PlacementBudgetExceeded: "placement-budget-exceeded",
    Unreachable: "unreachable",
    PointOutsideRoom: "point-outside-room",
    ValidationFailed: "validation-failed",
    MalformedFile: "malformed-file",
    UnsupportedVersion: "unsupported-version",
}


def any_event_to_json(event) -> dict:
    if isinstance(event, Moved):
        return {"kind": "moved", "distance": event.distance}
    if isinstance(event, Blocked):
        return {"kind": "blocked"}
    if isinstance(event, Turned):
        return {"kind": "turned", "yaw": event.yaw, "pitch": event.pitch}
    if isinstance(event, ContainerAdjusted):
        return {"kind": "container-adjusted", "id": event.instance_id,
                "open_fraction": event.open_fraction}
    return ser.event_to_json(event)


class Session:
    """Per-connection simulation state."""

    def __init__(self, houses: dict[str, House]):
        self.houses = houses
        self.world: Optional[WorldState] = None
        self.start_world: Optional[WorldState] = None
        self.config: StepConfig = DEFAULT_CONFIG
        self.obs_config = ObsConfig()
        self.closed = False

    # --- message handlers ---

    def _init(self, payload: dict) -> dict:
        if "house" in payload:
            house = load_house(payload["house"])
        elif "house_id" in payload:
            house = self.houses.get(payload["house_id"])
            if house is None:
                raise SessionError("unknown-house", str(payload["house_id"]))
        else:
            raise SessionError("bad-payload", "init needs house or house_id")
        config = ser.config_from_json(payload.get("config"))
        narrowest = house.narrowest_door_width()
        if config.agent_radius * 2.0 >= narrowest:
            raise SessionError("bad-config",
                               f"agent diameter {2 * config.agent_radius} exceeds "
                               f"narrowest door width {narrowest}")
        obs = payload.get("obs")
        if obs:
            self.obs_config = ObsConfig(
                hfov=float(obs.get("hfov", 60.0)),
                width=int(obs.get("width", 64)),
                height=int(obs.get("height", 48)),
                far=float(obs.get("far", 20.0)))
        if payload.get("scenario"):
            spec = [(str(s["type"]), int(s["count"])) for s in payload["scenario"]]
            world = generate_scenario(house, spec, int(payload.get("seed", 0)), config)
        elif payload.get("world"):
            world = ser.state_from_json(payload["world"], house)
        else:
            world = initial_world(house)
        if payload.get("agent"):
            a = payload["agent"]
            world = world.with_agent(AgentState(
                float(a.get("x", world.agent.x)), float(a.get("z", world.agent.z)),
                float(a.get("yaw", world.agent.yaw)), float(a.get("pitch", world.agent.pitch)),
                world.agent.held, world.agent.engaged))
        self.config = config
        self.world = world
        self.start_world = world
        return {"house_id": house.house_id, "rooms": len(house.rooms),
                "objects": len(world.objects)}

    def _require_world(self) -> WorldState:
        if self.world is None:
            raise SessionError("no-session", "init required first")
        return self.world

    def handle(self, message: dict) -> dict:
        rid = message.get("id") if isinstance(message, dict) else None
        try:
            if not isinstance(message, dict):
                raise SessionError("bad-message", "message must be a JSON object")
            tag = message.get("tag")
            body = self._dispatch(tag, message)
            resp = {"id": rid, "status": "ok"}
            resp.update(body)
            return resp
        except SessionError as exc:
            return {"id": rid, "status": "error", "code": exc.code,
                    "message": str(exc)}
        except HouseSimError as exc:
            code = _ERROR_CODES.get(type(exc), "error")
            return {"id": rid, "status": "error", "code": code, "message": str(exc)}
        except (KeyError, TypeError, ValueError) as exc:
            return {"id": rid, "status": "error", "code": "bad-payload",
                    "message": str(exc)}

    def _dispatch(self, tag, message: dict) -> dict:
        if tag == "hello":
            return {"server": SERVER_NAME, "protocol": PROTOCOL,
                    "houses": sorted(self.houses)}
        if tag == "init":
            return self._init(message)
        if tag == "bye":
            self.closed = True
            return {}
        if tag == "action":
            world = self._require_world()
            try:
                action = action_from_name(str(message["name"]))
            except ValueError as exc:
                raise SessionError("unknown-action", str(exc)) from exc
            self.world, events = apply_action(world, action, self.config)
            body = {"events": [any_event_to_json(e) for e in events]}
            if message.get("observe"):
                body["observation"] = observation_to_json(
                    observe(self.world, self.config, self.obs_config))
            return body
        if tag == "observe":
            world = self._require_world()
            raster = bool(message.get("raster", True))
            return {"observation": observation_to_json(
                observe(world, self.config, self.obs_config, include_raster=raster))}
        if tag == "state":
            return {"world": ser.world_to_json(self._require_world())}
        if tag == "place":
            world = self._require_world()
            self.world, instance_id = place_object(
                world, str(message["type"]), float(message.get("yaw", 0.0)),
                str(message["surface"]), float(message["x"]), float(message["z"]),
                self.config)
            return {"instance_id": instance_id}
        if tag == "remove":
            world = self._require_world()
            self.world = remove_object(world, str(message["id"]), self.config)
            return {}
        if tag == "reset":
            if self.start_world is None:
                raise SessionError("no-session", "init required first")
            self.world = self.start_world
            return {}
        if tag == "eval-nav":
            world = self._require_world()
            a = message["agent"]
            g = message["goal"]
            meters = navigation_error(
                world.house,
                (str(a["room"]), float(a["x"]), float(a["z"])),
                (str(g["room"]), float(g["x"]), float(g["z"])))
            return {"navigation_error_m": meters}
        if tag == "eval-manip":
            agent_demo = decode_traj(ser.dumps(message["agent_traj"]).encode())
            ref_demo = decode_traj(ser.dumps(message["ref_traj"]).encode())
            report = manipulation_accuracy(extract_interactions(agent_demo),
                                           extract_interactions(ref_demo))
            return {"precision": report.precision, "recall": report.recall,
                    "f1": report.f1,
                    "matched_pairs": [list(p) for p in report.matched_pairs]}
        raise SessionError("unknown-tag", f"unknown tag {tag!r}")


def handle_message(session: Session, message: dict) -> list[dict]:
    """Protocol entry point: one request in, responses out (always one)."""
    return [session.handle(message)]


# --- stream socket -----------------------------------------------------------

def read_frame(sock) -> Optional[bytes]:
    header = _read_exact(sock, 4)
    if header is None:
        return None
    (length,) = struct.unpack(">I", header)
    if length > MAX_FRAME:
        raise ProtocolError(f"frame of {length} bytes exceeds limit")
    payload = _read_exact(sock, length)
    if payload is None:
        raise ProtocolError("truncated frame")
    return payload


def _read_exact(sock, n: int) -> Optional[bytes]:
    buf = b""
    while len(buf) < n:
        chunk = sock.recv(n - len(buf))
        if not chunk:
            return None if not buf else None
        buf += chunk
    return buf


def write_frame(sock, payload: bytes):
    sock.sendall(struct.pack(">I", len(payload)) + payload)


class _ConnectionHandler(socketserver.BaseRequestHandler):
    def handle(self):
        session = Session(self.server.houses)  # type: ignore[attr-defined]
        sock = self.request
        try:
            while not session.closed:
                payload = read_frame(sock)
                if payload is None:
                    return
                try:
                    message = json.loads(payload.decode("utf-8"))
                except (UnicodeDecodeError, json.JSONDecodeError) as exc:
                    raise ProtocolError(str(exc)) from exc
                for resp in handle_message(session, message):
                    write_frame(sock, ser.dumps(resp).encode("utf-8"))
        except (ProtocolError, ConnectionError, OSError):
            pass
        finally:
            try:
                sock.close()
            except OSError:
                pass


class _TCPServer(socketserver.ThreadingTCPServer):
    allow_reuse_address = True
    daemon_threads = True


# --- HTTP bridge --------------------------------------------------------------

class _BridgeState:
    def __init__(self, houses: dict[str, House]):
        self.houses = houses
        self.sessions: dict[str, Session] = {}
        self.locks: dict[str, threading.Lock] = {}
        self.guard = threading.Lock()

    def create(self) -> str:
        token = uuid.uuid4().hex
        with self.guard:
            self.sessions[token] = Session(self.houses)
            self.locks[token] = threading.Lock()
        return token

    def drop(self, token: str):
        with self.guard:
            self.sessions.pop(token, None)
            self.locks.pop(token, None)


class _BridgeHandler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"

    def log_message(self, *args):  # quiet
        pass

    def _cors(self):
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")

    def _reply(self, status: int, doc):
        body = ser.dumps(doc).encode("utf-8")
        self.send_response(status)
        self._cors()
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def do_OPTIONS(self):
        self.send_response(204)
        self._cors()
        self.send_header("Content-Length", "0")
        self.end_headers()

    def do_GET(self):
        state: _BridgeState = self.server.state  # type: ignore[attr-defined]
        if self.path == "/houses":
            self._reply(200, {"houses": sorted(state.houses)})
        elif self.path == "/":
            self._reply(200, {"server": SERVER_NAME, "protocol": PROTOCOL})
        else:
            self._reply(404, {"status": "error", "code": "not-found"})

    def do_POST(self):
        state: _BridgeState = self.server.state  # type: ignore[attr-defined]
        if self.path == "/session":
            self._reply(200, {"session": state.create()})
            return
        if not self.path.startswith("/session/"):
            self._reply(404, {"status": "error", "code": "not-found"})
            return
        token = self.path[len("/session/"):]
        session = state.sessions.get(token)
        lock = state.locks.get(token)
        if session is None or lock is None:
            self._reply(404, {"status": "error", "code": "unknown-session"})
            return
        length = int(self.headers.get("Content-Length", "0"))
        raw = self.rfile.read(length)
        try:
            message = json.loads(raw.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError):
            self._reply(400, {"status": "error", "code": "malformed-message"})
            return
        with lock:
            responses = handle_message(session, message)
        if session.closed:
            state.drop(token)
        self._reply(200, responses[0])

    def do_DELETE(self):
        state: _BridgeState = self.server.state  # type: ignore[attr-defined]
        if self.path.startswith("/session/"):
            state.drop(self.path[len("/session/"):])
            self._reply(200, {"status": "ok"})
        else:
            self._reply(404, {"status": "error", "code": "not-found"})


class SimServer:
    """Hosts the TCP listener and the HTTP bridge on background threads."""

    def __init__(self, houses: dict[str, House], host: str = "127.0.0.1",
                 port: int = DEFAULT_PORT, bridge_port: int = DEFAULT_BRIDGE_PORT):
        self.houses = houses
        self._tcp = _TCPServer((host, port), _ConnectionHandler)
        self._tcp.houses = houses  # type: ignore[attr-defined]
        self._bridge = ThreadingHTTPServer((host, bridge_port), _BridgeHandler)
        self._bridge.daemon_threads = True
        self._bridge.state = _BridgeState(houses)  # type: ignore[attr-defined]
        self.port = self._tcp.server_address[1]
        self.bridge_port = self._bridge.server_address[1]
        self._threads: list[threading.Thread] = []

    def start(self):
        for srv in (self._tcp, self._bridge):
            t = threading.Thread(target=srv.serve_forever, daemon=True)
            t.start()
            self._threads.append(t)

    def stop(self):
        self._tcp.shutdown()
        self._bridge.shutdown()
        self._tcp.server_close()
        self._bridge.server_close()


class Client:
    """Minimal blocking client for the stream protocol (used by tests/demos)."""

    def __init__(self, host: str, port: int):
        self.sock = socket.create_connection((host, port))
        self._next_id = 0

    def request(self, tag: str, **payload) -> dict:
        self._next_id += 1
        message = {"id": self._next_id, "tag": tag}
        message.update(payload)
        write_frame(self.sock, ser.dumps(message).encode("utf-8"))
        frame = read_frame(self.sock)
        if frame is None:
            raise ConnectionError("server closed the connection")
        return json.loads(frame.decode("utf-8"))

    def close(self):
        try:
            self.sock.close()
        except OSError:
            pass
