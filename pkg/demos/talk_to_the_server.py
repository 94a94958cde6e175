"""Driving the simulation over TCP, like a remote client would.

Starts a SimServer on ephemeral ports, connects with the line protocol
client, initializes a session with a seeded scenario, steps the agent,
pulls an observation and the world state, and exercises the HTTP bridge
that browsers use.  The server is stopped at the end; nothing leaks.
"""

import json
import urllib.request

from housesim.cli import bundled_house_paths
from housesim.scenario import load_house
from housesim.server import Client, SimServer

houses = {}
for path in bundled_house_paths():
    with open(path, "rb") as fh:
        house = load_house(fh.read())
    houses[house.house_id] = house

server = SimServer(houses, host="127.0.0.1", port=0, bridge_port=0)
server.start()
print(f"server on tcp {server.port}, http bridge {server.bridge_port}")

try:
    client = Client("127.0.0.1", server.port)

    resp = client.request("hello")
    print("hello ->", resp["houses"], resp["protocol"])

    resp = client.request("init", house_id="bungalow", seed=7,
                          scenario=[{"type": "plate", "count": 2}])
    print("init ->", resp["status"])

    for name in ("look-left", "move-forward", "move-forward"):
        resp = client.request("action", name=name)
        print(f"action {name:<13} ->",
              ", ".join(e["kind"] for e in resp["events"]))

    resp = client.request("observe", width=8, height=4)
    print("observe -> visible:",
          [v["instance_id"] for v in resp["observation"]["visible"]])

    resp = client.request("state")
    agent = resp["world"]["agent"]
    print(f"state -> agent at ({agent['x']:.2f}, {agent['z']:.2f}) "
          f"yaw {agent['yaw']:.0f}")

    resp = client.request("eval-nav",
                          agent={"room": "kitchen", "x": 1.0, "z": 2.0},
                          goal={"room": "living", "x": 7.0, "z": 2.0})
    print("eval-nav ->", resp["navigation_error_m"], "m")

    client.request("bye")
    client.close()

    # the HTTP bridge speaks the same messages, wrapped for browsers
    req = urllib.request.Request(
        f"http://127.0.0.1:{server.bridge_port}/session", method="POST",
        data=b"{}", headers={"Content-Type": "application/json"})
    with urllib.request.urlopen(req, timeout=5) as resp:
        token = json.loads(resp.read())["session"]
    req = urllib.request.Request(
        f"http://127.0.0.1:{server.bridge_port}/session/{token}",
        method="POST", data=json.dumps({"tag": "hello"}).encode(),
        headers={"Content-Type": "application/json"})
    with urllib.request.urlopen(req, timeout=5) as resp:
        print("bridge hello ->", json.loads(resp.read())["houses"])
finally:
    server.stop()
    print("server stopped")
