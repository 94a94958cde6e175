import json

import pytest

from housesim import serialization as ser
from housesim.cli import bundled_house_paths, run
from housesim.kinematics import Action
from housesim.model import initial_world
from housesim.trajectory import encode, replay


@pytest.fixture
def house_path():
    return next(p for p in bundled_house_paths() if "bungalow" in p)


@pytest.fixture
def traj_path(tmp_path, bungalow):
    demo = replay(bungalow, initial_world(bungalow),
                  [Action.MOVE_FORWARD, Action.LOOK_RIGHT, Action.INTERACT])
    path = tmp_path / "demo.traj.json"
    path.write_bytes(encode(demo))
    return str(path)


def test_validate_ok(house_path, capsys):
    assert run(["validate", "--house", house_path]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["valid"] is True and doc["violations"] == []


def test_validate_bad_house(tmp_path, bungalow, capsys):
    doc = ser.house_to_json(bungalow)
    doc["objects"][0]["type"] = "hologram"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(doc))
    assert run(["validate", "--house", str(bad)]) == 2
    out = json.loads(capsys.readouterr().out)
    assert out["valid"] is False
    assert out["violations"][0]["code"] == "UNKNOWN_TYPE"


def test_replay_verify_ok(traj_path, capsys):
    assert run(["replay", "--traj", traj_path, "--verify"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["verified"] is True and doc["steps"] == 3


def test_replay_verify_detects_forgery(traj_path, tmp_path, capsys):
    doc = json.loads(open(traj_path).read())
    doc["steps"][0]["state"]["agent"]["x"] += 0.5
    forged = tmp_path / "forged.json"
    forged.write_text(json.dumps(doc))
    assert run(["replay", "--traj", str(forged), "--verify"]) == 2
    assert json.loads(capsys.readouterr().out)["verified"] is False


def test_eval_nav(house_path, capsys):
    rc = run(["eval", "nav", "--house", house_path,
              "--agent", "1.0,2.0,kitchen", "--goal", "7.0,2.0,living"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["navigation_error_m"] == pytest.approx(6.0)


def test_eval_manip(traj_path, capsys):
    rc = run(["eval", "manip", "--agent-traj", traj_path,
              "--ref-traj", traj_path])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["f1"] == 1.0


def test_gen_and_observe(house_path, tmp_path, capsys):
    spec = tmp_path / "spec.json"
    spec.write_text('[{"type": "mug", "count": 2}]')
    world_path = tmp_path / "world.json"
    assert run(["gen", "--house", house_path, "--spec", str(spec),
                "--seed", "4", "--out", str(world_path)]) == 0
    capsys.readouterr()
    assert run(["observe", "--world", str(world_path)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert {"agent", "visible", "raster"} <= set(doc)


def test_gen_deterministic(house_path, tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text('{"plate": 2}')
    outs = []
    for name in ("a.json", "b.json"):
        out = tmp_path / name
        assert run(["gen", "--house", house_path, "--spec", str(spec),
                    "--seed", "11", "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_missing_file_exits_3(capsys):
    assert run(["validate", "--house", "/no/such/file.json"]) == 3


def test_usage_error_exits_nonzero():
    assert run(["replay"]) != 0
    assert run(["no-such-command"]) != 0


def test_serve_prints_ports_and_accepts_connections():
    import subprocess
    import sys

    from housesim.server import Client

    proc = subprocess.Popen(
        [sys.executable, "-m", "housesim.cli", "serve",
         "--port", "0", "--bridge-port", "0"],
        stdout=subprocess.PIPE, text=True)
    try:
        banner = json.loads(proc.stdout.readline())
        assert banner["houses"] == ["bungalow", "loft"]
        c = Client("127.0.0.1", banner["port"])
        assert c.request("hello")["status"] == "ok"
        c.close()
    finally:
        proc.terminate()
        proc.wait(timeout=10)
