"""Fetch the mug from the hall cupboard, and keep the receipts.

The bungalow ships with a mug inside a closed cupboard.  This script walks
the agent over, opens the cupboard (engage + look-down), picks the mug,
carries it to the kitchen counter, and puts it down — recording every step
with a Recorder.  The trajectory is then encoded to bytes, decoded back,
and verified, which is exactly what ``housesim replay --verify`` does.
"""

import math
import tempfile

from housesim.cli import bundled_house_paths
from housesim.config import StepConfig
from housesim.kinematics import Action, apply_action
from housesim.model import AgentState, initial_world
from housesim.physics import solid_aabbs
from housesim.scenario import load_house
from housesim.trajectory import (Recorder, decode, encode,
                                 extract_interactions, verify)

# finer look steps than the defaults: the mug is a 5 cm target, and a 15
# degree quantum at arm's length overshoots it.  The config rides along in
# the recorded trajectory, so replay still verifies bit-for-bit.
config = StepConfig(yaw_step=3.0, pitch_step=3.0)

for path in bundled_house_paths():
    with open(path, "rb") as fh:
        house = load_house(fh.read())
    if house.house_id == "bungalow":
        break

world = initial_world(house)
recorder = Recorder(world, config)


def look_at(world, x, y, z):
    """Turn the recorded agent toward a world point using only look actions."""
    agent = world.agent
    want_yaw = math.degrees(math.atan2(x - agent.x, z - agent.z)) % 360.0
    dxz = math.hypot(x - agent.x, z - agent.z)
    want_pitch = math.degrees(math.atan2(y - config.eye_height, dxz))
    while abs((want_yaw - world.agent.yaw + 180.0) % 360.0 - 180.0) > config.yaw_step / 2:
        delta = (want_yaw - world.agent.yaw + 180.0) % 360.0 - 180.0
        world, _ = recorder.step(Action.LOOK_RIGHT if delta > 0 else Action.LOOK_LEFT)
    while abs(want_pitch - world.agent.pitch) > config.pitch_step / 2:
        world, _ = recorder.step(Action.LOOK_UP if want_pitch > world.agent.pitch
                                 else Action.LOOK_DOWN)
    return world


def walk(world, action, steps):
    for _ in range(steps):
        world, events = recorder.step(action)
    return world


print(f"start in the kitchen at ({world.agent.x}, {world.agent.z})")

# through the hall door at (2.5, 4) and up to the cupboard at (1, 2) hall-local
world = look_at(world, 2.5, config.eye_height, 6.0)
world = walk(world, Action.MOVE_FORWARD, 10)

cup = solid_aabbs(world, config)["cupboard-1"]
cx, cz = (cup.min[0] + cup.max[0]) / 2, (cup.min[2] + cup.max[2]) / 2
world = look_at(world, cx, config.eye_height, cz)
world = walk(world, Action.MOVE_FORWARD, 6)  # clamps against the cupboard
world = look_at(world, cx, cup.max[1] - 0.05, cz)

# engage and drive the door open
world, events = recorder.step(Action.INTERACT)
print("interact ->", events[0])
while world.instance("cupboard-1").open_fraction < 1.0:
    world, _ = recorder.step(Action.LOOK_DOWN)
print("cupboard open_fraction:", world.instance("cupboard-1").open_fraction)

# a second interact on the engaged shell lets go of the door
world, events = recorder.step(Action.INTERACT)
print("interact ->", events[0])
assert world.agent.engaged is None

# aim at the mug on the shelf and pick it
mug = solid_aabbs(world, config)["mug-1"]
world = look_at(world, (mug.min[0] + mug.max[0]) / 2,
                (mug.min[1] + mug.max[1]) / 2,
                (mug.min[2] + mug.max[2]) / 2)
world, events = recorder.step(Action.INTERACT)
print("interact ->", events[0])
assert world.agent.held == "mug-1"

# carry it back to the kitchen counter and put it down
world = look_at(world, world.agent.x, config.eye_height, world.agent.z - 1.0)
world = walk(world, Action.MOVE_BACK, 2)
world = look_at(world, 2.5, config.eye_height, 4.6)  # line up with the door
world = walk(world, Action.MOVE_FORWARD, 5)
world = look_at(world, 2.5, config.eye_height, 1.0)  # through it, clear of the dishwasher
world = walk(world, Action.MOVE_FORWARD, 14)
world = look_at(world, 1.6, 0.9, 0.6)  # a free spot on the counter top
world, events = recorder.step(Action.INTERACT)
print("interact ->", events[0])
assert world.agent.held is None

# --- persist, reload, verify ---------------------------------------------------

demo = recorder.demonstration()
blob = encode(demo)
with tempfile.NamedTemporaryFile(suffix=".traj", delete=False) as fh:
    fh.write(blob)
    print(f"\nwrote {len(blob)} bytes to {fh.name}")

copy = decode(blob)
print("verify(decode(encode(demo))) ->", verify(copy))
print("interaction summary:")
for event in extract_interactions(copy):
    print("  ", event)
