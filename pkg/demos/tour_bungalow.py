"""A walking tour of the bundled bungalow.

Loads the house, prints its layout, then steers the agent from the kitchen
into the living room, rendering the semantic raster at each leg so you can
watch the scene change.  Everything here is plain library calls; run it
with ``python demos/tour_bungalow.py``.
"""

from housesim.cli import bundled_house_paths
from housesim.config import StepConfig
from housesim.kinematics import Action, apply_action
from housesim.model import initial_world
from housesim.observation import ObsConfig, observe
from housesim.scenario import load_house

config = StepConfig()

# --- load the house ---------------------------------------------------------

house = None
for path in bundled_house_paths():
    with open(path, "rb") as fh:
        candidate = load_house(fh.read())
    if candidate.house_id == "bungalow":
        house = candidate
assert house is not None

print(f"house {house.house_id!r}: {len(house.rooms)} rooms, "
      f"{len(house.doors)} doors, {len(house.initial_objects)} objects")
for room in house.rooms:
    r = room.floor_rect
    print(f"  {room.room_id:<10} ({room.kind}) "
          f"[{r.min_x},{r.min_z}] - [{r.max_x},{r.max_z}]")
for door in house.doors:
    print(f"  door {door.door_id:<16} between {door.rooms[0]} and "
          f"{door.rooms[1]} at {door.anchor}")

# --- a tiny ascii renderer ----------------------------------------------------

GLYPHS = {"WALL": "#", "FLOOR": ".", "": " "}


def show(world, caption):
    obs = observe(world, config, ObsConfig(width=48, height=28))
    print(f"\n{caption}")
    print(f"  agent at ({world.agent.x:.2f}, {world.agent.z:.2f}) "
          f"yaw {world.agent.yaw:.0f}")
    for row in obs.raster.labels:
        print("  " + "".join(GLYPHS.get(cell, cell[0].upper()) for cell in row))
    if obs.visible:
        print("  visible: " + ", ".join(v.instance_id for v in obs.visible))


# --- walk the house -----------------------------------------------------------

world = initial_world(house)
show(world, "start: kitchen, facing +Z")

# face the counter (west wall), tilt down, and look at the dishes
for _ in range(6):
    world, _ = apply_action(world, Action.LOOK_LEFT, config)
for _ in range(3):
    world, _ = apply_action(world, Action.LOOK_DOWN, config)
show(world, "after turning to the counter and tilting down 45 degrees")

# level off, turn east, walk toward the living-room door at (5, 2)
for _ in range(3):
    world, _ = apply_action(world, Action.LOOK_UP, config)
for _ in range(12):
    world, _ = apply_action(world, Action.LOOK_RIGHT, config)
for _ in range(14):
    world, events = apply_action(world, Action.MOVE_FORWARD, config)
for _ in range(2):
    world, _ = apply_action(world, Action.LOOK_DOWN, config)
show(world, "after walking east through the doorway (tilted 30 degrees down)")

room = house.room_at(world.agent.x, world.agent.z)
print(f"\nthe agent now stands in {room.room_id!r}")
