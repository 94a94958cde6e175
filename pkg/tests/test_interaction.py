import math
from dataclasses import replace

import pytest

from housesim.config import StepConfig
from housesim.events import (Disengaged, Engaged, NoTarget, Pick, Place,
                             SetState)
from housesim.kinematics import Action, apply_action
from housesim.model import AgentState, HeldByAgent, initial_world
from housesim.interaction import interact, target
from housesim.physics import solid_aabbs

CONFIG = StepConfig()


def aim_at(world, x, y, z, standoff_x=0.0, standoff_z=1.0):
    """Agent pose standing at (x+sx, z+sz) with the eye ray through (x,y,z)."""
    ax, az = x + standoff_x, z + standoff_z
    dx, dz = x - ax, z - az
    yaw = math.degrees(math.atan2(dx, dz))
    dxz = math.hypot(dx, dz)
    pitch = math.degrees(math.atan2(y - CONFIG.eye_height, dxz))
    return AgentState(ax, az, yaw % 360.0, pitch, world.agent.held,
                      world.agent.engaged)


def top_center(world, oid):
    box = solid_aabbs(world, CONFIG)[oid]
    return ((box.min[0] + box.max[0]) / 2, box.max[1],
            (box.min[2] + box.max[2]) / 2)


def test_no_target_in_empty_view(bungalow_world):
    # initial pose looks across the empty hall doorway
    assert target(bungalow_world, CONFIG) is None
    w, event = interact(bungalow_world, CONFIG)
    assert event == NoTarget()
    assert w == bungalow_world


def test_target_beyond_range_misses(bungalow_world):
    x, y, z = top_center(bungalow_world, "dishwasher-1")
    w = bungalow_world.with_agent(aim_at(bungalow_world, x, y, z, standoff_z=2.5))
    assert target(w, CONFIG) is None


def test_engage_then_disengage_via_interact(bungalow_world):
    x, y, z = top_center(bungalow_world, "dishwasher-1")
    w = bungalow_world.with_agent(aim_at(bungalow_world, x, y - 0.1, z, standoff_z=0.9))
    got = target(w, CONFIG)
    assert got is not None and got[0] == "dishwasher-1"
    w, event = interact(w, CONFIG)
    assert event == Engaged("dishwasher-1")
    assert w.agent.engaged == "dishwasher-1"
    w, event = interact(w, CONFIG)
    assert event == Disengaged("dishwasher-1")
    assert w.agent.engaged is None


def test_closed_container_contents_not_targetable(bungalow_world):
    # plate-1 sits inside the closed dishwasher: rays only see the shell
    x, y, z = top_center(bungalow_world, "plate-1")
    w = bungalow_world.with_agent(aim_at(bungalow_world, x, y, z, standoff_z=0.8))
    got = target(w, CONFIG)
    assert got is not None and got[0] == "dishwasher-1"


def test_open_container_reveals_contents(bungalow_world):
    w = bungalow_world.with_object(
        replace(bungalow_world.instance("dishwasher-1"), open_fraction=1.0))
    x, y, z = top_center(w, "plate-1")
    w = w.with_agent(aim_at(w, x, y, z, standoff_z=0.8))
    got = target(w, CONFIG)
    assert got is not None and got[0] == "plate-1"
    w, event = interact(w, CONFIG)
    assert event == Pick("plate-1")
    assert w.agent.held == "plate-1"
    assert isinstance(w.instance("plate-1").location, HeldByAgent)


def test_open_shell_still_targetable_when_ray_misses_contents(bungalow_world):
    w = bungalow_world.with_object(
        replace(bungalow_world.instance("dishwasher-1"), open_fraction=1.0))
    x, y, z = top_center(w, "dishwasher-1")
    # graze the shell's top corner, far from the plate
    w = w.with_agent(aim_at(w, x - 0.4, y - 0.05, z, standoff_z=0.9))
    got = target(w, CONFIG)
    assert got is not None and got[0] == "dishwasher-1"


def test_below_threshold_is_still_closed(bungalow_world):
    w = bungalow_world.with_object(
        replace(bungalow_world.instance("dishwasher-1"), open_fraction=0.8))
    x, y, z = top_center(w, "plate-1")
    w = w.with_agent(aim_at(w, x, y, z, standoff_z=0.8))
    got = target(w, CONFIG)
    assert got is not None and got[0] == "dishwasher-1"


def test_toggle_flips_state(bungalow_world):
    x, y, z = top_center(bungalow_world, "tv-1")
    w = bungalow_world.with_agent(
        aim_at(bungalow_world, x, y - 0.1, z + 0.25, standoff_z=0.8))
    w, event = interact(w, CONFIG)
    assert event == SetState("tv-1", 1)
    assert w.instance("tv-1").toggle_state == 1
    w, event = interact(w, CONFIG)
    assert event == SetState("tv-1", 0)


def test_place_on_annotated_surface(bungalow_world):
    w = bungalow_world.with_object(
        replace(bungalow_world.instance("plate-1"), location=HeldByAgent(),
                height_offset=0.0))
    w = w.with_agent(AgentState(1.6, 1.8, 180.0, -35.0, "plate-1", None))
    w, event = interact(w, CONFIG)
    assert isinstance(event, Place)
    assert event.instance_id == "plate-1" and event.room_id == "kitchen"
    loc = w.instance("plate-1").location
    assert loc.surface_id == "kitchen-counter"
    assert w.agent.held is None


def test_place_rejected_when_spot_occupied(bungalow_world):
    # plate-2 already sits at counter local (1.0, 0.6); aim right at it
    w = bungalow_world.with_object(
        replace(bungalow_world.instance("plate-1"), location=HeldByAgent(),
                height_offset=0.0))
    w = w.with_agent(AgentState(1.1, 1.8, 180.0, -35.0, "plate-1", None))
    w2, event = interact(w, CONFIG)
    assert event == NoTarget()
    assert w2.agent.held == "plate-1"


def test_place_on_floor(bungalow_world):
    # the floor plane is eye_height away straight down, so reaching it
    # needs a range above the 1.5m default
    cfg = StepConfig(max_interact_range=2.0)
    w = bungalow_world.with_object(
        replace(bungalow_world.instance("towel-1"), location=HeldByAgent(),
                height_offset=0.0))
    w = w.with_agent(AgentState(3.5, 2.5, 0.0, -60.0, "towel-1", None))
    w, event = interact(w, cfg)
    assert isinstance(event, Place)
    loc = w.instance("towel-1").location
    assert loc.surface_id == "kitchen:floor"
    assert w.instance("towel-1").height_offset == pytest.approx(0.0)


def test_place_inside_open_container(bungalow_world):
    w = bungalow_world.with_object(
        replace(bungalow_world.instance("dishwasher-1"), open_fraction=1.0))
    w = w.without_object("plate-1")
    w = w.with_object(replace(bungalow_world.instance("mug-1"),
                              location=HeldByAgent(), height_offset=0.0))
    # aim at the rack plane inside the open dishwasher
    box = solid_aabbs(w, CONFIG)["dishwasher-1"]
    rx = box.min[0] + 0.45
    rz = box.min[2] + 0.35
    ry = box.min[1] + 0.3
    w = w.with_agent(replace(aim_at(w, rx, ry, rz, standoff_z=0.6),
                             held="mug-1"))
    w, event = interact(w, CONFIG)
    assert isinstance(event, Place), event
    loc = w.instance("mug-1").location
    assert loc.container_id == "dishwasher-1" and loc.surface_id == "rack"


def test_stack_on_object_top(bungalow_world):
    w = bungalow_world.with_object(
        replace(bungalow_world.instance("mug-1"), location=HeldByAgent(),
                height_offset=0.0))
    pitch = math.degrees(math.atan2(0.8 - CONFIG.eye_height, 0.9))
    w = w.with_agent(AgentState(6.44, 2.4, 180.0, pitch, "mug-1", None))
    w, event = interact(w, CONFIG)
    assert isinstance(event, Place) and event.room_id == "living"
    mug = w.instance("mug-1")
    assert mug.height_offset == pytest.approx(0.8)  # table top
    box = solid_aabbs(w, CONFIG)["mug-1"]
    assert box.min[1] == pytest.approx(0.8)


def test_full_open_place_close_open_pick_round_trip(bungalow_world):
    """Scripted canonical container round-trip on the cupboard/mug pair."""
    w = bungalow_world
    cup = solid_aabbs(w, CONFIG)["cupboard-1"]
    cx = (cup.min[0] + cup.max[0]) / 2
    cz = (cup.min[2] + cup.max[2]) / 2
    front = aim_at(w, cx, cup.max[1] - 0.05, cz, standoff_z=0.9)

    def engage_and(drive, world):
        world = world.with_agent(replace(front, held=world.agent.held))
        world, ev = interact(world, CONFIG)
        assert ev == Engaged("cupboard-1"), ev
        for _ in range(5):
            world, _ = apply_action(world, drive, CONFIG)
        return world

    w = engage_and(Action.LOOK_DOWN, w)  # open
    assert w.instance("cupboard-1").open_fraction == 1.0
    # pick the mug off the shelf
    mug = solid_aabbs(w, CONFIG)["mug-1"]
    mx, my, mz = ((mug.min[0] + mug.max[0]) / 2, (mug.min[1] + mug.max[1]) / 2,
                  (mug.min[2] + mug.max[2]) / 2)
    w = w.with_agent(aim_at(w, mx, my, mz, standoff_z=0.75))
    w, ev = interact(w, CONFIG)
    assert ev == Pick("mug-1"), ev
    # place it back on the shelf
    shelf_y = solid_aabbs(w, CONFIG)["cupboard-1"].min[1] + 0.1
    w = w.with_agent(replace(aim_at(w, mx, shelf_y, mz, standoff_z=0.75),
                             held="mug-1"))
    w, ev = interact(w, CONFIG)
    assert isinstance(ev, Place), ev
    w = engage_and(Action.LOOK_UP, w)  # close
    assert w.instance("cupboard-1").open_fraction == 0.0
    # contents hidden again
    w = w.with_agent(aim_at(w, mx, my, mz, standoff_z=0.75))
    got = target(w, CONFIG)
    assert got is not None and got[0] == "cupboard-1"
