import json

import pytest

from housesim.cli import bundled_house_paths
from housesim.config import StepConfig
from housesim.model import AgentState, initial_world
from housesim.physics import agent_position_free
from housesim.scenario import SplitMix64, generate_scenario, load_house


def _load_bundled():
    houses = {}
    for path in bundled_house_paths():
        with open(path, "rb") as fh:
            house = load_house(fh.read())
        houses[house.house_id] = house
    return houses


HOUSES = _load_bundled()


@pytest.fixture(scope="session")
def houses():
    return HOUSES


@pytest.fixture(scope="session")
def bungalow():
    return HOUSES["bungalow"]


@pytest.fixture(scope="session")
def loft():
    return HOUSES["loft"]


@pytest.fixture
def bungalow_world(bungalow):
    return initial_world(bungalow)


def random_world(seed, config=StepConfig(), spec=(("plate", 3),)):
    """A seeded random world: generated clutter plus a random free agent pose."""
    rng = SplitMix64(seed)
    house = HOUSES[("bungalow", "loft")[rng.below(2)]]
    world = generate_scenario(house, list(spec), seed, config)
    for _ in range(1000):
        room = house.rooms[rng.below(len(house.rooms))]
        r = room.floor_rect
        x = r.min_x + rng.uniform() * (r.max_x - r.min_x)
        z = r.min_z + rng.uniform() * (r.max_z - r.min_z)
        if agent_position_free(world, x, z, config):
            yaw = rng.uniform() * 360.0
            return world.with_agent(AgentState(x, z, yaw, 0.0, None, None))
    raise RuntimeError(f"no free agent pose for seed {seed}")
