"""House loading and runtime scenario editing: placing, removing, and
seeded random generation of collision-free object layouts.
"""

from __future__ import annotations

import json
import re

from .config import StepConfig, DEFAULT_CONFIG
from .errors import (CollisionAtTarget, HeldObject, MalformedFile,
                     OutOfBounds, PlacementBudgetExceeded, UnknownInstance,
                     UnknownSurface, UnknownType, ValidationFailed)
from .geometry import VOLUME_TOL
from .model import (HeldByAgent, House, InContainer, ObjectInstance,
                    OnSurface, WorldState, initial_world, validate_house)
from .physics import agent_box, collides, settle, solid_aabbs
from . import serialization as ser

PLACEMENT_BUDGET = 1000

_MASK64 = (1 << 64) - 1


class SplitMix64:
    """SplitMix64: the published seed contract for scenario sampling.

    state += 0x9E3779B97F4A7C15; z = state; z = (z ^ z>>30) * 0xBF58476D1CE4E5B9;
    z = (z ^ z>>27) * 0x94D049BB133111EB; return z ^ z>>31 (all mod 2^64).
    Uniform doubles take the top 53 bits.
    """

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * (2.0 ** -53)

    def below(self, n: int) -> int:
        return min(n - 1, int(self.uniform() * n))


def load_house(data) -> House:
    """Parse and validate a house document (bytes, str, or parsed dict)."""
    if isinstance(data, (bytes, str)):
        try:
            doc = json.loads(data)
        except json.JSONDecodeError as exc:
            raise MalformedFile(str(exc)) from exc
    else:
        doc = data
    house = ser.house_from_json(doc)
    report = validate_house(house)
    if report:
        raise ValidationFailed(report)
    return house


def fresh_instance_id(world: WorldState, type_id: str) -> str:
    pattern = re.compile(re.escape(type_id) + r"-(\d+)$")
    highest = 0
    for oid in world.objects:
        m = pattern.match(oid)
        if m:
            highest = max(highest, int(m.group(1)))
    return f"{type_id}-{highest + 1}"


def place_object(world: WorldState, type_id: str, yaw: float, surface_id: str,
                 x: float, z: float,
                 config: StepConfig = DEFAULT_CONFIG) -> tuple[WorldState, str]:
    """Add a fresh instance on a room surface at owner-local coordinates."""
    if type_id not in world.house.types_by_id:
        raise UnknownType(type_id)
    entry = world.house.surface_index.get(surface_id)
    if entry is None:
        raise UnknownSurface(surface_id)
    _, surf = entry
    if not surf.rect.contains(x, z):
        raise OutOfBounds(f"({x}, {z}) outside surface {surface_id!r}")
    instance_id = fresh_instance_id(world, type_id)
    obj = ObjectInstance(instance_id, type_id, yaw % 360.0,
                         OnSurface(surface_id, x, z))
    candidate = settle(world.with_object(obj), config)
    box = solid_aabbs(candidate, config)[instance_id]
    contact = collides(candidate, box, ignore={instance_id}, config=config,
                       relative_to=instance_id)
    if contact is not None:
        raise CollisionAtTarget(f"{type_id} at ({x}, {z}) on {surface_id!r}: {contact}")
    if box.overlap_volume(agent_box(world.agent.x, world.agent.z, config)) > VOLUME_TOL:
        raise CollisionAtTarget(f"{type_id} at ({x}, {z}) overlaps the agent")
    return candidate, instance_id


def remove_object(world: WorldState, instance_id: str,
                  config: StepConfig = DEFAULT_CONFIG) -> WorldState:
    """Remove an instance (plus any contents); supported objects re-settle."""
    if instance_id not in world.objects:
        raise UnknownInstance(instance_id)
    obj = world.objects[instance_id]
    if isinstance(obj.location, HeldByAgent) or world.agent.held == instance_id:
        raise HeldObject(instance_id)
    doomed = {instance_id}
    grew = True
    while grew:
        grew = False
        for oid, o in world.objects.items():
            if oid in doomed:
                continue
            if isinstance(o.location, InContainer) and o.location.container_id in doomed:
                doomed.add(oid)
                grew = True
    out = world
    for oid in doomed:
        out = out.without_object(oid)
    return settle(out, config)


def generate_scenario(house: House, spec, seed: int,
                      config: StepConfig = DEFAULT_CONFIG) -> WorldState:
    """Seeded rejection sampling of collision-free placements.

    Identical (house, spec, seed) always yields an identical world; each
    object gets a fixed attempt budget before PlacementBudgetExceeded.
    """
    rng = SplitMix64(seed)
    world = initial_world(house)
    pool = []
    for room in house.rooms:
        for surf in room.surfaces:
            pool.append(surf)
        pool.append(room.floor_surface())
    items = spec.items() if isinstance(spec, dict) else spec
    for type_id, count in items:
        if type_id not in house.types_by_id:
            raise UnknownType(type_id)
        for _ in range(int(count)):
            for attempt in range(PLACEMENT_BUDGET):
                surf = pool[rng.below(len(pool))]
                r = surf.rect
                x = r.min_x + rng.uniform() * (r.max_x - r.min_x)
                z = r.min_z + rng.uniform() * (r.max_z - r.min_z)
                yaw = rng.uniform() * 360.0
                try:
                    world, _ = place_object(world, type_id, yaw,
                                            surf.surface_id, x, z, config)
                    break
                except (CollisionAtTarget, OutOfBounds):
                    continue
            else:
                raise PlacementBudgetExceeded(type_id, PLACEMENT_BUDGET)
    return world
