"""First-person targeting and the overloaded interact action.

Interact priority: placement of a held object, then disengaging the
engaged container, then class dispatch (engage / pick / toggle) on the
targeted object. All outcomes are events; nothing raises.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

from .config import StepConfig
from .events import (Disengaged, Engaged, InteractionEvent, NoTarget, Pick,
                     Place, SetState)
from .geometry import GEO_TOL, Box, Rect, Vec3, ray_box, ray_horizontal_rect, view_direction
from .model import (AgentState, HeldByAgent, InContainer, ObjectClass,
                    OnSurface, WorldState, chain_open, container_chain,
                    room_of_instance)
from .physics import collides, raycast_walls, settle, solid_aabbs

_TOP_FACE_TOL = 1e-9


def view_ray(agent: AgentState, config: StepConfig) -> tuple[Vec3, Vec3]:
    """Ray from the agent eye point along its view direction."""
    origin = (agent.x, config.eye_height, agent.z)
    return origin, view_direction(agent.yaw, agent.pitch)


@dataclass(frozen=True)
class _Hit:
    t: float
    kind: str          # "object", "object-top", "surface", "interior"
    key: str           # instance or surface id, for deterministic ties
    instance_id: Optional[str] = None
    surface_id: Optional[str] = None
    container_id: Optional[str] = None
    point: Vec3 = (0.0, 0.0, 0.0)


_KIND_PRIORITY = {"object": 0, "object-top": 0, "interior": 1, "surface": 2}


def _is_open(world: WorldState, instance_id: str) -> bool:
    obj = world.instance(instance_id)
    t = world.instance_type(instance_id)
    return (t.object_class is ObjectClass.OPENABLE
            and obj.open_fraction >= t.open_threshold)


def _gather_hits(world: WorldState, config: StepConfig,
                 include_supports: bool) -> list[_Hit]:
    origin, direction = view_ray(world.agent, config)
    bound = config.max_interact_range
    wall = raycast_walls(world.house, origin, direction, bound)
    floor_hit: Optional[_Hit] = None
    if wall is not None:
        bound = wall[0]
        if wall[1] == "FLOOR" and include_supports:
            p = (origin[0] + bound * direction[0], 0.0,
                 origin[2] + bound * direction[2])
            room = world.house.room_at(p[0], p[2])
            if room is not None:
                floor_hit = _Hit(bound, "surface", room.room_id + ":floor",
                                 surface_id=room.room_id + ":floor", point=p)

    hits: list[_Hit] = []
    held = world.agent.held
    boxes = solid_aabbs(world, config)
    for oid, box in boxes.items():
        if oid == held or not chain_open(world, oid):
            continue
        t = ray_box(origin, direction, box)
        if t is None or t > bound:
            continue
        p = (origin[0] + t * direction[0], origin[1] + t * direction[1],
             origin[2] + t * direction[2])
        kind = "object"
        if (include_supports and direction[1] < 0.0
                and abs(p[1] - box.max[1]) <= _TOP_FACE_TOL):
            kind = "object-top"
        hits.append(_Hit(t, kind, oid, instance_id=oid, point=p))

    if include_supports:
        if floor_hit is not None:
            hits.append(floor_hit)
        for room in world.house.rooms:
            ox, oz = room.origin
            for surf in room.surfaces:
                world_rect = Rect(surf.rect.min_x + ox, surf.rect.min_z + oz,
                                  surf.rect.max_x + ox, surf.rect.max_z + oz)
                t = ray_horizontal_rect(origin, direction, world_rect, surf.height)
                if t is not None and t <= bound:
                    p = (origin[0] + t * direction[0], surf.height,
                         origin[2] + t * direction[2])
                    hits.append(_Hit(t, "surface", surf.surface_id,
                                     surface_id=surf.surface_id, point=p))
        for oid, box in boxes.items():
            if not _is_open(world, oid) or not chain_open(world, oid):
                continue
            ctype = world.instance_type(oid)
            for surf in ctype.interior_surfaces:
                world_rect = Rect(surf.rect.min_x + box.min[0], surf.rect.min_z + box.min[2],
                                  surf.rect.max_x + box.min[0], surf.rect.max_z + box.min[2])
                plane = box.min[1] + surf.height
                t = ray_horizontal_rect(origin, direction, world_rect, plane)
                if t is not None and t <= bound:
                    p = (origin[0] + t * direction[0], plane,
                         origin[2] + t * direction[2])
                    hits.append(_Hit(t, "interior", f"{oid}/{surf.surface_id}",
                                     container_id=oid, surface_id=surf.surface_id,
                                     point=p))

    # open containers are shells: a hit inside them beats the shell itself
    inner = set()
    for h in hits:
        if h.kind in ("object", "object-top") and h.instance_id is not None:
            inner.update(container_chain(world, h.instance_id))
        elif h.kind == "interior":
            inner.add(h.container_id)
    hits = [h for h in hits
            if not (h.instance_id is not None and h.instance_id in inner
                    and _is_open(world, h.instance_id))]
    hits.sort(key=lambda h: (h.t, _KIND_PRIORITY[h.kind], h.key))
    return hits


def target(world: WorldState, config: StepConfig) -> Optional[tuple[str, Vec3]]:
    """Nearest interactable object on the view ray within range.

    Contents of a container are hittable only while its whole chain is open
    past threshold; the held object is never a target.
    """
    for hit in _gather_hits(world, config, include_supports=False):
        if hit.kind == "object":
            return hit.instance_id, hit.point
    return None


def _attempt_place(world: WorldState, config: StepConfig) -> tuple[WorldState, InteractionEvent]:
    held_id = world.agent.held
    hits = _gather_hits(world, config, include_supports=True)
    if not hits:
        return world, NoTarget()
    hit = hits[0]
    house = world.house
    boxes = solid_aabbs(world, config)

    if hit.kind == "surface":
        room, surf = house.surface_index[hit.surface_id]
        ox, oz = room.origin
        new_loc = OnSurface(surf.surface_id, hit.point[0] - ox, hit.point[2] - oz)
        offset = 0.0
    elif hit.kind == "interior":
        cbox = boxes[hit.container_id]
        new_loc = InContainer(hit.container_id, hit.surface_id,
                              hit.point[0] - cbox.min[0], hit.point[2] - cbox.min[2])
        offset = 0.0
    elif hit.kind == "object-top":
        support = world.instance(hit.instance_id)
        top_y = boxes[hit.instance_id].max[1]
        if isinstance(support.location, OnSurface):
            room, surf = house.surface_index[support.location.surface_id]
            ox, oz = room.origin
            local = (hit.point[0] - ox, hit.point[2] - oz)
            if not surf.rect.contains(*local):
                return world, NoTarget()
            new_loc = OnSurface(surf.surface_id, *local)
            offset = top_y - surf.height
        elif isinstance(support.location, InContainer):
            sc = support.location
            cbox = boxes[sc.container_id]
            ctype = world.instance_type(sc.container_id)
            surf = next(s for s in ctype.interior_surfaces if s.surface_id == sc.surface_id)
            local = (hit.point[0] - cbox.min[0], hit.point[2] - cbox.min[2])
            if not surf.rect.contains(*local):
                return world, NoTarget()
            new_loc = InContainer(sc.container_id, sc.surface_id, *local)
            offset = top_y - (cbox.min[1] + surf.height)
        else:
            return world, NoTarget()
    else:
        return world, NoTarget()

    held = world.instance(held_id)
    placed = replace(held, location=new_loc, height_offset=offset)
    candidate = world.with_object(placed).with_agent(replace(world.agent, held=None))
    candidate = settle(candidate, config)
    placed_box = solid_aabbs(candidate, config)[held_id]
    contact = collides(candidate, placed_box, ignore={held_id}, config=config,
                       relative_to=held_id)
    if contact is not None:
        return world, NoTarget()
    room = room_of_instance(candidate, held_id)
    room_id = room.room_id if room is not None else ""
    return candidate, Place(held_id, room_id, hit.point[0], hit.point[2])


def interact(world: WorldState, config: StepConfig) -> tuple[WorldState, InteractionEvent]:
    agent = world.agent

    if agent.held is not None:
        return _attempt_place(world, config)

    hit = target(world, config)

    if agent.engaged is not None and hit is not None and hit[0] == agent.engaged:
        return (world.with_agent(replace(agent, engaged=None)),
                Disengaged(agent.engaged))

    if hit is None:
        return world, NoTarget()
    oid = hit[0]
    obj = world.instance(oid)
    cls = world.instance_type(oid).object_class

    if cls is ObjectClass.OPENABLE:
        return world.with_agent(replace(agent, engaged=oid)), Engaged(oid)
    if cls is ObjectClass.PICKABLE:
        if not chain_open(world, oid):
            return world, NoTarget()
        picked = replace(obj, location=HeldByAgent(), height_offset=0.0)
        new_world = world.with_object(picked).with_agent(replace(agent, held=oid))
        return new_world, Pick(oid)
    if cls is ObjectClass.TOGGLEABLE:
        new_state = 1 - obj.toggle_state
        return world.with_object(replace(obj, toggle_state=new_state)), SetState(oid, new_state)
    return world, NoTarget()
