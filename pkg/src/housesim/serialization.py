"""JSON schemas for houses, worlds, trajectories, configs, and events.

All documents are UTF-8 JSON with a `format` version field. Encoding is
canonical: fields are emitted in a fixed order and floats use Python's
shortest round-trip representation, so equal values encode to equal bytes.
"""

from __future__ import annotations

import json
from typing import Any

from .config import StepConfig
from .errors import MalformedFile, UnsupportedVersion
from .events import (Disengaged, Engaged, InteractionEvent, NoTarget, Pick,
                     Place, SetState)
from .geometry import Rect
from .model import (AgentState, Door, HeldByAgent, House, InContainer,
                    ObjectClass, ObjectInstance, ObjectType, OnSurface, Room,
                    Surface, WorldState)

HOUSE_FORMAT = "housesim/1"
WORLD_FORMAT = "housesim-world/1"
TRAJ_FORMAT = "housesim-traj/1"
PROTOCOL_VERSION = "housesim/1"


def dumps(doc: Any) -> str:
    return json.dumps(doc, separators=(",", ":"), ensure_ascii=False)


def _require(doc: dict, key: str):
    if not isinstance(doc, dict) or key not in doc:
        raise MalformedFile(f"missing key {key!r}")
    return doc[key]


def _check_format(doc: dict, expected: str):
    fmt = _require(doc, "format")
    if fmt != expected:
        raise UnsupportedVersion(f"expected {expected!r}, got {fmt!r}")


# --- primitives -------------------------------------------------------------

def rect_to_json(rect: Rect) -> list:
    return [rect.min_x, rect.min_z, rect.max_x, rect.max_z]


def rect_from_json(v) -> Rect:
    try:
        a, b, c, d = (float(x) for x in v)
    except (TypeError, ValueError) as exc:
        raise MalformedFile(f"bad rect: {v!r}") from exc
    return Rect(a, b, c, d)


def surface_to_json(s: Surface) -> dict:
    return {"surface_id": s.surface_id, "rect": rect_to_json(s.rect), "height": s.height}


def surface_from_json(doc) -> Surface:
    return Surface(str(_require(doc, "surface_id")),
                   rect_from_json(_require(doc, "rect")),
                   float(_require(doc, "height")))


def type_to_json(t: ObjectType) -> dict:
    doc: dict = {
        "type_id": t.type_id,
        "display_name": t.display_name,
        "class": t.object_class.value,
        "half_extents": list(t.half_extents),
        "variant_tag": t.variant_tag,
    }
    if t.object_class is ObjectClass.OPENABLE:
        doc["interior_surfaces"] = [surface_to_json(s) for s in t.interior_surfaces]
        doc["open_threshold"] = t.open_threshold
    if t.state_labels is not None:
        doc["state_labels"] = list(t.state_labels)
    return doc


def type_from_json(doc) -> ObjectType:
    try:
        cls = ObjectClass(_require(doc, "class"))
    except ValueError as exc:
        raise MalformedFile(f"unknown object class {doc.get('class')!r}") from exc
    he = _require(doc, "half_extents")
    if not isinstance(he, (list, tuple)) or len(he) != 3:
        raise MalformedFile("half_extents must be a 3-vector")
    labels = doc.get("state_labels")
    return ObjectType(
        type_id=str(_require(doc, "type_id")),
        display_name=str(doc.get("display_name", doc["type_id"])),
        object_class=cls,
        half_extents=tuple(float(x) for x in he),
        variant_tag=str(doc.get("variant_tag", "")),
        interior_surfaces=tuple(surface_from_json(s)
                                for s in doc.get("interior_surfaces", [])),
        state_labels=tuple(str(x) for x in labels) if labels is not None else None,
        open_threshold=float(doc.get("open_threshold", 0.9)),
    )


def room_to_json(r: Room) -> dict:
    return {
        "room_id": r.room_id,
        "kind": r.kind,
        "floor_rect": rect_to_json(r.floor_rect),
        "wall_height": r.wall_height,
        "surfaces": [surface_to_json(s) for s in r.surfaces],
    }


def room_from_json(doc) -> Room:
    return Room(
        room_id=str(_require(doc, "room_id")),
        kind=str(doc.get("kind", "")),
        floor_rect=rect_from_json(_require(doc, "floor_rect")),
        wall_height=float(doc.get("wall_height", 2.5)),
        surfaces=tuple(surface_from_json(s) for s in doc.get("surfaces", [])),
    )


def door_to_json(d: Door) -> dict:
    return {"door_id": d.door_id, "rooms": list(d.rooms),
            "anchor": list(d.anchor), "width": d.width}


def door_from_json(doc) -> Door:
    rooms = _require(doc, "rooms")
    if not isinstance(rooms, (list, tuple)) or len(rooms) != 2:
        raise MalformedFile("door rooms must be a pair")
    anchor = _require(doc, "anchor")
    return Door(str(_require(doc, "door_id")),
                (str(rooms[0]), str(rooms[1])),
                (float(anchor[0]), float(anchor[1])),
                float(_require(doc, "width")))


def location_to_json(loc) -> dict:
    if isinstance(loc, OnSurface):
        return {"kind": "on-surface", "surface": loc.surface_id, "x": loc.x, "z": loc.z}
    if isinstance(loc, InContainer):
        return {"kind": "in-container", "container": loc.container_id,
                "surface": loc.surface_id, "x": loc.x, "z": loc.z}
    return {"kind": "held"}


def location_from_json(doc):
    kind = _require(doc, "kind")
    if kind == "on-surface":
        return OnSurface(str(_require(doc, "surface")),
                         float(_require(doc, "x")), float(_require(doc, "z")))
    if kind == "in-container":
        return InContainer(str(_require(doc, "container")), str(_require(doc, "surface")),
                           float(_require(doc, "x")), float(_require(doc, "z")))
    if kind == "held":
        return HeldByAgent()
    raise MalformedFile(f"unknown location kind {kind!r}")


def instance_to_json(o: ObjectInstance) -> dict:
    return {
        "instance_id": o.instance_id,
        "type": o.type_id,
        "yaw": o.yaw,
        "location": location_to_json(o.location),
        "open_fraction": o.open_fraction,
        "toggle_state": o.toggle_state,
        "height_offset": o.height_offset,
    }


def instance_from_json(doc) -> ObjectInstance:
    return ObjectInstance(
        instance_id=str(_require(doc, "instance_id")),
        type_id=str(_require(doc, "type")),
        yaw=float(doc.get("yaw", 0.0)),
        location=location_from_json(_require(doc, "location")),
        open_fraction=float(doc.get("open_fraction", 0.0)),
        toggle_state=int(doc.get("toggle_state", 0)),
        height_offset=float(doc.get("height_offset", 0.0)),
    )


def agent_to_json(a: AgentState) -> dict:
    return {"x": a.x, "z": a.z, "yaw": a.yaw, "pitch": a.pitch,
            "held": a.held, "engaged": a.engaged}


def agent_from_json(doc) -> AgentState:
    held = doc.get("held")
    engaged = doc.get("engaged")
    return AgentState(float(_require(doc, "x")), float(_require(doc, "z")),
                      float(doc.get("yaw", 0.0)), float(doc.get("pitch", 0.0)),
                      str(held) if held is not None else None,
                      str(engaged) if engaged is not None else None)


def config_to_json(c: StepConfig) -> dict:
    return {
        "step_length": c.step_length,
        "yaw_step": c.yaw_step,
        "pitch_step": c.pitch_step,
        "open_step": c.open_step,
        "max_interact_range": c.max_interact_range,
        "agent_radius": c.agent_radius,
        "eye_height": c.eye_height,
        "carry_offset": list(c.carry_offset),
    }


def config_from_json(doc) -> StepConfig:
    base = StepConfig()
    if doc is None:
        return base
    co = doc.get("carry_offset", list(base.carry_offset))
    return StepConfig(
        step_length=float(doc.get("step_length", base.step_length)),
        yaw_step=float(doc.get("yaw_step", base.yaw_step)),
        pitch_step=float(doc.get("pitch_step", base.pitch_step)),
        open_step=float(doc.get("open_step", base.open_step)),
        max_interact_range=float(doc.get("max_interact_range", base.max_interact_range)),
        agent_radius=float(doc.get("agent_radius", base.agent_radius)),
        eye_height=float(doc.get("eye_height", base.eye_height)),
        carry_offset=tuple(float(x) for x in co),
    )


# --- houses and worlds -------------------------------------------------------

def house_to_json(house: House) -> dict:
    return {
        "format": HOUSE_FORMAT,
        "house_id": house.house_id,
        "type_catalog": [type_to_json(t) for t in house.type_catalog],
        "rooms": [room_to_json(r) for r in house.rooms],
        "doors": [door_to_json(d) for d in house.doors],
        "objects": [instance_to_json(o) for o in house.initial_objects],
    }


def house_from_json(doc) -> House:
    _check_format(doc, HOUSE_FORMAT)
    return House(
        house_id=str(_require(doc, "house_id")),
        rooms=tuple(room_from_json(r) for r in _require(doc, "rooms")),
        doors=tuple(door_from_json(d) for d in _require(doc, "doors")),
        type_catalog=tuple(type_from_json(t) for t in _require(doc, "type_catalog")),
        initial_objects=tuple(instance_from_json(o) for o in _require(doc, "objects")),
    )


def state_to_json(world: WorldState, _memo: dict | None = None) -> dict:
    """Dynamic snapshot only (agent + objects); the house is carried separately.

    `_memo` lets a caller serializing many snapshots of the same world reuse
    documents for instances shared (by identity) between snapshots.
    """
    if _memo is None:
        objects = [instance_to_json(world.objects[k]) for k in sorted(world.objects)]
    else:
        objects = []
        for k in sorted(world.objects):
            obj = world.objects[k]
            hit = _memo.get(id(obj))
            if hit is None or hit[0] is not obj:
                hit = (obj, instance_to_json(obj))
                _memo[id(obj)] = hit
            objects.append(hit[1])
    return {"agent": agent_to_json(world.agent), "objects": objects}


def state_from_json(doc, house: House, _memo: dict | None = None) -> WorldState:
    """Parse one snapshot.

    `_memo` lets a caller parsing many snapshots share the frozen
    ObjectInstance for records that repeat verbatim between snapshots.
    """
    objs = {}
    for d in _require(doc, "objects"):
        if _memo is not None and isinstance(d, dict):
            hit = _memo.get(d.get("instance_id"))
            # equal records parse to equal instances, so the frozen object
            # from the previous snapshot can stand in for a fresh parse
            if hit is not None and hit[0] == d:
                obj = hit[1]
            else:
                obj = instance_from_json(d)
                _memo[obj.instance_id] = (d, obj)
            objs[obj.instance_id] = obj
            continue
        obj = instance_from_json(d)
        objs[obj.instance_id] = obj
    return WorldState(house, agent_from_json(_require(doc, "agent")), objs)


def world_to_json(world: WorldState) -> dict:
    doc = {"format": WORLD_FORMAT, "house": house_to_json(world.house)}
    doc.update(state_to_json(world))
    return doc


def world_from_json(doc) -> WorldState:
    _check_format(doc, WORLD_FORMAT)
    house = house_from_json(_require(doc, "house"))
    return state_from_json(doc, house)


# --- events -------------------------------------------------------------------

def event_to_json(event: InteractionEvent) -> dict:
    if isinstance(event, Pick):
        return {"kind": "pick", "id": event.instance_id}
    if isinstance(event, Place):
        return {"kind": "place", "id": event.instance_id, "room": event.room_id,
                "x": event.x, "z": event.z}
    if isinstance(event, SetState):
        doc = {"kind": "set-state", "id": event.instance_id, "state": event.state}
        if event.fraction_before is not None:
            doc["from"] = event.fraction_before
            doc["to"] = event.fraction_after
        return doc
    if isinstance(event, Engaged):
        return {"kind": "engaged", "id": event.instance_id}
    if isinstance(event, Disengaged):
        return {"kind": "disengaged", "id": event.instance_id}
    if isinstance(event, NoTarget):
        return {"kind": "no-target"}
    raise TypeError(f"not an interaction event: {event!r}")


def event_from_json(doc) -> InteractionEvent:
    kind = _require(doc, "kind")
    if kind == "pick":
        return Pick(str(_require(doc, "id")))
    if kind == "place":
        return Place(str(_require(doc, "id")), str(_require(doc, "room")),
                     float(_require(doc, "x")), float(_require(doc, "z")))
    if kind == "set-state":
        state = doc.get("state")
        if isinstance(state, str) or state is None:
            pass
        else:
            state = int(state)
        before = doc.get("from")
        after = doc.get("to")
        return SetState(str(_require(doc, "id")), state,
                        float(before) if before is not None else None,
                        float(after) if after is not None else None)
    if kind == "engaged":
        return Engaged(str(_require(doc, "id")))
    if kind == "disengaged":
        return Disengaged(str(_require(doc, "id")))
    if kind == "no-target":
        return NoTarget()
    raise MalformedFile(f"unknown event kind {kind!r}")
