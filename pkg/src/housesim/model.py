"""Scene model: houses, rooms, doors, surfaces, object types/instances,
agent state, world snapshots, validation, and pose resolution.

Conventions
-----------
* X/Z is the horizontal plane, Y is up. Lengths in meters, angles in degrees.
* Yaw 0 faces +Z and increases clockwise viewed from above; pitch positive up.
* Room-local coordinates have their origin at the floor rectangle's min
  corner; a container's local frame has its origin at the min corner of its
  world AABB. Surface rects and on-surface coordinates share the owner frame.
* Every room has an implicit floor surface with id "<room_id>:floor".
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Optional, Union

from .config import StepConfig
from .errors import CyclicLocation, UnknownInstance
from .geometry import (GEO_TOL, Box, Rect, Vec3, box_from_center,
                       normalize_yaw, rotate_offset_xz)

WALL = "WALL"
FLOOR_SUFFIX = ":floor"


class ObjectClass(enum.Enum):
    STATIC = "static"
    PICKABLE = "pickable"
    OPENABLE = "openable"
    TOGGLEABLE = "toggleable"


@dataclass(frozen=True)
class Surface:
    """A rectangular region where objects may rest, in owner-local coords."""

    surface_id: str
    rect: Rect
    height: float  # meters above the owner floor/base


@dataclass(frozen=True)
class ObjectType:
    type_id: str
    display_name: str
    object_class: ObjectClass
    half_extents: Vec3
    variant_tag: str = ""
    interior_surfaces: tuple[Surface, ...] = ()   # Openable only
    state_labels: Optional[tuple[str, str]] = None  # Toggleable only
    open_threshold: float = 0.9                   # Openable only


@dataclass(frozen=True)
class Room:
    room_id: str
    kind: str
    floor_rect: Rect   # world XZ
    wall_height: float
    surfaces: tuple[Surface, ...] = ()

    @property
    def origin(self) -> tuple[float, float]:
        return (self.floor_rect.min_x, self.floor_rect.min_z)

    def local_floor_rect(self) -> Rect:
        return Rect(0.0, 0.0,
                    self.floor_rect.max_x - self.floor_rect.min_x,
                    self.floor_rect.max_z - self.floor_rect.min_z)

    def floor_surface(self) -> Surface:
        return Surface(self.room_id + FLOOR_SUFFIX, self.local_floor_rect(), 0.0)


@dataclass(frozen=True)
class Door:
    door_id: str
    rooms: tuple[str, str]
    anchor: tuple[float, float]  # world XZ on the shared wall
    width: float


# --- object locations ------------------------------------------------------

@dataclass(frozen=True)
class OnSurface:
    surface_id: str
    x: float
    z: float


@dataclass(frozen=True)
class InContainer:
    container_id: str
    surface_id: str  # interior surface of the container's type
    x: float
    z: float


@dataclass(frozen=True)
class HeldByAgent:
    pass


Location = Union[OnSurface, InContainer, HeldByAgent]


@dataclass(frozen=True)
class ObjectInstance:
    instance_id: str
    type_id: str
    yaw: float
    location: Location
    open_fraction: float = 0.0   # Openable only
    toggle_state: int = 0        # Toggleable only
    height_offset: float = 0.0   # base height above the resting surface (stacking)


@dataclass(frozen=True)
class AgentState:
    x: float
    z: float
    yaw: float = 0.0
    pitch: float = 0.0
    held: Optional[str] = None
    engaged: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "yaw", normalize_yaw(self.yaw))
        object.__setattr__(self, "pitch", min(90.0, max(-90.0, self.pitch)))


@dataclass(frozen=True)
class SharedEdge:
    """A wall segment shared by two rooms."""

    axis: str        # "x": wall at x == coord, segment along z; "z": the converse
    coord: float
    lo: float
    hi: float
    room_a: str
    room_b: str
    doors: tuple[tuple[float, float, str], ...] = ()  # (lo, hi, door_id) gaps


@dataclass
class House:
    house_id: str
    rooms: tuple[Room, ...]
    doors: tuple[Door, ...]
    type_catalog: tuple[ObjectType, ...]
    initial_objects: tuple[ObjectInstance, ...]

    types_by_id: dict = field(init=False, repr=False, compare=False)
    rooms_by_id: dict = field(init=False, repr=False, compare=False)
    doors_by_id: dict = field(init=False, repr=False, compare=False)
    surface_index: dict = field(init=False, repr=False, compare=False)
    shared_edges: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        self.rooms = tuple(self.rooms)
        self.doors = tuple(self.doors)
        self.type_catalog = tuple(self.type_catalog)
        self.initial_objects = tuple(self.initial_objects)
        self.types_by_id = {t.type_id: t for t in self.type_catalog}
        self.rooms_by_id = {r.room_id: r for r in self.rooms}
        self.doors_by_id = {d.door_id: d for d in self.doors}
        # surface_id -> (room, Surface); room-local rects, implicit floors included
        self.surface_index = {}
        for room in self.rooms:
            for surf in room.surfaces:
                self.surface_index[surf.surface_id] = (room, surf)
            floor = room.floor_surface()
            self.surface_index[floor.surface_id] = (room, floor)
        self.shared_edges = tuple(self._build_shared_edges())

    def _build_shared_edges(self):
        edges = []
        for i, a in enumerate(self.rooms):
            for b in self.rooms[i + 1:]:
                ra, rb = a.floor_rect, b.floor_rect
                for first, second, fr, sr in ((a, b, ra, rb), (b, a, rb, ra)):
                    # vertical wall: first's max_x touches second's min_x
                    if abs(fr.max_x - sr.min_x) <= GEO_TOL:
                        lo, hi = max(fr.min_z, sr.min_z), min(fr.max_z, sr.max_z)
                        if hi - lo > GEO_TOL:
                            edges.append(self._edge_with_doors(
                                "x", fr.max_x, lo, hi, first.room_id, second.room_id))
                    # horizontal wall: first's max_z touches second's min_z
                    if abs(fr.max_z - sr.min_z) <= GEO_TOL:
                        lo, hi = max(fr.min_x, sr.min_x), min(fr.max_x, sr.max_x)
                        if hi - lo > GEO_TOL:
                            edges.append(self._edge_with_doors(
                                "z", fr.max_z, lo, hi, first.room_id, second.room_id))
        return edges

    def _edge_with_doors(self, axis, coord, lo, hi, room_a, room_b) -> SharedEdge:
        gaps = []
        for door in self.doors:
            if set(door.rooms) != {room_a, room_b}:
                continue
            ax, az = door.anchor
            perp, along = (ax, az) if axis == "x" else (az, ax)
            if abs(perp - coord) <= GEO_TOL and lo - GEO_TOL <= along <= hi + GEO_TOL:
                gaps.append((max(lo, along - door.width / 2.0),
                             min(hi, along + door.width / 2.0),
                             door.door_id))
        return SharedEdge(axis, coord, lo, hi, room_a, room_b, tuple(sorted(gaps)))

    def room_at(self, x: float, z: float) -> Optional[Room]:
        for room in self.rooms:
            if room.floor_rect.contains(x, z, tol=0.0):
                return room
        return None

    def narrowest_door_width(self) -> float:
        return min((d.width for d in self.doors), default=math.inf)


@dataclass(frozen=True)
class WorldState:
    house: House
    agent: AgentState
    objects: dict[str, ObjectInstance]

    def instance(self, instance_id: str) -> ObjectInstance:
        try:
            return self.objects[instance_id]
        except KeyError:
            raise UnknownInstance(instance_id) from None

    def instance_type(self, instance_id: str) -> ObjectType:
        return self.house.types_by_id[self.instance(instance_id).type_id]

    def with_agent(self, agent: AgentState) -> "WorldState":
        world = WorldState(self.house, agent, self.objects)
        # object boxes depend only on the (shared, unchanged) objects dict
        cache = getattr(self, "_solid_aabbs", None)
        if cache is not None:
            object.__setattr__(world, "_solid_aabbs", cache)
        return world

    def with_object(self, obj: ObjectInstance) -> "WorldState":
        objects = dict(self.objects)
        objects[obj.instance_id] = obj
        return WorldState(self.house, self.agent, objects)

    def without_object(self, instance_id: str) -> "WorldState":
        objects = dict(self.objects)
        objects.pop(instance_id, None)
        return WorldState(self.house, self.agent, objects)


# --- pose resolution --------------------------------------------------------

def _container_origin(world: WorldState, container_id: str, config: StepConfig,
                      _seen: frozenset) -> Vec3:
    center, _ = _resolve(world, container_id, config, _seen)
    half = world.instance_type(container_id).half_extents
    return (center[0] - half[0], center[1] - half[1], center[2] - half[2])


def _resolve(world: WorldState, instance_id: str, config: StepConfig,
             _seen: frozenset) -> tuple[Vec3, float]:
    if instance_id in _seen:
        raise CyclicLocation(instance_id)
    obj = world.instance(instance_id)
    half = world.house.types_by_id[obj.type_id].half_extents
    loc = obj.location
    if isinstance(loc, OnSurface):
        entry = world.house.surface_index.get(loc.surface_id)
        if entry is None:
            raise UnknownInstance(f"surface {loc.surface_id!r} not found")
        room, surf = entry
        ox, oz = room.origin
        base = surf.height + obj.height_offset
        return ((ox + loc.x, base + half[1], oz + loc.z), obj.yaw)
    if isinstance(loc, InContainer):
        ctype = world.instance_type(loc.container_id)
        surf = next((s for s in ctype.interior_surfaces if s.surface_id == loc.surface_id), None)
        if surf is None:
            raise UnknownInstance(f"interior surface {loc.surface_id!r} of {loc.container_id!r}")
        origin = _container_origin(world, loc.container_id, config,
                                   _seen | {instance_id})
        base = origin[1] + surf.height + obj.height_offset
        return ((origin[0] + loc.x, base + half[1], origin[2] + loc.z), obj.yaw)
    # held: fixed offset in front of the agent eye point, rotated by yaw
    agent = world.agent
    off = rotate_offset_xz(agent.yaw, config.carry_offset)
    return ((agent.x + off[0], off[1], agent.z + off[2]), obj.yaw)


def resolve_pose(world: WorldState, instance_id: str,
                 config: StepConfig) -> tuple[Vec3, float]:
    """World pose (XYZ center, yaw) of an instance, composing its location chain."""
    return _resolve(world, instance_id, config, frozenset())


def world_aabb(world: WorldState, instance_id: str, config: StepConfig) -> Box:
    """World AABB of an instance; yaw never changes extents."""
    center, _ = resolve_pose(world, instance_id, config)
    return box_from_center(center, world.instance_type(instance_id).half_extents)


def container_chain(world: WorldState, instance_id: str) -> list[str]:
    """Container ids enclosing an instance, innermost first."""
    chain = []
    seen = set()
    obj = world.instance(instance_id)
    while isinstance(obj.location, InContainer):
        cid = obj.location.container_id
        if cid in seen:
            raise CyclicLocation(instance_id)
        seen.add(cid)
        chain.append(cid)
        obj = world.instance(cid)
    return chain


def chain_open(world: WorldState, instance_id: str) -> bool:
    """True when every container enclosing the instance is open past threshold."""
    for cid in container_chain(world, instance_id):
        c = world.instance(cid)
        if c.open_fraction < world.instance_type(cid).open_threshold:
            return False
    return True


def room_of_instance(world: WorldState, instance_id: str) -> Optional[Room]:
    obj = world.instance(instance_id)
    seen = set()
    while True:
        loc = obj.location
        if isinstance(loc, OnSurface):
            entry = world.house.surface_index.get(loc.surface_id)
            return entry[0] if entry else None
        if isinstance(loc, InContainer):
            if loc.container_id in seen:
                raise CyclicLocation(instance_id)
            seen.add(loc.container_id)
            obj = world.instance(loc.container_id)
            continue
        return world.house.room_at(world.agent.x, world.agent.z)


# --- validation --------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    code: str
    location: str
    message: str


ValidationReport = list


def validate_house(house: House) -> ValidationReport:
    """Structural validation; violations are data, not failures.

    The report is deterministic, ordered by (location, code).
    """
    out: list[Violation] = []

    def bad(code: str, location: str, message: str):
        out.append(Violation(code, location, message))

    seen_types = set()
    for t in house.type_catalog:
        if t.type_id in seen_types:
            bad("DUP_TYPE", t.type_id, "duplicate type id")
        seen_types.add(t.type_id)
        if min(t.half_extents) <= 0.0:
            bad("BAD_EXTENTS", t.type_id, "half extents must be strictly positive")
        if t.interior_surfaces and t.object_class is not ObjectClass.OPENABLE:
            bad("CLASS_FIELDS", t.type_id, "interior surfaces on a non-openable type")
        if t.state_labels is not None and t.object_class is not ObjectClass.TOGGLEABLE:
            bad("CLASS_FIELDS", t.type_id, "state labels on a non-toggleable type")
        if t.object_class is ObjectClass.OPENABLE and not (0.0 <= t.open_threshold <= 1.0):
            bad("BAD_THRESHOLD", t.type_id, "open threshold outside [0, 1]")
        for s in t.interior_surfaces:
            if s.rect.area() <= 0.0 or s.height < 0.0:
                bad("BAD_SURFACE", f"{t.type_id}/{s.surface_id}", "degenerate interior surface")

    seen_rooms = set()
    seen_surfaces = set()
    for room in house.rooms:
        if room.room_id in seen_rooms:
            bad("DUP_ROOM", room.room_id, "duplicate room id")
        seen_rooms.add(room.room_id)
        if room.floor_rect.area() <= 0.0:
            bad("BAD_FLOOR", room.room_id, "floor rect has no area")
        if room.wall_height <= 0.0:
            bad("BAD_WALL_HEIGHT", room.room_id, "wall height must be positive")
        local = room.local_floor_rect()
        for s in room.surfaces:
            if s.surface_id in seen_surfaces:
                bad("DUP_SURFACE", s.surface_id, "duplicate surface id")
            seen_surfaces.add(s.surface_id)
            if s.rect.area() <= 0.0 or s.height < 0.0:
                bad("BAD_SURFACE", f"{room.room_id}/{s.surface_id}", "degenerate surface")
            elif not (local.contains(s.rect.min_x, s.rect.min_z)
                      and local.contains(s.rect.max_x, s.rect.max_z)):
                bad("SURFACE_OUT_OF_ROOM", f"{room.room_id}/{s.surface_id}",
                    "surface rect outside the room floor")

    for i, a in enumerate(house.rooms):
        for b in house.rooms[i + 1:]:
            if a.floor_rect.overlap_area(b.floor_rect) > GEO_TOL:
                bad("ROOM_OVERLAP", a.room_id,
                    f"floor rects of {a.room_id!r} and {b.room_id!r} overlap")

    seen_doors = set()
    for door in house.doors:
        if door.door_id in seen_doors:
            bad("DUP_DOOR", door.door_id, "duplicate door id")
        seen_doors.add(door.door_id)
        r1, r2 = door.rooms
        if r1 == r2:
            bad("DOOR_SAME_ROOM", door.door_id, "door must join two distinct rooms")
            continue
        if r1 not in house.rooms_by_id or r2 not in house.rooms_by_id:
            bad("DOOR_UNKNOWN_ROOM", door.door_id, "door references a missing room")
            continue
        if door.width <= 0.0:
            bad("BAD_DOOR_WIDTH", door.door_id, "door width must be positive")
        on_wall = any(door.door_id in {g[2] for g in edge.doors}
                      for edge in house.shared_edges)
        if not on_wall:
            bad("DOOR_OFF_WALL", door.door_id,
                "anchor does not lie on a wall shared by both rooms")

    # door-graph connectivity
    if len(house.rooms) > 1:
        adj: dict[str, set[str]] = {r.room_id: set() for r in house.rooms}
        for door in house.doors:
            r1, r2 = door.rooms
            if r1 in adj and r2 in adj and r1 != r2:
                adj[r1].add(r2)
                adj[r2].add(r1)
        start = house.rooms[0].room_id
        reached = {start}
        stack = [start]
        while stack:
            for nxt in adj[stack.pop()]:
                if nxt not in reached:
                    reached.add(nxt)
                    stack.append(nxt)
        for room in house.rooms:
            if room.room_id not in reached:
                bad("DOOR_GRAPH_DISCONNECTED", room.room_id,
                    "room unreachable through doors")

    out.extend(_validate_objects(house))
    out.sort(key=lambda v: (v.location, v.code))
    return out


def _validate_objects(house: House) -> list[Violation]:
    out: list[Violation] = []

    def bad(code, location, message):
        out.append(Violation(code, location, message))

    by_id: dict[str, ObjectInstance] = {}
    held = []
    for obj in house.initial_objects:
        if obj.instance_id in by_id:
            bad("DUP_INSTANCE", obj.instance_id, "duplicate instance id")
        by_id[obj.instance_id] = obj
        t = house.types_by_id.get(obj.type_id)
        if t is None:
            bad("UNKNOWN_TYPE", obj.instance_id, f"unknown type {obj.type_id!r}")
            continue
        if not (0.0 <= obj.open_fraction <= 1.0):
            bad("BAD_STATE", obj.instance_id, "open fraction outside [0, 1]")
        if obj.toggle_state not in (0, 1):
            bad("BAD_STATE", obj.instance_id, "toggle state must be 0 or 1")
        loc = obj.location
        if isinstance(loc, OnSurface):
            entry = house.surface_index.get(loc.surface_id)
            if entry is None:
                bad("UNKNOWN_SURFACE", obj.instance_id,
                    f"unknown surface {loc.surface_id!r}")
            elif not entry[1].rect.contains(loc.x, loc.z):
                bad("OUT_OF_SURFACE", obj.instance_id,
                    "coordinates outside the surface rect")
        elif isinstance(loc, HeldByAgent):
            held.append(obj.instance_id)

    for obj in house.initial_objects:
        loc = obj.location
        if not isinstance(loc, InContainer):
            continue
        container = by_id.get(loc.container_id)
        if container is None:
            bad("UNKNOWN_INSTANCE", obj.instance_id,
                f"container {loc.container_id!r} not found")
            continue
        ctype = house.types_by_id.get(container.type_id)
        if ctype is None:
            continue
        if ctype.object_class is not ObjectClass.OPENABLE:
            bad("BAD_CONTAINER", obj.instance_id,
                f"container {loc.container_id!r} is not openable")
            continue
        surf = next((s for s in ctype.interior_surfaces
                     if s.surface_id == loc.surface_id), None)
        if surf is None:
            bad("UNKNOWN_SURFACE", obj.instance_id,
                f"no interior surface {loc.surface_id!r} on {container.type_id!r}")
        elif not surf.rect.contains(loc.x, loc.z):
            bad("OUT_OF_SURFACE", obj.instance_id,
                "coordinates outside the interior surface rect")
        # cycle check
        seen = {obj.instance_id}
        cur = container
        while cur is not None and isinstance(cur.location, InContainer):
            if cur.instance_id in seen:
                bad("CYCLIC_LOCATION", obj.instance_id, "location chain has a cycle")
                break
            seen.add(cur.instance_id)
            cur = by_id.get(cur.location.container_id)

    if len(held) > 1:
        bad("MULTI_HELD", held[1], "more than one instance held by the agent")
    return out


def initial_world(house: House, agent: Optional[AgentState] = None) -> WorldState:
    """World at the house's initial object configuration."""
    if agent is None:
        r = house.rooms[0].floor_rect
        agent = AgentState((r.min_x + r.max_x) / 2.0, (r.min_z + r.max_z) / 2.0)
    held = next((o.instance_id for o in house.initial_objects
                 if isinstance(o.location, HeldByAgent)), None)
    if held is not None:
        agent = replace(agent, held=held)
    return WorldState(house, agent, {o.instance_id: o for o in house.initial_objects})
