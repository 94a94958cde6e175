"""AABB collision queries and gravity settling.

Walls are the room-boundary segments minus door gaps; doors are
zero-thickness gaps of their stated width. Support comes from surface
rects containing an object's XZ center, or from another object's top face
overlapping at least half of its footprint.
"""

from __future__ import annotations

from dataclasses import replace
from typing import Optional

from .config import StepConfig
from .errors import UnknownInstance
from .geometry import (GEO_TOL, VOLUME_TOL, Box, Rect, box_from_center,
                       uncovered_area)
from .model import (WALL, House, InContainer, HeldByAgent, ObjectInstance,
                    OnSurface, WorldState, resolve_pose, world_aabb)

_AREA_TOL = 1e-9  # m^2, wall-coverage slack
_SUPPORT_FRACTION = 0.5


def solid_aabbs(world: WorldState, config: StepConfig) -> dict[str, Box]:
    """World AABBs of every non-held object, cached per world snapshot.

    Worlds are immutable values, so the cache lives on the instance.
    """
    cache = getattr(world, "_solid_aabbs", None)
    if cache is not None:
        return cache
    boxes: dict[str, Box] = {}
    for oid, obj in world.objects.items():
        if isinstance(obj.location, HeldByAgent):
            continue
        center, _ = resolve_pose(world, oid, config)
        boxes[oid] = box_from_center(center, world.house.types_by_id[obj.type_id].half_extents)
    object.__setattr__(world, "_solid_aabbs", boxes)
    return boxes


def wall_blocks(house: House, footprint: Rect) -> bool:
    """True when a footprint leaves the room union or crosses a wall off-door."""
    if uncovered_area(footprint, (r.floor_rect for r in house.rooms)) > _AREA_TOL:
        return True
    for edge in house.shared_edges:
        if edge.axis == "x":
            lo_p, hi_p = footprint.min_x, footprint.max_x
            lo_a, hi_a = footprint.min_z, footprint.max_z
        else:
            lo_p, hi_p = footprint.min_z, footprint.max_z
            lo_a, hi_a = footprint.min_x, footprint.max_x
        if not (lo_p < edge.coord - GEO_TOL and hi_p > edge.coord + GEO_TOL):
            continue
        cross_lo = max(lo_a, edge.lo)
        cross_hi = min(hi_a, edge.hi)
        if cross_hi - cross_lo <= GEO_TOL:
            continue
        covered = any(g_lo - GEO_TOL <= cross_lo and cross_hi <= g_hi + GEO_TOL
                      for g_lo, g_hi, _ in edge.doors)
        if not covered:
            return True
    return False


def _related(world: WorldState, a: str, b: str) -> bool:
    """True when one instance is inside the other's container chain."""
    for start, goal in ((a, b), (b, a)):
        obj = world.objects.get(start)
        seen = set()
        while obj is not None and isinstance(obj.location, InContainer):
            cid = obj.location.container_id
            if cid == goal:
                return True
            if cid in seen:
                break
            seen.add(cid)
            obj = world.objects.get(cid)
    return False


def collides(world: WorldState, box: Box, ignore: frozenset | set = frozenset(),
             config: StepConfig = None, *, relative_to: Optional[str] = None) -> Optional[str]:
    """First contact of `box` against the world, or None.

    Contact selection is deterministic: the lowest overlapping instance id,
    with WALL reported last. `relative_to` exempts the named instance's
    container chain (contents legitimately sit inside their container's AABB).
    """
    if config is None:
        config = StepConfig()
    hits = []
    for oid, obox in solid_aabbs(world, config).items():
        if oid in ignore:
            continue
        if relative_to is not None and (oid == relative_to or _related(world, relative_to, oid)):
            continue
        if box.overlap_volume(obox) > VOLUME_TOL:
            hits.append(oid)
    if hits:
        return min(hits)
    if wall_blocks(world.house, box.footprint()):
        return WALL
    return None


def agent_box(x: float, z: float, config: StepConfig) -> Box:
    r = config.agent_radius
    return Box((x - r, 0.0, z - r), (x + r, config.eye_height, z + r))


def agent_position_free(world: WorldState, x: float, z: float,
                        config: StepConfig) -> bool:
    """Agent footprint collision test against walls and solid objects."""
    r = config.agent_radius
    fx0, fz0, fx1, fz1 = x - r, z - r, x + r, z + r
    # fast path: a footprint wholly inside one room cannot cross a wall
    for room in world.house.rooms:
        fr = room.floor_rect
        if (fx0 >= fr.min_x and fz0 >= fr.min_z
                and fx1 <= fr.max_x and fz1 <= fr.max_z):
            break
    else:
        if wall_blocks(world.house, Rect(fx0, fz0, fx1, fz1)):
            return False
    held = world.agent.held
    top = config.eye_height
    for oid, obox in solid_aabbs(world, config).items():
        (ax0, ay0, az0), (ax1, ay1, az1) = obox.min, obox.max
        if (min(fx1, ax1) - max(fx0, ax0) <= 0.0
                or min(fz1, az1) - max(fz0, az0) <= 0.0):
            continue
        if oid == held:
            continue
        overlap = ((min(fx1, ax1) - max(fx0, ax0))
                   * (min(fz1, az1) - max(fz0, az0))
                   * (min(top, ay1) - max(0.0, ay0)))
        if overlap > VOLUME_TOL:
            return False
    return True


def wall_segments(house: House) -> list[Box]:
    """Zero-thickness full-height wall boxes: room sides minus door gaps.

    Cached per house; shared sides appear once per owning room, which is
    harmless for ray queries.
    """
    cached = getattr(house, "_wall_segments", None)
    if cached is not None:
        return cached
    boxes: list[Box] = []
    for room in house.rooms:
        fr = room.floor_rect
        sides = (
            ("x", fr.min_x, fr.min_z, fr.max_z),
            ("x", fr.max_x, fr.min_z, fr.max_z),
            ("z", fr.min_z, fr.min_x, fr.max_x),
            ("z", fr.max_z, fr.min_x, fr.max_x),
        )
        for axis, coord, lo, hi in sides:
            gaps = []
            for edge in house.shared_edges:
                if edge.axis != axis or abs(edge.coord - coord) > GEO_TOL:
                    continue
                if room.room_id not in (edge.room_a, edge.room_b):
                    continue
                gaps.extend((g_lo, g_hi) for g_lo, g_hi, _ in edge.doors)
            cursor = lo
            for g_lo, g_hi in sorted(gaps):
                if g_lo > cursor + GEO_TOL:
                    boxes.append(_wall_box(axis, coord, cursor, g_lo, room.wall_height))
                cursor = max(cursor, g_hi)
            if hi > cursor + GEO_TOL:
                boxes.append(_wall_box(axis, coord, cursor, hi, room.wall_height))
    object.__setattr__(house, "_wall_segments", boxes)
    return boxes


def _wall_box(axis: str, coord: float, lo: float, hi: float, height: float) -> Box:
    if axis == "x":
        return Box((coord, 0.0, lo), (coord, height, hi))
    return Box((lo, 0.0, coord), (hi, height, coord))


def raycast_walls(house: House, origin, direction,
                  far: float) -> Optional[tuple[float, str]]:
    """Nearest wall/floor/ceiling hit along a ray within `far`, or None.

    Returns (ray parameter, label) with label WALL or FLOOR; the ceiling is
    reported as WALL.
    """
    from .geometry import ray_box
    best: Optional[tuple[float, str]] = None
    for wb in wall_segments(house):
        t = ray_box(origin, direction, wb)
        if t is not None and t <= far and (best is None or t < best[0]):
            best = (t, WALL)
    if direction[1] < 0.0 and origin[1] > 0.0:
        t = -origin[1] / direction[1]
        if t <= far and (best is None or t < best[0]):
            best = (t, "FLOOR")
    elif direction[1] > 0.0:
        ceiling = max((r.wall_height for r in house.rooms), default=0.0)
        if origin[1] < ceiling:
            t = (ceiling - origin[1]) / direction[1]
            if t <= far and (best is None or t < best[0]):
                best = (t, WALL)
    return best


def _settle_one(world: WorldState, obj: ObjectInstance,
                config: StepConfig) -> ObjectInstance:
    house = world.house
    half = house.types_by_id[obj.type_id].half_extents
    loc = obj.location
    boxes = solid_aabbs(world, config)
    my_box = boxes[obj.instance_id]
    my_foot = my_box.footprint()
    my_area = my_foot.area()
    base_y = my_box.min[1]

    if isinstance(loc, OnSurface):
        entry = house.surface_index.get(loc.surface_id)
        if entry is None:
            return obj
        room, _ = entry
        frame_y = 0.0
        surfaces = list(room.surfaces) + [room.floor_surface()]
        peers = [oid for oid, o in world.objects.items()
                 if oid != obj.instance_id and isinstance(o.location, OnSurface)
                 and house.surface_index.get(o.location.surface_id, (None,))[0] is room]
        lx, lz = loc.x, loc.z
    elif isinstance(loc, InContainer):
        ctype = world.instance_type(loc.container_id)
        cbox = boxes.get(loc.container_id)
        if cbox is None:
            return obj
        frame_y = cbox.min[1]
        surfaces = list(ctype.interior_surfaces)
        peers = [oid for oid, o in world.objects.items()
                 if oid != obj.instance_id and isinstance(o.location, InContainer)
                 and o.location.container_id == loc.container_id]
        lx, lz = loc.x, loc.z
    else:
        return obj

    surf_candidates = [(frame_y + s.height, s) for s in surfaces
                       if s.rect.contains(lx, lz) and frame_y + s.height <= base_y + GEO_TOL]
    if not surf_candidates:
        return obj
    best_y, best_surf = max(surf_candidates, key=lambda c: (c[0], c[1].surface_id))

    support_y = best_y
    for oid in peers:
        pbox = boxes[oid]
        top = pbox.max[1]
        if top > base_y + GEO_TOL or top < best_y - GEO_TOL:
            continue
        if my_area > 0.0 and my_foot.overlap_area(pbox.footprint()) / my_area >= _SUPPORT_FRACTION:
            support_y = max(support_y, top)

    if support_y >= base_y - 1e-12:
        return obj
    new_offset = support_y - best_y
    if isinstance(loc, OnSurface):
        new_loc = OnSurface(best_surf.surface_id, lx, lz)
    else:
        new_loc = InContainer(loc.container_id, best_surf.surface_id, lx, lz)
    return replace(obj, location=new_loc, height_offset=new_offset)


def settle(world: WorldState, config: StepConfig = None) -> WorldState:
    """Drop every unsupported non-held object straight down onto its highest
    support. Idempotent; never changes XZ positions, yaw, interaction state,
    or the agent.
    """
    if config is None:
        config = StepConfig()
    current = world
    for _ in range(len(world.objects) + 2):
        changed = False
        objects = dict(current.objects)
        for oid in sorted(objects):
            obj = objects[oid]
            new_obj = _settle_one(current, obj, config)
            if new_obj is not obj:
                objects[oid] = new_obj
                current = WorldState(current.house, current.agent, objects)
                objects = dict(current.objects)
                changed = True
        if not changed:
            break
    return current
