"""First-person observations: visible-object lists and a low-resolution
depth/semantic raster cast through an angular view frustum.

Closed containers occlude their contents; open containers are shells that
rays reach into. The raster stands in for rendered pixels while carrying
the same information content.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .config import DEFAULT_CONFIG, StepConfig
from .geometry import Box
from .model import (AgentState, HeldByAgent, ObjectClass, WorldState,
                    chain_open, container_chain, resolve_pose)
from .physics import solid_aabbs, wall_segments

EMPTY = "EMPTY"
WALL = "WALL"
FLOOR = "FLOOR"


@dataclass(frozen=True)
class ObsConfig:
    hfov: float = 60.0   # degrees, horizontal field of view
    width: int = 64
    height: int = 48
    far: float = 20.0    # meters

    @property
    def vfov(self) -> float:
        return self.hfov * self.height / self.width


@dataclass(frozen=True)
class VisibleObject:
    instance_id: str
    type_id: str
    object_class: str
    bearing: float     # degrees relative to agent yaw
    elevation: float   # degrees relative to agent pitch
    distance: float    # meters, eye to center
    open_fraction: Optional[float] = None
    toggle_state: Optional[int] = None


@dataclass(frozen=True)
class Raster:
    width: int
    height: int
    labels: tuple   # height rows of width labels
    depth: tuple    # height rows of width floats (far-plane clamped)


@dataclass(frozen=True)
class Observation:
    agent: AgentState
    visible: tuple
    raster: Optional[Raster] = None


def _ray_grid(agent: AgentState, obs: ObsConfig) -> np.ndarray:
    cols = (np.arange(obs.width) + 0.5) / obs.width * obs.hfov - obs.hfov / 2.0
    rows = obs.vfov / 2.0 - (np.arange(obs.height) + 0.5) / obs.height * obs.vfov
    yaw = np.radians(agent.yaw + cols)[None, :]          # (1, W)
    pitch = np.radians(agent.pitch + rows)[:, None]      # (H, 1)
    cp = np.cos(pitch)
    dirs = np.empty((obs.height, obs.width, 3))
    dirs[:, :, 0] = np.sin(yaw) * cp
    dirs[:, :, 1] = np.broadcast_to(np.sin(pitch), (obs.height, obs.width))
    dirs[:, :, 2] = np.cos(yaw) * cp
    return dirs


def _slab_hits(origin: np.ndarray, dirs: np.ndarray, box: Box) -> np.ndarray:
    """Entry parameter per ray (inf where missed); rays starting inside miss."""
    lo = np.asarray(box.min) - origin
    hi = np.asarray(box.max) - origin
    with np.errstate(divide="ignore", invalid="ignore"):
        t0 = lo / dirs
        t1 = hi / dirs
    zero = dirs == 0.0
    inside = (lo <= 0.0) & (hi >= 0.0)
    t0 = np.where(zero, np.where(inside, -np.inf, np.inf), t0)
    t1 = np.where(zero, np.where(inside, np.inf, -np.inf), t1)
    near = np.minimum(t0, t1).max(axis=-1)
    fartt = np.maximum(t0, t1).min(axis=-1)
    hit = (near <= fartt) & (near >= 0.0)
    return np.where(hit, near, np.inf)


def _is_open(world: WorldState, oid: str) -> bool:
    t = world.instance_type(oid)
    return (t.object_class is ObjectClass.OPENABLE
            and world.instance(oid).open_fraction >= t.open_threshold)


def observe(world: WorldState, config: StepConfig = DEFAULT_CONFIG,
            obs: ObsConfig = ObsConfig(), include_raster: bool = True) -> Observation:
    agent = world.agent
    origin = np.array([agent.x, config.eye_height, agent.z])
    dirs = _ray_grid(agent, obs)

    boxes = solid_aabbs(world, config)
    candidates = {oid: box for oid, box in boxes.items()
                  if oid != agent.held and chain_open(world, oid)}
    open_ids = [oid for oid in candidates if _is_open(world, oid)]
    solid_ids = [oid for oid in candidates if oid not in set(open_ids)]

    # pass 1: ordinary occluders (objects, contents of open containers, walls, floor)
    best_t = np.full(dirs.shape[:2], np.inf)
    best_label = np.full(dirs.shape[:2], -1, dtype=np.int64)
    labels: list[str] = []
    for oid in sorted(solid_ids):
        t = _slab_hits(origin, dirs, candidates[oid])
        better = t < best_t
        best_t = np.where(better, t, best_t)
        best_label = np.where(better, len(labels), best_label)
        labels.append(oid)
    for wb in wall_segments(world.house):
        t = _slab_hits(origin, dirs, wb)
        better = t < best_t
        best_t = np.where(better, t, best_t)
        best_label = np.where(better, len(labels), best_label)
        labels.append(WALL)
    dy = dirs[:, :, 1]
    with np.errstate(divide="ignore", invalid="ignore"):
        t_floor = np.where(dy < 0.0, -origin[1] / dy, np.inf)
    better = t_floor < best_t
    best_t = np.where(better, t_floor, best_t)
    best_label = np.where(better, len(labels), best_label)
    labels.append(FLOOR)
    ceiling = max((r.wall_height for r in world.house.rooms), default=0.0)
    if origin[1] < ceiling:
        with np.errstate(divide="ignore", invalid="ignore"):
            t_ceil = np.where(dy > 0.0, (ceiling - origin[1]) / dy, np.inf)
        better = t_ceil < best_t
        best_t = np.where(better, t_ceil, best_t)
        best_label = np.where(better, len(labels), best_label)
        labels.append(WALL)

    # pass 2: open containers are transparent shells for their own contents
    shell_t = np.full(dirs.shape[:2], np.inf)
    shell_label = np.full(dirs.shape[:2], -1, dtype=np.int64)
    shells: list[str] = []
    for oid in sorted(open_ids):
        t = _slab_hits(origin, dirs, candidates[oid])
        better = t < shell_t
        shell_t = np.where(better, t, shell_t)
        shell_label = np.where(better, len(shells), shell_label)
        shells.append(oid)

    H, W = dirs.shape[:2]
    grid_labels = []
    grid_depth = []
    containers_of = {oid: set(container_chain(world, oid)) for oid in candidates}
    visible_ids: set[str] = set()
    for r in range(H):
        row_l = []
        row_d = []
        for c in range(W):
            t1, l1 = best_t[r, c], best_label[r, c]
            t2, l2 = shell_t[r, c], shell_label[r, c]
            label, depth = EMPTY, obs.far
            if t2 < t1:
                shell = shells[l2]
                inner = labels[l1] if l1 >= 0 else None
                if (inner is not None and inner in containers_of
                        and shell in containers_of[inner] and t1 <= obs.far):
                    label, depth = inner, t1
                elif t2 <= obs.far:
                    label, depth = shell, t2
            elif t1 <= obs.far and l1 >= 0:
                label, depth = labels[l1], t1
            row_l.append(label)
            row_d.append(float(depth))
            if label not in (EMPTY, WALL, FLOOR):
                visible_ids.add(label)
        grid_labels.append(tuple(row_l))
        grid_depth.append(tuple(row_d))

    visible = []
    for oid in sorted(visible_ids):
        center, _ = resolve_pose(world, oid, config)
        dx = center[0] - agent.x
        dyc = center[1] - config.eye_height
        dz = center[2] - agent.z
        horiz = math.hypot(dx, dz)
        bearing = _wrap180(math.degrees(math.atan2(dx, dz)) - agent.yaw)
        elevation = math.degrees(math.atan2(dyc, horiz)) - agent.pitch
        t = world.instance_type(oid)
        inst = world.instance(oid)
        visible.append(VisibleObject(
            oid, t.type_id, t.object_class.value, bearing, elevation,
            math.sqrt(dx * dx + dyc * dyc + dz * dz),
            inst.open_fraction if t.object_class is ObjectClass.OPENABLE else None,
            inst.toggle_state if t.object_class is ObjectClass.TOGGLEABLE else None,
        ))

    raster = Raster(W, H, tuple(grid_labels), tuple(grid_depth)) if include_raster else None
    return Observation(agent, tuple(visible), raster)


def _wrap180(deg: float) -> float:
    d = math.fmod(deg + 180.0, 360.0)
    if d < 0.0:
        d += 360.0
    return d - 180.0


def _visible_to_json(v: VisibleObject) -> dict:
    doc = {"id": v.instance_id, "type": v.type_id, "class": v.object_class,
           "bearing": v.bearing, "elevation": v.elevation, "distance": v.distance}
    if v.open_fraction is not None:
        doc["open_fraction"] = v.open_fraction
    if v.toggle_state is not None:
        doc["toggle_state"] = v.toggle_state
    return doc


def observation_to_json(o: Observation) -> dict:
    doc = {
        "agent": {"x": o.agent.x, "z": o.agent.z, "yaw": o.agent.yaw,
                  "pitch": o.agent.pitch, "held": o.agent.held,
                  "engaged": o.agent.engaged},
        "visible": [_visible_to_json(v) for v in o.visible],
    }
    if o.raster is not None:
        doc["raster"] = {
            "width": o.raster.width,
            "height": o.raster.height,
            "labels": [list(row) for row in o.raster.labels],
            "depth": [list(row) for row in o.raster.depth],
        }
    return doc
