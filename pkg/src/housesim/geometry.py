"""Axis-aligned primitives: rectangles on the XZ plane, 3D boxes, rays.

All collision and visibility geometry in the engine is axis-aligned; yaw
affects facing and interaction but never extents.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional

Vec3 = tuple[float, float, float]

VOLUME_TOL = 1e-9   # m^3, interpenetration threshold
GEO_TOL = 1e-6      # m, generic geometric tolerance


@dataclass(frozen=True)
class Rect:
    """Axis-aligned rectangle on the XZ plane."""

    min_x: float
    min_z: float
    max_x: float
    max_z: float

    def contains(self, x: float, z: float, tol: float = GEO_TOL) -> bool:
        return (self.min_x - tol <= x <= self.max_x + tol
                and self.min_z - tol <= z <= self.max_z + tol)

    def area(self) -> float:
        return max(0.0, self.max_x - self.min_x) * max(0.0, self.max_z - self.min_z)

    def overlap_area(self, other: "Rect") -> float:
        dx = min(self.max_x, other.max_x) - max(self.min_x, other.min_x)
        dz = min(self.max_z, other.max_z) - max(self.min_z, other.min_z)
        if dx <= 0.0 or dz <= 0.0:
            return 0.0
        return dx * dz

    def intersects(self, other: "Rect") -> bool:
        return self.overlap_area(other) > 0.0


def rect_subtract(piece: Rect, hole: Rect) -> list[Rect]:
    """Parts of `piece` outside `hole` (up to four rectangles)."""
    if not piece.intersects(hole):
        return [piece]
    out: list[Rect] = []
    # bands below/above the hole in z
    if piece.min_z < hole.min_z:
        out.append(Rect(piece.min_x, piece.min_z, piece.max_x, min(piece.max_z, hole.min_z)))
    if piece.max_z > hole.max_z:
        out.append(Rect(piece.min_x, max(piece.min_z, hole.max_z), piece.max_x, piece.max_z))
    mid_lo = max(piece.min_z, hole.min_z)
    mid_hi = min(piece.max_z, hole.max_z)
    if mid_hi > mid_lo:
        if piece.min_x < hole.min_x:
            out.append(Rect(piece.min_x, mid_lo, min(piece.max_x, hole.min_x), mid_hi))
        if piece.max_x > hole.max_x:
            out.append(Rect(max(piece.min_x, hole.max_x), mid_lo, piece.max_x, mid_hi))
    return [r for r in out if r.area() > 0.0]


def uncovered_area(piece: Rect, covers: Iterable[Rect]) -> float:
    """Area of `piece` not covered by the union of `covers`."""
    remainder = [piece]
    for cover in covers:
        nxt: list[Rect] = []
        for part in remainder:
            nxt.extend(rect_subtract(part, cover))
        remainder = nxt
        if not remainder:
            return 0.0
    return sum(r.area() for r in remainder)


@dataclass(frozen=True)
class Box:
    """Axis-aligned 3D box, min <= max componentwise."""

    min: Vec3
    max: Vec3

    def footprint(self) -> Rect:
        return Rect(self.min[0], self.min[2], self.max[0], self.max[2])

    def overlap_volume(self, other: "Box") -> float:
        vol = 1.0
        for i in range(3):
            d = min(self.max[i], other.max[i]) - max(self.min[i], other.min[i])
            if d <= 0.0:
                return 0.0
            vol *= d
        return vol

    def contains_point(self, p: Vec3, tol: float = 0.0) -> bool:
        return all(self.min[i] - tol <= p[i] <= self.max[i] + tol for i in range(3))


def box_from_center(center: Vec3, half_extents: Vec3) -> Box:
    return Box(
        (center[0] - half_extents[0], center[1] - half_extents[1], center[2] - half_extents[2]),
        (center[0] + half_extents[0], center[1] + half_extents[1], center[2] + half_extents[2]),
    )


def ray_box(origin: Vec3, direction: Vec3, box: Box) -> Optional[float]:
    """Slab test: smallest non-negative ray parameter hitting `box`, or None.

    A ray starting inside the box does not count as a hit.
    """
    t_enter = -math.inf
    t_exit = math.inf
    for i in range(3):
        o, d = origin[i], direction[i]
        if d == 0.0:
            if o < box.min[i] or o > box.max[i]:
                return None
            continue
        t0 = (box.min[i] - o) / d
        t1 = (box.max[i] - o) / d
        if t0 > t1:
            t0, t1 = t1, t0
        t_enter = max(t_enter, t0)
        t_exit = min(t_exit, t1)
    if t_enter > t_exit or t_exit < 0.0 or t_enter < 0.0:
        return None
    return t_enter


def ray_horizontal_rect(origin: Vec3, direction: Vec3, rect: Rect, height: float) -> Optional[float]:
    """Ray parameter where the ray crosses a horizontal rectangle at `height`."""
    dy = direction[1]
    if dy == 0.0:
        return None
    t = (height - origin[1]) / dy
    if t < 0.0:
        return None
    x = origin[0] + t * direction[0]
    z = origin[2] + t * direction[2]
    if rect.contains(x, z, tol=0.0):
        return t
    return None


def heading_vector(yaw_deg: float, offset_deg: float = 0.0) -> tuple[float, float]:
    """Unit XZ vector at (yaw + offset) mod 360.

    Convention: yaw 0 faces +Z; yaw increases clockwise viewed from above
    (yaw 90 faces +X). Pitch never enters.
    """
    theta = math.radians((yaw_deg + offset_deg) % 360.0)
    return (math.sin(theta), math.cos(theta))


def rotate_offset_xz(yaw_deg: float, offset: Vec3) -> Vec3:
    """Rotate a local offset (right, up, forward) into world axes by yaw."""
    theta = math.radians(yaw_deg % 360.0)
    s, c = math.sin(theta), math.cos(theta)
    ox, oy, oz = offset
    return (ox * c + oz * s, oy, -ox * s + oz * c)


def view_direction(yaw_deg: float, pitch_deg: float) -> Vec3:
    """Unit view direction from yaw (about Y) and pitch (positive up)."""
    yaw = math.radians(yaw_deg % 360.0)
    pitch = math.radians(pitch_deg)
    cp = math.cos(pitch)
    return (math.sin(yaw) * cp, math.sin(pitch), math.cos(yaw) * cp)


def normalize_yaw(yaw_deg: float) -> float:
    y = math.fmod(yaw_deg, 360.0)
    if y < 0.0:
        y += 360.0
    return 0.0 if y == 360.0 else y


def euclid(ax: float, az: float, bx: float, bz: float) -> float:
    return math.hypot(ax - bx, az - bz)
