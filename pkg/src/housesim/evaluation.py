"""Navigation error over the room-door graph and manipulation F1.

Navigation error sums straight-line per-room legs along the cheapest door
sequence. Manipulation accuracy is an F1 over the longest order-preserving
matching of interaction lists, with 1.0m same-room placement equivalence.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass

from .errors import PointOutsideRoom, Unreachable
from .events import InteractionEvent, Pick, Place, SetState
from .geometry import euclid
from .model import House

PLACE_RADIUS = 1.0  # meters, inclusive


@dataclass(frozen=True)
class RoomGraph:
    """Doors plus virtual agent/goal nodes, edges within rooms."""

    nodes: tuple
    edges: dict  # node -> list of (node, weight)


@dataclass(frozen=True)
class MatchReport:
    precision: float
    recall: float
    f1: float
    matched_pairs: tuple


AGENT_NODE = "@agent"
GOAL_NODE = "@goal"


def build_room_graph(house: House, agent: tuple[str, float, float],
                     goal: tuple[str, float, float]) -> RoomGraph:
    doors_in_room: dict[str, list] = {r.room_id: [] for r in house.rooms}
    for door in house.doors:
        for rid in door.rooms:
            if rid in doors_in_room:
                doors_in_room[rid].append(door)
    edges: dict = {AGENT_NODE: [], GOAL_NODE: []}
    for door in house.doors:
        edges.setdefault(door.door_id, [])
    for rid, doors in doors_in_room.items():
        for i, a in enumerate(doors):
            for b in doors[i + 1:]:
                w = euclid(a.anchor[0], a.anchor[1], b.anchor[0], b.anchor[1])
                edges[a.door_id].append((b.door_id, w))
                edges[b.door_id].append((a.door_id, w))
    for node, (rid, x, z) in ((AGENT_NODE, agent), (GOAL_NODE, goal)):
        for door in doors_in_room.get(rid, []):
            w = euclid(x, z, door.anchor[0], door.anchor[1])
            edges[node].append((door.door_id, w))
            edges[door.door_id].append((node, w))
    return RoomGraph(tuple(edges), edges)


def navigation_error(house: House, agent: tuple[str, float, float],
                     goal: tuple[str, float, float]) -> float:
    """Shortest sum of per-room straight-line legs from agent to goal."""
    for label, (rid, x, z) in (("agent", agent), ("goal", goal)):
        room = house.rooms_by_id.get(rid)
        if room is None or not room.floor_rect.contains(x, z):
            raise PointOutsideRoom(f"{label} point ({x}, {z}) not in room {rid!r}")
    if agent[0] == goal[0]:
        return euclid(agent[1], agent[2], goal[1], goal[2])
    graph = build_room_graph(house, agent, goal)
    dist = {AGENT_NODE: 0.0}
    heap = [(0.0, AGENT_NODE)]
    while heap:
        d, node = heapq.heappop(heap)
        if node == GOAL_NODE:
            return d
        if d > dist.get(node, float("inf")):
            continue
        for nxt, w in graph.edges.get(node, ()):
            nd = d + w
            if nd < dist.get(nxt, float("inf")):
                dist[nxt] = nd
                heapq.heappush(heap, (nd, nxt))
    raise Unreachable(f"no door path from {agent[0]!r} to {goal[0]!r}")


def place_equivalent(a: Place, b: Place) -> bool:
    """Same object, same room, within 1.0m (boundary inclusive)."""
    return (a.instance_id == b.instance_id
            and a.room_id == b.room_id
            and euclid(a.x, a.z, b.x, b.z) <= PLACE_RADIUS)


def events_equivalent(a: InteractionEvent, b: InteractionEvent) -> bool:
    if isinstance(a, Pick) and isinstance(b, Pick):
        return a.instance_id == b.instance_id
    if isinstance(a, SetState) and isinstance(b, SetState):
        return a.instance_id == b.instance_id and a.state == b.state
    if isinstance(a, Place) and isinstance(b, Place):
        return place_equivalent(a, b)
    return False


def _suffix_lcs(agent_events, ref_events) -> list:
    n, m = len(agent_events), len(ref_events)
    table = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(n - 1, -1, -1):
        row = table[i]
        below = table[i + 1]
        for j in range(m - 1, -1, -1):
            best = max(below[j], row[j + 1])
            if events_equivalent(agent_events[i], ref_events[j]):
                best = max(best, 1 + below[j + 1])
            row[j] = best
    return table


def manipulation_accuracy(agent_events, ref_events) -> MatchReport:
    """F1 of the maximum order-preserving matching between the two lists.

    Among maximum matchings the lexicographically smallest pair sequence is
    reported.
    """
    agent_events = list(agent_events)
    ref_events = list(ref_events)
    table = _suffix_lcs(agent_events, ref_events)
    pairs = []
    i, j = 0, 0
    n, m = len(agent_events), len(ref_events)
    while i < n and j < m and table[i][j] > 0:
        matched = False
        # greedy: earliest agent index, then earliest ref index, preserving maximality
        jj = j
        while jj < m:
            if (events_equivalent(agent_events[i], ref_events[jj])
                    and 1 + table[i + 1][jj + 1] == table[i][j]):
                pairs.append((i, jj))
                i, j = i + 1, jj + 1
                matched = True
                break
            jj += 1
        if not matched:
            i += 1
    k = len(pairs)
    if n > 0:
        precision = k / n
    else:
        precision = 1.0 if m == 0 else 0.0
    if m > 0:
        recall = k / m
    else:
        recall = 1.0 if n == 0 else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return MatchReport(precision, recall, f1, tuple(pairs))
