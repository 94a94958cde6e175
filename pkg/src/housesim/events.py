"""Events produced by action application.

Movement events (Moved, Blocked, Turned, ContainerAdjusted) describe what
an action did to the agent; interaction events (Pick, Place, SetState,
Engaged, Disengaged, NoTarget) are the recorded manipulation stream.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union


@dataclass(frozen=True)
class Moved:
    distance: float


@dataclass(frozen=True)
class Blocked:
    pass


@dataclass(frozen=True)
class Turned:
    yaw: float
    pitch: float


@dataclass(frozen=True)
class ContainerAdjusted:
    instance_id: str
    open_fraction: float


@dataclass(frozen=True)
class Pick:
    instance_id: str


@dataclass(frozen=True)
class Place:
    instance_id: str
    room_id: str
    x: float
    z: float


@dataclass(frozen=True)
class SetState:
    """Interaction-state change.

    `state` is a toggle index (int), a threshold crossing ("open"/"close"),
    or None for an open-fraction micro-adjustment that crossed nothing.
    Micro-adjustments carry the before/after fractions.
    """

    instance_id: str
    state: Union[int, str, None]
    fraction_before: Optional[float] = None
    fraction_after: Optional[float] = None


@dataclass(frozen=True)
class Engaged:
    instance_id: str


@dataclass(frozen=True)
class Disengaged:
    instance_id: str


@dataclass(frozen=True)
class NoTarget:
    pass


InteractionEvent = Union[Pick, Place, SetState, Engaged, Disengaged, NoTarget]
INTERACTION_EVENT_TYPES = (Pick, Place, SetState, Engaged, Disengaged, NoTarget)
Event = Union[Moved, Blocked, Turned, ContainerAdjusted, InteractionEvent]
