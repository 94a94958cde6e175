"""The nine agent actions and their application to a world state.

Movement is clamped at the largest collision-free distance (binary search
to 1e-4 m) with no wall sliding. Any translation or horizontal look
disengages an engaged container; vertical looks operate the container's
open fraction while engaged.
"""

from __future__ import annotations

import enum
from dataclasses import replace

from .config import DEFAULT_CONFIG, StepConfig
from .events import (Blocked, ContainerAdjusted, Disengaged, Event, Moved,
                     SetState, Turned)
from .geometry import heading_vector, normalize_yaw
from .model import AgentState, WorldState
from .physics import agent_position_free

CLAMP_RESOLUTION = 1e-4  # m


class Action(enum.Enum):
    MOVE_FORWARD = "move-forward"
    MOVE_BACK = "move-back"
    STRAFE_RIGHT = "strafe-right"
    STRAFE_LEFT = "strafe-left"
    LOOK_LEFT = "look-left"
    LOOK_RIGHT = "look-right"
    LOOK_UP = "look-up"
    LOOK_DOWN = "look-down"
    INTERACT = "interact"


_MOVE_OFFSETS = {
    Action.MOVE_FORWARD: 0.0,
    Action.MOVE_BACK: 180.0,
    Action.STRAFE_RIGHT: 90.0,
    Action.STRAFE_LEFT: 270.0,
}


def _disengage_events(world: WorldState) -> tuple[WorldState, list[Event]]:
    agent = world.agent
    if agent.engaged is None:
        return world, []
    events: list[Event] = [Disengaged(agent.engaged)]
    freed = AgentState(agent.x, agent.z, agent.yaw, agent.pitch,
                       agent.held, None)
    return world.with_agent(freed), events


def _translate(world: WorldState, offset: float,
               config: StepConfig) -> tuple[WorldState, list[Event]]:
    world, events = _disengage_events(world)
    agent = world.agent
    hx, hz = heading_vector(agent.yaw, offset)
    step = config.step_length

    def free(t: float) -> bool:
        return agent_position_free(world, agent.x + hx * t, agent.z + hz * t, config)

    if free(step):
        dist = step
    else:
        lo, hi = 0.0, step
        while hi - lo > CLAMP_RESOLUTION:
            mid = (lo + hi) / 2.0
            if free(mid):
                lo = mid
            else:
                hi = mid
        dist = lo
    if dist > 0.0:
        world = world.with_agent(AgentState(agent.x + hx * dist,
                                            agent.z + hz * dist,
                                            agent.yaw, agent.pitch,
                                            agent.held, None))
        events.append(Moved(dist))
    if dist < step:
        events.append(Blocked())
    return world, events


def _adjust_container(world: WorldState, direction: float,
                      config: StepConfig) -> tuple[WorldState, list[Event]]:
    agent = world.agent
    cid = agent.engaged
    obj = world.instance(cid)
    before = obj.open_fraction
    after = min(1.0, max(0.0, before + direction * config.open_step))
    # accumulated float error must not keep a fully-driven door off its stop
    if abs(after) < 1e-12:
        after = 0.0
    elif abs(after - 1.0) < 1e-12:
        after = 1.0
    threshold = world.instance_type(cid).open_threshold
    if before < threshold <= after:
        state = "open"
    elif after < threshold <= before:
        state = "close"
    else:
        state = None
    world = world.with_object(replace(obj, open_fraction=after))
    return world, [ContainerAdjusted(cid, after),
                   SetState(cid, state, fraction_before=before, fraction_after=after)]


def apply_action(world: WorldState, action: Action,
                 config: StepConfig = DEFAULT_CONFIG) -> tuple[WorldState, list[Event]]:
    """Apply one action; illegal motions clamp and emit Blocked, never raise."""
    agent = world.agent

    if action in _MOVE_OFFSETS:
        return _translate(world, _MOVE_OFFSETS[action], config)

    if action in (Action.LOOK_LEFT, Action.LOOK_RIGHT):
        sign = -1.0 if action is Action.LOOK_LEFT else 1.0
        world, events = _disengage_events(world)
        agent = world.agent
        new_yaw = normalize_yaw(agent.yaw + sign * config.yaw_step)
        world = world.with_agent(AgentState(agent.x, agent.z, new_yaw,
                                            agent.pitch, agent.held, None))
        events.append(Turned(new_yaw, agent.pitch))
        return world, events

    if action in (Action.LOOK_UP, Action.LOOK_DOWN):
        if agent.engaged is not None:
            # up drives the container towards closure, down towards open
            direction = -1.0 if action is Action.LOOK_UP else 1.0
            return _adjust_container(world, direction, config)
        sign = 1.0 if action is Action.LOOK_UP else -1.0
        new_pitch = min(90.0, max(-90.0, agent.pitch + sign * config.pitch_step))
        world = world.with_agent(AgentState(agent.x, agent.z, agent.yaw,
                                            new_pitch, agent.held,
                                            agent.engaged))
        return world, [Turned(agent.yaw, new_pitch)]

    # interact
    from .interaction import interact
    new_world, event = interact(world, config)
    return new_world, [event]


_ACTIONS_BY_NAME = {action.value: action for action in Action}


def action_from_name(name: str) -> Action:
    try:
        return _ACTIONS_BY_NAME[name]
    except KeyError:
        raise ValueError(f"unknown action {name!r}") from None
