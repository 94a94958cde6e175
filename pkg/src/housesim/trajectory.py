"""Demonstration recording, deterministic replay, persistence, and
interaction extraction.

A demonstration alternates states and actions; every intermediate state is
stored in full so replay consistency is directly checkable.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .config import StepConfig
from .errors import InvalidStart, MalformedFile, UnsupportedVersion
from .events import (INTERACTION_EVENT_TYPES, InteractionEvent, Pick, Place,
                     SetState)
from .kinematics import Action, action_from_name, apply_action
from .model import House, WorldState, validate_house
from . import serialization as ser


@dataclass(frozen=True)
class Demonstration:
    house_id: str
    config: StepConfig
    start: WorldState
    steps: tuple  # of (Action, WorldState)
    events: tuple  # of (step index, InteractionEvent)


class Recorder:
    """Incrementally records a demonstration while driving a world."""

    def __init__(self, world: WorldState, config: StepConfig):
        self.config = config
        self.start = world
        self.world = world
        self._steps: list = []
        self._events: list = []

    def step(self, action: Action):
        self.world, events = apply_action(self.world, action, self.config)
        index = len(self._steps)
        self._steps.append((action, self.world))
        for ev in events:
            if isinstance(ev, INTERACTION_EVENT_TYPES):
                self._events.append((index, ev))
        return self.world, events

    def demonstration(self) -> Demonstration:
        return Demonstration(self.world.house.house_id, self.config, self.start,
                             tuple(self._steps), tuple(self._events))


def replay(house: House, start: WorldState, actions,
           config: StepConfig | None = None) -> Demonstration:
    """Fold the action list over the start state, recording every step."""
    if config is None:
        config = StepConfig()
    if start.house is not house and start.house.house_id != house.house_id:
        raise InvalidStart("start state does not belong to the given house")
    report = validate_house(house)
    if report:
        raise InvalidStart(f"house fails validation: {report[0].code}")
    held = start.agent.held
    if held is not None and held not in start.objects:
        raise InvalidStart(f"agent holds unknown instance {held!r}")
    recorder = Recorder(start, config)
    for action in actions:
        recorder.step(action)
    return recorder.demonstration()


def extract_interactions(demo: Demonstration) -> list[InteractionEvent]:
    """Ordered Pick/Place/SetState list for scoring.

    Open-fraction micro-adjustments collapse to their threshold crossings:
    only SetState events whose step crossed the open threshold survive, as
    bare (id, "open"/"close") records.
    """
    out: list[InteractionEvent] = []
    for _, event in demo.events:
        if isinstance(event, (Pick, Place)):
            out.append(event)
        elif isinstance(event, SetState):
            if event.fraction_before is None:
                out.append(event)  # toggle
            elif event.state in ("open", "close"):
                out.append(SetState(event.instance_id, event.state))
    return out


def encode(demo: Demonstration) -> bytes:
    memo: dict = {}
    doc = {
        "format": ser.TRAJ_FORMAT,
        "house_id": demo.house_id,
        "config": ser.config_to_json(demo.config),
        "start": ser.world_to_json(demo.start),
        "steps": [{"action": action.value,
                   "state": ser.state_to_json(state, _memo=memo)}
                  for action, state in demo.steps],
        "events": [{"step": index, "event": ser.event_to_json(event)}
                   for index, event in demo.events],
    }
    return ser.dumps(doc).encode("utf-8")


def decode(data: bytes) -> Demonstration:
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedFile(str(exc)) from exc
    if not isinstance(doc, dict):
        raise MalformedFile("trajectory document must be an object")
    fmt = doc.get("format")
    if fmt != ser.TRAJ_FORMAT:
        raise UnsupportedVersion(f"expected {ser.TRAJ_FORMAT!r}, got {fmt!r}")
    try:
        start = ser.world_from_json(doc["start"])
        config = ser.config_from_json(doc.get("config"))
        memo: dict = {}
        steps = tuple((action_from_name(s["action"]),
                       ser.state_from_json(s["state"], start.house, _memo=memo))
                      for s in doc["steps"])
        events = tuple((int(e["step"]), ser.event_from_json(e["event"]))
                       for e in doc["events"])
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedFile(str(exc)) from exc
    return Demonstration(str(doc.get("house_id", start.house.house_id)),
                         config, start, steps, events)


def verify(demo: Demonstration) -> bool:
    """Replay consistency: every stored state matches re-application."""
    world = demo.start
    events: list = []
    for index, (action, stored) in enumerate(demo.steps):
        world, evs = apply_action(world, action, demo.config)
        if world != stored:
            return False
        for ev in evs:
            if isinstance(ev, INTERACTION_EVENT_TYPES):
                events.append((index, ev))
    return tuple(events) == demo.events
