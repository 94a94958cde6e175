import json

import pytest

from housesim import serialization as ser
from housesim.errors import (MalformedFile, UnsupportedVersion,
                             ValidationFailed)
from housesim.model import initial_world, validate_house
from housesim.scenario import load_house


def _doc(house):
    return ser.house_to_json(house)


def _codes(doc):
    return {v.code for v in validate_house(ser.house_from_json(doc))}


def test_bundled_houses_validate(houses):
    for house in houses.values():
        assert validate_house(house) == []


def test_house_round_trip(bungalow):
    doc = ser.house_to_json(bungalow)
    again = ser.house_from_json(doc)
    assert ser.dumps(ser.house_to_json(again)) == ser.dumps(doc)


def test_world_round_trip_bytes_stable(bungalow):
    world = initial_world(bungalow)
    blob = ser.dumps(ser.world_to_json(world))
    world2 = ser.world_from_json(json.loads(blob))
    assert ser.dumps(ser.world_to_json(world2)) == blob


def test_unknown_format_rejected(bungalow):
    doc = _doc(bungalow)
    doc["format"] = "housesim/999"
    with pytest.raises(UnsupportedVersion):
        ser.house_from_json(doc)


def test_missing_key_rejected(bungalow):
    doc = _doc(bungalow)
    del doc["rooms"]
    with pytest.raises(MalformedFile):
        ser.house_from_json(doc)


def test_load_house_rejects_invalid(bungalow):
    doc = _doc(bungalow)
    doc["objects"][0]["location"]["surface"] = "no-such-surface"
    with pytest.raises(ValidationFailed) as err:
        load_house(json.dumps(doc))
    assert any(v.code == "UNKNOWN_SURFACE" for v in err.value.report)


def test_duplicate_room_flagged(bungalow):
    doc = _doc(bungalow)
    doc["rooms"].append(dict(doc["rooms"][0]))
    assert "DUP_ROOM" in _codes(doc)


def test_overlapping_rooms_flagged(bungalow):
    doc = _doc(bungalow)
    doc["rooms"][1]["floor_rect"] = list(doc["rooms"][0]["floor_rect"])
    assert "ROOM_OVERLAP" in _codes(doc)


def test_door_between_unadjacent_rooms_flagged(bungalow):
    doc = _doc(bungalow)
    doc["doors"][0]["anchor"] = [0.0, 0.0]
    assert "DOOR_OFF_WALL" in _codes(doc)


def test_disconnected_house_flagged(bungalow):
    doc = _doc(bungalow)
    objects = [o for o in doc["objects"]]
    doc["doors"] = []
    doc["objects"] = objects
    assert "DOOR_GRAPH_DISCONNECTED" in _codes(doc)


def test_unknown_type_flagged(bungalow):
    doc = _doc(bungalow)
    doc["objects"][0]["type"] = "hologram"
    assert "UNKNOWN_TYPE" in _codes(doc)


def test_cyclic_containment_flagged(bungalow):
    doc = _doc(bungalow)
    # dishwasher inside its own plate's container chain
    for obj in doc["objects"]:
        if obj["instance_id"] == "dishwasher-1":
            obj["location"] = {"kind": "in-container", "container": "dishwasher-1",
                               "surface": "rack", "x": 0.2, "z": 0.2}
    assert "CYCLIC_LOCATION" in _codes(doc)


def test_bad_extents_flagged(bungalow):
    doc = _doc(bungalow)
    doc["type_catalog"][0]["half_extents"] = [0.0, 0.1, 0.1]
    assert "BAD_EXTENTS" in _codes(doc)


def test_violations_sorted_and_reported_with_location(bungalow):
    doc = _doc(bungalow)
    doc["objects"][0]["type"] = "hologram"
    doc["rooms"].append(dict(doc["rooms"][0]))
    report = validate_house(ser.house_from_json(doc))
    assert len(report) >= 2
    assert report == sorted(report, key=lambda v: (v.location, v.code))
    assert all(v.location and v.message for v in report)


def test_initial_world_agent_in_first_room(bungalow):
    world = initial_world(bungalow)
    r = bungalow.rooms[0].floor_rect
    assert world.agent.x == pytest.approx((r.min_x + r.max_x) / 2)
    assert world.agent.z == pytest.approx((r.min_z + r.max_z) / 2)
    assert world.agent.held is None and world.agent.engaged is None


def test_canonical_encoding_key_order(bungalow):
    world = initial_world(bungalow)
    doc = ser.world_to_json(world)
    assert list(doc)[:2] == ["format", "house"]
    blob = ser.dumps(doc)
    assert " " not in blob.split('"display_name"')[0]  # compact separators
