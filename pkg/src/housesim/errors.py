"""Exception types shared across the engine."""

from __future__ import annotations


class HouseSimError(Exception):
    """Base class for all engine errors."""


class UnknownInstance(HouseSimError):
    pass


class UnknownType(HouseSimError):
    pass


class UnknownSurface(HouseSimError):
    pass


class CyclicLocation(HouseSimError):
    pass


class MalformedFile(HouseSimError):
    pass


class UnsupportedVersion(HouseSimError):
    pass


class ValidationFailed(HouseSimError):
    def __init__(self, report):
        super().__init__(f"house validation failed: {report}")
        self.report = report


class InvalidStart(HouseSimError):
    pass


class OutOfBounds(HouseSimError):
    pass


class CollisionAtTarget(HouseSimError):
    pass


class HeldObject(HouseSimError):
    pass


class PlacementBudgetExceeded(HouseSimError):
    def __init__(self, type_id: str, attempts: int):
        super().__init__(f"could not place {type_id!r} after {attempts} attempts")
        self.type_id = type_id
        self.attempts = attempts


class Unreachable(HouseSimError):
    pass


class PointOutsideRoom(HouseSimError):
    pass


class ProtocolError(HouseSimError):
    """Malformed wire frame; the connection is closed."""


class SessionError(HouseSimError):
    """Bad request against a live session; the connection survives."""

    def __init__(self, code: str, message: str = ""):
        super().__init__(message or code)
        self.code = code
