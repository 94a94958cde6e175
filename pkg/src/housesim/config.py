"""Step discretization and agent geometry configuration."""

from __future__ import annotations

from dataclasses import dataclass, field

from .geometry import Vec3


@dataclass(frozen=True)
class StepConfig:
    """Magnitudes of the discretized agent actions plus agent geometry.

    All magnitudes are strictly positive. `agent_radius` must be smaller
    than the narrowest door half-width of any loaded house; sessions check
    this at start (see `check_config_for_house`).
    """

    step_length: float = 0.25        # meters per move/strafe
    yaw_step: float = 15.0           # degrees per look-left/right
    pitch_step: float = 15.0         # degrees per look-up/down
    open_step: float = 0.2           # open-fraction change per look while engaged
    max_interact_range: float = 1.5  # meters, view-ray reach
    agent_radius: float = 0.2        # meters, half side of the agent's square footprint
    eye_height: float = 1.6          # meters
    carry_offset: Vec3 = (0.0, 1.2, 0.5)  # held-object center in agent frame (right, up, forward)

    def __post_init__(self):
        for name in ("step_length", "yaw_step", "pitch_step", "open_step",
                     "max_interact_range", "agent_radius", "eye_height"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be strictly positive")


DEFAULT_CONFIG = StepConfig()
