"""housesim: a deterministic, headless multi-room house simulator with an
embodied first-person agent, object manipulation, trajectory replay, a
socket protocol, and evaluation metrics.
"""

from .config import DEFAULT_CONFIG, StepConfig
from .events import (Blocked, ContainerAdjusted, Disengaged, Engaged, Moved,
                     NoTarget, Pick, Place, SetState, Turned)
from .evaluation import (MatchReport, manipulation_accuracy, navigation_error,
                         place_equivalent)
from .geometry import Box, Rect, heading_vector
from .interaction import interact, target, view_ray
from .kinematics import Action, action_from_name, apply_action
from .model import (AgentState, Door, HeldByAgent, House, InContainer,
                    ObjectClass, ObjectInstance, ObjectType, OnSurface, Room,
                    Surface, WorldState, initial_world, resolve_pose,
                    validate_house, world_aabb)
from .observation import ObsConfig, Observation, observe
from .physics import collides, settle
from .scenario import generate_scenario, load_house, place_object, remove_object
from .trajectory import (Demonstration, Recorder, decode, encode,
                         extract_interactions, replay, verify)

__version__ = "0.1.0"
