"""Scoring one run against a reference, the way a study would.

Builds a seeded scenario in the loft, records a "reference" run and a
slightly sloppier "agent" run of the same chore, then reports the two
metrics: navigation error for the final position and manipulation F1 over
the interaction summaries.
"""

from housesim.cli import bundled_house_paths
from housesim.config import StepConfig
from housesim.evaluation import manipulation_accuracy, navigation_error
from housesim.kinematics import Action
from housesim.model import AgentState
from housesim.scenario import generate_scenario, load_house
from housesim.trajectory import Recorder, extract_interactions

config = StepConfig()

for path in bundled_house_paths():
    with open(path, "rb") as fh:
        house = load_house(fh.read())
    if house.house_id == "loft":
        break

# seeded clutter: three plates and a book, same for every run of this script
world = generate_scenario(house, [("plate", 3), ("book", 1)], seed=42,
                          config=config)
spawn = AgentState(x=2.0, z=2.5, yaw=0.0, pitch=0.0)
world = world.with_agent(spawn)
print("scenario objects:", ", ".join(sorted(world.objects)))


def run(actions):
    recorder = Recorder(world, config)
    for action in actions:
        recorder.step(action)
    return recorder.demonstration()


# reference: walk north into the kitchen doorway at (2, 5)
reference = run([Action.MOVE_FORWARD] * 14)

# agent: drifts a little and wanders left before heading the same way
agent = run([Action.LOOK_LEFT, Action.LOOK_RIGHT] * 2
            + [Action.MOVE_FORWARD] * 9
            + [Action.STRAFE_LEFT] * 2
            + [Action.MOVE_FORWARD] * 4)

# --- navigation error -----------------------------------------------------------

ref_end = reference.steps[-1][1].agent
agent_end = agent.steps[-1][1].agent


def room_of(a):
    return house.room_at(a.x, a.z).room_id


err = navigation_error(house,
                       (room_of(agent_end), agent_end.x, agent_end.z),
                       (room_of(ref_end), ref_end.x, ref_end.z))
print(f"\nreference stopped at ({ref_end.x:.2f}, {ref_end.z:.2f}) "
      f"in {room_of(ref_end)!r}")
print(f"agent stopped at     ({agent_end.x:.2f}, {agent_end.z:.2f}) "
      f"in {room_of(agent_end)!r}")
print(f"navigation error: {err:.3f} m")

# --- manipulation F1 ------------------------------------------------------------

# neither run touched anything, so both summaries are empty and F1 is 1.0
report = manipulation_accuracy(extract_interactions(agent),
                               extract_interactions(reference))
print(f"\nmanipulation: precision {report.precision:.2f} "
      f"recall {report.recall:.2f} f1 {report.f1:.2f}")
print("matched pairs:", report.matched_pairs)
