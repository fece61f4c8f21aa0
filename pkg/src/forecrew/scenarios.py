"""Case-study data and the randomized benchmark scenario generator.

The construction case study has seven robot types over eight capabilities
and fourteen task templates in three dependency groups (wiring, window,
HVAC) plus a standalone inspection. Benchmark scenarios draw one or two
copies of each group and a fleet size per type from the published ranges.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .model.types import Capability, ObjectiveWeights, ProblemInstance, RobotType, Task, TimeWindow

CAPABILITY_NAMES = (
    "cargo container",
    "high payload",
    "suction gripper",
    "precise gripper",
    "normal gripper",
    "sprayer",
    "camera",
    "iaq sensor",
)

# per type: (id, capability amounts, (min count, max count))
ROBOT_TABLE = (
    ("R1", {"cargo container": 1}, (1, 4)),
    ("R2", {"high payload": 1, "precise gripper": 1, "normal gripper": 1}, (1, 2)),
    ("R3", {"high payload": 1, "suction gripper": 1}, (1, 2)),
    ("R4", {"high payload": 1, "normal gripper": 1}, (1, 2)),
    ("R5", {"precise gripper": 1}, (1, 2)),
    ("R6", {"sprayer": 1}, (1, 2)),
    ("R7", {"camera": 1, "iaq sensor": 1}, (1, 1)),
)

# (id, minutes, description, requirements, predecessors, aliases)
TASK_TABLE = {
    "T1": (15, "Move Electrical Conduit", {"cargo container": 1}, (), ("move electrical conduit", "electrical conduit delivery")),
    "T2": (15, "Move Window Frame", {"cargo container": 1}, (), ("move window frame", "window frame delivery")),
    "T3": (15, "Move Window", {"cargo container": 1}, (), ("move window", "window delivery")),
    "T4": (15, "Move Duct Structural Materials", {"cargo container": 1}, (), ("move duct structural materials", "duct structural materials", "structural materials delivery")),
    "T5": (15, "Move Duct", {"cargo container": 1}, (), ("move duct", "duct delivery")),
    "T6": (30, "Drill Wall", {"high payload": 1, "normal gripper": 1}, (), ("drill wall", "wall drilling", "wall-drilling", "drilling", "drilled")),
    "T7": (60, "Install Electrical Conduit", {"precise gripper": 1}, ("T1", "T6"), ("install electrical conduit", "electrical conduit installation", "conduit installation")),
    "T8": (60, "Install Window Frame", {"high payload": 1, "normal gripper": 1}, ("T2",), ("install window frame", "window frame installation")),
    "T9": (30, "Install Window", {"high payload": 1, "suction gripper": 1}, ("T3", "T8"), ("install window", "window installation")),
    "T10": (120, "Duct Structural Framing", {"high payload": 1, "normal gripper": 1}, ("T4",), ("duct structural framing", "structural framing")),
    "T11": (120, "Install HVAC Duct", {"high payload": 1, "normal gripper": 1}, ("T5", "T10"), ("install hvac duct", "hvac duct installation", "hvac duct")),
    "T12": (120, "Install Wiring", {"precise gripper": 1}, ("T7",), ("install wiring", "wiring installation", "electrical wiring")),
    "T13": (60, "Wall Painting", {"sprayer": 1}, ("T12",), ("wall painting", "painting")),
    "T14": (30, "Construction Site Inspection", {"camera": 1, "iaq sensor": 1}, (), ("construction site inspection", "site inspection", "inspection")),
}

WIRING_GROUP = ("T1", "T6", "T7", "T12", "T13")
WINDOW_GROUP = ("T2", "T3", "T8", "T9")
HVAC_GROUP = ("T4", "T5", "T10", "T11")
CONFLICT_GROUP = ("T6", "T7", "T8", "T9", "T12", "T13")


def _capabilities() -> tuple[Capability, ...]:
    return tuple(Capability(id=i, name=n) for i, n in enumerate(CAPABILITY_NAMES))


def _vector(mapping: dict[str, int]) -> tuple[int, ...]:
    index = {n: i for i, n in enumerate(CAPABILITY_NAMES)}
    v = [0] * len(CAPABILITY_NAMES)
    for name, amount in mapping.items():
        v[index[name]] = amount
    return tuple(v)


def _robot_types(counts: dict[str, int]) -> tuple[RobotType, ...]:
    return tuple(
        RobotType(id=rid, capabilities=_vector(caps), count=counts.get(rid, 0))
        for rid, caps, _rng in ROBOT_TABLE
    )


def _make_task(template_id: str, copy: int) -> Task:
    minutes, desc, reqs, preds, aliases = TASK_TABLE[template_id]
    if copy == 1:
        return Task(
            id=template_id,
            duration=minutes,
            requirements=_vector(reqs),
            description=desc,
            predecessors=preds,
            aliases=aliases,
        )
    suffix = f"_{copy}"
    return Task(
        id=template_id + suffix,
        duration=minutes,
        requirements=_vector(reqs),
        description=f"{desc} (set {copy})",
        predecessors=tuple(p + suffix for p in preds),
        aliases=(),
    )


def case_study_instance() -> ProblemInstance:
    """The fourteen-task baseline with the full fleet (15 units)."""
    counts = {rid: rng[1] for rid, _caps, rng in ROBOT_TABLE}
    return ProblemInstance(
        capabilities=_capabilities(),
        robot_types=_robot_types(counts),
        tasks=tuple(_make_task(tid, 1) for tid in TASK_TABLE),
        weights=ObjectiveWeights(),
    )


FIG8_TASK_ORDER = (
    ("T1", 1),
    ("T2", 1),
    ("T4", 1),
    ("T3", 1),
    ("T5", 1),
    ("T6", 1),
    ("T7", 1),
    ("T8", 1),
    ("T9", 1),
    ("T10", 1),
    ("T11", 1),
    ("T12", 1),
    ("T13", 1),
    ("T14", 1),
    ("T2", 2),
    ("T3", 2),
    ("T8", 2),
    ("T9", 2),
)


def fig8_instance() -> ProblemInstance:
    """The demonstration scenario: one wiring set, one HVAC set, two window
    sets and the inspection, on a 2xR1, 2xR2, 1xR3, 1xR6, 1xR7 fleet."""
    counts = {"R1": 2, "R2": 2, "R3": 1, "R4": 0, "R5": 0, "R6": 1, "R7": 1}
    return ProblemInstance(
        capabilities=_capabilities(),
        robot_types=_robot_types(counts),
        tasks=tuple(_make_task(tid, copy) for tid, copy in FIG8_TASK_ORDER),
        weights=ObjectiveWeights(),
    )


@dataclass(frozen=True)
class Scenario:
    index: int
    instance: ProblemInstance
    mode: str
    windowed_tasks: tuple[str, ...] = ()


class ScenarioGenerator:
    """Randomized scenarios: fleet sizes from the published ranges, one or
    two copies per task group, and mode-specific optional constraints.

    Modes: ``original`` (no extras), ``windows`` (1-3 tasks must start
    after a uniform 2-4 h), ``conflicts`` (the single-worker task group is
    pairwise non-concurrent), ``replanning`` (the original-mode instance is
    solved first and windows are injected at replanning time).
    """

    def __init__(self, seed: int, mode: str = "original"):
        if mode not in ("original", "windows", "conflicts", "replanning"):
            raise ValueError(f"unknown mode {mode!r}")
        self.seed = seed
        self.mode = mode

    def _rng(self, index: int) -> random.Random:
        return random.Random(f"{self.seed}:{self.mode}:{index}")

    def instance(self, index: int) -> Scenario:
        rng = self._rng(index)
        counts = {rid: rng.randint(lo, hi) for rid, _caps, (lo, hi) in ROBOT_TABLE}
        copies = {
            "wiring": rng.randint(1, 2),
            "window": rng.randint(1, 2),
            "hvac": rng.randint(1, 2),
        }
        tasks: list[Task] = []
        for group, ids in (("wiring", WIRING_GROUP), ("window", WINDOW_GROUP), ("hvac", HVAC_GROUP)):
            for copy in range(1, copies[group] + 1):
                tasks.extend(_make_task(tid, copy) for tid in ids)
        tasks.append(_make_task("T14", 1))

        conflicts: tuple[tuple[str, str], ...] = ()
        if self.mode == "conflicts":
            members = [t.id for t in tasks if t.id.split("_")[0] in CONFLICT_GROUP]
            conflicts = tuple(
                (members[i], members[j]) for i in range(len(members)) for j in range(i + 1, len(members))
            )

        windowed: tuple[str, ...] = ()
        if self.mode == "windows":
            ids = [t.id for t in tasks]
            chosen = rng.sample(ids, rng.randint(1, 3))
            windowed = tuple(chosen)
            tasks = [
                Task(
                    id=t.id,
                    duration=t.duration,
                    requirements=t.requirements,
                    description=t.description,
                    predecessors=t.predecessors,
                    window=TimeWindow(start=rng.randint(120, 240)) if t.id in chosen else t.window,
                    aliases=t.aliases,
                )
                for t in tasks
            ]

        instance = ProblemInstance(
            capabilities=_capabilities(),
            robot_types=_robot_types(counts),
            tasks=tuple(tasks),
            conflicts=conflicts,
            weights=ObjectiveWeights(),
        )
        return Scenario(index=index, instance=instance, mode=self.mode, windowed_tasks=windowed)

    def replanning_windows(self, index: int, future: list[str]) -> list[tuple[str, int]]:
        """Window starts injected during replanning, drawn for future tasks."""
        rng = random.Random(f"{self.seed}:{self.mode}:windows:{index}")
        if not future:
            return []
        chosen = rng.sample(sorted(future), min(len(future), rng.randint(1, 3)))
        return [(tid, rng.randint(120, 240)) for tid in chosen]
