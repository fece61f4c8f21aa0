"""Domain types for scheduling problems and plans.

All times are integer minutes. Instances are immutable values: every
operation that "modifies" an instance returns a new one, so instances and
plans can be shared freely across threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace


class ForecrewError(Exception):
    """Base class for all library errors."""


@dataclass(frozen=True)
class Capability:
    """One entry of the capability catalogue (e.g. "cargo container")."""

    id: int
    name: str


@dataclass(frozen=True)
class RobotType:
    """A robot model with per-capability amounts and a fleet count.

    ``capabilities[k]`` is the amount of capability ``k`` one unit of this
    type supplies. Units of a type are interchangeable; they are expanded
    into individually named units ("R2#0", "R2#1") at solve time.
    """

    id: str
    capabilities: tuple[int, ...]
    count: int


@dataclass(frozen=True)
class TimeWindow:
    """Execution window: the task must run inside [start, end].

    ``end`` is None when only an earliest-start bound exists (the form
    produced by start-time change requests).
    """

    start: int = 0
    end: int | None = None


@dataclass(frozen=True)
class Task:
    """A unit of work with a fixed duration and capability demands.

    ``requirements[k]`` is the amount of capability ``k`` the assigned team
    must jointly supply. ``aliases`` are natural-language phrases used by
    the narrative knowledge base to resolve references to this task.
    """

    id: str
    duration: int
    requirements: tuple[int, ...]
    description: str = ""
    predecessors: tuple[str, ...] = ()
    window: TimeWindow | None = None
    aliases: tuple[str, ...] = ()


@dataclass(frozen=True)
class ObjectiveWeights:
    """Weights of the scheduling objective and replanning penalties.

    ``makespan`` must strictly dominate every other weight so the latest
    end time stays the primary objective; the rest break ties:
    ``end_sum`` (sum of task end times), ``robot_use`` (number of
    assignments), ``reassignment`` / ``retiming`` (deviation penalties
    applied when replanning).
    """

    makespan: int = 1000
    end_sum: int = 1
    robot_use: int = 1
    reassignment: int = 1
    retiming: int = 1

    def validate(self) -> None:
        values = {
            "makespan": self.makespan,
            "end_sum": self.end_sum,
            "robot_use": self.robot_use,
            "reassignment": self.reassignment,
            "retiming": self.retiming,
        }
        for name, value in values.items():
            if not isinstance(value, int) or value < 0:
                raise ValueError(f"weight {name} must be a non-negative integer, got {value!r}")
        for name in ("end_sum", "robot_use", "reassignment", "retiming"):
            if self.makespan <= values[name]:
                raise ValueError(f"makespan weight must exceed {name} weight ({self.makespan} <= {values[name]})")


@dataclass(frozen=True)
class RobotUnit:
    """One physical robot: a (type, index) pair with a stable id like "R2#0"."""

    id: str
    type_id: str
    type_index: int
    capabilities: tuple[int, ...]


@dataclass(frozen=True)
class ProblemInstance:
    """A complete allocation problem: capabilities, fleet, tasks, extras.

    ``conflicts`` holds unordered task-id pairs that must never run
    concurrently. ``horizon`` is the big-M time constant; when None an
    upper bound that admits any feasible schedule is derived.
    """

    capabilities: tuple[Capability, ...]
    robot_types: tuple[RobotType, ...]
    tasks: tuple[Task, ...]
    conflicts: tuple[tuple[str, str], ...] = ()
    weights: ObjectiveWeights = field(default_factory=ObjectiveWeights)
    horizon: int | None = None

    def task_by_id(self, task_id: str) -> Task:
        for task in self.tasks:
            if task.id == task_id:
                return task
        raise KeyError(task_id)

    def robot_type_by_id(self, type_id: str) -> RobotType:
        for rt in self.robot_types:
            if rt.id == type_id:
                return rt
        raise KeyError(type_id)

    def expand_units(self) -> tuple[RobotUnit, ...]:
        """Expand type counts into individually named, interchangeable units."""
        units: list[RobotUnit] = []
        for rt in self.robot_types:
            for k in range(rt.count):
                units.append(RobotUnit(id=f"{rt.id}#{k}", type_id=rt.id, type_index=k, capabilities=rt.capabilities))
        return tuple(units)

    def effective_horizon(self) -> int:
        """Big-M bound: any feasible schedule fits below this time."""
        if self.horizon is not None:
            return self.horizon
        total = sum(t.duration for t in self.tasks)
        latest_release = max((t.window.start for t in self.tasks if t.window is not None), default=0)
        return total + latest_release + 1

    def with_tasks(self, tasks: tuple[Task, ...]) -> ProblemInstance:
        return replace(self, tasks=tasks)


PLAN_OPTIMAL = "optimal"
PLAN_FEASIBLE = "feasible"
PLAN_INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class Plan:
    """A schedule: per-task team assignment and start/end times.

    Per-(task, unit) times are not stored separately: wherever a unit is
    assigned, its start/end equal the task's (the linking constraints
    collapse to equality), exposed through :meth:`robot_times`.
    """

    assignments: dict[str, tuple[str, ...]]
    task_times: dict[str, tuple[int, int]]
    objective: int
    makespan: int
    status: str
    gap: float = 0.0

    def start(self, task_id: str) -> int:
        return self.task_times[task_id][0]

    def end(self, task_id: str) -> int:
        return self.task_times[task_id][1]

    def robot_times(self, task_id: str, unit_id: str) -> tuple[int, int]:
        if unit_id not in self.assignments.get(task_id, ()):
            raise KeyError(f"unit {unit_id} is not assigned to task {task_id}")
        return self.task_times[task_id]

    def units_of(self, task_id: str) -> tuple[str, ...]:
        return self.assignments.get(task_id, ())

    def restricted_to(self, task_ids: set[str]) -> Plan:
        """Sub-plan over a task subset (used for frozen-history comparisons)."""
        return Plan(
            assignments={t: u for t, u in self.assignments.items() if t in task_ids},
            task_times={t: tt for t, tt in self.task_times.items() if t in task_ids},
            objective=0,
            makespan=max((tt[1] for t, tt in self.task_times.items() if t in task_ids), default=0),
            status=self.status,
        )


def empty_plan(status: str = PLAN_OPTIMAL) -> Plan:
    return Plan(assignments={}, task_times={}, objective=0, makespan=0, status=status)
