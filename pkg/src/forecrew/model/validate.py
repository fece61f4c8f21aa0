"""Structural validation of problem instances.

Validation is report-based: every violated invariant yields one issue and
an empty report marks the instance admissible for solving.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .teams import minimal_covering_teams
from .types import ProblemInstance


@dataclass(frozen=True)
class ValidationIssue:
    code: str
    subject: tuple[str, ...]
    message: str

    def __str__(self) -> str:
        return f"{self.code}{{{', '.join(self.subject)}}}: {self.message}"


@dataclass
class ValidationReport:
    issues: list[ValidationIssue] = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return not self.issues

    def codes(self) -> set[str]:
        return {issue.code for issue in self.issues}

    def add(self, code: str, subject: tuple[str, ...], message: str) -> None:
        self.issues.append(ValidationIssue(code, subject, message))

    def __str__(self) -> str:
        return "ok" if self.empty else "; ".join(str(i) for i in self.issues)


def _dependency_cycles(instance: ProblemInstance) -> list[tuple[str, ...]]:
    ids = {t.id for t in instance.tasks}
    color: dict[str, int] = {}
    stack: list[str] = []
    cycles: list[tuple[str, ...]] = []

    def visit(task_id: str) -> None:
        color[task_id] = 1
        stack.append(task_id)
        for pred in instance.task_by_id(task_id).predecessors:
            if pred not in ids:
                continue
            if color.get(pred, 0) == 1:
                cycle = tuple(stack[stack.index(pred):])
                cycles.append(cycle)
            elif color.get(pred, 0) == 0:
                visit(pred)
        stack.pop()
        color[task_id] = 2

    for task in instance.tasks:
        if color.get(task.id, 0) == 0:
            visit(task.id)
    return cycles


def validate_instance(instance: ProblemInstance) -> ValidationReport:
    """Check every structural invariant; an empty report means solvable."""
    report = ValidationReport()
    n_caps = len(instance.capabilities)

    cap_ids = [c.id for c in instance.capabilities]
    if cap_ids != list(range(n_caps)):
        report.add("CapabilityIds", (), f"capability ids must be dense 0..{n_caps - 1}, got {cap_ids}")
    cap_names = [c.name for c in instance.capabilities]
    if len(set(cap_names)) != len(cap_names):
        report.add("CapabilityNames", (), "capability names must be unique")

    seen_types: set[str] = set()
    for rt in instance.robot_types:
        if rt.id in seen_types:
            report.add("DuplicateRobotType", (rt.id,), f"robot type {rt.id} declared twice")
        seen_types.add(rt.id)
        if rt.count < 0:
            report.add("NegativeCount", (rt.id,), f"robot type {rt.id} has count {rt.count}")
        if len(rt.capabilities) != n_caps:
            report.add(
                "CapabilityVectorLength",
                (rt.id,),
                f"robot type {rt.id} capability vector has length {len(rt.capabilities)}, expected {n_caps}",
            )

    task_ids = [t.id for t in instance.tasks]
    id_set = set(task_ids)
    if len(id_set) != len(task_ids):
        report.add("DuplicateTask", (), "task ids must be unique")

    for task in instance.tasks:
        if task.duration <= 0:
            report.add("NonPositiveDuration", (task.id,), f"task {task.id} has duration {task.duration}")
        if len(task.requirements) != n_caps:
            report.add(
                "RequirementVectorLength",
                (task.id,),
                f"task {task.id} requirement vector has length {len(task.requirements)}, expected {n_caps}",
            )
        if task.window is not None:
            w = task.window
            if w.start < 0:
                report.add("MalformedWindow", (task.id,), f"window start {w.start} is negative")
            if w.end is not None and w.start + task.duration > w.end:
                report.add(
                    "MalformedWindow",
                    (task.id,),
                    f"window [{w.start}, {w.end}] cannot hold duration {task.duration}",
                )
        for pred in task.predecessors:
            if pred not in id_set:
                report.add("DanglingReference", (task.id, pred), f"task {task.id} references unknown predecessor {pred}")
        if task.id in task.predecessors:
            report.add("SelfDependency", (task.id,), f"task {task.id} depends on itself")

    for a, b in instance.conflicts:
        for t in (a, b):
            if t not in id_set:
                report.add("DanglingReference", (a, b), f"conflict pair ({a}, {b}) references unknown task {t}")
        if a == b:
            report.add("SelfConflict", (a,), f"conflict pair ({a}, {b}) is degenerate")

    for cycle in _dependency_cycles(instance):
        report.add("DependencyCycle", tuple(sorted(cycle)), f"dependency cycle through {' -> '.join(cycle)}")

    # Serviceability: some multiset of robot types must jointly cover the
    # requirement vector within the declared fleet counts.
    if not report.issues or all(i.code not in ("CapabilityVectorLength", "RequirementVectorLength") for i in report.issues):
        for task in instance.tasks:
            if len(task.requirements) != n_caps:
                continue
            if not minimal_covering_teams(task.requirements, instance.robot_types):
                report.add(
                    "UnserviceableTask",
                    (task.id,),
                    f"no robot subset covers the requirements of task {task.id}",
                )

    try:
        instance.weights.validate()
    except ValueError as exc:
        report.add("BadWeights", (), str(exc))

    return report
