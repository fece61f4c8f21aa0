"""Independent feasibility checking of plans against instances.

Each check restates one constraint family with the concrete numbers, so a
violation message names the tasks/robots involved and the instantiated
inequality. An empty report certifies the plan satisfies every family.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..model.types import Plan, ProblemInstance


@dataclass(frozen=True)
class Violation:
    family: str
    subjects: tuple[str, ...]
    message: str

    def __str__(self) -> str:
        return f"[{self.family}] {self.message}"


@dataclass
class ViolationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def empty(self) -> bool:
        return not self.violations

    def families(self) -> set[str]:
        return {v.family for v in self.violations}

    def add(self, family: str, subjects: tuple[str, ...], message: str) -> None:
        self.violations.append(Violation(family, subjects, message))

    def __str__(self) -> str:
        return "feasible" if self.empty else "; ".join(str(v) for v in self.violations)


def verify_plan(instance: ProblemInstance, plan: Plan) -> ViolationReport:
    report = ViolationReport()
    units = {u.id: u for u in instance.expand_units()}
    task_ids = [t.id for t in instance.tasks]

    for tid in task_ids:
        if tid not in plan.task_times:
            report.add("Completeness", (tid,), f"task {tid} has no scheduled times")
        if not plan.assignments.get(tid):
            report.add("Completeness", (tid,), f"task {tid} has no assigned robots")
    for tid in plan.task_times:
        if tid not in set(task_ids):
            report.add("Completeness", (tid,), f"plan schedules unknown task {tid}")
    for tid, assigned in plan.assignments.items():
        for uid in assigned:
            if uid not in units:
                report.add("Completeness", (tid, uid), f"task {tid} assigned to unknown robot unit {uid}")
        if len(set(assigned)) != len(assigned):
            report.add("Completeness", (tid,), f"task {tid} lists a robot unit twice")
    if not report.empty:
        return report

    for task in instance.tasks:
        s, e = plan.task_times[task.id]
        if e != s + task.duration:
            report.add(
                "Duration",
                (task.id,),
                f"end {e} != start {s} + duration {task.duration} for {task.id}",
            )
        if s < 0:
            report.add("Duration", (task.id,), f"start {s} of {task.id} is negative")
        for pred in task.predecessors:
            pe = plan.end(pred)
            if s < pe:
                report.add(
                    "Dependency",
                    (task.id, pred),
                    f"{task.id} starts at {s} before predecessor {pred} ends at {pe}",
                )
        for k, needed in enumerate(task.requirements):
            if needed <= 0:
                continue
            supplied = sum(units[u].capabilities[k] for u in plan.units_of(task.id))
            if supplied < needed:
                report.add(
                    "Capability",
                    (task.id, instance.capabilities[k].name),
                    f"{task.id} team supplies {supplied} of {instance.capabilities[k].name}, requires {needed}",
                )
        if task.window is not None:
            w = task.window
            if s < w.start:
                report.add("Window", (task.id,), f"{task.id} starts at {s} before window start {w.start}")
            if w.end is not None and e > w.end:
                report.add("Window", (task.id,), f"{task.id} ends at {e} after window end {w.end}")

    by_unit: dict[str, list[tuple[int, int, str]]] = {}
    for task in instance.tasks:
        s, e = plan.task_times[task.id]
        for uid in plan.units_of(task.id):
            by_unit.setdefault(uid, []).append((s, e, task.id))
    for uid, intervals in sorted(by_unit.items()):
        intervals.sort()
        for (s1, e1, t1), (s2, e2, t2) in zip(intervals, intervals[1:]):
            if s2 < e1:
                report.add(
                    "NoOverlap",
                    (uid, t1, t2),
                    f"robot {uid} runs {t1} [{s1}, {e1}) and {t2} [{s2}, {e2}) concurrently",
                )

    for a, b in instance.conflicts:
        sa, ea = plan.task_times[a]
        sb, eb = plan.task_times[b]
        if not (ea <= sb or eb <= sa):
            report.add(
                "Conflict",
                (a, b),
                f"conflicting tasks {a} [{sa}, {ea}) and {b} [{sb}, {eb}) overlap",
            )

    mk = max((e for _s, e in plan.task_times.values()), default=0)
    if plan.makespan != mk:
        report.add("Makespan", (), f"declared makespan {plan.makespan} != latest end {mk}")

    return report
