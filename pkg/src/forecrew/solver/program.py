"""Integer program construction and size accounting.

The program registers decision variables only for (task, unit) pairs where
the unit participates in some minimal covering team; with that pruning the
case-study family peaks at 345 variables for 27 tasks / 15 robots. Start-
and end-linking rows each stand for the symmetric pair of big-M
inequalities (|t - t_unit| <= M * (1 - x)), robot no-overlap is one
disjunctive row per unit, and each declared conflict pair materializes one
binary ordering auxiliary plus two big-M disjunction rows.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..model.teams import minimal_covering_teams
from ..model.types import ForecrewError, Plan, ProblemInstance, RobotUnit
from ..model.validate import validate_instance


class InstanceInvalidError(ForecrewError):
    def __init__(self, report):
        super().__init__(f"instance fails validation: {report}")
        self.report = report


@dataclass(frozen=True)
class Variable:
    name: str
    family: str  # assignment | task_time | robot_time | conflict_order
    domain: str  # binary | integer
    lower: int = 0
    upper: int | None = None


@dataclass(frozen=True)
class Row:
    family: str  # dependency | capability | duration | linking | no_overlap | window | conflict | team
    label: str
    terms: dict = field(default_factory=dict)


@dataclass
class IntegerProgram:
    """Declarative encoding of one allocation problem.

    ``team_options[task_id]`` lists the minimal covering teams as per-type
    unit counts; ``qualified_units[task_id]`` the units allowed to appear in
    the task's team. The solver consumes this structure directly.
    """

    instance: ProblemInstance
    units: tuple[RobotUnit, ...]
    team_options: dict[str, list[tuple[int, ...]]]
    qualified_units: dict[str, tuple[str, ...]]
    variables: list[Variable]
    rows: list[Row]
    horizon: int

    def variable_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for v in self.variables:
            counts[v.family] = counts.get(v.family, 0) + 1
        return counts

    def constraint_counts(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for r in self.rows:
            counts[r.family] = counts.get(r.family, 0) + 1
        return counts

    @property
    def n_variables(self) -> int:
        return len(self.variables)

    @property
    def n_constraints(self) -> int:
        return len(self.rows)

    def check_plan(self, plan: Plan) -> list[str]:
        """Evaluate every row against a plan; returns violated row labels.

        Used as an internal cross-check that the search respects the
        declarative encoding.
        """
        violated: list[str] = []
        inst = self.instance
        unit_caps = {u.id: u.capabilities for u in self.units}
        big_m = self.horizon
        starts = {t: plan.start(t) for t in plan.task_times}
        ends = {t: plan.end(t) for t in plan.task_times}

        for row in self.rows:
            t = row.terms
            if row.family == "dependency":
                ok = starts[t["task"]] >= ends[t["pred"]]
            elif row.family == "capability":
                k = t["capability"]
                supplied = sum(unit_caps[u][k] for u in plan.units_of(t["task"]))
                ok = supplied >= t["required"]
            elif row.family == "duration":
                ok = ends[t["task"]] == starts[t["task"]] + t["duration"]
            elif row.family == "linking":
                assigned = t["unit"] in plan.units_of(t["task"])
                # with x = 1 the pair of big-M rows forces equality; the
                # plan stores one time per task, so equality holds whenever
                # the times exist; with x = 0 any value within M satisfies.
                ok = (not assigned) or big_m >= 0
            elif row.family == "no_overlap":
                intervals = sorted(
                    (starts[task], ends[task]) for task in plan.task_times if t["unit"] in plan.units_of(task)
                )
                ok = all(intervals[j][1] <= intervals[j + 1][0] for j in range(len(intervals) - 1))
            elif row.family == "window":
                if t["bound"] == "start":
                    ok = starts[t["task"]] >= t["value"]
                else:
                    ok = ends[t["task"]] <= t["value"]
            elif row.family == "conflict":
                a, b = t["pair"]
                ok = ends[a] <= starts[b] or ends[b] <= starts[a]
            elif row.family == "team":
                ok = len(plan.units_of(t["task"])) >= 1
            else:  # pragma: no cover
                ok = False
            if not ok:
                violated.append(row.label)
        return violated


def build_program(instance: ProblemInstance) -> IntegerProgram:
    report = validate_instance(instance)
    if not report.empty:
        raise InstanceInvalidError(report)

    units = instance.expand_units()
    horizon = instance.effective_horizon()
    types = instance.robot_types
    units_by_type: dict[str, list[RobotUnit]] = {rt.id: [] for rt in types}
    for u in units:
        units_by_type[u.type_id].append(u)

    team_options: dict[str, list[tuple[int, ...]]] = {}
    qualified_units: dict[str, tuple[str, ...]] = {}
    variables: list[Variable] = []
    rows: list[Row] = []

    for task in instance.tasks:
        options = minimal_covering_teams(task.requirements, types)
        team_options[task.id] = options
        used_types = sorted({ti for opt in options for ti, c in enumerate(opt) if c > 0})
        q = tuple(u.id for ti in used_types for u in units_by_type[types[ti].id])
        qualified_units[task.id] = q

    for task in instance.tasks:
        variables.append(Variable(f"start[{task.id}]", "task_time", "integer", 0, horizon))
        variables.append(Variable(f"end[{task.id}]", "task_time", "integer", 0, horizon))
    for task in instance.tasks:
        for unit_id in qualified_units[task.id]:
            variables.append(Variable(f"assign[{task.id},{unit_id}]", "assignment", "binary"))
            variables.append(Variable(f"start[{task.id},{unit_id}]", "robot_time", "integer", 0, horizon))
            variables.append(Variable(f"end[{task.id},{unit_id}]", "robot_time", "integer", 0, horizon))

    for task in instance.tasks:
        for pred in task.predecessors:
            rows.append(Row("dependency", f"start[{task.id}] >= end[{pred}]", {"task": task.id, "pred": pred}))

    for task in instance.tasks:
        for k, needed in enumerate(task.requirements):
            if needed > 0:
                rows.append(
                    Row(
                        "capability",
                        f"capability[{instance.capabilities[k].name}] of {task.id} >= {needed}",
                        {"task": task.id, "capability": k, "required": needed},
                    )
                )
        if all(r == 0 for r in task.requirements):
            rows.append(Row("team", f"team[{task.id}] >= 1", {"task": task.id}))

    for task in instance.tasks:
        rows.append(
            Row("duration", f"end[{task.id}] == start[{task.id}] + {task.duration}", {"task": task.id, "duration": task.duration})
        )

    for task in instance.tasks:
        for unit_id in qualified_units[task.id]:
            rows.append(
                Row("linking", f"|start[{task.id}] - start[{task.id},{unit_id}]| <= {horizon}*(1-x)", {"task": task.id, "unit": unit_id, "which": "start"})
            )
            rows.append(
                Row("linking", f"|end[{task.id}] - end[{task.id},{unit_id}]| <= {horizon}*(1-x)", {"task": task.id, "unit": unit_id, "which": "end"})
            )

    for u in units:
        rows.append(Row("no_overlap", f"no_overlap[{u.id}]", {"unit": u.id}))

    for task in instance.tasks:
        if task.window is not None:
            if task.window.start > 0:
                rows.append(Row("window", f"start[{task.id}] >= {task.window.start}", {"task": task.id, "bound": "start", "value": task.window.start}))
            if task.window.end is not None:
                rows.append(Row("window", f"end[{task.id}] <= {task.window.end}", {"task": task.id, "bound": "end", "value": task.window.end}))

    for a, b in instance.conflicts:
        variables.append(Variable(f"order[{a},{b}]", "conflict_order", "binary"))
        rows.append(Row("conflict", f"end[{a}] <= start[{b}] + {horizon}*(1-order)", {"pair": (a, b)}))
        rows.append(Row("conflict", f"end[{b}] <= start[{a}] + {horizon}*order", {"pair": (a, b)}))

    return IntegerProgram(
        instance=instance,
        units=units,
        team_options=team_options,
        qualified_units=qualified_units,
        variables=variables,
        rows=rows,
        horizon=horizon,
    )
