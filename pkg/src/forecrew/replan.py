"""Mid-execution re-optimization with frozen history and deviation costs.

Tasks already started by the replanning time keep their exact assignments
and times; not-yet-started tasks may move, paying per-unit reassignment
and per-minute retiming penalties on top of the base objective.
"""

from __future__ import annotations

from dataclasses import dataclass
from threading import Event

from .model.types import (
    PLAN_FEASIBLE,
    PLAN_INFEASIBLE,
    PLAN_OPTIMAL,
    ForecrewError,
    Plan,
    ProblemInstance,
)
from .model.validate import validate_instance
from .solver.engine import (
    ReplanInputs,
    SolveLimits,
    SolveStats,
    UnitSearch,
    compile_problem,
    greedy_repair,
)
from .solver.program import InstanceInvalidError, build_program


class FrozenInfeasibleError(ForecrewError):
    """The frozen prefix of the original plan violates an updated constraint."""


class TaskSetMismatchError(ForecrewError):
    pass


@dataclass(frozen=True)
class ReplanContext:
    """Original plan, replanning time, and the updated instance.

    The started/future partition is computed from the original plan only:
    a task whose original start is <= the replanning time is ongoing or
    completed and therefore frozen.
    """

    original: Plan
    replan_time: int
    instance: ProblemInstance

    @property
    def started(self) -> set[str]:
        return split_tasks(self.original, self.replan_time)[0]

    @property
    def future(self) -> set[str]:
        return split_tasks(self.original, self.replan_time)[1]


def split_tasks(plan: Plan, t_r: int) -> tuple[set[str], set[str]]:
    """Partition into (started-or-done, not-yet-started) at time ``t_r``.

    A task starting exactly at ``t_r`` counts as ongoing, matching the
    execution tracker's boundary rule.
    """
    started = {t for t, (s, _e) in plan.task_times.items() if s <= t_r}
    future = {t for t in plan.task_times if t not in started}
    return started, future


def plan_delta(original: Plan, revised: Plan, future: set[str]) -> tuple[int, int]:
    """Deviation pair: (reassigned unit count, shifted minutes) over ``future``."""
    if set(original.task_times) != set(revised.task_times):
        raise TaskSetMismatchError(
            f"plans cover different task sets: {sorted(set(original.task_times) ^ set(revised.task_times))}"
        )
    dx = 0
    dt = 0
    for t in future:
        dx += len(set(original.units_of(t)) ^ set(revised.units_of(t)))
        dt += abs(revised.start(t) - original.start(t)) + abs(revised.end(t) - original.end(t))
    return dx, dt


def _check_frozen(ctx: ReplanContext, started: set[str]) -> None:
    instance = ctx.instance
    plan = ctx.original
    units = {u.id for u in instance.expand_units()}
    unit_caps = {u.id: u.capabilities for u in instance.expand_units()}
    for tid in sorted(started):
        task = instance.task_by_id(tid)
        s, e = plan.task_times[tid]
        if e != s + task.duration:
            raise FrozenInfeasibleError(
                f"frozen task {tid} ran [{s}, {e}) but its duration is now {task.duration}"
            )
        if task.window is not None:
            if s < task.window.start or (task.window.end is not None and e > task.window.end):
                raise FrozenInfeasibleError(
                    f"frozen task {tid} [{s}, {e}) violates its updated window"
                )
        for pred in task.predecessors:
            if pred in started:
                if plan.end(pred) > s:
                    raise FrozenInfeasibleError(
                        f"frozen task {tid} starts at {s} before updated predecessor {pred} ends at {plan.end(pred)}"
                    )
            else:
                raise FrozenInfeasibleError(
                    f"frozen task {tid} now depends on {pred}, which has not started by the replanning time"
                )
        for uid in plan.units_of(tid):
            if uid not in units:
                raise FrozenInfeasibleError(
                    f"frozen task {tid} is assigned to removed robot unit {uid}"
                )
        for k, needed in enumerate(task.requirements):
            if needed > 0:
                supplied = sum(unit_caps[u][k] for u in plan.units_of(tid))
                if supplied < needed:
                    raise FrozenInfeasibleError(
                        f"frozen task {tid} team no longer covers capability {instance.capabilities[k].name}"
                    )
    for a, b in instance.conflicts:
        if a in started and b in started:
            sa, ea = plan.task_times[a]
            sb, eb = plan.task_times[b]
            if not (ea <= sb or eb <= sa):
                raise FrozenInfeasibleError(
                    f"frozen tasks {a} and {b} overlap but are now declared conflicting"
                )


def replan(
    ctx: ReplanContext,
    limits: SolveLimits | None = None,
    canonical: bool = True,
    stop: Event | None = None,
) -> tuple[Plan, SolveStats]:
    """Re-optimize with the started prefix pinned exactly.

    Raises FrozenInfeasibleError when the pinned history violates an
    updated constraint. Not-yet-started tasks are additionally floored at
    the replanning time: a task that has not begun cannot start in the
    past (an extension beyond the written deviation model).
    """
    limits = limits or SolveLimits()
    limits.validate()
    report = validate_instance(ctx.instance)
    if not report.empty:
        raise InstanceInvalidError(report)
    if set(ctx.original.task_times) != {t.id for t in ctx.instance.tasks}:
        raise TaskSetMismatchError("original plan does not cover the updated instance's task set")

    started, future = split_tasks(ctx.original, ctx.replan_time)
    _check_frozen(ctx, started)

    program = build_program(ctx.instance)
    problem = compile_problem(ctx.instance, program.team_options)
    index_of = {t.id: i for i, t in enumerate(ctx.instance.tasks)}
    unit_index = {u.id: i for i, u in enumerate(problem.units)}

    orig_start = {index_of[t]: ctx.original.start(t) for t in ctx.original.task_times}
    orig_end = {index_of[t]: ctx.original.end(t) for t in ctx.original.task_times}
    orig_units: dict[int, tuple[int, ...]] = {}
    removed_count: dict[int, int] = {}
    for t, uids in ctx.original.assignments.items():
        i = index_of[t]
        kept = tuple(sorted(unit_index[u] for u in uids if u in unit_index))
        orig_units[i] = kept
        removed_count[i] = len(uids) - len(kept)

    pinned = {
        index_of[t]: (ctx.original.start(t), ctx.original.end(t), orig_units[index_of[t]])
        for t in started
    }
    future_idx = {index_of[t] for t in future}
    for i in future_idx:
        task = problem.tasks[i]
        task.release = max(task.release, ctx.replan_time)

    inputs = ReplanInputs(
        orig_start=orig_start,
        orig_end=orig_end,
        orig_units=orig_units,
        removed_orig_count=removed_count,
        pinned=pinned,
        future=future_idx,
        replan_time=ctx.replan_time,
    )

    seed = greedy_repair(problem, inputs, limits)
    search = UnitSearch(problem, inputs, limits, stop)
    result, stats = search.run(seed, canonical=canonical)
    if result is None:
        return (
            Plan(assignments={}, task_times={}, objective=0, makespan=0, status=PLAN_INFEASIBLE),
            stats,
        )

    unit_ids = [u.id for u in problem.units]
    assignments = {
        t.id: tuple(unit_ids[u] for u in result.unit_assignment[t.index]) for t in problem.tasks
    }
    task_times = {
        t.id: (result.starts[t.index], result.starts[t.index] + t.duration) for t in problem.tasks
    }
    for t in started:  # frozen entries reuse the original tuples verbatim
        assignments[t] = ctx.original.assignments[t]
        task_times[t] = ctx.original.task_times[t]
    if stats.proved_optimal:
        status, gap = PLAN_OPTIMAL, 0.0
    else:
        gap = 0.0 if result.objective == 0 else max(0.0, (result.objective - stats.best_bound) / result.objective)
        status = PLAN_OPTIMAL if gap == 0.0 else PLAN_FEASIBLE
    plan = Plan(
        assignments=assignments,
        task_times=task_times,
        objective=result.objective,
        makespan=result.makespan,
        status=status,
        gap=gap,
    )
    return plan, stats
