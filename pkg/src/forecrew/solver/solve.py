"""Exact solve of a built program to a plan with proof status."""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from threading import Event

from ..model.types import (
    PLAN_FEASIBLE,
    PLAN_INFEASIBLE,
    PLAN_OPTIMAL,
    ForecrewError,
    Plan,
    empty_plan,
)
from .engine import (
    INF,
    CompiledProblem,
    ProfileSearch,
    ScheduleResult,
    SolveLimits,
    SolveStats,
    canonical_subtree,
    compile_problem,
    enumerate_prefixes,
    greedy_schedule,
    prove_subtree,
)
from .program import IntegerProgram


class BudgetZeroError(ForecrewError):
    pass


def schedule_to_plan(problem: CompiledProblem, result: ScheduleResult, stats: SolveStats) -> Plan:
    unit_ids = [u.id for u in problem.units]
    assignments = {
        t.id: tuple(unit_ids[u] for u in result.unit_assignment[t.index]) for t in problem.tasks
    }
    task_times = {t.id: (result.starts[t.index], result.starts[t.index] + t.duration) for t in problem.tasks}
    if stats.proved_optimal:
        status, gap = PLAN_OPTIMAL, 0.0
    else:
        incumbent = result.objective
        gap = 0.0 if incumbent == 0 else max(0.0, (incumbent - stats.best_bound) / incumbent)
        status = PLAN_OPTIMAL if gap == 0.0 else PLAN_FEASIBLE
    return Plan(
        assignments=assignments,
        task_times=task_times,
        objective=result.objective,
        makespan=result.makespan,
        status=status,
        gap=gap,
    )


def _solve_parallel(
    problem: CompiledProblem,
    limits: SolveLimits,
    canonical: bool,
    seed: ScheduleResult | None,
    t0: float,
) -> tuple[ScheduleResult | None, SolveStats]:
    wall_deadline = time.monotonic() + limits.time_budget_s

    # short sequential burst for a strong shared incumbent
    burst = ProfileSearch(
        problem,
        SolveLimits(time_budget_s=limits.time_budget_s, node_budget=min(limits.node_budget, 60_000)),
        None,
        wall_deadline=wall_deadline,
    )
    incumbent, burst_stats = burst.run(seed, canonical=False)
    total_nodes = burst_stats.nodes
    if burst_stats.proved_optimal or incumbent is None:
        # tiny trees finish in the burst; infeasibility also shows up here
        if canonical and burst_stats.proved_optimal and incumbent is not None:
            burst._canonical_pass()
            incumbent = burst.best if burst.best is not None else incumbent
            burst_stats.nodes = burst.nodes
        burst_stats.wall_time_s = time.monotonic() - t0
        return incumbent, burst_stats

    prefixes = enumerate_prefixes(problem, depth=2)
    per_job_nodes = max(10_000, limits.node_budget // max(1, len(prefixes)))
    jobs = [(problem, p, incumbent.objective, wall_deadline, limits.node_budget) for p in prefixes]
    exhausted = False
    best = incumbent
    with ProcessPoolExecutor(max_workers=limits.workers) as pool:
        for job_exhausted, nodes, packed in pool.map(prove_subtree, jobs, chunksize=1):
            total_nodes += nodes
            exhausted = exhausted or job_exhausted
            if packed is not None:
                obj, mk, starts, opts, units = packed
                if obj < best.objective:
                    best = ScheduleResult(
                        starts=starts,
                        option_indexes=opts,
                        unit_assignment=units,
                        objective=obj,
                        makespan=mk,
                        stats=SolveStats(),
                    )
    proved = not exhausted

    if canonical and proved:
        target = best.objective
        cjobs = [(problem, p, target, wall_deadline, limits.node_budget) for p in prefixes]
        best_key = (tuple(best.starts), tuple(best.unit_assignment))
        with ProcessPoolExecutor(max_workers=limits.workers) as pool:
            for job_exhausted, nodes, packed in pool.map(canonical_subtree, cjobs, chunksize=1):
                total_nodes += nodes
                if job_exhausted:
                    proved = proved  # canonicalization stays best-effort
                if packed is not None:
                    key, obj, mk, starts, opts, units = packed
                    if key < best_key:
                        best_key = key
                        best = ScheduleResult(
                            starts=starts,
                            option_indexes=opts,
                            unit_assignment=units,
                            objective=obj,
                            makespan=mk,
                            stats=SolveStats(),
                        )

    root_bound = burst_stats.best_bound
    stats = SolveStats(
        nodes=total_nodes,
        wall_time_s=time.monotonic() - t0,
        best_bound=best.objective if proved else min(root_bound, best.objective),
        incumbent_objective=best.objective,
        proved_optimal=proved,
    )
    return best, stats


def solve(
    program: IntegerProgram,
    limits: SolveLimits | None = None,
    canonical: bool = True,
    stop: Event | None = None,
) -> tuple[Plan, SolveStats]:
    """Minimize the weighted makespan / end-sum / robot-use objective.

    Returns a proven-optimal plan when the budgets allow a complete search,
    the best incumbent with its optimality gap otherwise, and an infeasible
    status when no schedule exists within the horizon. With ``canonical``
    the optimal plan is the lexicographically smallest (start vector, then
    unit assignment) among all optima, making outputs reproducible.
    """
    limits = limits or SolveLimits()
    try:
        limits.validate()
    except ValueError as exc:
        raise BudgetZeroError(str(exc)) from None

    if not program.instance.tasks:
        return empty_plan(), SolveStats(proved_optimal=True)

    t0 = time.monotonic()
    problem = compile_problem(program.instance, program.team_options)
    seed = greedy_schedule(problem)

    if limits.workers > 1 and len(problem.tasks) >= 8 and stop is None:
        result, stats = _solve_parallel(problem, limits, canonical, seed, t0)
    else:
        search = ProfileSearch(problem, limits, stop)
        result, stats = search.run(seed, canonical=canonical)
        stats.wall_time_s = time.monotonic() - t0
    if result is None:
        plan = Plan(assignments={}, task_times={}, objective=0, makespan=0, status=PLAN_INFEASIBLE)
        return plan, stats
    return schedule_to_plan(problem, result, stats), stats
