"""Exact depth-first search shared by the solver and the replanner.

Two search modes over serial schedule generation:

* profile mode (fresh solves): unit identities are irrelevant because
  intervals needing c units of an interchangeable type are assignable
  exactly when the per-type usage profile never exceeds capacity, so the
  search tracks per-type usage profiles and recovers concrete units by
  first-fit over start order at extraction time. Schedules are generated
  chronologically (non-decreasing (start, index)), which deduplicates
  permutations and preserves completeness for regular objectives.

* unit mode (replans): deviation penalties distinguish units and make the
  objective non-regular, so the search tracks per-unit busy intervals,
  branches over unit combinations grouped by interchangeability signature,
  and considers breakpoint-anchored placements (earliest feasible plus the
  closest feasible starts around the original start and the original end
  minus the new duration).

Bounds combine the critical path, per-type energetic reasoning with
release offsets, a shortest-processing-time bound on the sum of end
times, and a capability-area floor. Memoized dominance keys clip busy
intervals at the earliest-start frontier so states differing only in dead
history merge.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from threading import Event

from ..model.types import ObjectiveWeights, ProblemInstance, RobotUnit

INF = 1 << 60


@dataclass(frozen=True)
class SolveLimits:
    """Search budgets; a gap tolerance of 0 demands an optimality proof.

    ``workers`` > 1 splits the proof across processes by subtree; results
    are merged deterministically so the outcome is scheduling-independent.
    """

    time_budget_s: float = 120.0
    node_budget: int = 50_000_000
    gap_tolerance: float = 0.0
    workers: int = 1

    def validate(self) -> None:
        if self.time_budget_s <= 0 or self.node_budget <= 0:
            raise ValueError("budgets must be positive")
        if self.gap_tolerance < 0:
            raise ValueError("gap tolerance must be non-negative")
        if self.workers < 1:
            raise ValueError("workers must be positive")


@dataclass
class SolveStats:
    nodes: int = 0
    wall_time_s: float = 0.0
    best_bound: int = 0
    incumbent_objective: int | None = None
    proved_optimal: bool = False


@dataclass
class ScheduleResult:
    """Raw engine output before plan assembly."""

    starts: list[int]
    option_indexes: list[int]
    unit_assignment: list[tuple[int, ...]]  # unit indexes per task
    objective: int
    makespan: int
    stats: SolveStats


@dataclass
class CompiledTask:
    index: int
    id: str
    duration: int
    release: int
    deadline: int  # latest allowed end
    pred_mask: int
    preds: tuple[int, ...]
    succs: tuple[int, ...]
    conflict_mask: int
    conflicts: tuple[int, ...]
    options: tuple[tuple[tuple[int, int], ...], ...]  # per option: ((type, count), ...)
    option_sizes: tuple[int, ...]
    tail: int = 0


@dataclass
class CompiledProblem:
    instance: ProblemInstance
    tasks: list[CompiledTask]
    type_ids: list[str]
    type_counts: list[int]
    units: tuple[RobotUnit, ...]
    units_of_type: list[list[int]]  # unit indexes per type
    weights: ObjectiveWeights
    horizon: int
    topo_order: list[int]
    min_need: list[list[int]]  # [type][task]
    min_option_size: list[int]
    primary_type: list[int]  # first type every option of the task draws from, or -1
    static_makespan_floor: int
    twin_of: list[int]  # symmetry: index of the isomorphic leader component twin, or -1


def _component_symmetry(tasks: list[CompiledTask]) -> list[int]:
    """Detect pairs of isomorphic weakly-connected components.

    Returns twin_of: for every task in a follower component, the doc index
    of its image in the leader component (-1 otherwise). Used as a
    dominance rule: a follower component may not start before its leader.
    """
    n = len(tasks)
    parent = list(range(n))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    def union(a: int, b: int) -> None:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb

    for t in tasks:
        for p in t.preds:
            union(t.index, p)
        for c in t.conflicts:
            union(t.index, c)
    comps: dict[int, list[int]] = {}
    for i in range(n):
        comps.setdefault(find(i), []).append(i)

    def signature(i: int) -> tuple:
        t = tasks[i]
        return (t.duration, t.release, t.deadline, t.options, len(t.preds), len(t.succs), len(t.conflicts))

    def comp_sig(members: list[int]) -> tuple:
        return tuple(sorted(signature(i) for i in members))

    def isomorphic(a: list[int], b: list[int]) -> dict[int, int] | None:
        # tiny components: backtracking over signature-compatible images
        if len(a) != len(b):
            return None
        a_sorted = sorted(a)
        mapping: dict[int, int] = {}
        used: set[int] = set()

        def ok(i: int, j: int) -> bool:
            if signature(i) != signature(j):
                return False
            ti, tj = tasks[i], tasks[j]
            for p in ti.preds:
                if p in mapping and mapping[p] not in tj.preds:
                    return False
            for q in tj.preds:
                inv = [x for x, y in mapping.items() if y == q]
                if inv and inv[0] not in ti.preds:
                    return False
            for c in ti.conflicts:
                if c in mapping and mapping[c] not in tj.conflicts:
                    return False
            return True

        def back(k: int) -> bool:
            if k == len(a_sorted):
                # full check of edge preservation
                for i in a_sorted:
                    ti, tj = tasks[i], tasks[mapping[i]]
                    if {mapping[p] for p in ti.preds} != set(tj.preds):
                        return False
                    if {mapping[c] for c in ti.conflicts if c in mapping} != {
                        c for c in tj.conflicts if c in set(mapping.values())
                    }:
                        return False
                return True
            i = a_sorted[k]
            for j in sorted(b):
                if j in used or not ok(i, j):
                    continue
                mapping[i] = j
                used.add(j)
                if back(k + 1):
                    return True
                del mapping[i]
                used.discard(j)
            return False

        if len(a_sorted) > 8:
            return None
        return dict(mapping) if back(0) else None

    twin_of = [-1] * n
    by_sig: dict[tuple, list[list[int]]] = {}
    for members in comps.values():
        by_sig.setdefault(comp_sig(members), []).append(sorted(members))
    for groups in by_sig.values():
        if len(groups) < 2:
            continue
        groups.sort(key=lambda ms: ms[0])
        leader = groups[0]
        prev = leader
        for follower in groups[1:]:
            mapping = isomorphic(prev, follower)
            if mapping is None:
                continue
            for i, j in mapping.items():
                twin_of[j] = i
            prev = follower
    return twin_of


def compile_problem(
    instance: ProblemInstance,
    team_options: dict[str, list[tuple[int, ...]]],
) -> CompiledProblem:
    tasks_doc = instance.tasks
    index_of = {t.id: i for i, t in enumerate(tasks_doc)}
    n = len(tasks_doc)
    types = instance.robot_types
    units = instance.expand_units()
    units_of_type: list[list[int]] = [[] for _ in types]
    type_index = {rt.id: ti for ti, rt in enumerate(types)}
    for ui, u in enumerate(units):
        units_of_type[type_index[u.type_id]].append(ui)

    conflict_sets: list[set[int]] = [set() for _ in range(n)]
    for a, b in instance.conflicts:
        ia, ib = index_of[a], index_of[b]
        conflict_sets[ia].add(ib)
        conflict_sets[ib].add(ia)

    compiled: list[CompiledTask] = []
    for i, t in enumerate(tasks_doc):
        preds = tuple(sorted(index_of[p] for p in t.predecessors))
        opts = []
        for opt in team_options[t.id]:
            sparse = tuple((ti, c) for ti, c in enumerate(opt) if c > 0)
            opts.append((sum(c for _, c in sparse), sparse))
        opts.sort(key=lambda x: (x[0], x[1]))
        release = t.window.start if t.window else 0
        deadline = t.window.end if t.window and t.window.end is not None else INF
        compiled.append(
            CompiledTask(
                index=i,
                id=t.id,
                duration=t.duration,
                release=release,
                deadline=deadline,
                pred_mask=sum(1 << p for p in preds),
                preds=preds,
                succs=(),
                conflict_mask=sum(1 << c for c in conflict_sets[i]),
                conflicts=tuple(sorted(conflict_sets[i])),
                options=tuple(sparse for _sz, sparse in opts),
                option_sizes=tuple(sz for sz, _sparse in opts),
            )
        )

    succs: list[list[int]] = [[] for _ in range(n)]
    for t in compiled:
        for p in t.preds:
            succs[p].append(t.index)
    for t in compiled:
        t.succs = tuple(succs[t.index])

    indeg = [len(t.preds) for t in compiled]
    queue = [i for i in range(n) if indeg[i] == 0]
    topo: list[int] = []
    while queue:
        i = queue.pop()
        topo.append(i)
        for s in compiled[i].succs:
            indeg[s] -= 1
            if indeg[s] == 0:
                queue.append(s)

    for i in reversed(topo):
        t = compiled[i]
        t.tail = max((compiled[s].duration + compiled[s].tail for s in t.succs), default=0)

    min_need = [[0] * n for _ in types]
    min_size = [0] * n
    primary = [-1] * n
    for t in compiled:
        if t.options:
            min_size[t.index] = min(t.option_sizes)
        for ti in range(len(types)):
            needs = [dict(opt).get(ti, 0) for opt in t.options] or [0]
            min_need[ti][t.index] = min(needs)
        for ti in range(len(types)):
            if min_need[ti][t.index] > 0:
                primary[t.index] = ti
                break

    floor = 0
    for k in range(len(instance.capabilities)):
        supply = sum(u.capabilities[k] for u in units)
        demand_area = sum(t.duration * tasks_doc[t.index].requirements[k] for t in compiled)
        if demand_area > 0 and supply > 0:
            floor = max(floor, -(-demand_area // supply))

    return CompiledProblem(
        instance=instance,
        tasks=compiled,
        type_ids=[rt.id for rt in types],
        type_counts=[rt.count for rt in types],
        units=units,
        units_of_type=units_of_type,
        weights=instance.weights,
        horizon=instance.effective_horizon(),
        topo_order=topo,
        min_need=min_need,
        min_option_size=min_size,
        primary_type=primary,
        static_makespan_floor=floor,
        twin_of=_component_symmetry(compiled),
    )


class BudgetExhausted(Exception):
    pass


class ProfileSearch:
    """Fresh-solve search over per-type usage profiles."""

    def __init__(
        self,
        problem: CompiledProblem,
        limits: SolveLimits,
        stop: Event | None = None,
        wall_deadline: float | None = None,
    ):
        self.p = problem
        self.limits = limits
        self.stop = stop
        self.n = n = len(problem.tasks)
        self.full_mask = (1 << n) - 1
        self.w = problem.weights
        self.w_mk = self.w.makespan
        self.w_sum = self.w.end_sum
        self.w_rob = self.w.robot_use
        self.nodes = 0
        self.deadline_s = wall_deadline if wall_deadline is not None else time.monotonic() + limits.time_budget_s
        self.exhausted = False

        # hot-path arrays
        self.dur = [t.duration for t in problem.tasks]
        self.rel = [t.release for t in problem.tasks]
        self.dead = [t.deadline for t in problem.tasks]
        self.tail = [t.tail for t in problem.tasks]
        self.pred_mask = [t.pred_mask for t in problem.tasks]
        self.preds = [t.preds for t in problem.tasks]
        self.confs = [t.conflicts for t in problem.tasks]
        self.options = [t.options for t in problem.tasks]
        self.opt_sizes = [t.option_sizes for t in problem.tasks]
        self.minsize = problem.min_option_size
        self.primary = problem.primary_type
        self.min_need = problem.min_need
        self.caps = problem.type_counts
        self.n_types = len(problem.type_ids)
        self.topo = problem.topo_order
        self.twin_of = problem.twin_of
        self.twin_mask = [0] * n
        for j, i in enumerate(problem.twin_of):
            if i >= 0:
                self.twin_mask[j] = 1 << i

        self.start_arr = [0] * n
        self.end_arr = [0] * n
        self.opt_arr = [0] * n
        self.sched_mask = 0
        self.sum_ends = 0
        self.robot_count = 0
        self.cur_makespan = 0
        self.type_busy: list[list[tuple[int, int, int]]] = [[] for _ in range(self.n_types)]

        self.succ_mask = [0] * n
        for t in problem.tasks:
            for s in t.succs:
                self.succ_mask[t.index] |= 1 << s
        self.conf_mask = [t.conflict_mask for t in problem.tasks]
        # sparse (type, lowest unit demand) pairs per task, demand > 0 only
        self.need_pairs = [
            tuple((ti, problem.min_need[ti][i]) for ti in range(self.n_types) if problem.min_need[ti][i] > 0)
            for i in range(n)
        ]

        self.best_obj = INF
        self.best: ScheduleResult | None = None
        self.memo: dict = {}
        self.best_key: tuple | None = None
        # cost-based filtering: with the makespan weight dominating, any
        # schedule improving on the incumbent obeys a hard makespan cap
        self.sum_glb = 0
        self.rob_glb = 0
        self.mk_cap = INF

    def _refresh_cap(self) -> None:
        if self.best_obj >= INF:
            self.mk_cap = INF
            return
        budget = self.best_obj - 1 - self.w_sum * self.sum_glb - self.w_rob * self.rob_glb
        self.mk_cap = budget // self.w_mk if budget >= 0 else -1

    def _deadline(self, i: int) -> int:
        cap_dead = self.mk_cap - self.tail[i]
        own = self.dead[i]
        return own if own < cap_dead else cap_dead

    # -- budget ---------------------------------------------------------------

    def _tick(self) -> None:
        self.nodes += 1
        if self.stop is not None and self.stop.is_set():
            self.exhausted = True
        elif self.nodes >= self.limits.node_budget:
            self.exhausted = True
        elif self.nodes % 4096 == 0 and time.monotonic() > self.deadline_s:
            self.exhausted = True
        if self.exhausted:
            raise BudgetExhausted

    # -- earliest starts --------------------------------------------------------

    def _ests(self) -> list[int]:
        est = [0] * self.n
        sched = self.sched_mask
        end = self.end_arr
        dur = self.dur
        for i in self.topo:
            if sched >> i & 1:
                est[i] = self.start_arr[i]
                continue
            lo = self.rel[i]
            for pr in self.preds[i]:
                pe = end[pr] if sched >> pr & 1 else est[pr] + dur[pr]
                if pe > lo:
                    lo = pe
            est[i] = lo
        return est

    # -- placement ----------------------------------------------------------

    def _earliest(self, i: int, option: tuple[tuple[int, int], ...], lb: int) -> int | None:
        d = self.dur[i]
        deadline = self._deadline(i)
        tau = lb
        sched = self.sched_mask
        while True:
            if tau + d > deadline or tau > self.p.horizon:
                return None
            bump = -1
            for ci in self.confs[i]:
                if sched >> ci & 1:
                    s, e = self.start_arr[ci], self.end_arr[ci]
                    if s < tau + d and tau < e and e > bump:
                        bump = e
            if bump < 0:
                for ti, c in option:
                    cap = self.caps[ti]
                    busy = self.type_busy[ti]
                    if not busy:
                        continue
                    points = [tau]
                    for s, e, _a in busy:
                        if tau < s < tau + d:
                            points.append(s)
                    for pt in points:
                        usage = 0
                        blockers_end = INF
                        for s, e, a in busy:
                            if s <= pt < e:
                                usage += a
                                if e < blockers_end:
                                    blockers_end = e
                        if usage + c > cap:
                            if blockers_end > bump:
                                bump = blockers_end
                            break
                    if bump >= 0:
                        break
            if bump < 0:
                return tau
            tau = bump

    def _place(self, i: int, oi: int, tau: int) -> None:
        d = self.dur[i]
        self.start_arr[i] = tau
        self.end_arr[i] = tau + d
        self.opt_arr[i] = oi
        self.sched_mask |= 1 << i
        self.sum_ends += tau + d
        self.robot_count += self.opt_sizes[i][oi]
        for ti, c in self.options[i][oi]:
            self.type_busy[ti].append((tau, tau + d, c))

    def _unplace(self, i: int, oi: int, prev_mk: int) -> None:
        self.sched_mask &= ~(1 << i)
        self.sum_ends -= self.end_arr[i]
        self.robot_count -= self.opt_sizes[i][oi]
        for _tc in self.options[i][oi]:
            self.type_busy[_tc[0]].pop()
        self.cur_makespan = prev_mk

    # -- bounds ---------------------------------------------------------------

    def _bound(self, est: list[int], unsched: list[int]) -> int:
        dur = self.dur
        tail = self.tail
        mk = self.cur_makespan
        floor = self.p.static_makespan_floor
        if floor > mk:
            mk = floor
        sum_lb = self.sum_ends
        rob_lb = self.robot_count

        nt = self.n_types
        rel_b: list[list[int]] = [[] for _ in range(nt)]
        tail_b: list[list[int]] = [[] for _ in range(nt)]
        area_b = [0] * nt
        group_b: list[list[tuple[int, int, int]]] = [[] for _ in range(nt)]
        for ti in range(nt):
            for s, e, a in self.type_busy[ti]:
                rel_b[ti].append(s)
                tail_b[ti].append(0)
                area_b[ti] += (e - s) * a

        mk_cap = self.mk_cap
        dead = self.dead
        for i in unsched:
            d = dur[i]
            e = est[i]
            if e + d > dead[i] or e + d + tail[i] > mk_cap:
                return INF, sum_lb, rob_lb
            reach = e + d + tail[i]
            if reach > mk:
                mk = reach
            rob_lb += self.minsize[i]
            for ti, need in self.need_pairs[i]:
                rel_b[ti].append(e)
                tail_b[ti].append(tail[i])
                area_b[ti] += d * need
            pi = self.primary[i]
            if pi >= 0:
                group_b[pi].append((d, e, self.min_need[pi][i]))
            else:
                sum_lb += e + d

        for ti in range(nt):
            area = area_b[ti]
            cap = self.caps[ti]
            if cap == 0:
                continue
            if area > 0:
                # a machine's work spans [first start, last end]; the last
                # task's successor chain still runs after it, so
                # m*M >= area + sum of m smallest releases + m smallest tails
                releases = rel_b[ti]
                tails = tail_b[ti]
                releases.sort()
                tails.sort()
                best_m = INF
                racc = 0
                tacc = 0
                for m in range(1, min(cap, len(releases)) + 1):
                    racc += releases[m - 1]
                    tacc += tails[m - 1]
                    val = -(-(area + racc + tacc) // m)
                    if val < best_m:
                        best_m = val
                if best_m > mk:
                    mk = best_m
            group = group_b[ti]
            if group:
                # shortest-processing-time bound from the common release
                rel0 = group[0][1]
                for g in group:
                    if g[1] < rel0:
                        rel0 = g[1]
                durs = sorted(g[0] for g in group)
                free = [rel0] * (cap if cap < len(durs) else len(durs))
                total = 0
                width = len(free)
                for k, dd in enumerate(durs):
                    m = k % width
                    free[m] += dd
                    total += free[m]
                plain = 0
                for dd, ee, _need in group:
                    plain += dd + ee
                sum_lb += total if total > plain else plain

        return mk, sum_lb, rob_lb

    # -- memo ----------------------------------------------------------------

    def _state_key(self, frontier: int) -> tuple:
        # placements arrive in non-decreasing (start, index) order, so busy
        # lists are already canonically ordered; clip dead history.
        profiles = tuple(
            tuple((s if s > frontier else frontier, e, a) for s, e, a in busy if e > frontier)
            for busy in self.type_busy
        )
        opens: list[tuple] = []
        sched = self.sched_mask
        unsched_mask = ~sched
        end = self.end_arr
        for i in range(self.n):
            if not sched >> i & 1:
                continue
            if end[i] > frontier:
                if self.succ_mask[i] & unsched_mask:
                    opens.append((i, end[i]))
                if self.conf_mask[i] & unsched_mask:
                    opens.append((i, self.start_arr[i], end[i]))
        return (self.sched_mask, profiles, tuple(opens))

    # -- search ---------------------------------------------------------------

    def run(self, seed: ScheduleResult | None, canonical: bool) -> tuple[ScheduleResult | None, SolveStats]:
        t0 = time.monotonic()
        if seed is not None:
            self.best_obj = seed.objective
            self.best = seed
        root_bound = 0
        if self.n > 0:
            est = self._ests()
            mk0, sum0, rob0 = self._bound(est, list(range(self.n)))
            root_bound = 0 if mk0 is INF else self.w_mk * mk0 + self.w_sum * sum0 + self.w_rob * rob0
            if mk0 is not INF:
                self.sum_glb = sum0
                self.rob_glb = rob0
            self._refresh_cap()
            try:
                self._dfs(0, -1)
            except BudgetExhausted:
                pass
        completed = not self.exhausted
        if canonical and completed and self.best is not None:
            self._canonical_pass()
        stats = SolveStats(
            nodes=self.nodes,
            wall_time_s=time.monotonic() - t0,
            best_bound=self.best_obj if completed else min(root_bound, self.best_obj),
            incumbent_objective=None if self.best is None else self.best_obj,
            proved_optimal=completed and self.best is not None,
        )
        return self.best, stats

    def _extract(self, obj: int) -> ScheduleResult:
        assignment = assign_units_first_fit(self.p, self.start_arr, self.opt_arr)
        return ScheduleResult(
            starts=list(self.start_arr),
            option_indexes=list(self.opt_arr),
            unit_assignment=assignment,
            objective=obj,
            makespan=self.cur_makespan,
            stats=SolveStats(),
        )

    def _dfs(self, floor_tau: int, floor_idx: int) -> None:
        self._tick()
        if self.sched_mask == self.full_mask:
            obj = self.w_mk * self.cur_makespan + self.w_sum * self.sum_ends + self.w_rob * self.robot_count
            if obj < self.best_obj:
                self.best_obj = obj
                self.best = self._extract(obj)
                self._refresh_cap()
            return
        sched = self.sched_mask
        est = self._ests()
        unsched = []
        frontier = INF
        for i in range(self.n):
            if not sched >> i & 1:
                unsched.append(i)
                if est[i] < frontier:
                    frontier = est[i]
        if floor_tau < frontier:
            # every continuation starts at >= frontier, so the chronological
            # floor can no longer bind; normalizing it merges memo states
            floor_tau, floor_idx = -1, -1
        if len(unsched) > 2:
            # the floor is a function of the placement state (latest (start,
            # index) pair), so it joins the key; dominance compares pure costs
            key = (self._state_key(frontier), floor_idx)
            value = (self.sum_ends, self.cur_makespan, self.robot_count)
            stored = self.memo.get(key)
            if stored is not None:
                for v in stored:
                    if v[0] <= value[0] and v[1] <= value[1] and v[2] <= value[2]:
                        return
                stored[:] = [v for v in stored if not (value[0] <= v[0] and value[1] <= v[1] and value[2] <= v[2])]
                stored.append(value)
            else:
                self.memo[key] = [value]
                if len(self.memo) > 600_000:
                    self.memo.clear()
        mk_lb, sum_lb, rob_lb = self._bound(est, unsched)
        if mk_lb is INF:
            return
        w_mk = self.w_mk
        w_sum = self.w_sum
        w_rob = self.w_rob
        best_obj = self.best_obj
        if w_mk * mk_lb + w_sum * sum_lb + w_rob * rob_lb >= best_obj:
            return

        twin_mask = self.twin_mask
        pred_mask = self.pred_mask
        dur = self.dur
        tail = self.tail
        eligible = [i for i in unsched if not pred_mask[i] & ~sched and (not twin_mask[i] or twin_mask[i] & sched)]
        eligible.sort(key=lambda i: (-(dur[i] + tail[i]), est[i], i))
        prev_mk = self.cur_makespan
        base_rest = w_sum * sum_lb + w_rob * rob_lb
        earliest = self._earliest
        place = self._place
        unplace = self._unplace
        dfs = self._dfs
        end_arr = self.end_arr
        for i in eligible:
            ei = est[i]
            lb = ei if ei > floor_tau else floor_tau
            opts = self.options[i]
            dt = dur[i] + tail[i]
            for oi in range(len(opts)):
                tau = earliest(i, opts[oi], lb)
                if tau is None:
                    continue
                if tau == floor_tau and i < floor_idx:
                    continue
                # a child placing i at tau has bound at least
                # w_mk*max(mk_lb, tau+dur+tail) + w_sum*(sum_lb + tau - est)
                push = tau + dt
                child_bound = (
                    w_mk * (push if push > mk_lb else mk_lb)
                    + base_rest
                    + w_sum * (tau - ei)
                )
                if child_bound >= self.best_obj:
                    continue
                place(i, oi, tau)
                if end_arr[i] > self.cur_makespan:
                    self.cur_makespan = end_arr[i]
                dfs(tau, i)
                unplace(i, oi, prev_mk)

    # -- canonicalization ------------------------------------------------------

    def _canonical_pass(self, prefix: tuple | None = None) -> None:
        """Re-enumerate the optimal plateau for the lexicographically
        smallest (start vector, unit bitmap); deterministic output contract.

        States are deduplicated by a lex-aware memo: for equal cost vectors
        the continuations coincide, so a visit whose scheduled-start prefix
        is lexicographically larger can never yield a smaller final vector.
        """
        assert self.best_obj < INF
        target = self.best_obj
        self.memo = {}
        if self.best is not None and self.best_key is None:
            self.best_key = (tuple(self.best.starts), tuple(self.best.unit_assignment))
        budget = target - self.w_sum * self.sum_glb - self.w_rob * self.rob_glb
        self.mk_cap = budget // self.w_mk if budget >= 0 else -1
        plateau_budget = self.limits.node_budget

        def dfs(floor_tau: int, floor_idx: int) -> None:
            self.nodes += 1
            if self.nodes >= plateau_budget or (self.stop is not None and self.stop.is_set()):
                raise BudgetExhausted
            if self.nodes % 4096 == 0 and time.monotonic() > self.deadline_s:
                raise BudgetExhausted
            if self.sched_mask == self.full_mask:
                obj = (
                    self.w_mk * self.cur_makespan
                    + self.w_sum * self.sum_ends
                    + self.w_rob * self.robot_count
                )
                if obj == target:
                    assignment = assign_units_first_fit(self.p, self.start_arr, self.opt_arr)
                    key = (tuple(self.start_arr), tuple(assignment))
                    if self.best_key is None or key < self.best_key:
                        self.best_key = key
                        self.best = ScheduleResult(
                            starts=list(self.start_arr),
                            option_indexes=list(self.opt_arr),
                            unit_assignment=assignment,
                            objective=obj,
                            makespan=self.cur_makespan,
                            stats=SolveStats(),
                        )
                return
            sched = self.sched_mask
            est = self._ests()
            unsched = []
            frontier = INF
            for i in range(self.n):
                if not sched >> i & 1:
                    unsched.append(i)
                    if est[i] < frontier:
                        frontier = est[i]
            nf_tau, nf_idx = (floor_tau, floor_idx) if floor_tau >= frontier else (-1, -1)
            key = (self._state_key(frontier), nf_idx)
            value = (self.sum_ends, self.cur_makespan, self.robot_count)
            start_prefix = tuple(self.start_arr[i] if sched >> i & 1 else -1 for i in range(self.n))
            if self.best_key is not None:
                # lex pruning: walk doc positions against the incumbent key;
                # once every completion is provably lex-greater, give up
                bk = self.best_key[0]
                verdict = 0
                for pos in range(self.n):
                    v = start_prefix[pos]
                    b = bk[pos]
                    if v >= 0:
                        if v < b:
                            break
                        if v > b:
                            verdict = 1
                            break
                        continue
                    low = est[pos] if est[pos] > floor_tau else floor_tau
                    if low > b:
                        verdict = 1
                    break
                if verdict:
                    return
            opt_prefix = tuple(self.opt_arr[i] if sched >> i & 1 else -1 for i in range(self.n))
            stored = self.memo.get(key)
            if stored is not None:
                for v, pfx, opfx in stored:
                    # a strictly lex-smaller start prefix beats any merged
                    # completion; an identical (starts, options) prefix is a
                    # duplicate state
                    if v == value and (pfx < start_prefix or (pfx == start_prefix and opfx == opt_prefix)):
                        return
                stored.append((value, start_prefix, opt_prefix))
            else:
                self.memo[key] = [(value, start_prefix, opt_prefix)]
                if len(self.memo) > 400_000:
                    self.memo.clear()
            mk_lb, sum_lb, rob_lb = self._bound(est, unsched)
            if mk_lb is INF or self.w_mk * mk_lb + self.w_sum * sum_lb + self.w_rob * rob_lb > target:
                return
            eligible = [i for i in unsched if not self.pred_mask[i] & ~sched and (self.twin_mask[i] == 0 or self.twin_mask[i] & sched)]
            eligible.sort(key=lambda i: (est[i], i))
            prev_mk = self.cur_makespan
            for i in eligible:
                lb = est[i] if est[i] > floor_tau else floor_tau
                opts = self.options[i]
                for oi in range(len(opts)):
                    tau = self._earliest(i, opts[oi], lb)
                    if tau is None:
                        continue
                    if tau == floor_tau and i < floor_idx:
                        continue
                    self._place(i, oi, tau)
                    if self.end_arr[i] > self.cur_makespan:
                        self.cur_makespan = self.end_arr[i]
                    dfs(tau, i)
                    self._unplace(i, oi, prev_mk)

        if self.n > 0:
            floor = (0, -1)
            if prefix:
                for i, oi, tau in prefix:
                    self._place(i, oi, tau)
                    if self.end_arr[i] > self.cur_makespan:
                        self.cur_makespan = self.end_arr[i]
                    floor = (tau, i)
            try:
                dfs(*floor)
            except BudgetExhausted:
                pass


def assign_units_first_fit(problem: CompiledProblem, starts: list[int], opts: list[int]) -> list[tuple[int, ...]]:
    """Recover concrete units from a type-level schedule.

    Processing tasks by (start, index) and taking the lowest-indexed free
    units of each type always succeeds: per-type usage never exceeds
    capacity at any time point, and intervals admit a greedy coloring in
    start order.
    """
    n = len(problem.tasks)
    free_at = [0] * len(problem.units)
    result: list[tuple[int, ...]] = [() for _ in range(n)]
    for i in sorted(range(n), key=lambda i: (starts[i], i)):
        t = problem.tasks[i]
        chosen: list[int] = []
        for ti, c in t.options[opts[i]]:
            avail = [u for u in problem.units_of_type[ti] if free_at[u] <= starts[i]]
            take = avail[:c]
            if len(take) < c:
                raise AssertionError(f"unit extraction failed for task {t.id}")
            for u in take:
                free_at[u] = starts[i] + t.duration
            chosen.extend(take)
        result[i] = tuple(sorted(chosen))
    return result


def _greedy_once(problem: CompiledProblem, rule: int) -> ScheduleResult | None:
    search = ProfileSearch(problem, SolveLimits(time_budget_s=3600, node_budget=INF), None)
    n = search.n
    while search.sched_mask != search.full_mask:
        est = search._ests()
        eligible = [
            i
            for i in range(n)
            if not search.sched_mask >> i & 1 and not search.pred_mask[i] & ~search.sched_mask
        ]
        if not eligible:
            return None
        if rule == 0:  # longest remaining path
            eligible.sort(key=lambda i: (-(search.dur[i] + search.tail[i]), est[i], i))
        elif rule == 1:  # earliest start, longest tail
            eligible.sort(key=lambda i: (est[i], -search.tail[i], i))
        else:  # most successor work
            eligible.sort(key=lambda i: (-search.tail[i], est[i], i))
        placed = False
        for i in eligible:
            choices = []
            for oi in range(len(search.options[i])):
                tau = search._earliest(i, search.options[i][oi], est[i])
                if tau is not None:
                    choices.append((tau + search.dur[i], search.opt_sizes[i][oi], oi, tau))
            if not choices:
                continue
            choices.sort()
            _end, _size, oi, tau = choices[0]
            search._place(i, oi, tau)
            if search.end_arr[i] > search.cur_makespan:
                search.cur_makespan = search.end_arr[i]
            placed = True
            break
        if not placed:
            return None
    obj = (
        problem.weights.makespan * search.cur_makespan
        + problem.weights.end_sum * search.sum_ends
        + problem.weights.robot_use * search.robot_count
    )
    return search._extract(obj)


def greedy_schedule(problem: CompiledProblem) -> ScheduleResult | None:
    """Serial schedule generation under three priority rules; the best
    result seeds the incumbent."""
    best: ScheduleResult | None = None
    for rule in (0, 1, 2):
        cand = _greedy_once(problem, rule)
        if cand is not None and (best is None or cand.objective < best.objective):
            best = cand
    return best


# --------------------------------------------------------------------------
# unit-mode search (replanning)
# --------------------------------------------------------------------------

@dataclass
class ReplanInputs:
    """Original-plan context for a unit-mode search.

    ``orig_units[i]`` holds original unit indexes in the updated fleet
    (units that no longer exist are simply absent and contribute a fixed
    reassignment cost). ``pinned`` maps frozen task indexes to their exact
    (start, end, units).
    """

    orig_start: dict[int, int]
    orig_end: dict[int, int]
    orig_units: dict[int, tuple[int, ...]]
    removed_orig_count: dict[int, int]
    pinned: dict[int, tuple[int, int, tuple[int, ...]]]
    future: set[int]
    replan_time: int


def _dt_floor(est: int, duration: int, a: int | None, b: int | None) -> int:
    """Least possible |start - a| + |end - b| over starts >= est."""
    if a is None or b is None:
        return 0
    lo = min(a, b - duration)
    hi = max(a, b - duration)
    base = hi - lo
    if est <= hi:
        return base
    return (est - a) + (est + duration - b)


class UnitSearch:
    """Replanning search over per-unit busy intervals with deviation costs."""

    def __init__(
        self,
        problem: CompiledProblem,
        ctx: ReplanInputs,
        limits: SolveLimits,
        stop: Event | None = None,
    ):
        self.p = problem
        self.limits = limits
        self.stop = stop
        self.n = n = len(problem.tasks)
        self.full_mask = (1 << n) - 1
        self.w = problem.weights
        self.nodes = 0
        self.deadline_s = time.monotonic() + limits.time_budget_s
        self.exhausted = False
        self.ctx = ctx

        self.dur = [t.duration for t in problem.tasks]
        self.rel = [t.release for t in problem.tasks]
        self.dead = [t.deadline for t in problem.tasks]
        self.tail = [t.tail for t in problem.tasks]
        self.pred_mask = [t.pred_mask for t in problem.tasks]
        self.preds = [t.preds for t in problem.tasks]
        self.confs = [t.conflicts for t in problem.tasks]
        self.options = [t.options for t in problem.tasks]
        self.opt_sizes = [t.option_sizes for t in problem.tasks]
        self.topo = problem.topo_order
        self._succ_masks = [0] * n
        for t in problem.tasks:
            for s in t.succs:
                self._succ_masks[t.index] |= 1 << s

        self.start_arr = [0] * n
        self.end_arr = [0] * n
        self.opt_arr = [0] * n
        self.unit_arr: list[tuple[int, ...]] = [() for _ in range(n)]
        self.sched_mask = 0
        self.sum_ends = 0
        self.robot_count = 0
        self.cur_makespan = 0
        self.dx_sum = 0
        self.dt_sum = 0
        self.unit_busy: list[list[tuple[int, int]]] = [[] for _ in problem.units]

        cols: list[set[int]] = [set() for _ in problem.units]
        for i, uids in ctx.orig_units.items():
            for u in uids:
                cols[u].add(i)
        self.orig_col = [frozenset(c) for c in cols]

        self.best_obj = INF
        self.best: ScheduleResult | None = None
        self.memo: dict = {}
        self.best_key: tuple | None = None
        self.min_dx = [self._min_dx(i) for i in range(n)]

        for i, (s, e, uids) in ctx.pinned.items():
            self.start_arr[i] = s
            self.end_arr[i] = e
            self.unit_arr[i] = uids
            self.sched_mask |= 1 << i
            self.sum_ends += e
            self.robot_count += len(uids)
            if e > self.cur_makespan:
                self.cur_makespan = e
            for u in uids:
                self.unit_busy[u].append((s, e))
        for busy in self.unit_busy:
            busy.sort()
        self.pinned_mask = self.sched_mask

    def _tick(self) -> None:
        self.nodes += 1
        if self.stop is not None and self.stop.is_set():
            self.exhausted = True
        elif self.nodes >= self.limits.node_budget:
            self.exhausted = True
        elif self.nodes % 4096 == 0 and time.monotonic() > self.deadline_s:
            self.exhausted = True
        if self.exhausted:
            raise BudgetExhausted

    def _ests(self) -> list[int]:
        est = [0] * self.n
        sched = self.sched_mask
        for i in self.topo:
            if sched >> i & 1:
                est[i] = self.start_arr[i]
                continue
            lo = self.rel[i]
            for pr in self.preds[i]:
                pe = self.end_arr[pr] if sched >> pr & 1 else est[pr] + self.dur[pr]
                if pe > lo:
                    lo = pe
            est[i] = lo
        return est

    # -- penalties -------------------------------------------------------------

    def _min_dx(self, i: int) -> int:
        if i not in self.ctx.future:
            return 0
        removed = self.ctx.removed_orig_count.get(i, 0)
        orig_counts: dict[int, int] = {}
        for u in self.ctx.orig_units.get(i, ()):
            for ti, members in enumerate(self.p.units_of_type):
                if u in members:
                    orig_counts[ti] = orig_counts.get(ti, 0) + 1
                    break
        best = INF
        for opt in self.options[i]:
            have = dict(opt)
            types = set(have) | set(orig_counts)
            best = min(best, sum(abs(have.get(ti, 0) - orig_counts.get(ti, 0)) for ti in types))
        return removed + (0 if best is INF else best)

    def _task_dx(self, i: int, units: tuple[int, ...]) -> int:
        if i not in self.ctx.future:
            return 0
        orig = set(self.ctx.orig_units.get(i, ()))
        return len(set(units) ^ orig) + self.ctx.removed_orig_count.get(i, 0)

    def _task_dt(self, i: int, start: int, end: int) -> int:
        if i not in self.ctx.future:
            return 0
        a = self.ctx.orig_start.get(i)
        b = self.ctx.orig_end.get(i)
        if a is None or b is None:
            return 0
        return abs(start - a) + abs(end - b)

    # -- placement ---------------------------------------------------------------

    def _blocked(self, units: tuple[int, ...], i: int) -> list[tuple[int, int]]:
        blocks: list[tuple[int, int]] = []
        for u in units:
            blocks.extend(self.unit_busy[u])
        for ci in self.confs[i]:
            if self.sched_mask >> ci & 1:
                blocks.append((self.start_arr[ci], self.end_arr[ci]))
        blocks.sort()
        merged: list[tuple[int, int]] = []
        for s, e in blocks:
            if merged and s <= merged[-1][1]:
                if e > merged[-1][1]:
                    merged[-1] = (merged[-1][0], e)
            else:
                merged.append((s, e))
        return merged

    def _earliest_fit(self, blocks: list[tuple[int, int]], lb: int, d: int, deadline: int) -> int | None:
        tau = lb
        for s, e in blocks:
            if e <= tau:
                continue
            if s >= tau + d:
                break
            tau = e
        if tau + d > deadline or tau > self.p.horizon:
            return None
        return tau

    def _latest_fit(self, blocks: list[tuple[int, int]], ub: int, d: int, lb: int, deadline: int) -> int | None:
        """Latest start <= ub with [start, start + d) free; None if < lb."""
        tau = min(ub, deadline - d)
        if tau < lb:
            return None
        for s, e in reversed(blocks):
            if s >= tau + d:
                continue
            if e <= tau:
                break
            tau = s - d
            if tau < lb:
                return None
        return tau

    def _unit_combos(self, ti: int, count: int) -> list[tuple[int, ...]]:
        groups: dict[tuple, list[int]] = {}
        for u in self.p.units_of_type[ti]:
            sig = (tuple(self.unit_busy[u]), self.orig_col[u])
            groups.setdefault(sig, []).append(u)
        group_units = list(groups.values())
        combos: list[tuple[int, ...]] = []

        def pick(gi: int, remaining: int, acc: list[int]) -> None:
            if remaining == 0:
                combos.append(tuple(acc))
                return
            if gi == len(group_units):
                return
            limit = min(remaining, len(group_units[gi]))
            for take in range(limit, -1, -1):
                pick(gi + 1, remaining - take, acc + group_units[gi][:take])

        pick(0, count, [])
        return combos

    def _option_unit_choices(self, i: int, oi: int) -> list[tuple[int, ...]]:
        per_type = [self._unit_combos(ti, c) for ti, c in self.options[i][oi]]
        if any(not combos for combos in per_type):
            return []
        choices: list[tuple[int, ...]] = [()]
        for combos in per_type:
            choices = [acc + c for acc in choices for c in combos]
        return [tuple(sorted(c)) for c in choices]

    def _candidate_starts(self, i: int, blocks: list[tuple[int, int]], lb: int) -> list[int]:
        d = self.dur[i]
        deadline = self.dead[i]
        cands: list[int | None] = [self._earliest_fit(blocks, lb, d, deadline)]
        if i in self.ctx.future and i in self.ctx.orig_start:
            a = self.ctx.orig_start[i]
            b_anchor = self.ctx.orig_end[i] - d
            for anchor in {a, b_anchor}:
                if anchor > lb:
                    cands.append(self._earliest_fit(blocks, anchor, d, deadline))
                    cands.append(self._latest_fit(blocks, anchor, d, lb, deadline))
        return sorted({c for c in cands if c is not None})

    # -- state ---------------------------------------------------------------

    def _place(self, i: int, tau: int, units: tuple[int, ...]) -> tuple[int, int, int]:
        d = self.dur[i]
        prev = (self.cur_makespan, self.dx_sum, self.dt_sum)
        self.start_arr[i] = tau
        self.end_arr[i] = tau + d
        self.unit_arr[i] = units
        self.sched_mask |= 1 << i
        self.sum_ends += tau + d
        self.robot_count += len(units)
        if tau + d > self.cur_makespan:
            self.cur_makespan = tau + d
        self.dx_sum += self._task_dx(i, units)
        self.dt_sum += self._task_dt(i, tau, tau + d)
        for u in units:
            busy = self.unit_busy[u]
            busy.append((tau, tau + d))
            busy.sort()
        return prev

    def _unplace(self, i: int, units: tuple[int, ...], prev: tuple[int, int, int]) -> None:
        self.sched_mask &= ~(1 << i)
        self.sum_ends -= self.end_arr[i]
        self.robot_count -= len(units)
        self.cur_makespan, self.dx_sum, self.dt_sum = prev
        interval = (self.start_arr[i], self.end_arr[i])
        for u in units:
            self.unit_busy[u].remove(interval)

    def _objective(self) -> int:
        return (
            self.w.makespan * self.cur_makespan
            + self.w.end_sum * self.sum_ends
            + self.w.robot_use * self.robot_count
            + self.w.reassignment * self.dx_sum
            + self.w.retiming * self.dt_sum
        )

    def _bound(self, est: list[int], unsched: list[int]) -> int:
        p = self.p
        mk = max(self.cur_makespan, p.static_makespan_floor)
        sum_lb = self.sum_ends
        rob_lb = self.robot_count
        dx_lb = self.dx_sum
        dt_lb = self.dt_sum
        for i in unsched:
            reach = est[i] + self.dur[i]
            sum_lb += reach
            rob_lb += p.min_option_size[i]
            dx_lb += self.min_dx[i]
            if i in self.ctx.future:
                dt_lb += _dt_floor(est[i], self.dur[i], self.ctx.orig_start.get(i), self.ctx.orig_end.get(i))
            if reach + self.tail[i] > mk:
                mk = reach + self.tail[i]
        for ti in range(len(p.type_ids)):
            cap = p.type_counts[ti]
            if cap == 0:
                continue
            committed = sum(sum(e - s for s, e in self.unit_busy[u]) for u in p.units_of_type[ti])
            future_area = sum(self.dur[i] * p.min_need[ti][i] for i in unsched)
            if committed + future_area > 0:
                base = -(-(committed + future_area) // cap)
                if base > mk:
                    mk = base
        return (
            self.w.makespan * mk
            + self.w.end_sum * sum_lb
            + self.w.robot_use * rob_lb
            + self.w.reassignment * dx_lb
            + self.w.retiming * dt_lb
        )

    def _state_key(self) -> tuple:
        sched = self.sched_mask
        unsched_mask = ~sched
        opens: list[tuple] = []
        for i in range(self.n):
            if not sched >> i & 1:
                continue
            t = self.p.tasks[i]
            if t.succs and self._succ_masks[i] & unsched_mask:
                opens.append((i, self.end_arr[i]))
            if t.conflict_mask & unsched_mask:
                opens.append((i, self.start_arr[i], self.end_arr[i]))
        return (sched, tuple(tuple(b) for b in self.unit_busy), tuple(opens))

    def _extract(self, obj: int) -> ScheduleResult:
        return ScheduleResult(
            starts=list(self.start_arr),
            option_indexes=list(self.opt_arr),
            unit_assignment=list(self.unit_arr),
            objective=obj,
            makespan=self.cur_makespan,
            stats=SolveStats(),
        )

    # -- search ---------------------------------------------------------------

    def run(self, seed: ScheduleResult | None, canonical: bool) -> tuple[ScheduleResult | None, SolveStats]:
        t0 = time.monotonic()
        if seed is not None:
            self.best_obj = seed.objective
            self.best = seed
        root_bound = self._bound(self._ests(), [i for i in range(self.n) if not self.sched_mask >> i & 1])
        try:
            self._dfs()
        except BudgetExhausted:
            pass
        completed = not self.exhausted
        if canonical and completed and self.best is not None:
            self._canonical_pass()
        stats = SolveStats(
            nodes=self.nodes,
            wall_time_s=time.monotonic() - t0,
            best_bound=self.best_obj if completed else min(root_bound, self.best_obj),
            incumbent_objective=None if self.best is None else self.best_obj,
            proved_optimal=completed and self.best is not None,
        )
        return self.best, stats

    def _dfs(self) -> None:
        self._tick()
        if self.sched_mask == self.full_mask:
            obj = self._objective()
            if obj < self.best_obj:
                self.best_obj = obj
                self.best = self._extract(obj)
            return
        sched = self.sched_mask
        unsched = [i for i in range(self.n) if not sched >> i & 1]
        est = self._ests()
        if self._bound(est, unsched) >= self.best_obj:
            return
        key = self._state_key()
        value = (self.sum_ends, self.cur_makespan, self.robot_count, self.dx_sum, self.dt_sum)
        stored = self.memo.get(key)
        if stored is not None:
            for v in stored:
                if all(v[j] <= value[j] for j in range(5)):
                    return
            stored[:] = [v for v in stored if not all(value[j] <= v[j] for j in range(5))]
            stored.append(value)
        else:
            self.memo[key] = [value]
            if len(self.memo) > 300_000:
                self.memo.clear()

        eligible = [i for i in unsched if not self.pred_mask[i] & ~sched]
        eligible.sort(key=lambda i: (-(self.dur[i] + self.tail[i]), est[i], i))
        for i in eligible:
            for oi in range(len(self.options[i])):
                self.opt_arr[i] = oi
                for units in self._option_unit_choices(i, oi):
                    blocks = self._blocked(units, i)
                    for tau in self._candidate_starts(i, blocks, est[i]):
                        prev = self._place(i, tau, units)
                        self._dfs()
                        self._unplace(i, units, prev)

    def _canonical_pass(self) -> None:
        assert self.best is not None
        target = self.best_obj
        self.memo = {}
        self.best_key = (tuple(self.best.starts), tuple(self.best.unit_assignment))
        plateau_budget = min(self.limits.node_budget, self.nodes + 1_000_000)

        def dfs() -> None:
            self.nodes += 1
            if self.nodes >= plateau_budget or (self.stop is not None and self.stop.is_set()):
                raise BudgetExhausted
            if self.sched_mask == self.full_mask:
                obj = self._objective()
                if obj == target:
                    key = (tuple(self.start_arr), tuple(self.unit_arr))
                    if self.best_key is None or key < self.best_key:
                        self.best_key = key
                        self.best = self._extract(obj)
                return
            sched = self.sched_mask
            unsched = [i for i in range(self.n) if not sched >> i & 1]
            est = self._ests()
            if self._bound(est, unsched) > target:
                return
            key = self._state_key()
            value = (self.sum_ends, self.cur_makespan, self.robot_count, self.dx_sum, self.dt_sum)
            prefix = tuple(self.start_arr[i] if sched >> i & 1 else -1 for i in range(self.n))
            uprefix = tuple(self.unit_arr[i] if sched >> i & 1 else None for i in range(self.n))
            stored = self.memo.get(key)
            if stored is not None:
                for v, pfx, upfx in stored:
                    if v == value and (pfx < prefix or (pfx == prefix and upfx == uprefix)):
                        return
                stored.append((value, prefix, uprefix))
            else:
                self.memo[key] = [(value, prefix, uprefix)]
            eligible = [i for i in unsched if not self.pred_mask[i] & ~sched]
            eligible.sort(key=lambda i: (est[i], i))
            for i in eligible:
                for oi in range(len(self.options[i])):
                    self.opt_arr[i] = oi
                    for units in self._option_unit_choices(i, oi):
                        blocks = self._blocked(units, i)
                        for tau in self._candidate_starts(i, blocks, est[i]):
                            prev = self._place(i, tau, units)
                            dfs()
                            self._unplace(i, units, prev)

        try:
            dfs()
        except BudgetExhausted:
            pass


def greedy_repair(problem: CompiledProblem, ctx: ReplanInputs, limits: SolveLimits) -> ScheduleResult | None:
    """Seed incumbent for replanning: keep each future task as close to its
    original slot (units, then times) as constraints allow."""
    search = UnitSearch(problem, ctx, limits, None)
    order = sorted(
        (i for i in range(search.n) if not search.sched_mask >> i & 1),
        key=lambda i: (ctx.orig_start.get(i, INF), i),
    )
    remaining = set(order)
    while remaining:
        est = search._ests()
        progressed = False
        for i in order:
            if i not in remaining:
                continue
            if search.pred_mask[i] & ~search.sched_mask:
                continue
            best_choice = None
            for oi in range(len(search.options[i])):
                search.opt_arr[i] = oi
                for units in search._option_unit_choices(i, oi):
                    blocks = search._blocked(units, i)
                    for tau in search._candidate_starts(i, blocks, est[i]):
                        dx = search._task_dx(i, units)
                        dt = search._task_dt(i, tau, tau + search.dur[i])
                        key = (
                            search.w.reassignment * dx + search.w.retiming * dt,
                            tau + search.dur[i],
                            units,
                        )
                        if best_choice is None or key < best_choice[0]:
                            best_choice = (key, oi, units, tau)
            if best_choice is None:
                return None
            _, oi, units, tau = best_choice
            search.opt_arr[i] = oi
            search._place(i, tau, units)
            remaining.discard(i)
            progressed = True
        if not progressed:
            return None
    return search._extract(search._objective())


# --------------------------------------------------------------------------
# parallel proving support
# --------------------------------------------------------------------------

Prefix = tuple[tuple[int, int, int], ...]  # ((task, option, start), ...)


def enumerate_prefixes(problem: CompiledProblem, depth: int = 2) -> list[Prefix]:
    """All chronological placement prefixes up to ``depth``.

    Enumeration applies only the invariant rules (eligibility, twin
    dominance, earliest placement, floor tie-break), not cost filters, so
    the prefix set covers every subtree the cost-aware search could enter.
    """
    search = ProfileSearch(problem, SolveLimits(time_budget_s=3600.0, node_budget=INF), None)
    out: list[Prefix] = []

    def expand(d: int, floor_tau: int, floor_idx: int, acc: list[tuple[int, int, int]]) -> None:
        sched = search.sched_mask
        if sched == search.full_mask or d == depth:
            out.append(tuple(acc))
            return
        est = search._ests()
        eligible = [
            i
            for i in range(search.n)
            if not sched >> i & 1
            and not search.pred_mask[i] & ~sched
            and (not search.twin_mask[i] or search.twin_mask[i] & sched)
        ]
        eligible.sort(key=lambda i: (-(search.dur[i] + search.tail[i]), est[i], i))
        for i in eligible:
            lb = est[i] if est[i] > floor_tau else floor_tau
            for oi in range(len(search.options[i])):
                tau = search._earliest(i, search.options[i][oi], lb)
                if tau is None:
                    continue
                if tau == floor_tau and i < floor_idx:
                    continue
                prev_mk = search.cur_makespan
                search._place(i, oi, tau)
                if search.end_arr[i] > search.cur_makespan:
                    search.cur_makespan = search.end_arr[i]
                acc.append((i, oi, tau))
                expand(d + 1, tau, i, acc)
                acc.pop()
                search._unplace(i, oi, prev_mk)

    expand(0, 0, -1, [])
    return out


def _prepare_subtree(problem: CompiledProblem, limits: SolveLimits, wall_deadline: float) -> ProfileSearch:
    search = ProfileSearch(problem, limits, None, wall_deadline=wall_deadline)
    if search.n:
        est = search._ests()
        mk0, sum0, rob0 = search._bound(est, list(range(search.n)))
        if mk0 is not INF:
            search.sum_glb = sum0
            search.rob_glb = rob0
    return search


def prove_subtree(args: tuple) -> tuple:
    """Worker: prove one prefix subtree against a fixed incumbent value.

    Returns (exhausted, nodes, packed best-or-None). Proofs stay valid when
    other subtrees later reveal better incumbents: pruning against a larger
    value rules out anything below it in this subtree too.
    """
    problem, prefix, incumbent_obj, wall_deadline, node_budget = args
    limits = SolveLimits(time_budget_s=3600.0, node_budget=node_budget)
    search = _prepare_subtree(problem, limits, wall_deadline)
    search.best_obj = incumbent_obj
    search.best = None
    search._refresh_cap()
    floor_tau, floor_idx = 0, -1
    for i, oi, tau in prefix:
        search._place(i, oi, tau)
        if search.end_arr[i] > search.cur_makespan:
            search.cur_makespan = search.end_arr[i]
        floor_tau, floor_idx = tau, i
    try:
        search._dfs(floor_tau, floor_idx)
    except BudgetExhausted:
        pass
    best = search.best
    packed = None
    if best is not None:
        packed = (best.objective, best.makespan, best.starts, best.option_indexes, best.unit_assignment)
    return (search.exhausted, search.nodes, packed)


def canonical_subtree(args: tuple) -> tuple:
    """Worker: lex-minimal optimal schedule within one prefix subtree."""
    problem, prefix, target, wall_deadline, node_budget = args
    limits = SolveLimits(time_budget_s=3600.0, node_budget=node_budget)
    search = _prepare_subtree(problem, limits, wall_deadline)
    search.best_obj = target
    search.best = None
    search.best_key = None
    search._canonical_pass(prefix=prefix)
    best = search.best
    packed = None
    if best is not None:
        packed = (search.best_key, best.objective, best.makespan, best.starts, best.option_indexes, best.unit_assignment)
    return (search.exhausted, search.nodes, packed)
