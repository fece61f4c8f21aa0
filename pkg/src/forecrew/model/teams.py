"""Minimal covering team enumeration.

A team is a multiset of robot types whose summed capability vectors
dominate a task's requirement vector. Only minimal teams (no unit
removable) are candidates: the robot-use penalty makes a redundant unit
strictly worse and removing one never hurts any other objective term.
"""

from __future__ import annotations

from .types import RobotType

TeamCounts = tuple[int, ...]  # units drawn per robot type, indexed like robot_types

MAX_TEAMS = 512


def _covers(counts: TeamCounts, types: tuple[RobotType, ...], req: tuple[int, ...]) -> bool:
    for k, needed in enumerate(req):
        if needed == 0:
            continue
        supplied = sum(c * rt.capabilities[k] for c, rt in zip(counts, types))
        if supplied < needed:
            return False
    return True


def _is_minimal(counts: TeamCounts, types: tuple[RobotType, ...], req: tuple[int, ...]) -> bool:
    for idx, c in enumerate(counts):
        if c == 0:
            continue
        reduced = counts[:idx] + (c - 1,) + counts[idx + 1:]
        if sum(reduced) >= 1 and _covers(reduced, types, req):
            return False
    return True


def minimal_covering_teams(req: tuple[int, ...], types: tuple[RobotType, ...]) -> list[TeamCounts]:
    """All minimal type-count multisets covering ``req`` within fleet counts.

    A task with an all-zero requirement vector still needs one robot, so its
    minimal teams are the single-unit options. Returns [] when the fleet
    cannot cover the requirements at all.
    """
    n = len(types)
    if all(r == 0 for r in req):
        return [tuple(1 if i == j and types[j].count > 0 else 0 for i in range(n)) for j in range(n) if types[j].count > 0]

    results: list[TeamCounts] = []

    def extend(idx: int, counts: list[int]) -> None:
        if len(results) >= MAX_TEAMS:
            return
        if _covers(tuple(counts), types, req):
            team = tuple(counts)
            if _is_minimal(team, types, req):
                results.append(team)
            return
        if idx == n:
            return
        max_useful = types[idx].count
        relevant = any(types[idx].capabilities[k] > 0 and req[k] > 0 for k in range(len(req)))
        if relevant:
            # Adding more units of one type than the largest single demand
            # it serves can never be part of a minimal cover.
            cap = 0
            for k, needed in enumerate(req):
                if needed > 0 and types[idx].capabilities[k] > 0:
                    per_unit = types[idx].capabilities[k]
                    cap = max(cap, -(-needed // per_unit))
            max_useful = min(max_useful, cap)
        else:
            max_useful = 0
        for c in range(max_useful, -1, -1):
            counts[idx] = c
            extend(idx + 1, counts)
        counts[idx] = 0

    extend(0, [0] * n)
    # Drop any non-minimal leftovers that slipped through branch ordering.
    unique = sorted(set(results))
    return [t for t in unique if _is_minimal(t, types, req)]
