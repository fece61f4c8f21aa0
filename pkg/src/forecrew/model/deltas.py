"""Constraint change requests and their application to instances.

Five change kinds exist, numbered 1-5 in the interchange document:
dependency edits, duration overrides, start-time shifts, robot count
changes, and concurrency conflicts. Times are integer minutes internally;
the JSON document format uses hours for durations and start shifts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Union

from .types import ForecrewError, ProblemInstance, Task, TimeWindow

DEPENDENCY = 1
DURATION = 2
START_TIME = 3
ROBOT_COUNT = 4
CONFLICT = 5


class UnknownTaskError(ForecrewError):
    pass


class UnknownRobotTypeError(ForecrewError):
    pass


class RemovingAbsentDependencyError(ForecrewError):
    pass


class DeltaDocumentError(ForecrewError):
    """Raised for a malformed change entry; carries a human diagnostic."""


@dataclass(frozen=True)
class DependencyChange:
    """Make (or unmake) ``task_id`` a predecessor of ``successor_id``."""

    task_id: str
    successor_id: str
    add: bool
    kind: int = DEPENDENCY


@dataclass(frozen=True)
class DurationChange:
    task_id: str
    minutes: int
    kind: int = DURATION


@dataclass(frozen=True)
class StartTimeChange:
    """Shift the earliest-start bound; positive means delayed."""

    task_id: str
    shift_minutes: int
    kind: int = START_TIME


@dataclass(frozen=True)
class RobotCountChange:
    robot_type_id: str
    change: int
    kind: int = ROBOT_COUNT


@dataclass(frozen=True)
class ConflictChange:
    """Forbid two tasks from running concurrently. The pair is unordered."""

    task_a: str
    task_b: str
    kind: int = CONFLICT

    def __post_init__(self) -> None:
        if (self.task_b, self.task_a) < (self.task_a, self.task_b):
            object.__setattr__(self, "task_a", self.task_b)
            object.__setattr__(self, "task_b", self.task_a)


ConstraintDelta = Union[DependencyChange, DurationChange, StartTimeChange, RobotCountChange, ConflictChange]


def validate_delta(delta: ConstraintDelta, instance: ProblemInstance) -> None:
    """Check references and payload ranges against an instance."""
    task_ids = {t.id for t in instance.tasks}
    if isinstance(delta, DependencyChange):
        for t in (delta.task_id, delta.successor_id):
            if t not in task_ids:
                raise UnknownTaskError(t)
    elif isinstance(delta, DurationChange):
        if delta.task_id not in task_ids:
            raise UnknownTaskError(delta.task_id)
        if delta.minutes <= 0:
            raise DeltaDocumentError(f"duration for {delta.task_id} must be positive, got {delta.minutes}")
    elif isinstance(delta, StartTimeChange):
        if delta.task_id not in task_ids:
            raise UnknownTaskError(delta.task_id)
    elif isinstance(delta, RobotCountChange):
        if delta.robot_type_id not in {rt.id for rt in instance.robot_types}:
            raise UnknownRobotTypeError(delta.robot_type_id)
    elif isinstance(delta, ConflictChange):
        for t in (delta.task_a, delta.task_b):
            if t not in task_ids:
                raise UnknownTaskError(t)
    else:  # pragma: no cover - exhaustive by construction
        raise DeltaDocumentError(f"unknown delta {delta!r}")


def _apply_one(instance: ProblemInstance, delta: ConstraintDelta) -> ProblemInstance:
    validate_delta(delta, instance)
    if isinstance(delta, DependencyChange):
        successor = instance.task_by_id(delta.successor_id)
        preds = list(successor.predecessors)
        if delta.add:
            if delta.task_id not in preds:
                preds.append(delta.task_id)
        else:
            if delta.task_id not in preds:
                raise RemovingAbsentDependencyError(
                    f"{delta.task_id} is not a predecessor of {delta.successor_id}"
                )
            preds.remove(delta.task_id)
        new_task = replace(successor, predecessors=tuple(preds))
        return instance.with_tasks(tuple(new_task if t.id == successor.id else t for t in instance.tasks))

    if isinstance(delta, DurationChange):
        task = instance.task_by_id(delta.task_id)
        new_task = replace(task, duration=delta.minutes)
        return instance.with_tasks(tuple(new_task if t.id == task.id else t for t in instance.tasks))

    if isinstance(delta, StartTimeChange):
        task = instance.task_by_id(delta.task_id)
        old = task.window or TimeWindow(start=0, end=None)
        new_task = replace(task, window=TimeWindow(start=max(0, old.start + delta.shift_minutes), end=old.end))
        return instance.with_tasks(tuple(new_task if t.id == task.id else t for t in instance.tasks))

    if isinstance(delta, RobotCountChange):
        rt = instance.robot_type_by_id(delta.robot_type_id)
        new_rt = replace(rt, count=max(0, rt.count + delta.change))
        return replace(
            instance,
            robot_types=tuple(new_rt if r.id == rt.id else r for r in instance.robot_types),
        )

    assert isinstance(delta, ConflictChange)
    pair = (delta.task_a, delta.task_b)
    if pair in instance.conflicts or (pair[1], pair[0]) in instance.conflicts:
        return instance
    return replace(instance, conflicts=instance.conflicts + (pair,))


def apply_deltas(instance: ProblemInstance, deltas: list[ConstraintDelta]) -> ProblemInstance:
    """Fold the change requests into a new instance, left to right."""
    for delta in deltas:
        instance = _apply_one(instance, delta)
    return instance


# --- interchange document (the extraction output schema) -------------------

def _hours_number(minutes: int) -> int | float:
    hours = minutes / 60
    return int(hours) if hours == int(hours) else hours


def _parse_signed_hours(value: object, what: str) -> int:
    if isinstance(value, str):
        text = value.strip()
        if text.startswith("+"):
            text = text[1:]
        try:
            value = float(text)
        except ValueError:
            raise DeltaDocumentError(f"{what}: not a number: {value!r}") from None
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise DeltaDocumentError(f"{what}: not a number: {value!r}")
    minutes = float(value) * 60
    if abs(minutes - round(minutes)) > 1e-9:
        raise DeltaDocumentError(f"{what}: {value!r} hours is not a whole number of minutes")
    return int(round(minutes))


def _parse_signed_int(value: object, what: str) -> int:
    if isinstance(value, str):
        text = value.strip()
        if text.startswith("+"):
            text = text[1:]
        try:
            return int(text)
        except ValueError:
            raise DeltaDocumentError(f"{what}: not an integer: {value!r}") from None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise DeltaDocumentError(f"{what}: not an integer: {value!r}")
    if float(value) != int(value):
        raise DeltaDocumentError(f"{what}: not an integer: {value!r}")
    return int(value)


def _require_str(value: object, what: str) -> str:
    if not isinstance(value, str) or not value:
        raise DeltaDocumentError(f"{what}: expected a non-empty string, got {value!r}")
    return value


def delta_from_change(entry: object) -> ConstraintDelta:
    """Parse one ``{"constraint_type": N, "parameters": [...]}`` object."""
    if not isinstance(entry, dict):
        raise DeltaDocumentError(f"change entry must be an object, got {entry!r}")
    kind = entry.get("constraint_type")
    params = entry.get("parameters")
    if kind not in (DEPENDENCY, DURATION, START_TIME, ROBOT_COUNT, CONFLICT):
        raise DeltaDocumentError(f"unknown constraint_type {kind!r}")
    if not isinstance(params, list):
        raise DeltaDocumentError(f"parameters must be an array, got {params!r}")

    if kind == DEPENDENCY:
        if len(params) != 3:
            raise DeltaDocumentError(f"dependency change needs [task_id, successor, +/-], got {params!r}")
        sign = params[2]
        if sign not in ("+", "-"):
            raise DeltaDocumentError(f"dependency sign must be '+' or '-', got {sign!r}")
        return DependencyChange(
            task_id=_require_str(params[0], "dependency task_id"),
            successor_id=_require_str(params[1], "dependency successor"),
            add=sign == "+",
        )
    if kind == DURATION:
        if len(params) != 2:
            raise DeltaDocumentError(f"duration change needs [task_id, new_duration], got {params!r}")
        minutes = _parse_signed_hours(params[1], "new_duration")
        if minutes <= 0:
            raise DeltaDocumentError(f"new_duration must be positive, got {params[1]!r}")
        return DurationChange(task_id=_require_str(params[0], "duration task_id"), minutes=minutes)
    if kind == START_TIME:
        if len(params) != 2:
            raise DeltaDocumentError(f"start time change needs [task_id, start_time_change], got {params!r}")
        return StartTimeChange(
            task_id=_require_str(params[0], "start time task_id"),
            shift_minutes=_parse_signed_hours(params[1], "start_time_change"),
        )
    if kind == ROBOT_COUNT:
        if len(params) != 2:
            raise DeltaDocumentError(f"robot count change needs [robot_type_id, robot_number_change], got {params!r}")
        return RobotCountChange(
            robot_type_id=_require_str(params[0], "robot_type_id"),
            change=_parse_signed_int(params[1], "robot_number_change"),
        )
    if len(params) != 2:
        raise DeltaDocumentError(f"conflict change needs [task_id1, task_id2], got {params!r}")
    return ConflictChange(
        task_a=_require_str(params[0], "conflict task_id1"),
        task_b=_require_str(params[1], "conflict task_id2"),
    )


def delta_to_change(delta: ConstraintDelta) -> dict:
    """Serialize one delta to the interchange entry (hours for times)."""
    if isinstance(delta, DependencyChange):
        params: list = [delta.task_id, delta.successor_id, "+" if delta.add else "-"]
    elif isinstance(delta, DurationChange):
        params = [delta.task_id, _hours_number(delta.minutes)]
    elif isinstance(delta, StartTimeChange):
        params = [delta.task_id, _hours_number(delta.shift_minutes)]
    elif isinstance(delta, RobotCountChange):
        params = [delta.robot_type_id, delta.change]
    else:
        params = [delta.task_a, delta.task_b]
    return {"constraint_type": delta.kind, "parameters": params}


def deltas_from_document(doc: object) -> list[ConstraintDelta]:
    """Parse a full ``{"changes": [...]}`` document, failing on any bad entry."""
    if isinstance(doc, (str, bytes)):
        doc = json.loads(doc)
    if not isinstance(doc, dict) or not isinstance(doc.get("changes"), list):
        raise DeltaDocumentError('delta document must be {"changes": [...]}')
    return [delta_from_change(entry) for entry in doc["changes"]]


def deltas_to_document(deltas: list[ConstraintDelta]) -> dict:
    return {"changes": [delta_to_change(d) for d in deltas]}
