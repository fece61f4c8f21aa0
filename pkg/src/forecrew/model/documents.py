"""Canonical JSON documents for instances and plans.

The instance document has top-level keys ``capabilities``, ``robot_types``,
``tasks``, ``conflicts``, ``weights`` and ``horizon_minutes``. Every
duration-like field is an object carrying exactly one of ``hours`` or
``minutes``; hours are converted to integer minutes at load time.
"""

from __future__ import annotations

import json
from typing import Any

from .types import (
    Capability,
    ForecrewError,
    ObjectiveWeights,
    Plan,
    ProblemInstance,
    RobotType,
    Task,
    TimeWindow,
)


class ParseError(ForecrewError):
    """Malformed document; the message names the offending field."""

    def __init__(self, where: str, message: str):
        super().__init__(f"{where}: {message}")
        self.where = where


def _as_minutes(value: Any, where: str) -> int:
    if not isinstance(value, dict):
        raise ParseError(where, f"expected an object with 'hours' or 'minutes', got {value!r}")
    keys = [k for k in ("hours", "minutes") if k in value]
    if len(keys) != 1:
        raise ParseError(where, f"exactly one of 'hours'/'minutes' required, got keys {sorted(value)}")
    raw = value[keys[0]]
    if isinstance(raw, str):
        try:
            raw = float(raw)
        except ValueError:
            raise ParseError(where, f"not a number: {raw!r}") from None
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ParseError(where, f"not a number: {raw!r}")
    minutes = float(raw) * 60 if keys[0] == "hours" else float(raw)
    if abs(minutes - round(minutes)) > 1e-9:
        raise ParseError(where, f"{raw!r} {keys[0]} is not a whole number of minutes")
    return int(round(minutes))


def _req_vector(mapping: Any, caps: tuple[Capability, ...], where: str) -> tuple[int, ...]:
    if mapping is None:
        mapping = {}
    if not isinstance(mapping, dict):
        raise ParseError(where, f"expected a capability->amount object, got {mapping!r}")
    by_name = {c.name: c.id for c in caps}
    vector = [0] * len(caps)
    for name, amount in mapping.items():
        if name not in by_name:
            raise ParseError(where, f"unknown capability {name!r}")
        if isinstance(amount, bool) or not isinstance(amount, int) or amount < 0:
            raise ParseError(where, f"amount for {name!r} must be a non-negative integer, got {amount!r}")
        vector[by_name[name]] = amount
    return tuple(vector)


def instance_from_document(doc: Any) -> ProblemInstance:
    if isinstance(doc, (bytes, bytearray)):
        doc = doc.decode("utf-8")
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise ParseError(f"line {exc.lineno}", exc.msg) from None
    if not isinstance(doc, dict):
        raise ParseError("document", "top level must be an object")

    caps_doc = doc.get("capabilities", [])
    if not isinstance(caps_doc, list):
        raise ParseError("capabilities", "expected an array")
    capabilities = tuple(
        Capability(id=i, name=str(entry["name"]) if isinstance(entry, dict) else str(entry))
        for i, entry in enumerate(caps_doc)
    )

    types_doc = doc.get("robot_types", [])
    if not isinstance(types_doc, list):
        raise ParseError("robot_types", "expected an array")
    robot_types = []
    for entry in types_doc:
        if not isinstance(entry, dict) or "id" not in entry:
            raise ParseError("robot_types", f"each robot type needs an 'id', got {entry!r}")
        count = entry.get("count", 1)
        if isinstance(count, bool) or not isinstance(count, int) or count < 0:
            raise ParseError(f"robot_types[{entry['id']}].count", f"must be a non-negative integer, got {count!r}")
        robot_types.append(
            RobotType(
                id=str(entry["id"]),
                capabilities=_req_vector(entry.get("capabilities"), capabilities, f"robot_types[{entry['id']}]"),
                count=count,
            )
        )

    tasks_doc = doc.get("tasks", [])
    if not isinstance(tasks_doc, list):
        raise ParseError("tasks", "expected an array")
    tasks = []
    for entry in tasks_doc:
        if not isinstance(entry, dict) or "id" not in entry:
            raise ParseError("tasks", f"each task needs an 'id', got {entry!r}")
        tid = str(entry["id"])
        where = f"tasks[{tid}]"
        if "duration" not in entry:
            raise ParseError(where, "missing 'duration'")
        window = None
        if entry.get("window") is not None:
            w = entry["window"]
            if not isinstance(w, dict) or "start" not in w:
                raise ParseError(f"{where}.window", f"expected an object with 'start' (and optional 'end'), got {w!r}")
            window = TimeWindow(
                start=_as_minutes(w["start"], f"{where}.window.start"),
                end=_as_minutes(w["end"], f"{where}.window.end") if w.get("end") is not None else None,
            )
        preds = entry.get("predecessors", [])
        if not isinstance(preds, list):
            raise ParseError(f"{where}.predecessors", "expected an array")
        aliases = entry.get("aliases", [])
        if not isinstance(aliases, list):
            raise ParseError(f"{where}.aliases", "expected an array")
        tasks.append(
            Task(
                id=tid,
                description=str(entry.get("description", "")),
                duration=_as_minutes(entry["duration"], f"{where}.duration"),
                requirements=_req_vector(entry.get("requirements"), capabilities, where),
                predecessors=tuple(str(p) for p in preds),
                window=window,
                aliases=tuple(str(a) for a in aliases),
            )
        )

    conflicts_doc = doc.get("conflicts", [])
    if not isinstance(conflicts_doc, list):
        raise ParseError("conflicts", "expected an array")
    conflicts = []
    for pair in conflicts_doc:
        if not isinstance(pair, list) or len(pair) != 2:
            raise ParseError("conflicts", f"each conflict is a [task, task] pair, got {pair!r}")
        conflicts.append((str(pair[0]), str(pair[1])))

    weights_doc = doc.get("weights") or {}
    if not isinstance(weights_doc, dict):
        raise ParseError("weights", "expected an object")
    defaults = ObjectiveWeights()
    try:
        weights = ObjectiveWeights(
            makespan=weights_doc.get("makespan", defaults.makespan),
            end_sum=weights_doc.get("end_sum", defaults.end_sum),
            robot_use=weights_doc.get("robot_use", defaults.robot_use),
            reassignment=weights_doc.get("reassignment", defaults.reassignment),
            retiming=weights_doc.get("retiming", defaults.retiming),
        )
        weights.validate()
    except (TypeError, ValueError) as exc:
        raise ParseError("weights", str(exc)) from None

    horizon = doc.get("horizon_minutes")
    if horizon is not None and (isinstance(horizon, bool) or not isinstance(horizon, int) or horizon <= 0):
        raise ParseError("horizon_minutes", f"must be a positive integer, got {horizon!r}")

    return ProblemInstance(
        capabilities=capabilities,
        robot_types=tuple(robot_types),
        tasks=tuple(tasks),
        conflicts=tuple(conflicts),
        weights=weights,
        horizon=horizon,
    )


def instance_to_document(instance: ProblemInstance) -> dict:
    cap_names = [c.name for c in instance.capabilities]

    def req_map(vector: tuple[int, ...]) -> dict:
        return {cap_names[k]: v for k, v in enumerate(vector) if v > 0}

    doc: dict = {
        "capabilities": [{"name": c.name} for c in instance.capabilities],
        "robot_types": [
            {"id": rt.id, "count": rt.count, "capabilities": req_map(rt.capabilities)}
            for rt in instance.robot_types
        ],
        "tasks": [],
        "conflicts": [list(pair) for pair in instance.conflicts],
        "weights": {
            "makespan": instance.weights.makespan,
            "end_sum": instance.weights.end_sum,
            "robot_use": instance.weights.robot_use,
            "reassignment": instance.weights.reassignment,
            "retiming": instance.weights.retiming,
        },
    }
    if instance.horizon is not None:
        doc["horizon_minutes"] = instance.horizon
    for task in instance.tasks:
        entry: dict = {
            "id": task.id,
            "description": task.description,
            "duration": {"minutes": task.duration},
            "requirements": req_map(task.requirements),
            "predecessors": list(task.predecessors),
        }
        if task.window is not None:
            entry["window"] = {"start": {"minutes": task.window.start}}
            if task.window.end is not None:
                entry["window"]["end"] = {"minutes": task.window.end}
        if task.aliases:
            entry["aliases"] = list(task.aliases)
        doc["tasks"].append(entry)
    return doc


def load_instance(data: bytes | str) -> ProblemInstance:
    return instance_from_document(data)


def save_instance(instance: ProblemInstance) -> bytes:
    return json.dumps(instance_to_document(instance), indent=2).encode("utf-8")


# --- plan documents ---------------------------------------------------------

def plan_to_document(plan: Plan, stats: dict | None = None) -> dict:
    doc = {
        "assignments": {t: list(units) for t, units in plan.assignments.items()},
        "task_times": {t: [s, e] for t, (s, e) in plan.task_times.items()},
        "makespan_minutes": plan.makespan,
        "objective": plan.objective,
        "status": plan.status,
    }
    if plan.gap:
        doc["gap"] = plan.gap
    if stats is not None:
        doc["stats"] = stats
    return doc


def plan_from_document(doc: Any) -> Plan:
    if isinstance(doc, (bytes, bytearray)):
        doc = doc.decode("utf-8")
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise ParseError(f"line {exc.lineno}", exc.msg) from None
    if not isinstance(doc, dict):
        raise ParseError("plan", "top level must be an object")
    try:
        assignments = {str(t): tuple(str(u) for u in units) for t, units in doc["assignments"].items()}
        task_times = {str(t): (int(se[0]), int(se[1])) for t, se in doc["task_times"].items()}
        return Plan(
            assignments=assignments,
            task_times=task_times,
            objective=int(doc.get("objective", 0)),
            makespan=int(doc["makespan_minutes"]),
            status=str(doc.get("status", "feasible")),
            gap=float(doc.get("gap", 0.0)),
        )
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ParseError("plan", f"malformed plan document: {exc}") from None
