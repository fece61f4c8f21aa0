"""Domain model: instances, plans, change requests, validation, documents."""

from .deltas import (
    CONFLICT,
    DEPENDENCY,
    DURATION,
    ROBOT_COUNT,
    START_TIME,
    ConflictChange,
    ConstraintDelta,
    DeltaDocumentError,
    DependencyChange,
    DurationChange,
    RemovingAbsentDependencyError,
    RobotCountChange,
    StartTimeChange,
    UnknownRobotTypeError,
    UnknownTaskError,
    apply_deltas,
    delta_from_change,
    delta_to_change,
    deltas_from_document,
    deltas_to_document,
    validate_delta,
)
from .documents import (
    ParseError,
    instance_from_document,
    instance_to_document,
    load_instance,
    plan_from_document,
    plan_to_document,
    save_instance,
)
from .teams import minimal_covering_teams
from .types import (
    PLAN_FEASIBLE,
    PLAN_INFEASIBLE,
    PLAN_OPTIMAL,
    Capability,
    ForecrewError,
    ObjectiveWeights,
    Plan,
    ProblemInstance,
    RobotType,
    RobotUnit,
    Task,
    TimeWindow,
    empty_plan,
)
from .validate import ValidationIssue, ValidationReport, validate_instance

__all__ = [
    "CONFLICT",
    "DEPENDENCY",
    "DURATION",
    "PLAN_FEASIBLE",
    "PLAN_INFEASIBLE",
    "PLAN_OPTIMAL",
    "ROBOT_COUNT",
    "START_TIME",
    "Capability",
    "ConflictChange",
    "ConstraintDelta",
    "DeltaDocumentError",
    "DependencyChange",
    "DurationChange",
    "ForecrewError",
    "ObjectiveWeights",
    "ParseError",
    "Plan",
    "ProblemInstance",
    "RemovingAbsentDependencyError",
    "RobotCountChange",
    "RobotType",
    "RobotUnit",
    "StartTimeChange",
    "Task",
    "TimeWindow",
    "UnknownRobotTypeError",
    "UnknownTaskError",
    "ValidationIssue",
    "ValidationReport",
    "apply_deltas",
    "delta_from_change",
    "delta_to_change",
    "deltas_from_document",
    "deltas_to_document",
    "empty_plan",
    "instance_from_document",
    "instance_to_document",
    "load_instance",
    "minimal_covering_teams",
    "plan_from_document",
    "plan_to_document",
    "save_instance",
    "validate_delta",
    "validate_instance",
]
