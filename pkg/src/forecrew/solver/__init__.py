"""Exact branch-and-bound scheduling: program build, solve, verify."""

from .engine import SolveLimits, SolveStats
from .program import InstanceInvalidError, IntegerProgram, build_program
from .solve import BudgetZeroError, solve
from .verify import Violation, ViolationReport, verify_plan

__all__ = [
    "BudgetZeroError",
    "InstanceInvalidError",
    "IntegerProgram",
    "SolveLimits",
    "SolveStats",
    "Violation",
    "ViolationReport",
    "build_program",
    "solve",
    "verify_plan",
]
