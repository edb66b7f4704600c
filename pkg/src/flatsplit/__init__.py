"""Exact-arithmetic rent division across multiple candidate apartments.

Computes fair room assignments and prices when a group of roommates is
choosing between several apartments, not just splitting one.  All money
amounts are exact rationals; every fairness verdict is decided with exact
arithmetic (no tolerances).
"""

from flatsplit.model import (
    Assignment,
    EnvyMatrix,
    Instance,
    PartialSolution,
    PriceMatrix,
    Solution,
    money,
    money_str,
    utility,
    validate,
    welfare,
    envy_matrix,
)

__all__ = [
    "Assignment",
    "EnvyMatrix",
    "Instance",
    "PartialSolution",
    "PriceMatrix",
    "Solution",
    "money",
    "money_str",
    "utility",
    "validate",
    "welfare",
    "envy_matrix",
]

__version__ = "0.1.0"
