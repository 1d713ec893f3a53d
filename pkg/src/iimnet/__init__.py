"""Implicative interdependency modelling for two-layer networks.

The package covers the dependency model itself (survival of an entity in one
layer as a disjunction of conjunctions over the other layer), deterministic
cascade simulation, search for the most damaging K-entity attack, four
solvers for the k-entity hardening problem, ILP export of that problem in LP
text format, and a seeded generator for synthetic instances.
"""

from __future__ import annotations

from .cascade import (
    CascadeTrace,
    EntityState,
    kill_set,
    minterm_coverage_number,
    protection_set,
    simulate,
)
from .hardening import (
    HardeningMethod,
    HardeningResult,
    harden_case1,
    harden_case3_maxcov,
    harden_exact,
    harden_greedy,
)
from .idrtext import parse_network, serialize_network
from .ilp import (
    IlpConstraint,
    IlpModel,
    IlpSolution,
    IlpVariable,
    build_model,
    minimal_failure_trace,
    read_solution,
    write_lp,
)
from .model import (
    IDR,
    BudgetExceededError,
    CaseClass,
    EntityId,
    IntegrityError,
    InterdependentNetwork,
    Layer,
    Minterm,
    ParseError,
    UnknownEntityError,
    ValidationError,
    classify_case,
)
from .netgen import GenConfig, InfeasibleConfigError, generate
from .report import (
    ExperimentResult,
    ExperimentSettings,
    plot_rows,
    run_experiment,
    write_outputs,
)
from .vulnerability import (
    DEFAULT_BUDGET,
    AttackAssessment,
    most_vulnerable_exact,
    most_vulnerable_greedy,
)

__version__ = "0.1.0"

__all__ = [
    "AttackAssessment",
    "BudgetExceededError",
    "CascadeTrace",
    "CaseClass",
    "DEFAULT_BUDGET",
    "EntityId",
    "EntityState",
    "ExperimentResult",
    "ExperimentSettings",
    "GenConfig",
    "HardeningMethod",
    "HardeningResult",
    "IDR",
    "IlpConstraint",
    "IlpModel",
    "IlpSolution",
    "IlpVariable",
    "InfeasibleConfigError",
    "IntegrityError",
    "InterdependentNetwork",
    "Layer",
    "Minterm",
    "ParseError",
    "UnknownEntityError",
    "ValidationError",
    "build_model",
    "classify_case",
    "generate",
    "harden_case1",
    "harden_case3_maxcov",
    "harden_exact",
    "harden_greedy",
    "kill_set",
    "minimal_failure_trace",
    "minterm_coverage_number",
    "most_vulnerable_exact",
    "most_vulnerable_greedy",
    "parse_network",
    "plot_rows",
    "protection_set",
    "read_solution",
    "run_experiment",
    "serialize_network",
    "simulate",
    "write_lp",
    "write_outputs",
    "__version__",
]
