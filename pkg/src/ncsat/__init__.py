"""Learning non-compensatory sorting models from assignment examples with SAT."""

from .core import (
    ABOVE_ALL,
    Alternative,
    CriteriaSpec,
    LearningSet,
    MrSortModel,
    UncsModel,
    UpSet,
    assign,
    dominates,
    extends,
    favorable_coalition,
    mr_upset,
)
from .sat import CnfInstance, TruthAssignment, build_vocabulary, decode, encode
from .solver import SolveResult, solve, solve_external

__all__ = [
    "ABOVE_ALL",
    "Alternative",
    "CnfInstance",
    "CriteriaSpec",
    "LearningSet",
    "MrSortModel",
    "SolveResult",
    "TruthAssignment",
    "UncsModel",
    "UpSet",
    "assign",
    "build_vocabulary",
    "decode",
    "dominates",
    "encode",
    "extends",
    "favorable_coalition",
    "mr_upset",
    "solve",
    "solve_external",
]

__version__ = "0.1.0"
