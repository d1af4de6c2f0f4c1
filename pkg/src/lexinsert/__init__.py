"""Insert objects into feature-based default inheritance hierarchies."""

from .features import UNKNOWN, Feature, FeatureError, FeatureSet, ObjectSpec, clash, complete, validate_consistent
from .hierarchy import (
    ClassDecl,
    CompiledClass,
    CompiledSet,
    Hierarchy,
    HierarchyError,
    Origin,
    ValidationReport,
    augment_singletons,
    compile_out,
    compile_out_weighted,
    validate,
)
from .insertion import (
    GuardError,
    InsertionResult,
    IterationRecord,
    NixonDiamond,
    cost,
    effective_features,
    exact_insert,
    greedy_insert,
    payoff,
    prune_redundant,
)

__all__ = [
    "UNKNOWN",
    "ClassDecl",
    "CompiledClass",
    "CompiledSet",
    "Feature",
    "FeatureError",
    "FeatureSet",
    "GuardError",
    "Hierarchy",
    "HierarchyError",
    "InsertionResult",
    "IterationRecord",
    "NixonDiamond",
    "ObjectSpec",
    "Origin",
    "ValidationReport",
    "augment_singletons",
    "clash",
    "compile_out",
    "compile_out_weighted",
    "complete",
    "cost",
    "effective_features",
    "exact_insert",
    "greedy_insert",
    "payoff",
    "prune_redundant",
    "validate",
    "validate_consistent",
]
