"""Tree encodings as penalty-form PUBO models."""

from .compile import (
    CompiledModel,
    compile_branch,
    compile_depth,
    compile_from_meta,
    compile_model,
    compile_position,
    default_penalty,
    meta_json,
    objective_part,
)
from .decode import DecodedSolution, Violation, decode, edge_cost, encode, feasibility
from .layout import KINDS, VariableLayout, layout

__all__ = [
    "CompiledModel", "compile_branch", "compile_depth", "compile_from_meta", "compile_model",
    "compile_position", "default_penalty", "meta_json", "objective_part", "DecodedSolution", "Violation",
    "decode", "edge_cost", "encode", "feasibility", "KINDS", "VariableLayout", "layout",
]
