"""Natural invariants of linear operators, frames, models and equivalence."""

from .core import (
    Certificate,
    all_j_alpha,
    box_apply,
    coordinate_frame,
    eval_frame,
    eval_invariant,
    frame_coefficients,
    general_position_check,
    j_alpha,
    symbol_j_alpha,
    tresse_derivative,
)
from .equiv import EXIT_CODES, Tolerances, Verdict, certify_equivalence, equivalence_check
from .expr import (
    BinOp,
    BoxApply,
    CatalogInv,
    Const,
    Expr,
    FreeTerm,
    Neg,
    Pow,
    Tresse,
    Var,
    frame_to_str,
    parse_frame,
    parse_invariant,
)
from .model import CompiledModel, ModelFingerprint, model_map

__all__ = [
    "BinOp",
    "BoxApply",
    "CatalogInv",
    "Certificate",
    "CompiledModel",
    "Const",
    "EXIT_CODES",
    "Expr",
    "FreeTerm",
    "ModelFingerprint",
    "Neg",
    "Pow",
    "Tolerances",
    "Tresse",
    "Var",
    "Verdict",
    "all_j_alpha",
    "box_apply",
    "certify_equivalence",
    "coordinate_frame",
    "equivalence_check",
    "eval_frame",
    "eval_invariant",
    "frame_coefficients",
    "frame_to_str",
    "general_position_check",
    "j_alpha",
    "model_map",
    "parse_frame",
    "parse_invariant",
    "symbol_j_alpha",
    "tresse_derivative",
]
