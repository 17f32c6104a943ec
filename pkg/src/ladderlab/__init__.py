"""Ladder systems over finite fields, uniformization and coded models."""

from __future__ import annotations

__version__ = "0.1.0"

from .algebra import FieldCtx, Vec, combine, evaluate, field_op, make_field, parse_field_spec
from .colouring import Colouring, FilterD, almost_equal, apply_uniformizer, is_equivalent
from .errors import LadderLabError
from .instance import Instance, format_instance, load, parse_instance
from .isobridge import (StructureMap, brute_iso, check_extension_property, classify_No,
                        classify_union, decode_structure, iso_from_uniformizer,
                        uniformizer_from_iso, verify_isomorphism)
from .ladder import GenParams, LadderSystem, generate, is_window_separated, validate
from .modelcode import CodedModel, build_model, disjoint_union, model_stats, restrict_model
from .quotient import brute_class_count, class_count, normal_form, unifset_basis
from .uniformize import (PartialUniformizer, extend_uniformizer, global_uniformize, patch_initial,
                         solve_ladder_equations)

__all__ = [
    "FieldCtx", "Vec", "combine", "evaluate", "field_op", "make_field", "parse_field_spec",
    "Colouring", "FilterD", "almost_equal", "apply_uniformizer", "is_equivalent",
    "LadderLabError", "Instance", "format_instance", "load", "parse_instance",
    "StructureMap", "brute_iso", "check_extension_property", "classify_No", "classify_union",
    "decode_structure", "iso_from_uniformizer", "uniformizer_from_iso", "verify_isomorphism",
    "GenParams", "LadderSystem", "generate", "is_window_separated", "validate",
    "CodedModel", "build_model", "disjoint_union", "model_stats", "restrict_model",
    "brute_class_count", "class_count", "normal_form", "unifset_basis",
    "PartialUniformizer", "extend_uniformizer", "global_uniformize", "patch_initial",
    "solve_ladder_equations",
]
