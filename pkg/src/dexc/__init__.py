"""Workbench for the decorated equational logic of exceptions."""
from .decoration import CTC, PPG, PURE, Decoration, check_at, infer
from .errors import (
    DecorationError, DexError, KernelError, ModelError, ParseError,
    SignatureError, TypingError,
)
from .kernel import RULES, Judgment, Proof, apply_rule, check_proof, format_proof, parse_proof
from .parser import format_signature, parse_signature, parse_term, parse_type
from .semantics import (
    build_model, check_equation, enumerate_models, eval_term, eval_try_compositional,
    eval_try_operational, is_pure_in, model_from_json, model_to_json, propagates,
)
from .syntax import Equation, Signature, Strength, canonical, elaborate, typecheck

__all__ = [
    "CTC", "PPG", "PURE", "Decoration", "check_at", "infer",
    "DecorationError", "DexError", "KernelError", "ModelError", "ParseError",
    "SignatureError", "TypingError",
    "RULES", "Judgment", "Proof", "apply_rule", "check_proof", "format_proof", "parse_proof",
    "format_signature", "parse_signature", "parse_term", "parse_type",
    "build_model", "check_equation", "enumerate_models", "eval_term",
    "eval_try_compositional", "eval_try_operational", "is_pure_in",
    "model_from_json", "model_to_json", "propagates",
    "Equation", "Signature", "Strength", "canonical", "elaborate", "typecheck",
]
__version__ = "0.1.0"
