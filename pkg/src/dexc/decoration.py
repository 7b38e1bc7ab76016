"""Syntactic decoration inference on the scale pure < propagator < catcher."""
from __future__ import annotations

from enum import IntEnum

from .errors import DecorationError
from .syntax import (
    Id, Op, Compose, Tag, Untag, EmptyMap, Downcast, CCotuple, DCotuple, Inl,
    Inr, SCotuple, Throw, Try, Signature, Term,
)


class Decoration(IntEnum):
    PURE = 0
    PROPAGATOR = 1
    CATCHER = 2

    @property
    def label(self) -> str:
        return ("pure", "ppg", "ctc")[self]


PURE = Decoration.PURE
PPG = Decoration.PROPAGATOR
CTC = Decoration.CATCHER


def _need_ppg(sig, t, message):
    d = infer(sig, t)
    if d > PPG:
        raise DecorationError(f"{message}: {t} is a catcher")
    return d


def infer(sig: Signature, t: Term) -> Decoration:
    """Least decoration derivable for ``t``.

    Raises DecorationError when a constructor receives a catcher where the
    rules demand a propagator."""
    match t:
        case Id() | Op() | EmptyMap() | Inl() | Inr():
            return PURE
        case Tag():
            return PPG
        case Untag():
            return CTC
        case Compose(g, f):
            return max(infer(sig, g), infer(sig, f))
        case Downcast(k):
            infer(sig, k)
            return PPG
        case CCotuple(comps):
            for _, f in comps:
                _need_ppg(sig, f, "constitutive component must be a propagator")
            return CTC
        case DCotuple(g, k):
            _need_ppg(sig, g, "decorated cotuple: ordinary branch must be a propagator")
            infer(sig, k)
            return CTC
        case SCotuple(f, k):
            df = _need_ppg(sig, f, "semi-pure cotuple: left branch must be a propagator")
            dk = infer(sig, k)
            if df is PURE and dk is PURE:
                return PURE
            return PPG if dk <= PPG else CTC
        case Throw():
            return PPG
        case Try(f, handlers):
            _need_ppg(sig, f, "try body must be a propagator")
            for _, g in handlers:
                _need_ppg(sig, g, "handler must be a propagator")
            return PPG
    raise TypeError(f"not a term: {t!r}")


def check_at(sig: Signature, t: Term, required: Decoration) -> bool:
    """True iff ``t`` can be used at decoration ``required`` (upward coercion only)."""
    try:
        return infer(sig, t) <= required
    except DecorationError:
        return False
