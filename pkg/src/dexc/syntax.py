"""Types, point-free terms, signatures, typing and elaboration of sugar."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Union

from .errors import TypingError


# ---------------------------------------------------------------- types

@dataclass(frozen=True)
class Base:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Param:
    exc: str

    def __str__(self):
        return f"P[{self.exc}]"


@dataclass(frozen=True)
class Empty:
    def __str__(self):
        return "0"


@dataclass(frozen=True)
class Sum:
    left: "Ty"
    right: "Ty"

    def __str__(self):
        right = f"({self.right})" if isinstance(self.right, Sum) else str(self.right)
        return f"{self.left} + {right}"


Ty = Union[Base, Param, Empty, Sum]
EMPTY = Empty()


# ---------------------------------------------------------------- terms

@dataclass(frozen=True)
class Id:
    ty: Ty


@dataclass(frozen=True)
class Op:
    name: str


@dataclass(frozen=True)
class Compose:
    """``g . f``: apply ``f`` first."""
    g: "Term"
    f: "Term"


@dataclass(frozen=True)
class Tag:
    exc: str


@dataclass(frozen=True)
class Untag:
    exc: str


@dataclass(frozen=True)
class EmptyMap:
    ty: Ty


@dataclass(frozen=True)
class Downcast:
    k: "Term"


@dataclass(frozen=True)
class CCotuple:
    components: tuple  # ((exc, Term), ...)


@dataclass(frozen=True)
class DCotuple:
    g: "Term"
    k: "Term"


@dataclass(frozen=True)
class Inl:
    left: Ty
    right: Ty


@dataclass(frozen=True)
class Inr:
    left: Ty
    right: Ty


@dataclass(frozen=True)
class SCotuple:
    f: "Term"
    k: "Term"


@dataclass(frozen=True)
class Throw:
    exc: str
    ty: Ty


@dataclass(frozen=True)
class Try:
    f: "Term"
    handlers: tuple  # ((exc, Term), ...), non-empty


Term = Union[Id, Op, Compose, Tag, Untag, EmptyMap, Downcast, CCotuple,
             DCotuple, Inl, Inr, SCotuple, Throw, Try]


def _cached_hash(structural):
    # terms are deep trees used as memo keys; hash each node once
    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = structural(self)
            object.__setattr__(self, "_hash", h)
        return h
    return __hash__


for _cls in (Id, Op, Compose, Tag, Untag, EmptyMap, Downcast, CCotuple,
             DCotuple, Inl, Inr, SCotuple, Throw, Try):
    _cls.__str__ = lambda self: format_term(self)
    _cls.__hash__ = _cached_hash(_cls.__hash__)


def compose(*terms: Term) -> Term:
    """``compose(h, g, f)`` is ``h . (g . f)``."""
    out = terms[-1]
    for t in reversed(terms[:-1]):
        out = Compose(t, out)
    return out


def _fmt_handlers(pairs) -> str:
    return ", ".join(f"{e} => {format_term(t)}" for e, t in pairs)


def format_term(t: Term) -> str:
    match t:
        case Id(ty):
            return f"id[{ty}]"
        case Op(name):
            return name
        case Compose(g, f):
            left = format_term(g)
            if isinstance(g, (Compose, Try)):
                left = f"({left})"
            right = format_term(f)
            if isinstance(f, Try):
                right = f"({right})"
            return f"{left} . {right}"
        case Tag(e):
            return f"tag[{e}]"
        case Untag(e):
            return f"untag[{e}]"
        case EmptyMap(ty):
            return f"empty[{ty}]"
        case Downcast(k):
            return f"down({format_term(k)})"
        case CCotuple(comps):
            return f"ccot{{{_fmt_handlers(comps)}}}"
        case DCotuple(g, k):
            return f"dcot({format_term(g)} | {format_term(k)})"
        case Inl(a, b):
            return f"inl[{a}, {b}]"
        case Inr(a, b):
            return f"inr[{a}, {b}]"
        case SCotuple(f, k):
            return f"scot({format_term(f)} | {format_term(k)})"
        case Throw(e, ty):
            return f"throw[{e}, {ty}]"
        case Try(f, handlers):
            return f"try {format_term(f)} catch{{{_fmt_handlers(handlers)}}}"
    raise TypeError(f"not a term: {t!r}")


# ------------------------------------------------------------ equations

class Strength(Enum):
    STRONG = "strong"
    WEAK = "weak"

    @property
    def symbol(self) -> str:
        return "==" if self is Strength.STRONG else "~~"


@dataclass(frozen=True)
class Equation:
    lhs: Term
    rhs: Term
    strength: Strength = Strength.STRONG

    def __str__(self):
        return f"{self.lhs} {self.strength.symbol} {self.rhs}"


# ------------------------------------------------------------ signatures

@dataclass(frozen=True)
class Signature:
    base_types: tuple = ()
    ops: dict = field(default_factory=dict)          # name -> (dom, cod)
    exceptions: dict = field(default_factory=dict)   # name -> Base, ordered
    axioms: dict = field(default_factory=dict)       # name -> strong Equation
    equations: dict = field(default_factory=dict)    # name -> Equation
    terms: dict = field(default_factory=dict)        # name -> Term
    singletons: frozenset = frozenset()
    lines: dict = field(default_factory=dict, compare=False, repr=False)  # decl name -> line

    @property
    def pure_axioms(self) -> list:
        return list(self.axioms.values())

    def param(self, exc: str) -> Ty:
        try:
            return self.exceptions[exc]
        except KeyError:
            raise TypingError(f"unknown exception {exc}") from None


def resolve(sig: Signature, ty: Ty) -> Ty:
    """Replace every ``P[E]`` alias with the declared parameter type."""
    match ty:
        case Param(e):
            return resolve(sig, sig.param(e))
        case Sum(a, b):
            return Sum(resolve(sig, a), resolve(sig, b))
        case Base(name):
            if name not in sig.base_types:
                raise TypingError(f"unknown type {name}")
            return ty
    return ty


def same_type(sig: Signature, a: Ty, b: Ty) -> bool:
    return resolve(sig, a) == resolve(sig, b)


def _expect(sig, got: Ty, want: Ty, what: str):
    if not same_type(sig, got, want):
        raise TypingError(f"{what}: {got} does not match {want}")


def typecheck(sig: Signature, t: Term) -> tuple:
    """Return ``(dom, cod)`` of ``t``; ``P[E]`` aliases are kept as written."""
    match t:
        case Id(ty):
            resolve(sig, ty)
            return ty, ty
        case Op(name):
            if name not in sig.ops:
                raise TypingError(f"unknown op {name}")
            return sig.ops[name]
        case Compose(g, f):
            fd, fc = typecheck(sig, f)
            gd, gc = typecheck(sig, g)
            if not same_type(sig, fc, gd):
                raise TypingError(
                    f"cannot compose {g} after {f}: cod {fc} != dom {gd}")
            return fd, gc
        case Tag(e):
            sig.param(e)
            return Param(e), EMPTY
        case Untag(e):
            sig.param(e)
            return EMPTY, Param(e)
        case EmptyMap(ty):
            resolve(sig, ty)
            return EMPTY, ty
        case Downcast(k):
            return typecheck(sig, k)
        case CCotuple(comps):
            names = [e for e, _ in comps]
            if sorted(names) != sorted(sig.exceptions) or len(set(names)) != len(names):
                raise TypingError(
                    "constitutive cotuple needs exactly one component per exception "
                    f"({', '.join(sig.exceptions)}), got ({', '.join(names)})")
            cod = None
            for e, f in comps:
                fd, fc = typecheck(sig, f)
                _expect(sig, fd, Param(e), f"component {e} domain")
                if cod is None:
                    cod = fc
                else:
                    _expect(sig, fc, cod, f"component {e} codomain")
            return EMPTY, cod
        case DCotuple(g, k):
            gd, gc = typecheck(sig, g)
            kd, kc = typecheck(sig, k)
            _expect(sig, kd, EMPTY, "dcot exceptional branch domain")
            _expect(sig, kc, gc, "dcot branch codomains")
            return gd, gc
        case Inl(a, b):
            resolve(sig, a), resolve(sig, b)
            return a, Sum(a, b)
        case Inr(a, b):
            resolve(sig, a), resolve(sig, b)
            return b, Sum(a, b)
        case SCotuple(f, k):
            fd, fc = typecheck(sig, f)
            kd, kc = typecheck(sig, k)
            _expect(sig, kc, fc, "scot branch codomains")
            return Sum(fd, kd), fc
        case Throw(e, ty):
            p = Param(e)
            sig.param(e)
            resolve(sig, ty)
            return p, ty
        case Try(f, handlers):
            fd, fc = typecheck(sig, f)
            if not handlers:
                raise TypingError("try needs at least one handler")
            for e, g in handlers:
                gd, gc = typecheck(sig, g)
                _expect(sig, gd, Param(e), f"handler {e} domain")
                _expect(sig, gc, fc, f"handler {e} codomain")
            return fd, fc
    raise TypingError(f"not a term: {t!r}")


def elaborate(sig: Signature, t: Term) -> Term:
    """Expand ``throw`` and ``try`` into core constructors, structurally."""
    match t:
        case Compose(g, f):
            return Compose(elaborate(sig, g), elaborate(sig, f))
        case Downcast(k):
            return Downcast(elaborate(sig, k))
        case CCotuple(comps):
            return CCotuple(tuple((e, elaborate(sig, f)) for e, f in comps))
        case DCotuple(g, k):
            return DCotuple(elaborate(sig, g), elaborate(sig, k))
        case SCotuple(f, k):
            return SCotuple(elaborate(sig, f), elaborate(sig, k))
        case Throw(e, ty):
            return Compose(EmptyMap(ty), Tag(e))
        case Try(f, handlers):
            _, cod = typecheck(sig, f)
            k = EmptyMap(cod)
            for e, g in reversed(handlers):
                k = Compose(DCotuple(elaborate(sig, g), k), Untag(e))
            return Downcast(Compose(DCotuple(Id(cod), k), elaborate(sig, f)))
    return t


def canonical(sig: Signature, t: Term) -> Term:
    """Elaborated form with resolved type annotations and cotuple components
    in declaration order; the kernel compares terms in this form."""
    t = elaborate(sig, t)

    def go(t):
        match t:
            case Id(ty):
                return Id(resolve(sig, ty))
            case EmptyMap(ty):
                return EmptyMap(resolve(sig, ty))
            case Inl(a, b):
                return Inl(resolve(sig, a), resolve(sig, b))
            case Inr(a, b):
                return Inr(resolve(sig, a), resolve(sig, b))
            case Compose(g, f):
                return Compose(go(g), go(f))
            case Downcast(k):
                return Downcast(go(k))
            case CCotuple(comps):
                order = list(sig.exceptions)
                ordered = sorted(comps, key=lambda c: order.index(c[0]))
                return CCotuple(tuple((e, go(f)) for e, f in ordered))
            case DCotuple(g, k):
                return DCotuple(go(g), go(k))
            case SCotuple(f, k):
                return SCotuple(go(f), go(k))
        return t

    return go(t)
