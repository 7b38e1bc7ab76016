"""Concrete syntax: ``.dex`` signature files and the term language.

A ``.dex`` file is line oriented::

    type B
    type U singleton          # carrier of exactly one element (constants)
    op f : B -> B
    exception E1 of B
    axiom ff : f . f == id[B] @ pure
    term t = try f catch{E1 => id[B]}
    equation e1 : down(untag[E1]) == untag[E1] @ strong

Identifiers inside terms resolve to ops or to earlier ``term`` definitions,
which are inlined.
"""
from __future__ import annotations

import re

from .errors import ParseError, SignatureError, TypingError, DecorationError
from .syntax import (
    EMPTY, Base, Param, Sum, Id, Op, Compose, Tag, Untag, EmptyMap, Downcast,
    CCotuple, DCotuple, Inl, Inr, SCotuple, Throw, Try, Equation, Strength,
    Signature, typecheck, same_type, format_term,
)

KEYWORDS = {"id", "tag", "untag", "empty", "down", "ccot", "dcot", "inl",
            "inr", "scot", "throw", "try", "catch"}

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<sym>=>|->|==|~~|[.()\[\]{},|:=@+])
  | (?P<name>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<zero>0)
""", re.VERBOSE)


def tokenize(text: str, line: int = 1, col0: int = 0) -> list:
    """Tokens as ``(kind, value, line, col)``; columns are 1-based."""
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col0 + pos + 1)
        kind = m.lastgroup
        if kind != "ws":
            out.append((kind, m.group(), line, col0 + pos + 1))
        pos = m.end()
    return out


class TokenStream:
    def __init__(self, tokens: list, line: int = 0):
        self.toks = tokens
        self.i = 0
        self.line = line

    def peek(self, k: int = 0):
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def at(self, value: str) -> bool:
        tok = self.peek()
        return tok is not None and tok[1] == value

    def error(self, msg: str) -> ParseError:
        tok = self.peek()
        if tok is None:
            last = self.toks[-1] if self.toks else None
            col = last[3] + len(last[1]) if last else 1
            return ParseError(f"{msg} at end of line", self.line, col)
        return ParseError(f"{msg}, found {tok[1]!r}", tok[2], tok[3])

    def expect(self, value: str):
        if not self.at(value):
            raise self.error(f"expected {value!r}")
        self.i += 1

    def accept(self, value: str) -> bool:
        if self.at(value):
            self.i += 1
            return True
        return False

    def name(self, what: str = "name") -> str:
        tok = self.peek()
        if tok is None or tok[0] != "name":
            raise self.error(f"expected {what}")
        self.i += 1
        return tok[1]

    def done(self) -> bool:
        return self.i >= len(self.toks)

    def expect_end(self):
        if not self.done():
            raise self.error("unexpected trailing input")


class TermParser:
    """Recursive-descent parser for types and terms over a token stream.

    ``ops`` and ``terms`` are consulted to resolve bare identifiers."""

    def __init__(self, ops=(), terms=None):
        self.ops = ops
        self.terms = {} if terms is None else terms

    # types: left-associative ``+``
    def type(self, ts: TokenStream):
        ty = self._type_atom(ts)
        while ts.accept("+"):
            ty = Sum(ty, self._type_atom(ts))
        return ty

    def _type_atom(self, ts: TokenStream):
        tok = ts.peek()
        if tok is None:
            raise ts.error("expected a type")
        if tok[0] == "zero":
            ts.i += 1
            return EMPTY
        if ts.accept("("):
            ty = self.type(ts)
            ts.expect(")")
            return ty
        name = ts.name("a type")
        if name == "P" and ts.at("["):
            ts.expect("[")
            exc = ts.name("an exception name")
            ts.expect("]")
            return Param(exc)
        return Base(name)

    def term(self, ts: TokenStream):
        t = self._unit(ts)
        if ts.accept("."):
            return Compose(t, self.term(ts))
        return t

    def _handlers(self, ts: TokenStream) -> tuple:
        pairs = []
        ts.expect("{")
        while True:
            exc = ts.name("an exception name")
            ts.expect("=>")
            pairs.append((exc, self.term(ts)))
            if not ts.accept(","):
                break
        ts.expect("}")
        return tuple(pairs)

    def _pair(self, ts: TokenStream, ctor):
        ts.expect("(")
        a = self.term(ts)
        ts.expect("|")
        b = self.term(ts)
        ts.expect(")")
        return ctor(a, b)

    def _unit(self, ts: TokenStream):
        tok = ts.peek()
        if tok is None:
            raise ts.error("expected a term")
        if ts.accept("("):
            t = self.term(ts)
            ts.expect(")")
            return t
        if tok[0] != "name":
            raise ts.error("expected a term")
        word = tok[1]
        ts.i += 1
        match word:
            case "id" | "empty":
                ts.expect("[")
                ty = self.type(ts)
                ts.expect("]")
                return Id(ty) if word == "id" else EmptyMap(ty)
            case "tag" | "untag":
                ts.expect("[")
                exc = ts.name("an exception name")
                ts.expect("]")
                return Tag(exc) if word == "tag" else Untag(exc)
            case "inl" | "inr":
                ts.expect("[")
                a = self.type(ts)
                ts.expect(",")
                b = self.type(ts)
                ts.expect("]")
                return Inl(a, b) if word == "inl" else Inr(a, b)
            case "throw":
                ts.expect("[")
                exc = ts.name("an exception name")
                ts.expect(",")
                ty = self.type(ts)
                ts.expect("]")
                return Throw(exc, ty)
            case "down":
                ts.expect("(")
                t = self.term(ts)
                ts.expect(")")
                return Downcast(t)
            case "ccot":
                return CCotuple(self._handlers(ts))
            case "dcot":
                return self._pair(ts, DCotuple)
            case "scot":
                return self._pair(ts, SCotuple)
            case "try":
                f = self.term(ts)
                ts.expect("catch")
                return Try(f, self._handlers(ts))
            case "catch":
                ts.i -= 1
                raise ts.error("expected a term")
        if word in self.terms:
            return self.terms[word]
        if word in self.ops:
            return Op(word)
        ts.i -= 1
        raise ts.error("unknown name")


def parse_term(sig: Signature, text: str):
    ts = TokenStream(tokenize(text), 1)
    t = TermParser(sig.ops, sig.terms).term(ts)
    ts.expect_end()
    return t


def parse_type(sig: Signature, text: str):
    ts = TokenStream(tokenize(text), 1)
    ty = TermParser(sig.ops, sig.terms).type(ts)
    ts.expect_end()
    return ty


def parse_equation_tokens(tp: TermParser, ts: TokenStream) -> Equation:
    lhs = tp.term(ts)
    if ts.accept("=="):
        strength = Strength.STRONG
    elif ts.accept("~~"):
        strength = Strength.WEAK
    else:
        raise ts.error("expected '==' or '~~'")
    rhs = tp.term(ts)
    if ts.accept("@"):
        tag = ts.name("strong, weak or pure")
        if tag in ("strong", "pure"):
            strength = Strength.STRONG
        elif tag == "weak":
            strength = Strength.WEAK
        else:
            ts.i -= 1
            raise ts.error("expected strong, weak or pure")
    return Equation(lhs, rhs, strength)


def _strip_comment(line: str) -> str:
    i = line.find("#")
    return line if i < 0 else line[:i]


def parse_signature(text: str) -> Signature:
    base_types: list = []
    singletons: set = set()
    ops: dict = {}
    exceptions: dict = {}
    axioms: dict = {}
    equations: dict = {}
    terms: dict = {}
    lines: dict = {}
    tp = TermParser(ops, terms)

    def fresh(lineno, name, kind):
        if name in KEYWORDS:
            raise SignatureError(f"line {lineno}: {name!r} is a reserved word")
        taken = {"type": base_types, "op": ops, "exception": exceptions,
                 "term": terms, "axiom": axioms, "equation": equations}
        for k, names in taken.items():
            if name in names and (k == kind or {k, kind} <= {"op", "term"}):
                raise SignatureError(f"line {lineno}: duplicate {kind} name {name}")

    def declared(lineno, ty):
        match ty:
            case Base(name):
                if name not in base_types:
                    raise SignatureError(f"line {lineno}: undeclared type {name}")
            case Param(exc):
                if exc not in exceptions:
                    raise SignatureError(f"line {lineno}: undeclared exception {exc}")
            case Sum(a, b):
                declared(lineno, a)
                declared(lineno, b)

    for lineno, raw in enumerate(text.splitlines(), start=1):
        ts = TokenStream(tokenize(_strip_comment(raw), lineno), lineno)
        if ts.done():
            continue
        head = ts.name("a declaration keyword")
        if head == "type":
            name = ts.name("a type name")
            fresh(lineno, name, "type")
            if name in ("P",):
                raise SignatureError(f"line {lineno}: {name!r} is a reserved word")
            if ts.accept("singleton"):
                singletons.add(name)
            base_types.append(name)
        elif head == "op":
            name = ts.name("an op name")
            fresh(lineno, name, "op")
            ts.expect(":")
            dom = tp.type(ts)
            ts.expect("->")
            cod = tp.type(ts)
            for ty in (dom, cod):
                if not isinstance(ty, Base):
                    raise SignatureError(
                        f"line {lineno}: op {name} must map a base type to a base type")
                declared(lineno, ty)
            ops[name] = (dom, cod)
        elif head == "exception":
            name = ts.name("an exception name")
            fresh(lineno, name, "exception")
            ts.expect("of")
            ty = tp.type(ts)
            if not isinstance(ty, Base) or ty.name not in base_types:
                raise SignatureError(
                    f"line {lineno}: undeclared parameter type {ty} for exception {name}")
            exceptions[name] = ty
        elif head in ("axiom", "equation"):
            if ts.peek(1) is not None and ts.peek(1)[1] == ":":
                name = ts.name()
                ts.expect(":")
            elif head == "equation":
                raise ts.error("expected 'NAME :'")
            else:
                name = f"axiom{len(axioms) + 1}"
            fresh(lineno, name, head)
            eq = parse_equation_tokens(tp, ts)
            if head == "axiom":
                _check_axiom(Signature(tuple(base_types), ops, exceptions),
                             lineno, name, eq)
                axioms[name] = eq
            else:
                equations[name] = eq
                lines[name] = lineno
        elif head == "term":
            name = ts.name("a term name")
            fresh(lineno, name, "term")
            ts.expect("=")
            terms[name] = tp.term(ts)
            lines[name] = lineno
        else:
            ts.i -= 1
            raise ts.error("expected type, op, exception, axiom, equation or term")
        ts.expect_end()

    return Signature(tuple(base_types), dict(ops), dict(exceptions), dict(axioms),
                     dict(equations), dict(terms), frozenset(singletons), lines)


def _check_axiom(sig, lineno, name, eq):
    from .decoration import Decoration, infer

    if eq.strength is not Strength.STRONG:
        raise SignatureError(f"line {lineno}: axiom {name} must be strong")
    try:
        dl = typecheck(sig, eq.lhs)
        dr = typecheck(sig, eq.rhs)
        pure = (infer(sig, eq.lhs) is Decoration.PURE
                and infer(sig, eq.rhs) is Decoration.PURE)
    except (TypingError, DecorationError) as exc:
        raise SignatureError(f"line {lineno}: axiom {name}: {exc}") from None
    if not (same_type(sig, dl[0], dr[0]) and same_type(sig, dl[1], dr[1])):
        raise SignatureError(f"line {lineno}: axiom {name}: sides are not parallel")
    if not pure:
        raise SignatureError(f"line {lineno}: axiom {name}: both sides must be pure")


def format_signature(sig: Signature) -> str:
    lines = []
    for name in sig.base_types:
        lines.append(f"type {name} singleton" if name in sig.singletons else f"type {name}")
    for name, (dom, cod) in sig.ops.items():
        lines.append(f"op {name} : {dom} -> {cod}")
    for name, ty in sig.exceptions.items():
        lines.append(f"exception {name} of {ty}")
    for name, eq in sig.axioms.items():
        lines.append(f"axiom {name} : {eq} @ pure")
    for name, t in sig.terms.items():
        lines.append(f"term {name} = {format_term(t)}")
    for name, eq in sig.equations.items():
        lines.append(f"equation {name} : {eq} @ {eq.strength.value}")
    return "\n".join(lines) + "\n"
