"""Finite-set models and the catcher-form interpreter.

Every term is interpreted as a total table on ``X + Exc``, where ``Exc`` is
the disjoint union of the parameter carriers, enumerated in exception
declaration order and then payload order.
"""
from __future__ import annotations

import itertools
import json
import logging
import random
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from .errors import ModelError
from .syntax import (
    Base, Empty, Sum, Id, Op, Compose, Tag, Untag, EmptyMap, Downcast,
    CCotuple, DCotuple, Inl, Inr, SCotuple, Throw, Try, Equation, Strength,
    Signature, Term, elaborate, resolve,
)

log = logging.getLogger(__name__)

MUTATIONS = ("first-match-off",)


# --------------------------------------------------------------- values

@dataclass(frozen=True)
class Inj:
    """Ordinary value of a binary sum type."""
    side: str  # "inl" | "inr"
    value: object

    def __str__(self):
        return f"{self.side}({self.value})"


@dataclass(frozen=True)
class ExcValue:
    exc: str
    payload: object

    def __str__(self):
        return f"exc[{self.exc}]({self.payload})"


@dataclass(frozen=True)
class Ord:
    value: object

    def __str__(self):
        return f"ord({self.value})"


@dataclass(frozen=True)
class Exceptional:
    e: ExcValue

    def __str__(self):
        return str(self.e)


LiftedValue = Union[Ord, Exceptional]


def untag_value(exc: str, y: LiftedValue) -> LiftedValue:
    """The untagging function applied to an exceptional value."""
    if isinstance(y, Exceptional) and y.e.exc == exc:
        return Ord(y.e.payload)
    return y


@dataclass(frozen=True)
class FnTable:
    dom: object
    cod: object
    mapping: dict

    def __call__(self, x: LiftedValue) -> LiftedValue:
        return self.mapping[x]


# ---------------------------------------------------------------- model

@dataclass(frozen=True)
class Model:
    sig: Signature = field(compare=False, repr=False)
    carriers: dict          # base type -> tuple of tokens
    op_tables: dict         # op -> {token: token}
    name: str = field(default="", compare=False)
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def carrier(self, ty) -> list:
        """Ordinary values of ``ty``."""
        ty = resolve(self.sig, ty)
        match ty:
            case Base(name):
                return list(self.carriers[name])
            case Empty():
                return []
            case Sum(a, b):
                return ([Inj("inl", v) for v in self.carrier(a)]
                        + [Inj("inr", v) for v in self.carrier(b)])
        raise ModelError(f"no carrier for {ty}")

    @property
    def exc_values(self) -> tuple:
        if "exc" not in self._cache:
            self._cache["exc"] = tuple(
                Exceptional(ExcValue(e, v))
                for e, p in self.sig.exceptions.items()
                for v in self.carriers[p.name])
        return self._cache["exc"]

    def inputs(self, ty) -> list:
        """``ty + Exc`` in enumeration order: ordinary values first."""
        return [Ord(v) for v in self.carrier(ty)] + list(self.exc_values)


def build_model(sig: Signature, carriers: dict, op_tables: dict, name: str = "") -> Model:
    """Validate carriers and op tables against ``sig`` and its pure axioms."""
    carriers = {k: tuple(v) for k, v in carriers.items()}
    for ty in sig.base_types:
        if ty not in carriers:
            raise ModelError(f"missing carrier for type {ty}")
    for ty, values in carriers.items():
        if ty not in sig.base_types:
            raise ModelError(f"carrier for undeclared type {ty}")
        if len(set(values)) != len(values):
            raise ModelError(f"carrier of {ty} has repeated values")
        if ty in sig.singletons and len(values) != 1:
            raise ModelError(f"singleton type {ty} needs exactly one value")
    tables = {}
    for op, (dom, cod) in sig.ops.items():
        if op not in op_tables:
            raise ModelError(f"missing table for op {op}")
        table = dict(op_tables[op])
        dom_c, cod_c = carriers[dom.name], carriers[cod.name]
        missing = [v for v in dom_c if v not in table]
        if missing:
            raise ModelError(f"partial table for op {op}: no value at {missing[0]}")
        for k, v in table.items():
            if k not in dom_c:
                raise ModelError(f"op {op}: {k} is not in the carrier of {dom}")
            if v not in cod_c:
                raise ModelError(f"op {op}: {k} maps to {v}, not in the carrier of {cod}")
        tables[op] = table
    for op in op_tables:
        if op not in sig.ops:
            raise ModelError(f"table for undeclared op {op}")
    m = Model(sig, carriers, tables, name)
    for ax_name, eq in sig.axioms.items():
        verdict = check_equation(m, eq)
        if not verdict:
            raise ModelError(f"axiom {ax_name} fails: {verdict}")
    return m


# ----------------------------------------------------------- evaluation

def _propagating(m: Model, dom, cod, on_ord) -> FnTable:
    mapping = {Ord(v): on_ord(v) for v in m.carrier(dom)}
    for e in m.exc_values:
        mapping[e] = e
    return FnTable(dom, cod, mapping)


def eval_term(m: Model, t: Term) -> FnTable:
    """Catcher extension of ``t``'s interpretation, memoized per model."""
    cache = m._cache
    hit = cache.get(t)
    if hit is not None:
        return hit
    out = _eval(m, t)
    cache[t] = out
    return out


def _eval(m: Model, t: Term) -> FnTable:
    sig = m.sig
    match t:
        case Id(ty):
            ty = resolve(sig, ty)
            return _propagating(m, ty, ty, Ord)
        case Op(name):
            dom, cod = sig.ops[name]
            table = m.op_tables[name]
            return _propagating(m, dom, cod, lambda v: Ord(table[v]))
        case EmptyMap(ty):
            return _propagating(m, Empty(), resolve(sig, ty), Ord)
        case Inl(a, b):
            a, b = resolve(sig, a), resolve(sig, b)
            return _propagating(m, a, Sum(a, b), lambda v: Ord(Inj("inl", v)))
        case Inr(a, b):
            a, b = resolve(sig, a), resolve(sig, b)
            return _propagating(m, b, Sum(a, b), lambda v: Ord(Inj("inr", v)))
        case Tag(exc):
            p = sig.exceptions[exc]
            return _propagating(m, p, Empty(), lambda v: Exceptional(ExcValue(exc, v)))
        case Untag(exc):
            mapping = {e: untag_value(exc, e) for e in m.exc_values}
            return FnTable(Empty(), sig.exceptions[exc], mapping)
        case Compose(g, f):
            F, G = eval_term(m, f), eval_term(m, g)
            return FnTable(F.dom, G.cod, {x: G.mapping[y] for x, y in F.mapping.items()})
        case Downcast(k):
            K = eval_term(m, k)
            mapping = {x: (y if isinstance(x, Ord) else x) for x, y in K.mapping.items()}
            return FnTable(K.dom, K.cod, mapping)
        case CCotuple(comps):
            tables = {e: eval_term(m, f) for e, f in comps}
            mapping = {x: tables[x.e.exc](Ord(x.e.payload)) for x in m.exc_values}
            return FnTable(Empty(), next(iter(tables.values())).cod, mapping)
        case DCotuple(g, k):
            G, K = eval_term(m, g), eval_term(m, k)
            mapping = {x: (G(x) if isinstance(x, Ord) else K(x)) for x in G.mapping}
            return FnTable(G.dom, G.cod, mapping)
        case SCotuple(f, k):
            F, K = eval_term(m, f), eval_term(m, k)
            dom = Sum(F.dom, K.dom)
            mapping = {}
            for x in m.inputs(dom):
                if isinstance(x, Ord):
                    branch = F if x.value.side == "inl" else K
                    mapping[x] = branch(Ord(x.value.value))
                else:
                    mapping[x] = K(x)
            return FnTable(dom, F.cod, mapping)
        case Throw() | Try():
            return eval_term(m, elaborate(sig, t))
    raise TypeError(f"not a term: {t!r}")


def eval_try_operational(m: Model, f: FnTable, handlers: list, x: LiftedValue,
                         mutate: Optional[str] = None) -> LiftedValue:
    """try/catch by the step-by-step handling algorithm.

    ``handlers`` is a list of ``(exception, FnTable)``; the first matching
    occurrence wins. ``mutate="first-match-off"`` scans the list backwards
    and exists only to show that the cross-checks can fail."""
    if isinstance(x, Exceptional):
        return x
    y = f(x)
    if isinstance(y, Ord):
        return y
    scan = reversed(handlers) if mutate == "first-match-off" else handlers
    for exc, g in scan:
        z = untag_value(exc, y)
        if isinstance(z, Ord):
            return g(z)
    return y


def eval_try_compositional(m: Model, f: FnTable, handlers: list,
                           x: LiftedValue) -> LiftedValue:
    """try/catch as ``[inn | k_1] . f`` with ``k_p = [g_p | k_{p+1}] . c_{i_p}``
    and ``k_{n+1}`` the inclusion of exceptions."""

    def k(p: int, e: Exceptional) -> LiftedValue:
        if p == len(handlers):
            return e
        exc, g = handlers[p]
        z = untag_value(exc, e)
        return g(z) if isinstance(z, Ord) else k(p + 1, z)

    if isinstance(x, Exceptional):
        return x
    y = f(x)
    return y if isinstance(y, Ord) else k(0, y)


# ------------------------------------------------------------- checking

@dataclass(frozen=True)
class Verdict:
    holds: bool
    strength: Strength = Strength.STRONG
    witness: Optional[LiftedValue] = None

    def __bool__(self):
        return self.holds

    def __str__(self):
        if self.holds:
            return "holds"
        return f"{self.strength.value}-fail at {self.witness}"


def check_equation(m: Model, eq: Equation) -> Verdict:
    """Strong: compare on ``X + Exc``; weak: on ordinary inputs only."""
    L, R = eval_term(m, eq.lhs), eval_term(m, eq.rhs)
    for x, y in L.mapping.items():
        if eq.strength is Strength.WEAK and not isinstance(x, Ord):
            continue
        if R.mapping[x] != y:
            return Verdict(False, eq.strength, x)
    return Verdict(True, eq.strength)


def propagates(m: Model, t: Term) -> bool:
    table = eval_term(m, t)
    return all(table(e) == e for e in m.exc_values)


def is_pure_in(m: Model, t: Term) -> bool:
    """Every ordinary input is mapped to an ordinary output."""
    table = eval_term(m, t)
    return all(isinstance(y, Ord) for x, y in table.mapping.items() if isinstance(x, Ord))


# ---------------------------------------------------------- enumeration

def _token(ty: str, k: int) -> str:
    return f"{ty.lower()}{k}"


def enumerate_models(sig: Signature, max_carrier: int, seed: int = 0,
                     exhaustive_limit: int = 16, samples: int = 4) -> Iterator[Model]:
    """Deterministic stream of valid models with carriers of size <= max_carrier.

    Carrier sizes run over every assignment in lexicographic order. Op tables
    are enumerated exhaustively when there are at most ``exhaustive_limit``
    combinations, else ``samples`` seeded random draws are taken."""
    rng = random.Random(seed)
    types = list(sig.base_types)
    ranges = [[1] if t in sig.singletons else range(max_carrier + 1) for t in types]
    ops = list(sig.ops.items())
    count = rejected = 0
    for sizes in itertools.product(*ranges):
        carriers = {t: tuple(_token(t, k) for k in range(n)) for t, n in zip(types, sizes)}
        choices = []
        for _, (dom, cod) in ops:
            d, c = carriers[dom.name], carriers[cod.name]
            choices.append((d, c))
        total = 1
        for d, c in choices:
            total *= len(c) ** len(d)
        if total == 0:
            continue
        if total <= exhaustive_limit:
            per_op = [itertools.product(c, repeat=len(d)) for d, c in choices]
            combos = itertools.product(*per_op)
        else:
            combos = [tuple(tuple(rng.choice(c) for _ in d) for d, c in choices)
                      for _ in range(samples)]
        for combo in combos:
            tables = {name: dict(zip(d, outs))
                      for (name, _), (d, _c), outs in zip(ops, choices, combo)}
            try:
                m = build_model(sig, carriers, tables, name=f"m{count}")
            except ModelError:
                rejected += 1
                continue
            count += 1
            yield m
    if count == 0:
        log.warning("no model satisfies the axioms with carriers <= %d", max_carrier)
    elif rejected:
        log.info("%d candidate models rejected by axioms", rejected)


# ----------------------------------------------------------------- json

def model_to_json(m: Model) -> str:
    doc = {"carriers": {k: list(v) for k, v in m.carriers.items()},
           "ops": {k: dict(v) for k, v in m.op_tables.items()}}
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def model_from_json(sig: Signature, text: str, name: str = "") -> Model:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ModelError(f"model file is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or set(doc) - {"carriers", "ops"}:
        raise ModelError('model file must be {"carriers": ..., "ops": ...}')
    return build_model(sig, doc.get("carriers", {}), doc.get("ops", {}), name)
