"""Random signatures, well-typed random terms and the per-model cross-checks."""
from __future__ import annotations

import itertools
import random
from typing import NamedTuple

from .decoration import PPG, PURE, infer
from .errors import ModelError
from .semantics import (
    build_model, check_equation, enumerate_models, eval_term,
    eval_try_compositional, eval_try_operational, is_pure_in, propagates,
    _token,
)
from .syntax import (
    Base, EMPTY, Sum, Id, Op, Compose, Tag, Untag, EmptyMap, Downcast,
    CCotuple, DCotuple, Inl, Inr, SCotuple, Throw, Try, Equation, Strength,
    Signature, elaborate, resolve,
)

MAX_DEPTH = 6


def make_rng(seed) -> random.Random:
    return random.Random(seed)


def random_signature(rng: random.Random, max_types=3, max_exceptions=3, max_ops=3,
                     min_exceptions=1) -> Signature:
    types = tuple(f"T{k}" for k in range(rng.randint(1, max_types)))
    ops = {}
    for k in range(rng.randint(0, max_ops)):
        ops[f"op{k}"] = (Base(rng.choice(types)), Base(rng.choice(types)))
    exceptions = {f"E{k + 1}": Base(rng.choice(types))
                  for k in range(rng.randint(min_exceptions, max_exceptions))}
    return Signature(base_types=types, ops=ops, exceptions=exceptions)


def random_model(sig: Signature, rng: random.Random, max_carrier: int, name: str):
    """One random model, or None when the draw violates an axiom."""
    carriers = {}
    for t in sig.base_types:
        n = 1 if t in sig.singletons else rng.randint(0, max_carrier)
        carriers[t] = tuple(_token(t, k) for k in range(n))
    tables = {}
    for op, (dom, cod) in sig.ops.items():
        d, c = carriers[dom.name], carriers[cod.name]
        if d and not c:
            return None
        tables[op] = {v: rng.choice(c) for v in d}
    try:
        return build_model(sig, carriers, tables, name)
    except ModelError:
        return None


def sample_models(sig: Signature, count: int, max_carrier: int, seed: int) -> list:
    """Enumerated models first, then seeded random ones up to ``count``."""
    out = list(itertools.islice(enumerate_models(sig, max_carrier, seed), count))
    rng = random.Random(seed)
    attempts = 0
    while len(out) < count and attempts < 50 * count:
        attempts += 1
        m = random_model(sig, rng, max_carrier, f"m{len(out)}")
        if m is not None:
            out.append(m)
    return out


class TermGenerator:
    """Type-directed generator of well-typed, well-decorated terms.

    Types are drawn from a small pool: the base types, ``0`` and one sum.
    """

    def __init__(self, sig: Signature, rng: random.Random, max_depth: int = MAX_DEPTH):
        self.sig = sig
        self.rng = rng
        self.max_depth = max_depth
        bases = [Base(t) for t in sig.base_types]
        self.pool = bases + [EMPTY, Sum(bases[0], bases[-1])]
        self.excs = list(sig.exceptions)
        self.params = {e: resolve(sig, p) for e, p in sig.exceptions.items()}

    def _atoms(self, dom, cod, ppg_only):
        out = []
        if dom == cod:
            out.append(Id(dom))
        for name, (d, c) in self.sig.ops.items():
            if d == dom and c == cod:
                out.append(Op(name))
        if dom == EMPTY:
            out.append(EmptyMap(cod))
        for e in self.excs:
            p = self.params[e]
            if dom == EMPTY and cod == p and not ppg_only:
                out.append(Untag(e))
            if cod == EMPTY and dom == p:
                out.append(Tag(e))
            if dom == p:
                out.append(Throw(e, cod))
        if isinstance(cod, Sum):
            if dom == cod.left:
                out.append(Inl(cod.left, cod.right))
            if dom == cod.right:
                out.append(Inr(cod.left, cod.right))
        return out

    def gen(self, dom, cod, depth, ppg_only=False):
        """A term ``dom -> cod`` of height <= depth, or None."""
        atoms = self._atoms(dom, cod, ppg_only)
        if depth <= 1 or (atoms and self.rng.random() < 0.3):
            return self.rng.choice(atoms) if atoms else None
        builders = ["compose", "compose", "down"]
        if self.excs:
            builders.append("try")
            if not ppg_only:
                builders.append("dcot")
                if dom == EMPTY:
                    builders.append("ccot")
        if isinstance(dom, Sum):
            builders.append("scot")
        self.rng.shuffle(builders)
        d = depth - 1
        for b in builders:
            t = self._build(b, dom, cod, d, ppg_only)
            if t is not None:
                return t
        return self.rng.choice(atoms) if atoms else None

    def _build(self, kind, dom, cod, d, ppg_only):
        g = self.gen
        if kind == "compose":
            mid = self.rng.choice(self.pool)
            f = g(dom, mid, d, ppg_only)
            h = g(mid, cod, d, ppg_only) if f is not None else None
            return Compose(h, f) if h is not None else None
        if kind == "down":
            k = g(dom, cod, d)
            return Downcast(k) if k is not None else None
        if kind == "try":
            f = g(dom, cod, d, True)
            if f is None:
                return None
            handlers = []
            for _ in range(self.rng.randint(1, 3)):
                e = self.rng.choice(self.excs)
                h = g(self.params[e], cod, d, True)
                if h is None:
                    return None
                handlers.append((e, h))
            return Try(f, tuple(handlers))
        if kind == "dcot":
            p = g(dom, cod, d, True)
            k = g(EMPTY, cod, d) if p is not None else None
            return DCotuple(p, k) if k is not None else None
        if kind == "ccot":
            comps = []
            for e in self.excs:
                f = g(self.params[e], cod, d, True)
                if f is None:
                    return None
                comps.append((e, f))
            return CCotuple(tuple(comps))
        if kind == "scot":
            f = g(dom.left, cod, d, True)
            k = g(dom.right, cod, d, ppg_only) if f is not None else None
            return SCotuple(f, k) if k is not None else None
        raise ValueError(kind)

    def term(self, ppg_only=False, tries=200):
        for _ in range(tries):
            dom, cod = self.rng.choice(self.pool), self.rng.choice(self.pool)
            t = self.gen(dom, cod, self.rng.randint(1, self.max_depth), ppg_only)
            if t is not None:
                return t
        raise RuntimeError("term generator found no inhabited type pair")

    def terms(self, n):
        return [self.term() for _ in range(n)]

    def try_cases(self, n):
        """``n`` try cases with propagator body and handlers, at most 3 handlers."""
        out = []
        while len(out) < n:
            dom, cod = self.rng.choice(self.pool), self.rng.choice(self.pool)
            f = self.gen(dom, cod, self.max_depth - 2, True)
            if f is None:
                continue
            handlers = []
            for _ in range(self.rng.randint(1, 3)):
                e = self.rng.choice(self.excs)
                h = self.gen(self.params[e], cod, self.max_depth - 2, True)
                if h is None:
                    break
                handlers.append((e, h))
            else:
                out.append(TryCase.of(self.sig, f, handlers))
        return out

    def ppg_pairs(self, pool):
        """Parallel propagator pairs from a prepared pool: each term with its
        downcast, with ``id . t`` and with every later term of the same type."""
        sig = self.sig
        typed = [(t, e, _types(sig, t)) for t, e, d in pool if d <= PPG]
        pairs = []
        for n, (t, e, (dom, cod)) in enumerate(typed):
            pairs.append((t, Downcast(t), e, Downcast(e)))
            pairs.append((t, Compose(Id(cod), t), e, Compose(Id(cod), e)))
            for u, eu, ty in typed[n + 1:]:
                if ty == (dom, cod):
                    pairs.append((t, u, e, eu))
        return pairs


def _types(sig, t):
    from .syntax import typecheck
    dom, cod = typecheck(sig, t)
    return resolve(sig, dom), resolve(sig, cod)


# ---------------------------------------------------------------- checks

class TryCase(NamedTuple):
    f: object
    handlers: tuple
    body: object        # the rest are elaborated once, up front
    arms: tuple
    direct: object

    @classmethod
    def of(cls, sig, f, handlers):
        handlers = tuple(handlers)
        return cls(f, handlers, elaborate(sig, f),
                   tuple((e, elaborate(sig, g)) for e, g in handlers),
                   elaborate(sig, Try(f, handlers)))


def try_agreement(m, case: TryCase, mutate=None):
    """First input where the three try evaluators disagree, as a witness string."""
    F = eval_term(m, case.body)
    hs = [(e, eval_term(m, g)) for e, g in case.arms]
    direct = eval_term(m, case.direct)
    for x in F.mapping:
        a = eval_try_operational(m, F, hs, x, mutate)
        b = eval_try_compositional(m, F, hs, x)
        c = direct(x)
        if not a == b == c:
            return (f"{Try(case.f, case.handlers)} at {x}: "
                    f"operational={a} compositional={b} elaborated={c}"), len(F.mapping)
    return None, len(F.mapping)


def check_try_agreement(m, cases, mutate=None):
    failures, n = [], 0
    for case in cases:
        witness, k = try_agreement(m, case, mutate)
        n += k
        if witness:
            failures.append(witness)
    return failures, n


def prepare(sig, terms):
    """Pair each term with its elaboration and decoration."""
    return [(t, elaborate(sig, t), infer(sig, t)) for t in terms]


def check_propagation(m, pool):
    failures, n = [], 0
    for t, e, d in pool:
        if d <= PPG:
            n += 1
            if not propagates(m, e):
                failures.append(f"{t} does not propagate")
    return failures, n


def check_purity(m, pool):
    failures, n = [], 0
    for t, e, d in pool:
        if d is PURE:
            n += 1
            if not is_pure_in(m, e):
                failures.append(f"{t} maps an ordinary value to an exception")
    return failures, n


def check_weak_strong(m, pairs):
    """Weak equality of two propagators must imply strong equality.

    ``pairs`` holds (t, u, elaborated t, elaborated u)."""
    failures, n = [], 0
    for t, u, et, eu in pairs:
        if check_equation(m, Equation(et, eu, Strength.WEAK)):
            n += 1
            v = check_equation(m, Equation(et, eu, Strength.STRONG))
            if not v:
                failures.append(f"{t} ~~ {u} but {v}")
    return failures, n
