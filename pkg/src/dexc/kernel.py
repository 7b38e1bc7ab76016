"""LCF-style kernel for decorated equations.

A :class:`Judgment` can only be obtained from :func:`apply_rule`; every rule
checks typing and decoration side conditions before producing one. Terms are
compared structurally in canonical form (see :func:`dexc.syntax.canonical`).
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable, Optional

from .decoration import PURE, PPG, infer
from .errors import (
    DecorationError, KernelError, ParseError, TypingError,
)
from .parser import TermParser, TokenStream, parse_equation_tokens, tokenize
from .syntax import (
    EMPTY, Id, Compose, Tag, Untag, EmptyMap, Downcast, CCotuple,
    DCotuple, Inl, Inr, SCotuple, Equation, Strength, Signature, canonical,
    format_term, resolve, typecheck,
)

STRONG, WEAK = Strength.STRONG, Strength.WEAK
_KERNEL = object()


class Judgment:
    """A derived decorated equation. Immutable; built by the kernel only."""

    __slots__ = ("equation", "dom", "cod")

    def __init__(self, equation: Equation, dom, cod, *, _key=None):
        if _key is not _KERNEL:
            raise KernelError("judgments can only be produced by applying a rule")
        object.__setattr__(self, "equation", equation)
        object.__setattr__(self, "dom", dom)
        object.__setattr__(self, "cod", cod)

    def __setattr__(self, name, value):
        raise AttributeError("Judgment is immutable")

    @property
    def lhs(self):
        return self.equation.lhs

    @property
    def rhs(self):
        return self.equation.rhs

    @property
    def strength(self) -> Strength:
        return self.equation.strength

    def __eq__(self, other):
        return isinstance(other, Judgment) and self.equation == other.equation

    def __hash__(self):
        return hash(self.equation)

    def __repr__(self):
        return f"Judgment({self.equation})"

    def __str__(self):
        return str(self.equation)


def _types(sig, t):
    dom, cod = typecheck(sig, t)
    return resolve(sig, dom), resolve(sig, cod)


def _judge(sig: Signature, lhs, rhs, strength: Strength) -> Judgment:
    lhs, rhs = canonical(sig, lhs), canonical(sig, rhs)
    lt, rt = _types(sig, lhs), _types(sig, rhs)
    if lt != rt:
        raise KernelError(f"sides are not parallel: {lhs} : {lt[0]} -> {lt[1]} "
                          f"vs {rhs} : {rt[0]} -> {rt[1]}")
    infer(sig, lhs), infer(sig, rhs)
    return Judgment(Equation(lhs, rhs, strength), lt[0], lt[1], _key=_KERNEL)


def _need(cond, msg):
    if not cond:
        raise KernelError(msg)


def _strength(p: Judgment, want: Strength, role="premise"):
    _need(p.strength is want, f"{role} must be a {want.value} equation, got {p}")


def _deco_at_most(sig, t, level, what):
    d = infer(sig, t)
    if d > level:
        names = {PURE: "pure", PPG: "a propagator"}
        raise KernelError(f"{what} must be {names[level]}, but {t} is {d.label}")


@dataclass(frozen=True)
class Rule:
    name: str
    premises: object        # int, or "family" for one premise per exception
    args: tuple             # kinds: "term" | "exc" | "axiom"
    apply: Callable = field(repr=False)
    doc: str = ""


RULES: dict = {}


def rule(name, premises=0, args=(), doc=""):
    def register(fn):
        RULES[name] = Rule(name, premises, tuple(args), fn, doc)
        return fn
    return register


# ---- decorated monadic equational logic

@rule("unit-right", args=("term",), doc="f . id == f")
def _unit_right(sig, ps, f):
    dom, _ = _types(sig, f)
    return Compose(f, Id(dom)), f, STRONG


@rule("unit-left", args=("term",), doc="id . f == f")
def _unit_left(sig, ps, f):
    _, cod = _types(sig, f)
    return Compose(Id(cod), f), f, STRONG


@rule("assoc", args=("term", "term", "term"), doc="h . (g . f) == (h . g) . f")
def _assoc(sig, ps, h, g, f):
    return Compose(h, Compose(g, f)), Compose(Compose(h, g), f), STRONG


@rule("ppg-weak-to-strong", 1, doc="f ~~ g with f, g propagators gives f == g")
def _ppg_w2s(sig, ps):
    (p,) = ps
    _strength(p, WEAK)
    _deco_at_most(sig, p.lhs, PPG, "left side")
    _deco_at_most(sig, p.rhs, PPG, "right side")
    return p.lhs, p.rhs, STRONG


@rule("strong-to-weak", 1)
def _s2w(sig, ps):
    (p,) = ps
    _strength(p, STRONG)
    return p.lhs, p.rhs, WEAK


def _refl(strength):
    def fn(sig, ps, f):
        return f, f, strength
    return fn


def _sym(strength):
    def fn(sig, ps):
        (p,) = ps
        _strength(p, strength)
        return p.rhs, p.lhs, strength
    return fn


def _trans(strength):
    def fn(sig, ps):
        p, q = ps
        _strength(p, strength, "first premise")
        _strength(q, strength, "second premise")
        _need(p.rhs == q.lhs, f"premises do not chain: {p.rhs} vs {q.lhs}")
        return p.lhs, q.rhs, strength
    return fn


for _s in (STRONG, WEAK):
    rule(f"refl-{_s.value}", args=("term",))(_refl(_s))
    rule(f"sym-{_s.value}", 1)(_sym(_s))
    rule(f"trans-{_s.value}", 2)(_trans(_s))


@rule("strong-subst", 1, ("term",), doc="g1 == g2 gives g1 . f == g2 . f")
def _strong_subst(sig, ps, f):
    (p,) = ps
    _strength(p, STRONG)
    return Compose(p.lhs, f), Compose(p.rhs, f), STRONG


@rule("strong-repl", 1, ("term",), doc="f1 == f2 gives g . f1 == g . f2")
def _strong_repl(sig, ps, g):
    (p,) = ps
    _strength(p, STRONG)
    return Compose(g, p.lhs), Compose(g, p.rhs), STRONG


@rule("weak-subst", 1, ("term",), doc="g1 ~~ g2 and f pure gives g1 . f ~~ g2 . f")
def _weak_subst(sig, ps, f):
    (p,) = ps
    _strength(p, WEAK)
    _deco_at_most(sig, f, PURE, "substituted factor")
    return Compose(p.lhs, f), Compose(p.rhs, f), WEAK


@rule("weak-repl", 1, ("term",), doc="f1 ~~ f2 gives g . f1 ~~ g . f2")
def _weak_repl(sig, ps, g):
    (p,) = ps
    _strength(p, WEAK)
    return Compose(g, p.lhs), Compose(g, p.rhs), WEAK


# ---- empty type and constitutive coproduct

@rule("weak-initiality", args=("term",), doc="f : 0 -> Y gives f ~~ empty[Y]")
def _weak_initiality(sig, ps, f):
    dom, cod = _types(sig, f)
    _need(dom == EMPTY, f"{f} does not have domain 0")
    return f, EmptyMap(cod), WEAK


@rule("ccotuple-beta", args=("term", "exc"), doc="ccot{...} . tag[E] ~~ f_E")
def _ccot_beta(sig, ps, k, exc):
    _need(isinstance(k, CCotuple), f"{k} is not a constitutive cotuple")
    comps = dict(k.components)
    _need(exc in comps, f"unknown exception {exc}")
    return Compose(k, Tag(exc)), comps[exc], WEAK


@rule("ccotuple-uniqueness", "family",
      doc="f . tag[E] ~~ f_E for every E gives f == ccot{E => f_E}")
def _ccot_unique(sig, ps):
    excs = list(sig.exceptions)
    _need(excs, "no exceptions declared")
    f = None
    comps = []
    for exc, p in zip(excs, ps):
        _strength(p, WEAK, f"premise for {exc}")
        lhs = p.lhs
        _need(isinstance(lhs, Compose) and lhs.f == Tag(exc),
              f"premise for {exc} must have the form f . tag[{exc}], got {lhs}")
        if f is None:
            f = lhs.g
        _need(lhs.g == f, f"premises disagree on f: {f} vs {lhs.g}")
        _deco_at_most(sig, p.rhs, PPG, f"component {exc}")
        comps.append((exc, p.rhs))
    return f, CCotuple(tuple(comps)), STRONG


# ---- downcast and the decorated coproduct X = X + 0

@rule("downcast-weak", args=("term",), doc="down(k) ~~ k")
def _downcast_weak(sig, ps, k):
    return Downcast(k), k, WEAK


def _as_dcot(t):
    _need(isinstance(t, DCotuple), f"{t} is not a decorated cotuple dcot(g | k)")
    return t


@rule("dcot-weak", args=("term",), doc="dcot(g | k) ~~ g")
def _dcot_weak(sig, ps, d):
    return d, _as_dcot(d).g, WEAK


@rule("dcot-beta", args=("term",), doc="dcot(g | k) . empty[X] == k")
def _dcot_beta(sig, ps, d):
    dom, _ = _types(sig, _as_dcot(d))
    return Compose(d, EmptyMap(dom)), d.k, STRONG


@rule("dcot-uniqueness", 2,
      doc="f ~~ g and f . empty[X] == k gives f == dcot(g | k)")
def _dcot_unique(sig, ps):
    p, q = ps
    _strength(p, WEAK, "first premise")
    _strength(q, STRONG, "second premise")
    f, g = p.lhs, p.rhs
    dom, _ = _types(sig, f)
    _need(q.lhs == Compose(f, EmptyMap(dom)),
          f"second premise must start with {Compose(f, EmptyMap(dom))}, got {q.lhs}")
    _deco_at_most(sig, g, PPG, "ordinary branch")
    return f, DCotuple(g, q.rhs), STRONG


# ---- binary coproducts

def _as_scot(sig, t):
    _need(isinstance(t, SCotuple), f"{t} is not a cotuple scot(f | k)")
    dom, _ = _types(sig, t)
    return t, dom.left, dom.right


@rule("scot-weak-left", args=("term",), doc="scot(f | k) . inl ~~ f")
def _scot_weak_left(sig, ps, s):
    s, a, b = _as_scot(sig, s)
    return Compose(s, Inl(a, b)), s.f, WEAK


@rule("scot-strong-right", args=("term",), doc="scot(f | k) . inr == k")
def _scot_strong_right(sig, ps, s):
    s, a, b = _as_scot(sig, s)
    return Compose(s, Inr(a, b)), s.k, STRONG


def _scot_unique(level, first):
    def fn(sig, ps):
        p, q = ps
        _strength(p, first, "first premise")
        _strength(q, STRONG, "second premise")
        _need(isinstance(p.lhs, Compose) and isinstance(p.lhs.f, Inl),
              f"first premise must have the form u . inl[A, B], got {p.lhs}")
        u, inl = p.lhs.g, p.lhs.f
        want = Compose(u, Inr(inl.left, inl.right))
        _need(q.lhs == want, f"second premise must start with {want}, got {q.lhs}")
        _deco_at_most(sig, p.rhs, level, "left component")
        if level is PURE:
            _deco_at_most(sig, q.rhs, PURE, "right component")
        return u, SCotuple(p.rhs, q.rhs), STRONG
    return fn


rule("scot-uniqueness", 2,
     doc="u . inl ~~ f and u . inr == k gives u == scot(f | k)")(_scot_unique(PPG, WEAK))
rule("pure-cotuple-uniqueness", 2,
     doc="pure f, k: u . inl == f and u . inr == k gives u == scot(f | k)")(
    _scot_unique(PURE, STRONG))


@rule("pure-cotuple-beta-left", args=("term",), doc="pure f, k: scot(f | k) . inl == f")
def _pure_beta_left(sig, ps, s):
    s, a, b = _as_scot(sig, s)
    _deco_at_most(sig, s.f, PURE, "left component")
    _deco_at_most(sig, s.k, PURE, "right component")
    return Compose(s, Inl(a, b)), s.f, STRONG


@rule("pure-cotuple-beta-right", args=("term",), doc="pure f, k: scot(f | k) . inr == k")
def _pure_beta_right(sig, ps, s):
    s, a, b = _as_scot(sig, s)
    _deco_at_most(sig, s.f, PURE, "left component")
    _deco_at_most(sig, s.k, PURE, "right component")
    return Compose(s, Inr(a, b)), s.k, STRONG


@rule("ppg-cotuple-beta-left", args=("term",),
      doc="propagators f, k: scot(f | k) . inl == f")
def _ppg_beta_left(sig, ps, s):
    s, a, b = _as_scot(sig, s)
    _deco_at_most(sig, s.f, PPG, "left component")
    _deco_at_most(sig, s.k, PPG, "right component")
    return Compose(s, Inl(a, b)), s.f, STRONG


@rule("ppg-downcast-collapse", args=("term",),
      doc="propagator k: down(scot(f | k)) == scot(f | k)")
def _ppg_down_collapse(sig, ps, s):
    s, _, _ = _as_scot(sig, s)
    _deco_at_most(sig, s.k, PPG, "right component")
    return Downcast(s), s, STRONG


# ---- axioms

@rule("axm-untag-tag", args=("exc",), doc="untag[E] . tag[E] ~~ id[P[E]]")
def _axm_untag_tag(sig, ps, exc):
    return Compose(Untag(exc), Tag(exc)), Id(sig.param(exc)), WEAK


@rule("axm-untag-other", args=("exc", "exc"),
      doc="untag[E] . tag[F] ~~ empty[P[E]] . tag[F] for E != F")
def _axm_untag_other(sig, ps, e, f):
    _need(e != f, f"axm-untag-other needs two distinct exceptions, got {e} twice")
    return Compose(Untag(e), Tag(f)), Compose(EmptyMap(sig.param(e)), Tag(f)), WEAK


@rule("axm-pure", args=("axiom",), doc="a pure axiom of the signature")
def _axm_pure(sig, ps, name):
    _need(name in sig.axioms, f"unknown axiom {name}")
    eq = sig.axioms[name]
    return eq.lhs, eq.rhs, STRONG


def apply_rule(sig: Signature, name: str, premises=(), params=()) -> Judgment:
    """Apply catalog rule ``name``; raises KernelError on rejection."""
    if name not in RULES:
        raise KernelError(f"unknown rule {name}")
    r = RULES[name]
    premises = list(premises)
    arity = len(sig.exceptions) if r.premises == "family" else r.premises
    if len(premises) != arity:
        raise KernelError(f"{name} takes {arity} premise(s), got {len(premises)}")
    if len(params) != len(r.args):
        raise KernelError(f"{name} takes {len(r.args)} argument(s), got {len(params)}")
    for p in premises:
        if not isinstance(p, Judgment):
            raise KernelError(f"premise {p!r} is not a judgment")
    args = []
    try:
        for kind, value in zip(r.args, params):
            if kind == "term":
                value = canonical(sig, value)
                typecheck(sig, value)
                infer(sig, value)
            elif kind == "exc":
                sig.param(value)
            args.append(value)
        lhs, rhs, strength = r.apply(sig, premises, *args)
        return _judge(sig, lhs, rhs, strength)
    except (TypingError, DecorationError) as exc:
        raise KernelError(str(exc)) from None


# --------------------------------------------------------------- proofs

@dataclass(frozen=True)
class Step:
    name: str
    rule: str
    args: tuple = ()
    premises: tuple = ()


@dataclass(frozen=True)
class Proof:
    goal: Equation
    steps: tuple
    qed: str
    header: tuple = ()


@dataclass
class ProofResult:
    ok: bool
    judgment: Optional[Judgment] = None
    step: Optional[str] = None
    reason: str = ""
    judgments: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok

    def __str__(self):
        if self.ok:
            return f"qed: {self.judgment}"
        return f"rejected at step {self.step}: {self.reason}"


def check_proof(sig: Signature, proof: Proof) -> ProofResult:
    """Replay every step through the kernel and compare with the goal."""
    done: dict = {}
    for st in proof.steps:
        if st.name in done:
            return ProofResult(False, step=st.name, reason="duplicate step name",
                               judgments=done)
        try:
            missing = [p for p in st.premises if p not in done]
            if missing:
                raise KernelError(f"premise {missing[0]} is not an earlier step")
            done[st.name] = apply_rule(sig, st.rule, [done[p] for p in st.premises], st.args)
        except KernelError as exc:
            return ProofResult(False, step=st.name, reason=f"{st.rule}: {exc}",
                               judgments=done)
    if proof.qed not in done:
        return ProofResult(False, step=proof.qed, reason="qed names no step",
                           judgments=done)
    final = done[proof.qed]
    try:
        goal = Equation(canonical(sig, proof.goal.lhs), canonical(sig, proof.goal.rhs),
                        proof.goal.strength)
    except TypingError as exc:
        return ProofResult(False, step="goal", reason=str(exc), judgments=done)
    if final.strength is not goal.strength:
        return ProofResult(False, final, proof.qed,
                           f"strength mismatch: step proves a {final.strength.value} "
                           f"equation, goal is {goal.strength.value}", done)
    if (final.lhs, final.rhs) != (goal.lhs, goal.rhs):
        return ProofResult(False, final, proof.qed,
                           f"step proves {final}, goal is {goal}", done)
    return ProofResult(True, final, proof.qed, judgments=done)


# ------------------------------------------------------------ .prf files

_STEP = re.compile(r"step\s+([A-Za-z_]\w*)\s*=\s*([a-z][a-z0-9-]*)")


def parse_proof(sig: Signature, text: str) -> Proof:
    """Read a ``.prf`` proof file::

        # leading comment lines form the header
        goal LHS == RHS
        step s1 = rule(arg, ...) from s0, ...
        qed s1
    """
    tp = TermParser(sig.ops, sig.terms)
    header, steps = [], []
    goal = qed = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if goal is None and not steps:
                header.append(line[1:].strip())
            continue
        if line.startswith("goal"):
            if goal is not None:
                raise ParseError("second goal", lineno, 1)
            ts = TokenStream(tokenize(raw[raw.index("goal") + 4:].split("#")[0],
                                      lineno, raw.index("goal") + 4), lineno)
            goal = parse_equation_tokens(tp, ts)
            ts.expect_end()
        elif line.startswith("step"):
            steps.append(_parse_step(tp, raw, lineno))
        elif line.startswith("qed"):
            parts = line.split("#")[0].split()
            if len(parts) != 2:
                raise ParseError("expected 'qed STEP'", lineno, 1)
            qed = parts[1]
        else:
            raise ParseError("expected goal, step or qed", lineno, 1)
    if goal is None:
        raise ParseError("proof has no goal")
    if qed is None:
        raise ParseError("proof has no qed line")
    return Proof(goal, tuple(steps), qed, tuple(header))


def _parse_step(tp, raw, lineno) -> Step:
    body = raw.split("#")[0]
    start = len(body) - len(body.lstrip())
    m = _STEP.match(body, start)
    if m is None:
        raise ParseError("expected 'step NAME = RULE(...)'", lineno, start + 1)
    name, rname = m.group(1), m.group(2)
    if rname not in RULES:
        raise ParseError(f"unknown rule {rname}", lineno, m.start(2) + 1)
    kinds = RULES[rname].args
    ts = TokenStream(tokenize(body[m.end():], lineno, m.end()), lineno)
    args = []
    if ts.accept("("):
        for i, kind in enumerate(kinds):
            if i:
                ts.expect(",")
            args.append(tp.term(ts) if kind == "term" else ts.name(f"an {kind} name"))
        ts.expect(")")
    elif kinds:
        raise ts.error(f"{rname} expects {len(kinds)} argument(s)")
    premises = []
    if ts.accept("from"):
        premises.append(ts.name("a step name"))
        while ts.accept(","):
            premises.append(ts.name("a step name"))
    ts.expect_end()
    return Step(name, rname, tuple(args), tuple(premises))


def format_proof(proof: Proof) -> str:
    lines = [f"# {h}".rstrip() for h in proof.header]
    lines.append(f"goal {proof.goal}")
    for st in proof.steps:
        text = f"step {st.name} = {st.rule}"
        if st.args:
            text += "(" + ", ".join(
                a if isinstance(a, str) else format_term(a) for a in st.args) + ")"
        if st.premises:
            text += " from " + ", ".join(st.premises)
        lines.append(text)
    lines.append(f"qed {proof.qed}")
    return "\n".join(lines) + "\n"
