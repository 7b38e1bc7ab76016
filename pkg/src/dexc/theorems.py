"""Kernel proof scripts for the exception laws, plus the soundness harness.

Every script is produced by a builder that replays each step through the
kernel as it is added, so a script that builds is a script that checks.
Scripts are generic in the signature: the case splits over exceptions are
unfolded for whatever exceptions are declared.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path

from .decoration import PPG, infer
from .errors import DecorationError, KernelError
from .kernel import Proof, Step, apply_rule, check_proof, format_proof
from .syntax import (
    EMPTY, Id, Compose, Tag, Untag, EmptyMap, Downcast, DCotuple, Inl,
    Inr, SCotuple, Throw, Try, Equation, Strength, Signature, canonical,
    resolve, typecheck,
)

STRONG, WEAK = Strength.STRONG, Strength.WEAK
C = Compose


class ProofBuilder:
    def __init__(self, sig: Signature):
        self.sig = sig
        self.steps: list = []
        self.judgments: dict = {}

    def add(self, rule: str, *args, frm=()) -> str:
        name = f"s{len(self.steps) + 1}"
        j = apply_rule(self.sig, rule, [self.judgments[p] for p in frm], args)
        self.steps.append(Step(name, rule, tuple(args), tuple(frm)))
        self.judgments[name] = j
        return name

    def __getitem__(self, name):
        return self.judgments[name]

    def flip(self, name: str) -> str:
        j = self[name]
        return self.add(f"sym-{j.strength.value}", frm=[name])

    def weaken(self, name: str) -> str:
        return self.add("strong-to-weak", frm=[name]) if self[name].strength is STRONG else name

    def chain(self, *names, start=None) -> str:
        """Transitivity chain: orient each step to continue from the previous
        right-hand side, weaken strong links if any link is weak, fold."""
        cur = canonical(self.sig, start) if start is not None else self[names[0]].lhs
        weak = any(self[n].strength is WEAK for n in names)
        links = []
        for n in names:
            j = self[n]
            if j.lhs == cur:
                pass
            elif j.rhs == cur:
                n = self.flip(n)
            else:
                raise KernelError(f"chain breaks at {n}: {self[n]} does not continue from {cur}")
            if weak:
                n = self.weaken(n)
            links.append(n)
            cur = self[n].rhs
        acc = links[0]
        for n in links[1:]:
            acc = self.add("trans-weak" if weak else "trans-strong", frm=[acc, n])
        return acc

    def proof(self, goal: Equation, qed: str, header=()) -> Proof:
        return Proof(goal, tuple(self.steps), qed, tuple(header))


def _types(sig, t):
    dom, cod = typecheck(sig, t)
    return resolve(sig, dom), resolve(sig, cod)


# ---------------------------------------------------------- derivations

def _empty_unique(b: ProofBuilder, t) -> str:
    """t : 0 -> Y a propagator gives t == empty[Y]."""
    return b.add("ppg-weak-to-strong", frm=[b.add("weak-initiality", t)])


def _collapse(b: ProofBuilder, g) -> str:
    """dcot(g | empty[Y]) == g for a propagator g."""
    dom, _ = _types(b.sig, g)
    s1 = b.add("refl-weak", g)
    s2 = _empty_unique(b, C(g, EmptyMap(dom)))
    return b.flip(b.add("dcot-uniqueness", frm=[s1, s2]))


def _dcot_congr(b: ProofBuilder, g, k, kk: str) -> str:
    """From kk : k == k2 derive dcot(g | k) == dcot(g | k2)."""
    d = DCotuple(g, k)
    dom, _ = _types(b.sig, d)
    w = b.add("dcot-weak", d)
    beta = b.chain(b.add("dcot-beta", d), kk, start=C(d, EmptyMap(dom)))
    return b.add("dcot-uniqueness", frm=[w, beta])


def _down_congr(b: ProofBuilder, h, hh: str) -> str:
    """From hh : h == h2 derive down(h) == down(h2)."""
    h2 = b[hh].rhs
    w = b.chain(b.add("downcast-weak", h), hh, b.add("downcast-weak", h2), start=Downcast(h))
    return b.add("ppg-weak-to-strong", frm=[w])


def _downcast_unique(b: ProofBuilder, pk: str) -> str:
    """From pk : p ~~ k with p a propagator derive p == down(k)."""
    k = b[pk].rhs
    w = b.chain(pk, b.add("downcast-weak", k), start=b[pk].lhs)
    return b.add("ppg-weak-to-strong", frm=[w])


def _untag_tag(b: ProofBuilder, i: str) -> str:
    """tag[i] . untag[i] == id[0], through the constitutive coproduct."""
    sig = b.sig
    ti, ci, pi = Tag(i), Untag(i), sig.exceptions[i]
    family = []
    for j in sig.exceptions:
        tj = Tag(j)
        start = C(C(ti, ci), tj)
        a0 = b.add("assoc", ti, ci, tj)
        if j == i:
            w = b.add("weak-repl", ti, frm=[b.add("axm-untag-tag", i)])
            family.append(b.chain(a0, w, b.add("unit-right", ti), start=start))
        else:
            w = b.add("weak-repl", ti, frm=[b.add("axm-untag-other", i, j)])
            a1 = b.add("assoc", ti, EmptyMap(pi), tj)
            e = b.chain(_empty_unique(b, C(ti, EmptyMap(pi))), _empty_unique(b, Id(EMPTY)))
            ss = b.add("strong-subst", tj, frm=[e])
            family.append(b.chain(a0, w, a1, ss, b.add("unit-left", tj), start=start))
    u1 = b.add("ccotuple-uniqueness", frm=family)
    ids = [b.weaken(b.add("unit-left", Tag(j))) for j in sig.exceptions]
    u2 = b.add("ccotuple-uniqueness", frm=ids)
    return b.chain(u1, u2, start=C(ti, ci))


def _sum_maps(sig, i, j):
    pi, pj = sig.exceptions[i], sig.exceptions[j]
    q1, q2 = Inl(pi, pj), Inr(pi, pj)
    id_plus_cj = DCotuple(q1, C(q2, Untag(j)))      # P_i -> P_i + P_j
    ci_plus_id = DCotuple(q2, C(q1, Untag(i)))      # P_j -> P_i + P_j
    return pi, pj, q1, q2, id_plus_cj, ci_plus_id


def _untag_untag(b: ProofBuilder, i: str, j: str) -> str:
    """dcot(q2 | q1 . untag[i]) . untag[j] == dcot(q1 | q2 . untag[j]) . untag[i]."""
    sig = b.sig
    pi, pj, q1, q2, right, left = _sum_maps(sig, i, j)
    params = {i: pi, j: pj}

    def side(d, a, bexc, r):
        # d = dcot(p | r . untag[bexc]) and the side is d . untag[a]
        family = []
        for k in sig.exceptions:
            tk = Tag(k)
            start = C(C(d, Untag(a)), tk)
            a0 = b.add("assoc", d, Untag(a), tk)
            if k == a:
                w = b.add("weak-repl", d, frm=[b.add("axm-untag-tag", a)])
                family.append(b.chain(a0, w, b.add("unit-right", d), b.add("dcot-weak", d),
                                      start=start))
                continue
            w = b.add("weak-repl", d, frm=[b.add("axm-untag-other", a, k)])
            a1 = b.add("assoc", d, EmptyMap(params[a]), tk)
            ss = b.add("strong-subst", tk, frm=[b.add("dcot-beta", d)])
            a2 = b.add("assoc", r, Untag(bexc), tk)
            if k == bexc:
                w2 = b.add("weak-repl", r, frm=[b.add("axm-untag-tag", bexc)])
                tail = [w2, b.add("unit-right", r)]
            else:
                w2 = b.add("weak-repl", r, frm=[b.add("axm-untag-other", bexc, k)])
                a3 = b.add("assoc", r, EmptyMap(params[bexc]), tk)
                e = _empty_unique(b, C(r, EmptyMap(params[bexc])))
                tail = [w2, a3, b.add("strong-subst", tk, frm=[e])]
            family.append(b.chain(a0, w, a1, ss, a2, *tail, start=start))
        return b.add("ccotuple-uniqueness", frm=family)

    lhs = side(left, j, i, q1)
    rhs = side(right, i, j, q2)
    return b.chain(lhs, rhs, start=C(left, Untag(j)))


def _factor_right(b: ProofBuilder, g, h, i, j) -> str:
    """dcot(g | h . untag[j]) == scot(g | h) . dcot(q1 | q2 . untag[j])."""
    pi, _, q1, q2, d, _ = _sum_maps(b.sig, i, j)
    s = SCotuple(g, h)
    f = C(s, d)
    p1 = b.chain(b.add("weak-repl", s, frm=[b.add("dcot-weak", d)]),
                 b.add("scot-weak-left", s))
    p2 = b.chain(b.add("assoc", s, d, EmptyMap(pi)),
                 b.add("strong-repl", s, frm=[b.add("dcot-beta", d)]),
                 b.add("assoc", s, q2, Untag(j)),
                 b.add("strong-subst", Untag(j), frm=[b.add("scot-strong-right", s)]),
                 start=C(f, EmptyMap(pi)))
    return b.flip(b.add("dcot-uniqueness", frm=[p1, p2]))


def _factor_left(b: ProofBuilder, g, h, i, j) -> str:
    """dcot(h | g . untag[i]) == scot(g | h) . dcot(q2 | q1 . untag[i])."""
    _, pj, q1, q2, _, d = _sum_maps(b.sig, i, j)
    s = SCotuple(g, h)
    f = C(s, d)
    p1 = b.chain(b.add("weak-repl", s, frm=[b.add("dcot-weak", d)]),
                 b.add("scot-strong-right", s))
    p2 = b.chain(b.add("assoc", s, d, EmptyMap(pj)),
                 b.add("strong-repl", s, frm=[b.add("dcot-beta", d)]),
                 b.add("assoc", s, q1, Untag(i)),
                 b.add("strong-subst", Untag(i), frm=[b.add("ppg-cotuple-beta-left", s)]),
                 start=C(f, EmptyMap(pj)))
    return b.flip(b.add("dcot-uniqueness", frm=[p1, p2]))


def _require_ppg(sig, t, what):
    try:
        d = infer(sig, t)
    except DecorationError as exc:
        raise KernelError(str(exc)) from None
    if d > PPG:
        raise KernelError(f"{what} must be a propagator, but {t} is a catcher")


def _require_exc(sig, *names):
    for e in names:
        if e not in sig.exceptions:
            raise KernelError(f"unknown exception {e}")


# -------------------------------------------------------------- scripts

def prove_cotuple_collapse(sig: Signature, g=None) -> Proof:
    if not sig.exceptions:
        raise KernelError("needs at least one declared exception")
    if g is None:
        g = Id(sig.exceptions[next(iter(sig.exceptions))])
    _require_ppg(sig, g, "g")
    _, cod = typecheck(sig, g)
    b = ProofBuilder(sig)
    qed = _collapse(b, g)
    return b.proof(Equation(DCotuple(g, EmptyMap(cod)), g), qed, (
        "Cotuple collapse: dcot(g | empty[Y]) == g for a propagator g.",
        "Both g ~~ g and g . empty[X] == empty[Y] hold (the latter by weak",
        "initiality between propagators), so dcot-uniqueness applies.",
    ))


def prove_annihilation_untag_tag(sig: Signature, i: str) -> Proof:
    _require_exc(sig, i)
    b = ProofBuilder(sig)
    qed = _untag_tag(b, i)
    return b.proof(Equation(C(Tag(i), Untag(i)), Id(EMPTY)), qed, (
        f"Annihilation untag-tag: tag[{i}] . untag[{i}] == id[0].",
        "Direct derivation. For every exception j, (tag . untag) . tag[j] ~~ tag[j]:",
        "j = i by axm-untag-tag; j != i by axm-untag-other and weak initiality.",
        "id[0] satisfies the same family, so both sides equal the constitutive",
        "cotuple ccot{j => tag[j]} by ccotuple-uniqueness.",
    ))


def prove_annihilation_catch_raise(sig: Signature, f, i: str) -> Proof:
    _require_exc(sig, i)
    _require_ppg(sig, f, "f")
    _, y = _types(sig, f)
    _, y_shown = typecheck(sig, f)
    throw = C(EmptyMap(y), Tag(i))
    k1 = C(DCotuple(throw, EmptyMap(y)), Untag(i))
    b = ProofBuilder(sig)
    kk = b.chain(b.add("strong-subst", Untag(i), frm=[_collapse(b, throw)]),
                 b.add("assoc", EmptyMap(y), Tag(i), Untag(i)),
                 b.add("strong-repl", EmptyMap(y), frm=[_untag_tag(b, i)]),
                 b.add("unit-right", EmptyMap(y)),
                 start=k1)
    to_id = b.chain(_dcot_congr(b, Id(y), k1, kk), _collapse(b, Id(y)))
    # body . f == f, so f == down(body . f) by downcast uniqueness
    hf = b.chain(b.add("strong-subst", f, frm=[to_id]), b.add("unit-left", f))
    qed = b.flip(_downcast_unique(b, b.flip(b.weaken(hf))))
    goal = Equation(Try(f, ((i, Throw(i, y_shown)),)), f)
    return b.proof(goal, qed, (
        f"Annihilation catch-raise: try f catch{{{i} => throw}} == f.",
        "The handler chain collapses: dcot(throw | empty) == throw, and",
        "throw . untag == empty . (tag . untag) == empty by annihilation untag-tag.",
        "Then dcot(id | empty) == id, so the body is f and down(f) == f.",
    ))


def prove_commutation_untag_untag(sig: Signature, i: str, j: str) -> Proof:
    _require_exc(sig, i, j)
    if i == j:
        raise KernelError("commutation untag-untag needs two distinct exceptions")
    _, _, _, _, right, left = _sum_maps(sig, i, j)
    b = ProofBuilder(sig)
    qed = _untag_untag(b, i, j)
    return b.proof(Equation(C(left, Untag(j)), C(right, Untag(i))), qed, (
        f"Commutation untag-untag for {i} != {j}, with",
        f"  untag[{i}] + id = dcot(inr | inl . untag[{i}]) : P[{j}] -> P[{i}] + P[{j}]",
        f"  id + untag[{j}] = dcot(inl | inr . untag[{j}]) : P[{i}] -> P[{i}] + P[{j}]",
        "Direct derivation: precompose both sides with every tag[k] and reduce",
        "with the untag axioms, dcot-beta and dcot-weak; both give inl for i,",
        "inr for j and empty . tag[k] otherwise, so both equal one constitutive",
        "cotuple.",
    ))


def prove_cotuple_sum_factor(sig: Signature, g, h, i: str, j: str) -> Proof:
    _require_exc(sig, i, j)
    if i == j:
        raise KernelError("needs two distinct exceptions")
    _require_ppg(sig, g, "g")
    _require_ppg(sig, h, "h")
    _, _, _, _, right, _ = _sum_maps(sig, i, j)
    b = ProofBuilder(sig)
    qed = _factor_right(b, g, h, i, j)
    return b.proof(Equation(DCotuple(g, C(h, Untag(j))), C(SCotuple(g, h), right)), qed, (
        f"Auxiliary factorization: dcot(g | h . untag[{j}]) == scot(g | h) . (id + untag[{j}]).",
        "By dcot-uniqueness: the right side is weakly g (dcot-weak, scot-weak-left)",
        "and on exceptions equals h . untag (dcot-beta, scot-strong-right).",
    ))


def prove_commutation_catch_catch(sig: Signature, f, i: str, g, j: str, h) -> Proof:
    _require_exc(sig, i, j)
    if i == j:
        raise KernelError("commutation catch-catch needs two distinct exceptions; "
                          "for one exception the handler order matters")
    for name, t in (("f", f), ("g", g), ("h", h)):
        _require_ppg(sig, t, name)
    _, y = _types(sig, f)
    _, _, _, _, right, left = _sum_maps(sig, i, j)
    s = SCotuple(g, h)
    k1 = C(DCotuple(g, C(DCotuple(h, EmptyMap(y)), Untag(j))), Untag(i))
    k1_swapped = C(DCotuple(h, C(DCotuple(g, EmptyMap(y)), Untag(i))), Untag(j))

    b = ProofBuilder(sig)
    k2 = C(DCotuple(h, EmptyMap(y)), Untag(j))
    c1 = b.add("strong-subst", Untag(j), frm=[_collapse(b, h)])
    e1 = b.add("strong-subst", Untag(i),
               frm=[b.chain(_dcot_congr(b, g, k2, c1), _factor_right(b, g, h, i, j))])
    k2_swapped = C(DCotuple(g, EmptyMap(y)), Untag(i))
    c2 = b.add("strong-subst", Untag(i), frm=[_collapse(b, g)])
    e2 = b.add("strong-subst", Untag(j),
               frm=[b.chain(_dcot_congr(b, h, k2_swapped, c2), _factor_left(b, g, h, i, j))])
    lemma = b.add("strong-repl", s, frm=[_untag_untag(b, i, j)])
    kk = b.chain(e1, b.add("assoc", s, right, Untag(i)), lemma,
                 b.add("assoc", s, left, Untag(j)), e2, start=k1)
    body = b.add("strong-subst", f, frm=[_dcot_congr(b, Id(y), k1, kk)])
    qed = _down_congr(b, C(DCotuple(Id(y), k1), f), body)
    assert b[qed].rhs == canonical(sig, Downcast(C(DCotuple(Id(y), k1_swapped), f)))
    goal = Equation(Try(f, ((i, g), (j, h))), Try(f, ((j, h), (i, g))))
    return b.proof(goal, qed, (
        f"Commutation catch-catch for {i} != {j}.",
        "Collapse the innermost dcot(_ | empty) of each handler chain, factor",
        "dcot(g | h . untag[j]) through scot(g | h) . (id + untag[j]) and its",
        "mirror through (untag[i] + id), then apply commutation untag-untag",
        "under scot(g | h) and rebuild both try terms by congruence.",
    ))


def prove_downcast_uniqueness(sig: Signature, p, k) -> Proof:
    """Derived rule instance: p == down(dcot(p | k)) for a propagator p."""
    _require_ppg(sig, p, "p")
    d = DCotuple(p, k)
    b = ProofBuilder(sig)
    qed = _downcast_unique(b, b.flip(b.add("dcot-weak", d)))
    return b.proof(Equation(p, Downcast(d)), qed, (
        "Derived rule: a propagator p with p ~~ k is strongly equal to down(k).",
        "Instance with k = dcot(p | k0), where p ~~ k comes from dcot-weak.",
    ))


# ------------------------------------------------- first-match semantics

def same_index_swap(m, f, i, g, h):
    """Verdict on ``try f catch{i => g, i => h} == try f catch{i => h, i => g}``.

    With one exception index the handler order matters, so this fails with a
    witness as soon as g and h differ on a payload that f raises."""
    from .semantics import check_equation
    return check_equation(m, Equation(Try(f, ((i, g), (i, h))), Try(f, ((i, h), (i, g)))))


def dead_handler(m, f, i, g, h):
    """Verdict on ``try f catch{i => g, i => h} == try f catch{i => g}``."""
    from .semantics import check_equation
    return check_equation(m, Equation(Try(f, ((i, g), (i, h))), Try(f, ((i, g),))))


# ------------------------------------------------------------- shipping

FIVE = ("cotuple-collapse", "annihilation-untag-tag", "annihilation-catch-raise",
        "commutation-untag-untag", "commutation-catch-catch")


def shipped_scripts(sig: Signature) -> dict:
    """The scripts instantiated for ``sig``: first exception i, second j."""
    excs = list(sig.exceptions)
    if not excs:
        return {}
    i = excs[0]
    pi = sig.exceptions[i]
    out = {
        "cotuple-collapse": prove_cotuple_collapse(sig, Throw(i, pi)),
        "annihilation-untag-tag": prove_annihilation_untag_tag(sig, i),
        "annihilation-catch-raise": prove_annihilation_catch_raise(
            sig, Throw(excs[-1], pi), i),
    }
    if len(excs) >= 2:
        j = excs[1]
        pj = sig.exceptions[j]
        h = Id(pi) if pj == pi else Throw(j, pi)
        out["commutation-untag-untag"] = prove_commutation_untag_untag(sig, i, j)
        out["commutation-catch-catch"] = prove_commutation_catch_catch(
            sig, Throw(i, pi), i, Id(pi), j, h)
        out["cotuple-sum-factor"] = prove_cotuple_sum_factor(sig, Id(pi), h, i, j)
    out["downcast-uniqueness"] = prove_downcast_uniqueness(sig, Id(pi), Untag(i))
    return out


def write_scripts(sig: Signature, outdir) -> list:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, proof in shipped_scripts(sig).items():
        path = outdir / f"{name}.prf"
        path.write_text(format_proof(proof), encoding="utf-8")
        written.append(path)
    return written


# -------------------------------------------------------------- harness

@dataclass
class Report:
    lines: list = field(default_factory=list)
    violations: int = 0
    counts: dict = field(default_factory=dict)

    def record(self, check: str, model: str, failures: list, cases: int):
        self.counts[check] = self.counts.get(check, 0) + cases
        if failures:
            self.violations += len(failures)
            for witness in failures:
                self.lines.append(f"FAIL {check} @ {model} [{witness}]")
        else:
            self.lines.append(f"PASS {check} @ {model} [{cases} cases]")

    def text(self) -> str:
        tail = [f"# {k}: {v} cases" for k, v in self.counts.items()]
        tail.append(f"# violations: {self.violations}")
        return "\n".join(self.lines + tail) + "\n"


def fuzz_soundness(sig: Signature, models: int, terms: int, seed: int,
                   max_carrier: int = 2, mutate=None) -> Report:
    """Cross-check evaluators, decorations and kernel judgments on models."""
    from . import fuzz
    from .semantics import check_equation

    if models < 1 or terms < 1:
        raise ValueError("models and terms must be positive")
    rng = fuzz.make_rng(seed)
    report = Report()
    ms = fuzz.sample_models(sig, models, max_carrier, seed)
    gen = fuzz.TermGenerator(sig, rng)
    pool = fuzz.prepare(sig, gen.terms(terms))
    cases = gen.try_cases(terms) if sig.exceptions else []
    pairs = gen.ppg_pairs(pool)

    scripts = {}
    for name, proof in shipped_scripts(sig).items():
        res = check_proof(sig, proof)
        if not res:
            report.violations += 1
            report.lines.append(f"FAIL proof:{name} @ kernel [{res}]")
        scripts[name] = (proof, res)

    for m in ms:
        if cases:
            failures, n = fuzz.check_try_agreement(m, cases, mutate)
            report.record("try-agreement", m.name, failures, n)
        failures, n = fuzz.check_propagation(m, pool)
        report.record("propagation", m.name, failures, n)
        failures, n = fuzz.check_purity(m, pool)
        report.record("purity", m.name, failures, n)
        failures, n = fuzz.check_weak_strong(m, pairs)
        report.record("weak-strong-collapse", m.name, failures, n)
        for name, (proof, res) in scripts.items():
            failures = []
            for step, j in res.judgments.items():
                v = check_equation(m, j.equation)
                if not v:
                    failures.append(f"{step}: {j} {v}")
            goal = Equation(canonical(sig, proof.goal.lhs), canonical(sig, proof.goal.rhs),
                            proof.goal.strength)
            v = check_equation(m, goal)
            if not v:
                failures.append(f"goal: {goal} {v}")
            report.record(f"kernel:{name}", m.name, failures, len(res.judgments) + 1)
    return report


def main(argv=None):
    """Regenerate the shipped ``.prf`` files: ``python -m dexc.theorems SPEC OUTDIR``."""
    from .parser import parse_signature

    argv = sys.argv[1:] if argv is None else argv
    spec, outdir = argv
    sig = parse_signature(Path(spec).read_text(encoding="utf-8"))
    for path in write_scripts(sig, outdir):
        print(path)


if __name__ == "__main__":
    main()
