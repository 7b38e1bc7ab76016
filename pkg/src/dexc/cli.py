"""``dexc`` command line: check, verify, prove, fuzz.

Exit codes: 0 success, 1 semantic/proof/decoration failure, 2 usage, parse
or I/O error.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .decoration import infer
from .errors import DexError, ModelError, ParseError, SignatureError
from .kernel import check_proof, parse_proof
from .parser import parse_signature
from .semantics import MUTATIONS, check_equation, model_from_json
from .syntax import (
    Compose, EmptyMap, Equation, Id, Strength, Tag, Untag, same_type,
    typecheck,
)

OK, FAIL, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _read(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load_sig(path):
    text = _read(path)
    try:
        return parse_signature(text)
    except (ParseError, SignatureError) as exc:
        raise UsageError(f"{path}: {exc}") from None


def _where(sig, path, name):
    line = sig.lines.get(name)
    return f"{path}:{line}" if line else str(path)


def cmd_check(args) -> int:
    sig = _load_sig(args.spec)
    status = OK
    for name, t in sig.terms.items():
        try:
            # decoration first: its diagnostics are the more specific ones
            label = infer(sig, t).label
            dom, cod = typecheck(sig, t)
        except DexError as exc:
            print(f"{_where(sig, args.spec, name)}: term {name}: {exc}", file=sys.stderr)
            status = FAIL
            continue
        print(f"{name} : {dom} -> {cod} [{label}]")
    for name, eq in sig.equations.items():
        try:
            ld, lc = typecheck(sig, eq.lhs)
            rd, rc = typecheck(sig, eq.rhs)
            if not (same_type(sig, ld, rd) and same_type(sig, lc, rc)):
                raise SignatureError(f"sides are not parallel: {ld} -> {lc} vs {rd} -> {rc}")
            infer(sig, eq.lhs)
            infer(sig, eq.rhs)
        except DexError as exc:
            print(f"{_where(sig, args.spec, name)}: equation {name}: {exc}", file=sys.stderr)
            status = FAIL
    return status


def exception_axioms(sig) -> dict:
    """The untag axioms as weak equations, named by the exceptions involved."""
    out = {}
    for i, p in sig.exceptions.items():
        out[f"untag-tag[{i}]"] = Equation(Compose(Untag(i), Tag(i)), Id(p), Strength.WEAK)
        for j in sig.exceptions:
            if j != i:
                out[f"untag-other[{i},{j}]"] = Equation(
                    Compose(Untag(i), Tag(j)),
                    Compose(EmptyMap(p), Tag(j)), Strength.WEAK)
    return out


def cmd_verify(args) -> int:
    sig = _load_sig(args.spec)
    try:
        model = model_from_json(sig, _read(args.model), Path(args.model).stem)
    except ModelError as exc:
        raise UsageError(f"{args.model}: {exc}") from None
    if args.eq is not None:
        if args.eq not in sig.equations:
            raise UsageError(f"no equation named {args.eq} in {args.spec}")
        todo = {args.eq: sig.equations[args.eq]}
    else:
        todo = {**exception_axioms(sig), **sig.axioms, **sig.equations}
    status = OK
    for name, eq in todo.items():
        try:
            for side in (eq.lhs, eq.rhs):
                typecheck(sig, side)
                infer(sig, side)
            verdict = check_equation(model, eq)
        except DexError as exc:
            print(f"{name}: error: {exc}")
            status = FAIL
            continue
        print(f"{name}: {eq} : {verdict}")
        if not verdict:
            status = FAIL
    return status


def cmd_prove(args) -> int:
    sig = _load_sig(args.spec)
    try:
        proof = parse_proof(sig, _read(args.proof))
    except DexError as exc:
        raise UsageError(f"{args.proof}: {exc}") from None
    result = check_proof(sig, proof)
    print(result)
    return OK if result else FAIL


def cmd_fuzz(args) -> int:
    from .theorems import fuzz_soundness

    if args.models < 1 or args.terms < 1:
        raise UsageError("--models and --terms must be at least 1")
    if args.max_carrier < 0:
        raise UsageError("--max-carrier must be non-negative")
    sig = _load_sig(args.spec)
    report = fuzz_soundness(sig, args.models, args.terms, args.seed,
                            args.max_carrier, args.mutate)
    sys.stdout.write(report.text())
    return OK if report.violations == 0 else FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dexc", description="Decorated exception logic workbench")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="typecheck and decorate every named term")
    p.add_argument("spec")
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("verify", help="check equations in a finite model")
    p.add_argument("spec")
    p.add_argument("model", help="model JSON file")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--all", action="store_true", help="every axiom and equation (default)")
    group.add_argument("--eq", metavar="NAME", help="only the named equation")
    p.set_defaults(run=cmd_verify)

    p = sub.add_parser("prove", help="replay a proof script through the kernel")
    p.add_argument("spec")
    p.add_argument("proof", help=".prf file")
    p.set_defaults(run=cmd_prove)

    p = sub.add_parser("fuzz", help="randomized soundness harness")
    p.add_argument("spec")
    p.add_argument("--models", type=int, default=50)
    p.add_argument("--terms", type=int, default=200)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--max-carrier", type=int, default=2)
    p.add_argument("--mutate", choices=MUTATIONS, default=None, help=argparse.SUPPRESS)
    p.set_defaults(run=cmd_fuzz)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except UsageError as exc:
        print(f"dexc: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
