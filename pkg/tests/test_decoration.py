import random

import pytest
from hypothesis import given, settings, strategies as st

from dexc.decoration import CTC, PPG, PURE, Decoration, check_at, infer
from dexc.errors import DecorationError
from dexc.fuzz import TermGenerator
from dexc.syntax import (
    Base, Id, Op, Compose, Tag, Untag, EmptyMap, Downcast, CCotuple,
    DCotuple, Inl, Inr, SCotuple, Throw, Try, elaborate,
)

B = Base("B")


@pytest.mark.parametrize("t, expected", [
    (Id(B), PURE),
    (Op("f"), PURE),
    (EmptyMap(B), PURE),
    (Inl(B, B), PURE),
    (Inr(B, B), PURE),
    (Tag("E1"), PPG),
    (Throw("E1", B), PPG),
    (Try(Op("f"), (("E1", Id(B)),)), PPG),
    (Downcast(Untag("E1")), PPG),
    (Downcast(Id(B)), PPG),
    (Untag("E1"), CTC),
    (CCotuple((("E1", Id(B)), ("E2", Id(B)))), CTC),
    (DCotuple(Id(B), Untag("E1")), CTC),
    (Compose(Untag("E1"), Tag("E1")), CTC),
    (Compose(Op("f"), Op("f")), PURE),
    (SCotuple(Id(B), Op("f")), PURE),
    (SCotuple(Id(B), Throw("E1", B)), PPG),
    (SCotuple(Throw("E1", B), Id(B)), PPG),
    (SCotuple(Id(B), Compose(DCotuple(Id(B), Untag("E1")), Tag("E2"))), CTC),
])
def test_infer(f1, t, expected):
    assert infer(f1, t) is expected


def test_try_elaboration_is_a_propagator(f1):
    t = Try(Op("f"), (("E1", Op("f")),))
    assert infer(f1, elaborate(f1, t)) is PPG


@pytest.mark.parametrize("t, fragment", [
    (CCotuple((("E1", Compose(Untag("E2"), Tag("E1"))), ("E2", Id(B)))),
     "constitutive component must be a propagator"),
    (DCotuple(Compose(Untag("E1"), Tag("E1")), EmptyMap(B)), "ordinary branch"),
    (SCotuple(Compose(Untag("E1"), Tag("E1")), Id(B)), "left branch"),
    (Try(Compose(Untag("E1"), Tag("E1")), (("E1", Id(B)),)), "try body"),
    (Try(Id(B), (("E1", Compose(Untag("E1"), Tag("E1"))),)), "handler"),
])
def test_catcher_in_propagator_slot(f1, t, fragment):
    with pytest.raises(DecorationError, match=fragment):
        infer(f1, t)


def test_check_at(f1):
    assert check_at(f1, Tag("E1"), CTC)
    assert not check_at(f1, Untag("E1"), PPG)
    assert check_at(f1, Id(B), PURE)
    assert not check_at(f1, CCotuple((("E1", Untag("E2")),)), CTC)


def test_labels():
    assert [d.label for d in Decoration] == ["pure", "ppg", "ctc"]
    assert PURE < PPG < CTC


CONTEXTS = [
    lambda t: Compose(Op("f"), t),
    lambda t: Compose(t, Op("f")),
    lambda t: SCotuple(Id(B), t),
    lambda t: Downcast(t),
]


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32))
def test_monotone_in_context(seed):
    # a lower-decorated subterm never gives a higher-decorated whole
    from dexc.parser import parse_signature
    sig = parse_signature("type B\nop f : B -> B\nexception E1 of B\nexception E2 of B")
    gen = TermGenerator(sig, random.Random(seed))
    lo = gen.gen(B, B, 4, ppg_only=True) or Id(B)
    hi = gen.gen(B, B, 4) or Id(B)
    dl, dh = infer(sig, lo), infer(sig, hi)
    if dl > dh:
        lo, hi, dl, dh = hi, lo, dh, dl
    for ctx in CONTEXTS:
        assert infer(sig, ctx(lo)) <= infer(sig, ctx(hi))
    # contexts that accept catchers in the second slot
    for ctx in (lambda t: DCotuple(Id(B), Compose(t, Untag("E1"))),
                lambda t: Compose(DCotuple(Id(B), EmptyMap(B)), t)):
        assert infer(sig, ctx(lo)) <= infer(sig, ctx(hi))
