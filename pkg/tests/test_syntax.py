import pytest
from hypothesis import given, settings, strategies as st

from dexc.errors import ParseError, SignatureError, TypingError
from dexc.fuzz import TermGenerator
from dexc.parser import format_signature, parse_signature, parse_term, parse_type
from dexc.syntax import (
    EMPTY, Base, Param, Sum, Id, Op, Compose, Tag, Untag, EmptyMap, Downcast,
    CCotuple, DCotuple, Inl, Inr, SCotuple, Throw, Try, canonical, compose,
    elaborate, resolve, typecheck,
)
import random

B = Base("B")


def test_minimal_signature():
    sig = parse_signature("type U\nexception Err of U")
    assert sig.base_types == ("U",)
    assert list(sig.exceptions) == ["Err"]


def test_f1_signature(f1):
    assert list(f1.ops) == ["f"]
    assert list(f1.exceptions) == ["E1", "E2"]
    assert f1.ops["f"] == (B, B)
    assert parse_signature(format_signature(f1)) == f1


def test_exception_declaration_order_is_kept():
    sig = parse_signature("type A\nexception Z of A\nexception M of A\nexception A1 of A")
    assert list(sig.exceptions) == ["Z", "M", "A1"]


@pytest.mark.parametrize("text, fragment", [
    ("exception E of Missing", "undeclared parameter type"),
    ("type B\nop f : B -> B\nop f : B -> B", "duplicate op"),
    ("type B\nexception E of B\nexception E of B", "duplicate exception"),
    ("type B\nop f : B -> C", "undeclared type C"),
    ("type B\nop f : B + B -> B", "base type"),
])
def test_signature_errors(text, fragment):
    with pytest.raises(SignatureError, match=fragment):
        parse_signature(text)


def test_syntax_error_has_position():
    with pytest.raises(ParseError) as info:
        parse_signature("type B\nop f : B -> B\nterm t = f . $")
    assert (info.value.line, info.value.col) == (3, 14)


def test_singleton_constants():
    sig = parse_signature("type U singleton\ntype B\nop c : U -> B")
    assert sig.singletons == {"U"}
    with pytest.raises(ParseError):
        parse_signature("type B\ntype U singleton\nop c : U -> B\nterm u = c . ")


def test_pure_axiom_checks():
    sig = parse_signature("type B\nop f : B -> B\naxiom inv : f . f == id[B] @ pure")
    assert str(sig.axioms["inv"]) == "f . f == id[B]"
    with pytest.raises(SignatureError, match="pure"):
        parse_signature("type B\nexception E of B\naxiom throw[E, B] == id[B] @ pure")
    with pytest.raises(SignatureError, match="strong"):
        parse_signature("type B\nop f : B -> B\naxiom f ~~ id[B]")


def test_named_terms_are_inlined(f1):
    sig = parse_signature(
        "type B\nop f : B -> B\nexception E1 of B\nterm t = throw[E1, B]\nterm u = t . f")
    assert sig.terms["u"] == Compose(Throw("E1", B), Op("f"))


@pytest.mark.parametrize("text, expected", [
    ("id[B]", Id(B)),
    ("f . f . f", Compose(Op("f"), Compose(Op("f"), Op("f")))),
    ("(f . f) . f", Compose(Compose(Op("f"), Op("f")), Op("f"))),
    ("tag[E1]", Tag("E1")),
    ("empty[P[E2]]", EmptyMap(Param("E2"))),
    ("down(untag[E1])", Downcast(Untag("E1"))),
    ("ccot{E1 => id[B], E2 => f}", CCotuple((("E1", Id(B)), ("E2", Op("f"))))),
    ("dcot(f | untag[E1])", DCotuple(Op("f"), Untag("E1"))),
    ("inl[B, 0]", Inl(B, EMPTY)),
    ("scot(f | inr[B, B])", SCotuple(Op("f"), Inr(B, B))),
    ("try f catch{E1 => id[B], E1 => f}",
     Try(Op("f"), (("E1", Id(B)), ("E1", Op("f"))))),
])
def test_parse_term(f1, text, expected):
    assert parse_term(f1, text) == expected


def test_sum_type_is_left_associative(f1):
    assert parse_type(f1, "B + B + 0") == Sum(Sum(B, B), EMPTY)


def test_typecheck_examples(f1):
    assert typecheck(f1, Throw("E1", B)) == (Param("E1"), B)
    assert typecheck(f1, Compose(Untag("E1"), Tag("E1"))) == (Param("E1"), Param("E1"))
    with pytest.raises(TypingError, match="0 != dom P\\[E1\\]"):
        typecheck(f1, Compose(Tag("E1"), Tag("E1")))


@pytest.mark.parametrize("t, fragment", [
    (Op("g"), "unknown op g"),
    (Try(Op("f"), (("E1", Inl(B, B)),)), "handler"),
    (Try(Op("f"), ()), "at least one handler"),
    (CCotuple((("E1", Id(B)),)), "E2"),
    (DCotuple(Op("f"), EmptyMap(EMPTY)), "does not match"),
])
def test_typecheck_errors(f1, t, fragment):
    with pytest.raises(TypingError, match=fragment):
        typecheck(f1, t)


def test_resolve_params(f1):
    assert resolve(f1, Sum(Param("E1"), Param("E2"))) == Sum(B, B)


def test_elaborate_throw(f1):
    assert elaborate(f1, Throw("E1", B)) == Compose(EmptyMap(B), Tag("E1"))


def test_elaborate_try_one_handler(f1):
    g = Op("f")
    t = Try(Op("f"), (("E1", g),))
    assert elaborate(f1, t) == Downcast(Compose(
        DCotuple(Id(B), Compose(DCotuple(g, EmptyMap(B)), Untag("E1"))), Op("f")))


def test_elaborate_try_two_handlers(f1):
    g, h = Id(B), Op("f")
    k2 = Compose(DCotuple(h, EmptyMap(B)), Untag("E2"))
    k1 = Compose(DCotuple(g, k2), Untag("E1"))
    t = Try(Op("f"), (("E1", g), ("E2", h)))
    assert elaborate(f1, t) == Downcast(Compose(DCotuple(Id(B), k1), Op("f")))


def test_canonical_orders_ccot_components(f1):
    t = CCotuple((("E2", Id(Param("E2"))), ("E1", Op("f"))))
    assert canonical(f1, t) == CCotuple((("E1", Op("f")), ("E2", Id(B))))


def test_compose_helper():
    assert compose(Op("f"), Op("g"), Op("h")) == Compose(Op("f"), Compose(Op("g"), Op("h")))


# ------------------------------------------------------------ properties

SIG = parse_signature("type A\ntype B\nop f : A -> B\nop g : B -> B\n"
                      "exception E1 of A\nexception E2 of B\nexception E3 of A\n")


def _terms(seed, n=5):
    return TermGenerator(SIG, random.Random(seed)).terms(n)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32))
def test_print_parse_round_trip(seed):
    for t in _terms(seed):
        assert parse_term(SIG, str(t)) == t


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32))
def test_elaboration_idempotent_and_type_preserving(seed):
    for t in _terms(seed):
        e = elaborate(SIG, t)
        assert elaborate(SIG, e) == e
        assert [resolve(SIG, x) for x in typecheck(SIG, e)] == \
               [resolve(SIG, x) for x in typecheck(SIG, t)]
        assert "throw" not in str(e) and "try" not in str(e)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32))
def test_signature_round_trip(seed):
    from dexc.fuzz import random_signature
    sig = random_signature(random.Random(seed))
    assert parse_signature(format_signature(sig)) == sig
