import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from dexc.errors import ModelError
from dexc.parser import parse_signature
from dexc.semantics import (
    ExcValue, Exceptional, Inj, Ord, build_model, check_equation,
    enumerate_models, eval_term, eval_try_compositional, eval_try_operational,
    is_pure_in, model_from_json, model_to_json, propagates,
)
from dexc.syntax import (
    Base, Equation, Strength, Id, Op, Compose, Tag, Untag, EmptyMap, Downcast,
    CCotuple, DCotuple, Inl, SCotuple, Throw, Try,
)

B = Base("B")
WEAK, STRONG = Strength.WEAK, Strength.STRONG


def exc(e, v):
    return Exceptional(ExcValue(e, v))


def test_exc_enumeration(f1_model):
    assert [str(x) for x in f1_model.exc_values] == [
        "exc[E1](b0)", "exc[E1](b1)", "exc[E2](b0)", "exc[E2](b1)"]


def test_empty_carrier_is_valid(f1):
    m = build_model(f1, {"B": []}, {"f": {}})
    assert m.exc_values == ()
    assert eval_term(m, Op("f")).mapping == {}


@pytest.mark.parametrize("carriers, ops, fragment", [
    ({"B": ["b0", "b1"]}, {"f": {"b0": "b0"}}, "partial table"),
    ({}, {"f": {}}, "missing carrier"),
    ({"B": ["b0"]}, {}, "missing table"),
    ({"B": ["b0"]}, {"f": {"b0": "b9"}}, "not in the carrier"),
    ({"B": ["b0", "b0"]}, {"f": {"b0": "b0"}}, "repeated"),
])
def test_build_model_errors(f1, carriers, ops, fragment):
    with pytest.raises(ModelError, match=fragment):
        build_model(f1, carriers, ops)


def test_axiom_violation_has_witness():
    sig = parse_signature("type B\nop f : B -> B\naxiom inv : f . f == f")
    with pytest.raises(ModelError, match="strong-fail at ord\\(b0\\)"):
        build_model(sig, {"B": ["b0", "b1"]}, {"f": {"b0": "b1", "b1": "b0"}})


def test_singleton_carrier():
    sig = parse_signature("type U singleton\ntype B\nop c : U -> B")
    with pytest.raises(ModelError, match="exactly one"):
        build_model(sig, {"U": [], "B": ["b0"]}, {"c": {}})
    # |B| = 0 admits no table for c : U -> B
    assert [m.carriers for m in enumerate_models(sig, 1)] == [{"U": ("u0",), "B": ("b0",)}]


def test_eval_examples(f1_model):
    m = f1_model
    assert eval_term(m, Untag("E1"))(exc("E1", "b0")) == Ord("b0")
    assert eval_term(m, Untag("E1"))(exc("E2", "b1")) == exc("E2", "b1")
    assert eval_term(m, Compose(Tag("E1"), Untag("E1")))(exc("E1", "b1")) == exc("E1", "b1")
    assert eval_term(m, Throw("E1", B))(Ord("b0")) == exc("E1", "b0")
    assert eval_term(m, Tag("E2"))(exc("E1", "b1")) == exc("E1", "b1")


def test_eval_structural_clauses(f1_model):
    m = f1_model
    k = CCotuple((("E1", Id(B)), ("E2", Op("f"))))
    assert eval_term(m, k).mapping == {
        exc("E1", "b0"): Ord("b0"), exc("E1", "b1"): Ord("b1"),
        exc("E2", "b0"): Ord("b1"), exc("E2", "b1"): Ord("b0")}
    d = eval_term(m, DCotuple(Op("f"), k))
    assert d(Ord("b0")) == Ord("b1") and d(exc("E2", "b0")) == Ord("b1")
    dk = eval_term(m, Downcast(k))
    assert dk(exc("E2", "b0")) == exc("E2", "b0")
    s = eval_term(m, SCotuple(Op("f"), Throw("E2", B)))
    assert s(Ord(Inj("inl", "b0"))) == Ord("b1")
    assert s(Ord(Inj("inr", "b0"))) == exc("E2", "b0")
    assert s(exc("E1", "b1")) == exc("E1", "b1")
    assert eval_term(m, Inl(B, B))(Ord("b1")) == Ord(Inj("inl", "b1"))
    assert eval_term(m, EmptyMap(B)).mapping == {x: x for x in m.exc_values}


def test_try_by_hand(f1_model):
    # f(b0) = b1, raised as E1(b1), caught by f giving b0
    t = Try(Compose(Throw("E1", B), Op("f")), (("E1", Op("f")),))
    table = eval_term(f1_model, t)
    assert table(Ord("b0")) == Ord("b0")
    assert table(Ord("b1")) == Ord("b1")
    assert table(exc("E2", "b1")) == exc("E2", "b1")


def _tables(m, f, handlers):
    return eval_term(m, f), [(e, eval_term(m, g)) for e, g in handlers]


@pytest.mark.parametrize("handlers, expected", [
    ((("E1", Id(B)),), Ord("b0")),
    ((("E2", Id(B)),), exc("E1", "b0")),
    ((("E1", Op("f")), ("E1", Id(B))), Ord("b1")),
    ((("E2", Id(B)), ("E1", Op("f"))), Ord("b1")),
])
def test_try_operational(f1_model, handlers, expected):
    F, hs = _tables(f1_model, Throw("E1", B), handlers)
    assert eval_try_operational(f1_model, F, hs, Ord("b0")) == expected
    assert eval_try_compositional(f1_model, F, hs, Ord("b0")) == expected


def test_try_propagates_exceptional_input(f1_model):
    F, hs = _tables(f1_model, Throw("E1", B), (("E1", Id(B)),))
    for e in f1_model.exc_values:
        assert eval_try_operational(f1_model, F, hs, e) == e
        assert eval_try_compositional(f1_model, F, hs, e) == e


def test_first_match_mutation_flips_scan(f1_model):
    F, hs = _tables(f1_model, Throw("E1", B), (("E1", Op("f")), ("E1", Id(B))))
    x = Ord("b0")
    assert eval_try_operational(f1_model, F, hs, x) == Ord("b1")
    assert eval_try_operational(f1_model, F, hs, x, mutate="first-match-off") == Ord("b0")


def test_single_handler_compositional_form(f1_model):
    m, g = f1_model, Op("f")
    f = Compose(Throw("E1", B), Op("f"))
    by_hand = Compose(DCotuple(Id(B), Compose(DCotuple(g, EmptyMap(B)), Untag("E1"))), f)
    F, hs = _tables(m, f, (("E1", g),))
    for x in m.inputs(B):
        want = eval_term(m, by_hand)(x) if isinstance(x, Ord) else x
        assert eval_try_compositional(m, F, hs, x) == want


def test_check_equation(f1_model):
    m = f1_model
    k = CCotuple((("E1", Id(B)), ("E2", Id(B))))
    assert check_equation(m, Equation(Downcast(k), k, WEAK))
    v = check_equation(m, Equation(Downcast(k), k, STRONG))
    assert not v and str(v) == "strong-fail at exc[E1](b0)"
    assert check_equation(m, Equation(Id(B), Id(B)))
    v = check_equation(m, Equation(Op("f"), Id(B), WEAK))
    assert str(v) == "weak-fail at ord(b0)"
    v = check_equation(m, Equation(Downcast(Untag("E1")), Untag("E1")))
    assert str(v) == "strong-fail at exc[E1](b0)"


def test_propagates(f1_model):
    assert propagates(f1_model, Tag("E1"))
    assert not propagates(f1_model, Untag("E1"))
    assert propagates(f1_model, Id(B))
    assert is_pure_in(f1_model, Op("f"))
    assert not is_pure_in(f1_model, Throw("E1", B))


def test_enumerate_models(f1, f1_model):
    models = list(enumerate_models(f1, 2))
    assert [m.name for m in models] == ["m0", "m1", "m2", "m3", "m4", "m5"]
    assert [len(m.carriers["B"]) for m in models] == [0, 1, 2, 2, 2, 2]
    assert f1_model in models
    assert [m.carriers for m in enumerate_models(f1, 0)] == [{"B": ()}]
    again = list(enumerate_models(f1, 2))
    assert [m.op_tables for m in again] == [m.op_tables for m in models]


def test_enumerate_filters_by_axioms():
    sig = parse_signature("type B\nop f : B -> B\naxiom f . f == id[B] @ pure")
    tables = [m.op_tables["f"] for m in enumerate_models(sig, 2)]
    # involutions on sets of size <= 2
    assert tables == [{}, {"b0": "b0"}, {"b0": "b0", "b1": "b1"}, {"b0": "b1", "b1": "b0"}]


def test_sampled_tables_are_seeded():
    sig = parse_signature("type B\nop f : B -> B\nop g : B -> B\nop h : B -> B")
    a = [m.op_tables for m in enumerate_models(sig, 3, seed=7)]
    b = [m.op_tables for m in enumerate_models(sig, 3, seed=7)]
    assert a == b


def test_model_json_round_trip(f1, f1_model):
    text = model_to_json(f1_model)
    assert json.loads(text) == {"carriers": {"B": ["b0", "b1"]},
                                "ops": {"f": {"b0": "b1", "b1": "b0"}}}
    again = model_from_json(f1, text)
    assert again == f1_model
    assert model_to_json(again) == text
    with pytest.raises(ModelError):
        model_from_json(f1, "[1, 2]")


SIG = parse_signature("type A\ntype B\nop f : A -> B\n"
                      "exception E1 of A\nexception E2 of B\nexception E3 of A\n")


def _model(seed):
    from dexc.fuzz import random_model
    rng = random.Random(seed)
    while True:
        m = random_model(SIG, rng, 3, "m")
        if m is not None:
            return m


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32))
def test_untag_case_analysis(seed):
    m = _model(seed)
    for i in SIG.exceptions:
        table = eval_term(m, Untag(i))
        for e in m.exc_values:
            assert isinstance(table(e), Ord) == (e.e.exc == i)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32))
def test_exception_axioms_hold(seed):
    m = _model(seed)
    for i, p in SIG.exceptions.items():
        for j in SIG.exceptions:
            rhs = Id(p) if i == j else Compose(EmptyMap(p), Tag(j))
            assert check_equation(m, Equation(Compose(Untag(i), Tag(j)), rhs, WEAK))
