from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from branchbpa.core import (TAU, BpaSyntaxError, BpaSystem, DuplicateDeclaration, Rule, UndeclaredLabel,
                            UndeclaredVariable, compute_norms, erasing_trace, format_process, parse_document,
                            parse_process, parse_system, print_system, silent_erasable, successors, system_size)
from branchbpa.counter import gen_counter

from conftest import system


def test_minimal_system():
    s = parse_system("vars: X\nacts: a\nX -a->")
    assert s.rules == (Rule("X", "a", ()),)
    assert s.visible_labels == ("a",)
    assert TAU in s.label_names


def test_counter_round_trip():
    s = gen_counter(2)
    assert parse_system(print_system(s)) == s


def test_print_is_canonical():
    s = system("vars: Y X\nacts: b a\nY -b-> X\nX -a->")
    text = print_system(s, {"origin": "test"})
    assert text == "#@ origin: test\nvars: X Y\nacts: a b\nY -b-> X\nX -a->\n"
    doc = parse_document(text)
    assert doc.metadata == {"origin": "test"}
    assert print_system(doc.system, doc.metadata) == text


@pytest.mark.parametrize("text, exc, line, col", [
    ("vars: X\nacts: a\nX -a-> Y", UndeclaredVariable, 3, 8),
    ("vars: X\nacts: a\nX -b->", UndeclaredLabel, 3, 4),
    ("vars: X\nacts: a\nW -a->", UndeclaredVariable, 3, 1),
    ("vars: X X\nacts: a", DuplicateDeclaration, 1, 9),
    ("vars: X\nvars: Y", DuplicateDeclaration, 2, 1),
    ("vars: X\nacts: a\nX => Y", BpaSyntaxError, 3, 1),
    ("vars: tau", DuplicateDeclaration, 1, 7),
])
def test_parse_errors_carry_positions(text, exc, line, col):
    with pytest.raises(exc) as info:
        parse_system(text)
    assert (info.value.line, info.value.column) == (line, col)


def test_comments_and_blank_lines():
    s = system("# header\nvars: X  # one var\n\nacts: a\nX -a-> X # loop\nX -tau->")
    assert len(s.rules) == 2


def test_process_text():
    assert parse_process("") == ()
    assert parse_process("eps") == ()
    assert parse_process(" X  Y ") == ("X", "Y")
    assert format_process(()) == "eps"
    assert format_process(("X", "Y")) == "X Y"
    with pytest.raises(BpaSyntaxError):
        parse_process("X -")


def test_successors():
    s = gen_counter(2)
    assert successors(s, ()) == []
    assert sorted(successors(s, ("B1_1",))) == sorted([
        ("a1_1", ("B1_1",)), ("d", ()), ("a2_0", ("B1_1__2_0",)), ("a2_1", ("B1_1__2_1",))])
    t = system("vars: X Y\nacts: a\nX -a->")
    assert successors(t, ("X", "Y")) == [("a", ("Y",))]


def test_counter_norms():
    norms = compute_norms(gen_counter(2))
    assert norms["Z1_0"] == 1 and norms["B2_1"] == 1
    assert norms["B1_0__2_1"] == 2
    assert norms.all_normed


def test_unnormed():
    norms = compute_norms(system("vars: X Y\nacts: a\nX -a-> X\nY -a->"))
    assert norms["X"] is None and norms["Y"] == 1
    assert norms.unnormed == ["X"]
    assert norms.of(("Y", "X")) is None


def test_silent_erasable():
    s = gen_counter(2)
    assert silent_erasable(s) == {f"Z{i}_{b}" for i in (1, 2) for b in (0, 1)}
    assert silent_erasable(system("vars: X\nacts: a\nX -a->")) == frozenset()
    assert silent_erasable(system("vars: X Y\nX -tau-> Y\nY -tau->")) == {"X", "Y"}


def test_system_size():
    assert system_size(system("vars: X\nacts: a\nX -a->")) == (1, 2, 2, 5)
    assert system_size(system("vars: X"))[2] == 0
    assert len(gen_counter(2).variables) == 16


# -- properties over random systems ------------------------------------------

VARS = ["X", "Y", "Z", "W"]


@st.composite
def systems(draw):
    nv = draw(st.integers(1, 4))
    vs = VARS[:nv]
    labels = ["a", "b", TAU]
    rules = draw(st.lists(
        st.tuples(st.sampled_from(vs), st.sampled_from(labels), st.lists(st.sampled_from(vs), max_size=3)),
        max_size=8))
    # keep every variable normed by giving it an erasing rule
    rules = [Rule(h, l, tuple(b)) for h, l, b in rules] + [Rule(x, "a", ()) for x in vs]
    return BpaSystem(vs, ["a", "b"], rules)


words = st.lists(st.sampled_from(VARS), max_size=4)


@settings(max_examples=60, deadline=None)
@given(systems())
def test_print_parse_round_trip(s):
    assert parse_system(print_system(s)) == s


@settings(max_examples=60, deadline=None)
@given(systems(), words, words)
def test_prefix_rewriting(s, alpha, beta):
    alpha = tuple(x for x in alpha if x in s.variables)
    beta = tuple(x for x in beta if x in s.variables)
    if alpha:
        assert successors(s, alpha + beta) == [(l, p + beta) for l, p in successors(s, alpha)]


@settings(max_examples=60, deadline=None)
@given(systems())
def test_norm_fixpoint_and_trace(s):
    norms = compute_norms(s)
    for x in s.variables:
        bodies = [1 + norms.of(r.body) for r in s.rules_by_head[x] if norms.of(r.body) is not None]
        assert norms[x] == min(bodies)
        trace = erasing_trace(s, (x,))
        assert len(trace) == norms[x] and trace[-1][1] == ()


@settings(max_examples=60, deadline=None)
@given(systems(), words, words)
def test_norm_additive(s, alpha, beta):
    norms = compute_norms(s)
    alpha = tuple(x for x in alpha if x in s.variables)
    beta = tuple(x for x in beta if x in s.variables)
    assert norms.of(alpha + beta) == norms.of(alpha) + norms.of(beta)
