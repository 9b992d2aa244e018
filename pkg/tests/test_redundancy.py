from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from branchbpa.core import compute_norms, silent_erasable
from branchbpa.counter import gen_counter
from branchbpa.equivalence import CapExceeded, decide
from branchbpa.redundancy import (UnrealizableSet, branching_norm, build_rd_tree, format_set, norm_path, rd_fold,
                                  rd_step, redundant_set, relative_norms, representative)

from conftest import system

# one shared system for the property tests; its memo tables only ever grow
D0 = gen_counter(2)
D0_VARS = list(D0.variables)
d0_words = st.lists(st.sampled_from(D0_VARS), max_size=4).map(tuple)


def test_examples(counter2):
    assert redundant_set(counter2, ["B1_1"]) == {"Z1_1"}
    assert redundant_set(counter2, ["B2_1", "B1_0"]) == {"Z1_0", "Z2_1"}
    assert rd_step(counter2, "B2_1", {"Z1_0"}) == {"Z1_0", "Z2_1"}
    assert redundant_set(counter2, []) == frozenset()


def test_rd_of_nil_can_be_nonempty():
    s = system("vars: X Y\nacts: a\nX -tau->\nY -a->")
    assert redundant_set(s, []) == {"X"}
    assert redundant_set(s, ["Y"]) == {"X"}


def test_tau_free_tree():
    s = system("vars: X Y\nacts: a\nX -a-> Y\nY -a->")
    tree = build_rd_tree(s)
    assert tree.realizable_sets == [frozenset()]
    assert tree.depth == 1
    assert tree.dump() == "eps | {} | processed\nX | {} | leaf\nY | {} | leaf\n"


def test_counter_tree(counter2):
    tree = build_rd_tree(counter2)
    sets = {format_set(r) for r in tree.realizable_sets}
    assert sets == {"{}", "{Z1_0}", "{Z1_1}", "{Z2_0}", "{Z2_1}", "{Z1_0, Z2_0}", "{Z1_0, Z2_1}",
                    "{Z1_1, Z2_0}", "{Z1_1, Z2_1}"}
    assert tree.representative({"Z1_0", "Z2_0"}) == ("B1_0__2_0",)
    assert tree.depth == 2
    lines = tree.dump().splitlines()
    assert lines[:3] == ["eps | {} | processed", "B1_0 | {Z1_0} | processed",
                         "B1_0__2_0 | {Z1_0, Z2_0} | processed"]
    assert "B2_0__1_0 | {Z1_0, Z2_0} | leaf" in lines
    with pytest.raises(UnrealizableSet):
        tree.representative({"Z1_0", "Z1_1"})
    with pytest.raises(UnrealizableSet):
        representative(counter2, {"Z1_0", "Z1_1"})


def test_tree_sets_recomputed_from_scratch(counter2):
    tree = build_rd_tree(counter2)
    fresh = gen_counter(2)
    for node in tree.nodes:
        assert redundant_set(fresh, node.process) == node.rdset


def test_rd_fold(counter2):
    sets = rd_fold(counter2, ["B2_1", "B1_0"])
    assert sets == [frozenset({"Z1_0"}), frozenset(), frozenset({"Z1_0", "Z2_1"})]


def test_norm_examples(counter2):
    assert branching_norm(counter2, []) == 0
    assert branching_norm(counter2, ["Z1_1"], frozenset({"Z1_1"})) == 0
    assert branching_norm(counter2, ["Z1_1"], frozenset()) == 1
    assert branching_norm(counter2, ["Z1_1"], ("B1_1",)) == 0
    assert branching_norm(counter2, ["B2_1", "B1_0"]) == 2
    assert norm_path(counter2, ["B2_1", "B1_0"]) == [("d", ("B1_0",), 1), ("d", (), 1)]


def test_norm_methods_agree(counter2):
    for alpha in [("B2_1", "B1_0"), ("Z1_0", "B1_0__2_1", "B2_0"), ("B1_1__2_0", "B2_1")]:
        a = branching_norm(counter2, alpha, method="closure")
        b = branching_norm(counter2, alpha, method="compositional")
        assert a == b


def test_relative_norms_table(counter2):
    table = relative_norms(counter2, [("Z1_1", frozenset({"Z1_1"})), ("B1_0__2_1", frozenset())])
    assert table[("Z1_1", frozenset({"Z1_1"}))] == 0
    assert table[("B1_0__2_1", frozenset())] == 2


def test_norm_of_growing_words_uses_fallback():
    s = system("vars: X\nacts: a b\nX -a-> X X\nX -b->")
    assert branching_norm(s, ["X"] * 6, cap=50) == 6
    with pytest.raises(CapExceeded):
        branching_norm(s, ["X"] * 6, cap=50, method="closure")


# -- properties ---------------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(d0_words)
def test_rd_subset_of_silent_vars(alpha):
    assert redundant_set(D0, alpha) <= silent_erasable(D0)


@settings(max_examples=60, deadline=None)
@given(d0_words)
def test_fold_matches_direct(alpha):
    assert rd_fold(D0, alpha)[-1] == redundant_set(D0, alpha)


@settings(max_examples=40, deadline=None)
@given(d0_words, d0_words)
def test_norm_properties(alpha, beta):
    rb = redundant_set(D0, beta)
    rel = branching_norm(D0, alpha, rb)
    # (2) composition
    assert branching_norm(D0, alpha + beta) == branching_norm(D0, beta) + rel
    # (3) positive relative norm iff the prefix is not absorbed
    assert (rel > 0) == (not decide(D0, alpha + beta, beta).equivalent)
    # (4) bounded by the ordinary norm
    assert branching_norm(D0, alpha) <= compute_norms(D0).of(alpha)


@settings(max_examples=40, deadline=None)
@given(d0_words, d0_words)
def test_equivalent_processes_share_norm(alpha, beta):
    if decide(D0, alpha, beta).equivalent:
        assert branching_norm(D0, alpha) == branching_norm(D0, beta)


@settings(max_examples=40, deadline=None)
@given(d0_words, d0_words, d0_words)
def test_relative_norm_depends_on_set_only(alpha, g1, g2):
    if redundant_set(D0, g1) == redundant_set(D0, g2):
        assert branching_norm(D0, alpha, g1) == branching_norm(D0, alpha, g2)
