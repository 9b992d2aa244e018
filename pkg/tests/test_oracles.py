from __future__ import annotations

from hypothesis import given, settings, strategies as st

from branchbpa.counter import gen_counter
from branchbpa.oracles import Winner, eval_qsat, eval_qsat_table, finite_closure_regular, hor_arena, solve_hor
from branchbpa.reductions import HorGame, QsatFormula, parse_hor, parse_qsat
from branchbpa.regularity import decide_regular

from conftest import CORPUS, system

P0, P1 = Winner.PLAYER0, Winner.PLAYER1

HOR_WINNERS = {
    "g01_hit": P0, "g02_miss": P1, "g03_mixed": P1, "g04_run": P0, "g05_overflow": P1,
    "g06_k5": P0, "g07_five": P1, "g08_direct_overflow": P1, "g09_run_mixed": P0, "g10_zero": P0,
}
QSAT_VALUES = {
    "f01_true": True, "f02_false": False, "f03_copy": True, "f04_unsat": False, "f05_empty": False,
    "f06_two": True, "f07_two_false": False, "f08_three": True, "f09_three_false": False,
    "f10_xor": True, "f11_four": False,
}


def game(text):
    return parse_hor(text)


def test_direct_hit():
    assert solve_hor(game("states0: s\ninit: s\nfinal-value: 1\ns -1-> final")) is P0


def test_forced_wrong_hit():
    assert solve_hor(game("states0: s\ninit: s\nfinal-value: 1\ns -2-> final")) is P1


def test_run_forever():
    g = game("states0: s\ninit: s\nfinal-value: 1\ns -0-> s\ns -2-> final")
    assert solve_hor(g) is P0
    # the same choice handed to Player 1 loses for Player 0
    g1 = game("states1: s\ninit: s\nfinal-value: 1\ns -0-> s\ns -2-> final")
    assert solve_hor(g1) is P1


def test_arena_saturates():
    g = game("states0: s\ninit: s\nfinal-value: 1\ns -1-> s\ns -1-> final")
    arena = hor_arena(g)
    assert len(arena) <= (len(g.states) + 1) * (2 ** g.n + 1)
    assert any(v < 0 for _, v in arena)


def test_corpus_winners():
    for p in sorted((CORPUS / "hor").glob("*.hor")):
        assert solve_hor(parse_hor(p.read_text())) is HOR_WINNERS[p.stem], p.stem


def _avoids_final(g):
    """States from which Player 0 can keep the play away from final forever."""
    safe = set(g.states)
    changed = True
    while changed:
        changed = False
        for s in list(safe):
            succ = [t for a, _, t in g.transitions if a == s]
            ok = [t in safe for t in succ]
            if not (any(ok) if g.owner(s) == 0 else all(ok)):
                safe.discard(s)
                changed = True
    return safe


def test_unreachable_goal_leaves_only_runs():
    flipped = 0
    for p in sorted((CORPUS / "hor").glob("*.hor")):
        g = parse_hor(p.read_text())
        arena = hor_arena(g)
        seen, todo = {(g.init, 0)}, [(g.init, 0)]
        while todo:
            for nxt in arena.get(todo.pop(), []):
                if nxt not in seen:
                    seen.add(nxt)
                    todo.append(nxt)
        hit_values = {v for st_, v in seen if st_ == "final"}
        free = [v for v in range(2 ** g.n) if v not in hit_values]
        if not free:
            continue
        moved = HorGame(g.states0, g.states1, g.transitions, g.init, free[0])
        expected = P0 if g.init in _avoids_final(g) else P1
        assert solve_hor(moved) is expected, p.stem
        flipped += solve_hor(g) is P0 and expected is P1
    assert flipped >= 1


def test_qsat_examples():
    assert eval_qsat(parse_qsat("m: 1\nclauses:\nx1 y1"))
    assert not eval_qsat(parse_qsat("m: 1\nclauses:\nx1"))
    assert not eval_qsat(parse_qsat("m: 1\nclauses:\n()\nx1 y1"))


def test_corpus_truth_values():
    for p in sorted((CORPUS / "qsat").glob("*.qsat")):
        f = parse_qsat(p.read_text())
        assert eval_qsat(f) is QSAT_VALUES[p.stem], p.stem
        assert f.m <= 3 and f.n <= 4


literal = st.tuples(st.sampled_from("xy"), st.integers(1, 3), st.booleans())


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 3).flatmap(
    lambda m: st.lists(st.frozensets(literal.filter(lambda l: l[1] <= m), max_size=3), min_size=1, max_size=4)
    .map(lambda cs: QsatFormula(m, tuple(cs)))))
def test_recursive_matches_table(f):
    assert eval_qsat(f) == eval_qsat_table(f)


def test_finite_closure_oracle():
    assert finite_closure_regular(gen_counter(2), ("B2_1", "B1_0")) == "Regular"
    s = system("vars: X\nacts: a b\nX -a-> X X\nX -b->")
    assert finite_closure_regular(s, ("X",), cap=1000) == "Unknown"
    assert finite_closure_regular(s, ()) == "Regular"


def test_finite_closure_implies_regular():
    for p in sorted((CORPUS / "bpa").glob("*.bpa")):
        from branchbpa.core import parse_system
        s = parse_system(p.read_text())
        for x in s.variables:
            if finite_closure_regular(s, (x,), cap=5000) == "Regular":
                assert decide_regular(s, (x,)).outcome == "Regular", (p.stem, x)
