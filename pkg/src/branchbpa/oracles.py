"""Brute-force ground truth for the reductions and the regularity check."""
from __future__ import annotations

import enum
import itertools

from .core import BpaSystem, Process
from .equivalence import CapExceeded, build_closure
from .reductions import FINAL, HorGame, QsatFormula

OVERFLOW = -1


class Winner(str, enum.Enum):
    PLAYER0 = "Player0"
    PLAYER1 = "Player1"


def hor_arena(game: HorGame) -> dict[tuple[str, int], list[tuple[str, int]]]:
    """Successor lists of the finite arena; values at or past ``2**n`` collapse to OVERFLOW."""
    top = 2**game.n
    nodes = [(s, v) for s in game.states for v in list(range(top)) + [OVERFLOW]]
    succ: dict[tuple[str, int], list[tuple[str, int]]] = {}
    for s, v in nodes:
        out = []
        for src, l, t in game.transitions:
            if src != s:
                continue
            w = OVERFLOW if v == OVERFLOW or v + l >= top else v + l
            out.append((t, w))
        succ[(s, v)] = out
    return succ


def solve_hor(game: HorGame) -> Winner:
    succ = hor_arena(game)
    attr = {node for outs in succ.values() for node in outs if node[0] == FINAL and node[1] != game.final_value}
    changed = True
    while changed:
        changed = False
        for node, outs in succ.items():
            if node in attr:
                continue
            if game.owner(node[0]) == 1:
                win = any(o in attr for o in outs)
            else:
                win = all(o in attr for o in outs)
            if win:
                attr.add(node)
                changed = True
    return Winner.PLAYER1 if (game.init, 0) in attr else Winner.PLAYER0


def _satisfied(f: QsatFormula, values: dict[tuple[str, int], int]) -> bool:
    return all(any(values[(k, i)] == int(pos) for k, i, pos in c) for c in f.clauses)


def eval_qsat(f: QsatFormula) -> bool:
    def rec(i: int, values: dict) -> bool:
        if i > f.m:
            return _satisfied(f, values)
        return all(
            any(rec(i + 1, {**values, ("x", i): bx, ("y", i): by}) for by in (0, 1))
            for bx in (0, 1)
        )

    return rec(1, {})


def eval_qsat_table(f: QsatFormula) -> bool:
    """Same truth value, from the full truth table of the matrix."""
    table = {}
    for bits in itertools.product((0, 1), repeat=2 * f.m):
        values = {(k, i): bits[2 * (i - 1) + (k == "y")] for i in range(1, f.m + 1) for k in "xy"}
        table[bits] = _satisfied(f, values)
    level = table
    for _ in range(f.m):
        # fold y (exists) then x (forall) of the innermost remaining round
        level = {k[:-1]: level[k[:-1] + (0,)] or level[k[:-1] + (1,)] for k in level if k[-1] == 0}
        level = {k[:-1]: level[k[:-1] + (0,)] and level[k[:-1] + (1,)] for k in level if k[-1] == 0}
    return level[()]


def finite_closure_regular(system: BpaSystem, alpha: Process, cap: int | None = None) -> str:
    """``Regular`` if the reachable state space is finite under ``cap``, else ``Unknown``."""
    try:
        build_closure(system, [tuple(alpha)], cap)
    except CapExceeded:
        return "Unknown"
    return "Regular"
