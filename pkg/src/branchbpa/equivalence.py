"""Branching and weak bisimilarity on finite closures of BPA processes."""
from __future__ import annotations

import enum
import os
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field
from functools import cached_property

from . import kernels
from .core import TAU, BpaSystem, Process, format_process

DEFAULT_CAP = 200_000


def default_cap() -> int:
    value = os.environ.get("BPA_DEFAULT_CAP")
    return int(value) if value else DEFAULT_CAP


class Mode(str, enum.Enum):
    BRANCHING = "branching"
    WEAK = "weak"


class CapExceeded(Exception):
    def __init__(self, cap: int, explored: int, what: str = "closure", unit: str = "states"):
        self.cap = cap
        self.explored = explored
        self.what = what
        super().__init__(f"{what} exceeded cap of {cap} {unit} ({explored} states explored)")


class NotDistinguishable(Exception):
    pass


def _succ_table(system: BpaSystem) -> dict[str, tuple[tuple[str, Process], ...]]:
    table = system._memo.get("succ")
    if table is None:
        table = {x: tuple((r.label, r.body) for r in rs) for x, rs in system.rules_by_head.items()}
        system._memo["succ"] = table
    return table


@dataclass
class Lts:
    """Finite restriction of the transition graph, closed under successors."""

    states: list[Process]
    index: dict[Process, int]
    src: list[int]
    lbl: list[str]
    dst: list[int]
    seeds: tuple[int, ...]

    def __len__(self) -> int:
        return len(self.states)

    @cached_property
    def out(self) -> list[list[tuple[str, int]]]:
        out: list[list[tuple[str, int]]] = [[] for _ in self.states]
        for s, a, t in zip(self.src, self.lbl, self.dst):
            out[s].append((a, t))
        return out

    @property
    def transitions(self) -> list[tuple[int, str, int]]:
        return list(zip(self.src, self.lbl, self.dst))

    def label_ids(self) -> tuple[list[int], int]:
        visible = sorted({a for a in self.lbl if a != TAU})
        ids = {a: i for i, a in enumerate(visible)}
        tau = len(visible)
        ids[TAU] = tau
        return [ids[a] for a in self.lbl], tau


# total stored symbols per state allowed before giving up; growing words
# would otherwise cost quadratic memory long before the state cap is hit
SYMBOLS_PER_STATE = 20


def build_closure(system: BpaSystem, seeds: Iterable[Process], cap: int | None = None) -> Lts:
    """Breadth-first closure of ``seeds`` under successors."""
    cap = default_cap() if cap is None else cap
    symbol_cap = SYMBOLS_PER_STATE * cap
    symbols = 0
    table = _succ_table(system)
    states: list[Process] = []
    index: dict[Process, int] = {}
    seed_ids = []
    for p in seeds:
        p = tuple(p)
        if p not in index:
            if len(states) >= cap:
                raise CapExceeded(cap, len(states))
            index[p] = len(states)
            states.append(p)
        seed_ids.append(index[p])
    src: list[int] = []
    lbl: list[str] = []
    dst: list[int] = []
    i = 0
    while i < len(states):
        w = states[i]
        if w:
            rest = w[1:]
            for a, body in table[w[0]]:
                t = body + rest
                j = index.get(t)
                if j is None:
                    if len(states) >= cap:
                        raise CapExceeded(cap, len(states))
                    j = len(states)
                    index[t] = j
                    states.append(t)
                    symbols += len(t)
                    if symbols > symbol_cap:
                        raise CapExceeded(symbol_cap, len(states), unit="symbols")
                src.append(i)
                lbl.append(a)
                dst.append(j)
        i += 1
    return Lts(states, index, src, lbl, dst, tuple(seed_ids))


@dataclass
class Partition:
    lts: Lts
    blocks: list[int]
    mode: Mode

    def block_of(self, p: Process) -> int:
        return self.blocks[self.lts.index[tuple(p)]]

    def equivalent(self, p: Process, q: Process) -> bool:
        return self.block_of(p) == self.block_of(q)

    def same(self, s: int, t: int) -> bool:
        return self.blocks[s] == self.blocks[t]

    @property
    def num_blocks(self) -> int:
        return max(self.blocks) + 1 if self.blocks else 0


def compute_partition(lts: Lts, mode: Mode | str = Mode.BRANCHING) -> Partition:
    mode = Mode(mode)
    lbl, tau = lts.label_ids()
    n = len(lts)
    if mode is Mode.BRANCHING:
        blocks = kernels.refine_partition(n, lts.src, lbl, lts.dst, tau, True)
    else:
        s2, l2, d2 = kernels.saturate(n, lts.src, lbl, lts.dst, tau)
        blocks = kernels.refine_partition(n, s2, l2, d2, tau, False)
    return Partition(lts, list(blocks), mode)


def analyse(system: BpaSystem, seeds: Iterable[Process], mode: Mode | str = Mode.BRANCHING,
            cap: int | None = None) -> Partition:
    return compute_partition(build_closure(system, seeds, cap), mode)


# ---------------------------------------------------------------------------
# verdicts


class Outcome(str, enum.Enum):
    EQUIVALENT = "Equivalent"
    INEQUIVALENT = "Inequivalent"
    UNDECIDED = "Undecided"


@dataclass
class Verdict:
    outcome: Outcome
    mode: Mode
    left: Process
    right: Process
    partition: Partition | None = None
    cap_report: CapExceeded | None = None
    _strategy: "Round | None" = field(default=None, repr=False)

    @property
    def equivalent(self) -> bool:
        return self.outcome is Outcome.EQUIVALENT

    @property
    def undecided(self) -> bool:
        return self.outcome is Outcome.UNDECIDED

    @property
    def strategy(self) -> "Round | None":
        """Attacker's winning strategy; computed on first access."""
        if self.outcome is not Outcome.INEQUIVALENT:
            return None
        if self._strategy is None:
            self._strategy = extract_attacker_strategy(
                self.partition.lts, self.partition, self.left, self.right, self.mode
            )
        return self._strategy

    def __str__(self) -> str:
        if self.cap_report is not None:
            return f"{self.outcome.value} ({self.cap_report})"
        return self.outcome.value


def decide(system: BpaSystem, p: Process, q: Process, mode: Mode | str = Mode.BRANCHING,
           cap: int | None = None) -> Verdict:
    mode = Mode(mode)
    p, q = system.check_process(p), system.check_process(q)
    try:
        part = analyse(system, [p, q], mode, cap)
    except CapExceeded as exc:
        return Verdict(Outcome.UNDECIDED, mode, p, q, cap_report=exc)
    outcome = Outcome.EQUIVALENT if part.equivalent(p, q) else Outcome.INEQUIVALENT
    return Verdict(outcome, mode, p, q, partition=part)


# ---------------------------------------------------------------------------
# bisimulation game


@dataclass(frozen=True)
class GameConfig:
    left: Process
    right: Process
    round: int = 1


@dataclass(frozen=True)
class Reply:
    """A Defender answer and the configuration Attacker continues from.

    ``empty`` replies only answer silent moves.  ``via`` is the state reached
    by the silent prefix (branching game only).
    """

    empty: bool
    via: Process | None
    reached: Process
    next: "Round"


@dataclass(frozen=True)
class Round:
    left: Process
    right: Process
    side: int
    label: str
    target: Process
    replies: tuple[Reply, ...]
    rank: int

    @property
    def defender_stuck(self) -> bool:
        return not self.replies

    def depth(self) -> int:
        return 1 + max((r.next.depth() for r in self.replies), default=0)

    def lines(self, indent: int = 0, max_depth: int = 50) -> list[str]:
        pad = "  " * indent
        who = "left" if self.side == 0 else "right"
        head = (f"{pad}({format_process(self.left)}, {format_process(self.right)}) "
                f"attacker plays {who} -{self.label}-> {format_process(self.target)}")
        if not self.replies:
            return [head + "  [defender stuck]"]
        out = [head]
        if max_depth <= 1:
            return out + [pad + "  ..."]
        for r in self.replies:
            if r.empty:
                desc = "empty"
            elif r.via is not None:
                desc = f"via {format_process(r.via)} to {format_process(r.reached)}"
            else:
                desc = f"to {format_process(r.reached)}"
            out.append(f"{pad}  defender {desc}:")
            out.extend(r.next.lines(indent + 2, max_depth - 1))
        return out


class _GameArena:
    """Move/reply structure of the bisimulation game over one closure."""

    def __init__(self, lts: Lts, partition: Partition, mode: Mode):
        self.lts = lts
        self.part = partition
        self.mode = mode
        self._tau_reach: dict[int, list[int]] = {}
        self._weak: dict[tuple[int, str], list[int]] = {}

    def tau_reach(self, s: int) -> list[int]:
        got = self._tau_reach.get(s)
        if got is None:
            seen = {s}
            order = [s]
            i = 0
            out = self.lts.out
            while i < len(order):
                for a, t in out[order[i]]:
                    if a == TAU and t not in seen:
                        seen.add(t)
                        order.append(t)
                i += 1
            got = self._tau_reach[s] = order
        return got

    def weak_succ(self, s: int, a: str) -> list[int]:
        key = (s, a)
        got = self._weak.get(key)
        if got is None:
            if a == TAU:
                got = list(self.tau_reach(s))
            else:
                seen: dict[int, None] = {}
                for u in self.tau_reach(s):
                    for b, t in self.lts.out[u]:
                        if b == a:
                            for v in self.tau_reach(t):
                                seen.setdefault(v)
                got = list(seen)
            self._weak[key] = got
        return got

    def moves(self, pos: tuple[int, int]) -> list[tuple[int, str, int]]:
        out = self.lts.out
        return [(0, a, t) for a, t in out[pos[0]]] + [(1, a, t) for a, t in out[pos[1]]]

    def replies(self, pos, move) -> list[tuple[bool, int | None, int, list[tuple[int, int]]]]:
        """``(empty, via, reached, options)``; options are oriented configurations."""
        side, a, x2 = move
        x, y = pos[side], pos[1 - side]

        def orient(u, v):
            return (u, v) if side == 0 else (v, u)

        res = []
        if self.mode is Mode.BRANCHING:
            if a == TAU:
                res.append((True, None, y, [orient(x2, y)]))
            for y1 in self.tau_reach(y):
                for b, y2 in self.lts.out[y1]:
                    if b == a:
                        res.append((False, y1, y2, [orient(x2, y2), orient(x, y1)]))
        else:
            for y2 in self.weak_succ(y, a):
                res.append((a == TAU and y2 == y, None, y2, [orient(x2, y2)]))
        return res


def _solve_ranks(arena: _GameArena, start: tuple[int, int], max_positions: int) -> dict:
    """Attacker ranks on positions reachable from ``start`` (Attacker-winning only)."""
    same = arena.part.same
    positions: dict[tuple[int, int], None] = {start: None}
    order = [start]
    i = 0
    while i < len(order):
        pos = order[i]
        i += 1
        for mv in arena.moves(pos):
            for _, _, _, options in arena.replies(pos, mv):
                for o in options:
                    if not same(*o) and o not in positions:
                        if len(positions) >= max_positions:
                            raise CapExceeded(max_positions, len(positions), "strategy positions")
                        positions[o] = None
                        order.append(o)
    inf = float("inf")
    rank = {p: inf for p in order}

    def value(pos):
        best = inf
        for mv in arena.moves(pos):
            worst = 0
            for _, _, _, options in arena.replies(pos, mv):
                r = min(rank.get(o, inf) for o in options)
                if r > worst:
                    worst = r
                    if worst >= best:
                        break
            if worst + 1 < best:
                best = worst + 1
        return best

    changed = True
    while changed:
        changed = False
        for pos in order:
            v = value(pos)
            if v < rank[pos]:
                rank[pos] = v
                changed = True
    return rank


def extract_attacker_strategy(lts: Lts, partition: Partition, p: Process, q: Process,
                              mode: Mode | str = Mode.BRANCHING, max_positions: int = 200_000) -> Round:
    mode = Mode(mode)
    if partition.equivalent(p, q):
        raise NotDistinguishable(f"{format_process(p)} and {format_process(q)} are {mode.value} bisimilar")
    arena = _GameArena(lts, partition, mode)
    start = (lts.index[tuple(p)], lts.index[tuple(q)])
    rank = _solve_ranks(arena, start, max_positions)
    if rank[start] == float("inf"):
        raise AssertionError("inequivalent pair without an Attacker win; partition is not stable")
    memo: dict[tuple[int, int], Round] = {}
    states = lts.states

    def build(pos) -> Round:
        got = memo.get(pos)
        if got is not None:
            return got
        target = rank[pos]
        chosen = None
        for mv in arena.moves(pos):
            worst = 0
            for _, _, _, options in arena.replies(pos, mv):
                worst = max(worst, min(rank.get(o, float("inf")) for o in options))
            if worst + 1 == target:
                chosen = mv
                break
        side, a, x2 = chosen
        replies = []
        for empty, via, reached, options in arena.replies(pos, chosen):
            best = min(options, key=lambda o: rank.get(o, float("inf")))
            replies.append(Reply(empty, None if via is None else states[via], states[reached], build(best)))
        node = Round(states[pos[0]], states[pos[1]], side, a, states[x2], tuple(replies), int(target))
        memo[pos] = node
        return node

    return build(start)


def replay_strategy(strategy: Round, mode: Mode | str, system: BpaSystem) -> bool:
    """Check every branch is finite, ranks strictly decrease and every
    Defender reply listed is legal and complete for the played move."""
    mode = Mode(mode)
    lts = build_closure(system, [strategy.left, strategy.right], None)
    part = Partition(lts, list(range(len(lts))), mode)  # discrete: all replies enumerated
    arena = _GameArena(lts, part, mode)
    seen: set[int] = set()

    def check(node: Round) -> bool:
        if id(node) in seen:
            return True
        seen.add(id(node))
        pos = (lts.index[node.left], lts.index[node.right])
        move = (node.side, node.label, lts.index[node.target])
        if move not in arena.moves(pos):
            return False
        legal = arena.replies(pos, move)
        if len(legal) != len(node.replies):
            return False
        for rep, (empty, via, reached, options) in zip(node.replies, legal):
            nxt = (lts.index[rep.next.left], lts.index[rep.next.right])
            if nxt not in options or rep.next.rank >= node.rank:
                return False
            if not check(rep.next):
                return False
        return True

    return check(strategy)


# ---------------------------------------------------------------------------
# interactive play


class _Quit(Exception):
    pass


def interactive_game(system: BpaSystem, p: Process, q: Process, mode: Mode | str = Mode.BRANCHING,
                     human: str = "attacker", *, cap: int | None = None, max_rounds: int = 100,
                     read: Callable[[str], str] = input, write: Callable[[str], None] = print) -> list[str]:
    """Play the bisimulation game from ``(p, q)`` in the terminal.

    The machine takes the other role and plays from the computed partition.
    Returns the transcript, one ``round N | player | move | configuration``
    line per step.  Feeding the same answers to ``read`` reproduces it.
    """
    mode = Mode(mode)
    if human not in ("attacker", "defender"):
        raise ValueError("human must be 'attacker' or 'defender'")
    p, q = system.check_process(p), system.check_process(q)
    part = analyse(system, [p, q], mode, cap)  # CapExceeded propagates
    lts = part.lts
    arena = _GameArena(lts, part, mode)
    states = lts.states
    rank_cache: dict = {}
    transcript: list[str] = []

    def cfg(pos):
        return f"({format_process(states[pos[0]])}, {format_process(states[pos[1]])})"

    def log(n, who, move, pos):
        line = f"round {n} | {who} | {move} | {cfg(pos)}"
        transcript.append(line)
        write(line)

    def rank(pos):
        if part.same(*pos):
            return float("inf")
        if pos not in rank_cache:
            rank_cache.update(_solve_ranks(arena, pos, 200_000))
        return rank_cache[pos]

    def ask(prompt, n_options):
        while True:
            ans = read(prompt).strip().lower()
            if ans in ("q", "quit"):
                raise _Quit
            if ans.isdigit() and int(ans) < n_options:
                return int(ans)
            write(f"enter a number 0..{n_options - 1} or 'quit'")

    pos = (lts.index[p], lts.index[q])
    log(0, "start", "-", pos)
    try:
        for n in range(1, max_rounds + 1):
            moves = arena.moves(pos)
            if not moves:
                log(n, "attacker", "stuck; defender wins", pos)
                break
            if human == "attacker":
                for k, (side, a, t) in enumerate(moves):
                    write(f"  [{k}] {'left' if side == 0 else 'right'} -{a}-> {format_process(states[t])}")
                mv = moves[ask("attacker move> ", len(moves))]
            else:
                best = None
                for m in moves:
                    worst = max((min(rank(o) for o in opts) for *_, opts in arena.replies(pos, m)), default=0)
                    if best is None or worst < best[0]:
                        best = (worst, m)
                mv = best[1]
            side, a, t = mv
            log(n, "attacker", f"{'left' if side == 0 else 'right'} -{a}-> {format_process(states[t])}", pos)
            replies = arena.replies(pos, mv)
            if not replies:
                log(n, "defender", "stuck; attacker wins", pos)
                break
            if human == "defender":
                for k, (empty, via, reached, _) in enumerate(replies):
                    desc = "empty" if empty else (
                        f"via {format_process(states[via])} -{a}-> {format_process(states[reached])}"
                        if via is not None else f"={a}=> {format_process(states[reached])}")
                    write(f"  [{k}] {desc}")
                choice = replies[ask("defender reply> ", len(replies))]
            else:
                choice = max(replies, key=lambda r: min(rank(o) for o in r[3]))
                for r in replies:  # lowest index among the best
                    if min(rank(o) for o in r[3]) == min(rank(o) for o in choice[3]):
                        choice = r
                        break
            empty, via, reached, options = choice
            if empty:
                desc = "empty"
            elif via is not None:
                desc = f"via {format_process(states[via])} -{a}-> {format_process(states[reached])}"
            else:
                desc = f"={a}=> {format_process(states[reached])}"
            log(n, "defender", desc, pos)
            if len(options) == 1:
                pos = options[0]
            elif human == "attacker":
                write(f"  [0] continue from {cfg(options[0])}")
                write(f"  [1] continue from {cfg(options[1])}")
                pos = options[ask("attacker choice> ", 2)]
                log(n, "attacker", "choose", pos)
            else:
                pos = min(options, key=rank)
                log(n, "attacker", "choose", pos)
    except _Quit:
        log(len(transcript), "human", "quit", pos)
    return transcript


# ---------------------------------------------------------------------------
# export


def lts_to_dot(lts: Lts, partition: Partition | None = None, name: str = "lts") -> str:
    lines = [f"digraph {name} {{", "  rankdir=LR;"]
    for i, p in enumerate(lts.states):
        attrs = [f'label="{format_process(p)}"']
        if i in lts.seeds:
            attrs.append("shape=doublecircle")
        if partition is not None:
            attrs.append(f'group="b{partition.blocks[i]}"')
        lines.append(f"  s{i} [{', '.join(attrs)}];")
    for s, a, t in lts.transitions:
        style = ", style=dashed" if a == TAU else ""
        lines.append(f'  s{s} -> s{t} [label="{a}"{style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def equivalence_classes(partition: Partition, processes: Sequence[Process]) -> list[int]:
    return [partition.block_of(p) for p in processes]
