"""Redundant sets, the rd-step table, the representative tree and branching norms.

``Rd(a)`` is the set of variables ``Z`` with ``Z a`` branching bisimilar to
``a``.  Since ``Rd(X a)`` depends only on ``X`` and ``Rd(a)``, every realizable
set gets one representative process and ``rd_step`` works on sets alone.

All tables are memoized per system.  Cap overruns surface as ``CapExceeded``.
"""
from __future__ import annotations

from collections import deque
from collections.abc import Iterable
from dataclasses import dataclass, field

from .core import TAU, BpaSystem, Process, format_process, silent_erasable
from .equivalence import CapExceeded, Mode, analyse, build_closure, compute_partition, decide

RedundantSet = frozenset


class UnrealizableSet(ValueError):
    pass


def format_set(r: Iterable[str]) -> str:
    return "{" + ", ".join(sorted(r)) + "}"


def _tables(system: BpaSystem) -> tuple[dict, dict, dict]:
    memo = system._memo
    if "rd" not in memo:
        memo["rd"] = {}
        memo["rd_reps"] = {}
        memo["rd_step"] = {}
    return memo["rd"], memo["rd_reps"], memo["rd_step"]


def _labels_of(system: BpaSystem, x: str) -> frozenset[str]:
    table = system._memo.setdefault("labels_of", {})
    got = table.get(x)
    if got is None:
        got = table[x] = frozenset(r.label for r in system.rules_by_head[x])
    return got


def _candidates(system: BpaSystem, alpha: Process) -> list[str]:
    v0 = sorted(silent_erasable(system))
    if alpha and TAU in _labels_of(system, alpha[0]):
        return v0
    # without a silent move at the head, alpha can only answer Z's visible
    # actions with its own immediate ones
    head = _labels_of(system, alpha[0]) if alpha else frozenset()
    return [z for z in v0 if (_labels_of(system, z) - {TAU}) <= head]


def _register(reps: dict, r: frozenset, alpha: Process) -> None:
    cur = reps.get(r)
    if cur is None or len(alpha) < len(cur):
        reps[r] = alpha


def redundant_set(system: BpaSystem, alpha: Iterable[str], cap: int | None = None) -> frozenset[str]:
    alpha = system.check_process(alpha)
    rd, reps, _ = _tables(system)
    got = rd.get(alpha)
    if got is not None:
        return got
    cands = _candidates(system, alpha)
    if not cands:
        result = frozenset()
    else:
        seeds = [alpha] + [(z,) + alpha for z in cands]
        part = analyse(system, seeds, Mode.BRANCHING, cap)
        target = part.block_of(alpha)
        result = frozenset(z for z in cands if part.block_of((z,) + alpha) == target)
    rd[alpha] = result
    _register(reps, result, alpha)
    return result


def representative(system: BpaSystem, r: Iterable[str], cap: int | None = None) -> Process:
    r = frozenset(r)
    _, reps, _ = _tables(system)
    if r not in reps:
        build_rd_tree(system, cap)
    if r not in reps:
        raise UnrealizableSet(f"no process has redundant set {format_set(r)}")
    return reps[r]


def rd_step(system: BpaSystem, x: str, r: Iterable[str], cap: int | None = None) -> frozenset[str]:
    r = frozenset(r)
    _, _, steps = _tables(system)
    key = (x, r)
    got = steps.get(key)
    if got is None:
        rep = representative(system, r, cap)
        got = steps[key] = redundant_set(system, (x,) + rep, cap)
    return got


def rd_fold(system: BpaSystem, alpha: Iterable[str], cap: int | None = None) -> list[frozenset[str]]:
    """``[Rd(alpha[i+1:]) for i in range(len(alpha))] + [Rd(alpha)]``, built right to left."""
    alpha = system.check_process(alpha)
    r = redundant_set(system, (), cap)
    out = [r]
    for x in reversed(alpha):
        r = rd_step(system, x, r, cap)
        out.append(r)
    out.reverse()
    # out[i] = Rd(alpha[i:]); shift so entry i is the strict suffix after alpha[i]
    return out[1:] + [out[0]]


# ---------------------------------------------------------------------------
# representative tree


@dataclass
class RdNode:
    process: Process
    rdset: frozenset[str]
    mark: str = ""  # processed | leaf
    parent: int | None = None
    via: str | None = None

    @property
    def depth(self) -> int:
        return len(self.process)


@dataclass
class RdTree:
    nodes: list[RdNode] = field(default_factory=list)
    children: dict[int, list[int]] = field(default_factory=dict)
    reps: dict[frozenset, Process] = field(default_factory=dict)

    @property
    def realizable_sets(self) -> list[frozenset[str]]:
        return list(self.reps)

    def representative(self, r: Iterable[str]) -> Process:
        r = frozenset(r)
        if r not in self.reps:
            raise UnrealizableSet(f"no process has redundant set {format_set(r)}")
        return self.reps[r]

    @property
    def depth(self) -> int:
        return max(n.depth for n in self.nodes)

    def dump(self) -> str:
        return "".join(
            f"{format_process(n.process)} | {format_set(n.rdset)} | {n.mark}\n" for n in self.nodes
        )


def build_rd_tree(system: BpaSystem, cap: int | None = None) -> RdTree:
    cached = system._memo.get("rd_tree")
    if cached is not None:
        return cached
    _, reps, steps = _tables(system)
    tree = RdTree()
    root = RdNode((), redundant_set(system, (), cap))
    tree.nodes.append(root)
    queue = deque([0])
    while queue:
        idx = queue.popleft()
        node = tree.nodes[idx]
        if node.rdset in tree.reps:
            node.mark = "leaf"
            continue
        node.mark = "processed"
        tree.reps[node.rdset] = node.process
        _register(reps, node.rdset, node.process)
        kids = tree.children[idx] = []
        for x in system.variables:
            key = (x, node.rdset)
            r = steps.get(key)
            if r is None:
                r = steps[key] = redundant_set(system, (x,) + node.process, cap)
            child = RdNode((x,) + node.process, r, parent=idx, via=x)
            kids.append(len(tree.nodes))
            tree.nodes.append(child)
            if r in tree.reps:
                child.mark = "leaf"
            else:
                queue.append(len(tree.nodes) - 1)
    system._memo["rd_tree"] = tree
    return tree


# ---------------------------------------------------------------------------
# branching norms


def _suffix_process(system: BpaSystem, suffix, cap) -> Process:
    if suffix is None:
        return representative(system, redundant_set(system, (), cap), cap)
    if isinstance(suffix, frozenset):
        return representative(system, suffix, cap)
    return system.check_process(suffix)


def _norm_by_closure(system: BpaSystem, alpha: Process, gamma: Process, cap):
    """0/1 shortest path from alpha.gamma to the class of gamma."""
    start = alpha + gamma
    lts = build_closure(system, [start, gamma], cap)
    part = compute_partition(lts, Mode.BRANCHING)
    goal = part.blocks[lts.index[gamma]]
    blocks = part.blocks
    n = len(lts)
    dist = [None] * n
    prev: list = [None] * n
    s0 = lts.index[start]
    dist[s0] = 0
    dq = deque([s0])
    done = [False] * n
    while dq:
        s = dq.popleft()
        if done[s]:
            continue
        done[s] = True
        if blocks[s] == goal:
            total = dist[s]
            path = []
            while prev[s] is not None:
                p, a, cost = prev[s]
                path.append((a, lts.states[s], cost))
                s = p
            path.reverse()
            return total, path
        for a, t in lts.out[s]:
            cost = 0 if a == TAU and blocks[t] == blocks[s] else 1
            nd = dist[s] + cost
            if dist[t] is None or nd < dist[t]:
                dist[t] = nd
                prev[t] = (s, a, cost)
                if cost:
                    dq.append(t)
                else:
                    dq.appendleft(t)
    return None, []


def _class_preserving(system: BpaSystem, x: str, body: Process, r: frozenset, cap) -> bool:
    if not body:
        return x in r
    rep = representative(system, r, cap)
    v = decide(system, (x,) + rep, body + rep, Mode.BRANCHING, cap)
    if v.undecided:
        raise v.cap_report
    return v.equivalent


def relative_norms(system: BpaSystem, demands: Iterable[tuple[str, frozenset]], cap=None) -> dict:
    """``(X, R) -> ||X||^R`` for every pair reachable from ``demands``.

    Uses the decomposition ``||s rho||^R = ||rho||^R + ||s||^Rd(rho.rep(R))``,
    solved as a shortest-path fixpoint; ``None`` marks an infinite norm.
    """
    eqs: dict[tuple[str, frozenset], list] = {}
    work = [(x, frozenset(r)) for x, r in demands]
    while work:
        key = work.pop()
        if key in eqs:
            continue
        x, r = key
        if x in r:
            eqs[key] = [(0, [])]
            continue
        options = []
        for rule in system.rules_by_head[x]:
            terms = []
            rr = r
            for y in reversed(rule.body):
                terms.append((y, rr))
                rr = rd_step(system, y, rr, cap)
            cost = 0 if rule.label == TAU and _class_preserving(system, x, rule.body, r, cap) else 1
            options.append((cost, terms))
            work.extend(t for t in terms if t not in eqs)
        eqs[key] = options
    inf = float("inf")
    val = {k: inf for k in eqs}
    changed = True
    while changed:
        changed = False
        for k, options in eqs.items():
            best = val[k]
            for cost, terms in options:
                total = cost + sum(val[t] for t in terms)
                if total < best:
                    best = total
            if best < val[k]:
                val[k] = best
                changed = True
    return {k: (None if v == inf else int(v)) for k, v in val.items()}


def _norm_compositional(system: BpaSystem, alpha: Process, gamma: Process, cap) -> int | None:
    r = redundant_set(system, gamma, cap)
    _register(_tables(system)[1], r, gamma)
    demands = []
    for x in reversed(alpha):
        demands.append((x, r))
        r = rd_step(system, x, r, cap)
    table = relative_norms(system, demands, cap)
    total = 0
    for d in demands:
        v = table[d]
        if v is None:
            return None
        total += v
    return total


def branching_norm(system: BpaSystem, alpha: Iterable[str], suffix=None, cap: int | None = None,
                   method: str = "auto") -> int | None:
    """``||alpha||^gamma``: state-changing steps needed to reach the class of gamma.

    ``suffix`` is a process, a realizable redundant set (its representative is
    used) or ``None`` for the absolute branching norm.  ``method`` is
    ``closure``, ``compositional`` or ``auto`` (closure first, compositional
    when the closure exceeds ``cap``).  ``None`` means the class is unreachable.
    """
    alpha = system.check_process(alpha)
    gamma = _suffix_process(system, suffix, cap)
    if method == "compositional":
        return _norm_compositional(system, alpha, gamma, cap)
    try:
        return _norm_by_closure(system, alpha, gamma, cap)[0]
    except CapExceeded:
        if method == "closure":
            raise
    return _norm_compositional(system, alpha, gamma, cap)


def norm_path(system: BpaSystem, alpha: Iterable[str], suffix=None, cap: int | None = None):
    """The optimal run as ``(label, state, cost)`` triples, for audit output."""
    alpha = system.check_process(alpha)
    gamma = _suffix_process(system, suffix, cap)
    return _norm_by_closure(system, alpha, gamma, cap)[1]
