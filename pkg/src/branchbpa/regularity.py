"""Branching regularity of normed BPA processes via the weighted graph G.

Nodes of G are pairs ``(X, R)`` with ``R`` a realizable redundant set.  A rule
``X -l-> s Y d`` gives an edge ``(X, R) -> (Y, R')``: weight 0 with ``R' = R``
when every variable of ``d`` is in ``R``, otherwise weight 1 with ``R'`` the
redundant set of ``d`` on top of a process with set ``R``.  A process is
irregular iff one of its suffix nodes reaches a cycle of positive weight.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .core import BpaSystem, Process, compute_norms, erasing_trace, format_process, silent_erasable
from .equivalence import CapExceeded
from .kernels import strongly_connected_components
from .redundancy import branching_norm, build_rd_tree, format_set, rd_fold, rd_step

Node = tuple[str, frozenset]


class NotNormed(ValueError):
    pass


@dataclass
class RdGraph:
    nodes: list[Node]
    # (u, v) -> (weight, rule index, body position) realizing that weight
    edges: dict[tuple[Node, Node], tuple[int, int, int]]
    order: dict[Node, int] = field(default_factory=dict)

    def __post_init__(self):
        self.order = {v: i for i, v in enumerate(self.nodes)}
        succ: dict[Node, list[Node]] = {v: [] for v in self.nodes}
        for u, v in self.edges:
            succ[u].append(v)
        for u in succ:
            succ[u].sort(key=self.order.__getitem__)
        self.succ = succ

    def weight(self, u: Node, v: Node) -> int:
        return self.edges[(u, v)][0]

    def reachable(self, sources, zero_only: bool = False) -> set[Node]:
        seen = set(sources)
        queue = deque(seen)
        while queue:
            u = queue.popleft()
            for v in self.succ[u]:
                if v not in seen and (not zero_only or self.weight(u, v) == 0):
                    seen.add(v)
                    queue.append(v)
        return seen


def format_node(node: Node) -> str:
    return f"({node[0]},{format_set(node[1])})"


def _set_key(system: BpaSystem):
    v0 = sorted(silent_erasable(system))
    bit = {z: 1 << i for i, z in enumerate(v0)}
    return lambda r: sum(bit[z] for z in r)


def build_rd_graph(system: BpaSystem, cap: int | None = None) -> RdGraph:
    cached = system._memo.get("rd_graph")
    if cached is not None:
        return cached
    norms = compute_norms(system)
    if not norms.all_normed:
        raise NotNormed("unnormed variables: " + " ".join(norms.unnormed))
    tree = build_rd_tree(system, cap)
    sets = sorted(tree.realizable_sets, key=_set_key(system))
    nodes = [(x, r) for x in system.variables for r in sets]
    edges: dict[tuple[Node, Node], tuple[int, int, int]] = {}
    for x, r in nodes:
        for ri, rule in enumerate(system.rules):
            if rule.head != x:
                continue
            for pos, y in enumerate(rule.body):
                delta = rule.body[pos + 1:]
                if set(delta) <= r:
                    w, r2 = 0, r
                else:
                    w, r2 = 1, r
                    for z in reversed(delta):
                        r2 = rd_step(system, z, r2, cap)
                key = ((x, r), (y, r2))
                if key not in edges or w > edges[key][0]:
                    edges[key] = (w, ri, pos)
    g = RdGraph(nodes, edges)
    for (u, v), (w, _, _) in edges.items():
        assert w == 1 or u[1] == v[1], "weight-0 edge changed the redundant set"
    system._memo["rd_graph"] = g
    return g


def _scc_ids(g: RdGraph) -> dict[Node, int]:
    succ = [[g.order[v] for v in g.succ[u]] for u in g.nodes]
    comp = {}
    for c, members in enumerate(strongly_connected_components(len(g.nodes), succ)):
        for i in members:
            comp[g.nodes[i]] = c
    return comp


def growing_nodes(g: RdGraph, method: str = "ab") -> frozenset[Node]:
    """Nodes on a cycle of positive weight.

    ``ab``: collect the weight-0 reach B of a node and the weight-1 successors
    A of B; the node grows iff it is reachable from A.  Every member of A is
    reachable from the node, so "reachable back" is a same-component test.
    ``scc``: the node's strongly connected component holds a weight-1 edge.
    """
    comp = _scc_ids(g)
    if method == "ab":
        out = set()
        for node in g.nodes:
            b = g.reachable([node], zero_only=True)
            a = {v for u in b for v in g.succ[u] if g.weight(u, v) == 1}
            if any(comp[v] == comp[node] for v in a):
                out.add(node)
        return frozenset(out)
    if method == "scc":
        hot = {comp[u] for (u, v), (w, _, _) in g.edges.items() if w == 1 and comp[u] == comp[v]}
        return frozenset(node for node in g.nodes if comp[node] in hot)
    raise ValueError(f"unknown method {method!r}")


@dataclass
class WitnessPath:
    """Path from the start node to a growing node, then one positive cycle.

    ``nodes[i] == nodes[k]`` and the weights on ``(i, k]`` sum to at least one.
    ``position`` is the index in the queried process of the variable the
    path starts from.
    """

    nodes: list[Node]
    weights: list[int]
    realizers: list[tuple[int, int]]
    i: int
    k: int
    position: int

    def lines(self) -> list[str]:
        def mark(j):
            return "  <- loop start" if j == self.i else ("  <- loop end" if j == self.k else "")

        out = [format_node(self.nodes[0]) + mark(0)]
        for j, w in enumerate(self.weights, start=1):
            out.append(f"  -{w}-> {format_node(self.nodes[j])}{mark(j)}")
        return out

    def __str__(self) -> str:
        return "\n".join(self.lines())


@dataclass
class RegularityVerdict:
    outcome: str  # Regular | NotRegular | Undecided
    witness: WitnessPath | None = None
    reason: str = ""

    @property
    def regular(self) -> bool:
        return self.outcome == "Regular"


def _bfs(g: RdGraph, start: Node) -> dict[Node, Node | None]:
    parent: dict[Node, Node | None] = {start: None}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in g.succ[u]:
            if v not in parent:
                parent[v] = u
                queue.append(v)
    return parent


def _path(parent, target) -> list[Node]:
    out = [target]
    while parent[out[-1]] is not None:
        out.append(parent[out[-1]])
    out.reverse()
    return out


def _positive_cycle(g: RdGraph, node: Node) -> list[Node]:
    """Shortest closed walk at ``node`` using a weight-1 edge."""
    from_node = _bfs(g, node)
    best = None
    for (u, v), (w, _, _) in sorted(g.edges.items(), key=lambda e: (g.order[e[0][0]], g.order[e[0][1]])):
        if w != 1 or u not in from_node:
            continue
        back = _bfs(g, v)
        if node not in back:
            continue
        walk = _path(from_node, u) + _path(back, node)
        if best is None or len(walk) < len(best):
            best = walk
    return best


def find_witness(g: RdGraph, start: Node, growing: frozenset, position: int = 0) -> WitnessPath | None:
    parent = _bfs(g, start)
    best = None
    for node in g.nodes:
        if node in growing and node in parent:
            path = _path(parent, node)
            cycle = _positive_cycle(g, node)
            if best is None or len(path) + len(cycle) < len(best[0]) + len(best[1]):
                best = (path, cycle)
    if best is None:
        return None
    path, cycle = best
    nodes = path + cycle[1:]
    weights = []
    realizers = []
    for u, v in zip(nodes, nodes[1:]):
        w, ri, pos = g.edges[(u, v)]
        weights.append(w)
        realizers.append((ri, pos))
    return WitnessPath(nodes, weights, realizers, len(path) - 1, len(nodes) - 1, position)


def decide_regular(system: BpaSystem, alpha, cap: int | None = None) -> RegularityVerdict:
    alpha = system.check_process(alpha)
    try:
        g = build_rd_graph(system, cap)
        if not alpha:
            return RegularityVerdict("Regular")
        suffix_sets = rd_fold(system, alpha, cap)
    except CapExceeded as exc:
        return RegularityVerdict("Undecided", reason=str(exc))
    growing = growing_nodes(g)
    for i, (x, r) in enumerate(zip(alpha, suffix_sets)):
        w = find_witness(g, (x, r), growing, i)
        if w is not None:
            return RegularityVerdict("NotRegular", w)
    return RegularityVerdict("Regular")


def rd_graph_to_dot(g: RdGraph, growing: frozenset | None = None) -> str:
    lines = ["digraph G {", "  rankdir=LR;"]
    for i, node in enumerate(g.nodes):
        extra = ", style=filled, fillcolor=lightpink" if growing and node in growing else ""
        lines.append(f'  n{i} [label="{format_node(node)}"{extra}];')
    for (u, v), (w, _, _) in sorted(g.edges.items(), key=lambda e: (g.order[e[0][0]], g.order[e[0][1]])):
        style = ', color=red, penwidth=2' if w else ''
        lines.append(f'  n{g.order[u]} -> n{g.order[v]} [label="{w}"{style}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# pumping


def pumped_processes(system: BpaSystem, alpha, witness: WitnessPath, repeats=(0, 1, 2, 3)) -> dict[int, Process]:
    """Concrete processes ``Y (loop)^m D rho`` obtained by replaying the witness.

    Each edge ``(X, R) -> (Y, R')`` realized by ``X -l-> s Y d`` turns a current
    ``X rho`` into ``Y d rho`` after erasing ``s``.  Every returned process is
    reachable from ``alpha``.
    """
    alpha = system.check_process(alpha)
    rho = alpha[witness.position + 1:]

    def pushed(edge_range):
        stack: Process = ()
        for j in edge_range:
            ri, pos = witness.realizers[j]
            stack = system.rules[ri].body[pos + 1:] + stack
        return stack

    prefix = pushed(range(witness.i))
    loop = pushed(range(witness.i, witness.k))
    head = witness.nodes[witness.i][0]
    return {m: (head,) + loop * m + prefix + rho for m in repeats}


def replay_run(system: BpaSystem, alpha, witness: WitnessPath, m: int) -> list[tuple[str, Process]]:
    """A concrete transition sequence from ``alpha`` to the m-times pumped process."""
    alpha = system.check_process(alpha)
    run: list[tuple[str, Process]] = []
    # erase the prefix in front of the witness position
    for label, p in erasing_trace(system, alpha[:witness.position]):
        run.append((label, p + alpha[witness.position:]))
    cur = alpha[witness.position:]
    order = list(range(witness.i)) + list(range(witness.i, witness.k)) * m
    for j in order:
        ri, pos = witness.realizers[j]
        rule = system.rules[ri]
        assert cur[0] == rule.head
        rest = cur[1:]
        cur = rule.body + rest
        run.append((rule.label, cur))
        sigma = rule.body[:pos]
        for label, p in erasing_trace(system, sigma):
            run.append((label, p + rule.body[pos:] + rest))
        cur = rule.body[pos:] + rest
    return run


def pumping_growth(system: BpaSystem, alpha, witness: WitnessPath, cap: int | None = None,
                   repeats=(1, 2, 3)) -> dict[int, int]:
    """``m -> ||P_m||_b - ||P_0||_b``; each value should be at least ``m``."""
    procs = pumped_processes(system, alpha, witness, (0,) + tuple(repeats))
    base = branching_norm(system, procs[0], cap=cap)
    return {m: branching_norm(system, procs[m], cap=cap) - base for m in repeats}
