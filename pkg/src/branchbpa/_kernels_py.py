"""Pure-Python partition refinement kernels.

Both backends take an edge list ``(src, lbl, dst)`` over states ``0..n-1`` and
return block ids numbered by first occurrence in state order, so the two
implementations are comparable element-wise.
"""
from __future__ import annotations


def _adjacency(n, src, lbl, dst):
    out = [[] for _ in range(n)]
    for s, a, t in zip(src, lbl, dst):
        out[s].append((a, t))
    return out


def _sccs(n, succ):
    """Tarjan, iterative.  Components come out sinks first."""
    index = [-1] * n
    low = [0] * n
    on_stack = [False] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack[root] = True
        work = [(root, iter(succ[root]))]
        while work:
            v, it = work[-1]
            advanced = False
            for w in it:
                if index[w] == -1:
                    index[w] = low[w] = counter
                    counter += 1
                    stack.append(w)
                    on_stack[w] = True
                    work.append((w, iter(succ[w])))
                    advanced = True
                    break
                if on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
            if advanced:
                continue
            work.pop()
            if work:
                u = work[-1][0]
                if low[v] < low[u]:
                    low[u] = low[v]
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(comp)
    return comps


def _renumber(n, keys_of):
    ids: dict = {}
    return [ids.setdefault(keys_of(s), len(ids)) for s in range(n)], len(ids)


def refine_partition(n, src, lbl, dst, tau=-1, branching=True):
    """Coarsest stable partition.

    ``branching=True`` gives branching bisimilarity (silent steps inside a
    block are inert); ``False`` gives strong bisimilarity, which on a
    saturated system is weak bisimilarity.
    """
    if n == 0:
        return []
    out = _adjacency(n, src, lbl, dst)
    block = [0] * n
    nblocks = 1
    while True:
        if branching:
            inert = [[t for a, t in out[s] if a == tau and block[t] == block[s]] for s in range(n)]
            comps = _sccs(n, inert)
            comp_of = [0] * n
            for c, members in enumerate(comps):
                for s in members:
                    comp_of[s] = c
            sigs: list[frozenset] = []
            for c, members in enumerate(comps):
                sig = set()
                for s in members:
                    bs = block[s]
                    for a, t in out[s]:
                        if a == tau and block[t] == bs:
                            if comp_of[t] != c:
                                sig |= sigs[comp_of[t]]
                        else:
                            sig.add((a, block[t]))
                sigs.append(frozenset(sig))
            new, count = _renumber(n, lambda s: (block[s], sigs[comp_of[s]]))
        else:
            new, count = _renumber(
                n, lambda s: (block[s], frozenset((a, block[t]) for a, t in out[s]))
            )
        if count == nblocks:
            return new
        block, nblocks = new, count


def saturate(n, src, lbl, dst, tau):
    """Weak transitions: ``s =tau=> t`` (reflexive) and ``s =a=> t``."""
    out = _adjacency(n, src, lbl, dst)
    tau_succ = [[t for a, t in out[s] if a == tau] for s in range(n)]
    comps = _sccs(n, tau_succ)
    comp_of = [0] * n
    for c, members in enumerate(comps):
        for s in members:
            comp_of[s] = c
    reach: list[frozenset] = []
    for c, members in enumerate(comps):
        r = set(members)
        for s in members:
            for t in tau_succ[s]:
                if comp_of[t] != c:
                    r |= reach[comp_of[t]]
        reach.append(frozenset(r))
    closure = [sorted(reach[comp_of[s]]) for s in range(n)]
    edges = set()
    for s in range(n):
        for u in closure[s]:
            edges.add((s, tau, u))
            for a, t in out[u]:
                if a != tau:
                    for v in closure[t]:
                        edges.add((s, a, v))
    edges = sorted(edges)
    return [e[0] for e in edges], [e[1] for e in edges], [e[2] for e in edges]
