# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
# distutils: language = c++
"""Compiled partition refinement kernels.  Same contract as ``_kernels_py``."""

from libcpp.vector cimport vector
from libcpp.map cimport map as cmap
from libcpp.pair cimport pair
from libcpp.algorithm cimport sort, unique

ctypedef long long i64


cdef struct Csr:
    int n
    vector[int] off
    vector[int] lbl
    vector[int] dst


cdef void build_csr(Csr* g, int n, src, lbl, dst):
    cdef Py_ssize_t m = len(src)
    cdef Py_ssize_t e
    cdef vector[int] count
    cdef vector[int] pos
    cdef int s
    g.n = n
    count.assign(n + 1, 0)
    for e in range(m):
        count[<int>src[e] + 1] += 1
    for s in range(n):
        count[s + 1] += count[s]
    g.off = count
    pos = count
    g.lbl.assign(m, 0)
    g.dst.assign(m, 0)
    for e in range(m):
        s = src[e]
        g.lbl[pos[s]] = lbl[e]
        g.dst[pos[s]] = dst[e]
        pos[s] += 1


cdef int tarjan(Csr* g, int tau, int* block, bint restrict_block,
                vector[int]& comp_of, vector[vector[int]]& comps) nogil:
    """SCCs of the silent subgraph (optionally only block-internal edges), sinks first."""
    cdef int n = g.n
    cdef vector[int] index, low, eptr, stack, work
    cdef vector[char] on_stack
    cdef vector[int] members
    cdef int counter = 0, root, v, w, e, u
    cdef bint advanced
    index.assign(n, -1)
    low.assign(n, 0)
    eptr.assign(n, 0)
    on_stack.assign(n, 0)
    comp_of.assign(n, -1)
    comps.clear()
    for root in range(n):
        if index[root] != -1:
            continue
        index[root] = counter
        low[root] = counter
        counter += 1
        stack.push_back(root)
        on_stack[root] = 1
        eptr[root] = g.off[root]
        work.push_back(root)
        while work.size() > 0:
            v = work.back()
            advanced = False
            while eptr[v] < g.off[v + 1]:
                e = eptr[v]
                eptr[v] += 1
                if g.lbl[e] != tau:
                    continue
                w = g.dst[e]
                if restrict_block and block[w] != block[v]:
                    continue
                if index[w] == -1:
                    index[w] = counter
                    low[w] = counter
                    counter += 1
                    stack.push_back(w)
                    on_stack[w] = 1
                    eptr[w] = g.off[w]
                    work.push_back(w)
                    advanced = True
                    break
                if on_stack[w] and index[w] < low[v]:
                    low[v] = index[w]
            if advanced:
                continue
            work.pop_back()
            if work.size() > 0:
                u = work.back()
                if low[v] < low[u]:
                    low[u] = low[v]
            if low[v] == index[v]:
                members.clear()
                while True:
                    w = stack.back()
                    stack.pop_back()
                    on_stack[w] = 0
                    comp_of[w] = <int>comps.size()
                    members.push_back(w)
                    if w == v:
                        break
                comps.push_back(members)
    return <int>comps.size()


cdef void sort_unique(vector[i64]& v) nogil:
    sort(v.begin(), v.end())
    v.erase(unique(v.begin(), v.end()), v.end())


def refine_partition(int n, src, lbl, dst, int tau=-1, bint branching=True):
    if n == 0:
        return []
    cdef Csr g
    build_csr(&g, n, src, lbl, dst)
    cdef vector[int] block, new_block, comp_of, comp_id
    cdef vector[vector[int]] comps
    cdef vector[vector[i64]] sigs
    cdef vector[i64] sig
    cdef cmap[pair[int, vector[i64]], int] keys
    cdef pair[int, vector[i64]] key
    cdef int nblocks = 1, count, c, s, e, t, ncomp, j
    cdef i64 base = n
    block.assign(n, 0)
    new_block.assign(n, 0)
    with nogil:
        while True:
            if branching:
                ncomp = tarjan(&g, tau, block.data(), True, comp_of, comps)
            else:
                # every state is its own component
                comp_of.resize(n)
                comps.clear()
                for s in range(n):
                    comp_of[s] = s
                    comps.push_back(vector[int](1, s))
                ncomp = n
            sigs.clear()
            sigs.resize(ncomp)
            for c in range(ncomp):
                sig.clear()
                for j in range(<int>comps[c].size()):
                    s = comps[c][j]
                    for e in range(g.off[s], g.off[s + 1]):
                        t = g.dst[e]
                        if branching and g.lbl[e] == tau and block[t] == block[s]:
                            if comp_of[t] != c:
                                sig.insert(sig.end(), sigs[comp_of[t]].begin(), sigs[comp_of[t]].end())
                        else:
                            sig.push_back(<i64>g.lbl[e] * base + block[t])
                sort_unique(sig)
                sigs[c] = sig
            keys.clear()
            comp_id.assign(ncomp, -1)
            for s in range(n):
                c = comp_of[s]
                if comp_id[c] == -1:
                    key.first = block[s]
                    key.second = sigs[c]
                    if keys.count(key) == 0:
                        count = <int>keys.size()
                        keys[key] = count
                    comp_id[c] = keys[key]
                new_block[s] = comp_id[c]
            count = <int>keys.size()
            block.swap(new_block)
            if count == nblocks:
                break
            nblocks = count
    return [block[s] for s in range(n)]


def saturate(int n, src, lbl, dst, int tau):
    cdef Csr g
    build_csr(&g, n, src, lbl, dst)
    cdef vector[int] comp_of
    cdef vector[vector[int]] comps
    cdef vector[vector[int]] reach
    cdef vector[int] r
    cdef vector[i64] edges
    cdef int ncomp, c, j, s, e, t, k, u, v, a, q
    cdef i64 nn = n
    cdef i64 code
    with nogil:
        ncomp = tarjan(&g, tau, NULL, False, comp_of, comps)
        reach.resize(ncomp)
        for c in range(ncomp):
            r.clear()
            for j in range(<int>comps[c].size()):
                s = comps[c][j]
                r.push_back(s)
                for e in range(g.off[s], g.off[s + 1]):
                    if g.lbl[e] == tau:
                        t = g.dst[e]
                        if comp_of[t] != c:
                            r.insert(r.end(), reach[comp_of[t]].begin(), reach[comp_of[t]].end())
            sort(r.begin(), r.end())
            r.erase(unique(r.begin(), r.end()), r.end())
            reach[c] = r
        for s in range(n):
            c = comp_of[s]
            for k in range(<int>reach[c].size()):
                u = reach[c][k]
                edges.push_back((<i64>s * (tau + 1) + tau) * nn + u)
                for e in range(g.off[u], g.off[u + 1]):
                    a = g.lbl[e]
                    if a == tau:
                        continue
                    t = g.dst[e]
                    for q in range(<int>reach[comp_of[t]].size()):
                        v = reach[comp_of[t]][q]
                        edges.push_back((<i64>s * (tau + 1) + a) * nn + v)
        sort_edges(edges)
    out_src = []
    out_lbl = []
    out_dst = []
    cdef i64 x
    cdef Py_ssize_t i
    for i in range(<Py_ssize_t>edges.size()):
        x = edges[i]
        out_dst.append(<int>(x % nn))
        x //= nn
        out_lbl.append(<int>(x % (tau + 1)))
        out_src.append(<int>(x // (tau + 1)))
    return out_src, out_lbl, out_dst


cdef void sort_edges(vector[i64]& v) nogil:
    sort_unique(v)
