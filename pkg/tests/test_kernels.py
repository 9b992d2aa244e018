from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from branchbpa import _kernels_py, kernels

try:
    from branchbpa import _kernels as _kernels_cy
except ImportError:  # extension not built
    _kernels_cy = None

needs_cython = pytest.mark.skipif(_kernels_cy is None, reason="compiled kernels not built")


@st.composite
def edge_lists(draw):
    n = draw(st.integers(1, 12))
    m = draw(st.integers(0, 3 * n))
    tau = 2
    src = draw(st.lists(st.integers(0, n - 1), min_size=m, max_size=m))
    lbl = draw(st.lists(st.integers(0, tau), min_size=m, max_size=m))
    dst = draw(st.lists(st.integers(0, n - 1), min_size=m, max_size=m))
    return n, src, lbl, dst, tau


def test_backend_reported():
    assert kernels.BACKEND in ("cython", "python")


def test_empty_input():
    assert list(_kernels_py.refine_partition(0, [], [], [], 0)) == []


def test_tau_chain_branching():
    # 0 -tau-> 1 -a-> 2 : states 0 and 1 are branching bisimilar
    blocks = _kernels_py.refine_partition(3, [0, 1], [1, 0], [1, 2], 1, True)
    assert blocks[0] == blocks[1] != blocks[2]
    strong = _kernels_py.refine_partition(3, [0, 1], [1, 0], [1, 2], 1, False)
    assert len(set(strong)) == 3


def test_saturate_reflexive():
    src, lbl, dst = _kernels_py.saturate(2, [0], [0], [1], 1)
    edges = set(zip(src, lbl, dst))
    assert {(0, 1, 0), (1, 1, 1), (0, 0, 1)} <= edges


def test_sccs_sinks_first():
    comps = _kernels_py._sccs(4, [[1], [0, 2], [3], [2]])
    assert [sorted(c) for c in comps] == [[2, 3], [0, 1]]


@needs_cython
@settings(max_examples=200, deadline=None)
@given(edge_lists(), st.booleans())
def test_backends_agree_on_refinement(edges, branching):
    n, src, lbl, dst, tau = edges
    assert list(_kernels_cy.refine_partition(n, src, lbl, dst, tau, branching)) == \
        list(_kernels_py.refine_partition(n, src, lbl, dst, tau, branching))


@needs_cython
@settings(max_examples=200, deadline=None)
@given(edge_lists())
def test_backends_agree_on_saturation(edges):
    n, src, lbl, dst, tau = edges
    cy = set(zip(*_kernels_cy.saturate(n, src, lbl, dst, tau)))
    py = set(zip(*_kernels_py.saturate(n, src, lbl, dst, tau)))
    assert cy == py
