"""Walk-tree construction: child order, cycle closures, boundary leaves."""
from __future__ import annotations

import pytest

from spindecay.core import BLUE, GREEN
from spindecay.errors import BudgetExceededError, InvalidParameterError
from spindecay.graphs import Boundary, complete, cycle, from_edges, path
from spindecay.saw import (
    FIXED,
    FREE,
    closing_spin,
    dump_levels,
    expand,
    root_node,
    saw_tree_size,
)


def test_children_come_in_ascending_vertex_order():
    g = from_edges(4, [(0, 3), (0, 1), (0, 2)])
    kids = expand(g, root_node(g, 0))
    assert [c.origin for c in kids] == [1, 2, 3]
    assert all(c.kind == FREE and c.depth == 1 for c in kids)


def test_parent_edge_is_not_walked_back():
    g = path(3)
    mid = expand(g, root_node(g, 1))
    child0 = [c for c in mid if c.origin == 0][0]
    assert expand(g, child0) == []


def test_triangle_closures_pin_opposite_spins():
    g = complete(3)
    root = root_node(g, 0)
    via1 = [c for c in expand(g, root) if c.origin == 1][0]
    via2 = [c for c in expand(g, root) if c.origin == 2][0]

    # 0 -> 1 -> 2 -> 0: the closing edge (2,0) outranks the departure (0,1)
    deep = expand(g, [c for c in expand(g, via1) if c.origin == 2][0])
    assert len(deep) == 1 and deep[0].kind == FIXED and deep[0].spin == BLUE

    # 0 -> 2 -> 1 -> 0: closing from 1, departure went to 2
    deep = expand(g, [c for c in expand(g, via2) if c.origin == 1][0])
    assert len(deep) == 1 and deep[0].kind == FIXED and deep[0].spin == GREEN

    assert closing_spin(1, 2) == BLUE
    assert closing_spin(2, 1) == GREEN


def test_boundary_vertices_become_fixed_leaves():
    g = path(3)
    b = Boundary(fixed={2: GREEN})
    kids = expand(g, root_node(g, 1), b)
    leaf = [c for c in kids if c.origin == 2][0]
    assert leaf.kind == FIXED and leaf.spin == GREEN
    with pytest.raises(InvalidParameterError):
        expand(g, leaf, b)


def _brute_size(adj, v, depth):
    """Independent recount: prefixes of self-avoiding walks from v."""

    def walk(u, visited, walked, d):
        total = 1
        if d == depth:
            return total
        for w in adj[u]:
            if w == walked:
                continue
            if w in visited:
                total += 1  # closure leaf, counted but never expanded
            else:
                total += walk(w, visited | {w}, u, d + 1)
        return total

    return walk(v, frozenset({v}), None, 0)


@pytest.mark.parametrize("g", [complete(4), cycle(5), path(4),
                               from_edges(5, [(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (1, 4)])])
def test_tree_size_matches_independent_recount(g):
    for depth in (0, 1, 2, None):
        d = depth if depth is not None else g.n + 2
        assert saw_tree_size(g, 0, depth=depth) == _brute_size(g.adj, 0, d)


def test_tree_size_respects_boundaries_and_caps():
    g = complete(4)
    b = Boundary(fixed={1: BLUE, 2: BLUE, 3: BLUE})
    assert saw_tree_size(g, 0, boundary=b) == 4  # root plus three leaves
    assert saw_tree_size(g, 1, boundary=b) == 1  # a pinned root never expands
    with pytest.raises(BudgetExceededError):
        saw_tree_size(g, 0, cap=3)


def test_root_node_validation():
    with pytest.raises(InvalidParameterError):
        root_node(path(2), 5)


def test_dump_levels_shape():
    doc = dump_levels(cycle(4), 0, depth=2)
    assert doc["origin"] == 0 and doc["kind"] == FREE
    assert {c["origin"] for c in doc["children"]} == {1, 3}
    grand = doc["children"][0]["children"]
    assert all(set(node) <= {"origin", "kind", "spin", "depth", "children"}
               for node in grand)
