"""Self-avoiding-walk tree construction.

The tree rooted at a free vertex v enumerates the non-backtracking walks out
of v: each node stands for a walk, and its children extend the walk along
every incident edge except the one it arrived by, visited in canonical
(ascending neighbour id) order.  A step that revisits a vertex already on the
walk closes a cycle and becomes a leaf pinned to a spin; a step onto a
boundary-fixed vertex becomes a leaf carrying that spin.  Ratios computed on
this tree equal the true marginal ratios in the original graph.

The cycle-closing spin compares the closing edge with the edge by which the
walk originally left the revisited vertex, both ranked in that vertex's
canonical order: blue when the closing edge ranks higher, green otherwise.
Flipping the comparison corresponds to ranking every adjacency descending
instead of ascending, which is just a different (equally valid) canonical
order; the constant below picks ours in one place.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .core import BLUE, GREEN
from .errors import BudgetExceededError, InvalidParameterError
from .graphs import Boundary, Graph

# Blue exactly when the closing edge outranks the departing edge at the
# revisited vertex.  Adjacency lists are ascending, so rank order is id order.
CLOSE_BLUE_WHEN_CLOSING_EDGE_RANKS_HIGHER = True

FREE = "free"
FIXED = "fixed"


def closing_spin(departed_to: int, closing_from: int) -> str:
    """Spin of a cycle-closing leaf at a vertex the walk left via departed_to
    and is re-entered from closing_from."""
    higher = closing_from > departed_to
    if CLOSE_BLUE_WHEN_CLOSING_EDGE_RANKS_HIGHER:
        return BLUE if higher else GREEN
    return GREEN if higher else BLUE


@dataclass(frozen=True)
class SawNode:
    """One walk in the tree; `walk` lists the origins root..self."""

    origin: int
    parent: "SawNode | None"
    kind: str  # FREE | FIXED
    spin: str | None
    depth: int
    walk: tuple[int, ...]
    _walk_set: frozenset[int] = field(repr=False, default=frozenset())

    @property
    def is_leaf_spin(self) -> bool:
        return self.kind == FIXED


def root_node(g: Graph, v: int) -> SawNode:
    if not (0 <= v < g.n):
        raise InvalidParameterError(f"root vertex {v} outside 0..{g.n - 1}")
    return SawNode(
        origin=v, parent=None, kind=FREE, spin=None, depth=0,
        walk=(v,), _walk_set=frozenset((v,)),
    )


def expand(g: Graph, node: SawNode, boundary: Boundary | None = None) -> list[SawNode]:
    """Children of a free node, in canonical order.

    Fixed leaves (cycle-closing or boundary) come back with kind FIXED and a
    spin; they are never expanded further.
    """
    if node.kind != FREE:
        raise InvalidParameterError("only free nodes expand")
    fixed = boundary.fixed if boundary is not None else {}
    parent_origin = node.walk[-2] if len(node.walk) >= 2 else None
    out = []
    for w in g.adj[node.origin]:
        if w == parent_origin:
            continue
        walk = node.walk + (w,)
        if w in node._walk_set:
            departed_to = node.walk[node.walk.index(w) + 1]
            out.append(
                SawNode(
                    origin=w, parent=node, kind=FIXED,
                    spin=closing_spin(departed_to, node.origin),
                    depth=node.depth + 1, walk=walk,
                )
            )
        elif w in fixed:
            out.append(
                SawNode(
                    origin=w, parent=node, kind=FIXED, spin=fixed[w],
                    depth=node.depth + 1, walk=walk,
                )
            )
        else:
            out.append(
                SawNode(
                    origin=w, parent=node, kind=FREE, spin=None,
                    depth=node.depth + 1, walk=walk,
                    _walk_set=node._walk_set | {w},
                )
            )
    return out


def saw_tree_size(
    g: Graph,
    v: int,
    depth: int | None = None,
    boundary: Boundary | None = None,
    cap: int | None = None,
) -> int:
    """Number of tree nodes (root included) with depth <= depth.

    depth None means the whole tree.  With a cap the count aborts early and
    raises once it would exceed the cap, so callers can budget before
    committing to an expansion.
    """
    fixed = boundary.fixed if boundary is not None else {}
    if v in fixed:
        return 1
    count = 0
    stack = [root_node(g, v)]
    while stack:
        node = stack.pop()
        count += 1
        if cap is not None and count > cap:
            raise BudgetExceededError(
                f"walk tree at vertex {v} exceeds {cap} nodes"
            )
        if node.kind == FREE and (depth is None or node.depth < depth):
            stack.extend(expand(g, node, boundary))
    return count


def dump_levels(g: Graph, v: int, depth: int, boundary: Boundary | None = None) -> dict:
    """JSON-ready dump of the first `depth` levels, for debugging."""

    def encode(node: SawNode) -> dict:
        doc: dict = {"origin": node.origin, "kind": node.kind, "depth": node.depth}
        if node.spin is not None:
            doc["spin"] = node.spin
        if node.kind == FREE and node.depth < depth:
            doc["children"] = [encode(c) for c in expand(g, node, boundary)]
        return doc

    fixed = boundary.fixed if boundary is not None else {}
    if v in fixed:
        return {"origin": v, "kind": FIXED, "depth": 0, "spin": fixed[v]}
    return encode(root_node(g, v))
