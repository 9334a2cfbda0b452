"""Graph instances, boundary conditions and the JSON interchange format.

Vertices are dense integers 0..n-1.  Adjacency lists are kept sorted
ascending; that order is the canonical edge order every walk-tree construction
and estimator traversal follows, so results are reproducible across runs.

Instance files are JSON objects:

    {
      "n": 5,
      "edges": [[0, 1], [1, 2], ...],
      "lambda_v": {"3": 0.5},            # optional per-vertex activities
      "fixed": {"2": "blue"},            # optional boundary spins
      "S": [2],                          # optional differing set, subset of fixed
      "params": {"beta": 0, "gamma": 1, "lambda": 1}   # optional system triple
    }
"""
from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field
from typing import Iterator, Sequence

from .core import BLUE, GREEN, SpinSystem
from .errors import GraphFormatError, InvalidParameterError


@dataclass(frozen=True)
class Graph:
    n: int
    adj: tuple[tuple[int, ...], ...]
    lambda_v: dict[int, float] = field(default_factory=dict)
    labels: tuple[str, ...] | None = None

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def edges(self) -> Iterator[tuple[int, int]]:
        for u in range(self.n):
            for w in self.adj[u]:
                if u < w:
                    yield (u, w)

    def edge_count(self) -> int:
        return sum(len(a) for a in self.adj) // 2

    def activity(self, v: int, s: SpinSystem) -> float:
        """Per-vertex activity, falling back to the system's global one."""
        return self.lambda_v.get(v, s.lam)


def from_edges(
    n: int,
    edges: Sequence[Sequence[int]],
    lambda_v: dict[int, float] | None = None,
    labels: Sequence[str] | None = None,
) -> Graph:
    """Build a validated Graph; raises GraphFormatError naming the bad field."""
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise GraphFormatError(f"n: must be a positive integer, got {n!r}")
    seen: set[tuple[int, int]] = set()
    neigh: list[list[int]] = [[] for _ in range(n)]
    for i, e in enumerate(edges):
        if len(e) != 2:
            raise GraphFormatError(f"edges[{i}]: expected a pair, got {e!r}")
        u, w = e
        for x in (u, w):
            if not isinstance(x, int) or isinstance(x, bool) or not (0 <= x < n):
                raise GraphFormatError(
                    f"edges[{i}]: vertex {x!r} outside 0..{n - 1}"
                )
        if u == w:
            raise GraphFormatError(f"edges[{i}]: self-loop at vertex {u}")
        key = (min(u, w), max(u, w))
        if key in seen:
            raise GraphFormatError(f"edges[{i}]: duplicate edge {key}")
        seen.add(key)
        neigh[u].append(w)
        neigh[w].append(u)
    lv: dict[int, float] = {}
    if lambda_v:
        for v, val in lambda_v.items():
            if not isinstance(v, int) or not (0 <= v < n):
                raise GraphFormatError(f"lambda_v: vertex {v!r} outside 0..{n - 1}")
            if not isinstance(val, (int, float)) or val <= 0 or not math.isfinite(val):
                raise GraphFormatError(
                    f"lambda_v[{v}]: activity must be positive and finite, got {val!r}"
                )
            lv[v] = float(val)
    lab = None
    if labels is not None:
        if len(labels) != n:
            raise GraphFormatError(f"labels: expected {n} entries, got {len(labels)}")
        lab = tuple(str(x) for x in labels)
    return Graph(
        n=n,
        adj=tuple(tuple(sorted(a)) for a in neigh),
        lambda_v=lv,
        labels=lab,
    )


def max_degree(g: Graph) -> int:
    """Largest vertex degree; 0 for an edgeless graph."""
    return max((len(a) for a in g.adj), default=0)


@dataclass(frozen=True)
class Boundary:
    """Fixed spins plus an optional differing set S (a subset of the fixed keys).

    Vertices in S are treated as unknown by interval evaluations even though
    they carry a spin here; spatial-mixing experiments flip them.
    """

    fixed: dict[int, str] = field(default_factory=dict)
    S: frozenset[int] = frozenset()

    def __post_init__(self):
        for v, spin in self.fixed.items():
            if spin not in (BLUE, GREEN):
                raise GraphFormatError(f"fixed[{v}]: spin must be blue or green, got {spin!r}")
        extra = set(self.S) - set(self.fixed)
        if extra:
            raise GraphFormatError(f"S: vertices {sorted(extra)} carry no fixed spin")

    def validate_against(self, g: Graph) -> None:
        for v in self.fixed:
            if not isinstance(v, int) or not (0 <= v < g.n):
                raise GraphFormatError(f"fixed: vertex {v!r} outside 0..{g.n - 1}")


@dataclass(frozen=True)
class Instance:
    graph: Graph
    boundary: Boundary | None
    system: SpinSystem | None


def loads(text: str) -> Instance:
    """Parse and validate an instance document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise GraphFormatError(f"invalid JSON at line {e.lineno} column {e.colno}: {e.msg}")
    if not isinstance(doc, dict):
        raise GraphFormatError("top level: expected a JSON object")
    for key in ("n", "edges"):
        if key not in doc:
            raise GraphFormatError(f"{key}: missing required field")
    unknown = set(doc) - {"n", "edges", "lambda_v", "fixed", "S", "params", "labels"}
    if unknown:
        raise GraphFormatError(f"unknown fields: {sorted(unknown)}")

    lambda_v = None
    if "lambda_v" in doc:
        if not isinstance(doc["lambda_v"], dict):
            raise GraphFormatError("lambda_v: expected an object mapping vertex to activity")
        lambda_v = {}
        for k, val in doc["lambda_v"].items():
            try:
                lambda_v[int(k)] = val
            except (TypeError, ValueError):
                raise GraphFormatError(f"lambda_v: bad vertex key {k!r}")
    g = from_edges(doc["n"], doc["edges"], lambda_v, doc.get("labels"))

    boundary = None
    if "fixed" in doc or "S" in doc:
        raw = doc.get("fixed", {})
        if not isinstance(raw, dict):
            raise GraphFormatError("fixed: expected an object mapping vertex to spin")
        fixed = {}
        for k, spin in raw.items():
            try:
                fixed[int(k)] = spin
            except (TypeError, ValueError):
                raise GraphFormatError(f"fixed: bad vertex key {k!r}")
        s_raw = doc.get("S", [])
        if not isinstance(s_raw, list):
            raise GraphFormatError("S: expected a list of vertices")
        boundary = Boundary(fixed=fixed, S=frozenset(int(x) for x in s_raw))
        boundary.validate_against(g)

    system = None
    if "params" in doc:
        p = doc["params"]
        if not isinstance(p, dict) or not {"beta", "gamma", "lambda"} <= set(p):
            raise GraphFormatError("params: expected beta, gamma and lambda")
        try:
            system = SpinSystem(float(p["beta"]), float(p["gamma"]), float(p["lambda"]))
        except InvalidParameterError as e:
            raise GraphFormatError(f"params: {e}")
    return Instance(graph=g, boundary=boundary, system=system)


def load(path: str) -> Instance:
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read())


def dumps(g: Graph, boundary: Boundary | None = None, system: SpinSystem | None = None) -> str:
    """Canonical serialisation; loads(dumps(...)) reproduces the inputs."""
    doc: dict = {"n": g.n, "edges": [list(e) for e in g.edges()]}
    if g.lambda_v:
        doc["lambda_v"] = {str(v): g.lambda_v[v] for v in sorted(g.lambda_v)}
    if g.labels is not None:
        doc["labels"] = list(g.labels)
    if boundary is not None:
        doc["fixed"] = {str(v): boundary.fixed[v] for v in sorted(boundary.fixed)}
        if boundary.S:
            doc["S"] = sorted(boundary.S)
    if system is not None:
        doc["params"] = {"beta": system.beta, "gamma": system.gamma, "lambda": system.lam}
    return json.dumps(doc, indent=2, sort_keys=True)


def save(path: str, g: Graph, boundary: Boundary | None = None,
         system: SpinSystem | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(g, boundary, system))
        fh.write("\n")


# ---------------------------------------------------------------------------
# generators (deterministic for a given seed)


def path(n: int) -> Graph:
    return from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> Graph:
    if n < 3:
        raise InvalidParameterError(f"cycle needs at least 3 vertices, got {n}")
    return from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete(n: int) -> Graph:
    return from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def star(leaves: int) -> Graph:
    """Centre 0 joined to `leaves` leaf vertices."""
    if leaves < 1:
        raise InvalidParameterError(f"star needs at least one leaf, got {leaves}")
    return from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def double_star(leaves: int) -> Graph:
    """Two adjacent centres 0 and 1, each with `leaves` leaves (degree leaves+1)."""
    if leaves < 1:
        raise InvalidParameterError(f"double_star needs at least one leaf, got {leaves}")
    edges = [(0, 1)]
    nxt = 2
    for c in (0, 1):
        for _ in range(leaves):
            edges.append((c, nxt))
            nxt += 1
    return from_edges(nxt, edges)


def random_tree(n: int, seed: int) -> Graph:
    """Uniform random labelled tree, decoded from a random Pruefer sequence."""
    if n < 1:
        raise InvalidParameterError(f"random_tree needs n >= 1, got {n}")
    if n == 1:
        return from_edges(1, [])
    if n == 2:
        return from_edges(2, [(0, 1)])
    rng = random.Random(seed)
    seq = [rng.randrange(n) for _ in range(n - 2)]
    degree = [1] * n
    for v in seq:
        degree[v] += 1
    edges = []
    import heapq

    leaves = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(leaves)
    for v in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, v))
        degree[v] -= 1
        if degree[v] == 1:
            heapq.heappush(leaves, v)
    u = heapq.heappop(leaves)
    w = heapq.heappop(leaves)
    edges.append((u, w))
    return from_edges(n, edges)


def random_regular(n: int, d: int, seed: int, max_tries: int = 1000) -> Graph:
    """Random d-regular simple graph via the pairing model, retrying until simple."""
    if n * d % 2 != 0:
        raise InvalidParameterError(f"n*d must be even, got n={n}, d={d}")
    if d >= n:
        raise InvalidParameterError(f"degree {d} impossible on {n} vertices")
    rng = random.Random(seed)
    for _ in range(max_tries):
        points = [v for v in range(n) for _ in range(d)]
        rng.shuffle(points)
        edges = set()
        ok = True
        for i in range(0, len(points), 2):
            u, w = points[i], points[i + 1]
            if u == w or (min(u, w), max(u, w)) in edges:
                ok = False
                break
            edges.add((min(u, w), max(u, w)))
        if ok:
            return from_edges(n, sorted(edges))
    raise InvalidParameterError(
        f"pairing model produced no simple {d}-regular graph on {n} vertices "
        f"in {max_tries} tries"
    )
