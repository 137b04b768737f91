"""Graph primitives: DAGs over primary nodes, conditional DAGs, moral graphs.

A conditional DAG (CDAG) couples a DAG over ``p`` primary nodes ``v_0..v_{p-1}``
with one secondary node ``w_i`` per primary node and a mandatory edge
``w_i -> v_i`` (the pairing is the identity map).  All graph values here are
immutable; "mutating" helpers return new graphs, so instances are safe to
share across threads.
"""

from __future__ import annotations

import heapq
import itertools
from collections.abc import Hashable, Iterable
from dataclasses import dataclass
from functools import cached_property

from .errors import InputError

__all__ = [
    "NodeRef",
    "v",
    "w",
    "is_acyclic",
    "Dag",
    "Cdag",
    "DiGraph",
    "UndirectedGraph",
    "ancestors",
    "moralize",
    "separated",
    "all_dags",
]


@dataclass(frozen=True, order=True)
class NodeRef:
    """A node of a CDAG: kind ``"v"`` (primary) or ``"w"`` (secondary)."""

    kind: str
    index: int

    def __post_init__(self) -> None:
        if self.kind not in ("v", "w"):
            raise InputError(f"node kind must be 'v' or 'w', got {self.kind!r}")
        if not isinstance(self.index, int) or self.index < 0:
            raise InputError(f"node index must be a non-negative int, got {self.index!r}")

    def __repr__(self) -> str:
        return f"{self.kind}{self.index}"


def v(i: int) -> NodeRef:
    """The primary node ``v_i`` (0-based)."""
    return NodeRef("v", i)


def w(i: int) -> NodeRef:
    """The secondary node ``w_i`` (0-based)."""
    return NodeRef("w", i)


def is_acyclic(edges: Iterable[tuple[int, int]], p: int) -> bool:
    """True iff the directed edges over nodes ``0..p-1`` contain no cycle.

    Raises :class:`InputError` if an edge endpoint is out of range.  A
    self-loop counts as a cycle.
    """
    edges = set((int(i), int(j)) for i, j in edges)
    for i, j in edges:
        if not (0 <= i < p and 0 <= j < p):
            raise InputError(f"edge ({i}, {j}) out of range for p={p}")
    children: dict[int, list[int]] = {i: [] for i in range(p)}
    indeg = [0] * p
    for i, j in edges:
        children[i].append(j)
        indeg[j] += 1
    ready = [i for i in range(p) if indeg[i] == 0]
    seen = 0
    while ready:
        node = ready.pop()
        seen += 1
        for child in children[node]:
            indeg[child] -= 1
            if indeg[child] == 0:
                ready.append(child)
    return seen == p


@dataclass(frozen=True)
class Dag:
    """A DAG over ``p`` primary nodes, stored as ordered index pairs ``(i, j)``.

    Acyclicity (and hence absence of self-loops) is checked on construction,
    so a ``Dag`` value can never hold a cycle.
    """

    p: int
    edges: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self) -> None:
        if self.p < 0:
            raise InputError(f"node count must be non-negative, got {self.p}")
        object.__setattr__(self, "edges", frozenset((int(i), int(j)) for i, j in self.edges))
        if not is_acyclic(self.edges, self.p):
            raise InputError("edge set contains a directed cycle")

    @cached_property
    def _parent_sets(self) -> tuple[frozenset[int], ...]:
        acc: list[set[int]] = [set() for _ in range(self.p)]
        for i, j in self.edges:
            acc[j].add(i)
        return tuple(frozenset(s) for s in acc)

    def parents(self, j: int) -> frozenset[int]:
        return self._parent_sets[j]

    def parent_map(self) -> dict[int, frozenset[int]]:
        return {j: self._parent_sets[j] for j in range(self.p)}

    def has_edge(self, i: int, j: int) -> bool:
        return (i, j) in self.edges

    def adjacent(self, i: int, j: int) -> bool:
        return (i, j) in self.edges or (j, i) in self.edges

    def with_edge(self, i: int, j: int) -> "Dag":
        """A new DAG with edge ``i -> j`` added (raises on cycle)."""
        return Dag(self.p, self.edges | {(i, j)})

    def without_edge(self, i: int, j: int) -> "Dag":
        return Dag(self.p, self.edges - {(i, j)})

    @cached_property
    def topological_order(self) -> tuple[int, ...]:
        """Lexicographically smallest topological order (deterministic)."""
        indeg = [0] * self.p
        children: dict[int, list[int]] = {i: [] for i in range(self.p)}
        for i, j in self.edges:
            children[i].append(j)
            indeg[j] += 1
        heap = [i for i in range(self.p) if indeg[i] == 0]
        heapq.heapify(heap)
        order: list[int] = []
        while heap:
            node = heapq.heappop(heap)
            order.append(node)
            for child in children[node]:
                indeg[child] -= 1
                if indeg[child] == 0:
                    heapq.heappush(heap, child)
        return tuple(order)

    def to_json_dict(self) -> dict:
        """The interchange form ``{"p": int, "edges": [[i, j], ...]}``."""
        return {"p": self.p, "edges": [list(e) for e in sorted(self.edges)]}

    @classmethod
    def from_json_dict(cls, data: dict) -> "Dag":
        try:
            p = int(data["p"])
            edges = [(int(i), int(j)) for i, j in data["edges"]]
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed graph JSON: {exc}") from exc
        return cls(p, frozenset(edges))


@dataclass(frozen=True)
class Cdag:
    """A conditional DAG: a primary :class:`Dag` plus implied ``w_i -> v_i`` edges.

    The secondary-to-primary edges are derived, never stored, so every value
    satisfies the definition by construction.
    """

    primary: Dag

    @property
    def p(self) -> int:
        return self.primary.p

    def edges(self) -> frozenset[tuple[NodeRef, NodeRef]]:
        """All edges, always including exactly ``p`` bijection edges."""
        prim = {(v(i), v(j)) for i, j in self.primary.edges}
        bij = {(w(i), v(i)) for i in range(self.p)}
        return frozenset(prim | bij)

    @cached_property
    def full(self) -> "DiGraph":
        """The CDAG as a directed graph over all ``2p`` nodes."""
        nodes = {v(i) for i in range(self.p)} | {w(i) for i in range(self.p)}
        return DiGraph(nodes, self.edges())


class DiGraph:
    """Immutable directed graph over arbitrary hashable nodes."""

    __slots__ = ("_nodes", "_edges", "_parents")

    def __init__(self, nodes: Iterable[Hashable], edges: Iterable[tuple]) -> None:
        self._nodes = frozenset(nodes)
        self._edges = frozenset((a, b) for a, b in edges)
        parents: dict[Hashable, set] = {n: set() for n in self._nodes}
        for a, b in self._edges:
            if a not in self._nodes or b not in self._nodes:
                raise InputError(f"edge ({a!r}, {b!r}) references a missing node")
            if a == b:
                raise InputError(f"self-loop at {a!r}")
            parents[b].add(a)
        self._parents = {n: frozenset(ps) for n, ps in parents.items()}

    @property
    def nodes(self) -> frozenset:
        return self._nodes

    @property
    def edges(self) -> frozenset:
        return self._edges

    def parents(self, node: Hashable) -> frozenset:
        return self._parents[node]

    def is_acyclic_graph(self) -> bool:
        indeg = {n: len(self._parents[n]) for n in self._nodes}
        children: dict[Hashable, list] = {n: [] for n in self._nodes}
        for a, b in self._edges:
            children[a].append(b)
        ready = [n for n, d in indeg.items() if d == 0]
        seen = 0
        while ready:
            node = ready.pop()
            seen += 1
            for child in children[node]:
                indeg[child] -= 1
                if indeg[child] == 0:
                    ready.append(child)
        return seen == len(self._nodes)

    def subgraph(self, keep: Iterable[Hashable]) -> "DiGraph":
        keep = frozenset(keep)
        missing = keep - self._nodes
        if missing:
            raise InputError(f"nodes not in graph: {sorted(map(repr, missing))}")
        return DiGraph(keep, ((a, b) for a, b in self._edges if a in keep and b in keep))

    def ancestor_closure(self, sources: Iterable[Hashable]) -> frozenset:
        """All ancestors of ``sources``, including the sources themselves."""
        out = set()
        stack = list(sources)
        for n in stack:
            if n not in self._nodes:
                raise InputError(f"node {n!r} not in graph")
        while stack:
            node = stack.pop()
            if node in out:
                continue
            out.add(node)
            stack.extend(self._parents[node])
        return frozenset(out)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DiGraph):
            return NotImplemented
        return self._nodes == other._nodes and self._edges == other._edges

    def __hash__(self) -> int:
        return hash((self._nodes, self._edges))

    def __repr__(self) -> str:
        return f"DiGraph({len(self._nodes)} nodes, {len(self._edges)} edges)"


class UndirectedGraph:
    """Immutable undirected graph; edges are unordered pairs of nodes."""

    __slots__ = ("_nodes", "_adj")

    def __init__(self, nodes: Iterable[Hashable], edges: Iterable) -> None:
        self._nodes = frozenset(nodes)
        adj: dict[Hashable, set] = {n: set() for n in self._nodes}
        for edge in edges:
            a, b = tuple(edge)
            if a == b:
                raise InputError(f"self-loop at {a!r}")
            if a not in self._nodes or b not in self._nodes:
                raise InputError(f"edge ({a!r}, {b!r}) references a missing node")
            adj[a].add(b)
            adj[b].add(a)
        self._adj = {n: frozenset(s) for n, s in adj.items()}

    @property
    def nodes(self) -> frozenset:
        return self._nodes

    @property
    def edges(self) -> frozenset:
        return frozenset(frozenset((a, b)) for a, nbrs in self._adj.items() for b in nbrs)

    def neighbors(self, node: Hashable) -> frozenset:
        return self._adj[node]

    def has_edge(self, a: Hashable, b: Hashable) -> bool:
        return b in self._adj.get(a, frozenset())

    def with_clique(self, members: Iterable[Hashable]) -> "UndirectedGraph":
        """A new graph with all pairs among ``members`` connected."""
        members = [m for m in members if m in self._nodes]
        extra = itertools.combinations(sorted(members, key=repr), 2)
        return UndirectedGraph(self._nodes, list(self.edges) + [tuple(e) for e in extra])

    def __repr__(self) -> str:
        return f"UndirectedGraph({len(self._nodes)} nodes, {len(self.edges)} edges)"


def ancestors(g: "Cdag | DiGraph | Dag", nodes: Iterable) -> frozenset:
    """Ancestral closure of ``nodes`` (the set itself is always included).

    For a :class:`Cdag` this works on the full graph, so ``w_i`` is an
    ancestor of ``v_i``; an empty input gives an empty closure.
    """
    return _as_digraph(g).ancestor_closure(nodes)


def _as_digraph(g: "Cdag | DiGraph | Dag") -> DiGraph:
    if isinstance(g, DiGraph):
        return g
    if isinstance(g, Cdag):
        return g.full
    if isinstance(g, Dag):
        return DiGraph({v(i) for i in range(g.p)}, {(v(i), v(j)) for i, j in g.edges})
    raise InputError(f"expected Dag, Cdag or DiGraph, got {type(g).__name__}")


def moralize(g: DiGraph) -> UndirectedGraph:
    """Moral graph: skeleton plus marriages between co-parents of each child."""
    edges: list[tuple] = [(a, b) for a, b in g.edges]
    for child in g.nodes:
        edges.extend(itertools.combinations(sorted(g.parents(child), key=repr), 2))
    return UndirectedGraph(g.nodes, edges)


def separated(u: UndirectedGraph, a: Iterable, b: Iterable, c: Iterable) -> bool:
    """True iff every path from ``a`` to ``b`` in ``u`` passes through ``c``.

    The three sets must be pairwise disjoint; breadth-first search with ``c``
    removed.
    """
    a, b, c = frozenset(a), frozenset(b), frozenset(c)
    if a & b or a & c or b & c:
        raise InputError("query sets must be pairwise disjoint")
    for node in a | b | c:
        if node not in u.nodes:
            raise InputError(f"node {node!r} not in graph")
    visited = set(a)
    frontier = list(a)
    while frontier:
        node = frontier.pop()
        for nbr in u.neighbors(node):
            if nbr in visited or nbr in c:
                continue
            if nbr in b:
                return False
            visited.add(nbr)
            frontier.append(nbr)
    return True


def all_dags(p: int) -> list[Dag]:
    """Every DAG on ``p`` labeled nodes, by brute-force edge-subset filtering.

    Guarded at ``p <= 4`` (543 DAGs); the candidate space is ``2^(p(p-1))``.
    """
    if p < 0 or p > 4:
        raise InputError("all_dags is a brute-force enumerator, supported for p <= 4")
    pairs = [(i, j) for i in range(p) for j in range(p) if i != j]
    out = []
    for r in range(len(pairs) + 1):
        for combo in itertools.combinations(pairs, r):
            if is_acyclic(combo, p):
                out.append(Dag(p, frozenset(combo)))
    return out
