"""Separation criteria for conditional DAGs.

c-separation works on the undirected graph built from a CDAG in four steps:
take the ancestral subgraph of the query nodes, moralize, drop arrowheads,
then connect every pair of secondary nodes present in the subgraph.  Classical
d-separation is the same procedure without the last step.  Both agree with
d-separation on the extended graph that adds a shared root above the secondary
nodes, which is the property the fuzz tests pin down.
"""

from __future__ import annotations

import itertools
from collections.abc import Iterable
from dataclasses import dataclass

from .errors import InputError
from .graphs import Cdag, Dag, DiGraph, NodeRef, _as_digraph, moralize, separated, v, w

__all__ = [
    "EXTENSION_NODE",
    "Query",
    "IndependenceModel",
    "c_separated",
    "d_separated",
    "extended_graph",
    "independence_model",
    "pairwise_relations",
]

EXTENSION_NODE = "z"

QueryKey = tuple[tuple[NodeRef, ...], tuple[NodeRef, ...], tuple[NodeRef, ...]]


@dataclass(frozen=True)
class Query:
    """A separation query ``<a, b | c>`` over CDAG nodes.

    ``a`` and ``b`` must be nonempty and the three sets pairwise disjoint.
    """

    a: frozenset[NodeRef]
    b: frozenset[NodeRef]
    c: frozenset[NodeRef] = frozenset()

    def __post_init__(self) -> None:
        for name in ("a", "b", "c"):
            object.__setattr__(self, name, frozenset(getattr(self, name)))
        if not self.a or not self.b:
            raise InputError("query sets a and b must be nonempty")
        if self.a & self.b or self.a & self.c or self.b & self.c:
            raise InputError("query sets must be pairwise disjoint")

    def key(self) -> QueryKey:
        """Canonical form: sides sorted, (a, b) ordered lexicographically."""
        return _canonical_key(self.a, self.b, self.c)


def _canonical_key(a: Iterable[NodeRef], b: Iterable[NodeRef], c: Iterable[NodeRef]) -> QueryKey:
    ta, tb, tc = tuple(sorted(a)), tuple(sorted(b)), tuple(sorted(c))
    if tb < ta:
        ta, tb = tb, ta
    return (ta, tb, tc)


def _moral_separation(dg: DiGraph, q: Query, connect_secondary: bool) -> bool:
    for node in q.a | q.b | q.c:
        if node not in dg.nodes:
            raise InputError(f"query node {node!r} not in graph")
    anc = dg.ancestor_closure(q.a | q.b | q.c)
    u = moralize(dg.subgraph(anc))
    if connect_secondary:
        u = u.with_clique(n for n in anc if isinstance(n, NodeRef) and n.kind == "w")
    return separated(u, q.a, q.b, q.c)


def c_separated(g: Cdag, q: Query) -> bool:
    """Whether ``q.a`` and ``q.b`` are c-separated by ``q.c`` in the CDAG."""
    return _moral_separation(g.full, q, connect_secondary=True)


def d_separated(g: Dag | Cdag | DiGraph, q: Query) -> bool:
    """Classical d-separation (moral-graph test on the ancestral subgraph).

    Accepts a primary :class:`Dag` (queried with ``v`` nodes), a
    :class:`Cdag`, or any acyclic :class:`DiGraph` such as
    :func:`extended_graph` output.
    """
    dg = _as_digraph(g)
    if not dg.is_acyclic_graph():
        raise InputError("d-separation requires an acyclic graph")
    return _moral_separation(dg, q, connect_secondary=False)


def extended_graph(g: Cdag) -> DiGraph:
    """The CDAG plus a fresh root ``"z"`` with an edge to every secondary node.

    d-separation on this graph coincides with c-separation on ``g`` for any
    query over the original nodes.
    """
    nodes = set(g.full.nodes) | {EXTENSION_NODE}
    edges = set(g.full.edges) | {(EXTENSION_NODE, w(i)) for i in range(g.p)}
    return DiGraph(nodes, edges)


@dataclass(frozen=True)
class IndependenceModel:
    """The set of separation triples a CDAG encodes over some node scope.

    ``relations`` holds canonical keys with nonempty sides; membership is
    closed under swapping the two sides by construction.
    """

    p: int
    relations: frozenset[QueryKey]

    def holds(self, a: Iterable[NodeRef], b: Iterable[NodeRef], c: Iterable[NodeRef]) -> bool:
        """Membership test; an empty ``a`` or ``b`` holds trivially."""
        a, b, c = frozenset(a), frozenset(b), frozenset(c)
        if not a or not b:
            return True
        return _canonical_key(a, b, c) in self.relations


class _BitEngine:
    """Bitmask c-separation evaluator for bulk queries on one CDAG.

    Nodes pack into one integer: bit ``i`` is ``v_i``, bit ``p+i`` is ``w_i``.
    Per-query work is an ancestral-closure union, a moral-adjacency build over
    the induced nodes, and a breadth-first reachability sweep.
    """

    def __init__(self, g: Cdag) -> None:
        p = g.p
        self.p = p
        self.n_bits = 2 * p
        self.w_all = ((1 << p) - 1) << p if p else 0
        pa = [0] * (2 * p)
        for i in range(p):
            pa[i] = 1 << (p + i)
            for k in g.primary.parents(i):
                pa[i] |= 1 << k
        anc = [0] * (2 * p)
        for i in range(p):
            anc[p + i] = 1 << (p + i)
        for i in g.primary.topological_order:
            acc = (1 << i) | (1 << (p + i))
            for k in g.primary.parents(i):
                acc |= anc[k]
            anc[i] = acc
        self.pa = pa
        self.anc = anc

    def node_bit(self, node: NodeRef) -> int:
        if not 0 <= node.index < self.p:
            raise InputError(f"node {node!r} out of range for p={self.p}")
        return 1 << (node.index if node.kind == "v" else self.p + node.index)

    def mask(self, nodes: Iterable[NodeRef]) -> int:
        out = 0
        for node in nodes:
            out |= self.node_bit(node)
        return out

    def c_separated(self, am: int, bm: int, cm: int) -> bool:
        anc = self.anc
        u1 = 0
        rest = am | bm | cm
        while rest:
            low = rest & -rest
            u1 |= anc[low.bit_length() - 1]
            rest ^= low
        adj = [0] * self.n_bits
        pa = self.pa
        rest = u1
        while rest:
            low = rest & -rest
            child = low.bit_length() - 1
            rest ^= low
            pset = pa[child] & u1
            adj[child] |= pset
            ps = pset
            while ps:
                pl = ps & -ps
                q = pl.bit_length() - 1
                ps ^= pl
                adj[q] |= (pset ^ pl) | low
        wsub = self.w_all & u1
        ws = wsub
        while ws:
            pl = ws & -ws
            adj[pl.bit_length() - 1] |= wsub ^ pl
            ws ^= pl
        visited = am
        frontier = am
        blocked = cm
        while frontier:
            nxt = 0
            rest = frontier
            while rest:
                low = rest & -rest
                nxt |= adj[low.bit_length() - 1]
                rest ^= low
            nxt &= ~(visited | blocked)
            if nxt & bm:
                return False
            visited |= nxt
            frontier = nxt
        return True


def independence_model(g: Cdag, scope: Iterable[NodeRef]) -> IndependenceModel:
    """All separation triples over ``scope``, each evaluated by c-separation.

    Enumerates every disjoint ``<a, b | c>`` with nonempty sides, canonicalized
    so the model is closed under side swaps.  Guarded at ``|scope| <= 8``
    because the triple count grows like ``4^|scope|``.
    """
    nodes = sorted(frozenset(scope))
    if len(nodes) > 8:
        raise InputError(f"scope of {len(nodes)} nodes is too large to enumerate (max 8)")
    engine = _BitEngine(g)
    bits = [engine.node_bit(n) for n in nodes]
    relations: set[QueryKey] = set()
    for assignment in itertools.product(range(4), repeat=len(nodes)):
        a = [n for n, side in zip(nodes, assignment) if side == 1]
        if not a:
            continue
        b = [n for n, side in zip(nodes, assignment) if side == 2]
        if not b or (b, a) < (a, b):
            continue
        am = bm = cm = 0
        for bit, side in zip(bits, assignment):
            if side == 1:
                am |= bit
            elif side == 2:
                bm |= bit
            elif side == 3:
                cm |= bit
        if engine.c_separated(am, bm, cm):
            c = tuple(n for n, side in zip(nodes, assignment) if side == 3)
            relations.add((tuple(a), tuple(b), c))
    return IndependenceModel(g.p, frozenset(relations))


def pairwise_relations(g: Cdag, scope: Iterable[NodeRef]) -> frozenset[QueryKey]:
    """The singleton-pair restriction of the independence model over ``scope``.

    Graph separation satisfies composition, so ``<A, B | C>`` holds exactly
    when every ``<{a}, {b} | C>`` with ``a in A``, ``b in B`` holds; two CDAGs
    therefore have equal models over ``scope`` iff these restrictions are
    equal.  This is the cheap fingerprint used for model-distinctness checks.
    """
    nodes = sorted(frozenset(scope))
    engine = _BitEngine(g)
    bits = {n: engine.node_bit(n) for n in nodes}
    out: set[QueryKey] = set()
    for na, nb in itertools.combinations(nodes, 2):
        rest = [n for n in nodes if n is not na and n is not nb]
        am, bm = bits[na], bits[nb]
        for r in range(len(rest) + 1):
            for cond in itertools.combinations(rest, r):
                cm = 0
                for n in cond:
                    cm |= bits[n]
                if engine.c_separated(am, bm, cm):
                    out.add(((na,), (nb,), cond))
    return frozenset(out)
