"""Structure search: exact subset-lattice dynamic programming and greedy
hill climbing over decomposable score tables.

The exact maximizer propagates best-parent-set scores over the subset lattice
(one pass per node bit) and then runs a best-sink recursion over node subsets,
so it returns a globally optimal DAG for any table.  Ties break toward smaller
parent sets, then lexicographically smallest sets, and sink ties toward the
smallest node index, which makes estimates fully deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, NumericError
from .graphs import Dag
from .scoring import Dataset, GPriorConfig, ScoreTable, score_table

__all__ = ["EXACT_NODE_LIMIT", "SearchResult", "exact_map", "greedy_map", "estimate",
           "estimate_with_result"]

EXACT_NODE_LIMIT = 25

_BIT_INDEX_CACHE: dict[tuple[int, int], np.ndarray] = {}


@dataclass(frozen=True)
class SearchResult:
    """A searched graph, its recomputed table score, and how it was found."""

    graph: Dag
    log_score: float
    method: str
    optimal: bool


def _indices_with_bit(m: int, s: int) -> np.ndarray:
    key = (m, s)
    arr = _BIT_INDEX_CACHE.get(key)
    if arr is None:
        arr = np.flatnonzero((np.arange(1 << m, dtype=np.int64) >> s) & 1)
        if m <= 20:
            _BIT_INDEX_CACHE[key] = arr
    return arr


def exact_map(table: ScoreTable) -> SearchResult:
    """Globally optimal DAG under the table's decomposable scores.

    Guarded at 25 nodes (the state space is ``2^m``); memory for the
    best-parents tables makes ~22 nodes the practical ceiling.  Larger
    problems should use :func:`greedy_map`.
    """
    m = table.node_count
    if m < 1:
        raise InputError("score table has no nodes")
    if m > EXACT_NODE_LIMIT:
        raise InputError(
            f"exact search supports at most {EXACT_NODE_LIMIT} nodes, got {m}; use greedy_map"
        )
    full = 1 << m
    neg_inf = -np.inf
    bp_score: list[np.ndarray] = []
    bp_choice: list[np.ndarray] = []
    for j in range(m):
        score = np.full(full, neg_inf)
        size = np.full(full, np.iinfo(np.int16).max, dtype=np.int16)
        rev = np.full(full, -1, dtype=np.int64)
        choice = np.full(full, -1, dtype=np.int64)
        cands = np.asarray(table.candidates(j), dtype=np.int64)
        for k in range(table.max_parents + 1):
            combos, vals = table.lex_scores(j, k)
            if k == 0:
                masks = np.zeros(1, dtype=np.int64)
                revs = np.zeros(1, dtype=np.int64)
            else:
                bits = cands[combos]
                masks = np.bitwise_or.reduce(np.int64(1) << bits, axis=1)
                revs = np.bitwise_or.reduce(np.int64(1) << (m - 1 - bits), axis=1)
            score[masks] = vals
            size[masks] = k
            rev[masks] = revs
            choice[masks] = masks
        for s in range(m):
            if s == j:
                continue
            wi = _indices_with_bit(m, s)
            wo = wi ^ np.int64(1 << s)
            cand_score, cur_score = score[wo], score[wi]
            cand_size, cur_size = size[wo], size[wi]
            cand_rev, cur_rev = rev[wo], rev[wi]
            better = (cand_score > cur_score) | (
                (cand_score == cur_score)
                & ((cand_size < cur_size) | ((cand_size == cur_size) & (cand_rev > cur_rev)))
            )
            if better.any():
                score[wi] = np.where(better, cand_score, cur_score)
                size[wi] = np.where(better, cand_size, cur_size)
                rev[wi] = np.where(better, cand_rev, cur_rev)
                choice[wi] = np.where(better, choice[wo], choice[wi])
        bp_score.append(score)
        bp_choice.append(choice)

    opt = np.full(full, neg_inf)
    opt[0] = 0.0
    pick = np.full(full, -1, dtype=np.int8)
    popc = np.bitwise_count(np.arange(full, dtype=np.uint64)).astype(np.int64)
    order = np.argsort(popc, kind="stable").astype(np.int64)
    offsets = np.searchsorted(popc[order], np.arange(m + 2))
    for layer_size in range(1, m + 1):
        layer = order[offsets[layer_size]:offsets[layer_size + 1]]
        for j in range(m):
            sel = layer[((layer >> j) & 1) == 1]
            prev = sel ^ np.int64(1 << j)
            cand = opt[prev] + bp_score[j][prev]
            upd = cand > opt[sel]
            if upd.any():
                opt[sel] = np.where(upd, cand, opt[sel])
                pick[sel] = np.where(upd, np.int8(j), pick[sel])

    if not np.isfinite(opt[full - 1]):
        raise NumericError("no graph has a finite score (every candidate set unscorable)")
    edges = []
    state = full - 1
    while state:
        j = int(pick[state])
        prev = state ^ (1 << j)
        pmask = int(bp_choice[j][prev])
        t = pmask
        while t:
            low = t & -t
            edges.append((low.bit_length() - 1, j))
            t ^= low
        state = prev
    graph = Dag(m, frozenset(edges))
    total = sum(table.score(j, graph.parents(j)) for j in range(m))
    return SearchResult(graph, float(total), "exact_dp", True)


def greedy_map(table: ScoreTable, restarts: int = 20, seed: int = 0) -> SearchResult:
    """Steepest-ascent hill climbing with restarts over add/delete/reverse moves.

    Restart 0 starts from the empty graph; later restarts from random sparse
    DAGs.  Deterministic given ``seed``; never claims optimality.
    """
    if restarts < 1:
        raise InputError(f"restarts must be >= 1, got {restarts}")
    m = table.node_count
    rng = np.random.default_rng(seed)
    best_parents: list[frozenset[int]] | None = None
    best_total = -np.inf
    for r in range(restarts):
        start = _empty_start(m) if r == 0 else _random_start(table, rng)
        parents, total = _hill_climb(table, start)
        if total > best_total:
            best_total = total
            best_parents = parents
    assert best_parents is not None
    edges = frozenset((i, j) for j, ps in enumerate(best_parents) for i in ps)
    graph = Dag(m, edges)
    total = sum(table.score(j, graph.parents(j)) for j in range(m))
    return SearchResult(graph, float(total), "greedy", False)


def _empty_start(m: int) -> list[set[int]]:
    return [set() for _ in range(m)]


def _random_start(table: ScoreTable, rng: np.random.Generator) -> list[set[int]]:
    m = table.node_count
    cap = table.max_parents
    prob = min(1.0, 2.0 / max(1, m - 1))
    order = rng.permutation(m)
    parents: list[set[int]] = [set() for _ in range(m)]
    for t in range(1, m):
        node = int(order[t])
        avail = order[:t]
        chosen = avail[rng.random(t) < prob]
        if len(chosen) > cap:
            chosen = rng.choice(chosen, size=cap, replace=False)
        parents[node] = {int(i) for i in chosen}
    return parents


def _descendant_masks(parents: list[set[int]]) -> list[int]:
    m = len(parents)
    children: list[list[int]] = [[] for _ in range(m)]
    for j, ps in enumerate(parents):
        for i in ps:
            children[i].append(j)
    desc = [0] * m
    for start in range(m):
        seen = 1 << start
        stack = [start]
        while stack:
            node = stack.pop()
            for ch in children[node]:
                bit = 1 << ch
                if not seen & bit:
                    seen |= bit
                    stack.append(ch)
        desc[start] = seen & ~(1 << start)
    return desc


def _path_avoiding_edge(parents: list[set[int]], src: int, dst: int) -> bool:
    """Directed path ``src -> ... -> dst`` ignoring the direct edge src->dst."""
    m = len(parents)
    children: list[list[int]] = [[] for _ in range(m)]
    for j, ps in enumerate(parents):
        for i in ps:
            if not (i == src and j == dst):
                children[i].append(j)
    seen = {src}
    stack = [src]
    while stack:
        node = stack.pop()
        for ch in children[node]:
            if ch == dst:
                return True
            if ch not in seen:
                seen.add(ch)
                stack.append(ch)
    return False


def _hill_climb(table: ScoreTable, parents: list[set[int]]) -> tuple[list[frozenset[int]], float]:
    m = table.node_count
    cap = table.max_parents
    local = [table.score(j, parents[j]) for j in range(m)]
    while True:
        desc = _descendant_masks(parents)
        best_delta = 0.0
        best_move = None
        edges = sorted((i, j) for j, ps in enumerate(parents) for i in ps)
        for i in range(m):
            for j in range(m):
                if i == j or i in parents[j] or len(parents[j]) >= cap:
                    continue
                if desc[j] >> i & 1:
                    continue
                delta = table.score(j, parents[j] | {i}) - local[j]
                if delta > best_delta:
                    best_delta = delta
                    best_move = ("add", i, j)
        for i, j in edges:
            delta = table.score(j, parents[j] - {i}) - local[j]
            if delta > best_delta:
                best_delta = delta
                best_move = ("delete", i, j)
        for i, j in edges:
            if j in parents[i] or len(parents[i]) >= cap:
                continue
            delta = (
                table.score(j, parents[j] - {i})
                - local[j]
                + table.score(i, parents[i] | {j})
                - local[i]
            )
            if delta > best_delta and not _path_avoiding_edge(parents, i, j):
                best_delta = delta
                best_move = ("reverse", i, j)
        if best_move is None:
            break
        kind, i, j = best_move
        if kind == "add":
            parents[j].add(i)
        elif kind == "delete":
            parents[j].remove(i)
        else:
            parents[j].remove(i)
            parents[i].add(j)
            local[i] = table.score(i, parents[i])
        local[j] = table.score(j, parents[j])
    total = float(sum(local))
    return [frozenset(ps) for ps in parents], total


def estimate_with_result(
    d: Dataset,
    mode: str,
    cfg: GPriorConfig | None = None,
    *,
    restarts: int = 20,
    seed: int = 0,
) -> tuple[Dag, SearchResult]:
    """Like :func:`estimate` but also returns the underlying search result
    (whose graph spans all ``2p`` columns in ``dag2`` mode)."""
    cfg = cfg or GPriorConfig()
    table = score_table(d, cfg, mode)
    if mode == "dag2" and table.node_count > EXACT_NODE_LIMIT:
        result = greedy_map(table, restarts=restarts, seed=seed)
    else:
        result = exact_map(table)
    if mode == "dag2":
        p = d.p
        primary = Dag(p, frozenset((i, j) for i, j in result.graph.edges if i < p and j < p))
    else:
        primary = result.graph
    return primary, result


def estimate(
    d: Dataset,
    mode: str,
    cfg: GPriorConfig | None = None,
    *,
    restarts: int = 20,
    seed: int = 0,
) -> Dag:
    """MAP structure estimate over the primary nodes.

    ``cdag`` and ``dag`` score the ``p`` primary columns and maximize exactly;
    ``dag2`` scores all ``2p`` columns (exactly when ``2p <= 25``, otherwise
    by seeded greedy search) and returns the primary-induced subgraph.
    """
    return estimate_with_result(d, mode, cfg, restarts=restarts, seed=seed)[0]
