"""Shared random generators for the test suite."""

from __future__ import annotations

import numpy as np

from cdag import Cdag, Query, sample_dag, v, w


def random_cdag(rng: np.random.Generator, p: int, edge_prob: float = 0.4) -> Cdag:
    return Cdag(sample_dag(p, edge_prob, rng))


def random_query(rng: np.random.Generator, p: int) -> Query | None:
    """A random disjoint query over the 2p CDAG nodes, or None if a side is empty."""
    nodes = [v(i) for i in range(p)] + [w(i) for i in range(p)]
    sides = rng.integers(0, 4, size=2 * p)
    a = {n for n, s in zip(nodes, sides) if s == 1}
    b = {n for n, s in zip(nodes, sides) if s == 2}
    c = {n for n, s in zip(nodes, sides) if s == 3}
    if not a or not b:
        return None
    return Query(a=a, b=b, c=c)
