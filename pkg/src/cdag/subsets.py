"""Subset-combinatorics helpers shared by the score table and exact search."""

from __future__ import annotations

import itertools
import math

import numpy as np

_COMBOS: dict[tuple[int, int], np.ndarray] = {}


def combinations_array(m: int, k: int) -> np.ndarray:
    """All size-``k`` subsets of ``range(m)`` as a ``(C(m,k), k)`` array, lex order."""
    key = (m, k)
    arr = _COMBOS.get(key)
    if arr is None:
        count = math.comb(m, k)
        flat = np.fromiter(
            itertools.chain.from_iterable(itertools.combinations(range(m), k)),
            dtype=np.int64,
            count=count * k,
        )
        arr = flat.reshape(count, max(k, 1)) if k else np.empty((1, 0), dtype=np.int64)
        arr.setflags(write=False)
        _COMBOS[key] = arr
    return arr


def colex_rank(combo) -> int:
    """Colexicographic rank of a sorted index tuple among equal-size subsets."""
    rank = 0
    for pos, c in enumerate(combo):
        rank += math.comb(c, pos + 1)
    return rank


def colex_ranks(combos: np.ndarray) -> np.ndarray:
    """Vectorized :func:`colex_rank` over the rows of a ``(N, k)`` array."""
    n, k = combos.shape
    if k == 0:
        return np.zeros(n, dtype=np.int64)
    top = int(combos.max()) + 1
    table = np.zeros((top + 1, k + 2), dtype=np.int64)
    for c in range(top + 1):
        for kk in range(1, k + 1):
            table[c, kk] = math.comb(c, kk)
    ranks = np.zeros(n, dtype=np.int64)
    for pos in range(k):
        ranks += table[combos[:, pos], pos + 1]
    return ranks
