"""Linear-Gaussian structural-equation simulator for benchmark data.

Secondary columns follow a random DAG of their own with dependence strength
``theta`` (0 = independent, 1 = noise-free given roots); primary columns then
follow the target DAG, each driven by its paired secondary column, with
optional "misspecified" extra edges from a parent's secondary column straight
into the child.  Identical seeds give bit-identical output.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError
from .graphs import Dag
from .scoring import Dataset

__all__ = ["SimConfig", "GroundTruth", "sample_dag", "simulate"]


@dataclass(frozen=True)
class SimConfig:
    """Simulation parameters.

    ``edge_prob=None`` uses ``2/(p-1)`` (expected in-degree about 1, clamped
    to 1.0), which keeps sampled truths within the default parent-size cap.
    Coefficient magnitudes stay in ``[coef_low, coef_high]`` with random sign,
    bounded away from zero so faithfulness violations have measure zero.
    """

    p: int
    n: int
    theta: float = 0.0
    edge_prob: float | None = None
    coef_low: float = 0.5
    coef_high: float = 1.5
    noise_sd: float = 1.0
    misspec_prob: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.p < 1:
            raise InputError(f"p must be >= 1, got {self.p}")
        if self.n < 1:
            raise InputError(f"n must be >= 1, got {self.n}")
        if not 0.0 <= self.theta <= 1.0:
            raise InputError(f"theta must be in [0, 1], got {self.theta}")
        if not 0.0 <= self.misspec_prob <= 1.0:
            raise InputError(f"misspec_prob must be in [0, 1], got {self.misspec_prob}")
        if self.edge_prob is not None and not 0.0 < self.edge_prob <= 1.0:
            raise InputError(f"edge_prob must be in (0, 1], got {self.edge_prob}")
        if not 0.0 < self.coef_low <= self.coef_high:
            raise InputError("need 0 < coef_low <= coef_high")
        if not self.noise_sd > 0:
            raise InputError(f"noise_sd must be positive, got {self.noise_sd}")

    def resolved_edge_prob(self) -> float:
        if self.edge_prob is not None:
            return self.edge_prob
        return min(1.0, 2.0 / (self.p - 1)) if self.p > 1 else 0.5


@dataclass(frozen=True)
class GroundTruth:
    """The sampled primary DAG, secondary DAG, and misspecified extra edges."""

    g: Dag
    g_prime: Dag
    misspec_edges: frozenset[tuple[int, int]]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "misspec_edges", frozenset((int(i), int(j)) for i, j in self.misspec_edges)
        )
        for i, j in self.misspec_edges:
            if (i, j) not in self.g.edges:
                raise InputError(f"misspec edge ({i}, {j}) has no matching edge in g")


def sample_dag(p: int, edge_prob: float, rng: np.random.Generator) -> Dag:
    """Random DAG: uniform permutation as topological order, then each
    order-respecting edge included independently with ``edge_prob``."""
    if p < 1:
        raise InputError(f"p must be >= 1, got {p}")
    order = rng.permutation(p)
    n_pairs = p * (p - 1) // 2
    draws = rng.random(n_pairs)
    edges = set()
    c = 0
    for s in range(p):
        for t in range(s + 1, p):
            if draws[c] < edge_prob:
                edges.add((int(order[s]), int(order[t])))
            c += 1
    return Dag(p, frozenset(edges))


def _signed_uniform(rng: np.random.Generator, size: int, low: float, high: float) -> np.ndarray:
    mags = rng.uniform(low, high, size)
    signs = rng.integers(0, 2, size) * 2 - 1
    return mags * signs


def simulate(cfg: SimConfig) -> tuple[Dataset, GroundTruth]:
    """Draw ``(Dataset, GroundTruth)`` from the structural-equation model.

    Secondary columns (in topological order of their DAG)::

        X_i = theta * sum_k c_ik X_k + sqrt(1 - theta^2) * eps_i

    Primary columns (in topological order of the target DAG)::

        Y_j = a_j X_j + sum_k b_jk Y_k + sum_misspec d_ij X_i + eps_j

    with all coefficients signed-uniform in ``[coef_low, coef_high]`` except
    the instrument strengths ``a_j``, which are kept positive.
    """
    p, n = cfg.p, cfg.n
    rng = np.random.default_rng(cfg.seed)
    ep = cfg.resolved_edge_prob()
    g = sample_dag(p, ep, rng)
    g_prime = sample_dag(p, ep, rng)

    eps_x = rng.standard_normal((n, p)) * cfg.noise_sd
    noise_scale = math.sqrt(max(0.0, 1.0 - cfg.theta**2))
    x = np.zeros((n, p))
    for i in g_prime.topological_order:
        acc = noise_scale * eps_x[:, i]
        pa = sorted(g_prime.parents(i))
        if pa:
            coefs = _signed_uniform(rng, len(pa), cfg.coef_low, cfg.coef_high)
            acc = cfg.theta * (x[:, pa] @ coefs) + acc
        x[:, i] = acc

    misspec = set()
    for i, j in sorted(g.edges):
        if rng.random() < cfg.misspec_prob:
            misspec.add((i, j))

    instrument = rng.uniform(cfg.coef_low, cfg.coef_high, p)
    eps_y = rng.standard_normal((n, p)) * cfg.noise_sd
    y = np.zeros((n, p))
    for j in g.topological_order:
        acc = instrument[j] * x[:, j] + eps_y[:, j]
        pa = sorted(g.parents(j))
        if pa:
            coefs = _signed_uniform(rng, len(pa), cfg.coef_low, cfg.coef_high)
            acc = acc + y[:, pa] @ coefs
        extra = sorted(i for i, jj in misspec if jj == j)
        if extra:
            coefs = _signed_uniform(rng, len(extra), cfg.coef_low, cfg.coef_high)
            acc = acc + x[:, extra] @ coefs
        y[:, j] = acc

    return Dataset(y=y, x=x), GroundTruth(g, g_prime, frozenset(misspec))
