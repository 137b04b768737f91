"""Structural Hamming distance and the benchmark / misspecification runners.

Every replicate's seed derives from ``(seed, theta, p, n, misspec_prob, rep)``
alone, so reports are reproducible, order-independent, safe to parallelize,
and a misspecification sweep at probability 0 reproduces the matching
benchmark cell exactly.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from collections.abc import Iterable, Sequence

import numpy as np

from .errors import InputError, NumericError
from .graphs import Dag
from .scoring import GPriorConfig
from .search import EXACT_NODE_LIMIT, estimate
from .simulate import SimConfig, simulate

__all__ = [
    "ESTIMATORS",
    "ShdReport",
    "BenchmarkRow",
    "BenchmarkReport",
    "MisspecRow",
    "MisspecReport",
    "shd",
    "run_benchmark",
    "run_misspec_sweep",
]

ESTIMATORS = ("dag", "dag2", "cdag")


@dataclass(frozen=True)
class ShdReport:
    """Edge-difference counts; a reversal costs 1."""

    shd: int
    missing: int
    extra: int
    reversed: int

    def __post_init__(self) -> None:
        if min(self.shd, self.missing, self.extra, self.reversed) < 0:
            raise InputError("counts must be non-negative")
        if self.shd != self.missing + self.extra + self.reversed:
            raise InputError("shd must equal missing + extra + reversed")


def shd(estimate: Dag, truth: Dag) -> ShdReport:
    """Structural Hamming distance between two DAGs on the same nodes.

    Reversed edges (adjacent in both, opposite orientation) cost 1; missing
    counts truth edges with no adjacency in the estimate, extra the converse.
    """
    if estimate.p != truth.p:
        raise InputError(f"graphs differ in size: {estimate.p} vs {truth.p}")
    missing = extra = flipped = 0
    for i, j in truth.edges:
        if (i, j) in estimate.edges:
            continue
        if (j, i) in estimate.edges:
            flipped += 1
        else:
            missing += 1
    for i, j in estimate.edges:
        if (i, j) not in truth.edges and (j, i) not in truth.edges:
            extra += 1
    return ShdReport(missing + extra + flipped, missing, extra, flipped)


@dataclass(frozen=True)
class BenchmarkRow:
    theta: float
    p: int
    n: int
    estimator: str
    mean_shd: float
    stderr: float | None
    replicates: int


@dataclass(frozen=True)
class BenchmarkReport:
    rows: tuple[BenchmarkRow, ...]

    def cell(self, theta: float, p: int, n: int, estimator: str) -> BenchmarkRow:
        for row in self.rows:
            if (row.theta, row.p, row.n, row.estimator) == (theta, p, n, estimator):
                return row
        raise InputError(f"no cell ({theta}, {p}, {n}, {estimator}) in report")

    def to_csv_text(self, meta: str | None = None) -> str:
        lines = []
        if meta is not None:
            lines.append(f"# {meta}")
        lines.append("theta,p,n,estimator,mean_shd,stderr,reps")
        for row in self.rows:
            stderr = "" if row.stderr is None else _fmt(row.stderr)
            lines.append(
                f"{_fmt(row.theta)},{row.p},{row.n},{row.estimator},"
                f"{_fmt(row.mean_shd)},{stderr},{row.replicates}"
            )
        return "\n".join(lines) + "\n"

    def write_csv(self, path, meta: str | None = None) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_csv_text(meta))


@dataclass(frozen=True)
class MisspecRow:
    misspec_prob: float
    estimator: str
    mean_shd: float
    stderr: float | None
    replicates: int


@dataclass(frozen=True)
class MisspecReport:
    theta: float
    p: int
    n: int
    rows: tuple[MisspecRow, ...]

    def cell(self, misspec_prob: float, estimator: str) -> MisspecRow:
        for row in self.rows:
            if (row.misspec_prob, row.estimator) == (misspec_prob, estimator):
                return row
        raise InputError(f"no cell ({misspec_prob}, {estimator}) in report")

    def to_csv_text(self, meta: str | None = None) -> str:
        lines = []
        if meta is not None:
            lines.append(f"# {meta}")
        lines.append("misspec_prob,estimator,mean_shd,stderr,reps")
        for row in self.rows:
            stderr = "" if row.stderr is None else _fmt(row.stderr)
            lines.append(
                f"{_fmt(row.misspec_prob)},{row.estimator},"
                f"{_fmt(row.mean_shd)},{stderr},{row.replicates}"
            )
        return "\n".join(lines) + "\n"

    def write_csv(self, path, meta: str | None = None) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_csv_text(meta))


def _fmt(value: float) -> str:
    return format(float(value), ".17g")


def _replicate_seeds(seed: int, theta: float, p: int, n: int, misspec_prob: float, rep: int):
    key = (
        int(round(theta * 1_000_000)),
        int(p),
        int(n),
        int(round(misspec_prob * 1_000_000)),
        int(rep),
    )
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=key)
    state = ss.generate_state(2, np.uint64)
    return int(state[0]), int(state[1])


def _run_replicate(
    theta: float,
    p: int,
    n: int,
    misspec_prob: float,
    rep: int,
    seed: int,
    estimators: Sequence[str],
    cfg: GPriorConfig,
    restarts: int,
) -> dict[str, int]:
    sim_seed, search_seed = _replicate_seeds(seed, theta, p, n, misspec_prob, rep)
    data, truth = simulate(
        SimConfig(p=p, n=n, theta=theta, misspec_prob=misspec_prob, seed=sim_seed)
    )
    out: dict[str, int] = {}
    try:
        for est in estimators:
            graph = estimate(data, est, cfg, restarts=restarts, seed=search_seed)
            out[est] = shd(graph, truth.g).shd
    except (InputError, NumericError) as exc:
        raise type(exc)(
            f"replicate failed at theta={theta}, p={p}, n={n}, "
            f"misspec_prob={misspec_prob}, rep={rep}: {exc}"
        ) from exc
    return out


def _aggregate(values: Sequence[int]) -> tuple[float, float | None]:
    arr = np.asarray(values, dtype=float)
    mean = float(arr.mean())
    if arr.size < 2:
        return mean, None
    return mean, float(arr.std(ddof=1) / math.sqrt(arr.size))


def _run_jobs(jobs, worker, threads: int):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(worker, jobs))
    return [worker(job) for job in jobs]


def run_benchmark(
    thetas: Iterable[float],
    ps: Iterable[int],
    ns: Iterable[int],
    replicates: int = 10,
    seed: int = 0,
    estimators: Sequence[str] = ESTIMATORS,
    cfg: GPriorConfig | None = None,
    misspec_prob: float = 0.0,
    restarts: int = 20,
    threads: int = 1,
) -> BenchmarkReport:
    """Mean SHD with standard errors over a (theta, p, n) grid.

    Each replicate simulates one dataset and runs every estimator on it.
    The p values must stay within the exact-search limit because ``cdag`` and
    ``dag`` modes maximize exactly.
    """
    thetas, ps, ns = list(thetas), list(ps), list(ns)
    if replicates < 1:
        raise InputError(f"replicates must be >= 1, got {replicates}")
    for p in ps:
        if p > EXACT_NODE_LIMIT:
            raise InputError(f"p={p} exceeds the exact-search limit {EXACT_NODE_LIMIT}")
    for est in estimators:
        if est not in ESTIMATORS:
            raise InputError(f"unknown estimator {est!r}; choose from {ESTIMATORS}")
    cfg = cfg or GPriorConfig()
    cells = [(theta, p, n) for theta in thetas for p in ps for n in ns]
    jobs = [(theta, p, n, rep) for theta, p, n in cells for rep in range(replicates)]

    def worker(job):
        theta, p, n, rep = job
        return _run_replicate(
            theta, p, n, misspec_prob, rep, seed, estimators, cfg, restarts
        )

    results = _run_jobs(jobs, worker, threads)
    rows: list[BenchmarkRow] = []
    for c, (theta, p, n) in enumerate(cells):
        chunk = results[c * replicates:(c + 1) * replicates]
        for est in estimators:
            mean, stderr = _aggregate([r[est] for r in chunk])
            rows.append(BenchmarkRow(theta, p, n, est, mean, stderr, replicates))
    return BenchmarkReport(tuple(rows))


def run_misspec_sweep(
    misspec_probs: Iterable[float] = (0.0, 0.25, 0.5, 0.75, 1.0),
    replicates: int = 10,
    seed: int = 0,
    p: int = 15,
    n: int = 1000,
    theta: float = 0.0,
    estimators: Sequence[str] = ESTIMATORS,
    cfg: GPriorConfig | None = None,
    restarts: int = 20,
    threads: int = 1,
) -> MisspecReport:
    """Mean SHD per estimator as the misspecified-edge probability varies."""
    probs = list(misspec_probs)
    if replicates < 1:
        raise InputError(f"replicates must be >= 1, got {replicates}")
    if p > EXACT_NODE_LIMIT:
        raise InputError(f"p={p} exceeds the exact-search limit {EXACT_NODE_LIMIT}")
    cfg = cfg or GPriorConfig()
    jobs = [(prob, rep) for prob in probs for rep in range(replicates)]

    def worker(job):
        prob, rep = job
        return _run_replicate(theta, p, n, prob, rep, seed, estimators, cfg, restarts)

    results = _run_jobs(jobs, worker, threads)
    rows: list[MisspecRow] = []
    for c, prob in enumerate(probs):
        chunk = results[c * replicates:(c + 1) * replicates]
        for est in estimators:
            mean, stderr = _aggregate([r[est] for r in chunk])
            rows.append(MisspecRow(prob, est, mean, stderr, replicates))
    return MisspecReport(theta, p, n, tuple(rows))
