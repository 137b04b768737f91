"""Closed-form Bayesian local scores for linear-Gaussian structure learning.

Each child column is regressed on an always-included block (intercept, plus
its paired known-cause column in ``cdag`` mode) and a candidate parent block
that is residualized against the always-included block.  A Zellner g-prior on
the parent coefficients and a reference prior on the shared block give a
closed-form marginal likelihood; a binomial multiplicity prior penalizes
parent-set size.  Everything is computed in log space.

Modes
-----
``cdag``
    children are the ``p`` primary columns, the always-included block is
    ``[1, x_j]`` (q = 2), candidates are the other primary columns.
``dag``
    same children and candidates, intercept-only block (q = 1); secondary
    data, if present, is ignored.
``dag2``
    the variable universe is all ``2p`` columns (primary first, then
    secondary); every column is a child with intercept-only block and the
    remaining ``2p - 1`` columns as candidates.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CollinearityError, InputError, NumericError
from .subsets import colex_rank, colex_ranks, combinations_array

__all__ = [
    "MODES",
    "Dataset",
    "GPriorConfig",
    "LocalModel",
    "ScoreTable",
    "design_matrices",
    "log_marginal_likelihood",
    "log_parent_prior",
    "log_bayes_factor",
    "score_table",
    "read_dataset_csv",
    "write_dataset_csv",
]

MODES = ("cdag", "dag", "dag2")

# Relative floor below which the g-weighted residual sum of squares counts as
# numerically non-positive.
_B_FLOOR = 1e-12


@dataclass(frozen=True, eq=False)
class Dataset:
    """``n`` observations of ``p`` primary columns, optionally paired with
    ``p`` secondary columns (column ``i`` of ``x`` is the known cause of
    column ``i`` of ``y``).  Arrays are copied and frozen read-only."""

    y: np.ndarray
    x: np.ndarray | None = None

    def __post_init__(self) -> None:
        y = np.array(self.y, dtype=float)
        if y.ndim != 2 or y.shape[0] < 1 or y.shape[1] < 1:
            raise InputError("y must be a 2-D array with at least one row and column")
        if not np.all(np.isfinite(y)):
            raise InputError("y contains missing or non-finite values")
        y.setflags(write=False)
        object.__setattr__(self, "y", y)
        if self.x is not None:
            x = np.array(self.x, dtype=float)
            if x.shape != y.shape:
                raise InputError(
                    f"x shape {x.shape} must match y shape {y.shape} "
                    "(column i of x pairs with column i of y)"
                )
            if not np.all(np.isfinite(x)):
                raise InputError("x contains missing or non-finite values")
            x.setflags(write=False)
            object.__setattr__(self, "x", x)

    @property
    def n(self) -> int:
        return self.y.shape[0]

    @property
    def p(self) -> int:
        return self.y.shape[1]


@dataclass(frozen=True)
class GPriorConfig:
    """g-prior scale and parent-set cap.  ``g=None`` means unit information
    (g equal to the sample size), the consistency-backed default."""

    g: float | None = None
    max_parents: int = 5

    def __post_init__(self) -> None:
        if self.g is not None and not self.g > 0:
            raise InputError(f"g must be positive, got {self.g}")
        if self.max_parents < 0:
            raise InputError(f"max_parents must be >= 0, got {self.max_parents}")

    def effective_g(self, n: int) -> float:
        return float(n) if self.g is None else float(self.g)


@dataclass(frozen=True)
class LocalModel:
    """One child column and a candidate parent set under a given mode."""

    child: int
    parents: tuple[int, ...] = ()
    mode: str = "cdag"

    def __post_init__(self) -> None:
        object.__setattr__(self, "parents", tuple(sorted(set(int(i) for i in self.parents))))
        _check_mode(self.mode)
        if self.child in self.parents:
            raise InputError(f"child {self.child} cannot be its own parent")


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise InputError(f"mode must be one of {MODES}, got {mode!r}")


def _column_pool(d: Dataset, mode: str) -> np.ndarray:
    if mode == "dag2":
        if d.x is None:
            raise InputError("dag2 mode requires secondary data x")
        return np.hstack([d.y, d.x])
    return d.y


def _qr_basis(m0: np.ndarray, what: str) -> tuple[np.ndarray, float]:
    """Orthonormal basis of ``m0`` plus log|det(m0' m0)|; rank-checked."""
    q0, r0 = np.linalg.qr(m0)
    diag = np.abs(np.diag(r0))
    col_scale = np.sqrt((m0 * m0).sum(axis=0)).max()
    if diag.min() <= m0.shape[0] * np.finfo(float).eps * max(col_scale, 1.0):
        raise NumericError(f"{what} is rank-deficient (constant or duplicated column?)")
    return q0, float(2.0 * np.log(diag).sum())


def _always_included(d: Dataset, child: int, mode: str) -> np.ndarray:
    n = d.n
    if mode == "cdag":
        if d.x is None:
            raise InputError("cdag mode requires secondary data x")
        return np.column_stack([np.ones(n), d.x[:, child]])
    return np.ones((n, 1))


def design_matrices(d: Dataset, m: LocalModel) -> tuple[np.ndarray, np.ndarray]:
    """The always-included block ``m0`` and the residualized parent block.

    The parent columns are projected off the column space of ``m0``, so the
    two blocks are orthogonal; with no parents the second matrix has zero
    columns.
    """
    pool = _column_pool(d, m.mode)
    ncols = pool.shape[1]
    if not 0 <= m.child < ncols:
        raise InputError(f"child {m.child} out of range for {ncols} columns")
    for idx in m.parents:
        if not 0 <= idx < ncols:
            raise InputError(f"parent {idx} out of range for {ncols} columns")
    m0 = _always_included(d, m.child, m.mode)
    q0, _ = _qr_basis(m0, f"always-included block of child {m.child}")
    y_pi = pool[:, list(m.parents)]
    return m0, y_pi - q0 @ (q0.T @ y_pi)


def log_parent_prior(p: int, pi_size: int) -> float:
    """Log of the binomial multiplicity prior, ``-log C(p, |pi|)`` (unnormalized)."""
    if not 0 <= pi_size <= p:
        raise InputError(f"parent-set size {pi_size} out of range for p={p}")
    return -math.log(math.comb(p, pi_size))


def log_marginal_likelihood(d: Dataset, m: LocalModel, cfg: GPriorConfig) -> float:
    """Closed-form log marginal likelihood of the local model.

    With ``q`` always-included columns, ``k`` parents and g-weighted residual
    sum of squares ``b``, the value is::

        -log 2 + lgamma((n-q)/2) - ((n-q)/2) log(pi)
        - (1/2) log|m0' m0| - (k/2) log(1+g) - ((n-q)/2) log(b)

    Collinear parent sets raise :class:`CollinearityError`; a numerically
    non-positive ``b`` raises :class:`NumericError`.
    """
    pool = _column_pool(d, m.mode)
    if not 0 <= m.child < pool.shape[1]:
        raise InputError(f"child {m.child} out of range for {pool.shape[1]} columns")
    for idx in m.parents:
        if not 0 <= idx < pool.shape[1]:
            raise InputError(f"parent {idx} out of range for {pool.shape[1]} columns")
    n = d.n
    m0 = _always_included(d, m.child, m.mode)
    q = m0.shape[1]
    k = len(m.parents)
    if n <= q + k:
        raise InputError(f"need n > q + |parents| = {q + k}, got n = {n}")
    g = cfg.effective_g(n)
    q0, logdet_m0 = _qr_basis(m0, f"always-included block of child {m.child}")
    y = pool[:, m.child]
    r_y = y - q0 @ (q0.T @ y)
    s_y = float(r_y @ r_y)
    quad = 0.0
    if k:
        y_pi = pool[:, list(m.parents)]
        m_pi = y_pi - q0 @ (q0.T @ y_pi)
        q_pi, r_pi = np.linalg.qr(m_pi)
        diag = np.abs(np.diag(r_pi))
        col_scale = np.sqrt((m_pi * m_pi).sum(axis=0)).max()
        if diag.min() <= n * np.finfo(float).eps * max(col_scale, 1.0):
            raise CollinearityError(
                f"parent set {m.parents} of child {m.child} is collinear after residualization"
            )
        t = q_pi.T @ y
        quad = float(t @ t)
    b = s_y - (g / (g + 1.0)) * quad
    if not b > s_y * _B_FLOOR:
        raise NumericError(
            f"residual scale b is numerically non-positive for child {m.child}, "
            f"parents {m.parents}"
        )
    return _score_const(n, q, logdet_m0) - 0.5 * k * math.log1p(g) - 0.5 * (n - q) * math.log(b)


def _score_const(n: int, q: int, logdet_m0: float) -> float:
    return (
        -math.log(2.0)
        + math.lgamma((n - q) / 2.0)
        - 0.5 * (n - q) * math.log(math.pi)
        - 0.5 * logdet_m0
    )


def log_bayes_factor(
    d: Dataset,
    child: int,
    pi_h,
    pi_g,
    cfg: GPriorConfig,
    mode: str = "cdag",
) -> float:
    """Log Bayes factor of parent set ``pi_h`` against ``pi_g`` for ``child``."""
    num = log_marginal_likelihood(d, LocalModel(child, tuple(pi_h), mode), cfg)
    den = log_marginal_likelihood(d, LocalModel(child, tuple(pi_g), mode), cfg)
    return num - den


class ScoreTable:
    """Log local scores (marginal likelihood + parent prior) for every child
    and every candidate parent set up to the size cap.

    Scores for size ``k`` are stored per child in colex-rank order over the
    child's candidate list; collinear sets hold ``-inf``.
    """

    def __init__(
        self,
        mode: str,
        node_count: int,
        max_parents: int,
        candidates: tuple[tuple[int, ...], ...],
        size_scores: tuple[dict[int, np.ndarray], ...],
    ) -> None:
        self.mode = mode
        self._m = node_count
        self.max_parents = max_parents
        self._cands = candidates
        self._pos = tuple({c: t for t, c in enumerate(cs)} for cs in candidates)
        self._scores = size_scores

    @property
    def node_count(self) -> int:
        return self._m

    def children(self) -> range:
        return range(self._m)

    def candidates(self, j: int) -> tuple[int, ...]:
        return self._cands[j]

    def score(self, j: int, parents) -> float:
        """Log local score of ``parents`` (global column indices) for child ``j``."""
        pos = self._pos[j]
        try:
            local = sorted(pos[int(i)] for i in parents)
        except KeyError as exc:
            raise InputError(f"{exc.args[0]} is not a candidate parent of child {j}") from exc
        k = len(local)
        if k > self.max_parents:
            raise InputError(f"parent set of size {k} exceeds cap {self.max_parents}")
        return float(self._scores[j][k][colex_rank(local)])

    def lex_scores(self, j: int, k: int) -> tuple[np.ndarray, np.ndarray]:
        """``(combos, scores)`` for size ``k``: rows of local candidate indices
        in lex order with the matching scores."""
        combos = combinations_array(len(self._cands[j]), k)
        return combos, self._scores[j][k][colex_ranks(combos)]

    def entries(self, j: int):
        """Yield ``(parents, score)`` for every stored set of child ``j``."""
        cands = self._cands[j]
        for k in sorted(self._scores[j]):
            combos, scores = self.lex_scores(j, k)
            for row, val in zip(combos, scores):
                yield tuple(cands[t] for t in row), float(val)

    def graph_score(self, dag) -> float:
        """Decomposable total: sum of the stored local scores along ``dag``."""
        if dag.p != self._m:
            raise InputError(f"graph has {dag.p} nodes, table has {self._m}")
        return sum(self.score(j, dag.parents(j)) for j in range(self._m))

    def to_json_dict(self) -> dict:
        """Debug dump: ``{child: {"[i, ...]": score}}`` with sorted-list keys."""
        out: dict[str, dict[str, float]] = {}
        for j in self.children():
            out[str(j)] = {repr(list(par)): val for par, val in self.entries(j)}
        return out

    @classmethod
    def from_dicts(
        cls,
        node_count: int,
        mapping: dict[int, dict[tuple[int, ...], float]],
        mode: str = "custom",
    ) -> "ScoreTable":
        """Build a table from explicit per-child ``{parents: score}`` dicts.

        Every child in ``range(node_count)`` must be present, and for each
        child every subset of its candidate set up to the implied cap must be
        scored (candidates default to all other nodes).
        """
        candidates = []
        size_scores = []
        cap = 0
        for j in range(node_count):
            if j not in mapping:
                raise InputError(f"mapping is missing child {j}")
            cap = max(cap, max((len(par) for par in mapping[j]), default=0))
        for j in range(node_count):
            cands = tuple(c for c in range(node_count) if c != j)
            pos = {c: t for t, c in enumerate(cands)}
            per_size: dict[int, np.ndarray] = {}
            child_cap = min(cap, len(cands))
            for k in range(child_cap + 1):
                per_size[k] = np.full(math.comb(len(cands), k), np.nan)
            for par, val in mapping[j].items():
                local = sorted(pos[int(i)] for i in par)
                per_size[len(local)][colex_rank(local)] = float(val)
            for k, arr in per_size.items():
                if np.isnan(arr).any():
                    raise InputError(f"child {j} is missing scores for some size-{k} sets")
            candidates.append(cands)
            size_scores.append(per_size)
        return cls(mode, node_count, cap, tuple(candidates), tuple(size_scores))


def score_table(d: Dataset, cfg: GPriorConfig, mode: str = "cdag") -> ScoreTable:
    """Score every candidate parent set of every child under ``mode``.

    Collinear parent sets get score ``-inf`` rather than aborting the table;
    an unusable child (rank-deficient always-included block, or a child column
    inside its span) raises :class:`NumericError`.
    """
    _check_mode(mode)
    pool = _column_pool(d, mode)
    if mode == "cdag" and d.x is None:
        raise InputError("cdag mode requires secondary data x")
    n, m = pool.shape
    cap = min(cfg.max_parents, m - 1)
    if n < 3 + cap:
        raise InputError(f"need n >= 3 + max_parents = {3 + cap}, got n = {n}")
    g = cfg.effective_g(n)
    candidates = []
    size_scores = []
    for j in range(m):
        cands = tuple(c for c in range(m) if c != j)
        m0 = _always_included(d, j, mode)
        q = m0.shape[1]
        q0, logdet_m0 = _qr_basis(m0, f"always-included block of child {j}")
        y = pool[:, j]
        r_y = y - q0 @ (q0.T @ y)
        s_y = float(r_y @ r_y)
        if not s_y > float(y @ y) * n * np.finfo(float).eps:
            raise NumericError(f"child column {j} lies in the span of its always-included block")
        resid = pool[:, cands] - q0 @ (q0.T @ pool[:, cands])
        gram = resid.T @ resid
        cvec = resid.T @ r_y
        const = _score_const(n, q, logdet_m0)
        per_size: dict[int, np.ndarray] = {}
        for k in range(cap + 1):
            prior = log_parent_prior(m, k)
            if k == 0:
                per_size[0] = np.array([const - 0.5 * (n - q) * math.log(s_y) + prior])
                continue
            combos = combinations_array(len(cands), k)
            quad, ok = _batched_quadratic(gram, cvec, combos, n)
            b = s_y - (g / (g + 1.0)) * quad
            bad = ~ok | ~(b > s_y * _B_FLOOR)
            with np.errstate(divide="ignore", invalid="ignore"):
                vals = (
                    const
                    - 0.5 * k * math.log1p(g)
                    - 0.5 * (n - q) * np.log(np.where(bad, 1.0, b))
                    + prior
                )
            vals[bad] = -np.inf
            arr = np.empty_like(vals)
            arr[colex_ranks(combos)] = vals
            per_size[k] = arr
        candidates.append(cands)
        size_scores.append(per_size)
    return ScoreTable(mode, m, cap, tuple(candidates), tuple(size_scores))


def _batched_quadratic(gram, cvec, combos, n: int) -> tuple[np.ndarray, np.ndarray]:
    """``c' G^-1 c`` per subset row; the second array flags usable rows.

    Near-singular subsets can pass Cholesky with a rounding-noise pivot, so
    rows whose smallest squared pivot falls below ``n*eps`` of the matching
    diagonal are flagged collinear, alongside outright factorization failures
    (handled by a per-row fallback).
    """
    sub = gram[combos[:, :, None], combos[:, None, :]]
    rhs = cvec[combos]
    count, k = combos.shape
    ok = np.ones(count, dtype=bool)
    tol = max(n, 16) * np.finfo(float).eps
    diag = np.arange(k)
    try:
        chol = np.linalg.cholesky(sub)
        ok &= ~(chol[:, diag, diag] ** 2 <= tol * sub[:, diag, diag]).any(axis=1)
        sol = np.linalg.solve(chol, rhs[:, :, None])[:, :, 0]
        quad = np.einsum("nk,nk->n", sol, sol)
        quad[~ok] = 0.0
        return quad, ok
    except np.linalg.LinAlgError:
        quad = np.zeros(count)
        for t in range(count):
            try:
                chol = np.linalg.cholesky(sub[t])
                if (np.diag(chol) ** 2 <= tol * np.diag(sub[t])).any():
                    ok[t] = False
                    continue
                sol = np.linalg.solve(chol, rhs[t])
                quad[t] = sol @ sol
            except np.linalg.LinAlgError:
                ok[t] = False
        return quad, ok


def write_dataset_csv(d: Dataset, path) -> None:
    """Write ``y1..yp[,x1..xp]`` columns with 17-significant-digit floats."""
    header = [f"y{i + 1}" for i in range(d.p)]
    if d.x is not None:
        header += [f"x{i + 1}" for i in range(d.p)]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in range(d.n):
            vals = [format(val, ".17g") for val in d.y[row]]
            if d.x is not None:
                vals += [format(val, ".17g") for val in d.x[row]]
            writer.writerow(vals)


def read_dataset_csv(path) -> Dataset:
    """Read a dataset written by :func:`write_dataset_csv` (``#`` lines are
    comments)."""
    try:
        with open(Path(path), newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
    except OSError as exc:
        raise InputError(f"cannot read dataset file {path}: {exc}") from exc
    if not rows:
        raise InputError(f"{path}: empty dataset file")
    header, data_rows = rows[0], rows[1:]
    names = [h.strip() for h in header]
    ys = [nm for nm in names if nm.startswith("y")]
    xs = [nm for nm in names if nm.startswith("x")]
    p = len(ys)
    expected = [f"y{i + 1}" for i in range(p)] + [f"x{i + 1}" for i in range(len(xs))]
    if not p or names != expected or (xs and len(xs) != p):
        raise InputError(
            f"{path}: header must be y1..yp followed by optional x1..xp, got {names}"
        )
    if not data_rows:
        raise InputError(f"{path}: no data rows")
    try:
        mat = np.array([[float(cell) for cell in row] for row in data_rows])
    except ValueError as exc:
        raise InputError(f"{path}: non-numeric cell: {exc}") from exc
    if mat.shape[1] != len(names):
        raise InputError(f"{path}: row width does not match header")
    y = mat[:, :p]
    x = mat[:, p:] if xs else None
    return Dataset(y=y, x=x)
