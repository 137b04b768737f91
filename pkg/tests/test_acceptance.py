"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -v -s``.  The two benchmark
criteria dominate the runtime (several minutes each); everything else is
seconds.
"""

import itertools
import json
import math
import time

import numpy as np

from cdag import (
    Cdag,
    Dag,
    Dataset,
    GPriorConfig,
    LocalModel,
    Query,
    ScoreTable,
    all_dags,
    c_separated,
    d_separated,
    design_matrices,
    exact_map,
    extended_graph,
    independence_model,
    log_marginal_likelihood,
    pairwise_relations,
    run_benchmark,
    run_misspec_sweep,
    v,
    w,
)
from cdag.cli import main as cli_main

from helpers import random_cdag, random_query
from oracles import best_dag_by_enumeration, enumerate_all_dag_edge_sets, quadrature_log_marginal

THREADS = 2

FIG1 = Cdag(Dag(3, frozenset({(0, 1), (1, 2)})))


def _report(name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    print(f"ACCEPTANCE {name}: {status}{suffix}")
    assert ok, f"{name} failed{suffix}"


def test_c01_golden_separation_case():
    q = Query(a={v(2)}, b={v(0)}, c={v(1)})
    c_sep = c_separated(FIG1, q)
    d_sep = d_separated(FIG1.primary, q)
    best = math.inf
    for _ in range(5):
        t0 = time.perf_counter()
        c_separated(FIG1, q)
        d_separated(FIG1.primary, q)
        best = min(best, time.perf_counter() - t0)
    ok = (c_sep is False) and (d_sep is True) and best < 1e-3
    _report("C1 golden c-/d-separation case", ok,
            f"c_sep={c_sep}, d_sep={d_sep}, best runtime={best * 1e6:.0f}us")


def test_c02_extended_graph_equivalence():
    rng = np.random.default_rng(202)
    t0 = time.perf_counter()
    checked = 0
    mismatches = 0
    while checked < 1000:
        p = int(rng.integers(1, 7))
        g = random_cdag(rng, p, float(rng.uniform(0.1, 0.9)))
        q = random_query(rng, p)
        if q is None:
            continue
        if c_separated(g, q) != d_separated(extended_graph(g), q):
            mismatches += 1
        checked += 1
    elapsed = time.perf_counter() - t0
    _report("C2 extended-graph equivalence (1000 random pairs)",
            mismatches == 0 and elapsed < 5.0,
            f"mismatches={mismatches}, elapsed={elapsed:.2f}s")


def test_c03_injectivity():
    t0 = time.perf_counter()
    counts = {p: sum(1 for _ in enumerate_all_dag_edge_sets(p)) for p in (3, 4)}
    counts_ok = counts == {3: 25, 4: 543}

    scope3 = [v(i) for i in range(3)] + [w(i) for i in range(3)]
    models3 = {independence_model(Cdag(d), scope3).relations for d in all_dags(3)}
    distinct3 = len(models3) == 25

    # at p=4 compare the singleton-pair fingerprints; graph separation obeys
    # composition, so equal fingerprints iff equal full models (see the
    # composition tests in test_separation.py)
    scope4 = [v(i) for i in range(4)] + [w(i) for i in range(4)]
    prints4 = {pairwise_relations(Cdag(d), scope4) for d in all_dags(4)}
    distinct4 = len(prints4) == 543

    elapsed = time.perf_counter() - t0
    ok = counts_ok and distinct3 and distinct4 and elapsed < 120.0
    _report("C3 injectivity of graph -> independence model", ok,
            f"counts={counts}, distinct p3={len(models3)}/25, "
            f"p4={len(prints4)}/543, elapsed={elapsed:.1f}s")


def test_c04_semi_graphoid_axioms():
    rng = np.random.default_rng(204)
    nodes = [v(i) for i in range(3)] + [w(i) for i in range(3)]
    violations = 0
    for _ in range(50):
        g = random_cdag(rng, 3, float(rng.uniform(0.2, 0.8)))
        model = independence_model(g, nodes)
        for sides in itertools.product(range(5), repeat=6):
            a = {n for n, s in zip(nodes, sides) if s == 1}
            b = {n for n, s in zip(nodes, sides) if s == 2}
            c = {n for n, s in zip(nodes, sides) if s == 3}
            d = {n for n, s in zip(nodes, sides) if s == 4}
            if not model.holds(a, set(), c):
                violations += 1  # triviality
            if model.holds(a, b | d, c):
                if not model.holds(b | d, a, c):
                    violations += 1  # symmetry
                if not model.holds(a, d, c):
                    violations += 1  # decomposition
                if not model.holds(a, b, c | d):
                    violations += 1  # weak union
            if model.holds(a, b, c | d) and model.holds(a, d, c):
                if not model.holds(a, b | d, c):
                    violations += 1  # contraction
    _report("C4 semi-graphoid axioms on 50 random CDAGs", violations == 0,
            f"violations={violations}")


def test_c05_marginal_likelihood_quadrature():
    t0 = time.perf_counter()
    cases = [
        # (seed, n, mode, parents, g)
        (51, 8, "cdag", (1,), None),
        (52, 8, "cdag", (1, 2), None),
        (53, 10, "dag", (1, 2), 10.0),
        (54, 9, "cdag", (), 3.5),
        (55, 10, "dag", (2,), None),
    ]
    worst = 0.0
    for seed, n, mode, parents, g_val in cases:
        rng = np.random.default_rng(seed)
        p = 3
        x = rng.standard_normal((n, p))
        y = np.empty((n, p))
        y[:, 0] = 0.8 * x[:, 0] + rng.standard_normal(n)
        y[:, 1] = 0.8 * x[:, 1] + 1.1 * y[:, 0] + rng.standard_normal(n)
        y[:, 2] = 0.8 * x[:, 2] - 0.9 * y[:, 1] + rng.standard_normal(n)
        d = Dataset(y=y, x=x)
        cfg = GPriorConfig(g=g_val)
        model = LocalModel(1, parents, mode)
        closed = log_marginal_likelihood(d, model, cfg)
        m0, _ = design_matrices(d, model)
        pool = d.y if mode != "dag2" else np.hstack([d.y, d.x])
        oracle = quadrature_log_marginal(
            pool[:, 1], m0, pool[:, list(parents)], cfg.effective_g(n)
        )
        worst = max(worst, abs(closed - oracle) / abs(oracle))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-6 and elapsed < 30.0
    _report("C5 closed form vs quadrature oracle (5 instances)", ok,
            f"worst rel err={worst:.2e}, elapsed={elapsed:.1f}s")


def test_c06_exact_search_optimality():
    t0 = time.perf_counter()
    rng = np.random.default_rng(206)
    dags = all_dags(4)
    hits = 0
    for _ in range(100):
        mapping = {}
        for j in range(4):
            cands = [c for c in range(4) if c != j]
            mapping[j] = {
                par: float(rng.normal())
                for r in range(4)
                for par in itertools.combinations(cands, r)
            }
        table = ScoreTable.from_dicts(4, mapping)
        res = exact_map(table)
        best_graph, best_score = best_dag_by_enumeration(table, dags)
        if res.graph == best_graph and abs(res.log_score - best_score) < 1e-12:
            hits += 1
    elapsed = time.perf_counter() - t0
    _report("C6 exact search matches enumeration (100 tables)",
            hits == 100 and elapsed < 60.0,
            f"matches={hits}/100, elapsed={elapsed:.1f}s")


def test_c07_benchmark_orderings_at_n1000():
    t0 = time.perf_counter()
    report = run_benchmark(
        thetas=[0.0, 0.5, 0.99],
        ps=[5, 10, 15],
        ns=[1000],
        replicates=10,
        seed=1,
        threads=THREADS,
    )
    failures = []
    for theta in (0.0, 0.5, 0.99):
        for p in (5, 10, 15):
            cdag = report.cell(theta, p, 1000, "cdag").mean_shd
            dag2 = report.cell(theta, p, 1000, "dag2").mean_shd
            dag = report.cell(theta, p, 1000, "dag").mean_shd
            if not (cdag <= dag2 and cdag <= dag):
                failures.append((theta, p, cdag, dag2, dag))
    headline = report.cell(0.0, 5, 1000, "cdag").mean_shd
    elapsed = time.perf_counter() - t0
    ok = not failures and headline <= 1.5 and elapsed < 1800.0
    _report("C7 benchmark orderings at n=1000", ok,
            f"failures={failures}, cdag(theta=0,p=5)={headline}, "
            f"elapsed={elapsed / 60:.1f}min")


def test_c08_consistency_trend_in_n():
    t0 = time.perf_counter()
    report = run_benchmark(
        thetas=[0.0], ps=[5], ns=[10, 100, 1000], replicates=10, seed=2,
        threads=THREADS,
    )
    means = [report.cell(0.0, 5, n, "cdag").mean_shd for n in (10, 100, 1000)]
    ok = means[1] <= means[0] + 0.5 and means[2] <= means[1] + 0.5
    elapsed = time.perf_counter() - t0
    _report("C8 consistency trend over n", ok,
            f"means={means}, elapsed={elapsed:.0f}s")


def test_c09_misspecification_sweep():
    t0 = time.perf_counter()
    report = run_misspec_sweep(
        misspec_probs=[0.0, 0.25, 0.5, 0.75, 1.0],
        replicates=10,
        seed=3,
        p=15,
        n=1000,
        theta=0.0,
        threads=THREADS,
    )
    gap0 = report.cell(0.0, "dag").mean_shd - report.cell(0.0, "cdag").mean_shd
    gap1 = report.cell(1.0, "dag").mean_shd - report.cell(1.0, "cdag").mean_shd
    elapsed = time.perf_counter() - t0
    ok = gap0 >= 3.0 and gap1 <= gap0 / 3.0 and elapsed < 2700.0
    _report("C9 misspecification degradation", ok,
            f"gap(0)={gap0:.2f}, gap(1)={gap1:.2f}, elapsed={elapsed / 60:.1f}min")


def test_c10_byte_identical_reruns(tmp_path):
    def one_run(tag: str) -> dict[str, bytes]:
        base = tmp_path / tag
        base.mkdir()
        data, truth, graph, report = (
            base / "d.csv", base / "t.json", base / "g.json", base / "r.csv",
        )
        assert cli_main([
            "simulate", "--p", "4", "--n", "120", "--theta", "0.5",
            "--misspec-prob", "0.5", "--seed", "7",
            "--out-data", str(data), "--out-truth", str(truth), "--quiet",
        ]) == 0
        assert cli_main([
            "estimate", "--data", str(data), "--mode", "dag2",
            "--out", str(graph), "--seed", "7", "--quiet",
        ]) == 0
        assert cli_main([
            "benchmark", "--theta", "0,0.5", "--p", "4", "--n", "60",
            "--reps", "2", "--seed", "7", "--out", str(report),
            "--threads", "2", "--quiet",
        ]) == 0
        return {f.name: f.read_bytes() for f in (data, truth, graph, report)}

    first = one_run("a")
    second = one_run("b")
    same = {name: first[name] == second[name] for name in first}
    _report("C10 byte-identical seeded reruns", all(same.values()), f"{same}")
