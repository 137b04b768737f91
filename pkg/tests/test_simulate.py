import numpy as np
import pytest

from cdag import Dag, GroundTruth, InputError, SimConfig, is_acyclic, sample_dag, simulate

from oracles import partial_correlation


class TestSimConfig:
    def test_validation(self):
        with pytest.raises(InputError):
            SimConfig(p=0, n=10)
        with pytest.raises(InputError):
            SimConfig(p=3, n=10, theta=1.5)
        with pytest.raises(InputError):
            SimConfig(p=3, n=10, edge_prob=0.0)
        with pytest.raises(InputError):
            SimConfig(p=3, n=10, coef_low=0.0)
        with pytest.raises(InputError):
            SimConfig(p=3, n=10, misspec_prob=-0.1)

    def test_default_edge_prob(self):
        assert SimConfig(p=15, n=10).resolved_edge_prob() == pytest.approx(2 / 14)
        assert SimConfig(p=2, n=10).resolved_edge_prob() == 1.0


class TestSampleDag:
    def test_always_acyclic(self):
        rng = np.random.default_rng(0)
        for _ in range(100):
            p = int(rng.integers(1, 10))
            g = sample_dag(p, float(rng.uniform(0.05, 1.0)), rng)
            assert is_acyclic(g.edges, p)

    def test_tiny_edge_prob_gives_empty(self):
        rng = np.random.default_rng(1)
        for _ in range(20):
            assert sample_dag(6, 1e-9, rng) == Dag(6)

    def test_mean_edge_count(self):
        rng = np.random.default_rng(2)
        counts = [len(sample_dag(10, 0.2, rng).edges) for _ in range(500)]
        assert abs(np.mean(counts) - 0.2 * 45) < 1.0


class TestGroundTruth:
    def test_misspec_must_mirror_real_edges(self):
        g = Dag(3, frozenset({(0, 1)}))
        gp = Dag(3)
        with pytest.raises(InputError):
            GroundTruth(g, gp, frozenset({(1, 2)}))


class TestSimulate:
    def test_bit_identical_reproducibility(self):
        cfg = SimConfig(p=6, n=40, theta=0.7, misspec_prob=0.5, seed=123)
        d1, t1 = simulate(cfg)
        d2, t2 = simulate(cfg)
        assert np.array_equal(d1.y, d2.y) and np.array_equal(d1.x, d2.x)
        assert t1 == t2

    def test_theta_zero_gives_independent_secondaries(self):
        data, _ = simulate(SimConfig(p=5, n=5000, theta=0.0, seed=3))
        corr = np.corrcoef(data.x, rowvar=False)
        off = corr[~np.eye(5, dtype=bool)]
        assert np.abs(off).max() < 0.1

    def test_misspec_prob_extremes(self):
        _, truth0 = simulate(SimConfig(p=6, n=10, misspec_prob=0.0, seed=4))
        assert truth0.misspec_edges == frozenset()
        _, truth1 = simulate(SimConfig(p=6, n=10, misspec_prob=1.0, seed=4))
        assert truth1.misspec_edges == truth1.g.edges

    def test_theta_monotone_secondary_correlation(self):
        levels = []
        for theta in (0.0, 0.5, 0.99):
            acc = []
            for draw in range(20):
                data, _ = simulate(SimConfig(p=6, n=5000, theta=theta, seed=1000 + draw))
                corr = np.corrcoef(data.x, rowvar=False)
                acc.append(np.abs(corr[~np.eye(6, dtype=bool)]).mean())
            levels.append(np.mean(acc))
        assert levels[0] < levels[1] < levels[2]

    def test_partial_faithfulness_directions(self):
        # large-n check of the instrument logic: for a real edge i -> j the
        # partial correlation of (x_i, y_j) given (x_j, y_{pa(j) minus i}) stays
        # away from zero; for an absent edge, conditioning on (x_j, y_pa(j))
        # sends it to zero
        data, truth = simulate(SimConfig(p=5, n=20000, theta=0.5, seed=77))
        g = truth.g
        present = sorted(g.edges)
        absent = sorted(
            (i, j)
            for i in range(5)
            for j in range(5)
            if i != j and (i, j) not in g.edges
        )
        assert present and absent
        for i, j in present[:3]:
            cols = [data.x[:, j]] + [data.y[:, k] for k in sorted(g.parents(j) - {i})]
            r = partial_correlation(data.x[:, i], data.y[:, j], np.column_stack(cols))
            assert abs(r) > 0.05, f"edge ({i},{j}) instrument signal too weak: {r}"
        for i, j in absent[:4]:
            cols = [data.x[:, j]] + [data.y[:, k] for k in sorted(g.parents(j))]
            r = partial_correlation(data.x[:, i], data.y[:, j], np.column_stack(cols))
            assert abs(r) < 0.05, f"non-edge ({i},{j}) partial correlation too big: {r}"
