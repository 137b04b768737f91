import itertools

import numpy as np
import pytest

from cdag import (
    Cdag,
    Dag,
    InputError,
    Query,
    all_dags,
    c_separated,
    d_separated,
    extended_graph,
    independence_model,
    pairwise_relations,
    v,
    w,
)
from cdag.separation import EXTENSION_NODE

from helpers import random_cdag, random_query

FIG1 = Cdag(Dag(3, frozenset({(0, 1), (1, 2)})))


class TestQuery:
    def test_rejects_empty_sides(self):
        with pytest.raises(InputError):
            Query(a=set(), b={v(0)})

    def test_rejects_overlap(self):
        with pytest.raises(InputError):
            Query(a={v(0)}, b={v(1)}, c={v(0)})

    def test_key_is_symmetric(self):
        q1 = Query(a={v(1)}, b={v(0)}, c={w(0)})
        q2 = Query(a={v(0)}, b={v(1)}, c={w(0)})
        assert q1.key() == q2.key()


class TestCSeparated:
    def test_fig1_golden_negative(self):
        assert c_separated(FIG1, Query(a={v(2)}, b={v(0)}, c={v(1)})) is False

    def test_reverse_instrument_blocked_for_root_source(self):
        # with edge v_i -> v_j present and v_i a root, w_j is separated from
        # v_i by {w_i}; in Fig. 1 that is the first chain edge
        assert c_separated(FIG1, Query(a={w(1)}, b={v(0)}, c={w(0)})) is True

    def test_reverse_instrument_open_through_upstream_secondary(self):
        # for the second chain edge the source v_1 has a parent, and the
        # secondary clique opens w_2 - w_0 - v_0 - v_1
        assert c_separated(FIG1, Query(a={w(2)}, b={v(1)}, c={w(1)})) is False

    def test_marginal_primaries_never_separated(self):
        # the oracle (path enumeration on the 4-node step-(iv) graph) says the
        # secondary clique always connects two primaries given nothing
        g = Cdag(Dag(2))
        assert c_separated(g, Query(a={v(0)}, b={v(1)})) is False


class TestDSeparated:
    def test_fig1_primary_chain_positive(self):
        q = Query(a={v(2)}, b={v(0)}, c={v(1)})
        assert d_separated(FIG1.primary, q) is True

    def test_collider(self):
        g = Dag(3, frozenset({(0, 2), (1, 2)}))
        assert d_separated(g, Query(a={v(0)}, b={v(1)})) is True
        assert d_separated(g, Query(a={v(0)}, b={v(1)}, c={v(2)})) is False


class TestExtendedGraph:
    def test_p1(self):
        eg = extended_graph(Cdag(Dag(1)))
        assert eg.nodes == {EXTENSION_NODE, v(0), w(0)}
        assert eg.edges == {(EXTENSION_NODE, w(0)), (w(0), v(0))}

    def test_fig1_shape(self):
        eg = extended_graph(FIG1)
        assert len(eg.nodes) == 7
        z_edges = {e for e in eg.edges if e[0] == EXTENSION_NODE}
        bij = {e for e in eg.edges if isinstance(e[0], type(w(0))) and e[0].kind == "w"}
        assert len(z_edges) == 3 and len(bij) == 3 and len(eg.edges) == 8

    def test_p0_degenerate(self):
        eg = extended_graph(Cdag(Dag(0)))
        assert eg.nodes == {EXTENSION_NODE}
        assert not eg.edges


class TestExtendedGraphEquivalence:
    def test_fuzz(self):
        rng = np.random.default_rng(10)
        checked = 0
        while checked < 300:
            p = int(rng.integers(1, 7))
            g = random_cdag(rng, p, float(rng.uniform(0.1, 0.9)))
            q = random_query(rng, p)
            if q is None:
                continue
            assert c_separated(g, q) == d_separated(extended_graph(g), q)
            checked += 1


class TestEdgePresenceRelations:
    def test_relations_for_every_edge(self):
        rng = np.random.default_rng(11)
        graphs = [Cdag(d) for d in all_dags(3)] + [random_cdag(rng, 5) for _ in range(20)]
        for g in graphs:
            p = g.p
            for i, j in g.primary.edges:
                rest = {v(k) for k in range(p) if k not in (i, j)}
                # (i) w_i not independent of v_j given w_j
                assert not c_separated(g, Query(a={w(i)}, b={v(j)}, c={w(j)}))
                # (ii) ... nor given w_j and all other primaries
                assert not c_separated(g, Query(a={w(i)}, b={v(j)}, c={w(j)} | rest))
                # (iii) w_j is independent of v_i given w_i exactly when v_i is
                # a root; any parent v_k of v_i opens w_j - w_k - v_k - v_i
                expected = len(g.primary.parents(i)) == 0
                assert c_separated(g, Query(a={w(j)}, b={v(i)}, c={w(i)})) == expected


class TestRemark2Characterization:
    @pytest.mark.parametrize("p", [2, 3, 4])
    def test_edge_absent_iff_separating_subset_exists(self, p):
        for dag in all_dags(p):
            g = Cdag(dag)
            for i, j in itertools.permutations(range(p), 2):
                pa = sorted(dag.parents(j) - {i})
                found = False
                for r in range(len(pa) + 1):
                    for sub in itertools.combinations(pa, r):
                        cond = {w(j)} | {v(k) for k in sub}
                        if c_separated(g, Query(a={w(i)}, b={v(j)}, c=cond)):
                            found = True
                            break
                    if found:
                        break
                assert found == ((i, j) not in dag.edges)


class TestIndependenceModel:
    def test_p1_no_relations(self):
        model = independence_model(Cdag(Dag(1)), {v(0), w(0)})
        assert model.relations == frozenset()

    def test_p2_edge_changes_model(self):
        scope = {v(0), v(1), w(0), w(1)}
        m_empty = independence_model(Cdag(Dag(2)), scope)
        m_edge = independence_model(Cdag(Dag(2, frozenset({(0, 1)}))), scope)
        assert m_empty != m_edge

    def test_fig1_contains_instrument_relation(self):
        scope = {v(i) for i in range(3)} | {w(i) for i in range(3)}
        model = independence_model(FIG1, scope)
        assert model.holds({w(0)}, {v(1)}, {w(1), v(0)})

    def test_holds_symmetry_and_triviality(self):
        scope = {v(i) for i in range(2)} | {w(i) for i in range(2)}
        model = independence_model(Cdag(Dag(2, frozenset({(0, 1)}))), scope)
        rng = np.random.default_rng(12)
        for _ in range(50):
            q = random_query(rng, 2)
            if q is None:
                continue
            assert model.holds(q.a, q.b, q.c) == model.holds(q.b, q.a, q.c)
        assert model.holds(set(), {v(0)}, set())
        assert model.holds({v(0)}, set(), {w(1)})

    def test_scope_guard(self):
        g = Cdag(Dag(5))
        scope = {v(i) for i in range(5)} | {w(i) for i in range(4)}
        with pytest.raises(InputError):
            independence_model(g, scope)


class TestComposition:
    """The full model is determined by its singleton-pair restriction."""

    def _check(self, g, scope):
        model = independence_model(g, scope)
        pairs = pairwise_relations(g, scope)
        singleton = frozenset(k for k in model.relations if len(k[0]) == 1 and len(k[1]) == 1)
        assert singleton == pairs
        for key in model.relations:
            a, b, c = key
            assert all(
                model.holds({x}, {y}, c) for x in a for y in b
            ), f"composition broken at {key}"
        # and conversely: any triple whose pairs all hold must be in the model
        nodes = sorted(scope)
        rng = np.random.default_rng(13)
        for _ in range(200):
            sides = rng.integers(0, 4, size=len(nodes))
            a = {n for n, s in zip(nodes, sides) if s == 1}
            b = {n for n, s in zip(nodes, sides) if s == 2}
            c = {n for n, s in zip(nodes, sides) if s == 3}
            if not a or not b:
                continue
            all_pairs = all(model.holds({x}, {y}, c) for x in a for y in b)
            assert model.holds(a, b, c) == all_pairs

    def test_all_p2_cdags(self):
        scope = {v(0), v(1), w(0), w(1)}
        for dag in all_dags(2):
            self._check(Cdag(dag), scope)

    def test_random_p3_cdags(self):
        rng = np.random.default_rng(14)
        scope = {v(i) for i in range(3)} | {w(i) for i in range(3)}
        for _ in range(5):
            self._check(random_cdag(rng, 3, 0.5), scope)


class TestSemiGraphoidAxioms:
    def test_random_p3(self):
        rng = np.random.default_rng(15)
        for _ in range(10):
            g = random_cdag(rng, 3, 0.5)
            nodes = [v(i) for i in range(3)] + [w(i) for i in range(3)]
            model = independence_model(g, nodes)
            for sides in itertools.product(range(5), repeat=6):
                a = {n for n, s in zip(nodes, sides) if s == 1}
                b = {n for n, s in zip(nodes, sides) if s == 2}
                c = {n for n, s in zip(nodes, sides) if s == 3}
                d = {n for n, s in zip(nodes, sides) if s == 4}
                assert model.holds(a, set(), c)  # triviality
                if model.holds(a, b | d, c):
                    assert model.holds(b | d, a, c)  # symmetry
                    assert model.holds(a, d, c)  # decomposition
                    assert model.holds(a, b, c | d)  # weak union
                if model.holds(a, b, c | d) and model.holds(a, d, c):
                    assert model.holds(a, b | d, c)  # contraction
