import itertools
from collections import Counter
from math import comb

import numpy as np
import pytest

from signbalance import census
from signbalance import generators as gen


def degrees(g):
    return np.bincount(g.edges.ravel(), minlength=g.vertex_count)


class TestWattsStrogatz:
    def test_six_cycle(self):
        g = gen.gen_ws(gen.WsSpec(1, 6, 1, 0.0), np.random.default_rng(0))
        assert g.edges.tolist() == [[0, 1], [0, 5], [1, 2], [2, 3], [3, 4], [4, 5]]

    def test_ring_radius_two(self):
        g = gen.gen_ws(gen.WsSpec(1, 100, 2, 0.0), np.random.default_rng(0))
        assert g.n == 200 and set(degrees(g).tolist()) == {4}

    def test_cube_lattice_size(self):
        g = gen.gen_ws(gen.WsSpec(3, 4, 3, 0.2), np.random.default_rng(0))
        assert 500 <= g.n <= 5000

    @pytest.mark.parametrize("d, n, k", [(2, 5, 1), (2, 7, 2), (3, 5, 2)])
    def test_regular_without_rewiring(self, d, n, k):
        g = gen.gen_ws(gen.WsSpec(d, n, k, 0.0), np.random.default_rng(0))
        deg = degrees(g)
        assert len(set(deg.tolist())) == 1
        assert deg[0] == len(gen.lattice_offsets(d, n, k))

    def test_small_ring_wraps(self):
        # n=4, k=2 reaches every other vertex: K4
        g = gen.gen_ws(gen.WsSpec(1, 4, 2, 0.0), np.random.default_rng(0))
        assert g.n == 6

    @pytest.mark.parametrize("p", [0.1, 0.5, 1.0])
    def test_rewiring_keeps_edge_count(self, p):
        spec = gen.WsSpec(1, 60, 3, p)
        g = gen.gen_ws(spec, np.random.default_rng(4))
        assert g.n == 180
        assert np.all(g.edges[:, 0] < g.edges[:, 1])
        assert len({tuple(e) for e in g.edges.tolist()}) == g.n

    def test_rewiring_changes_graph(self):
        a = gen.gen_ws(gen.WsSpec(1, 60, 3, 0.0), np.random.default_rng(4))
        b = gen.gen_ws(gen.WsSpec(1, 60, 3, 0.3), np.random.default_rng(4))
        assert a.edges.tolist() != b.edges.tolist()

    def test_deterministic(self):
        spec = gen.WsSpec(2, 8, 2, 0.3)
        assert gen.gen_ws(spec, np.random.default_rng(9)) == gen.gen_ws(spec, np.random.default_rng(9))

    @pytest.mark.parametrize("kw", [dict(d=0, n_per_dim=4, k=1, rewire_p=0.0),
                                    dict(d=1, n_per_dim=1, k=1, rewire_p=0.0),
                                    dict(d=1, n_per_dim=4, k=0, rewire_p=0.0),
                                    dict(d=1, n_per_dim=4, k=1, rewire_p=1.5)])
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            gen.WsSpec(**kw)


class TestErdosRenyi:
    def test_empty(self):
        assert gen.gen_er_gnm(5, 0, np.random.default_rng(0)).n == 0

    def test_complete(self):
        g = gen.gen_er_gnm(6, 15, np.random.default_rng(0))
        assert g.edges.tolist() == [list(p) for p in itertools.combinations(range(6), 2)]

    def test_too_many(self):
        with pytest.raises(ValueError):
            gen.gen_er_gnm(4, 7, np.random.default_rng(0))

    def test_uniform_subsets(self):
        rng = np.random.default_rng(1)
        draws = 91_000
        freq = Counter(tuple(map(tuple, gen.gen_er_gnm(6, 3, rng).edges.tolist())) for _ in range(draws))
        assert len(freq) == comb(15, 3)
        expected = draws / comb(15, 3)
        # each count is Binomial(draws, 1/455); allow 5 sd
        assert max(abs(c - expected) for c in freq.values()) < 5 * np.sqrt(expected)


class TestSignUniform:
    def test_fractions(self):
        g = gen.gen_ws(gen.WsSpec(1, 10, 2, 0.0), np.random.default_rng(0))
        assert gen.sign_uniform(g, 0.0, np.random.default_rng(0)).m == 0
        assert gen.sign_uniform(g, 1.0, np.random.default_rng(0)).m == g.n
        assert gen.sign_uniform(g, 0.25, np.random.default_rng(0)).m == 5
        assert gen.sign_uniform(g, 3, np.random.default_rng(0)).m == 3

    def test_placement_law(self):
        g = gen.gen_er_gnm(5, 4, np.random.default_rng(0))
        rng = np.random.default_rng(2)
        hits = np.zeros(4)
        for _ in range(40_000):
            hits += gen.sign_uniform(g, 1, rng).negative
        assert np.allclose(hits / 40_000, 0.25, atol=0.01)

    @pytest.mark.parametrize("value", [-1, 11, 1.5])
    def test_out_of_range(self, value):
        g = gen.gen_ws(gen.WsSpec(1, 5, 1, 0.0), np.random.default_rng(0))
        with pytest.raises(ValueError):
            gen.sign_uniform(g, value, np.random.default_rng(0))


class TestCompose:
    def pos(self):
        return gen._from_pairs(5, [(0, 1), (1, 2), (2, 3)])

    def test_disjoint(self):
        g = gen.compose(self.pos(), gen._from_pairs(5, [(3, 4), (0, 4)]))
        assert g.n == 5 and g.m == 2

    def test_identical(self):
        g = gen.compose(self.pos(), self.pos())
        assert g.n == 3 and g.m == 3

    def test_overlap(self):
        g = gen.compose(self.pos(), gen._from_pairs(5, [(1, 2), (2, 4)]))
        assert g.n == 4 and g.m == 2
        assert dict(zip(map(tuple, g.edges.tolist()), g.signs.tolist()))[(1, 2)] == -1

    def test_vertex_mismatch(self):
        with pytest.raises(ValueError):
            gen.compose(self.pos(), gen._from_pairs(6, []))


class TestSignedSbm:
    def test_balanced_model(self):
        spec = gen.SbmSpec(30, 0.5, 0.0, 0.0, 0.5)
        for seed in range(10):
            g = gen.gen_signed_sbm(spec, np.random.default_rng(seed))
            c = census(g)
            assert c.t1 == 0 and c.t3 == 0 and c.total > 0
            within = (g.edges[:, 0] < 15) == (g.edges[:, 1] < 15)
            assert np.all(g.signs[within] == 1) and np.all(g.signs[~within] == -1)

    def test_empty(self):
        assert gen.gen_signed_sbm(gen.SbmSpec(20, 0, 0, 0, 0), np.random.default_rng(0)).n == 0

    def test_clash_policies(self):
        spec = gen.SbmSpec(40, 1.0, 1.0, 1.0, 1.0)
        assert gen.gen_signed_sbm(spec, np.random.default_rng(0)).n == 0
        g = gen.gen_signed_sbm(spec, np.random.default_rng(0), clash="negative")
        assert g.n == comb(40, 2) and g.m == g.n

    def test_balance_free_sign_rate(self):
        # sign independent of position: negative share matches within and between
        spec = gen.SbmSpec(100, 0.2, 0.2, 0.1, 0.1)
        g = gen.gen_signed_sbm(spec, np.random.default_rng(5))
        within = (g.edges[:, 0] < 50) == (g.edges[:, 1] < 50)
        a, b = g.negative[within].mean(), g.negative[~within].mean()
        assert abs(a - b) < 0.05

    def test_models(self):
        assert gen.SBM_MODELS[2] == gen.SbmSpec(50, 0.3, 0.0, 0.0, 0.3)

    def test_invalid(self):
        with pytest.raises(ValueError):
            gen.SbmSpec(10, 0.5, 1.2, 0, 0)

    def test_deterministic(self):
        spec = gen.SBM_MODELS[1]
        assert gen.gen_signed_sbm(spec, np.random.default_rng(3)) == gen.gen_signed_sbm(spec, np.random.default_rng(3))
