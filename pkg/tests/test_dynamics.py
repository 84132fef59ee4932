"""Generators: Lorenz resampling, tent lattices, topology classes."""

import numpy as np
import pytest

from infoflow.dynamics import (
    CtmlConfig,
    DependencyGraph,
    LorenzParams,
    TopologyClass,
    _free_tent_orbit,
    ctml_generate,
    enumerate_topologies,
    lorenz_ensemble,
    lorenz_generate,
    tent_map,
)
from infoflow.errors import NTooLarge, OutOfDomain, ShapeMismatch


class TestTentMap:
    @pytest.mark.parametrize(
        "x,fx", [(0.0, 0.0), (0.25, 0.5), (0.5, 1.0), (0.75, 0.5), (1.0, 0.0)]
    )
    def test_values(self, x, fx):
        assert tent_map(x) == fx

    @pytest.mark.parametrize("x", [-0.1, 1.1, 2.0])
    def test_domain(self, x):
        with pytest.raises(OutOfDomain):
            tent_map(x)

    def test_free_orbit_deterministic_and_alive(self):
        a = _free_tent_orbit(0.37, 10_000, np.random.default_rng(5))
        b = _free_tent_orbit(0.37, 10_000, np.random.default_rng(5))
        assert np.array_equal(a, b)
        assert a.min() > 0.0 and a.max() < 1.0
        # undithered float64 orbits die within ~60 steps; this one must not
        assert a[-1000:].std() > 0.1

    def test_free_orbit_tracks_bare_map_initially(self):
        orbit = _free_tent_orbit(0.37, 5, np.random.default_rng(0))
        x, bare = 0.37, []
        for _ in range(5):
            x = tent_map(x)
            bare.append(x)
        np.testing.assert_allclose(orbit, bare, atol=1e-12)


class TestLorenz:
    def test_params_guards(self):
        with pytest.raises(ShapeMismatch):
            LorenzParams(dt_integrate=0.0)
        with pytest.raises(ShapeMismatch):
            LorenzParams(t0=10.0, t1=10.0)

    def test_generate_shape_and_determinism(self):
        params = LorenzParams(t0=5.0, t1=9.0)
        series = lorenz_generate(params, resample_dt=0.05, n_samples=60, seed=4)
        assert series.values.shape == (3, 60)
        assert series.sample_interval == 0.05
        again = lorenz_generate(params, resample_dt=0.05, n_samples=60, seed=4)
        assert np.array_equal(series.values, again.values)
        other = lorenz_generate(params, resample_dt=0.05, n_samples=60, seed=5)
        assert not np.array_equal(series.values, other.values)

    def test_generate_stays_on_attractor(self):
        params = LorenzParams(t0=5.0, t1=15.0)
        series = lorenz_generate(params, resample_dt=0.05, n_samples=200, seed=0)
        x, y, z = series.values
        assert np.all(np.abs(x) < 25) and np.all(np.abs(y) < 35)
        assert np.all(z > 0) and np.all(z < 55)

    def test_horizon_guard(self):
        params = LorenzParams(t0=5.0, t1=6.0)
        with pytest.raises(ShapeMismatch):
            lorenz_generate(params, resample_dt=0.05, n_samples=100, seed=0)

    def test_argument_guards(self):
        params = LorenzParams(t0=1.0, t1=5.0)
        with pytest.raises(ShapeMismatch):
            lorenz_generate(params, resample_dt=-0.1, n_samples=10, seed=0)
        with pytest.raises(ShapeMismatch):
            lorenz_generate(params, resample_dt=0.05, n_samples=1, seed=0)

    def test_ensemble_sets_differ(self):
        params = LorenzParams(t0=5.0, t1=8.0)
        sets = lorenz_ensemble(params, 0.05, 40, n_sets=3, seed=7)
        assert len(sets) == 3
        assert not np.array_equal(sets[0].values, sets[1].values)
        assert not np.array_equal(sets[1].values, sets[2].values)


class TestDependencyGraph:
    def test_edges_row_major(self):
        g = DependencyGraph.from_edges(3, [(2, 0), (0, 1)])
        assert g.edges == ((0, 1), (2, 0))
        assert g.n_edges == 2
        assert g.n_vars == 3

    def test_diagonal_scrubbed(self):
        g = DependencyGraph(np.ones((2, 2), dtype=bool))
        assert g.edges == ((0, 1), (1, 0))

    def test_from_edges_range_guard(self):
        with pytest.raises(ShapeMismatch):
            DependencyGraph.from_edges(2, [(0, 2)])

    def test_square_guard(self):
        with pytest.raises(ShapeMismatch):
            DependencyGraph(np.zeros((2, 3), dtype=bool))

    def test_dict_roundtrip(self):
        g = DependencyGraph.from_edges(4, [(1, 3), (3, 0)])
        assert DependencyGraph.from_dict(g.to_dict()) == g
        assert g.to_dict() == {"n_vars": 4, "edges": [[1, 3], [3, 0]]}

    def test_eq_and_hash(self):
        a = DependencyGraph.from_edges(3, [(0, 1)])
        b = DependencyGraph.from_edges(3, [(0, 1)])
        c = DependencyGraph.from_edges(3, [(1, 0)])
        assert a == b and hash(a) == hash(b)
        assert a != c
        assert a != "not a graph"

    def test_adjacency_is_frozen(self):
        g = DependencyGraph.from_edges(2, [(0, 1)])
        with pytest.raises(ValueError):
            g.adjacency[0, 1] = False


class TestCtml:
    def test_config_guards(self):
        empty = DependencyGraph.from_edges(2, [])
        with pytest.raises(ShapeMismatch):
            CtmlConfig(empty, epsilon=-0.1)
        with pytest.raises(ShapeMismatch):
            CtmlConfig(empty, noise_amplitude=-1.0)
        with pytest.raises(ShapeMismatch):
            CtmlConfig(empty, steps=0)
        with pytest.raises(ShapeMismatch):
            CtmlConfig(empty, burn_in=-1)
        assert CtmlConfig(empty).n_vars == 2

    def test_shape_range_determinism(self):
        cfg = CtmlConfig(
            DependencyGraph.from_edges(3, [(0, 1), (1, 2)]),
            steps=500,
            burn_in=100,
            seed=3,
        )
        series = ctml_generate(cfg)
        assert series.values.shape == (3, 500)
        assert series.values.min() >= 0.0 and series.values.max() <= 1.0
        assert np.array_equal(series.values, ctml_generate(cfg).values)

    def test_coupled_update_matches_formula(self):
        # noiseless chain 0 -> 1: the driven variable must satisfy the exact
        # recurrence x1' = f((x1 + eps * x0) / (1 + eps)) step by step
        cfg = CtmlConfig(
            DependencyGraph.from_edges(2, [(0, 1)]),
            epsilon=0.2,
            steps=200,
            burn_in=0,
            seed=21,
        )
        v = ctml_generate(cfg).values
        mixed = (v[1, :-1] + 0.2 * v[0, :-1]) / 1.2
        expect = np.where(mixed < 0.5, 2.0 * mixed, 2.0 - 2.0 * mixed)
        np.testing.assert_array_equal(v[1, 1:], expect)

    def test_noisy_update_replayed_from_streams(self):
        # full replay of the two-cycle with noise, drawing from the same
        # spawned streams in the same order
        eps, r, total, seed = 0.3, 0.05, 50, 9
        cfg = CtmlConfig(
            DependencyGraph.from_edges(2, [(0, 1), (1, 0)]),
            epsilon=eps,
            noise_amplitude=r,
            steps=total,
            burn_in=0,
            seed=seed,
        )
        v = ctml_generate(cfg).values

        streams = [
            np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(2)
        ]
        x = np.array([float(s.uniform()) for s in streams])
        noise = np.stack([s.uniform(0.0, r, size=total) for s in streams])
        out = np.empty((2, total))
        for t in range(total):
            eta = noise[:, t]
            mixed = (x + eps * x[::-1] + eta) / (1.0 + eps + eta)
            x = np.where(mixed < 0.5, 2.0 * mixed, 2.0 - 2.0 * mixed)
            out[:, t] = x
        np.testing.assert_array_equal(v, out)

    def test_decoupled_variables_independent(self):
        cfg = CtmlConfig(
            DependencyGraph.from_edges(3, []), steps=20_000, burn_in=200, seed=1
        )
        v = ctml_generate(cfg).values
        corr = np.corrcoef(v)
        off = corr[~np.eye(3, dtype=bool)]
        assert np.all(np.abs(off) < 0.05)
        # and boolean symbols should be near-balanced
        means = (v >= np.median(v, axis=1, keepdims=True)).mean(axis=1)
        np.testing.assert_allclose(means, 0.5, atol=0.01)

    def test_zero_epsilon_ignores_edges(self):
        edges = [(0, 1), (1, 0)]
        with_edges = ctml_generate(
            CtmlConfig(
                DependencyGraph.from_edges(2, edges),
                epsilon=0.0,
                steps=300,
                burn_in=0,
                seed=2,
            )
        )
        without = ctml_generate(
            CtmlConfig(
                DependencyGraph.from_edges(2, []),
                epsilon=0.0,
                steps=300,
                burn_in=0,
                seed=2,
            )
        )
        assert np.array_equal(with_edges.values, without.values)

    def test_burn_in_is_a_suffix(self):
        g = DependencyGraph.from_edges(2, [(0, 1)])
        full = ctml_generate(CtmlConfig(g, steps=400, burn_in=0, seed=6))
        cut = ctml_generate(CtmlConfig(g, steps=300, burn_in=100, seed=6))
        assert np.array_equal(full.values[:, 100:], cut.values)


class TestTopologies:
    @pytest.mark.parametrize("n,count,total", [(2, 3, 4), (3, 16, 64), (4, 218, 4096)])
    def test_class_counts(self, n, count, total):
        classes = enumerate_topologies(n)
        assert len(classes) == count
        assert sum(c.size for c in classes) == total
        assert all(isinstance(c, TopologyClass) for c in classes)

    def test_guards(self):
        with pytest.raises(NTooLarge):
            enumerate_topologies(6)
        with pytest.raises(ShapeMismatch):
            enumerate_topologies(1)

    def test_extreme_classes_are_singletons(self):
        classes = enumerate_topologies(3)
        assert classes[0].graph.n_edges == 0
        assert classes[0].size == 1
        assert classes[-1].graph.n_edges == 6
        assert classes[-1].size == 1

    def test_representatives_are_canonical(self):
        # no relabeling of a representative may sort below the representative
        import itertools

        classes = enumerate_topologies(3)
        reps = {c.graph for c in classes}
        for cls in classes:
            adj = cls.graph.adjacency
            seen = set()
            for perm in itertools.permutations(range(3)):
                p = np.asarray(perm)
                relabeled = DependencyGraph(adj[np.ix_(np.argsort(p), np.argsort(p))])
                seen.add(relabeled)
            # the whole orbit shares one representative and has the right size
            assert len(seen & reps) == 1
            assert len(seen) == cls.size

    def test_known_two_variable_classes(self):
        classes = enumerate_topologies(2)
        by_edges = sorted(c.graph.n_edges for c in classes)
        assert by_edges == [0, 1, 2]
        sizes = {c.graph.n_edges: c.size for c in classes}
        assert sizes == {0: 1, 1: 2, 2: 1}
