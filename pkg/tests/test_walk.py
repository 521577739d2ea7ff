import numpy as np
import pytest
from hypothesis import given
import hypothesis.strategies as st

from rdswalk.errors import InputError, StructuralError
from rdswalk.generators import ErParams, gen_directed_er
from rdswalk.graphs import build_graph, largest_scc
from rdswalk.walk import (WalkSample, count_revisits, inverse_outdegree_sum,
                          load_sample, run_walk, save_sample)

from conftest import strongly_connected_graphs


def two_cycle():
    return build_graph([(0, 1), (1, 0)], 2)


def directed_three_cycle():
    return build_graph([(0, 1), (1, 2), (2, 0)], 3)


class TestRunWalk:
    def test_three_cycle_no_revisits(self):
        w = run_walk(directed_three_cycle(), 10, seed=0, start=0)
        assert w.visits.tolist() == [0, 1, 2, 0, 1, 2, 0, 1, 2, 0]
        assert w.revisit_count == 0

    def test_two_cycle_alternates(self):
        w = run_walk(two_cycle(), 10, seed=0, start=0)
        assert w.visits.tolist() == [0, 1] * 5
        assert w.revisit_count == 8

    def test_deterministic(self):
        g = largest_scc(gen_directed_er(ErParams(n=100, alpha=0.5, lam=6.0), 3))
        a = run_walk(g, 50, seed=11)
        b = run_walk(g, 50, seed=11)
        assert a.visits.tolist() == b.visits.tolist()
        assert a.start_vertex == b.start_vertex

    def test_burn_in_is_a_shifted_walk(self):
        g = largest_scc(gen_directed_er(ErParams(n=100, alpha=0.5, lam=6.0), 3))
        full = run_walk(g, 30, seed=5, start=0)
        burned = run_walk(g, 20, seed=5, start=0, burn_in=10)
        assert burned.visits.tolist() == full.visits[10:].tolist()
        assert burned.start_vertex == full.visits[10]

    @given(strongly_connected_graphs(), st.integers(0, 2**32 - 1))
    def test_consecutive_visits_adjacent(self, g, seed):
        w = run_walk(g, 25, seed=seed)
        for t in range(w.size - 1):
            assert w.visits[t + 1] in g.out_neighbors(w.visits[t])

    def test_observed_degrees_match_graph(self):
        g = build_graph([(0, 1), (1, 0), (1, 2), (2, 0)], 3)
        w = run_walk(g, 12, seed=2)
        for t, v in enumerate(w.visits):
            assert (w.d_un[t], w.d_in[t], w.d_out[t]) == g.degree_triple(int(v))
            assert w.out_degrees[t] == g.out_degrees[v]

    def test_flags_recorded_per_visit(self):
        g = two_cycle()
        w = run_walk(g, 6, seed=0, start=0, flags=np.array([1, 0], dtype=np.int8))
        assert w.flags.tolist() == [1, 0, 1, 0, 1, 0]

    def test_with_replacement_revisits_vertices(self):
        g = largest_scc(gen_directed_er(ErParams(n=20, alpha=0.3, lam=5.0), 1))
        w = run_walk(g, 100, seed=4)
        _, counts = np.unique(w.visits, return_counts=True)
        assert counts.max() > 1

    def test_zero_outdegree_structural_error(self):
        g = build_graph([(0, 1)], 2)
        with pytest.raises(StructuralError):
            run_walk(g, 5, seed=0, start=0)

    def test_length_validation(self):
        with pytest.raises(InputError):
            run_walk(two_cycle(), 1, seed=0)

    def test_bad_start(self):
        with pytest.raises(InputError):
            run_walk(two_cycle(), 5, seed=0, start=7)

    def test_revisit_ratio_matches_expected_rate(self):
        # Monte Carlo: on the ER model the revisit count over the
        # inverse-out-degree sum estimates (1-alpha)/(1-alpha/2)
        g = largest_scc(gen_directed_er(ErParams(n=1000, alpha=0.5, lam=10.0), 0))
        ratios = []
        for seed in range(1000):
            w = run_walk(g, 500, seed=seed)
            ratios.append(w.revisit_count / inverse_outdegree_sum(w))
        se = np.std(ratios, ddof=1) / np.sqrt(len(ratios))
        assert abs(np.mean(ratios) - 2 / 3) < 3 * se + 0.01


class TestRevisitCount:
    @given(st.lists(st.integers(0, 4), min_size=2, max_size=60))
    def test_matches_brute_force(self, visits):
        arr = np.asarray(visits)
        brute = sum(1 for t in range(2, len(visits)) if visits[t] == visits[t - 2])
        assert count_revisits(arr) == brute

    @given(st.lists(st.integers(0, 4), min_size=2, max_size=60))
    def test_bounded_by_length(self, visits):
        assert count_revisits(np.asarray(visits)) <= len(visits) - 2

    def test_walk_field_consistent(self):
        g = largest_scc(gen_directed_er(ErParams(n=50, alpha=0.5, lam=6.0), 9))
        w = run_walk(g, 200, seed=1)
        assert w.revisit_count == count_revisits(w.visits)


class TestInverseOutdegreeSum:
    def test_two_cycle(self):
        w = run_walk(two_cycle(), 10, seed=0)
        assert inverse_outdegree_sum(w) == pytest.approx(9.0)

    def test_arithmetic(self):
        w = WalkSample(visits=np.arange(4), out_degrees=np.array([2, 4, 4, 2]),
                       d_un=None, d_in=None, d_out=None,
                       flags=np.zeros(4, dtype=np.int8), revisit_count=0,
                       start_vertex=0, seed=None)
        assert inverse_outdegree_sum(w) == pytest.approx(1 / 2 + 1 / 4 + 1 / 4)

    @given(strongly_connected_graphs(), st.integers(0, 1000))
    def test_at_most_length_minus_one(self, g, seed):
        w = run_walk(g, 15, seed=seed)
        assert inverse_outdegree_sum(w) <= w.size - 1 + 1e-12


class TestSampleIo:
    def test_full_regime_round_trip(self, tmp_path):
        g = build_graph([(0, 1), (1, 0), (1, 2), (2, 0)], 3)
        w = run_walk(g, 20, seed=7, flags=np.array([1, 0, 1], dtype=np.int8))
        path = tmp_path / "sample.txt"
        save_sample(w, path, regime="full")
        r = load_sample(path)
        assert r.visits.tolist() == w.visits.tolist()
        assert r.d_un.tolist() == w.d_un.tolist()
        assert r.flags.tolist() == w.flags.tolist()
        assert r.revisit_count == w.revisit_count
        assert r.seed == 7

    def test_outdeg_regime_round_trip(self, tmp_path):
        g = build_graph([(0, 1), (1, 0), (1, 2), (2, 0)], 3)
        w = run_walk(g, 20, seed=7)
        path = tmp_path / "sample.txt"
        save_sample(w, path, regime="outdeg")
        r = load_sample(path)
        assert not r.has_full_degrees
        assert r.out_degrees.tolist() == w.out_degrees.tolist()

    def test_revisit_mismatch_rejected(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("3 1 0 2\n0 1 0\n1 1 0\n0 1 0\n")  # true m is 1, header says 2
        with pytest.raises(InputError):
            load_sample(path)

    def test_header_count_mismatch(self, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("5 1 0 0\n0 1 0\n1 1 0\n")
        with pytest.raises(InputError):
            load_sample(path)
