import numpy as np
import pytest

from rdswalk.errors import GenerationError, InputError
from rdswalk.generators import (ErParams, PowerLawParams, _pairs_from_indices,
                                gen_directed_er, gen_power_law,
                                sample_power_law)
from rdswalk.graphs import directedness, is_strongly_connected


def arc_set(g):
    src, dst = g.arcs()
    return set(zip(src.tolist(), dst.tolist()))


class TestPairDecoding:
    @pytest.mark.parametrize("n", [2, 3, 5, 17])
    def test_enumerates_all_pairs(self, n):
        idx = np.arange(n * (n - 1) // 2)
        i, j = _pairs_from_indices(idx, n)
        expected = [(a, b) for a in range(n) for b in range(a + 1, n)]
        assert list(zip(i.tolist(), j.tolist())) == expected

    def test_large_n_boundaries(self):
        n = 100_000
        total = n * (n - 1) // 2
        # row boundaries are where float rounding would bite
        probes = []
        for row in (0, 1, 2, n // 2, n - 3, n - 2):
            off = row * (2 * n - row - 1) // 2
            probes += [off, off + 1, off + (n - row - 2)]
        probes.append(total - 1)
        idx = np.array(sorted(set(p for p in probes if 0 <= p < total)))
        i, j = _pairs_from_indices(idx, n)
        off = i * (2 * n - i - 1) // 2
        assert np.all(off <= idx)
        assert np.all(idx < (i + 1) * (2 * n - i - 2) // 2)
        assert np.all((i < j) & (j < n))
        assert np.array_equal(idx, off + (j - i - 1))


class TestDirectedEr:
    def test_deterministic(self):
        p = ErParams(n=200, alpha=0.5, lam=6.0)
        assert arc_set(gen_directed_er(p, 9)) == arc_set(gen_directed_er(p, 9))
        assert arc_set(gen_directed_er(p, 9)) != arc_set(gen_directed_er(p, 10))

    def test_alpha_zero_fully_reciprocal(self):
        g = gen_directed_er(ErParams(n=300, alpha=0.0, lam=8.0), 4)
        assert directedness(g) == 0.0

    def test_alpha_one_no_undirected(self):
        g = gen_directed_er(ErParams(n=300, alpha=1.0, lam=8.0), 4)
        assert g.d_un.sum() == 0

    def test_mean_directedness_over_seeds(self):
        vals = [directedness(gen_directed_er(ErParams(n=1000, alpha=0.5, lam=10.0), s))
                for s in range(100)]
        assert abs(np.mean(vals) - 0.5) < 0.02

    def test_mean_total_degree_within_three_se(self):
        lam = 10.0
        means = []
        for s in range(100):
            g = gen_directed_er(ErParams(n=1000, alpha=0.5, lam=lam), s)
            means.append((g.d_un + g.d_in + g.d_out).mean())
        se = np.std(means, ddof=1) / np.sqrt(len(means))
        assert abs(np.mean(means) - lam) < 3 * se + 1e-9

    def test_degree_components_uncorrelated(self):
        uns, ins = [], []
        for s in range(100):
            g = gen_directed_er(ErParams(n=1000, alpha=0.5, lam=10.0), s)
            uns.append(g.d_un)
            ins.append(g.d_in)
        rho = np.corrcoef(np.concatenate(uns), np.concatenate(ins))[0, 1]
        assert abs(rho) < 0.05

    def test_full_density(self):
        g = gen_directed_er(ErParams(n=30, alpha=0.0, lam=29.0), 1)
        assert g.d_un.sum() == 30 * 29  # complete reciprocal graph

    def test_invalid_params(self):
        with pytest.raises(InputError):
            gen_directed_er(ErParams(n=10, alpha=1.5, lam=3.0), 0)
        with pytest.raises(InputError):
            gen_directed_er(ErParams(n=10, alpha=0.5, lam=20.0), 0)


class TestPowerLaw:
    def test_deterministic(self):
        p = PowerLawParams(n=200, e_d_un=6.0, e_d_dir=4.0,
                           tau_un=0.5, tau_in=0.5, tau_out=0.5)
        assert arc_set(gen_power_law(p, 3)) == arc_set(gen_power_law(p, 3))

    def test_pure_undirected(self):
        p = PowerLawParams(n=300, e_d_un=8.0, e_d_dir=0.0,
                           tau_un=0.5, tau_in=0.5, tau_out=0.5)
        g = gen_power_law(p, 2)
        assert directedness(g) == 0.0

    def test_exact_edge_budgets(self):
        # collision rejections keep the two populations disjoint, so the
        # degree sums identify the placed counts exactly
        n = 500
        p = PowerLawParams(n=n, e_d_un=6.0, e_d_dir=4.0,
                           tau_un=0.5, tau_in=0.5, tau_out=0.5)
        g = sample_power_law(p, np.random.default_rng(7))
        assert g.d_un.sum() == 2 * round(6.0 * n / 2)
        assert g.d_out.sum() == round(4.0 * n / 2)
        assert g.d_in.sum() == round(4.0 * n / 2)

    def test_paper_mixes_hit_target_directedness(self):
        for edun, eddir, alpha in ((12.0, 4.0, 0.25), (8.0, 8.0, 0.5), (4.0, 12.0, 0.75)):
            p = PowerLawParams(n=1000, e_d_un=edun, e_d_dir=eddir,
                               tau_un=0.5, tau_in=0.5, tau_out=0.5)
            vals = [directedness(gen_power_law(p, s)) for s in range(5)]
            assert abs(np.mean(vals) - alpha) < 0.03

    def test_generated_graph_strongly_connected(self):
        p = PowerLawParams(n=400, e_d_un=8.0, e_d_dir=8.0,
                           tau_un=0.5, tau_in=0.5, tau_out=0.5)
        assert is_strongly_connected(gen_power_law(p, 5))

    def test_retries_exhausted(self):
        # 10 undirected edges on 100 vertices can never connect the graph
        p = PowerLawParams(n=100, e_d_un=0.2, e_d_dir=0.0,
                           tau_un=0.5, tau_in=0.5, tau_out=0.5)
        with pytest.raises(GenerationError) as err:
            gen_power_law(p, 0, max_retries=5)
        assert err.value.attempts == 5

    def test_infeasible_budget(self):
        p = PowerLawParams(n=10, e_d_un=20.0, e_d_dir=0.0,
                           tau_un=0.5, tau_in=0.5, tau_out=0.5)
        with pytest.raises(InputError):
            gen_power_law(p, 0)

    def test_undirected_tail_slope(self):
        # independent oracle: log-log regression of the pooled upper-decade
        # degree histogram; tau=0.5 implies exponent 3
        params = PowerLawParams(n=10_000, e_d_un=8.0, e_d_dir=0.0,
                                tau_un=0.5, tau_in=0.5, tau_out=0.5)
        pools = []
        for seed in range(20):
            g = sample_power_law(params, np.random.default_rng(seed))
            pools.append(g.d_un)
        pool = np.concatenate(pools)
        pool = pool[pool > 0]
        dmax = pool.max()
        edges = np.geomspace(dmax / 10, dmax + 1, 13)
        counts, edges = np.histogram(pool, bins=edges)
        centers = np.sqrt(edges[:-1] * edges[1:])
        mask = counts > 0
        density = counts[mask] / np.diff(edges)[mask]
        slope, _ = np.polyfit(np.log(centers[mask]), np.log(density), 1)
        assert slope == pytest.approx(-3.0, abs=0.3)
