import numpy as np
import pytest

from rdswalk.allocation import AllocationScheme
from rdswalk.errors import InputError
from rdswalk.experiments import (ExperimentSpec, ExternalGraphModel,
                                 read_config, run_dtv_experiment,
                                 run_proportion_experiment, summarize,
                                 tv_distance, write_dtv_csv, write_prop_csv)
from rdswalk.generators import ErParams, PowerLawParams
from rdswalk.graphs import save_edge_list, largest_scc
from rdswalk.generators import gen_directed_er


class TestTvDistance:
    def test_identical(self):
        assert tv_distance([0.5, 0.5], [0.5, 0.5]) == 0.0

    def test_disjoint(self):
        assert tv_distance([1.0, 0.0], [0.0, 1.0]) == 1.0

    def test_arithmetic(self):
        assert tv_distance([0.5, 0.5], [0.75, 0.25]) == pytest.approx(0.25)

    def test_length_mismatch(self):
        with pytest.raises(InputError):
            tv_distance([1.0], [0.5, 0.5])

    def test_not_normalized(self):
        with pytest.raises(InputError):
            tv_distance([0.5, 0.4], [0.5, 0.5])


def er_spec(**kw):
    defaults = dict(model=ErParams(n=150, alpha=0.5, lam=8.0),
                    estimators=("uni", "outdeg", "indeg", "ren_fd",
                                "ren_known_params", "ren"),
                    walk_length=80, replications=4, master_seed=99)
    defaults.update(kw)
    return ExperimentSpec(**defaults)


class TestDtvExperiment:
    def test_outdeg_exact_on_reciprocal_graph(self):
        spec = er_spec(model=ErParams(n=200, alpha=0.0, lam=8.0),
                       estimators=("outdeg",), replications=3)
        res = run_dtv_experiment(spec, threads=1)
        assert res.dtv["outdeg"].max() < 1e-7

    def test_all_estimators_produce_values_in_range(self):
        res = run_dtv_experiment(er_spec(), threads=1)
        for est, vals in res.dtv.items():
            assert vals.shape == (4,)
            assert np.all((vals >= 0) & (vals <= 1))

    def test_parallel_matches_sequential(self):
        spec = er_spec(replications=6)
        a = run_dtv_experiment(spec, threads=1)
        b = run_dtv_experiment(spec, threads=2)
        for est in spec.estimators:
            assert a.dtv[est].tolist() == b.dtv[est].tolist()

    def test_deterministic_csv(self, tmp_path):
        spec = er_spec()
        paths = []
        for tag in ("a", "b"):
            rows = summarize(run_dtv_experiment(spec, threads=1))
            path = tmp_path / f"{tag}.csv"
            write_dtv_csv(rows, path)
            paths.append(path)
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_external_graph_model(self, tmp_path):
        g = largest_scc(gen_directed_er(ErParams(n=120, alpha=0.5, lam=8.0), 5))
        path = tmp_path / "g.txt"
        save_edge_list(g, path)
        spec = ExperimentSpec(model=ExternalGraphModel(path=str(path)),
                              estimators=("uni", "indeg", "ren_fd", "ren"),
                              walk_length=60, replications=3, master_seed=1)
        res = run_dtv_experiment(spec, threads=1)
        # walk-independent estimators repeat the same exact value
        assert np.ptp(res.dtv["uni"]) == 0.0
        assert np.ptp(res.dtv["indeg"]) == 0.0
        assert np.ptp(res.dtv["ren_fd"]) > 0.0

    def test_known_params_rejected_for_external(self, tmp_path):
        path = tmp_path / "g.txt"
        save_edge_list(gen_directed_er(ErParams(n=50, alpha=0.2, lam=5.0), 0), path)
        spec = ExperimentSpec(model=ExternalGraphModel(path=str(path)),
                              estimators=("ren_known_params",),
                              walk_length=60, replications=2, master_seed=1)
        with pytest.raises(InputError):
            run_dtv_experiment(spec, threads=1)

    def test_spec_validation(self):
        with pytest.raises(InputError):
            run_dtv_experiment(er_spec(estimators=("bogus",)), threads=1)
        with pytest.raises(InputError):
            run_dtv_experiment(er_spec(replications=0), threads=1)


class TestProportionExperiment:
    def test_uniform_allocation_uniform_estimator_unbiased(self):
        spec = er_spec(
            model=ErParams(n=1000, alpha=0.5, lam=10.0),
            estimators=("uni",), walk_length=500, replications=1000,
            alloc_schemes=(AllocationScheme("uniform", 0.5),))
        res = run_proportion_experiment(spec, threads=2)
        devs = res.deviations[("uniform", "uni")]
        assert devs.shape == (1000,)
        assert abs(devs.mean()) < 0.01

    def test_deviation_bookkeeping(self):
        spec = er_spec(
            estimators=("uni", "outdeg"), replications=3,
            alloc_schemes=(AllocationScheme("in_deg", 0.5),
                           AllocationScheme("directed", 0.2)))
        res = run_proportion_experiment(spec, threads=1)
        assert set(res.deviations) == {("in_deg", "uni"), ("in_deg", "outdeg"),
                                       ("directed", "uni"), ("directed", "outdeg")}
        assert all(v.shape == (3,) for v in res.deviations.values())
        assert set(res.realized_p) == {"in_deg", "directed"}

    def test_requires_schemes(self):
        with pytest.raises(InputError):
            run_proportion_experiment(er_spec(), threads=1)


class TestSummarize:
    def test_sd_not_available_at_single_replication(self):
        rows = summarize(run_dtv_experiment(er_spec(replications=1), threads=1))
        assert all(row["sd_dtv"] is None for row in rows)
        assert all(row["sd_dtv_cell_avg"] is None for row in rows)

    def test_mean_and_sd_arithmetic(self):
        spec = er_spec(estimators=("uni",), replications=2)
        res = run_dtv_experiment(spec, threads=1)
        res.dtv["uni"] = np.array([0.1, 0.3])
        row = summarize(res)[0]
        assert row["mean_dtv"] == pytest.approx(0.2)
        assert row["sd_dtv"] == pytest.approx(0.1414, abs=1e-4)

    def test_quartile_convention(self):
        spec = er_spec(estimators=("uni",), replications=5,
                       alloc_schemes=(AllocationScheme("uniform", 0.5),))
        res = run_proportion_experiment(spec, threads=1)
        res.deviations[("uniform", "uni")] = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
        row = [r for r in summarize(res) if "allocation" in r][0]
        assert (row["q1"], row["median"], row["q3"]) == (2.0, 3.0, 4.0)
        assert (row["lo_whisker"], row["hi_whisker"]) == (1.0, 5.0)

    def test_whiskers_clip_outliers(self):
        spec = er_spec(estimators=("uni",), replications=8,
                       alloc_schemes=(AllocationScheme("uniform", 0.5),))
        res = run_proportion_experiment(spec, threads=1)
        res.deviations[("uniform", "uni")] = np.array(
            [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 9.0])
        row = [r for r in summarize(res) if "allocation" in r][0]
        assert row["hi_whisker"] == 0.6


class TestCsvOutput:
    def test_dtv_columns(self, tmp_path):
        rows = summarize(run_dtv_experiment(er_spec(replications=2), threads=1))
        path = tmp_path / "dtv.csv"
        write_dtv_csv(rows, path)
        lines = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
        assert lines[0] == ("model,alpha,lambda,gamma,estimator,mean_dtv,"
                            "sd_dtv,replications,seed,sd_dtv_cell_avg")
        assert len(lines) == 1 + 6
        first = lines[1].split(",")
        assert first[0] == "directed_er" and first[3] == "NA"

    def test_prop_columns(self, tmp_path):
        spec = er_spec(model=PowerLawParams(n=150, e_d_un=6.0, e_d_dir=4.0,
                                            tau_un=0.5, tau_in=0.5, tau_out=0.5),
                       estimators=("uni",), replications=2,
                       alloc_schemes=(AllocationScheme("uniform", 0.3),))
        rows = summarize(run_proportion_experiment(spec, threads=1))
        path = tmp_path / "prop.csv"
        write_prop_csv(rows, path)
        lines = [ln for ln in path.read_text().splitlines() if not ln.startswith("#")]
        assert lines[0].startswith("model,alpha,lambda,gamma,allocation,p_target,"
                                   "p_realized_mean,estimator,mean_dev,sd_dev")
        cells = lines[1].split(",")
        assert cells[0] == "power_law"
        assert float(cells[1]) == pytest.approx(0.4)   # alpha from the mix
        assert float(cells[3]) == pytest.approx(3.0)   # gamma from tau


class TestConfig:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "exp.cfg"
        path.write_text("# comment\nmodel = er\nn = 300\nalpha = 0.5  # inline\n"
                        "lambda = 8\nseed = 4\n")
        cfg = read_config(path)
        assert cfg == {"model": "er", "n": "300", "alpha": "0.5",
                       "lambda": "8", "seed": "4"}

    def test_malformed(self, tmp_path):
        path = tmp_path / "bad.cfg"
        path.write_text("just words\n")
        with pytest.raises(InputError):
            read_config(path)
