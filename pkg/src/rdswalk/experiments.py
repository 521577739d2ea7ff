"""Replicated experiment harness.

A spec names a network model, an estimator set, a walk length, a replication
count and a master seed.  Each replication derives its own seeds, so results
are reproducible independently of execution order and worker count; runs are
parallelized over a process pool with order-independent aggregation.

Two experiment kinds:

* D_TV runs score each estimator's probability vector over all vertices
  against the exact stationary distribution (power method at the requested
  tolerance, default 1e-10).
* Proportion runs allocate a binary property, walk, estimate the carrier
  fraction with each estimator, and record deviations from the realized
  proportion.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .allocation import AllocationScheme, allocate
from .errors import InputError
from .estimators import (NetworkParams, estimate_network_params,
                         mean_harmonic_alternative, mean_inv_outdegree,
                         pi_indeg, pi_outdeg, pi_renewal_full,
                         pi_renewal_outdeg, pi_uniform, VARIANTS)
from .generators import ErParams, PowerLawParams, gen_directed_er, gen_power_law
from .graphs import DirectedGraph, largest_scc, load_edge_list
from .seeding import derive_seed
from .stationary import power_method
from .walk import WalkSample, run_walk

DEFAULT_POWER_TOL = 1e-10


@dataclass(frozen=True)
class ExternalGraphModel:
    """A fixed network read from an edge-list file (largest SCC is used)."""

    path: str


ModelParams = ErParams | PowerLawParams | ExternalGraphModel


@dataclass(frozen=True)
class ExperimentSpec:
    model: ModelParams
    estimators: tuple[str, ...]
    walk_length: int
    replications: int
    master_seed: int
    alloc_schemes: tuple[AllocationScheme, ...] = ()
    burn_in: int = 0
    power_tol: float = DEFAULT_POWER_TOL
    # plug in 1/mean(outdeg) instead of mean(1/outdeg) for the renewal
    # denominator; kept for replicating the remark that it is slightly worse
    harmonic_e_inv: bool = False

    def validate(self) -> None:
        if self.replications < 1:
            raise InputError("replications must be >= 1")
        if self.walk_length < 2:
            raise InputError("walk length must be >= 2")
        unknown = set(self.estimators) - set(VARIANTS)
        if unknown:
            raise InputError(f"unknown estimator(s): {sorted(unknown)}")
        if not self.estimators:
            raise InputError("estimator set is empty")
        if ("ren_known_params" in self.estimators
                and true_network_params(self.model) is None):
            raise InputError(
                "ren_known_params needs a model with known parameters; "
                "external graphs have none")
        if isinstance(self.model, (ErParams, PowerLawParams)):
            self.model.validate()
        for scheme in self.alloc_schemes:
            scheme.validate()


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    dtv: dict[str, np.ndarray] = field(default_factory=dict)
    deviations: dict[tuple[str, str], np.ndarray] = field(default_factory=dict)
    realized_p: dict[str, np.ndarray] = field(default_factory=dict)
    runtime_s: float = 0.0


def true_network_params(model: ModelParams) -> NetworkParams | None:
    """Model-level (alpha, lam) when the model defines them."""
    if isinstance(model, ErParams):
        return NetworkParams(alpha=model.alpha, lam=model.lam, provenance="true_model")
    if isinstance(model, PowerLawParams):
        total = model.e_d_un + model.e_d_dir
        if total <= 0:
            return None
        return NetworkParams(alpha=model.e_d_dir / total, lam=total,
                             provenance="true_model")
    return None


def tv_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Half the L1 distance between two probability vectors."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise InputError(f"length mismatch: {a.shape} vs {b.shape}")
    for name, vec in (("first", a), ("second", b)):
        if abs(vec.sum() - 1.0) > 1e-9:
            raise InputError(f"{name} vector does not sum to 1")
    return float(0.5 * np.abs(a - b).sum())


# Seed-path constants: (rep, 0) graph, (rep, 1) dtv walk,
# (rep, 2, j) allocation j, (rep, 3, j) proportion walk under allocation j.
_PATH_GRAPH, _PATH_WALK, _PATH_ALLOC, _PATH_PROP_WALK = 0, 1, 2, 3

_EXTERNAL_CACHE: dict[tuple[str, float], tuple[DirectedGraph, np.ndarray]] = {}


def _external_graph(path: str, tol: float) -> tuple[DirectedGraph, np.ndarray]:
    key = (str(Path(path).resolve()), tol)
    if key not in _EXTERNAL_CACHE:
        g = largest_scc(load_edge_list(path))
        _EXTERNAL_CACHE[key] = (g, power_method(g, tol=tol).probs)
    return _EXTERNAL_CACHE[key]


def _realize_graph(spec: ExperimentSpec, rep: int) -> tuple[DirectedGraph, np.ndarray | None]:
    """Graph for one replication, plus cached exact probabilities when the
    model is a fixed external network."""
    seed = derive_seed(spec.master_seed, rep, _PATH_GRAPH)
    if isinstance(spec.model, ErParams):
        return largest_scc(gen_directed_er(spec.model, seed)), None
    if isinstance(spec.model, PowerLawParams):
        return gen_power_law(spec.model, seed), None
    return _external_graph(spec.model.path, spec.power_tol)


def _e_inv(sample: WalkSample, harmonic: bool) -> float:
    return (mean_harmonic_alternative(sample) if harmonic
            else mean_inv_outdegree(sample))


def estimate_all_vertices(est: str, g: DirectedGraph, sample: WalkSample,
                          params_true: NetworkParams | None,
                          harmonic_e_inv: bool = False) -> np.ndarray:
    """Probability vector of one estimator over all vertices of g, using the
    graph's true degrees and walk-derived quantities where the variant needs
    them."""
    if est == "uni":
        return pi_uniform(g.n).probs
    if est == "outdeg":
        return pi_outdeg(g.out_degrees).probs
    if est == "indeg":
        return pi_indeg(g.in_degrees).probs
    if est == "ren_fd":
        return pi_renewal_full(g.d_un, g.d_in, g.d_out,
                               _e_inv(sample, harmonic_e_inv)).probs
    if est == "ren_known_params":
        return pi_renewal_outdeg(g.out_degrees, params_true).probs
    if est == "ren":
        return pi_renewal_outdeg(g.out_degrees, estimate_network_params(sample)).probs
    raise InputError(f"unknown estimator {est!r}")


def _dtv_replication(args: tuple[ExperimentSpec, int]) -> dict[str, float]:
    spec, rep = args
    g, cached_exact = _realize_graph(spec, rep)
    exact = cached_exact if cached_exact is not None \
        else power_method(g, tol=spec.power_tol).probs
    sample = run_walk(g, spec.walk_length,
                      derive_seed(spec.master_seed, rep, _PATH_WALK),
                      burn_in=spec.burn_in)
    params_true = true_network_params(spec.model)
    return {est: tv_distance(estimate_all_vertices(
                est, g, sample, params_true, spec.harmonic_e_inv), exact)
            for est in spec.estimators}


def estimate_on_sample(est: str, sample: WalkSample,
                       params_true: NetworkParams | None,
                       harmonic_e_inv: bool = False):
    """Sample-domain probability estimate from what the walk observed."""
    verts, first = np.unique(sample.visits, return_index=True)
    if est == "uni":
        return pi_uniform(len(verts), vertices=verts)
    if est == "outdeg":
        return pi_outdeg(sample.out_degrees[first], vertices=verts)
    if est == "indeg":
        if not sample.has_full_degrees:
            raise InputError("indeg needs full degree records")
        return pi_indeg(sample.d_un[first] + sample.d_in[first], vertices=verts)
    if est == "ren_fd":
        if not sample.has_full_degrees:
            raise InputError("ren_fd needs full degree records")
        return pi_renewal_full(sample.d_un[first], sample.d_in[first],
                               sample.d_out[first], _e_inv(sample, harmonic_e_inv),
                               vertices=verts)
    if est == "ren_known_params":
        return pi_renewal_outdeg(sample.out_degrees[first], params_true,
                                 vertices=verts)
    if est == "ren":
        return pi_renewal_outdeg(sample.out_degrees[first],
                                 estimate_network_params(sample), vertices=verts)
    raise InputError(f"unknown estimator {est!r}")


def _prop_replication(args: tuple[ExperimentSpec, int]):
    from .estimators import estimate_proportion

    spec, rep = args
    g, _ = _realize_graph(spec, rep)
    params_true = true_network_params(spec.model)
    devs: dict[tuple[str, str], float] = {}
    realized: dict[str, float] = {}
    for j, scheme in enumerate(spec.alloc_schemes):
        table = allocate(g, scheme, derive_seed(spec.master_seed, rep, _PATH_ALLOC, j))
        sample = run_walk(g, spec.walk_length,
                          derive_seed(spec.master_seed, rep, _PATH_PROP_WALK, j),
                          burn_in=spec.burn_in, flags=table.flags)
        realized[scheme.kind] = table.realized_p
        for est in spec.estimators:
            p_hat = estimate_proportion(
                sample,
                estimate_on_sample(est, sample, params_true, spec.harmonic_e_inv))
            devs[(scheme.kind, est)] = p_hat - table.realized_p
    return devs, realized


def _map_replications(worker, spec: ExperimentSpec, threads: int | None):
    spec.validate()
    reps = range(spec.replications)
    tasks = [(spec, k) for k in reps]
    if threads is None:
        import os
        threads = max(1, os.cpu_count() or 1)
    if threads <= 1 or spec.replications == 1:
        return [worker(t) for t in tasks]
    chunk = max(1, spec.replications // (threads * 8))
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, tasks, chunksize=chunk))


def run_dtv_experiment(spec: ExperimentSpec, threads: int | None = None) -> ExperimentResult:
    """Mean/spread of D_TV per estimator over replicated (graph, walk) draws."""
    start = time.perf_counter()
    rows = _map_replications(_dtv_replication, spec, threads)
    dtv = {est: np.array([row[est] for row in rows]) for est in spec.estimators}
    return ExperimentResult(spec=spec, dtv=dtv,
                            runtime_s=time.perf_counter() - start)


def run_proportion_experiment(spec: ExperimentSpec, threads: int | None = None) -> ExperimentResult:
    """Deviation samples (p_hat - realized p) per allocation and estimator."""
    if not spec.alloc_schemes:
        raise InputError("proportion experiment needs at least one allocation scheme")
    start = time.perf_counter()
    rows = _map_replications(_prop_replication, spec, threads)
    deviations = {
        (scheme.kind, est): np.array([devs[(scheme.kind, est)] for devs, _ in rows])
        for scheme in spec.alloc_schemes for est in spec.estimators}
    realized = {scheme.kind: np.array([real[scheme.kind] for _, real in rows])
                for scheme in spec.alloc_schemes}
    return ExperimentResult(spec=spec, deviations=deviations, realized_p=realized,
                            runtime_s=time.perf_counter() - start)


def _model_columns(model: ModelParams) -> dict:
    if isinstance(model, ErParams):
        return {"model": "directed_er", "alpha": model.alpha,
                "lambda": model.lam, "gamma": None}
    if isinstance(model, PowerLawParams):
        total = model.e_d_un + model.e_d_dir
        gamma = PowerLawParams.gamma(model.tau_un)
        return {"model": "power_law",
                "alpha": (model.e_d_dir / total) if total > 0 else None,
                "lambda": total,
                "gamma": None if math.isinf(gamma) else gamma}
    return {"model": "external_graph", "alpha": None, "lambda": None, "gamma": None}


def _quartiles(x: np.ndarray) -> tuple[float, float, float, float, float]:
    q1, med, q3 = (float(v) for v in np.percentile(x, (25, 50, 75)))
    iqr = q3 - q1
    inside = x[(x >= q1 - 1.5 * iqr) & (x <= q3 + 1.5 * iqr)]
    return q1, med, q3, float(inside.min()), float(inside.max())


def summarize(result: ExperimentResult) -> list[dict]:
    """Flat summary rows keyed by (model params, estimator[, allocation]).

    s.d. columns hold None (rendered NA) at a single replication.
    """
    spec = result.spec
    cols = _model_columns(spec.model)
    rows: list[dict] = []
    if result.dtv:
        many = spec.replications > 1
        sds = {est: (float(np.std(v, ddof=1)) if many else None)
               for est, v in result.dtv.items()}
        sd_avg = (float(np.mean([s for s in sds.values()])) if many else None)
        for est in spec.estimators:
            rows.append({**cols, "estimator": est,
                         "mean_dtv": float(result.dtv[est].mean()),
                         "sd_dtv": sds[est],
                         "replications": spec.replications,
                         "seed": spec.master_seed,
                         "sd_dtv_cell_avg": sd_avg})
    for scheme in spec.alloc_schemes:
        realized_mean = float(result.realized_p[scheme.kind].mean())
        for est in spec.estimators:
            devs = result.deviations[(scheme.kind, est)]
            q1, med, q3, lo, hi = _quartiles(devs)
            rows.append({**cols, "allocation": scheme.kind,
                         "p_target": scheme.target_p,
                         "p_realized_mean": realized_mean,
                         "estimator": est,
                         "mean_dev": float(devs.mean()),
                         "sd_dev": float(np.std(devs, ddof=1)) if spec.replications > 1 else None,
                         "q1": q1, "median": med, "q3": q3,
                         "lo_whisker": lo, "hi_whisker": hi,
                         "replications": spec.replications,
                         "seed": spec.master_seed})
    return rows


_DTV_COLUMNS = ("model", "alpha", "lambda", "gamma", "estimator", "mean_dtv",
                "sd_dtv", "replications", "seed", "sd_dtv_cell_avg")
_PROP_COLUMNS = ("model", "alpha", "lambda", "gamma", "allocation", "p_target",
                 "p_realized_mean", "estimator", "mean_dev", "sd_dev", "q1",
                 "median", "q3", "lo_whisker", "hi_whisker", "replications",
                 "seed")

_DTV_HEADER = (
    "# total variation distance of each selection-probability estimate to the exact stationary distribution\n"
    "# sd_dtv: sample s.d. over replications (ddof=1), NA at a single replication\n"
    "# sd_dtv_cell_avg: sd_dtv averaged over the estimators sharing a parameter cell\n")
_PROP_HEADER = (
    "# deviations of estimated population proportions from the realized proportion, per allocation and estimator\n"
    "# quartiles: linear-interpolation percentiles of the deviation sample\n"
    "# whiskers: most extreme deviations within 1.5*IQR of the nearer quartile\n")


def fmt_cell(x) -> str:
    """CSV cell rendering: NA for missing, shortest-precise for floats."""
    if x is None:
        return "NA"
    if isinstance(x, float):
        return format(x, ".12g")
    return str(x)


def _write_rows(rows: list[dict], columns: tuple[str, ...], header: str,
                path: str | Path) -> None:
    with open(path, "w") as fh:
        fh.write(header)
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(fmt_cell(row.get(col)) for col in columns) + "\n")


def write_dtv_csv(rows: list[dict], path: str | Path) -> None:
    _write_rows(rows, _DTV_COLUMNS, _DTV_HEADER, path)


def write_prop_csv(rows: list[dict], path: str | Path) -> None:
    _write_rows(rows, _PROP_COLUMNS, _PROP_HEADER, path)


def read_config(path: str | Path) -> dict[str, str]:
    """Parse a plain-text "key = value" config file; '#' starts a comment."""
    cfg: dict[str, str] = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InputError(f"{path}:{lineno}: expected 'key = value'")
            key, value = line.split("=", 1)
            cfg[key.strip().lower()] = value.strip()
    return cfg
