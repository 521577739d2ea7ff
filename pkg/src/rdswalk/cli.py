"""Command-line front end.

Subcommands: generate, stationary, walk, estimate, dtv-experiment,
prop-experiment, reproduce.  Every stochastic subcommand requires --seed.
Exit codes: 0 success, 2 usage error, 3 runtime/convergence error.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .allocation import SCHEME_KINDS, AllocationScheme
from .errors import InputError, RdsWalkError
from .estimators import NetworkParams, VARIANTS, estimate_proportion
from .experiments import (ExperimentSpec, ExternalGraphModel,
                          estimate_all_vertices, estimate_on_sample, fmt_cell,
                          read_config, run_dtv_experiment,
                          run_proportion_experiment, summarize, tv_distance,
                          write_dtv_csv, write_prop_csv)
from .generators import ErParams, PowerLawParams, gen_directed_er, gen_power_law
from .graphs import (directedness, is_strongly_connected, largest_scc,
                     load_attributes, load_edge_list, save_edge_list)
from .seeding import derive_seed
from .stationary import power_method
from .walk import WalkSample, load_sample, run_walk, save_sample

logger = logging.getLogger("rdswalk")

ER_GRID_ALPHAS = (0.1, 0.25, 0.5, 0.75)
ER_GRID_LAMBDAS = (5.0, 10.0, 15.0)
PL_GRID_MIXES = ((12.0, 4.0), (8.0, 8.0), (4.0, 12.0))
# gamma below 3 is omitted: the strong-connectivity rejection rate of the
# generator explodes there for the directed-heavy mixes
PL_GRID_GAMMAS = (3.0, 3.5, 4.0, 4.5)
DEGREE_SCHEMES = ("in_deg", "out_deg", "undirected", "in_directed",
                  "out_directed", "directed")
FIG_ESTIMATORS = ("ren_fd", "indeg", "ren", "ren_known_params", "outdeg", "uni")


def _threads(args) -> int | None:
    if getattr(args, "sequential", False):
        return 1
    if getattr(args, "threads", None):
        return args.threads
    return max(1, os.cpu_count() or 1)


def _check_range(name: str, value: float, lo: float, hi: float) -> None:
    if not lo <= value <= hi:
        raise InputError(f"{name} must be in [{lo}, {hi}], got {value}")


def _estimator_list(text: str) -> tuple[str, ...]:
    ests = tuple(e.strip() for e in text.split(",") if e.strip())
    unknown = set(ests) - set(VARIANTS)
    if unknown:
        raise InputError(f"unknown estimator(s) {sorted(unknown)}; choose from {VARIANTS}")
    return ests


def _scheme_list(text: str, p: float) -> tuple[AllocationScheme, ...]:
    kinds = tuple(k.strip() for k in text.split(",") if k.strip())
    unknown = set(kinds) - set(SCHEME_KINDS)
    if unknown:
        raise InputError(f"unknown allocation(s) {sorted(unknown)}; choose from {SCHEME_KINDS}")
    return tuple(AllocationScheme(kind=k, target_p=p) for k in kinds)


def cmd_generate(args) -> int:
    if args.model == "er":
        _check_range("--alpha", args.alpha, 0.0, 1.0)
        if args.lam < 0 or args.lam > args.n - 1:
            raise InputError(f"--lambda must be in [0, n-1], got {args.lam}")
        g = gen_directed_er(ErParams(n=args.n, alpha=args.alpha, lam=args.lam),
                            seed=args.seed)
    else:
        for name in ("tau", "tau_un", "tau_in", "tau_out"):
            val = getattr(args, name)
            if val is not None:
                _check_range("--" + name.replace("_", "-"), val, 0.0, 1.0)
        tau_un = args.tau_un if args.tau_un is not None else args.tau
        tau_in = args.tau_in if args.tau_in is not None else args.tau
        tau_out = args.tau_out if args.tau_out is not None else args.tau
        params = PowerLawParams(n=args.n, e_d_un=args.edun, e_d_dir=args.eddir,
                                tau_un=tau_un, tau_in=tau_in, tau_out=tau_out)
        g = gen_power_law(params, seed=args.seed, max_retries=args.max_retries)
    save_edge_list(g, args.out)
    scc = largest_scc(g)
    logger.info("n=%d arcs=%d directedness=%.4f largest_scc=%d",
                g.n, g.arc_count, directedness(g), scc.n)
    print(f"wrote {args.out}: n={g.n} arcs={g.arc_count} "
          f"directedness={directedness(g):.4f} largest_scc={scc.n}")
    return 0


def cmd_stationary(args) -> int:
    g = load_edge_list(args.graph)
    if not is_strongly_connected(g):
        g = largest_scc(g)
        logger.info("input not strongly connected; using largest SCC (n=%d)", g.n)
    dist = power_method(g, tol=args.tol, max_iter=args.max_iter)
    originals = g.orig_ids if g.orig_ids is not None else np.arange(g.n)
    out = open(args.out, "w") if args.out else sys.stdout
    try:
        for vid, p in zip(originals, dist.probs):
            out.write(f"{vid} {p:.12e}\n")
    finally:
        if args.out:
            out.close()
    logger.info("power method: %d iterations, residual %.3e", dist.iterations, dist.residual)
    return 0


def _remap_to_original(sample: WalkSample, originals: np.ndarray) -> WalkSample:
    return replace(sample, visits=originals[sample.visits],
                   start_vertex=int(originals[sample.start_vertex]))


def cmd_walk(args) -> int:
    g = load_edge_list(args.graph)
    if not is_strongly_connected(g):
        g = largest_scc(g)
        logger.info("input not strongly connected; walking on largest SCC (n=%d)", g.n)
    flags = load_attributes(args.attrs, g) if args.attrs else None
    sample = run_walk(g, args.s, args.seed, start=args.start, burn_in=args.burn_in,
                      flags=flags)
    if g.orig_ids is not None:
        sample = _remap_to_original(sample, g.orig_ids)
    save_sample(sample, args.out, regime=args.regime)
    print(f"wrote {args.out}: s={sample.size} revisits={sample.revisit_count}")
    return 0


def _default_estimators(sample: WalkSample, known_params: bool) -> tuple[str, ...]:
    ests = ["uni", "outdeg"]
    if sample.has_full_degrees:
        ests += ["indeg", "ren_fd"]
    if known_params:
        ests.append("ren_known_params")
    ests.append("ren")
    return tuple(ests)


def cmd_estimate(args) -> int:
    if bool(args.sample) == bool(args.graph):
        raise InputError("provide exactly one of --sample or --graph")
    if args.graph and args.seed is None:
        raise InputError("--seed is required when walking on --graph")
    params_known = None
    if args.alpha is not None and args.lam is not None:
        _check_range("--alpha", args.alpha, 0.0, 1.0)
        params_known = NetworkParams(alpha=args.alpha, lam=args.lam,
                                     provenance="true_model")

    g = exact = originals = None
    if args.graph:
        g = load_edge_list(args.graph)
        if not is_strongly_connected(g):
            g = largest_scc(g)
            logger.info("using largest SCC (n=%d)", g.n)
        originals = g.orig_ids if g.orig_ids is not None else np.arange(g.n)
        flags = load_attributes(args.attrs, g) if args.attrs else None
        samples = [run_walk(g, args.s, derive_seed(args.seed, k), flags=flags)
                   for k in range(args.walks)]
        if args.dtv:
            exact = power_method(g).probs
    else:
        samples = [load_sample(args.sample)]

    estimators = (_estimator_list(args.estimators) if args.estimators
                  else _default_estimators(samples[0], params_known is not None))
    rows = []
    for est in estimators:
        p_hats, dtvs = [], []
        for sample in samples:
            sample_est = estimate_on_sample(est, sample, params_known)
            p_hats.append(estimate_proportion(sample, sample_est))
            if exact is not None:
                probs = estimate_all_vertices(est, g, sample, params_known)
                dtvs.append(tv_distance(probs, exact))
        rows.append({
            "estimator": est,
            "p_hat_mean": float(np.mean(p_hats)),
            "p_hat_sd": float(np.std(p_hats, ddof=1)) if len(p_hats) > 1 else None,
            "dtv_mean": float(np.mean(dtvs)) if dtvs else None,
            "dtv_sd": float(np.std(dtvs, ddof=1)) if len(dtvs) > 1 else None,
        })
        if args.pi_out and g is not None:
            probs = estimate_all_vertices(est, g, samples[0], params_known)
            path = Path(args.pi_out) / f"pi_{est}.txt"
            path.parent.mkdir(parents=True, exist_ok=True)
            with open(path, "w") as fh:
                for vid, p in zip(originals, probs):
                    fh.write(f"{vid} {p:.12e}\n")

    out = open(args.out, "w") if args.out else sys.stdout
    try:
        out.write("estimator,p_hat_mean,p_hat_sd,dtv_mean,dtv_sd,walks,s,seed\n")
        for row in rows:
            cells = [row["estimator"], fmt_cell(row["p_hat_mean"]),
                     fmt_cell(row["p_hat_sd"]), fmt_cell(row["dtv_mean"]),
                     fmt_cell(row["dtv_sd"]), str(len(samples)),
                     str(samples[0].size), str(args.seed if args.graph else "NA")]
            out.write(",".join(cells) + "\n")
    finally:
        if args.out:
            out.close()
    return 0


def _cfg_get(cfg: dict, args, key: str, cast, default=None):
    """CLI flag beats config file beats default."""
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    if key in cfg:
        return cast(cfg[key])
    return default


def _spec_from_args(args, need_allocs: bool) -> ExperimentSpec:
    cfg = read_config(args.config) if args.config else {}
    if "lambda" in cfg:
        cfg["lam"] = cfg.pop("lambda")
    model_kind = _cfg_get(cfg, args, "model", str, "er")
    n = _cfg_get(cfg, args, "n", int, 1000)
    seed = _cfg_get(cfg, args, "seed", int)
    if seed is None:
        raise InputError("--seed is required (or a 'seed' config key)")
    s = _cfg_get(cfg, args, "s", int, 500)
    r = _cfg_get(cfg, args, "r", int, 200)
    burn_in = _cfg_get(cfg, args, "burn_in", int, 0)

    if model_kind == "er":
        alpha = _cfg_get(cfg, args, "alpha", float)
        lam = _cfg_get(cfg, args, "lam", float)
        if alpha is None or lam is None:
            raise InputError("er model needs --alpha and --lambda")
        model = ErParams(n=n, alpha=alpha, lam=lam)
    elif model_kind == "pl":
        edun = _cfg_get(cfg, args, "edun", float)
        eddir = _cfg_get(cfg, args, "eddir", float)
        tau = _cfg_get(cfg, args, "tau", float, 0.5)
        if edun is None or eddir is None:
            raise InputError("pl model needs --edun and --eddir")
        model = PowerLawParams(
            n=n, e_d_un=edun, e_d_dir=eddir,
            tau_un=_cfg_get(cfg, args, "tau_un", float, tau),
            tau_in=_cfg_get(cfg, args, "tau_in", float, tau),
            tau_out=_cfg_get(cfg, args, "tau_out", float, tau))
    elif model_kind == "external":
        graph = _cfg_get(cfg, args, "graph", str)
        if graph is None:
            raise InputError("external model needs --graph")
        model = ExternalGraphModel(path=graph)
    else:
        raise InputError(f"unknown model {model_kind!r}; choose er, pl or external")

    est_text = _cfg_get(cfg, args, "estimators", str)
    if est_text:
        ests = _estimator_list(est_text)
    elif model_kind == "external":
        ests = ("uni", "outdeg", "indeg", "ren_fd", "ren")
    else:
        ests = VARIANTS
    schemes: tuple[AllocationScheme, ...] = ()
    if need_allocs:
        p = _cfg_get(cfg, args, "p", float, 0.5)
        alloc_text = _cfg_get(cfg, args, "allocations", str, ",".join(DEGREE_SCHEMES))
        schemes = _scheme_list(alloc_text, p)
    harmonic = _cfg_get(cfg, args, "harmonic_e_inv", lambda v: v.lower() == "true",
                        False)
    return ExperimentSpec(model=model, estimators=ests, walk_length=s,
                          replications=r, master_seed=seed,
                          alloc_schemes=schemes, burn_in=burn_in,
                          harmonic_e_inv=bool(harmonic))


def cmd_dtv_experiment(args) -> int:
    spec = _spec_from_args(args, need_allocs=False)
    result = run_dtv_experiment(spec, threads=_threads(args))
    write_dtv_csv(summarize(result), args.out)
    print(f"wrote {args.out} ({spec.replications} replications, {result.runtime_s:.1f}s)")
    return 0


def cmd_prop_experiment(args) -> int:
    spec = _spec_from_args(args, need_allocs=True)
    result = run_proportion_experiment(spec, threads=_threads(args))
    write_prop_csv(summarize(result), args.out)
    print(f"wrote {args.out} ({spec.replications} replications, {result.runtime_s:.1f}s)")
    return 0


def _reproduce_specs(target: str, r: int, s: int, seed: int, n: int):
    """Experiment cells for a named result table or figure."""
    if target in ("table2", "table3"):
        ests = (("uni", "outdeg", "indeg", "ren_fd") if target == "table2"
                else ("uni", "outdeg", "ren_known_params", "ren"))
        cells = [ErParams(n=n, alpha=a, lam=l)
                 for a in ER_GRID_ALPHAS for l in ER_GRID_LAMBDAS]
        return "dtv", [ExperimentSpec(model=m, estimators=ests, walk_length=s,
                                      replications=r,
                                      master_seed=derive_seed(seed, i))
                       for i, m in enumerate(cells)]
    if target == "fig2":
        spec = ExperimentSpec(
            model=ErParams(n=n, alpha=0.75, lam=10.0), estimators=FIG_ESTIMATORS,
            walk_length=s, replications=r, master_seed=seed,
            alloc_schemes=tuple(AllocationScheme(k, 0.5) for k in DEGREE_SCHEMES))
        return "prop", [spec]
    if target == "fig3":
        specs = []
        i = 0
        for edun, eddir in PL_GRID_MIXES:
            for gamma in PL_GRID_GAMMAS:
                tau = 1.0 / (gamma - 1.0)
                specs.append(ExperimentSpec(
                    model=PowerLawParams(n=n, e_d_un=edun, e_d_dir=eddir,
                                         tau_un=tau, tau_in=tau, tau_out=tau),
                    estimators=FIG_ESTIMATORS, walk_length=s, replications=r,
                    master_seed=derive_seed(seed, i)))
                i += 1
        return "dtv", specs
    if target == "fig4":
        spec = ExperimentSpec(
            model=PowerLawParams(n=n, e_d_un=4.0, e_d_dir=12.0,
                                 tau_un=0.5, tau_in=0.5, tau_out=0.5),
            estimators=FIG_ESTIMATORS, walk_length=s, replications=r,
            master_seed=seed,
            alloc_schemes=tuple(AllocationScheme(k, 0.2) for k in DEGREE_SCHEMES))
        return "prop", [spec]
    raise InputError(f"unknown reproduce target {target!r}")


def cmd_reproduce(args) -> int:
    kind, specs = _reproduce_specs(args.target, args.r, args.s, args.seed, args.n)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    threads = _threads(args)
    rows = []
    for spec in specs:
        if kind == "dtv":
            result = run_dtv_experiment(spec, threads=threads)
        else:
            result = run_proportion_experiment(spec, threads=threads)
        rows.extend(summarize(result))
        logger.info("cell done: %s (%.1fs)", spec.model, result.runtime_s)
    path = out_dir / ("dtv_results.csv" if kind == "dtv" else "prop_results.csv")
    if kind == "dtv":
        write_dtv_csv(rows, path)
    else:
        write_prop_csv(rows, path)
    print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rdswalk",
        description="Random-walk sampling and estimation on partially directed networks")
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, stochastic=True):
        if stochastic:
            p.add_argument("--seed", type=int, required=True,
                           help="RNG seed (required: no silent nondeterminism)")
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--sequential", action="store_true",
                       help="single in-process worker")

    gen = sub.add_parser("generate", help="write a random graph as an edge list")
    gen_sub = gen.add_subparsers(dest="model", required=True)
    gen_er = gen_sub.add_parser("er", help="directed Erdős–Rényi")
    gen_er.add_argument("--n", type=int, required=True)
    gen_er.add_argument("--alpha", type=float, required=True,
                        help="directed-edge fraction in [0,1]")
    gen_er.add_argument("--lambda", dest="lam", type=float, required=True,
                        help="expected total degree")
    gen_er.add_argument("--seed", type=int, required=True)
    gen_er.add_argument("--out", required=True)
    gen_er.set_defaults(func=cmd_generate)
    gen_pl = gen_sub.add_parser("pl", help="heavy-tailed (power-law) model")
    gen_pl.add_argument("--n", type=int, required=True)
    gen_pl.add_argument("--edun", type=float, required=True,
                        help="expected undirected degree")
    gen_pl.add_argument("--eddir", type=float, required=True,
                        help="expected directed degree (in+out)")
    gen_pl.add_argument("--tau", type=float, default=0.5,
                        help="rank exponent for all three weight sequences")
    gen_pl.add_argument("--tau-un", dest="tau_un", type=float, default=None)
    gen_pl.add_argument("--tau-in", dest="tau_in", type=float, default=None)
    gen_pl.add_argument("--tau-out", dest="tau_out", type=float, default=None)
    gen_pl.add_argument("--max-retries", type=int, default=100)
    gen_pl.add_argument("--seed", type=int, required=True)
    gen_pl.add_argument("--out", required=True)
    gen_pl.set_defaults(func=cmd_generate)

    stat = sub.add_parser("stationary", help="exact stationary distribution of a graph")
    stat.add_argument("--graph", required=True)
    stat.add_argument("--tol", type=float, default=1e-10)
    stat.add_argument("--max-iter", type=int, default=1_000_000)
    stat.add_argument("--out", default=None, help="default: stdout")
    stat.set_defaults(func=cmd_stationary)

    wlk = sub.add_parser("walk", help="run one random walk and save the sample")
    wlk.add_argument("--graph", required=True)
    wlk.add_argument("--s", type=int, required=True, help="number of recorded visits")
    wlk.add_argument("--seed", type=int, required=True)
    wlk.add_argument("--start", type=int, default=None)
    wlk.add_argument("--burn-in", dest="burn_in", type=int, default=0)
    wlk.add_argument("--attrs", default=None, help="per-vertex 0/1 attribute file")
    wlk.add_argument("--regime", choices=("full", "outdeg"), default="full")
    wlk.add_argument("--out", required=True)
    wlk.set_defaults(func=cmd_walk)

    est = sub.add_parser("estimate",
                         help="estimate selection probabilities and the carrier "
                              "proportion from walks or a saved sample")
    est.add_argument("--sample", default=None, help="saved sample file")
    est.add_argument("--graph", default=None, help="edge list to walk on")
    est.add_argument("--attrs", default=None)
    est.add_argument("--s", type=int, default=500)
    est.add_argument("--seed", type=int, default=None)
    est.add_argument("--walks", type=int, default=1)
    est.add_argument("--estimators", default=None, help="comma-separated subset")
    est.add_argument("--alpha", type=float, default=None,
                     help="known directedness for ren_known_params")
    est.add_argument("--lambda", dest="lam", type=float, default=None,
                     help="known mean degree for ren_known_params")
    est.add_argument("--dtv", action="store_true",
                     help="also score each estimate against the exact distribution")
    est.add_argument("--out", default=None, help="default: stdout")
    est.add_argument("--pi-out", dest="pi_out", default=None,
                     help="directory for per-estimator 'vertex_id weight' files")
    est.set_defaults(func=cmd_estimate)

    for name, fn, allocs in (("dtv-experiment", cmd_dtv_experiment, False),
                             ("prop-experiment", cmd_prop_experiment, True)):
        p = sub.add_parser(name, help=f"replicated {'D_TV' if not allocs else 'proportion'} run")
        p.add_argument("--config", default=None, help="key = value file; flags override")
        p.add_argument("--model", choices=("er", "pl", "external"), default=None)
        p.add_argument("--n", type=int, default=None)
        p.add_argument("--alpha", type=float, default=None)
        p.add_argument("--lambda", dest="lam", type=float, default=None)
        p.add_argument("--edun", type=float, default=None)
        p.add_argument("--eddir", type=float, default=None)
        p.add_argument("--tau", type=float, default=None)
        p.add_argument("--tau-un", dest="tau_un", type=float, default=None)
        p.add_argument("--tau-in", dest="tau_in", type=float, default=None)
        p.add_argument("--tau-out", dest="tau_out", type=float, default=None)
        p.add_argument("--graph", default=None, help="edge list for the external model")
        p.add_argument("--s", type=int, default=None)
        p.add_argument("--r", type=int, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--burn-in", dest="burn_in", type=int, default=None)
        p.add_argument("--estimators", default=None)
        if allocs:
            p.add_argument("--p", type=float, default=None, help="target carrier fraction")
            p.add_argument("--allocations", default=None)
        p.add_argument("--out", required=True)
        add_common(p, stochastic=False)
        p.set_defaults(func=fn)

    rep = sub.add_parser("reproduce", help="rerun a published experiment grid")
    rep.add_argument("target", choices=("table2", "table3", "fig2", "fig3", "fig4"))
    rep.add_argument("--r", type=int, default=200,
                     help="replications per cell (200 desk scale, 1000 paper scale)")
    rep.add_argument("--s", type=int, default=500)
    rep.add_argument("--n", type=int, default=1000)
    rep.add_argument("--out-dir", dest="out_dir", default=".")
    add_common(rep)
    rep.set_defaults(func=cmd_reproduce)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s",
                        stream=sys.stderr)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RdsWalkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
