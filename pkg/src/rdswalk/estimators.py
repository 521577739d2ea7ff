"""Selection-probability and population-proportion estimators.

Estimator variants, named as they appear in result tables:

* ``uni``      — uniform over the evaluation domain.
* ``outdeg``   — proportional to d_un + d_out (the classical inverse-degree
  weighting uses these probabilities).
* ``indeg``    — proportional to d_un + d_in.
* ``ren_fd``   — renewal-process estimator from full degree triples: the
  in-degree weight is inflated by the expected run of immediate two-step
  returns through undirected edges.
* ``ren_known_params`` / ``ren`` — renewal estimator when only out-degrees
  are observed, with network parameters (alpha, lam) known respectively
  estimated from the walk.

A proportion estimate weights sampled individuals by inverse selection
probability, so any estimate is usable up to a positive scale factor.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import CoverageError, EstimationError, InputError
from .walk import WalkSample, inverse_outdegree_sum

logger = logging.getLogger(__name__)

VARIANTS = ("uni", "outdeg", "indeg", "ren_fd", "ren_known_params", "ren")

ALL_VERTICES = "all_vertices"
SAMPLE = "sample"


@dataclass
class SelectionProbEstimate:
    """A normalized probability vector over a vertex domain.

    ``vertices`` lists the domain ids; when the domain is all vertices it is
    simply arange(n).  ``probs`` aligns with ``vertices`` and sums to one.
    """

    variant: str
    vertices: np.ndarray
    probs: np.ndarray
    normalization_domain: str

    def lookup(self) -> dict[int, float]:
        return {int(v): float(p) for v, p in zip(self.vertices, self.probs)}


@dataclass(frozen=True)
class NetworkParams:
    """Directedness alpha and expected total degree lam, with provenance."""

    alpha: float
    lam: float
    provenance: str  # "true_model" | "estimated"

    def validate(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise InputError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.lam < 0:
            raise InputError(f"lambda must be non-negative, got {self.lam}")
        if self.provenance not in ("true_model", "estimated"):
            raise InputError(f"unknown provenance {self.provenance!r}")


class DegreeMoments(NamedTuple):
    """First moments of the degree components plus the mean inverse
    size-biased out-degree used by the renewal weights."""

    e_d_un: float
    e_d_in: float
    e_d_out: float
    e_inv_sizebiased_out: float


class FractionalDegrees(NamedTuple):
    d_un: float
    d_in: float
    d_out: float


def _normalize(variant: str, weights: np.ndarray, vertices: np.ndarray | None,
               domain: str) -> SelectionProbEstimate:
    weights = np.asarray(weights, dtype=np.float64)
    if weights.ndim != 1 or weights.size == 0:
        raise InputError("weights must be a non-empty vector")
    total = weights.sum()
    if total <= 0 or np.any(weights <= 0):
        raise EstimationError(f"{variant}: weights must be strictly positive")
    if vertices is None:
        vertices = np.arange(weights.size, dtype=np.int64)
    return SelectionProbEstimate(variant, np.asarray(vertices, dtype=np.int64),
                                 weights / total, domain)


def pi_uniform(n: int, vertices: np.ndarray | None = None) -> SelectionProbEstimate:
    if n < 1:
        raise InputError("n must be >= 1")
    domain = ALL_VERTICES if vertices is None else SAMPLE
    return _normalize("uni", np.ones(n), vertices, domain)


def pi_outdeg(out_degrees: np.ndarray,
              vertices: np.ndarray | None = None) -> SelectionProbEstimate:
    out_degrees = np.asarray(out_degrees, dtype=np.float64)
    if np.any(out_degrees < 1):
        raise EstimationError("out-degrees must be >= 1")
    domain = ALL_VERTICES if vertices is None else SAMPLE
    return _normalize("outdeg", out_degrees, vertices, domain)


def pi_indeg(in_degrees: np.ndarray,
             vertices: np.ndarray | None = None) -> SelectionProbEstimate:
    in_degrees = np.asarray(in_degrees, dtype=np.float64)
    if np.any(in_degrees < 1):
        raise EstimationError("in-degrees must be >= 1")
    domain = ALL_VERTICES if vertices is None else SAMPLE
    return _normalize("indeg", in_degrees, vertices, domain)


def return_prob(d_un, d_out, e_inv: float) -> np.ndarray:
    """Probability that the walk leaving a vertex is back after two steps:
    the chance of exiting through an undirected edge times the mean inverse
    out-degree of the vertex at its far end."""
    d_un = np.asarray(d_un, dtype=np.float64)
    d_out = np.asarray(d_out, dtype=np.float64)
    return d_un / (d_un + d_out) * e_inv


def visit_prob(d_un, d_in, e_d_un: float, e_d_in: float, n: int) -> np.ndarray:
    """In-degree-proportional probability of arriving at a vertex at any
    given step once the walk has left its neighborhood."""
    d_un = np.asarray(d_un, dtype=np.float64)
    d_in = np.asarray(d_in, dtype=np.float64)
    return (d_un + d_in) / (n * (e_d_un + e_d_in))


def renewal_weights_untruncated(d_un, d_in, d_out, e_inv: float,
                                e_d_un: float, e_d_in: float, n: int) -> np.ndarray:
    """Reference form of the renewal estimate, kept for testing: the full
    ratio of expected returns to expected renewal-cycle length, without
    dropping the lower-order term."""
    p_ret = return_prob(d_un, d_out, e_inv)
    p_vis = visit_prob(d_un, d_in, e_d_un, e_d_in, n)
    weights = p_vis / (2.0 * p_vis + 1.0 - p_ret)
    return weights / weights.sum()


def pi_renewal_full(d_un, d_in, d_out, e_inv: float,
                    vertices: np.ndarray | None = None) -> SelectionProbEstimate:
    """Renewal estimator from full degree triples.

    Weight of a vertex: (d_un + d_in) / (1 - return_prob).  On an undirected
    graph this reduces to plain degree proportionality; on a fully directed
    graph to in-directed-degree proportionality.
    """
    if not 0.0 < e_inv <= 1.0:
        raise InputError(f"e_inv must be in (0, 1], got {e_inv}")
    d_un = np.asarray(d_un, dtype=np.float64)
    d_in = np.asarray(d_in, dtype=np.float64)
    d_out = np.asarray(d_out, dtype=np.float64)
    if np.any(d_un + d_out < 1):
        raise EstimationError("out-degrees must be >= 1")
    denom = 1.0 - return_prob(d_un, d_out, e_inv)
    if np.any(denom <= 0):
        raise EstimationError(
            "renewal denominator vanished (e_inv = 1 with a zero out-directed degree)")
    domain = ALL_VERTICES if vertices is None else SAMPLE
    return _normalize("ren_fd", (d_un + d_in) / denom, vertices, domain)


def mean_inv_outdegree(sample: WalkSample) -> float:
    """Mean inverse observed out-degree: the sampled-neighbor estimate of the
    expected inverse out-degree at the far end of an undirected edge."""
    if sample.size == 0:
        raise InputError("empty sample")
    return float(np.mean(1.0 / sample.out_degrees))


def mean_harmonic_alternative(sample: WalkSample) -> float:
    """1 / mean observed out-degree: the alternative plug-in (kept behind an
    explicit call; slightly worse in practice, not used by default)."""
    if sample.size == 0:
        raise InputError("empty sample")
    return float(1.0 / np.mean(sample.out_degrees))


def decompose_degrees(out_degree: float, moments: DegreeMoments) -> FractionalDegrees:
    """Split an observed out-degree into expected undirected and out-directed
    components, and take the in-directed component at its population mean."""
    if out_degree < 1:
        raise InputError("out-degree must be >= 1")
    total = moments.e_d_un + moments.e_d_out
    if total <= 0:
        raise InputError("e_d_un + e_d_out must be positive")
    share_un = moments.e_d_un / total
    return FractionalDegrees(d_un=out_degree * share_un,
                             d_in=moments.e_d_in,
                             d_out=out_degree * (1.0 - share_un))


def estimate_alpha(sample: WalkSample) -> float:
    """Moment estimator of the directed-edge fraction from the revisit count.

    Clamped into [0, 1]: negative raw values are forced to 0; values above 1
    cannot arise unless the revisit count exceeds twice the inverse-out-degree
    sum, which is guarded with a warning.
    """
    if sample.size < 3:
        raise InputError("walk must have at least 3 visits")
    m = sample.revisit_count
    inv_sum = inverse_outdegree_sum(sample)
    denom = m / 2.0 - inv_sum
    if denom == 0.0:
        raise EstimationError(
            f"degenerate directedness estimate: m={m}, inverse-out-degree sum={inv_sum}")
    raw = (m - inv_sum) / denom
    if raw < 0.0:
        return 0.0
    if raw > 1.0:
        logger.warning("directedness estimate %.4f above 1 (m=%d, sum=%.4f); clamping", raw, m, inv_sum)
        return 1.0
    return float(raw)


def estimate_lambda(mean_out: float, alpha_hat: float) -> float:
    """Mean-degree estimator from the mean sampled out-degree, inverting the
    linear interpolation of the expected observed out-degree in alpha."""
    if mean_out < 0:
        raise InputError("mean out-degree must be non-negative")
    if not 0.0 <= alpha_hat <= 1.0:
        raise InputError(f"alpha_hat must be in [0, 1], got {alpha_hat}")
    raw = (mean_out + alpha_hat - 1.0) / (1.0 - alpha_hat / 2.0)
    if raw < 0.0:
        logger.warning("mean-degree estimate %.4f below 0; flooring", raw)
        return 0.0
    return float(raw)


def estimate_network_params(sample: WalkSample) -> NetworkParams:
    """Estimate (alpha, lam) from one walk: directedness from the revisit
    count, mean degree from the mean observed out-degree."""
    alpha_hat = estimate_alpha(sample)
    lam_hat = estimate_lambda(float(np.mean(sample.out_degrees)), alpha_hat)
    return NetworkParams(alpha=alpha_hat, lam=lam_hat, provenance="estimated")


def poisson_degree_moments(params: NetworkParams,
                           e_inv: float = float("nan")) -> DegreeMoments:
    """Degree-component moments implied by the directed Erdős–Rényi model:
    independent Poisson components with means (1-alpha)*lam and alpha*lam/2."""
    return DegreeMoments(e_d_un=(1.0 - params.alpha) * params.lam,
                         e_d_in=params.alpha * params.lam / 2.0,
                         e_d_out=params.alpha * params.lam / 2.0,
                         e_inv_sizebiased_out=e_inv)


def pi_renewal_outdeg(out_degrees: np.ndarray, params: NetworkParams,
                      vertices: np.ndarray | None = None) -> SelectionProbEstimate:
    """Renewal estimator when only out-degrees are observed.

    Weight of a vertex: (1-alpha)/(1-alpha/2) * outdeg + alpha*lam/2, the
    estimated in-degree after decomposing the observed out-degree under the
    model-based moments.  At alpha=0 this is out-degree weighting; at alpha=1
    it is constant (uniform over the domain).
    """
    params.validate()
    out_degrees = np.asarray(out_degrees, dtype=np.float64)
    if np.any(out_degrees < 1):
        raise EstimationError("out-degrees must be >= 1")
    coeff = (1.0 - params.alpha) / (1.0 - params.alpha / 2.0)
    weights = coeff * out_degrees + params.alpha * params.lam / 2.0
    variant = "ren_known_params" if params.provenance == "true_model" else "ren"
    domain = ALL_VERTICES if vertices is None else SAMPLE
    return _normalize(variant, weights, vertices, domain)


def estimate_proportion(sample: WalkSample, estimate: SelectionProbEstimate) -> float:
    """Inverse-probability-weighted fraction of sampled individuals carrying
    the property.  Repeat visits contribute repeatedly; the result is
    invariant to rescaling of the probability vector."""
    if sample.size == 0:
        raise InputError("empty sample")
    if estimate.normalization_domain == ALL_VERTICES:
        n = estimate.probs.size
        if sample.visits.min() < 0 or sample.visits.max() >= n:
            raise CoverageError("sampled vertex outside the estimate's domain")
        probs = estimate.probs[sample.visits]
    else:
        table = estimate.lookup()
        try:
            probs = np.array([table[int(v)] for v in sample.visits])
        except KeyError as exc:
            raise CoverageError(f"sampled vertex {exc} has no probability") from exc
    if np.any(probs <= 0):
        raise EstimationError("selection probabilities must be positive")
    inv = 1.0 / probs
    return float(inv[sample.flags == 1].sum() / inv.sum())
