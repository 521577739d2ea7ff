"""Seeded random generation of partially directed networks.

Two models:

* ``gen_directed_er`` — each unordered vertex pair independently forms an
  edge with probability lam/(n-1); a formed edge is reciprocal with
  probability 1-alpha, otherwise one-way with a fair coin for direction.
* ``gen_power_law`` — a static heavy-tailed model: an undirected phase draws
  pairs with probability proportional to rank weights i^(-tau), a directed
  phase draws ordered pairs under independently permuted rank weights, and
  the union is kept only if strongly connected.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .errors import GenerationError, InputError
from .graphs import DirectedGraph, _graph_from_clean_arcs, is_strongly_connected

logger = logging.getLogger(__name__)

_BATCH = 8192


@dataclass(frozen=True)
class ErParams:
    """Directed Erdős–Rényi parameters: n vertices, directed fraction alpha,
    expected total degree lam."""

    n: int
    alpha: float
    lam: float

    def validate(self) -> None:
        if self.n < 1:
            raise InputError(f"n must be >= 1, got {self.n}")
        if not 0.0 <= self.alpha <= 1.0:
            raise InputError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.n > 1 and not 0.0 <= self.lam <= self.n - 1:
            raise InputError(f"lambda must be in [0, n-1], got {self.lam}")
        if self.n == 1 and self.lam != 0:
            raise InputError("lambda must be 0 for a single-vertex graph")


@dataclass(frozen=True)
class PowerLawParams:
    """Heavy-tailed model parameters.

    ``e_d_un`` is the expected undirected degree, ``e_d_dir`` the expected
    total directed degree (in-directed plus out-directed).  Each tau in
    [0, 1] controls the corresponding tail exponent, gamma = 1 + 1/tau.
    """

    n: int
    e_d_un: float
    e_d_dir: float
    tau_un: float
    tau_in: float
    tau_out: float

    @staticmethod
    def gamma(tau: float) -> float:
        return math.inf if tau == 0 else 1.0 + 1.0 / tau

    def validate(self) -> None:
        if self.n < 2:
            raise InputError(f"n must be >= 2, got {self.n}")
        for name in ("tau_un", "tau_in", "tau_out"):
            val = getattr(self, name)
            if not 0.0 <= val <= 1.0:
                raise InputError(f"{name} must be in [0, 1], got {val}")
        if self.e_d_un < 0 or self.e_d_dir < 0:
            raise InputError("expected degrees must be non-negative")
        max_pairs = self.n * (self.n - 1) // 2
        if round(self.e_d_un * self.n / 2) > max_pairs:
            raise InputError("undirected edge budget exceeds simple-graph capacity")
        if round(self.e_d_dir * self.n / 2) > max_pairs:
            raise InputError("directed arc budget exceeds simple-graph capacity")


def _sample_pair_indices(n_pairs: int, p: float, rng: np.random.Generator) -> np.ndarray:
    """Indices of the selected unordered pairs: each of 0..n_pairs-1 kept
    independently with probability p, via vectorized geometric gaps."""
    if p <= 0.0 or n_pairs == 0:
        return np.empty(0, dtype=np.int64)
    if p >= 1.0:
        return np.arange(n_pairs, dtype=np.int64)
    chunks = []
    pos = -1
    expected = n_pairs * p
    size = int(expected + 10.0 * math.sqrt(expected * (1.0 - p))) + 16
    while True:
        gaps = rng.geometric(p, size=size)
        positions = pos + np.cumsum(gaps)
        if positions[-1] >= n_pairs:
            chunks.append(positions[positions < n_pairs])
            break
        chunks.append(positions)
        pos = int(positions[-1])
        remaining = (n_pairs - 1 - pos) * p
        size = int(remaining + 10.0 * math.sqrt(max(remaining, 1.0))) + 16
    return np.concatenate(chunks)


def _pairs_from_indices(t: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Decode flat indices into (i, j) with i < j, row-major pair order."""
    b = 2 * n - 1
    i = np.floor((b - np.sqrt(b * b - 8.0 * t.astype(np.float64))) / 2.0).astype(np.int64)
    # one-step fixups for float rounding at row boundaries
    offset = i * (2 * n - i - 1) // 2
    i[offset > t] -= 1
    offset = i * (2 * n - i - 1) // 2
    bump = (i + 1) * (2 * n - i - 2) // 2 <= t
    i[bump] += 1
    offset = i * (2 * n - i - 1) // 2
    j = t - offset + i + 1
    return i, j


def gen_directed_er(params: ErParams, seed: int) -> DirectedGraph:
    """Draw one directed Erdős–Rényi graph. Deterministic given seed."""
    params.validate()
    n = params.n
    rng = np.random.default_rng(seed)
    if n == 1:
        return _graph_from_clean_arcs(np.empty(0, np.int64), np.empty(0, np.int64), 1)
    p = params.lam / (n - 1)
    idx = _sample_pair_indices(n * (n - 1) // 2, p, rng)
    i, j = _pairs_from_indices(idx, n)
    directed = rng.random(idx.size) < params.alpha
    flip = rng.random(int(directed.sum())) < 0.5
    di, dj = i[directed], j[directed]
    src_dir = np.where(flip, di, dj)
    dst_dir = np.where(flip, dj, di)
    ui, uj = i[~directed], j[~directed]
    src = np.concatenate([ui, uj, src_dir])
    dst = np.concatenate([uj, ui, dst_dir])
    return _graph_from_clean_arcs(src, dst, n)


class _WeightedVertexSampler:
    """Categorical vertex draws by inversion on cumulative weights."""

    def __init__(self, weights: np.ndarray):
        self.cum = np.cumsum(weights)
        self.total = float(self.cum[-1])

    def draw(self, rng: np.random.Generator, size: int) -> np.ndarray:
        u = rng.random(size) * self.total
        return np.searchsorted(self.cum, u, side="right")


def _rank_weights(n: int, tau: float, ranks: np.ndarray | None = None) -> np.ndarray:
    if ranks is None:
        ranks = np.arange(1, n + 1, dtype=np.float64)
    return ranks ** -tau if tau > 0 else np.ones(n)


def sample_power_law(params: PowerLawParams, rng: np.random.Generator) -> DirectedGraph:
    """One draw from the heavy-tailed model, without the connectivity filter.

    Phase 1 places round(e_d_un*n/2) undirected edges; phase 2 places
    round(e_d_dir*n/2) one-way arcs.  Phase-2 proposals that would duplicate
    an arc, reverse an existing arc, or land on an undirected edge are
    rejected and redrawn, so the superposition keeps the two edge populations
    disjoint.
    """
    params.validate()
    n = params.n
    target_undirected = round(params.e_d_un * n / 2)
    target_arcs = round(params.e_d_dir * n / 2)

    undirected: set[int] = set()
    sampler_un = _WeightedVertexSampler(_rank_weights(n, params.tau_un))
    while len(undirected) < target_undirected:
        a = sampler_un.draw(rng, _BATCH)
        b = sampler_un.draw(rng, _BATCH)
        for i, j in zip(a, b):
            if i == j:
                continue
            lo, hi = (i, j) if i < j else (j, i)
            key = int(lo) * n + int(hi)
            if key not in undirected:
                undirected.add(key)
                if len(undirected) == target_undirected:
                    break

    # head drawn from in-weights, tail from out-weights; arc goes tail -> head
    perm_in = rng.permutation(n) + 1
    perm_out = rng.permutation(n) + 1
    sampler_in = _WeightedVertexSampler(_rank_weights(n, params.tau_in, perm_in.astype(np.float64)))
    sampler_out = _WeightedVertexSampler(_rank_weights(n, params.tau_out, perm_out.astype(np.float64)))
    arcs: set[int] = set()
    while len(arcs) < target_arcs:
        heads = sampler_in.draw(rng, _BATCH)
        tails = sampler_out.draw(rng, _BATCH)
        for i, j in zip(heads, tails):
            if i == j:
                continue
            i, j = int(i), int(j)
            key = j * n + i
            if key in arcs or i * n + j in arcs:
                continue
            lo, hi = (i, j) if i < j else (j, i)
            if lo * n + hi in undirected:
                continue
            arcs.add(key)
            if len(arcs) == target_arcs:
                break

    und = np.fromiter(undirected, dtype=np.int64, count=len(undirected))
    ua, ub = und // n, und % n
    dk = np.fromiter(arcs, dtype=np.int64, count=len(arcs))
    da, db = dk // n, dk % n
    src = np.concatenate([ua, ub, da])
    dst = np.concatenate([ub, ua, db])
    return _graph_from_clean_arcs(src, dst, n)


def gen_power_law(params: PowerLawParams, seed: int, max_retries: int = 100) -> DirectedGraph:
    """Draw heavy-tailed graphs until one is strongly connected.

    Raises GenerationError when max_retries attempts all fail the
    connectivity check.
    """
    rng = np.random.default_rng(seed)
    for attempt in range(1, max_retries + 1):
        g = sample_power_law(params, rng)
        if is_strongly_connected(g):
            if attempt > 1:
                logger.debug("power-law generation needed %d attempts", attempt)
            return g
    raise GenerationError(
        f"no strongly connected graph in {max_retries} attempts", attempts=max_retries)
