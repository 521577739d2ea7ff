"""Stochastic assignment of a binary property with degree-proportional bias.

A scheme picks a degree functional g; vertex i receives the property
independently with probability min(1, c*g_i), where c is calibrated so the
expected number of carriers equals target_p * n even when hubs saturate the
cap.  The plain proportional constant would undershoot on heavy-tailed
graphs, hence the capped solve.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AllocationError, InputError
from .graphs import DirectedGraph

SCHEME_KINDS = ("in_deg", "out_deg", "undirected", "in_directed",
                "out_directed", "directed", "uniform")


@dataclass(frozen=True)
class AllocationScheme:
    kind: str
    target_p: float

    def validate(self) -> None:
        if self.kind not in SCHEME_KINDS:
            raise InputError(f"unknown allocation scheme {self.kind!r}")
        if not 0.0 < self.target_p < 1.0:
            raise InputError(f"target_p must be in (0, 1), got {self.target_p}")


@dataclass
class PropertyTable:
    flags: np.ndarray
    realized_p: float
    scale_c: float


def scheme_weights(g: DirectedGraph, kind: str) -> np.ndarray:
    """The degree functional g for each scheme, per vertex."""
    if kind == "in_deg":
        return (g.d_un + g.d_in).astype(np.float64)
    if kind == "out_deg":
        return (g.d_un + g.d_out).astype(np.float64)
    if kind == "undirected":
        return g.d_un.astype(np.float64)
    if kind == "in_directed":
        return g.d_in.astype(np.float64)
    if kind == "out_directed":
        return g.d_out.astype(np.float64)
    if kind == "directed":
        return (g.d_in + g.d_out).astype(np.float64)
    if kind == "uniform":
        return np.ones(g.n)
    raise InputError(f"unknown allocation scheme {kind!r}")


def _solve_cap_scale(gvals: np.ndarray, target_count: float) -> float:
    """Bisection for c with sum(min(1, c*g)) = target_count."""
    positive = gvals[gvals > 0]
    if target_count > positive.size:
        raise AllocationError(
            f"target of {target_count:.1f} carriers exceeds the {positive.size} "
            "vertices with positive weight")

    def expected(c: float) -> float:
        return float(np.minimum(1.0, c * gvals).sum())

    hi = target_count / positive.sum() if positive.sum() > 0 else 1.0
    hi = max(hi, 1e-12)
    while expected(hi) < target_count:
        hi *= 2.0
    lo = 0.0
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if expected(mid) < target_count:
            lo = mid
        else:
            hi = mid
    return hi


def allocate(g: DirectedGraph, scheme: AllocationScheme, seed: int) -> PropertyTable:
    """Assign the property so the expected carrier count is target_p * n.

    Deterministic given seed.  Raises AllocationError when fewer vertices
    have positive weight than the target requires.
    """
    scheme.validate()
    if g.n == 0:
        raise InputError("graph is empty")
    gvals = scheme_weights(g, scheme.kind)
    target_count = scheme.target_p * g.n
    c = _solve_cap_scale(gvals, target_count)
    probs = np.minimum(1.0, c * gvals)
    rng = np.random.default_rng(seed)
    flags = (rng.random(g.n) < probs).astype(np.int8)
    return PropertyTable(flags=flags, realized_p=float(flags.mean()), scale_c=c)
