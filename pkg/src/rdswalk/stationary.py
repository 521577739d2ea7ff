"""Exact stationary distribution of the simple random walk.

The walk at vertex i moves to a uniformly chosen neighbor among the
d_un(i) + d_out(i) vertices reachable by an undirected or out-directed edge.
``power_method`` iterates the balance equations to a total-variation
tolerance; ``solve_exact`` solves them densely as a linear system and serves
as the independent oracle for small instances.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix

from .errors import ConvergenceError, InputError, StructuralError
from .graphs import DirectedGraph

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 1_000_000


@dataclass
class StationaryDistribution:
    probs: np.ndarray
    iterations: int
    residual: float


def _transition_transpose(g: DirectedGraph) -> csr_matrix:
    """Column-stochastic matrix T with T[j, i] = 1/outdeg(i) per arc i -> j."""
    out_deg = g.out_degrees
    if np.any(out_deg == 0):
        raise StructuralError("vertex with no walkable neighbors; graph is not strongly connected")
    src, dst = g.arcs()
    data = 1.0 / out_deg[src]
    return csr_matrix((data, (dst, src)), shape=(g.n, g.n))


def power_method(g: DirectedGraph, tol: float = DEFAULT_TOL,
                 max_iter: int = DEFAULT_MAX_ITER) -> StationaryDistribution:
    """Power iteration from the uniform vector until the total variation
    distance between successive iterates is <= tol.

    Iterates the half-lazy operator pi <- (pi P + pi)/2, which has the same
    fixed point as P but converges on periodic (e.g. bipartite undirected)
    graphs too.  Requires a strongly connected graph; that is only checked
    indirectly (zero out-degrees are rejected, disconnected inputs produce a
    distribution supported on part of the graph).
    """
    if tol <= 0:
        raise InputError("tol must be positive")
    if g.n == 0:
        raise InputError("graph is empty")
    if g.n == 1:
        return StationaryDistribution(np.ones(1), 0, 0.0)
    transition_t = _transition_transpose(g)
    pi = np.full(g.n, 1.0 / g.n)
    for iteration in range(1, max_iter + 1):
        nxt = 0.5 * (transition_t.dot(pi) + pi)
        nxt /= nxt.sum()
        residual = 0.5 * np.abs(nxt - pi).sum()
        pi = nxt
        if residual <= tol:
            return StationaryDistribution(pi, iteration, float(residual))
    raise ConvergenceError(
        f"power method did not reach tol={tol} in {max_iter} iterations",
        residual=float(residual), iterations=max_iter)


def solve_exact(g: DirectedGraph, max_n: int = 2000) -> StationaryDistribution:
    """Solve the balance equations densely with the normalization constraint.

    Independent of power_method; intended as a test oracle for n <= max_n.
    """
    if g.n == 0:
        raise InputError("graph is empty")
    if g.n > max_n:
        raise InputError(f"dense solve limited to n <= {max_n}, got {g.n}")
    if g.n == 1:
        return StationaryDistribution(np.ones(1), 0, 0.0)
    transition_t = _transition_transpose(g)
    a = transition_t.toarray() - np.eye(g.n)
    # the balance rows are rank n-1; replace one with the normalization row
    a[-1, :] = 1.0
    b = np.zeros(g.n)
    b[-1] = 1.0
    try:
        pi = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise StructuralError("singular balance system; graph is not strongly connected") from exc
    residual = float(np.abs(transition_t.dot(pi) - pi).max())
    if residual > 1e-8 or pi.min() < -1e-9:
        raise StructuralError("balance solution invalid; graph is not strongly connected")
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    return StationaryDistribution(pi, 0, residual)
