"""Random-walk sampling with revisit bookkeeping.

A walk records the visited vertices, their degrees as observed at visit time,
their 0/1 property flags, and the number of immediate two-step returns
(visits[t] == visits[t-2]), which drives the directedness estimator.
Sampling is with replacement: repeated visits re-record the same vertex.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InputError, StructuralError
from .graphs import DirectedGraph

_RAND_BLOCK = 8192


@dataclass
class WalkSample:
    """Ordered record of one walk of length s.

    ``d_un``/``d_in``/``d_out`` are per-visit observed degree components;
    they are None for samples recorded (or ingested) in the out-degree-only
    regime, where just ``out_degrees`` is known.
    """

    visits: np.ndarray
    out_degrees: np.ndarray
    d_un: np.ndarray | None
    d_in: np.ndarray | None
    d_out: np.ndarray | None
    flags: np.ndarray
    revisit_count: int
    start_vertex: int
    seed: int | None

    @property
    def size(self) -> int:
        return int(self.visits.size)

    @property
    def has_full_degrees(self) -> bool:
        return self.d_un is not None


def count_revisits(visits: np.ndarray) -> int:
    """Number of immediate two-step returns within the visit list."""
    if visits.size < 3:
        return 0
    return int(np.count_nonzero(visits[2:] == visits[:-2]))


def run_walk(g: DirectedGraph, s: int, seed: int | None,
             start: int | None = None, burn_in: int = 0,
             flags: np.ndarray | None = None) -> WalkSample:
    """Simulate a simple random walk and record s visits.

    Each step moves to a uniformly chosen out-neighbor.  ``start`` defaults
    to a uniformly random vertex; ``burn_in`` unrecorded steps are taken
    before the first recorded visit.  Deterministic given seed.
    """
    if s < 2:
        raise InputError(f"walk length must be >= 2, got {s}")
    if burn_in < 0:
        raise InputError("burn_in must be non-negative")
    if g.n == 0:
        raise InputError("graph is empty")
    if flags is not None and len(flags) != g.n:
        raise InputError("flags length must equal vertex count")
    rng = np.random.default_rng(seed)
    if start is None:
        v = int(rng.integers(g.n))
    else:
        if not 0 <= start < g.n:
            raise InputError(f"start vertex {start} outside [0, {g.n})")
        v = int(start)

    indptr = g.out_indptr
    indices = g.out_indices
    visits = np.empty(s, dtype=np.int64)
    buf = rng.random(_RAND_BLOCK)
    pos = 0

    def step(v: int) -> int:
        nonlocal buf, pos
        lo = int(indptr[v])
        k = int(indptr[v + 1]) - lo
        if k == 0:
            raise StructuralError(f"vertex {v} has no out-neighbors")
        if pos == _RAND_BLOCK:
            buf = rng.random(_RAND_BLOCK)
            pos = 0
        u = buf[pos]
        pos += 1
        return int(indices[lo + int(u * k)])

    for _ in range(burn_in):
        v = step(v)
    visits[0] = v
    for t in range(1, s):
        v = step(v)
        visits[t] = v

    flag_col = (flags[visits].astype(np.int8) if flags is not None
                else np.zeros(s, dtype=np.int8))
    return WalkSample(
        visits=visits,
        out_degrees=g.out_degrees[visits],
        d_un=g.d_un[visits], d_in=g.d_in[visits], d_out=g.d_out[visits],
        flags=flag_col,
        revisit_count=count_revisits(visits),
        start_vertex=int(visits[0]),
        seed=seed,
    )


def inverse_outdegree_sum(sample: WalkSample) -> float:
    """Sum of 1/outdeg over all visits but the last."""
    if sample.size < 2:
        raise InputError("walk too short")
    return float(np.sum(1.0 / sample.out_degrees[:-1]))


def save_sample(sample: WalkSample, path: str | Path, regime: str = "full") -> None:
    """Write a sample file: header "s seed start m", then one visit per line.

    Full regime lines are "vertex_id d_un d_in d_out flag"; out-degree regime
    lines are "vertex_id outdeg flag".  A seed that is unknown (None) is
    recorded as -1.
    """
    if regime not in ("full", "outdeg"):
        raise InputError(f"unknown regime {regime!r}")
    if regime == "full" and not sample.has_full_degrees:
        raise InputError("sample has no full degree record")
    seed = -1 if sample.seed is None else sample.seed
    with open(path, "w") as fh:
        fh.write(f"{sample.size} {seed} {sample.start_vertex} {sample.revisit_count}\n")
        if regime == "full":
            rows = zip(sample.visits, sample.d_un, sample.d_in, sample.d_out, sample.flags)
            for v, un, din, dout, f in rows:
                fh.write(f"{v} {un} {din} {dout} {f}\n")
        else:
            for v, od, f in zip(sample.visits, sample.out_degrees, sample.flags):
                fh.write(f"{v} {od} {f}\n")


def load_sample(path: str | Path) -> WalkSample:
    """Read a sample file written by save_sample (either regime)."""
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise InputError(f"{path}: empty sample file")
    head = lines[0].split()
    if len(head) != 4:
        raise InputError(f"{path}: header must be 's seed start m'")
    s, seed, start, m = (int(x) for x in head)
    if len(lines) - 1 != s:
        raise InputError(f"{path}: header says {s} visits, found {len(lines) - 1}")
    body = [ln.split() for ln in lines[1:]]
    widths = {len(row) for row in body}
    if widths == {5}:
        arr = np.array(body, dtype=np.int64)
        visits, d_un, d_in, d_out, flags = arr.T
        out_degrees = d_un + d_out
    elif widths == {3}:
        arr = np.array(body, dtype=np.int64)
        visits, out_degrees, flags = arr.T
        d_un = d_in = d_out = None
    else:
        raise InputError(f"{path}: rows must have 5 (full) or 3 (outdeg) columns")
    recount = count_revisits(visits)
    if recount != m:
        raise InputError(f"{path}: header revisit count {m} != recount {recount}")
    return WalkSample(
        visits=visits, out_degrees=out_degrees,
        d_un=d_un, d_in=d_in, d_out=d_out,
        flags=flags.astype(np.int8), revisit_count=m,
        start_vertex=start, seed=None if seed < 0 else seed,
    )
