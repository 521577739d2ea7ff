"""Directed graphs with reciprocity-aware degree accounting.

A graph stores, for every vertex, the counts of undirected (reciprocated),
in-directed and out-directed edges.  An arc (i, j) whose reverse (j, i) is
also present counts once toward d_un of both endpoints; an unreciprocated arc
counts toward d_out of its source and d_in of its target.  Adjacency is kept
in CSR form in both directions: forward for walking, reverse for stationary
computations and in-degree estimators.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .errors import InputError, StructuralError

logger = logging.getLogger(__name__)

VertexId = int


class DegreeTriple(NamedTuple):
    d_un: int
    d_in: int
    d_out: int


@dataclass
class DirectedGraph:
    """Immutable-by-convention directed graph over vertices 0..n-1.

    ``orig_ids`` maps the dense vertex index back to the id it had before
    re-indexing (component extraction or edge-list ingestion); None when the
    graph was built directly on dense ids.
    """

    n: int
    out_indptr: np.ndarray
    out_indices: np.ndarray
    in_indptr: np.ndarray
    in_indices: np.ndarray
    d_un: np.ndarray
    d_in: np.ndarray
    d_out: np.ndarray
    orig_ids: np.ndarray | None = None
    _out_degrees: np.ndarray = field(init=False, repr=False)
    _in_degrees: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self._out_degrees = self.d_un + self.d_out
        self._in_degrees = self.d_un + self.d_in

    @property
    def arc_count(self) -> int:
        return int(self.out_indices.size)

    @property
    def out_degrees(self) -> np.ndarray:
        """Per-vertex d_un + d_out (number of walkable neighbors)."""
        return self._out_degrees

    @property
    def in_degrees(self) -> np.ndarray:
        """Per-vertex d_un + d_in."""
        return self._in_degrees

    def out_neighbors(self, v: VertexId) -> np.ndarray:
        return self.out_indices[self.out_indptr[v]:self.out_indptr[v + 1]]

    def in_neighbors(self, v: VertexId) -> np.ndarray:
        return self.in_indices[self.in_indptr[v]:self.in_indptr[v + 1]]

    def degree_triple(self, v: VertexId) -> DegreeTriple:
        return DegreeTriple(int(self.d_un[v]), int(self.d_in[v]), int(self.d_out[v]))

    def arcs(self) -> tuple[np.ndarray, np.ndarray]:
        """All arcs as (src, dst) arrays, sorted by (src, dst)."""
        src = np.repeat(np.arange(self.n, dtype=np.int64),
                        np.diff(self.out_indptr))
        return src, self.out_indices.copy()

    def out_csr(self) -> csr_matrix:
        """Boolean adjacency matrix (row = source) in CSR form."""
        data = np.ones(self.out_indices.size, dtype=np.int8)
        return csr_matrix((data, self.out_indices, self.out_indptr),
                          shape=(self.n, self.n))


def _csr_from_arcs(src: np.ndarray, dst: np.ndarray, n: int):
    order = np.lexsort((dst, src))
    indices = dst[order]
    counts = np.bincount(src, minlength=n)
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=indptr[1:])
    return indptr, indices.astype(np.int64)


def _graph_from_clean_arcs(src: np.ndarray, dst: np.ndarray, n: int,
                           orig_ids: np.ndarray | None = None) -> DirectedGraph:
    """Assemble a graph from arc arrays already free of self-loops and duplicates."""
    src = np.asarray(src, dtype=np.int64)
    dst = np.asarray(dst, dtype=np.int64)
    key = src * n + dst
    reciprocated = np.isin(key, dst * n + src, assume_unique=True)
    d_un = np.bincount(src[reciprocated], minlength=n).astype(np.int64)
    d_out = np.bincount(src[~reciprocated], minlength=n).astype(np.int64)
    d_in = np.bincount(dst[~reciprocated], minlength=n).astype(np.int64)
    out_indptr, out_indices = _csr_from_arcs(src, dst, n)
    in_indptr, in_indices = _csr_from_arcs(dst, src, n)
    return DirectedGraph(n=n, out_indptr=out_indptr, out_indices=out_indices,
                         in_indptr=in_indptr, in_indices=in_indices,
                         d_un=d_un, d_in=d_in, d_out=d_out, orig_ids=orig_ids)


def build_graph(arcs: Iterable[tuple[int, int]] | np.ndarray, n: int) -> DirectedGraph:
    """Build a graph on n vertices from an arc list.

    Self-loops are dropped and duplicate arcs collapsed (counts logged).
    Raises InputError for endpoints outside [0, n).
    """
    if n < 0:
        raise InputError(f"vertex count must be non-negative, got {n}")
    arr = np.asarray(list(arcs) if not isinstance(arcs, np.ndarray) else arcs,
                     dtype=np.int64)
    if arr.size == 0:
        arr = arr.reshape(0, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise InputError("arcs must be pairs (src, dst)")
    src, dst = arr[:, 0], arr[:, 1]
    if arr.size and (src.min() < 0 or dst.min() < 0 or src.max() >= n or dst.max() >= n):
        raise InputError(f"arc endpoint outside [0, {n})")
    loops = src == dst
    n_loops = int(loops.sum())
    if n_loops:
        logger.info("dropped %d self-loop(s)", n_loops)
        src, dst = src[~loops], dst[~loops]
    key = np.unique(src * n + dst)
    n_dups = src.size - key.size
    if n_dups:
        logger.info("collapsed %d duplicate arc(s)", n_dups)
    return _graph_from_clean_arcs(key // n, key % n, n)


def is_strongly_connected(g: DirectedGraph) -> bool:
    if g.n == 0:
        return False
    if g.n == 1:
        return True
    ncomp, _ = connected_components(g.out_csr(), directed=True, connection="strong")
    return ncomp == 1


def largest_scc(g: DirectedGraph) -> DirectedGraph:
    """Induced subgraph on the largest strongly connected component.

    Vertices are re-indexed densely (original ids kept in ``orig_ids``);
    degree triples are recomputed on the induced arc set.  Ties between
    equally large components go to the one containing the smallest original
    vertex id.
    """
    if g.n == 0:
        raise InputError("graph is empty")
    if g.n == 1:
        return g
    _, labels = connected_components(g.out_csr(), directed=True, connection="strong")
    sizes = np.bincount(labels)
    best_size = sizes.max()
    candidates = np.flatnonzero(sizes == best_size)
    if candidates.size == 1:
        best = candidates[0]
    else:
        # labels of csgraph are arbitrary; find min original-vertex per candidate
        first_seen = {}
        for v, lab in enumerate(labels):
            if lab not in first_seen:
                first_seen[lab] = v
        best = min(candidates, key=lambda lab: first_seen[lab])
    keep = labels == best
    new_id = np.cumsum(keep) - 1
    src, dst = g.arcs()
    sel = keep[src] & keep[dst]
    kept_vertices = np.flatnonzero(keep).astype(np.int64)
    orig = kept_vertices if g.orig_ids is None else g.orig_ids[kept_vertices]
    return _graph_from_clean_arcs(new_id[src[sel]], new_id[dst[sel]],
                                  int(best_size), orig_ids=orig)


def directedness(g: DirectedGraph) -> float:
    """Fraction of edges that are not reciprocated.

    A reciprocal pair counts as one edge.  Raises StructuralError on an
    edgeless graph (the measure is undefined).
    """
    reciprocal_pairs = int(g.d_un.sum()) // 2
    unreciprocated = int(g.d_out.sum())
    total = reciprocal_pairs + unreciprocated
    if total == 0:
        raise StructuralError("directedness is undefined on a graph with no edges")
    return unreciprocated / total


def load_edge_list(path: str | Path) -> DirectedGraph:
    """Read a plain-text arc list: one "src dst" pair per line, '#' comments.

    Vertex ids need not be dense; they are re-indexed in ascending order and
    the original ids retained in ``orig_ids``.
    """
    src, dst = [], []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise InputError(f"{path}:{lineno}: expected 'src dst', got {line!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError as exc:
                raise InputError(f"{path}:{lineno}: non-integer vertex id") from exc
            if u < 0 or v < 0:
                raise InputError(f"{path}:{lineno}: negative vertex id")
            src.append(u)
            dst.append(v)
    if not src:
        raise InputError(f"{path}: no arcs found")
    src_arr = np.asarray(src, dtype=np.int64)
    dst_arr = np.asarray(dst, dtype=np.int64)
    ids = np.unique(np.concatenate([src_arr, dst_arr]))
    g = build_graph(np.column_stack([np.searchsorted(ids, src_arr),
                                     np.searchsorted(ids, dst_arr)]), len(ids))
    g.orig_ids = ids
    return g


def save_edge_list(g: DirectedGraph, path: str | Path) -> None:
    """Write the graph's arcs using its current dense vertex ids."""
    src, dst = g.arcs()
    with open(path, "w") as fh:
        for u, v in zip(src, dst):
            fh.write(f"{u} {v}\n")


def load_attributes(path: str | Path, g: DirectedGraph) -> np.ndarray:
    """Read a per-vertex 0/1 attribute file keyed by original vertex ids.

    Returns a flag array aligned with the graph's dense ids.  Every vertex of
    the graph must be covered; extra ids (vertices dropped by component
    extraction) are ignored.
    """
    table = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise InputError(f"{path}:{lineno}: expected 'vertex_id value'")
            vid, val = int(parts[0]), int(parts[1])
            if val not in (0, 1):
                raise InputError(f"{path}:{lineno}: attribute must be 0 or 1, got {val}")
            table[vid] = val
    originals = g.orig_ids if g.orig_ids is not None else np.arange(g.n)
    flags = np.empty(g.n, dtype=np.int8)
    missing = 0
    for dense, orig in enumerate(originals):
        try:
            flags[dense] = table[int(orig)]
        except KeyError:
            missing += 1
    if missing:
        raise InputError(f"{path}: {missing} graph vertex(es) missing from attribute file")
    return flags


def save_attributes(flags: np.ndarray, path: str | Path,
                    g: DirectedGraph | None = None) -> None:
    """Write per-vertex flags, keyed by original ids when the graph has them."""
    originals = (g.orig_ids if g is not None and g.orig_ids is not None
                 else np.arange(len(flags)))
    with open(path, "w") as fh:
        for orig, flag in zip(originals, flags):
            fh.write(f"{orig} {int(flag)}\n")
