"""Alignment graphs: k-NN construction from ground truth and random rewiring.

An AlignmentGraph stores each undirected edge once with row < col; reading an
edge against its stored orientation uses w_ji = w_ij and alpha_ji = -alpha_ij
(mod 2*pi).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from mfvdm.angles import TWO_PI, wrap_two_pi
from mfvdm.errors import ParameterError
from mfvdm.rng import substream

__all__ = [
    "AlignmentGraph",
    "RewireDiagnostics",
    "build_clean_knn_graph",
    "rewire_graph",
]


@dataclass(frozen=True)
class AlignmentGraph:
    """Undirected weighted graph with an SO(2) angle on every edge.

    Attributes
    ----------
    n : int
        Node count.
    rows, cols : (e,) int64 ndarrays
        Edge endpoints with rows < cols, sorted lexicographically.
    weights : (e,) float ndarray
        Positive edge weights.
    angles : (e,) float ndarray
        Edge angles alpha_ij in [0, 2*pi), oriented row -> col.
    """

    n: int
    rows: np.ndarray
    cols: np.ndarray
    weights: np.ndarray
    angles: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "rows", np.asarray(self.rows, dtype=np.int64))
        object.__setattr__(self, "cols", np.asarray(self.cols, dtype=np.int64))
        object.__setattr__(self, "weights",
                           np.asarray(self.weights, dtype=float))
        object.__setattr__(self, "angles", np.asarray(self.angles, dtype=float))

    @property
    def edge_count(self) -> int:
        return self.rows.shape[0]

    def degree_counts(self) -> np.ndarray:
        """Number of incident edges per node."""
        return (np.bincount(self.rows, minlength=self.n)
                + np.bincount(self.cols, minlength=self.n))

    def validate(self) -> None:
        """Check all structural invariants; raise ParameterError on violation."""
        if self.n < 1:
            raise ParameterError(f"Node count must be >= 1. Got {self.n}.")
        e = self.edge_count
        if not (self.cols.shape == self.weights.shape == self.angles.shape
                == (e,)):
            raise ParameterError("Edge arrays must have equal length.")
        if e == 0:
            raise ParameterError("Graph has no edges.")
        if self.rows.min(initial=0) < 0 or self.cols.max(initial=-1) >= self.n:
            raise ParameterError("Edge endpoint out of range.")
        if np.any(self.rows >= self.cols):
            raise ParameterError("Edges must satisfy row < col "
                                 "(no self-loops, canonical orientation).")
        keys = self.rows * self.n + self.cols
        if np.any(np.diff(keys) <= 0):
            raise ParameterError("Edges must be sorted and free of duplicates.")
        if np.any(self.weights <= 0.0):
            raise ParameterError("Edge weights must be positive.")
        if np.any((self.angles < 0.0) | (self.angles >= TWO_PI)):
            raise ParameterError("Edge angles must lie in [0, 2*pi).")
        if np.any(self.degree_counts() == 0):
            bad = int(np.flatnonzero(self.degree_counts() == 0)[0])
            raise ParameterError(f"Node {bad} has no incident edges.")

    @staticmethod
    def from_edges(n: int, rows: np.ndarray, cols: np.ndarray,
                   weights: np.ndarray, angles: np.ndarray) -> "AlignmentGraph":
        """Canonicalize (orientation, sort order) and validate edge arrays."""
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        weights = np.asarray(weights, dtype=float)
        angles = np.asarray(angles, dtype=float)
        flip = rows > cols
        lo = np.where(flip, cols, rows)
        hi = np.where(flip, rows, cols)
        angles = wrap_two_pi(np.where(flip, -angles, angles))
        order = np.argsort(lo * n + hi, kind="stable")
        graph = AlignmentGraph(n=n, rows=lo[order], cols=hi[order],
                               weights=weights[order], angles=angles[order])
        graph.validate()
        return graph

    def adjacency_sets(self) -> list:
        """Per-node neighbor sets (both orientations)."""
        adj: list = [set() for _ in range(self.n)]
        for r, c in zip(self.rows.tolist(), self.cols.tolist()):
            adj[r].add(c)
            adj[c].add(r)
        return adj


@dataclass(frozen=True)
class RewireDiagnostics:
    """Edge bookkeeping for one rewiring pass."""

    kept: int
    replaced: int
    skipped_no_candidate: int
    forced_links: int


def build_clean_knn_graph(truth, kappa_build: int, weight_mode: str = "unit",
                          sigma: float = 1.0,
                          block_size: int = 512) -> AlignmentGraph:
    """Symmetrized k-NN graph under the ground-truth geodesic.

    Edge (i, j) is present iff j is among the kappa_build nearest nodes of i
    or vice versa; angles come from the ground truth.  Weights are 1, or
    exp(-d^2/sigma) of the geodesic distance in "gaussian" mode.

    Parameters
    ----------
    truth : SphereTruth or TorusTruth
        Ground truth with ``geodesic_block`` and ``pair_angles``.
    kappa_build : int
        Neighbor count per node, 1 <= kappa_build < n.
    weight_mode : str
        "unit" or "gaussian".
    sigma : float
        Gaussian kernel width, used only in "gaussian" mode.
    block_size : int
        Rows per distance block; has no effect on the result.

    Returns
    -------
    graph : AlignmentGraph
    """
    n = truth.n
    if not 1 <= kappa_build < n:
        raise ParameterError(
            f"kappa_build must satisfy 1 <= kappa_build < n={n}. "
            f"Got {kappa_build}."
        )
    if weight_mode not in ("unit", "gaussian"):
        raise ParameterError(f"Unknown weight_mode {weight_mode!r}.")
    if weight_mode == "gaussian" and sigma <= 0.0:
        raise ParameterError(f"sigma must be > 0. Got {sigma}.")
    neighbors = np.empty((n, kappa_build), dtype=np.int64)
    for start in range(0, n, block_size):
        block = np.arange(start, min(start + block_size, n))
        dist = truth.geodesic_block(block)
        dist[np.arange(block.size), block] = np.inf
        part = np.argpartition(dist, kappa_build - 1, axis=1)[:, :kappa_build]
        neighbors[block] = part
    sources = np.repeat(np.arange(n, dtype=np.int64), kappa_build)
    targets = neighbors.ravel()
    lo = np.minimum(sources, targets)
    hi = np.maximum(sources, targets)
    keys = np.unique(lo * n + hi)
    rows = keys // n
    cols = keys % n
    angles = truth.pair_angles(rows, cols)
    if weight_mode == "gaussian":
        weights = np.exp(-truth.geodesics(rows, cols) ** 2 / sigma)
    else:
        weights = np.ones(rows.size)
    graph = AlignmentGraph(n=n, rows=rows, cols=cols,
                           weights=weights, angles=angles)
    graph.validate()
    return graph


def rewire_graph(graph: AlignmentGraph, p: float, seed: int,
                 return_diagnostics: bool = False):
    """Random rewiring noise: keep each edge with probability p, else relink.

    A removed edge (i, j) with i < j is replaced by an edge from i to a
    vertex drawn uniformly among vertices not currently connected to i, with
    a fresh angle uniform on [0, 2*pi) and the removed edge's weight.  Nodes
    left isolated afterwards receive one forced uniform link so the output
    is always a valid AlignmentGraph.

    Parameters
    ----------
    graph : AlignmentGraph
    p : float
        Per-edge keep probability in [0, 1].
    seed : int
        Substream seed.
    return_diagnostics : bool
        Also return a RewireDiagnostics.

    Returns
    -------
    rewired : AlignmentGraph
    diagnostics : RewireDiagnostics, only when requested
    """
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"p must lie in [0, 1]. Got {p}.")
    rng = substream(seed, "rewire")
    n = graph.n
    keep = rng.random(graph.edge_count) < p

    adj: list = [set() for _ in range(n)]
    for r, c in zip(graph.rows[keep].tolist(), graph.cols[keep].tolist()):
        adj[r].add(c)
        adj[c].add(r)

    new_rows: list = []
    new_cols: list = []
    new_weights: list = []
    new_angles: list = []

    def draw_partner(i: int) -> int:
        while True:
            j = int(rng.integers(0, n))
            if j != i and j not in adj[i]:
                return j

    def add_edge(i: int, j: int, weight: float, alpha: float) -> None:
        adj[i].add(j)
        adj[j].add(i)
        if i < j:
            new_rows.append(i)
            new_cols.append(j)
            new_angles.append(alpha)
        else:
            new_rows.append(j)
            new_cols.append(i)
            new_angles.append(wrap_two_pi(-alpha))
        new_weights.append(weight)

    skipped = 0
    removed = np.flatnonzero(~keep)
    for e in removed.tolist():
        i = int(graph.rows[e])
        if len(adj[i]) >= n - 1:
            skipped += 1
            continue
        j = draw_partner(i)
        add_edge(i, j, float(graph.weights[e]), float(rng.uniform(0.0, TWO_PI)))

    forced = 0
    degree = np.bincount(graph.rows[keep], minlength=n)
    degree += np.bincount(graph.cols[keep], minlength=n)
    if new_rows:
        degree += np.bincount(np.asarray(new_rows, dtype=np.int64),
                              minlength=n)
        degree += np.bincount(np.asarray(new_cols, dtype=np.int64),
                              minlength=n)
    for i in np.flatnonzero(degree == 0).tolist():
        if len(adj[i]) >= n - 1:
            continue
        j = draw_partner(i)
        add_edge(i, j, 1.0, float(rng.uniform(0.0, TWO_PI)))
        forced += 1

    rows = np.concatenate([graph.rows[keep],
                           np.asarray(new_rows, dtype=np.int64)])
    cols = np.concatenate([graph.cols[keep],
                           np.asarray(new_cols, dtype=np.int64)])
    weights = np.concatenate([graph.weights[keep], np.asarray(new_weights)])
    angles = np.concatenate([graph.angles[keep], np.asarray(new_angles)])
    order = np.argsort(rows * n + cols, kind="stable")
    rewired = AlignmentGraph(n=n, rows=rows[order], cols=cols[order],
                             weights=weights[order], angles=angles[order])
    rewired.validate()
    if return_diagnostics:
        diagnostics = RewireDiagnostics(
            kept=int(np.count_nonzero(keep)),
            replaced=len(removed) - skipped,
            skipped_no_candidate=skipped,
            forced_links=forced,
        )
        return rewired, diagnostics
    return rewired
