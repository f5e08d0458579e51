"""File formats: graphs, ground truth, CSVs, reports, and the bundle cache.

All text output prints floats with 17 significant digits so that values
round-trip exactly and repeated runs produce byte-identical files.  The
eigen-bundle cache is keyed by (graph content hash, k, m); cached entries
are plain npz archives.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

import numpy as np

from mfvdm.alignment import AlignmentTable
from mfvdm.angles import TWO_PI
from mfvdm.embedding import NeighborList
from mfvdm.errors import GraphFileError, ParameterError
from mfvdm.evaluation import EvalReport, SpectralReport
from mfvdm.graph import AlignmentGraph
from mfvdm.sampling import SphereTruth, TorusTruth
from mfvdm.spectral import SpectralBundle

__all__ = [
    "write_graph",
    "read_graph",
    "graph_hash",
    "write_truth",
    "read_truth",
    "write_nn_csv",
    "write_alignment_csv",
    "write_eval_report",
    "write_spectral_report",
    "cache_dir_for",
    "bundle_cache_path",
    "save_bundle",
    "load_bundle",
]

CACHE_ENV = "MFVDM_CACHE_DIR"


def _fmt(x: float) -> str:
    return "%.17g" % x


def _graph_lines(graph: AlignmentGraph) -> list:
    lines = [f"n {graph.n}\n"]
    for r, c, w, a in zip(graph.rows.tolist(), graph.cols.tolist(),
                          graph.weights.tolist(), graph.angles.tolist()):
        lines.append(f"{r} {c} {_fmt(w)} {_fmt(a)}\n")
    return lines


def write_graph(graph: AlignmentGraph, path) -> None:
    """Write the edge-list format: header ``n <count>``, lines ``i j w a``."""
    with open(path, "w", encoding="utf-8") as handle:
        handle.writelines(_graph_lines(graph))


def graph_hash(graph: AlignmentGraph) -> str:
    """Content hash of the canonical serialization."""
    digest = hashlib.sha256()
    for line in _graph_lines(graph):
        digest.update(line.encode("utf-8"))
    return digest.hexdigest()


def read_graph(path) -> AlignmentGraph:
    """Parse the edge-list format back into a validated AlignmentGraph."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            lines = handle.readlines()
    except OSError as exc:
        raise GraphFileError(f"Cannot read graph file {path}: {exc}") from exc
    if not lines or not lines[0].startswith("n "):
        raise GraphFileError(f"{path}: first line must be 'n <count>'.")
    try:
        n = int(lines[0].split()[1])
    except (IndexError, ValueError) as exc:
        raise GraphFileError(f"{path}: bad header {lines[0]!r}.") from exc
    rows, cols, weights, angles = [], [], [], []
    seen = set()
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 4:
            raise GraphFileError(f"{path}:{lineno}: expected 'i j w alpha'. "
                                 f"Got {raw.strip()!r}.")
        try:
            i, j = int(parts[0]), int(parts[1])
            w, a = float(parts[2]), float(parts[3])
        except ValueError as exc:
            raise GraphFileError(f"{path}:{lineno}: {exc}") from exc
        if i == j:
            raise GraphFileError(f"{path}:{lineno}: self-loop {i}.")
        if not i < j:
            raise GraphFileError(f"{path}:{lineno}: edges must have i < j.")
        if not (0 <= i < n and 0 <= j < n):
            raise GraphFileError(f"{path}:{lineno}: endpoint out of range.")
        if (i, j) in seen:
            raise GraphFileError(f"{path}:{lineno}: duplicate edge "
                                 f"({i}, {j}).")
        if w <= 0.0:
            raise GraphFileError(f"{path}:{lineno}: weight must be > 0.")
        if not 0.0 <= a < TWO_PI:
            raise GraphFileError(f"{path}:{lineno}: alpha must lie in "
                                 f"[0, 2*pi).")
        seen.add((i, j))
        rows.append(i)
        cols.append(j)
        weights.append(w)
        angles.append(a)
    order = np.argsort(np.asarray(rows, dtype=np.int64) * n
                       + np.asarray(cols, dtype=np.int64), kind="stable")
    try:
        graph = AlignmentGraph(
            n=n,
            rows=np.asarray(rows, dtype=np.int64)[order],
            cols=np.asarray(cols, dtype=np.int64)[order],
            weights=np.asarray(weights)[order],
            angles=np.asarray(angles)[order],
        )
        graph.validate()
    except ParameterError as exc:
        raise GraphFileError(f"{path}: {exc}") from exc
    return graph


def write_truth(truth, path) -> None:
    """Serialize a ground truth (sphere rotations or torus angles)."""
    with open(path, "w", encoding="utf-8") as handle:
        if isinstance(truth, SphereTruth):
            handle.write("manifold sphere\n")
            handle.write(f"n {truth.n}\n")
            for row in truth.rotations.reshape(truth.n, 9):
                handle.write(" ".join(_fmt(x) for x in row) + "\n")
        elif isinstance(truth, TorusTruth):
            handle.write("manifold torus\n")
            handle.write(f"n {truth.n}\n")
            handle.write(f"radii {_fmt(truth.radius_major)} "
                         f"{_fmt(truth.radius_minor)}\n")
            for u, v, a in zip(truth.u.tolist(), truth.v.tolist(),
                               truth.frame_angles.tolist()):
                handle.write(f"{_fmt(u)} {_fmt(v)} {_fmt(a)}\n")
        else:
            raise ParameterError(f"Unknown truth type {type(truth)!r}.")


def read_truth(path):
    """Parse a ground-truth file written by write_truth."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            lines = [line.strip() for line in handle if line.strip()]
    except OSError as exc:
        raise GraphFileError(f"Cannot read truth file {path}: {exc}") from exc
    try:
        manifold = lines[0].split()[1]
        n = int(lines[1].split()[1])
        if manifold == "sphere":
            data = np.array([[float(x) for x in line.split()]
                             for line in lines[2:2 + n]])
            return SphereTruth(rotations=data.reshape(n, 3, 3))
        if manifold == "torus":
            _, big_r, small_r = lines[2].split()
            data = np.array([[float(x) for x in line.split()]
                             for line in lines[3:3 + n]])
            return TorusTruth(u=data[:, 0], v=data[:, 1],
                              frame_angles=data[:, 2],
                              radius_major=float(big_r),
                              radius_minor=float(small_r))
        raise GraphFileError(f"{path}: unknown manifold {manifold!r}.")
    except (IndexError, ValueError) as exc:
        raise GraphFileError(f"{path}: malformed truth file: {exc}") from exc


def write_nn_csv(neighbors: NeighborList, path) -> None:
    """CSV rows (node, rank, neighbor, squared_distance), rank 1 nearest."""
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("node,rank,neighbor,squared_distance\n")
        for i in range(neighbors.n):
            for rank in range(neighbors.kappa):
                handle.write(
                    f"{i},{rank + 1},{neighbors.indices[i, rank]},"
                    f"{_fmt(neighbors.distances_sq[i, rank])}\n"
                )


def write_alignment_csv(table: AlignmentTable, path) -> None:
    """CSV rows (i, j, alpha_hat_radians, objective_value)."""
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("i,j,alpha_hat_radians,objective_value\n")
        for a, b, alpha, obj in zip(table.i.tolist(), table.j.tolist(),
                                    table.alpha_hat.tolist(),
                                    table.objective.tolist()):
            handle.write(f"{a},{b},{_fmt(alpha)},{_fmt(obj)}\n")


def _write_histogram(edges: np.ndarray, counts: np.ndarray, path) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write("bin_lo,bin_hi,count\n")
        for lo, hi, c in zip(edges[:-1].tolist(), edges[1:].tolist(),
                             counts.tolist()):
            handle.write(f"{_fmt(lo)},{_fmt(hi)},{c}\n")


def write_eval_report(report: EvalReport, prefix) -> list:
    """Emit histogram CSVs and a scalars JSON; returns written paths."""
    prefix = Path(prefix)
    written = []
    scalars = {"method": report.method, "params": report.params}
    if report.nn_counts is not None:
        path = prefix.with_name(prefix.name + "_nn_hist.csv")
        _write_histogram(report.nn_bin_edges, report.nn_counts, path)
        written.append(path)
        scalars["nn_mean"] = report.nn_mean
        scalars["nn_median"] = report.nn_median
    if report.align_counts is not None:
        path = prefix.with_name(prefix.name + "_align_hist.csv")
        _write_histogram(report.align_bin_edges_deg, report.align_counts,
                         path)
        written.append(path)
        scalars["align_median_abs_deg"] = report.align_median_abs_deg
    path = prefix.with_name(prefix.name + "_scalars.json")
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(scalars, handle, indent=2, sort_keys=True)
        handle.write("\n")
    written.append(path)
    return written


def write_spectral_report(report: SpectralReport, prefix) -> list:
    """Emit the bottom spectrum CSV and a cluster/theory JSON."""
    prefix = Path(prefix)
    csv_path = prefix.with_name(prefix.name + "_spectrum.csv")
    with open(csv_path, "w", encoding="utf-8") as handle:
        handle.write("index,one_minus_lambda\n")
        for idx, val in enumerate(report.one_minus_lambda.tolist()):
            handle.write(f"{idx},{_fmt(val)}\n")
    json_path = prefix.with_name(prefix.name + "_clusters.json")
    payload = {
        "k": report.k,
        "h": report.h,
        "cluster_sizes": list(report.cluster_sizes),
        "cluster_means": list(report.cluster_means),
        "theory_multiplicities": list(report.theory_multiplicities),
        "theory_one_minus": list(report.theory_one_minus),
        "leading_gap": report.leading_gap,
        "theory_leading_gap": report.theory_leading_gap,
    }
    with open(json_path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")
    return [csv_path, json_path]


def cache_dir_for(out_dir) -> Path:
    """Bundle cache directory: env override, else <out_dir>/cache."""
    env = os.environ.get(CACHE_ENV)
    base = Path(env) if env else Path(out_dir) / "cache"
    base.mkdir(parents=True, exist_ok=True)
    return base


def bundle_cache_path(cache_dir, graph_digest: str, k: int, m: int) -> Path:
    return Path(cache_dir) / f"bundle_{graph_digest[:16]}_k{k}_m{m}.npz"


def save_bundle(bundle: SpectralBundle, path) -> None:
    np.savez(path, k=bundle.k, eigenvalues=bundle.eigenvalues,
             eigenvectors=bundle.eigenvectors)


def load_bundle(path) -> SpectralBundle | None:
    """Load a cached bundle; None if the file is absent."""
    path = Path(path)
    if not path.exists():
        return None
    with np.load(path) as data:
        return SpectralBundle(k=int(data["k"]),
                              eigenvalues=data["eigenvalues"],
                              eigenvectors=data["eigenvectors"])
