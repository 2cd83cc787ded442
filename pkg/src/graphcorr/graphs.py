"""Dense symmetric graph matrices, elementwise algebra, and edge-list I/O.

Adjacency matrices are plain ``numpy`` arrays validated to be symmetric,
binary and hollow (zero diagonal).  Probability and correlation matrices are
real symmetric arrays with entries in [0, 1] and [-1, 1] respectively.  All
validators return read-only float64 arrays so shared instances cannot be
mutated behind a caller's back.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class GraphCorrError(ValueError):
    """Base class for all validation and data errors raised by this package."""


class DimensionMismatchError(GraphCorrError):
    """Two matrices that must share a vertex set have different sizes."""


class EdgeListError(GraphCorrError):
    """A text edge list is malformed (bad line, bad index, self-loop)."""


def _freeze(m: np.ndarray) -> np.ndarray:
    m = np.ascontiguousarray(m, dtype=np.float64)
    m.setflags(write=False)
    return m


def _check_square_symmetric(m: np.ndarray, name: str, tol: float = 0.0) -> np.ndarray:
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise GraphCorrError(f"{name} must be a square matrix, got shape {m.shape}")
    if not np.allclose(m, m.T, atol=tol, rtol=0.0):
        raise GraphCorrError(f"{name} must be symmetric")
    return m


def as_adjacency(m: np.ndarray) -> np.ndarray:
    """Validate a symmetric binary hollow matrix and return it read-only."""
    m = _check_square_symmetric(m, "adjacency matrix")
    if np.any(np.diag(m) != 0):
        raise GraphCorrError("adjacency matrix must have a zero diagonal")
    if not np.all((m == 0) | (m == 1)):
        raise GraphCorrError("adjacency matrix entries must be 0 or 1")
    return _freeze(m)


def as_prob_matrix(m: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Validate a symmetric matrix of probabilities and return it read-only."""
    m = _check_square_symmetric(m, "probability matrix", tol=1e-10)
    if np.any(m < -tol) or np.any(m > 1 + tol):
        raise GraphCorrError("probability matrix entries must lie in [0, 1]")
    return _freeze(np.clip((m + m.T) / 2, 0.0, 1.0))


def as_corr_matrix(m: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Validate a symmetric hollow matrix of correlations, return read-only."""
    m = _check_square_symmetric(m, "correlation matrix", tol=1e-10)
    if np.any(np.abs(np.diag(m)) > tol):
        raise GraphCorrError("correlation matrix must have a zero diagonal")
    if np.any(np.abs(m) > 1 + tol):
        raise GraphCorrError("correlation matrix entries must lie in [-1, 1]")
    out = np.clip((m + m.T) / 2, -1.0, 1.0)
    np.fill_diagonal(out, 0.0)
    return _freeze(out)


@dataclass(frozen=True)
class GraphPair:
    """An ordered pair of simple graphs on a common vertex set."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a", as_adjacency(self.a))
        object.__setattr__(self, "b", as_adjacency(self.b))
        if self.a.shape[0] != self.b.shape[0]:
            raise DimensionMismatchError(
                f"graphs have {self.a.shape[0]} and {self.b.shape[0]} vertices"
            )

    @property
    def n(self) -> int:
        return self.a.shape[0]


def _check_same_n(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise DimensionMismatchError(f"matrix shapes differ: {a.shape} vs {b.shape}")


def union_indicator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Entrywise indicator of an edge present in either graph (binary OR)."""
    a = as_adjacency(a)
    b = as_adjacency(b)
    _check_same_n(a, b)
    return _freeze(np.minimum(a + b, 1.0))


def hadamard(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Entrywise product of two graphs (binary AND: the common edges)."""
    a = as_adjacency(a)
    b = as_adjacency(b)
    _check_same_n(a, b)
    return _freeze(a * b)


def abs_diff(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Entrywise absolute difference of two graphs (binary XOR)."""
    a = as_adjacency(a)
    b = as_adjacency(b)
    _check_same_n(a, b)
    return _freeze(np.abs(a - b))


def complement(a: np.ndarray) -> np.ndarray:
    """Complement graph: flip every off-diagonal entry, keep the diagonal zero."""
    a = as_adjacency(a)
    out = 1.0 - a
    np.fill_diagonal(out, 0.0)
    return _freeze(out)


def read_edge_list(path) -> np.ndarray:
    """Read a whitespace-separated ``u v`` edge list into an adjacency matrix.

    Vertices are 0-indexed.  An optional header line ``# n=<count>`` fixes the
    vertex count; otherwise it is ``max index + 1``.  Duplicate edges (in
    either orientation) are collapsed; self-loops are rejected.
    """
    edges = []
    n_header = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("n="):
                    try:
                        n_header = int(body[2:])
                    except ValueError:
                        raise EdgeListError(f"{path}:{lineno}: bad header {line!r}")
                continue
            parts = line.split()
            if len(parts) != 2:
                raise EdgeListError(f"{path}:{lineno}: expected 'u v', got {line!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise EdgeListError(f"{path}:{lineno}: non-integer vertex in {line!r}")
            if u < 0 or v < 0:
                raise EdgeListError(f"{path}:{lineno}: negative vertex index")
            if u == v:
                raise EdgeListError(f"{path}:{lineno}: self-loop at vertex {u}")
            edges.append((u, v))

    max_idx = max((max(u, v) for u, v in edges), default=-1)
    if n_header is not None:
        if max_idx >= n_header:
            raise EdgeListError(
                f"{path}: vertex index {max_idx} >= declared n={n_header}"
            )
        n = n_header
    else:
        n = max_idx + 1
    out = np.zeros((n, n))
    for u, v in edges:
        out[u, v] = 1.0
        out[v, u] = 1.0
    return as_adjacency(out)


def write_edge_list(graph: np.ndarray, path) -> None:
    """Write a graph as a sorted ``u v`` edge list with an ``# n=`` header."""
    graph = as_adjacency(graph)
    n = graph.shape[0]
    i, j = np.nonzero(np.triu(graph, 1))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# n={n}\n")
        for u, v in zip(i.tolist(), j.tolist()):
            fh.write(f"{u} {v}\n")


def write_matrix_csv(m: np.ndarray, path, fmt: str = "%.10g") -> None:
    """Export a full symmetric matrix as CSV, one row per line."""
    np.savetxt(path, np.asarray(m, dtype=np.float64), fmt=fmt, delimiter=",")


def read_matrix_csv(path) -> np.ndarray:
    """Read a matrix previously written by :func:`write_matrix_csv`."""
    return np.atleast_2d(np.loadtxt(path, delimiter=","))
