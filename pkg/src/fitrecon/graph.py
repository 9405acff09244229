"""Graph containers, binarisation of weighted data and degree bookkeeping."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from fitrecon.errors import ReconstructionError


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class WeightedDigraph:
    """Directed network with nonnegative weights ``w[i, j]`` (flow i -> j).

    The diagonal is zeroed on construction; self-flows carry no information
    for any downstream operation.
    """

    weights: np.ndarray
    labels: Optional[tuple] = None

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1] or w.shape[0] < 1:
            raise ReconstructionError(f"weights must be a square N x N matrix with N >= 1, got shape {w.shape}")
        if not np.all(np.isfinite(w)):
            raise ReconstructionError("weights must be finite")
        if np.any(w < 0):
            i, j = np.argwhere(w < 0)[0]
            raise ReconstructionError(f"negative weight w[{i},{j}] = {w[i, j]}")
        w = w.copy()
        np.fill_diagonal(w, 0.0)
        object.__setattr__(self, "weights", _frozen(w))
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != w.shape[0]:
                raise ReconstructionError("labels length does not match node count")
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.weights.shape[0]


@dataclass(frozen=True, eq=False)
class Graph:
    """Binary undirected simple graph backed by a dense adjacency matrix."""

    adjacency: np.ndarray
    labels: Optional[tuple] = None
    degrees: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        a = np.asarray(self.adjacency)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ReconstructionError(f"adjacency must be square, got shape {a.shape}")
        if not ((a == 0) | (a == 1)).all():
            raise ReconstructionError("adjacency entries must be 0 or 1")
        a = a.astype(np.int8)
        if np.any(np.diag(a)):
            raise ReconstructionError("adjacency must have a zero diagonal")
        if not np.array_equal(a, a.T):
            raise ReconstructionError("adjacency must be symmetric")
        object.__setattr__(self, "adjacency", _frozen(a))
        object.__setattr__(self, "degrees", _frozen(a.sum(axis=1, dtype=np.int64)))
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != a.shape[0]:
                raise ReconstructionError("labels length does not match node count")
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]

    @property
    def n_edges(self) -> int:
        return int(self.degrees.sum()) // 2

    @classmethod
    def from_edges(cls, n: int, edges, labels=None) -> "Graph":
        a = np.zeros((n, n), dtype=np.int8)
        for i, j in edges:
            if i != j:
                a[i, j] = a[j, i] = 1
        return cls(a, labels)

    def edges(self):
        """Unordered edges ``(i, j)`` with ``i < j`` in row-major order."""
        iu, ju = np.nonzero(np.triu(self.adjacency, 1))
        return list(zip(iu.tolist(), ju.tolist()))

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return np.array_equal(self.adjacency, other.adjacency)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class FitnessVector:
    """Strictly positive per-node fitness values, optionally labelled.

    Behaves like a 1-d float array under ``np.asarray``.
    """

    values: np.ndarray
    labels: Optional[tuple] = None

    def __post_init__(self):
        y = np.asarray(self.values, dtype=float)
        if y.ndim != 1 or y.size < 1:
            raise ReconstructionError("fitness must be a non-empty 1-d vector")
        if not np.all(np.isfinite(y)):
            raise ReconstructionError("fitness values must be finite")
        bad = np.flatnonzero(y <= 0)
        if bad.size:
            names = [self.labels[i] if self.labels is not None else int(i) for i in bad[:10]]
            raise ReconstructionError(
                f"fitness must be strictly positive; nonpositive at nodes {names} "
                "(prune zero-fitness nodes before reconstruction)"
            )
        object.__setattr__(self, "values", _frozen(y))
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != y.size:
                raise ReconstructionError("labels length does not match fitness length")
            object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return self.values.size

    def __len__(self):
        return self.values.size

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


def as_fitness(y) -> np.ndarray:
    """Validate fitness input (array-like or FitnessVector) and return it as an array."""
    if isinstance(y, FitnessVector):
        return y.values
    return FitnessVector(y).values


def binarize(g: WeightedDigraph) -> Graph:
    """Undirected binary projection: ``a_ij = 1`` iff ``w_ij + w_ji > 0``."""
    w = g.weights
    a = ((w + w.T) > 0).astype(np.int8)
    np.fill_diagonal(a, 0)
    return Graph(a, g.labels)


def strengths(g: WeightedDigraph, kind: str = "out") -> FitnessVector:
    """Node strengths used as fitness.

    ``kind="out"`` gives row sums (total export / lending); ``kind="total"``
    adds the column sums as well.
    """
    w = g.weights
    if kind == "out":
        s = w.sum(axis=1)
    elif kind == "total":
        s = w.sum(axis=1) + w.sum(axis=0)
    else:
        raise ReconstructionError(f"unknown strength kind {kind!r}; use 'out' or 'total'")
    zero = np.flatnonzero(s <= 0)
    if zero.size:
        names = [g.labels[i] if g.labels is not None else int(i) for i in zero]
        raise ReconstructionError(
            f"zero {kind}-strength at nodes {names}; prune them before reconstruction"
        )
    return FitnessVector(s, g.labels)


def degrees(g: Graph) -> np.ndarray:
    return g.degrees.copy()

