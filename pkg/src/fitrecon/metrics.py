"""Density, nearest-neighbour degree, clustering and rich-club coefficient.

Every kernel works on a real-valued symmetric matrix, so the same code gives
the exact value on a 0/1 adjacency matrix and the plug-in ensemble value when
fed link probabilities.
"""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Tuple

import numpy as np

from fitrecon.errors import ReconstructionError, RichClubUndefined
from fitrecon.graph import Graph

log = logging.getLogger(__name__)

PROPERTIES = ("density", "knn", "clustering", "rich_club")


@dataclass(frozen=True, eq=False)
class ProbabilityMatrix:
    """Symmetric matrix of independent link probabilities, zero diagonal.

    Entries equal to 1 are accepted so that a 0/1 adjacency matrix is a valid
    (degenerate) ensemble.
    """

    p: np.ndarray

    def __post_init__(self):
        p = np.array(self.p, dtype=float)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise ReconstructionError(f"probability matrix must be square, got shape {p.shape}")
        if not np.all(np.isfinite(p)) or np.any(p < 0) or np.any(p > 1):
            raise ReconstructionError("probabilities must lie in [0, 1]")
        if np.any(np.diag(p) != 0):
            raise ReconstructionError("probability matrix must have a zero diagonal")
        if not np.allclose(p, p.T, rtol=0, atol=1e-12):
            raise ReconstructionError("probability matrix must be symmetric")
        p = np.triu(p, 1)
        p = p + p.T
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    @property
    def n(self) -> int:
        return self.p.shape[0]

    @classmethod
    def from_graph(cls, g: Graph) -> "ProbabilityMatrix":
        return cls(g.adjacency.astype(float))


@dataclass(frozen=True)
class MetricsReport:
    density: Optional[float] = None
    knn: Optional[float] = None
    clustering: Optional[float] = None
    rich_club: Optional[float] = None
    knn_per_node: Optional[np.ndarray] = field(default=None, repr=False, compare=False)
    clustering_per_node: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def values(self) -> Dict[str, float]:
        """Scalar properties that were computed, in canonical order."""
        return {k: getattr(self, k) for k in PROPERTIES if getattr(self, k) is not None}


# --- kernels ---------------------------------------------------------------
# All accept (..., N, N) stacks except _rich_club, which takes one matrix.


def _density(a: np.ndarray) -> np.ndarray:
    n = a.shape[-1]
    return a.sum(axis=(-2, -1)) / (n * (n - 1))


def _knn_nodes(a: np.ndarray) -> np.ndarray:
    k = a.sum(axis=-1)
    num = np.einsum("...ij,...j->...i", a, k)
    out = np.zeros_like(k)
    np.divide(num, k, out=out, where=k > 0)
    return out


def _clustering_nodes(a: np.ndarray) -> np.ndarray:
    k = a.sum(axis=-1)
    tri = ((a @ a) * a).sum(axis=-1)
    wedges = k * k - (a * a).sum(axis=-1)
    out = np.zeros_like(k)
    np.divide(tri, wedges, out=out, where=wedges > 0)
    return out


def _rich_club(a: np.ndarray, d: float) -> float:
    if d >= 1.0:
        raise RichClubUndefined("rich-club undefined at D=1 (complete graph)")
    n = a.shape[0]
    deg = a.sum(axis=1)
    values, counts = np.unique(deg, return_counts=True)

    # Nodes sorted by decreasing degree: every {i : k_i > k} is a prefix.
    order = np.argsort(-deg, kind="stable")
    q = a[np.ix_(order, order)]
    prefix_mass = np.concatenate(([0.0], 2.0 * np.cumsum(np.tril(q, -1).sum(axis=1))))
    sorted_deg = deg[order]
    # number of nodes with degree strictly greater than each value
    above = np.searchsorted(-sorted_deg, -values, side="left")

    phi = 0.0
    for m, c in zip(above, counts):
        psi = prefix_mass[m] / (m * (m - 1)) if m >= 2 else 0.0
        phi += (c / n) * (psi - d) / (1.0 - d)
    return float(phi)


def _as_matrix(g) -> np.ndarray:
    if isinstance(g, Graph):
        return g.adjacency.astype(float)
    if isinstance(g, ProbabilityMatrix):
        return g.p
    return np.asarray(g, dtype=float)


def _need(n: int, at_least: int, what: str):
    if n < at_least:
        raise ReconstructionError(f"{what} requires N >= {at_least}, got N = {n}")


# --- exact metrics on a Graph ----------------------------------------------


def density(g: Graph) -> float:
    _need(g.n, 2, "density")
    return float(_density(_as_matrix(g)))


def avg_nn_degree(g: Graph) -> float:
    """Mean over all nodes of the average neighbour degree (isolated nodes count as 0)."""
    _need(g.n, 2, "avg_nn_degree")
    return float(_knn_nodes(_as_matrix(g)).mean())


def mean_clustering(g: Graph) -> float:
    """Mean local clustering; nodes with fewer than two neighbours contribute 0."""
    _need(g.n, 3, "mean_clustering")
    return float(_clustering_nodes(_as_matrix(g)).mean())


def rich_club(g: Graph) -> float:
    """Degree-distribution-weighted normalised rich-club coefficient.

    For each degree value k present, psi(k) is the edge density among nodes
    of degree strictly greater than k (0 when fewer than two such nodes), and
    phi(k) = (psi(k) - D) / (1 - D).
    """
    _need(g.n, 2, "rich_club")
    a = _as_matrix(g)
    return _rich_club(a, float(_density(a)))


def _report(a: np.ndarray, properties: Iterable[str]) -> MetricsReport:
    properties = _check_properties(properties)
    out = {}
    d = float(_density(a))
    if "density" in properties:
        out["density"] = d
    if "knn" in properties:
        knn = _knn_nodes(a)
        out["knn"] = float(knn.mean())
        out["knn_per_node"] = knn
    if "clustering" in properties:
        c = _clustering_nodes(a)
        out["clustering"] = float(c.mean())
        out["clustering_per_node"] = c
    if "rich_club" in properties:
        out["rich_club"] = _rich_club(a, d)
    return MetricsReport(**out)


def _check_properties(properties) -> Tuple[str, ...]:
    properties = tuple(properties)
    unknown = [p for p in properties if p not in PROPERTIES]
    if unknown:
        raise ReconstructionError(f"unknown properties {unknown}; choose from {list(PROPERTIES)}")
    return properties


def exact_metrics(g: Graph, properties: Iterable[str] = PROPERTIES) -> MetricsReport:
    _need(g.n, 3, "exact_metrics")
    return _report(_as_matrix(g), properties)


def expected_metrics(p: ProbabilityMatrix, properties: Iterable[str] = PROPERTIES) -> MetricsReport:
    """Plug-in ensemble values: each formula evaluated with a_ij -> p_ij.

    Exact for density (linear in the adjacency matrix); a ratio-of-expectations
    approximation for the others. Rich-club thresholds run over the distinct
    expected degrees.
    """
    if not isinstance(p, ProbabilityMatrix):
        p = ProbabilityMatrix(p)
    _need(p.n, 3, "expected_metrics")
    return _report(p.p, properties)


# --- Monte Carlo -------------------------------------------------------------


def _block_size(n: int) -> int:
    return int(max(1, min(256, (1 << 21) // (n * n))))


def _sample_block(p_upper: np.ndarray, iu, n: int, size: int, rng: np.random.Generator) -> np.ndarray:
    links = rng.random((size, p_upper.size)) < p_upper
    a = np.zeros((size, n, n))
    a[:, iu[0], iu[1]] = links
    a += a.transpose(0, 2, 1)
    return a


def _block_values(a: np.ndarray, properties) -> Dict[str, np.ndarray]:
    out = {}
    d = _density(a)
    if "density" in properties:
        out["density"] = d
    if "knn" in properties:
        out["knn"] = _knn_nodes(a).mean(axis=-1)
    if "clustering" in properties:
        out["clustering"] = _clustering_nodes(a).mean(axis=-1)
    if "rich_club" in properties:
        rc = np.full(a.shape[0], np.nan)
        for s in range(a.shape[0]):
            if d[s] < 1.0:
                rc[s] = _rich_club(a[s], float(d[s]))
        out["rich_club"] = rc
    return out


def monte_carlo_metrics(
    p: ProbabilityMatrix,
    samples: int,
    seed: int,
    properties: Iterable[str] = PROPERTIES,
    workers: int = 1,
) -> Dict[str, Tuple[float, float]]:
    """Sample mean and standard deviation (ddof=1) of exact metrics over
    independent draws from the ensemble.

    Draws are organised in fixed-size blocks, each with its own seed stream
    derived from ``(seed, block index)``; per-sample values are reduced in
    sample order, so the output does not depend on ``workers``. Samples that
    are complete graphs are dropped from the rich-club statistics.
    """
    if samples < 2:
        raise ReconstructionError("monte_carlo_metrics requires samples >= 2")
    if not isinstance(p, ProbabilityMatrix):
        p = ProbabilityMatrix(p)
    properties = _check_properties(properties)
    n = p.n
    _need(n, 3, "monte_carlo_metrics")
    iu = np.triu_indices(n, 1)
    p_upper = p.p[iu]
    bs = _block_size(n)
    blocks = [(b, min(bs, samples - b * bs)) for b in range(-(-samples // bs))]
    root = np.random.SeedSequence(seed)

    def run(block):
        b, size = block
        rng = np.random.default_rng(np.random.SeedSequence(root.entropy, spawn_key=(b,)))
        return _block_values(_sample_block(p_upper, iu, n, size, rng), properties)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, blocks))
    else:
        parts = [run(b) for b in blocks]

    out = {}
    for prop in properties:
        v = np.concatenate([part[prop] for part in parts])
        if prop == "rich_club":
            dropped = int(np.isnan(v).sum())
            if dropped:
                log.info("rich-club: %d of %d samples were complete graphs and were skipped", dropped, v.size)
            v = v[~np.isnan(v)]
            if v.size < 2:
                raise RichClubUndefined("rich-club undefined at D=1 in (almost) every sample")
        # shifting by the first value keeps a constant sample at exactly zero spread
        shifted = v - v[0]
        out[prop] = (float(v[0] + shifted.mean()), float(shifted.std(ddof=1)))
    return out
