"""Fitness-induced exponential random graph ensemble.

Nodes carry fitnesses y_i; the ensemble links i and j independently with
probability ``z y_i y_j / (1 + z y_i y_j)``. The single coupling ``z`` is fixed
by matching the expected degree sum of an observed subset of nodes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Sequence

import numpy as np

from fitrecon.errors import (
    ConvergenceError,
    DegenerateTargetError,
    InfeasibleDegreeSumError,
    ReconstructionError,
)
from fitrecon.graph import Graph, as_fitness
from fitrecon.metrics import ProbabilityMatrix

# |log z| beyond this overflows double precision products
_LOG_Z_LIMIT = 700.0
_BRACKET_FACTOR = math.log(10.0)
_BISECTION_WIDTH = 1e-12


def _pair_probabilities(x: np.ndarray) -> np.ndarray:
    """x / (1 + x) with x = +inf mapped to 1."""
    with np.errstate(over="ignore", invalid="ignore"):
        p = x / (1.0 + x)
    return np.where(np.isinf(x), 1.0, p)


@dataclass(frozen=True, eq=False)
class FitnessEnsemble:
    y: np.ndarray
    z: float

    def __post_init__(self):
        object.__setattr__(self, "y", as_fitness(self.y))
        z = float(self.z)
        if not (z > 0 and math.isfinite(z)):
            raise ReconstructionError(f"coupling z must be positive and finite, got {self.z}")
        object.__setattr__(self, "z", z)

    @property
    def n(self) -> int:
        return self.y.size

    def link_probability(self, i: int, j: int) -> float:
        return link_probability(self, i, j)

    def probability_matrix(self) -> ProbabilityMatrix:
        return probability_matrix(self)

    def expected_degrees(self) -> np.ndarray:
        return expected_degrees(self)

    def sample(self, seed=None) -> Graph:
        return sample(self, seed)

    @cached_property
    def _upper(self) -> np.ndarray:
        return _matrix(self.y, self.z)[_triu(self.n)]


@lru_cache(maxsize=32)
def _triu(n: int):
    return np.triu_indices(n, 1)


def link_probability(e: FitnessEnsemble, i: int, j: int) -> float:
    if i == j:
        raise ReconstructionError("link probability undefined for i == j (no self-loops)")
    if not (0 <= i < e.n and 0 <= j < e.n):
        raise ReconstructionError(f"node index out of range for N = {e.n}")
    x = e.z * (e.y[i] * e.y[j])
    return float(_pair_probabilities(np.asarray(x)))


def _matrix(y: np.ndarray, z: float) -> np.ndarray:
    p = _pair_probabilities(z * np.multiply.outer(y, y))
    np.fill_diagonal(p, 0.0)
    return p


def probability_matrix(e: FitnessEnsemble) -> ProbabilityMatrix:
    return ProbabilityMatrix(_matrix(e.y, e.z))


def expected_degrees(e: FitnessEnsemble) -> np.ndarray:
    return _matrix(e.y, e.z).sum(axis=1)


def _subset_degree_sum(y: np.ndarray, subset: np.ndarray, log_z: float) -> float:
    x = math.exp(log_z) * np.multiply.outer(y[subset], y)
    p = _pair_probabilities(x)
    p[np.arange(subset.size), subset] = 0.0
    return float(p.sum())


def calibration_tolerance(target: float) -> float:
    return max(1e-9 * target, 1e-12)


def calibrate_z(y, subset: Sequence[int], observed: Sequence[float]) -> float:
    """Solve sum_{i in I} <k_i>(z) = sum_{i in I} k_i* for the coupling z.

    The left side grows strictly from 0 to |I| (N - 1) as z goes from 0 to
    infinity, so a geometric bracket (factor 10 from z = 1) followed by
    bisection in log z always converges. ``observed`` may be real-valued.
    """
    y = as_fitness(y)
    n = y.size
    subset = np.asarray(subset, dtype=np.int64).reshape(-1)
    observed = np.asarray(observed, dtype=float).reshape(-1)
    if subset.size == 0:
        raise ReconstructionError("calibration subset is empty")
    if subset.size != observed.size:
        raise ReconstructionError("subset and observed degrees differ in length")
    if np.unique(subset).size != subset.size:
        raise ReconstructionError("calibration subset contains repeated nodes")
    if subset.min() < 0 or subset.max() >= n:
        raise ReconstructionError(f"calibration subset has indices outside [0, {n})")
    if n < 2:
        raise ReconstructionError("calibration needs at least two nodes")

    target = float(observed.sum())
    saturation = float(subset.size * (n - 1))
    if target <= 0:
        raise DegenerateTargetError("degenerate: z=0 boundary (observed degree sum is zero)")
    if target >= saturation:
        raise InfeasibleDegreeSumError(
            f"infeasible degree sum {target:g} >= saturation {saturation:g} for |I| = {subset.size}"
        )

    def f(log_z):
        return _subset_degree_sum(y, subset, log_z) - target

    lo = hi = 0.0
    if f(0.0) < 0:
        while f(hi) < 0:
            lo, hi = hi, hi + _BRACKET_FACTOR
            if hi > _LOG_Z_LIMIT:
                raise AssertionError("calibration bracket escaped upward; fitness range too extreme")
    else:
        while f(lo) > 0:
            lo, hi = lo - _BRACKET_FACTOR, lo
            if lo < -_LOG_Z_LIMIT:
                raise AssertionError("calibration bracket escaped downward; fitness range too extreme")

    while hi - lo > _BISECTION_WIDTH:
        mid = 0.5 * (lo + hi)
        if f(mid) < 0:
            lo = mid
        else:
            hi = mid

    tol = calibration_tolerance(target)
    mid = 0.5 * (lo + hi)
    r = f(mid)
    while abs(r) > tol:
        if r < 0:
            lo = mid
        else:
            hi = mid
        nxt = 0.5 * (lo + hi)
        if nxt in (lo, hi):
            raise AssertionError(f"calibration residual {abs(r):.3e} stuck above tolerance {tol:.3e}")
        mid, r = nxt, f(nxt)
    return math.exp(mid)


def sample(e: FitnessEnsemble, seed=None) -> Graph:
    """Draw one graph: every unordered pair linked independently with p_ij."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    n = e.n
    iu = _triu(n)
    p = e._upper
    links = rng.random(p.size) < p
    a = np.zeros((n, n), dtype=np.int8)
    a[iu] = links
    a = a + a.T
    return Graph(a)


@dataclass(frozen=True, eq=False)
class ConfigurationModelFit:
    """Per-node factors x_i = exp(-theta_i) of the configuration model."""

    x: np.ndarray
    degrees: np.ndarray
    residual: float
    iterations: int

    def probability_matrix(self) -> ProbabilityMatrix:
        p = _pair_probabilities(np.multiply.outer(self.x, self.x))
        np.fill_diagonal(p, 0.0)
        return ProbabilityMatrix(p)

    def expected_degrees(self) -> np.ndarray:
        return self.probability_matrix().p.sum(axis=1)

    def scatter(self, y) -> np.ndarray:
        """(y_i, x_i) pairs as an N x 2 array."""
        y = np.asarray(y, dtype=float)
        if y.shape != self.x.shape:
            raise ReconstructionError("fitness vector does not match the fitted node count")
        return np.column_stack([y, self.x])


def fit_configuration_model(
    observed: Sequence[float],
    tolerance: float = 1e-8,
    max_iterations: int = 100_000,
) -> ConfigurationModelFit:
    """Maximum-likelihood configuration model for a full degree sequence.

    Gauss-Seidel fixed point x_i <- k_i / sum_{j != i} x_j / (1 + x_i x_j),
    started from x_i = k_i / sqrt(sum_j k_j), in fixed node order.
    """
    k = np.asarray(observed, dtype=float).reshape(-1)
    n = k.size
    if n < 2:
        raise ReconstructionError("configuration model needs at least two nodes")
    if np.any(k < 0) or np.any(k > n - 1):
        raise ReconstructionError(f"degrees must lie in [0, {n - 1}]")
    if not np.any(k > 0):
        raise ReconstructionError("degree sequence is all zero; multipliers are all zero")
    saturated = np.flatnonzero(k >= n - 1)
    if saturated.size:
        # a node linked to all others needs x_i = inf
        raise ConvergenceError(
            f"nodes {saturated.tolist()} have degree N-1; multipliers diverge", residual=math.inf, iterations=0
        )

    x = k / math.sqrt(k.sum())
    active = np.flatnonzero(k > 0)

    def residual():
        return float(np.max(np.abs(ConfigurationModelFit(x, k, 0.0, 0).expected_degrees() - k)))

    res = residual()
    it = 0
    while res > tolerance:
        if it >= max_iterations:
            raise ConvergenceError(
                f"configuration model did not converge: residual {res:.3e} after {it} sweeps",
                residual=res,
                iterations=it,
            )
        for i in active:
            others = x / (1.0 + x[i] * x)
            x[i] = k[i] / (others.sum() - others[i])
        it += 1
        res = residual()
    x = x.copy()
    x.setflags(write=False)
    return ConfigurationModelFit(x=x, degrees=k, residual=res, iterations=it)
