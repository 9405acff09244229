"""Reconstruct network properties from fitnesses plus a partial degree sequence.

1. calibrate z so the subset's expected degree sum matches the observed one;
2. build the ensemble Omega(z) from the fitnesses;
3. report <X> +/- sigma_X over Omega(z), analytically or by sampling.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence

import numpy as np

from fitrecon.ensemble import FitnessEnsemble, calibrate_z, probability_matrix
from fitrecon.errors import ReconstructionError
from fitrecon.graph import Graph, as_fitness
from fitrecon.metrics import (
    PROPERTIES,
    ProbabilityMatrix,
    _check_properties,
    expected_metrics,
    monte_carlo_metrics,
)

MODES = ("analytic", "mc", "hybrid")
DEFAULT_SAMPLES = 1000


@dataclass(frozen=True, eq=False)
class PartialObservation:
    """Degrees k_i* known only on the node subset ``subset``."""

    subset: np.ndarray
    observed_degrees: np.ndarray

    def __post_init__(self):
        subset = np.asarray(self.subset, dtype=np.int64).reshape(-1)
        k = np.asarray(self.observed_degrees, dtype=float).reshape(-1)
        if subset.size != k.size:
            raise ReconstructionError("subset and observed degrees differ in length")
        if np.unique(subset).size != subset.size:
            raise ReconstructionError("subset indices must be distinct")
        if subset.size and subset.min() < 0:
            raise ReconstructionError("subset indices must be nonnegative")
        if np.any(k < 0):
            raise ReconstructionError("observed degrees must be nonnegative")
        subset.setflags(write=False)
        k.setflags(write=False)
        object.__setattr__(self, "subset", subset)
        object.__setattr__(self, "observed_degrees", k)

    @property
    def size(self) -> int:
        return self.subset.size

    def validate(self, n: int):
        if self.size and self.subset.max() >= n:
            raise ReconstructionError(f"subset index out of range for N = {n}")
        if np.any(self.observed_degrees > n - 1):
            raise ReconstructionError(f"observed degrees must not exceed N-1 = {n - 1}")

    @classmethod
    def from_graph(cls, g: Graph, subset: Sequence[int]) -> "PartialObservation":
        subset = np.asarray(subset, dtype=np.int64)
        return cls(subset, g.degrees[subset])


@dataclass(frozen=True)
class ReconstructionEstimate:
    property: str
    mean: float
    std: Optional[float]
    method: str
    samples: int
    z: float

    def as_dict(self) -> dict:
        return {
            "property": self.property,
            "mean": self.mean,
            "std": self.std,
            "method": self.method,
            "samples": self.samples,
            "z": self.z,
        }


def analytic_density_std(p: ProbabilityMatrix) -> float:
    """Standard deviation of D for independent Bernoulli links."""
    if not isinstance(p, ProbabilityMatrix):
        p = ProbabilityMatrix(p)
    n = p.n
    q = p.p[np.triu_indices(n, 1)]
    return 2.0 * math.sqrt(float(np.sum(q * (1.0 - q)))) / (n * (n - 1))


def reconstruct(
    y,
    obs: PartialObservation,
    properties: Iterable[str] = PROPERTIES,
    mode: str = "hybrid",
    samples: int = DEFAULT_SAMPLES,
    seed=0,
    workers: int = 1,
) -> List[ReconstructionEstimate]:
    """Estimate each requested property of the hidden graph.

    Modes:

    ``analytic``
        plug-in means for every property, closed-form sigma for density only.
    ``mc``
        sample mean and standard deviation over ``samples`` draws.
    ``hybrid``
        plug-in means, closed-form sigma for density, sampled sigma for the
        nonlinear properties.
    """
    y = as_fitness(y)
    properties = _check_properties(properties)
    if mode not in MODES:
        raise ReconstructionError(f"unknown mode {mode!r}; choose from {list(MODES)}")
    obs.validate(y.size)
    z = calibrate_z(y, obs.subset, obs.observed_degrees)
    p = probability_matrix(FitnessEnsemble(y, z))

    if mode == "mc":
        mc = monte_carlo_metrics(p, samples, seed, properties, workers)
        return [ReconstructionEstimate(k, mc[k][0], mc[k][1], "monte-carlo", samples, z) for k in properties]

    means = expected_metrics(p, properties).values()
    nonlinear = [k for k in properties if k != "density"]
    mc = {}
    if mode == "hybrid" and nonlinear:
        mc = monte_carlo_metrics(p, samples, seed, nonlinear, workers)
    out = []
    for k in properties:
        if k == "density":
            out.append(ReconstructionEstimate(k, means[k], analytic_density_std(p), "analytic-plugin", 0, z))
        elif mode == "hybrid":
            out.append(ReconstructionEstimate(k, means[k], mc[k][1], "hybrid", samples, z))
        else:
            out.append(ReconstructionEstimate(k, means[k], None, "analytic-plugin", 0, z))
    return out
