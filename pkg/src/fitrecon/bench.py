"""Error-versus-information benchmark: rRMSE of subset-calibrated estimates.

For each subset size n, M random subsets I_alpha are drawn; each calibrates
its own z_alpha from the hidden graph's degrees on I_alpha, and the property
estimate X_alpha is compared to a reference X_0 through

    r_X = sqrt(mean_alpha (X_alpha / X_0 - 1)^2).

Flavors: ``r0`` (reference measured on the synthetic sample G0), ``rOmega0``
(reference = plug-in value on the full-information ensemble), ``rR``
(reference measured on a real graph).
"""
from __future__ import annotations

import io
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from fitrecon.ensemble import FitnessEnsemble, calibrate_z, probability_matrix, sample
from fitrecon.errors import (
    DegenerateTargetError,
    InfeasibleDegreeSumError,
    ReconstructionError,
    RichClubUndefined,
)
from fitrecon.graph import Graph, as_fitness
from fitrecon.metrics import (
    PROPERTIES,
    ProbabilityMatrix,
    _check_properties,
    exact_metrics,
    expected_metrics,
    monte_carlo_metrics,
)

log = logging.getLogger(__name__)

FLAVORS = ("r0", "rOmega0", "rR")
CSV_HEADER = "property,n,flavor,rrmse,M,seed"


def rrmse(estimates: Sequence[float], reference: float) -> float:
    """Relative root-mean-square error of ``estimates`` against ``reference``."""
    x = np.asarray(estimates, dtype=float).reshape(-1)
    if x.size < 1:
        raise ReconstructionError("rRMSE needs at least one estimate")
    if reference == 0:
        raise ReconstructionError("reference vanishes; rRMSE undefined")
    return float(np.sqrt(np.mean((x / reference - 1.0) ** 2)))


@dataclass(frozen=True)
class BenchmarkConfig:
    """Settings for one benchmark run.

    ``n_values`` entries are subset sizes; floats in (0, 1) are read as
    fractions of N (rounded, at least 1). ``estimator`` selects plug-in
    ensemble values or Monte Carlo means (``samples`` draws) for X_alpha.
    """

    n_values: Tuple = (0.05, 0.1, 0.25, 0.5, 1.0)
    subsets: int = 100
    samples: int = 1000
    seed: int = 0
    mode: str = "synthetic"
    properties: Tuple[str, ...] = PROPERTIES
    target_density: float = 0.5
    estimator: str = "plugin"
    workers: int = 1

    def __post_init__(self):
        object.__setattr__(self, "n_values", tuple(self.n_values))
        object.__setattr__(self, "properties", tuple(self.properties))
        problems = self.violations()
        if problems:
            raise ReconstructionError("; ".join(problems))

    def violations(self) -> List[str]:
        out = []
        if not self.n_values:
            out.append("n_values must not be empty")
        for v in self.n_values:
            if isinstance(v, float) and not v.is_integer():
                if not 0 < v < 1:
                    out.append(f"fractional subset size {v} must lie in (0, 1)")
            elif v < 1:
                out.append(f"subset size {v} must be >= 1")
        if self.subsets < 1:
            out.append("subsets (M) must be >= 1")
        if self.estimator not in ("plugin", "mc"):
            out.append(f"estimator must be 'plugin' or 'mc', got {self.estimator!r}")
        if self.estimator == "mc" and self.samples < 2:
            out.append("samples must be >= 2 for the Monte Carlo estimator")
        if self.mode not in ("synthetic", "real"):
            out.append(f"mode must be 'synthetic' or 'real', got {self.mode!r}")
        if self.mode == "synthetic" and not 0 < self.target_density < 1:
            out.append(f"target_density must lie in (0, 1), got {self.target_density}")
        if self.workers < 1:
            out.append("workers must be >= 1")
        unknown = [p for p in self.properties if p not in PROPERTIES]
        if unknown:
            out.append(f"unknown properties {unknown}")
        return out

    def resolve_n(self, n_nodes: int) -> Tuple[int, ...]:
        out = []
        for v in self.n_values:
            if isinstance(v, float) and not v.is_integer():
                n = max(1, int(round(v * n_nodes)))
            elif v == 1.0 and isinstance(v, float):
                n = n_nodes
            else:
                n = int(v)
            if n > n_nodes:
                raise ReconstructionError(f"subset size {n} exceeds N = {n_nodes}")
            out.append(n)
        return tuple(out)


@dataclass
class BenchmarkResult:
    config: BenchmarkConfig
    n_nodes: int
    n_values: Tuple[int, ...]
    references: Dict[str, Dict[str, Optional[float]]]
    estimates: Dict[str, Dict[int, np.ndarray]]
    subset_z: Dict[int, np.ndarray]
    failures: Dict[int, int]
    rrmse: Dict[Tuple[str, int, str], float]
    z_generating: Optional[float] = None
    z0: Optional[float] = None

    def value(self, prop: str, n: int, flavor: str) -> float:
        return self.rrmse[(prop, n, flavor)]

    def curve(self, prop: str, flavor: str) -> np.ndarray:
        return np.array([self.rrmse.get((prop, n, flavor), math.nan) for n in self.n_values])

    def rows(self):
        """Long-form rows in deterministic (property, n, flavor) order."""
        for prop in self.config.properties:
            for n in self.n_values:
                for flavor in FLAVORS:
                    key = (prop, n, flavor)
                    if key in self.rrmse:
                        yield prop, n, flavor, self.rrmse[key]

    def to_csv(self) -> str:
        buf = io.StringIO(newline="")
        buf.write(CSV_HEADER + "\n")
        m, seed = self.config.subsets, self.config.seed
        for prop, n, flavor, r in self.rows():
            buf.write(f"{prop},{n},{flavor},{r!r},{m},{seed}\n")
        return buf.getvalue()

    def to_json(self) -> str:
        doc = {
            "config": asdict(self.config),
            "n_nodes": self.n_nodes,
            "n_values": list(self.n_values),
            "z_generating": self.z_generating,
            "z0": self.z0,
            "references": self.references,
            "failures": {str(n): c for n, c in self.failures.items()},
            "rrmse": [
                {"property": p, "n": n, "flavor": f, "rrmse": r, "M": self.config.subsets, "seed": self.config.seed}
                for p, n, f, r in self.rows()
            ],
            "estimates": {
                prop: {str(n): _nan_to_none(v.tolist()) for n, v in by_n.items()}
                for prop, by_n in self.estimates.items()
            },
            "subset_z": {str(n): _nan_to_none(v.tolist()) for n, v in self.subset_z.items()},
        }
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def _nan_to_none(values):
    return [None if (isinstance(v, float) and not math.isfinite(v)) else v for v in values]


def draw_subset(seed: int, n_nodes: int, n: int, alpha: int, attempt: int = 0) -> np.ndarray:
    """Uniform n-subset of range(n_nodes), seeded by (seed, n, alpha, attempt)."""
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(1, n, alpha, attempt)))
    return np.sort(rng.choice(n_nodes, size=n, replace=False))


def _graph_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0,)))


def _metric_values(p: ProbabilityMatrix, properties, estimator: str, samples: int, seed) -> Dict[str, float]:
    linear = [k for k in properties if k != "rich_club"]
    if estimator == "mc":
        try:
            mc = monte_carlo_metrics(p, samples, seed, properties)
        except RichClubUndefined:
            mc = monte_carlo_metrics(p, samples, seed, linear)
            mc["rich_club"] = (math.nan, math.nan)
        return {k: v[0] for k, v in mc.items()}
    out = dict(expected_metrics(p, linear).values())
    if "rich_club" in properties:
        try:
            out["rich_club"] = expected_metrics(p, ["rich_club"]).rich_club
        except RichClubUndefined:
            out["rich_club"] = math.nan
    return out


def _reference_values(report_fn, properties) -> Dict[str, Optional[float]]:
    linear = [k for k in properties if k != "rich_club"]
    out = dict(report_fn(linear).values())
    if "rich_club" in properties:
        try:
            out["rich_club"] = report_fn(["rich_club"]).rich_club
        except RichClubUndefined:
            log.warning("rich-club reference undefined at D=1; property skipped")
            out["rich_club"] = None
    return {k: out[k] for k in properties}


def _boundary_matrix(n: int, full: bool) -> ProbabilityMatrix:
    p = np.ones((n, n)) if full else np.zeros((n, n))
    np.fill_diagonal(p, 0.0)
    return ProbabilityMatrix(p)


def _run_cells(y: np.ndarray, k: np.ndarray, cfg: BenchmarkConfig, n_values):
    n_nodes = y.size
    max_failures = 10 * cfg.subsets
    props = cfg.properties
    # When the hidden graph is empty or complete, no subset is feasible; the
    # estimate is then the boundary ensemble itself.
    boundary = None
    if np.all(k == n_nodes - 1):
        boundary = (math.inf, _boundary_matrix(n_nodes, True))
    elif np.all(k == 0):
        boundary = (0.0, _boundary_matrix(n_nodes, False))
    if boundary is not None:
        log.warning("hidden graph is %s; using the boundary ensemble for every subset",
                    "complete" if boundary[0] else "empty")

    def cell(task):
        n, alpha = task
        if boundary is not None:
            z, p = boundary
            return _metric_values(p, props, cfg.estimator, cfg.samples, 0), z, 0
        failures = 0
        while True:
            subset = draw_subset(cfg.seed, n_nodes, n, alpha, failures)
            try:
                z = calibrate_z(y, subset, k[subset])
                break
            except (DegenerateTargetError, InfeasibleDegreeSumError):
                failures += 1
                if failures > max_failures:
                    raise ReconstructionError(
                        f"aborted: {failures} consecutive infeasible subsets at n = {n}"
                    )
        p = probability_matrix(FitnessEnsemble(y, z))
        mc_seed = np.random.SeedSequence(cfg.seed, spawn_key=(2, n, alpha))
        return _metric_values(p, props, cfg.estimator, cfg.samples, mc_seed.generate_state(1)[0]), z, failures

    tasks = [(n, a) for n in n_values for a in range(cfg.subsets)]
    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(cell, tasks))
    else:
        results = [cell(t) for t in tasks]

    estimates = {prop: {} for prop in props}
    subset_z, failures = {}, {}
    for idx, n in enumerate(n_values):
        chunk = results[idx * cfg.subsets:(idx + 1) * cfg.subsets]
        for prop in props:
            estimates[prop][n] = np.array([c[0][prop] for c in chunk])
        subset_z[n] = np.array([c[1] for c in chunk])
        failures[n] = int(sum(c[2] for c in chunk))
    return estimates, subset_z, failures


def _score(estimates, references, n_values, flavors):
    out = {}
    for flavor in flavors:
        for prop, ref in references[flavor].items():
            if ref is None or ref == 0:
                if ref == 0:
                    log.warning("%s reference for %s vanishes; rRMSE undefined, skipped", flavor, prop)
                continue
            for n in n_values:
                x = estimates[prop][n]
                x = x[np.isfinite(x)]
                if x.size:
                    out[(prop, n, flavor)] = rrmse(x, ref)
                else:
                    log.warning("no finite %s estimates at n = %d; skipped", prop, n)
    return out


def run_synthetic_benchmark(y, cfg: BenchmarkConfig) -> BenchmarkResult:
    """Synthetic protocol with a fitness-model ground truth.

    A generating coupling is fixed by the configured target density; G0 is
    sampled from it. The ensemble reference uses z0, calibrated on G0's full
    degree sequence, i.e. the estimate full information would produce.
    """
    y = as_fitness(y)
    _check_properties(cfg.properties)
    n_nodes = y.size
    n_values = cfg.resolve_n(n_nodes)
    target = np.full(n_nodes, cfg.target_density * (n_nodes - 1))
    all_nodes = np.arange(n_nodes)
    z_gen = calibrate_z(y, all_nodes, target)
    g0 = sample(FitnessEnsemble(y, z_gen), _graph_rng(cfg.seed))
    k = g0.degrees
    z0 = calibrate_z(y, all_nodes, k)
    p0 = probability_matrix(FitnessEnsemble(y, z0))

    references = {
        "r0": _reference_values(lambda props: exact_metrics(g0, props), cfg.properties),
        "rOmega0": _reference_values(lambda props: expected_metrics(p0, props), cfg.properties),
    }
    estimates, subset_z, failures = _run_cells(y, k, cfg, n_values)
    return BenchmarkResult(
        config=cfg,
        n_nodes=n_nodes,
        n_values=n_values,
        references=references,
        estimates=estimates,
        subset_z=subset_z,
        failures=failures,
        rrmse=_score(estimates, references, n_values, ("r0", "rOmega0")),
        z_generating=z_gen,
        z0=z0,
    )


def synthetic_graph(y, cfg: BenchmarkConfig) -> Graph:
    """The G0 that ``run_synthetic_benchmark`` draws for this config."""
    y = as_fitness(y)
    n_nodes = y.size
    z_gen = calibrate_z(y, np.arange(n_nodes), np.full(n_nodes, cfg.target_density * (n_nodes - 1)))
    return sample(FitnessEnsemble(y, z_gen), _graph_rng(cfg.seed))


def run_real_benchmark(g0: Graph, y, cfg: BenchmarkConfig) -> BenchmarkResult:
    """Same subset protocol with the reference measured on the given graph."""
    y = as_fitness(y)
    if g0.n != y.size:
        raise ReconstructionError(f"graph has {g0.n} nodes but fitness has {y.size}")
    _check_properties(cfg.properties)
    n_values = cfg.resolve_n(g0.n)
    references = {"rR": _reference_values(lambda props: exact_metrics(g0, props), cfg.properties)}
    estimates, subset_z, failures = _run_cells(y, g0.degrees, cfg, n_values)
    return BenchmarkResult(
        config=cfg,
        n_nodes=g0.n,
        n_values=n_values,
        references=references,
        estimates=estimates,
        subset_z=subset_z,
        failures=failures,
        rrmse=_score(estimates, references, n_values, ("rR",)),
    )
