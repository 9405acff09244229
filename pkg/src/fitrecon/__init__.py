"""Reconstruction of global network properties from node fitnesses and a
partial degree sequence, via a fitness-calibrated exponential random graph
ensemble."""

from fitrecon.graph import (
    FitnessVector,
    Graph,
    WeightedDigraph,
    binarize,
    degrees,
    strengths,
)
from fitrecon.metrics import (
    MetricsReport,
    ProbabilityMatrix,
    avg_nn_degree,
    density,
    exact_metrics,
    expected_metrics,
    mean_clustering,
    monte_carlo_metrics,
    rich_club,
)
from fitrecon.ensemble import (
    ConfigurationModelFit,
    FitnessEnsemble,
    calibrate_z,
    expected_degrees,
    fit_configuration_model,
    link_probability,
    probability_matrix,
    sample,
)
from fitrecon.bootstrap import (
    PartialObservation,
    ReconstructionEstimate,
    analytic_density_std,
    reconstruct,
)
from fitrecon.bench import (
    BenchmarkConfig,
    BenchmarkResult,
    rrmse,
    run_real_benchmark,
    run_synthetic_benchmark,
)

__version__ = "0.1.0"
