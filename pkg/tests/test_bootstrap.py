import math

import numpy as np
import pytest

from fitrecon.bootstrap import PartialObservation, analytic_density_std, reconstruct
from fitrecon.ensemble import FitnessEnsemble, calibration_tolerance, expected_degrees, probability_matrix, sample
from fitrecon.errors import DegenerateTargetError, ReconstructionError
from fitrecon.metrics import ProbabilityMatrix, expected_metrics, monte_carlo_metrics


def by_name(estimates):
    return {e.property: e for e in estimates}


def test_full_observation_of_sampled_graph():
    rng = np.random.default_rng(21)
    y = rng.lognormal(0, 1, 60)
    g0 = sample(FitnessEnsemble(y, 0.2), 5)
    obs = PartialObservation.from_graph(g0, np.arange(60))
    est = by_name(reconstruct(y, obs))
    z = est["density"].z
    k = expected_degrees(FitnessEnsemble(y, z))
    assert abs(k.sum() - g0.degrees.sum()) <= calibration_tolerance(g0.degrees.sum())
    p = probability_matrix(FitnessEnsemble(y, z)).p
    assert est["density"].mean == pytest.approx(p.sum() / (60 * 59), abs=1e-15)


def test_homogeneous_single_node():
    obs = PartialObservation([2], [2])
    est = by_name(reconstruct(np.ones(5), obs, mode="analytic"))
    assert est["density"].z == pytest.approx(1.0, abs=1e-9)
    assert est["density"].mean == pytest.approx(0.5, abs=1e-9)
    assert est["density"].std == pytest.approx(2 * math.sqrt(10 * 0.25) / 20, abs=1e-9)
    assert round(est["density"].std, 3) == 0.158
    assert est["density"].method == "analytic-plugin"
    assert est["density"].samples == 0
    assert est["knn"].std is None


def test_monte_carlo_at_empty_limit_has_zero_spread():
    # target far below one link: every sample is the empty graph
    obs = PartialObservation([0], [1e-13])
    for e in reconstruct(np.ones(6), obs, mode="mc", samples=50, seed=1):
        assert e.std == 0.0
        assert e.method == "monte-carlo"
        assert e.samples == 50


def test_monte_carlo_at_saturation_limit_has_zero_spread():
    obs = PartialObservation([0], [5 - 1e-11])
    est = reconstruct(np.ones(6), obs, ["density", "knn", "clustering"], mode="mc", samples=50, seed=1)
    assert [e.std for e in est] == [0.0, 0.0, 0.0]
    assert by_name(est)["density"].mean == 1.0


def test_monte_carlo_deterministic_per_seed():
    y = np.linspace(0.5, 3, 15)
    obs = PartialObservation([1, 4, 8], [3, 4, 6])
    a = reconstruct(y, obs, mode="mc", samples=200, seed=9)
    b = reconstruct(y, obs, mode="mc", samples=200, seed=9)
    assert a == b


def test_analytic_and_monte_carlo_density_agree():
    y = np.random.default_rng(2).lognormal(0, 1, 20)
    obs = PartialObservation([0, 5, 11], [4, 7, 2])
    s = 10_000
    ana = by_name(reconstruct(y, obs, ["density"]))["density"]
    mc = by_name(reconstruct(y, obs, ["density"], mode="mc", samples=s, seed=3))["density"]
    assert abs(ana.mean - mc.mean) < 4 * mc.std / math.sqrt(s)


def test_hybrid_mode():
    y = np.linspace(0.5, 3, 12)
    obs = PartialObservation([1, 4], [3, 6])
    est = by_name(reconstruct(y, obs, mode="hybrid", samples=100, seed=0))
    plug = expected_metrics(probability_matrix(FitnessEnsemble(y, est["knn"].z)))
    assert est["knn"].mean == plug.knn
    assert est["knn"].method == "hybrid" and est["knn"].std > 0
    assert est["density"].method == "analytic-plugin"


def test_relabeling_invariance():
    rng = np.random.default_rng(13)
    y = rng.lognormal(0, 1, 25)
    subset, k = np.array([2, 7, 11, 20]), np.array([5, 9, 3, 12])
    perm = rng.permutation(25)
    inverse = np.argsort(perm)
    base = reconstruct(y, PartialObservation(subset, k))
    moved = reconstruct(y[perm], PartialObservation(inverse[subset], k))
    for a, b in zip(base, moved):
        assert a.mean == pytest.approx(b.mean, rel=1e-9)
        assert a.z == pytest.approx(b.z, rel=1e-10)


def test_unknown_property_rejected():
    with pytest.raises(ReconstructionError, match="unknown"):
        reconstruct([1, 2, 3], PartialObservation([0], [1]), ["betweenness"])


def test_unknown_mode_rejected():
    with pytest.raises(ReconstructionError):
        reconstruct([1, 2, 3], PartialObservation([0], [1]), mode="exact")


def test_calibration_errors_propagate():
    with pytest.raises(DegenerateTargetError):
        reconstruct([1, 2, 3], PartialObservation([0, 1], [0, 0]))


def test_observation_validation():
    with pytest.raises(ReconstructionError):
        PartialObservation([0, 0], [1, 1])
    with pytest.raises(ReconstructionError):
        PartialObservation([0], [-1])
    with pytest.raises(ReconstructionError):
        reconstruct([1, 2, 3], PartialObservation([0], [3]))


class TestAnalyticDensityStd:
    def test_zero_one(self):
        a = np.ones((4, 4)) - np.eye(4)
        a[0, 1] = a[1, 0] = 0
        assert analytic_density_std(ProbabilityMatrix(a)) == 0.0

    def test_uniform_half(self):
        p = np.full((5, 5), 0.5)
        np.fill_diagonal(p, 0)
        assert analytic_density_std(ProbabilityMatrix(p)) == pytest.approx(2 * math.sqrt(2.5) / 20, abs=1e-15)

    def test_matches_monte_carlo(self):
        p = probability_matrix(FitnessEnsemble(np.random.default_rng(4).lognormal(0, 1, 10), 0.4))
        _, mc_std = monte_carlo_metrics(p, 100_000, 17, ["density"])["density"]
        assert mc_std == pytest.approx(analytic_density_std(p), rel=0.05)


def test_default_mode_is_hybrid():
    est = by_name(reconstruct(np.ones(6), PartialObservation([0], [3]), samples=20))
    assert est["density"].method == "analytic-plugin"
    assert {est[k].method for k in ("knn", "clustering", "rich_club")} == {"hybrid"}
