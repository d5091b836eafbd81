import numpy as np
import pytest
from scipy import stats

from mmshare.deployment import (
    Deployment,
    Position,
    deployment_dataframe,
    generate_deployment,
    sample_ppp,
)
from mmshare.exceptions import DegenerateTrial, NonPositiveParameter
from mmshare.scenario import ScenarioConfig, validate_config


@pytest.fixture(scope="module")
def default_scenario():
    return validate_config(ScenarioConfig())


def test_sample_ppp_zero_intensity_is_empty():
    points = sample_ppp(0.0, 1000.0, np.random.default_rng(0))
    assert points.shape == (0, 3)


def test_sample_ppp_points_inside_square():
    points = sample_ppp(500.0, 200.0, np.random.default_rng(1), height_m=10.0)

    assert np.all(np.abs(points[:, :2]) <= 100.0)
    assert np.all(points[:, 2] == 10.0)


def test_sample_ppp_rejects_bad_arguments():
    rng = np.random.default_rng(0)
    with pytest.raises(NonPositiveParameter):
        sample_ppp(-1.0, 1000.0, rng)
    with pytest.raises(NonPositiveParameter):
        sample_ppp(1.0, 0.0, rng)


def test_sample_ppp_count_is_poisson():
    rng = np.random.default_rng(2024)
    counts = np.array([len(sample_ppp(75.0, 1000.0, rng)) for _ in range(10 ** 5)])

    assert counts.mean() == pytest.approx(75.0, abs=0.2)

    # bins: <= 55, each value 56..94, >= 95
    lo, hi = 55, 95
    observed = [np.sum(counts <= lo)]
    observed += [np.sum(counts == k) for k in range(lo + 1, hi)]
    observed += [np.sum(counts >= hi)]
    probabilities = [stats.poisson.cdf(lo, 75.0)]
    probabilities += [stats.poisson.pmf(k, 75.0) for k in range(lo + 1, hi)]
    probabilities += [stats.poisson.sf(hi - 1, 75.0)]
    expected = np.array(probabilities) / np.sum(probabilities) * counts.size

    _, p_value = stats.chisquare(observed, expected)
    assert p_value > 0.01


def test_sample_ppp_marginals_are_uniform():
    points = sample_ppp(1.0e5, 1000.0, np.random.default_rng(7))
    assert len(points) > 9 * 10 ** 4

    for axis in (0, 1):
        _, p_value = stats.kstest(points[:, axis], "uniform", args=(-500.0, 1000.0))
        assert p_value > 0.01


def test_generate_deployment_structure(default_scenario):
    deployment = generate_deployment(default_scenario, np.random.default_rng(3))

    assert isinstance(deployment, Deployment)
    assert deployment.num_operators == 5
    assert len(deployment.ue_positions) == 5
    assert len(deployment.gnb_orientations) == 5
    for m in range(5):
        assert len(deployment.gnb_orientations[m]) == len(deployment.gnb_positions[m])
        assert np.all(deployment.gnb_positions[m][:, 2] == 10.0)
        assert np.all(np.abs(deployment.gnb_orientations[m]) <= np.pi)


def test_typical_ue_is_at_the_centre(default_scenario):
    for seed in range(5):
        deployment = generate_deployment(default_scenario, np.random.default_rng(seed))
        assert deployment.typical_ue == Position(0.0, 0.0, 1.5)
        assert deployment.typical_operator_index == 0
        last = deployment.ue_positions[0][deployment.typical_ue_index]
        assert tuple(last) == (0.0, 0.0, 1.5)


def test_generate_deployment_is_deterministic(default_scenario):
    a = generate_deployment(default_scenario, np.random.default_rng(11))
    b = generate_deployment(default_scenario, np.random.default_rng(11))

    for m in range(5):
        assert np.array_equal(a.gnb_positions[m], b.gnb_positions[m])
        assert np.array_equal(a.ue_positions[m], b.ue_positions[m])
        assert np.array_equal(a.gnb_orientations[m], b.gnb_orientations[m])


def test_mean_counts(default_scenario):
    rng = np.random.default_rng(5)
    gnb_counts, ue_counts = [], []
    for _ in range(400):
        deployment = generate_deployment(default_scenario, rng)
        gnb_counts.append([len(g) for g in deployment.gnb_positions])
        ue_counts.append([len(u) for u in deployment.ue_positions])

    assert np.mean(gnb_counts) == pytest.approx(75.0, abs=1.5)
    # operator 0 also holds the typical UE
    assert np.mean(np.array(ue_counts)[:, 1:]) == pytest.approx(100.0, abs=1.5)
    assert np.mean(np.array(ue_counts)[:, 0]) == pytest.approx(101.0, abs=2.5)


def test_operators_are_independent():
    scenario = validate_config(ScenarioConfig(area_side_m=500.0))
    rng = np.random.default_rng(99)
    counts = []
    for _ in range(50000):
        deployment = generate_deployment(scenario, rng)
        counts.append((len(deployment.gnb_positions[0]), len(deployment.gnb_positions[1]),
                       len(deployment.ue_positions[0]), len(deployment.ue_positions[1])))
    counts = np.array(counts, dtype=float)
    corr = np.corrcoef(counts.T)

    assert abs(corr[0, 1]) < 0.02
    assert abs(corr[0, 3]) < 0.02
    assert abs(corr[2, 3]) < 0.02


def test_degenerate_trial():
    scenario = validate_config(ScenarioConfig(gnb_density_per_km2=1e-9))
    with pytest.raises(DegenerateTrial):
        generate_deployment(scenario, np.random.default_rng(0))


def test_deployment_dataframe(default_scenario):
    deployment = generate_deployment(default_scenario, np.random.default_rng(4))
    df = deployment_dataframe(deployment, trial_index=3)

    assert list(df.columns) == ["trial", "operator", "node_type", "x_m", "y_m", "z_m"]
    assert (df["trial"] == 3).all()
    assert (df["node_type"] == "typical").sum() == 1
    typical = df[df["node_type"] == "typical"].iloc[0]
    assert (typical["operator"], typical["x_m"], typical["y_m"]) == (0, 0.0, 0.0)
    n_nodes = sum(len(g) + len(u) for g, u in zip(deployment.gnb_positions,
                                                  deployment.ue_positions))
    assert len(df) == n_nodes


def test_position_lists(default_scenario):
    deployment = generate_deployment(default_scenario, np.random.default_rng(8))
    gnbs = deployment.gnb_list(2)

    assert all(isinstance(p, Position) for p in gnbs)
    assert len(gnbs) == len(deployment.gnb_positions[2])
    assert deployment.ue_list(0)[-1] == deployment.typical_ue
