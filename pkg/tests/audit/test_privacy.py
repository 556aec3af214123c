import numpy as np
import pytest

from src.audit.privacy import (
    check_view_uniformity,
    collect_views,
    compare_with_simulator,
    simulate_server_views,
    views_from_sessions,
)
from src.audit.schemas import ViewSet
from src.exceptions import DimensionMismatch, InsufficientTrials
from src.eyegen.datasets import generate_dataset
from src.eyegen.schemas import EyeModelParams
from src.ring.arithmetic import FixedPointCodec
from src.transport.session import local_configs, run_session_sync


@pytest.fixture(scope="module")
def one_sample_each():
    features, _ = generate_dataset(2, EyeModelParams(seed=11))
    return features[:, :1], features[:, 1:]


@pytest.fixture(scope="module")
def real_views(one_sample_each):
    return collect_views(*one_sample_each, trials=10_000, seed=1)


def test_server_view_looks_uniform(real_views):
    server, _ = real_views
    assert set(server.shares) == {"C1", "C3", "C2", "C4"}
    report = check_view_uniformity(server)
    assert report.method == "chi-square"
    assert len(report.tests) == 8 * (36 + 1 + 36 + 1)
    assert report.pass_fraction >= 0.95 and not report.leak_detected


def test_bob_view_looks_uniform(real_views):
    _, bob = real_views
    report = check_view_uniformity(bob)
    assert report.owner == "bob"
    assert not report.leak_detected


def test_zeroed_masks_are_flagged(one_sample_each):
    alice_x, _ = one_sample_each
    server, _ = collect_views(*one_sample_each, trials=10_000, entropy="zero")
    # with no masking C1 is the encoded input itself
    expected = FixedPointCodec().encode_array(alice_x[:, 0])
    assert np.array_equal(server.shares["C1"][0], expected)
    report = check_view_uniformity(server)
    assert report.leak_detected
    assert report.failing()


def test_simulator_matches_real_views(one_sample_each, real_views):
    server, _ = real_views
    simulated = simulate_server_views(*one_sample_each, trials=10_000, seed=1)
    report = compare_with_simulator(server, simulated)
    assert report.method == "ks"
    assert report.pass_fraction >= 0.95


def test_simulator_needs_single_samples():
    x = np.ones((36, 2))
    with pytest.raises(DimensionMismatch):
        simulate_server_views(x, x, trials=10)


def test_too_few_trials(one_sample_each):
    server, _ = collect_views(*one_sample_each, trials=100)
    with pytest.raises(InsufficientTrials):
        check_view_uniformity(server)
    assert check_view_uniformity(server, min_trials=100).trials == 100


def test_views_from_recorded_sessions(toy_parties):
    results = [run_session_sync(*local_configs(*toy_parties, seed=s, entropy="seeded")) for s in range(3)]
    server, bob = views_from_sessions(results)
    assert server.trials == bob.trials == 3
    assert server.shares["C1"].shape == (3, 2)
    assert bob.shares["r3"].shape == (3, 1)


def test_view_set_coordinates():
    views = ViewSet(owner="bob", shares={"r1": np.zeros((4, 2), dtype=np.uint64), "r3": np.zeros((4, 1), dtype=np.uint64)})
    assert [(name, col) for name, col, _ in views.coordinates()] == [("r1", 0), ("r1", 1), ("r3", 0)]
