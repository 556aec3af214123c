import numpy as np
import pytest

from src.exceptions import OutOfRange
from src.eyegen.geometry import angles_to_gaze, landmarks, synthesize_sample, to_features
from src.eyegen.schemas import N_FEATURES, EyeModelParams

PARAMS = EyeModelParams()
# x-mirror: iris edge point k <-> (4 - k) mod 8, eyelid corners and arcs swap ends
IRIS_MIRROR = [(4 - k) % 8 for k in range(8)]
EYELID_MIRROR = [4, 3, 2, 1, 0, 7, 6, 5]


@pytest.mark.parametrize(
    "pitch, yaw, expected",
    [
        (0.0, 0.0, (0.0, 0.0, -1.0)),
        (np.deg2rad(30.0), 0.0, (0.0, -0.5, -0.8660254)),
    ],
)
def test_angles_to_gaze(pitch, yaw, expected):
    np.testing.assert_allclose(angles_to_gaze(pitch, yaw), expected, atol=1e-7)


def test_gaze_vectors_are_unit():
    rng = np.random.default_rng(0)
    g = angles_to_gaze(rng.uniform(-1, 1, 100), rng.uniform(-1, 1, 100))
    np.testing.assert_allclose(np.linalg.norm(g, axis=-1), 1.0)


def test_forward_gaze_is_centred_and_symmetric():
    sample = synthesize_sample(0.0, 0.0, PARAMS)
    assert sample.features.shape == (N_FEATURES,)
    np.testing.assert_allclose(sample.iris_center, 0.0, atol=1e-12)
    np.testing.assert_allclose(sample.eyeball_vector, 0.0, atol=1e-12)
    mirrored = sample.eyelid[EYELID_MIRROR] * [-1.0, 1.0]
    np.testing.assert_allclose(mirrored, sample.eyelid, atol=1e-12)


def test_opposite_yaw_mirrors_features():
    yaw = np.deg2rad(20.0)
    left = synthesize_sample(np.deg2rad(5.0), yaw, PARAMS)
    right = synthesize_sample(np.deg2rad(5.0), -yaw, PARAMS)
    np.testing.assert_allclose(right.iris_edge, left.iris_edge[IRIS_MIRROR] * [-1.0, 1.0], atol=1e-12)
    np.testing.assert_allclose(right.eyelid, left.eyelid[EYELID_MIRROR] * [-1.0, 1.0], atol=1e-12)
    np.testing.assert_allclose(right.iris_center, left.iris_center * [-1.0, 1.0], atol=1e-12)
    np.testing.assert_allclose(right.eyeball_vector, left.eyeball_vector * [-1.0, 1.0], atol=1e-12)


def test_features_are_scale_free():
    sample = synthesize_sample(0.1, -0.2, PARAMS)
    corners = sample.eyelid[4] - sample.eyelid[0]
    assert np.linalg.norm(corners) == pytest.approx(1.0)
    bigger = synthesize_sample(0.1, -0.2, PARAMS.model_copy(update={"eyeball_radius": 24.0, "iris_radius": 9.6, "corner_half_width": 22.0}))
    np.testing.assert_allclose(bigger.features, sample.features, atol=1e-12)


def test_gaze_moves_the_iris():
    up = synthesize_sample(np.deg2rad(20.0), 0.0, PARAMS)
    # camera y points down the image, pitch up moves the iris centre to negative y
    assert up.iris_center[1] < 0
    assert up.iris_center[0] == pytest.approx(0.0, abs=1e-12)


def test_noise_is_deterministic_per_sample():
    noisy = EyeModelParams(landmark_noise_std=0.1, seed=5)
    a = synthesize_sample(0.1, 0.2, noisy, index=3)
    b = synthesize_sample(0.1, 0.2, noisy, index=3)
    c = synthesize_sample(0.1, 0.2, noisy, index=4)
    assert np.array_equal(a.features, b.features)
    assert not np.array_equal(a.features, c.features)
    np.testing.assert_allclose(a.eyeball_vector, -a.iris_center)


def test_angles_beyond_range():
    with pytest.raises(OutOfRange):
        landmarks(np.deg2rad(40.0), 0.0, PARAMS)
    with pytest.raises(OutOfRange):
        landmarks(0.0, float("nan"), PARAMS)


def test_batch_matches_single_samples():
    pitch, yaw = np.array([0.1, -0.3]), np.array([0.2, 0.05])
    batch = to_features(landmarks(pitch, yaw, PARAMS), PARAMS)
    for i in range(2):
        np.testing.assert_allclose(batch[i], synthesize_sample(pitch[i], yaw[i], PARAMS).features)


def _grid_features(pitch_deg: np.ndarray, yaw_deg: np.ndarray) -> np.ndarray:
    pitch, yaw = np.meshgrid(np.deg2rad(pitch_deg), np.deg2rad(yaw_deg), indexing="ij")
    return to_features(landmarks(pitch.ravel(), yaw.ravel(), PARAMS), PARAMS)


def test_features_bounded_over_the_whole_range():
    degrees = np.linspace(-30.0, 30.0, 61)
    features = _grid_features(degrees, degrees)
    assert np.all(np.isfinite(features))
    assert np.max(np.abs(features)) <= 4.0
    noisy = EyeModelParams(landmark_noise_std=0.5, seed=1)
    corners = np.deg2rad(np.array([-30.0, 30.0]))
    for pitch in corners:
        for yaw in corners:
            assert np.max(np.abs(synthesize_sample(pitch, yaw, noisy).features)) <= 4.0


def test_distinct_angles_give_distinct_features_near_corners_and_centre():
    window = np.round(np.arange(-1.0, 1.05, 0.1), 1)
    degrees = np.concatenate([window - 29.0, window, window + 29.0])
    features = _grid_features(degrees, degrees)
    assert np.unique(features.round(9), axis=0).shape[0] == features.shape[0]


@pytest.mark.slow
def test_distinct_angles_give_distinct_features_on_full_grid():
    degrees = np.round(np.arange(-300, 301) / 10.0, 1)
    features = _grid_features(degrees, degrees)
    assert features.shape[0] == 601 * 601
    assert np.unique(features.round(9), axis=0).shape[0] == features.shape[0]
