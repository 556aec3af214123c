"""Parametric eye model: landmarks as a smooth function of gaze pitch and yaw.

The eyeball is centred at the origin and the camera looks along +z, so a gaze
straight into the camera points along -z. Landmarks are orthographic
projections onto the x-y plane.
"""
import numpy as np

from src.exceptions import OutOfRange
from src.eyegen.schemas import N_EYELID, N_FEATURES, N_IRIS_EDGE, EyeModelParams, LandmarkSample

ANGLE_SLACK = 1e-9
_IRIS_THETA = 2.0 * np.pi * np.arange(N_IRIS_EDGE) / N_IRIS_EDGE
LOWER_LID_RATIO = 0.6
PITCH_LID_COUPLING = 0.3


def angles_to_gaze(pitch, yaw) -> np.ndarray:
    """Unit gaze vector(s), shape (..., 3)."""
    pitch, yaw = np.asarray(pitch, dtype=np.float64), np.asarray(yaw, dtype=np.float64)
    return np.stack(
        [-np.cos(pitch) * np.sin(yaw), -np.sin(pitch), -np.cos(pitch) * np.cos(yaw)],
        axis=-1,
    )


def check_angles(pitch: np.ndarray, yaw: np.ndarray, params: EyeModelParams) -> None:
    limit = params.max_angle + ANGLE_SLACK
    if not (np.all(np.isfinite(pitch)) and np.all(np.isfinite(yaw))):
        raise OutOfRange("gaze angles must be finite")
    if np.abs(pitch).max(initial=0.0) > limit or np.abs(yaw).max(initial=0.0) > limit:
        raise OutOfRange(f"gaze angles must lie within +/-{params.max_angle_deg:g} degrees")


def _eyelid(pitch: np.ndarray, params: EyeModelParams) -> np.ndarray:
    """(n, 8, 2) eyelid contour: left corner, upper arc, right corner, lower arc."""
    w = params.corner_half_width
    opening = params.eyelid_openness_base * params.eyeball_radius
    upper = opening * (1.0 - PITCH_LID_COUPLING * np.sin(pitch))
    lower = np.full_like(pitch, -LOWER_LID_RATIO * opening)
    xs = np.array([-w, -w / 2, 0.0, w / 2, w, w / 2, 0.0, -w / 2])
    shape = 1.0 - (xs / w) ** 2
    heights = np.where(np.arange(N_EYELID) < 5, upper[:, None], lower[:, None]) * shape
    return np.stack([np.broadcast_to(xs, heights.shape), heights], axis=-1)


def landmarks(pitch, yaw, params: EyeModelParams) -> np.ndarray:
    """(n, 18, 2) noiseless landmarks in model units."""
    pitch = np.atleast_1d(np.asarray(pitch, dtype=np.float64))
    yaw = np.atleast_1d(np.asarray(yaw, dtype=np.float64))
    check_angles(pitch, yaw, params)
    g = angles_to_gaze(pitch, yaw)
    r_eye, r_iris = params.eyeball_radius, params.iris_radius

    # orthonormal basis of the iris plane
    u = np.stack([np.cos(yaw), np.zeros_like(yaw), -np.sin(yaw)], axis=-1)
    v = np.stack([np.sin(pitch) * np.sin(yaw), -np.cos(pitch), np.sin(pitch) * np.cos(yaw)], axis=-1)
    depth = np.sqrt(r_eye**2 - r_iris**2)
    cos_t, sin_t = np.cos(_IRIS_THETA), np.sin(_IRIS_THETA)
    edge = (
        depth * g[:, None, :]
        + r_iris * (cos_t[None, :, None] * u[:, None, :] + sin_t[None, :, None] * v[:, None, :])
    )[..., :2]

    iris_center = r_eye * g[:, :2]
    eyeball_vector = -iris_center
    return np.concatenate(
        [edge, _eyelid(pitch, params), iris_center[:, None, :], eyeball_vector[:, None, :]],
        axis=1,
    )


def to_features(points: np.ndarray, params: EyeModelParams, indices: np.ndarray | None = None) -> np.ndarray:
    """Add optional landmark noise and normalise by the inter-corner distance; (n, 36)."""
    points = np.array(points, dtype=np.float64)
    if params.landmark_noise_std > 0:
        if indices is None:
            indices = np.arange(points.shape[0])
        for row, index in enumerate(indices):
            rng = np.random.default_rng([params.seed, int(index)])
            points[row, :-1] += rng.normal(0.0, params.landmark_noise_std, size=points[row, :-1].shape)
            # the eyeball vector follows the noisy iris center
            points[row, -1] = -points[row, -2]
    corners = np.linalg.norm(points[:, N_IRIS_EDGE + 4] - points[:, N_IRIS_EDGE], axis=-1)
    return (points / corners[:, None, None]).reshape(points.shape[0], N_FEATURES)


def synthesize_sample(pitch: float, yaw: float, params: EyeModelParams, index: int = 0) -> LandmarkSample:
    features = to_features(landmarks(pitch, yaw, params), params, np.array([index]))
    return LandmarkSample(features=features[0], pitch=float(pitch), yaw=float(yaw))
