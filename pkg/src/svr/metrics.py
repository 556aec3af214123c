import numpy as np

from src.exceptions import DimensionMismatch
from src.eyegen.geometry import angles_to_gaze


def mean_angular_error(pred, truth) -> float:
    """Mean angle in degrees between predicted and true gaze, both given as (pitch, yaw) rows."""
    pred, truth = np.atleast_2d(np.asarray(pred, dtype=np.float64)), np.atleast_2d(np.asarray(truth, dtype=np.float64))
    if pred.shape != truth.shape or pred.shape[-1] != 2 or pred.shape[0] < 1:
        raise DimensionMismatch(f"need equal, non-empty (pitch, yaw) arrays, got {pred.shape} and {truth.shape}")
    g_pred = angles_to_gaze(pred[:, 0], pred[:, 1])
    g_true = angles_to_gaze(truth[:, 0], truth[:, 1])
    cosines = np.clip(np.einsum("ij,ij->i", g_pred, g_true), -1.0, 1.0)
    return float(np.degrees(np.arccos(cosines)).mean())


def mean_absolute_error_deg(pred: np.ndarray, truth: np.ndarray) -> float:
    return float(np.degrees(np.abs(np.asarray(pred) - np.asarray(truth))).mean())
