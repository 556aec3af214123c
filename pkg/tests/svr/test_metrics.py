import numpy as np
import pytest

from src.exceptions import DimensionMismatch
from src.svr.metrics import mean_absolute_error_deg, mean_angular_error


@pytest.mark.parametrize(
    "pred, truth, expected",
    [
        ([[0.3, -0.2]], [[0.3, -0.2]], 0.0),
        ([[0.0, 0.0]], [[np.deg2rad(30.0), 0.0]], 30.0),
        ([[0.0, np.deg2rad(90.0)]], [[0.0, np.deg2rad(-90.0)]], 180.0),
    ],
)
def test_mean_angular_error(pred, truth, expected):
    assert mean_angular_error(pred, truth) == pytest.approx(expected, abs=1e-6)


def test_mean_over_samples():
    pred = [[0.0, 0.0], [0.0, 0.0]]
    truth = [[0.0, 0.0], [np.deg2rad(30.0), 0.0]]
    assert mean_angular_error(pred, truth) == pytest.approx(15.0)


def test_shapes_must_agree():
    with pytest.raises(DimensionMismatch):
        mean_angular_error(np.zeros((2, 2)), np.zeros((3, 2)))


def test_absolute_error_in_degrees():
    assert mean_absolute_error_deg(np.array([0.0, np.pi]), np.array([0.0, 0.0])) == pytest.approx(90.0)
