import numpy as np
from pydantic import Field, model_validator

from src.schemas import CustomBase, FrozenBase

N_IRIS_EDGE = 8
N_EYELID = 8
N_LANDMARKS = N_IRIS_EDGE + N_EYELID + 2
N_FEATURES = 2 * N_LANDMARKS  # 36


class EyeModelParams(FrozenBase):
    """Geometry of the synthetic eye, in model units."""

    eyeball_radius: float = Field(default=12.0, gt=0.0)
    iris_radius: float = Field(default=4.8, gt=0.0)
    eyelid_openness_base: float = Field(default=0.8, gt=0.0)  # fraction of the eyeball radius
    corner_half_width: float = Field(default=11.0, gt=0.0)
    landmark_noise_std: float = Field(default=0.0, ge=0.0)
    max_angle_deg: float = Field(default=30.0, gt=0.0, le=90.0)
    seed: int = 0

    @model_validator(mode="after")
    def check_radii(self) -> "EyeModelParams":
        if self.iris_radius >= self.eyeball_radius:
            raise ValueError("iris_radius must be smaller than eyeball_radius")
        return self

    @property
    def max_angle(self) -> float:
        return float(np.deg2rad(self.max_angle_deg))


class LandmarkSample(CustomBase):
    """36 features: 8 iris-edge points, 8 eyelid points, iris center, iris-to-eyeball-center vector."""

    features: np.ndarray
    pitch: float
    yaw: float

    @model_validator(mode="after")
    def check_features(self) -> "LandmarkSample":
        if self.features.shape != (N_FEATURES,):
            raise ValueError(f"a landmark sample has {N_FEATURES} features")
        return self

    @property
    def iris_edge(self) -> np.ndarray:
        return self.features[: 2 * N_IRIS_EDGE].reshape(N_IRIS_EDGE, 2)

    @property
    def eyelid(self) -> np.ndarray:
        return self.features[2 * N_IRIS_EDGE : 2 * (N_IRIS_EDGE + N_EYELID)].reshape(N_EYELID, 2)

    @property
    def iris_center(self) -> np.ndarray:
        return self.features[32:34]

    @property
    def eyeball_vector(self) -> np.ndarray:
        return self.features[34:36]
