import itertools
from typing import Literal

import numpy as np
from pydantic import Field, model_validator

from src.kernels.schemas import KernelConfig, LinearKernel, PolynomialKernel, RbfKernel
from src.schemas import CustomBase, FrozenBase

Target = Literal["pitch", "yaw"]

DEFAULT_GAMMAS = tuple(2.0**e for e in range(-3, 5))
DEFAULT_CS = tuple(2.0**e for e in range(-3, 4))
DEFAULT_EPSILONS = (0.005, 0.01, 0.05, 0.1, 0.5, 1.0)


class SvrHyperparams(FrozenBase):
    C: float = Field(gt=0.0)
    epsilon: float = Field(ge=0.0)
    kernel: KernelConfig = RbfKernel()
    tol: float = Field(default=1e-3, gt=0.0)
    max_iter: int = Field(default=1_000_000, ge=1)


class SvrModel(CustomBase):
    beta: np.ndarray  # alpha - alpha*, one per training sample
    bias: float
    support_indices: np.ndarray
    kernel: KernelConfig
    target: Target
    converged: bool = True
    iterations: int = 0

    @property
    def n_train(self) -> int:
        return int(self.beta.shape[0])


class GazeModelPair(CustomBase):
    pitch_model: SvrModel
    yaw_model: SvrModel

    @model_validator(mode="after")
    def check_pair(self) -> "GazeModelPair":
        if self.pitch_model.n_train != self.yaw_model.n_train:
            raise ValueError("pitch and yaw models must share one training set")
        return self


class CvGrid(FrozenBase):
    """Hyperparameter grid; gammas only apply to the rbf kernel."""

    kernel: Literal["linear", "polynomial", "rbf"] = "rbf"
    gammas: tuple[float, ...] = DEFAULT_GAMMAS
    cs: tuple[float, ...] = DEFAULT_CS
    epsilons: tuple[float, ...] = DEFAULT_EPSILONS
    degree: int = Field(default=2, ge=1)
    offset: float = Field(default=1.0, ge=0.0)
    tol: float = Field(default=1e-3, gt=0.0)
    max_iter: int = Field(default=1_000_000, ge=1)

    def kernels(self) -> list[KernelConfig]:
        if self.kernel == "rbf":
            return [RbfKernel(gamma=gamma) for gamma in self.gammas]
        if self.kernel == "polynomial":
            return [PolynomialKernel(degree=self.degree, offset=self.offset)]
        return [LinearKernel()]

    def points(self) -> list[SvrHyperparams]:
        return [
            SvrHyperparams(C=c, epsilon=eps, kernel=kernel, tol=self.tol, max_iter=self.max_iter)
            for kernel, c, eps in itertools.product(self.kernels(), self.cs, self.epsilons)
        ]


class CvScore(FrozenBase):
    hyperparams: SvrHyperparams
    target: Target
    mae_deg: float  # mean over folds of the angle's mean absolute error


class CvResult(CustomBase):
    best_pitch: SvrHyperparams
    best_yaw: SvrHyperparams
    scores: list[CvScore]

    def best_score(self, target: Target) -> CvScore:
        return min((s for s in self.scores if s.target == target), key=lambda s: s.mae_deg)
