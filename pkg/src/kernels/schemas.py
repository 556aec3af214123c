from typing import Annotated, Literal, Union

from pydantic import Field

from src.schemas import FrozenBase


class LinearKernel(FrozenBase):
    kind: Literal["linear"] = "linear"


class PolynomialKernel(FrozenBase):
    kind: Literal["polynomial"] = "polynomial"
    degree: int = Field(default=2, ge=1)
    offset: float = Field(default=1.0, ge=0.0)


class RbfKernel(FrozenBase):
    """exp(-gamma * |x - y|^2), with gamma = 1 / (2 sigma^2)."""

    kind: Literal["rbf"] = "rbf"
    gamma: float = Field(default=1.0, gt=0.0)


KernelConfig = Annotated[Union[LinearKernel, PolynomialKernel, RbfKernel], Field(discriminator="kind")]

KERNEL_CODES = {"linear": 0, "polynomial": 1, "rbf": 2}
