from typing import Annotated

import numpy as np
from pydantic import Field, model_validator

from src.ring.arithmetic import RING_MODULUS
from src.schemas import FrozenBase

RingElement = Annotated[int, Field(ge=0, lt=RING_MODULUS)]


class MulRandomness(FrozenBase):
    r1: RingElement
    r2: RingElement
    r3: RingElement


class MulEncoding(FrozenBase):
    c1: RingElement
    c2: RingElement
    c3: RingElement
    c4: RingElement

    def as_tuple(self) -> tuple[int, int, int, int]:
        return self.c1, self.c2, self.c3, self.c4


class DotRandomness(FrozenBase):
    """Masks shared by every column of both parties' matrices in one session."""

    r1_vec: np.ndarray
    r2_vec: np.ndarray
    r3: RingElement

    @model_validator(mode="after")
    def check_shapes(self) -> "DotRandomness":
        if self.r1_vec.dtype != np.uint64 or self.r2_vec.dtype != np.uint64:
            raise ValueError("randomness vectors must be uint64")
        if self.r1_vec.ndim != 1 or self.r1_vec.shape != self.r2_vec.shape:
            raise ValueError("r1_vec and r2_vec must be 1-d and of equal length")
        return self

    @property
    def n_f(self) -> int:
        return int(self.r1_vec.shape[0])
