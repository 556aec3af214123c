from enum import Enum

import numpy as np
from pydantic import Field, model_validator

from src.config import settings
from src.ring.arithmetic import FixedPointCodec
from src.ring.random import EntropyMode
from src.schemas import CustomBase, FrozenBase


class Role(str, Enum):
    ALICE = "alice"
    BOB = "bob"
    SERVER = "server"


INPUT_ROLES = (Role.ALICE, Role.BOB)


class FeatureMatrix(FrozenBase):
    """n_f x n ring matrix, one sample per column."""

    data: np.ndarray
    frac_bits: int

    @model_validator(mode="after")
    def check_data(self) -> "FeatureMatrix":
        if self.data.dtype != np.uint64 or self.data.ndim != 2:
            raise ValueError("feature data must be a 2-d uint64 array")
        return self

    @classmethod
    def from_real(cls, x: np.ndarray, codec: FixedPointCodec) -> "FeatureMatrix":
        return cls(data=codec.encode_array(np.atleast_2d(x)), frac_bits=codec.frac_bits)

    @property
    def codec(self) -> FixedPointCodec:
        return FixedPointCodec(self.frac_bits)

    @property
    def n_f(self) -> int:
        return int(self.data.shape[0])

    @property
    def n(self) -> int:
        return int(self.data.shape[1])

    def decoded(self) -> np.ndarray:
        return self.codec.decode_array(self.data)


class LabelVector(FrozenBase):
    """n x 2 targets: pitch and yaw in radians."""

    targets: np.ndarray

    @model_validator(mode="after")
    def check_targets(self) -> "LabelVector":
        if self.targets.ndim != 2 or self.targets.shape[1] != 2:
            raise ValueError("targets must be an n x 2 array of (pitch, yaw)")
        return self

    @property
    def n(self) -> int:
        return int(self.targets.shape[0])

    @property
    def pitch(self) -> np.ndarray:
        return self.targets[:, 0]

    @property
    def yaw(self) -> np.ndarray:
        return self.targets[:, 1]


class ShareBundle(FrozenBase):
    role: Role
    masked_matrix: np.ndarray
    masked_scalars: np.ndarray
    local_gram: np.ndarray
    labels: LabelVector

    @model_validator(mode="after")
    def check_counts(self) -> "ShareBundle":
        if self.role not in INPUT_ROLES:
            raise ValueError("share bundles come from input parties only")
        n = self.masked_matrix.shape[1]
        if self.masked_scalars.shape != (n,) or self.labels.n != n or self.local_gram.shape != (n, n):
            raise ValueError("masked_matrix, masked_scalars, local_gram and labels disagree on n")
        if not np.array_equal(self.local_gram, self.local_gram.T):
            raise ValueError("local gram block must be symmetric")
        return self

    @property
    def n_f(self) -> int:
        return int(self.masked_matrix.shape[0])

    @property
    def n(self) -> int:
        return int(self.masked_matrix.shape[1])


class GramMatrix(FrozenBase):
    """Pooled gram matrix, Alice's samples first: [[XtX, XtY], [YtX, YtY]]."""

    k: np.ndarray
    n_a: int
    n_b: int

    @property
    def n(self) -> int:
        return self.n_a + self.n_b

    @property
    def cross(self) -> np.ndarray:
        return self.k[: self.n_a, self.n_a :]


class PartyConfig(CustomBase):
    """One input party's private inputs and session parameters."""

    role: Role
    features: np.ndarray  # n_f x n reals
    labels: np.ndarray  # n x 2 (pitch, yaw)
    seed: int
    session_id: bytes
    entropy: EntropyMode = Field(default_factory=lambda: settings.entropy)
    frac_bits: int = Field(default_factory=lambda: settings.frac_bits)
    audit: bool = False

    @model_validator(mode="after")
    def check_inputs(self) -> "PartyConfig":
        if self.role not in INPUT_ROLES:
            raise ValueError("party configs are for alice or bob")
        if self.features.ndim != 2 or self.labels.shape != (self.features.shape[1], 2):
            raise ValueError("features must be n_f x n and labels n x 2")
        return self


class ServerConfig(CustomBase):
    session_id: bytes
    frac_bits: int = Field(default_factory=lambda: settings.frac_bits)
    audit: bool = False


class PartyOutcome(CustomBase):
    role: Role
    encode_secs: float
    permutation: np.ndarray  # stays local


class ServerOutcome(CustomBase):
    gram: GramMatrix
    labels: LabelVector  # pooled, Alice's rows first
    assemble_secs: float
