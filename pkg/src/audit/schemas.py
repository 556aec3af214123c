from typing import Literal

import numpy as np
from pydantic import Field

from src.eyegen.schemas import EyeModelParams
from src.ring.random import EntropyMode
from src.schemas import CustomBase, FrozenBase
from src.svr.schemas import CvGrid, SvrHyperparams

ALPHA = 0.01
PASS_FRACTION = 0.95
MIN_TRIALS = 10_000


class ViewSet(CustomBase):
    """Repeated observations of one party's view: trials x coordinates, per named share."""

    owner: Literal["server", "bob"]
    shares: dict[str, np.ndarray]

    @property
    def trials(self) -> int:
        return int(next(iter(self.shares.values())).shape[0])

    def coordinates(self) -> list[tuple[str, int, np.ndarray]]:
        return [(name, col, values[:, col]) for name, values in self.shares.items() for col in range(values.shape[1])]


class CoordinateTest(FrozenBase):
    share: str
    coordinate: int
    byte: int | None = None
    p_value: float

    @property
    def passed(self) -> bool:
        return self.p_value > ALPHA


class ViewReport(CustomBase):
    """Per-coordinate hypothesis tests over a party's view; a low pass fraction flags a leak."""

    owner: str
    method: Literal["chi-square", "ks"]
    trials: int
    tests: list[CoordinateTest]

    @property
    def pass_fraction(self) -> float:
        return sum(test.passed for test in self.tests) / len(self.tests) if self.tests else 0.0

    @property
    def leak_detected(self) -> bool:
        return self.pass_fraction < PASS_FRACTION

    def failing(self) -> list[CoordinateTest]:
        return [test for test in self.tests if not test.passed]


class TimingStat(FrozenBase):
    mean: float
    std: float

    @classmethod
    def of(cls, samples: list[float]) -> "TimingStat":
        values = np.asarray(samples, dtype=np.float64)
        return cls(mean=float(values.mean()), std=float(values.std()))


class BenchConfig(CustomBase):
    seed: int = 0
    repetitions: int = Field(default=10, ge=1)
    warmup: bool = True
    test_fraction: float = Field(default=0.2, ge=0.0, lt=1.0)
    frac_bits: int | None = None
    entropy: EntropyMode | None = None
    eye: EyeModelParams = EyeModelParams()
    # fixed hyperparameters skip cross-validation
    hp_pitch: SvrHyperparams | None = None
    hp_yaw: SvrHyperparams | None = None
    grid: CvGrid = CvGrid()
    compare_plaintext: bool = True
    n_jobs: int = Field(default=1, ge=1)
    transport: Literal["memory", "tcp"] = "memory"


class BenchReport(CustomBase):
    n_a: int
    n_b: int
    n_f: int
    n_test: int
    frac_bits: int
    repetitions: int
    alice_encode: TimingStat
    bob_encode: TimingStat
    server_assemble: TimingStat
    server_train: TimingStat
    server_predict_total: TimingStat
    per_sample_predict_ms: TimingStat
    protocol_bytes: int
    auxiliary_bytes: int
    framing_bytes: int
    mae_private: float
    mae_plaintext: float | None = None
    hp_pitch: SvrHyperparams
    hp_yaw: SvrHyperparams
    gram_checksum: str
