import numpy as np
import pytest

from src.eyegen.datasets import generate_dataset, split_parties
from src.eyegen.schemas import EyeModelParams
from src.protocol.schemas import LabelVector
from src.transport.frames import new_session_id


@pytest.fixture
def anyio_backend():
    return "asyncio"


@pytest.fixture
def session_id() -> bytes:
    return new_session_id()


@pytest.fixture
def toy_parties():
    """One sample per party, n_f = 2: x = (1, 2), y = (3, 4)."""
    alice = (np.array([[1.0], [2.0]]), LabelVector(targets=np.array([[0.1, -0.1]])))
    bob = (np.array([[3.0], [4.0]]), LabelVector(targets=np.array([[0.2, 0.3]])))
    return alice, bob


@pytest.fixture(scope="session")
def eye_dataset():
    return generate_dataset(60, EyeModelParams(seed=3))


@pytest.fixture(scope="session")
def eye_parties(eye_dataset):
    return split_parties(*eye_dataset)


def random_parties(n_a: int, n_b: int, n_f: int = 36, seed: int = 0, scale: float = 1.0):
    rng = np.random.default_rng(seed)
    alice = (rng.uniform(-scale, scale, (n_f, n_a)), LabelVector(targets=rng.uniform(-0.5, 0.5, (n_a, 2))))
    bob = (rng.uniform(-scale, scale, (n_f, n_b)), LabelVector(targets=rng.uniform(-0.5, 0.5, (n_b, 2))))
    return alice, bob


@pytest.fixture
def make_parties():
    return random_parties
