import struct

import numpy as np
import pytest

from src.exceptions import DatasetFormatError, IoError
from src.kernels.schemas import PolynomialKernel, RbfKernel
from src.svr.schemas import GazeModelPair, SvrModel
from src.svr.storage import decode_models, encode_models, load_models, save_models


@pytest.fixture
def pair():
    pitch = SvrModel(
        beta=np.array([0.5, 0.0, -0.5]),
        bias=0.25,
        support_indices=np.array([0, 2]),
        kernel=RbfKernel(gamma=0.125),
        target="pitch",
        converged=False,
        iterations=1_000_000,
    )
    yaw = SvrModel(
        beta=np.array([0.0, 1.0, -1.0]),
        bias=-0.1,
        support_indices=np.array([1, 2]),
        kernel=PolynomialKernel(degree=3, offset=0.5),
        target="yaw",
        iterations=37,
    )
    return GazeModelPair(pitch_model=pitch, yaw_model=yaw)


def test_saved_models_load_back(tmp_path, pair):
    path = tmp_path / "m.rekm"
    save_models(path, pair)
    assert path.read_bytes()[:4] == b"REKM"
    loaded = load_models(path)
    for before, after in ((pair.pitch_model, loaded.pitch_model), (pair.yaw_model, loaded.yaw_model)):
        assert np.array_equal(before.beta, after.beta)
        assert before.bias == after.bias
        assert np.array_equal(before.support_indices, after.support_indices)
        assert before.kernel == after.kernel
        assert before.target == after.target and before.converged == after.converged
        assert before.iterations == after.iterations


def test_bad_files(tmp_path, pair):
    data = encode_models(pair)
    with pytest.raises(DatasetFormatError):
        decode_models(b"XXXX" + data[4:])
    with pytest.raises(DatasetFormatError):
        decode_models(data[:-3])
    with pytest.raises(IoError):
        load_models(tmp_path / "missing.rekm")


def test_stored_kernel_is_validated(pair):
    data = bytearray(encode_models(pair))
    # pitch gamma follows the 6-byte file header and the target/kind bytes
    struct.pack_into("<d", data, 8, -1.0)
    with pytest.raises(DatasetFormatError):
        decode_models(bytes(data))
    data[7] = 9
    with pytest.raises(DatasetFormatError):
        decode_models(bytes(data))
