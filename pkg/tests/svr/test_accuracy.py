import numpy as np
import pytest

from src.eyegen.datasets import generate_dataset, split_parties
from src.eyegen.schemas import EyeModelParams
from src.kernels.schemas import RbfKernel
from src.protocol.operations import holdout_split
from src.protocol.schemas import LabelVector
from src.svr.metrics import mean_angular_error
from src.svr.operations import predict_gaze, train_gaze
from src.svr.schemas import SvrHyperparams
from src.transport.session import local_configs, run_session_sync

HP_PITCH = SvrHyperparams(C=4.0, epsilon=0.005, kernel=RbfKernel(gamma=2.0))
HP_YAW = SvrHyperparams(C=4.0, epsilon=0.005, kernel=RbfKernel(gamma=4.0))


@pytest.mark.slow
def test_error_does_not_grow_with_training_size():
    parties = split_parties(*generate_dataset(5000, EyeModelParams(seed=11)))
    result = run_session_sync(*local_configs(*parties, seed=11))
    k, targets = result.gram.k, result.labels.targets
    train_idx, test_idx = holdout_split(result.gram.n_a, result.gram.n_b)
    diag = np.diag(k)

    def held_out_mae(idx: np.ndarray) -> float:
        pair = train_gaze(k[np.ix_(idx, idx)], LabelVector(targets=targets[idx]), HP_PITCH, HP_YAW, n_jobs=2)
        predictions = predict_gaze(pair, k[np.ix_(test_idx, idx)], diag[test_idx], diag[idx])
        return mean_angular_error(predictions, targets[test_idx])

    assert (train_idx.size, test_idx.size) == (4000, 1000)
    # every fourth training sample keeps both parties represented
    small, full = held_out_mae(train_idx[::4]), held_out_mae(train_idx)
    assert full <= small + 0.05
    assert full <= 1.0
