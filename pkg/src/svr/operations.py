import logging
import warnings
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from src.exceptions import BadKernel, DimensionMismatch, NotConvergedWarning, TooFewSamples
from src.kernels.operations import kernel_from_blocks, kernel_from_gram
from src.protocol.schemas import LabelVector
from src.svr.schemas import GazeModelPair, SvrHyperparams, SvrModel, Target
from src.svr.solver import smo_solve

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-9


def check_kernel(k: np.ndarray) -> np.ndarray:
    k = np.ascontiguousarray(k, dtype=np.float64)
    if k.ndim != 2 or k.shape[0] != k.shape[1]:
        raise BadKernel(f"kernel matrix must be square, got shape {k.shape}")
    asymmetry = float(np.abs(k - k.T).max()) if k.size else 0.0
    if asymmetry > SYMMETRY_TOL:
        raise BadKernel(f"kernel matrix is not symmetric (max |K - K'| = {asymmetry:g})")
    return k


def train(k: np.ndarray, y: np.ndarray, hp: SvrHyperparams, target: Target = "pitch") -> SvrModel:
    """Fit an epsilon-SVR on a precomputed kernel matrix."""
    k = check_kernel(k)
    y = np.ascontiguousarray(y, dtype=np.float64)
    if y.shape != (k.shape[0],):
        raise DimensionMismatch(f"{y.shape[0]} targets for a {k.shape[0]}x{k.shape[0]} kernel")
    if y.shape[0] < 2:
        raise TooFewSamples("training needs at least 2 samples")

    beta, rho, iterations, converged = smo_solve(k, y, hp.C, hp.epsilon, hp.tol, hp.max_iter)
    if not converged:
        warnings.warn(
            f"{target} SVR stopped after {iterations} updates without meeting tol={hp.tol:g}",
            NotConvergedWarning,
            stacklevel=2,
        )
    model = SvrModel(
        beta=beta,
        bias=-float(rho),
        support_indices=np.flatnonzero(beta).astype(np.int64),
        kernel=hp.kernel,
        target=target,
        converged=bool(converged),
        iterations=int(iterations),
    )
    logger.debug("%s model: %d support vectors, %d updates", target, model.support_indices.size, iterations)
    return model


def predict(model: SvrModel, k_row: np.ndarray) -> float:
    k_row = np.asarray(k_row, dtype=np.float64)
    if k_row.shape != (model.n_train,):
        raise DimensionMismatch(f"kernel row has {k_row.size} entries, model was trained on {model.n_train}")
    return float(k_row @ model.beta) + model.bias


def predict_many(model: SvrModel, k_rows: np.ndarray) -> np.ndarray:
    k_rows = np.atleast_2d(np.asarray(k_rows, dtype=np.float64))
    if k_rows.shape[1] != model.n_train:
        raise DimensionMismatch(f"kernel rows have {k_rows.shape[1]} columns, model was trained on {model.n_train}")
    return k_rows @ model.beta + model.bias


def train_gaze(
    gram: np.ndarray, labels: LabelVector, hp_pitch: SvrHyperparams, hp_yaw: SvrHyperparams, n_jobs: int = 1
) -> GazeModelPair:
    """Train the pitch and yaw regressors on one training gram matrix, each with its own kernel."""
    jobs = [(labels.pitch, hp_pitch, "pitch"), (labels.yaw, hp_yaw, "yaw")]

    def fit(job) -> SvrModel:
        y, hp, target = job
        return train(kernel_from_gram(gram, hp.kernel), y, hp, target)

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=2) as pool:
            pitch, yaw = pool.map(fit, jobs)
    else:
        pitch, yaw = (fit(job) for job in jobs)
    return GazeModelPair(pitch_model=pitch, yaw_model=yaw)


def predict_gaze(pair: GazeModelPair, gram_rows: np.ndarray, diag_rows: np.ndarray, diag_train: np.ndarray) -> np.ndarray:
    """n_test x 2 predicted (pitch, yaw) from dot products between test and training samples."""
    return np.column_stack(
        [
            predict_many(model, kernel_from_blocks(gram_rows, diag_rows, diag_train, model.kernel))
            for model in (pair.pitch_model, pair.yaw_model)
        ]
    )


def dual_objective(k: np.ndarray, y: np.ndarray, beta: np.ndarray, epsilon: float) -> float:
    """Dual objective in minimisation form: 1/2 b'Kb - y'b + eps * sum|b|."""
    return float(0.5 * beta @ k @ beta - y @ beta + epsilon * np.abs(beta).sum())
