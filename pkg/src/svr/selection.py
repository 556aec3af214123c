"""Hyperparameter search on the server, using only sub-blocks of the gram matrix."""
import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from src.exceptions import GridEmpty, TooFewSamples
from src.kernels.operations import kernel_from_gram
from src.protocol.schemas import GramMatrix, LabelVector
from src.svr.metrics import mean_absolute_error_deg
from src.svr.operations import predict_many, train
from src.svr.schemas import CvGrid, CvResult, CvScore, SvrHyperparams, Target

logger = logging.getLogger(__name__)

N_FOLDS = 5


def fold_indices(n: int, folds: int = N_FOLDS) -> list[np.ndarray]:
    """Contiguous folds whose sizes differ by at most one."""
    if n < folds:
        raise TooFewSamples(f"{folds}-fold cross-validation needs at least {folds} samples, got {n}")
    return np.array_split(np.arange(n), folds)


def _fold_mae(k: np.ndarray, y: np.ndarray, hp: SvrHyperparams, target: Target, folds: list[np.ndarray]) -> float:
    n = y.shape[0]
    errors = []
    for test in folds:
        mask = np.ones(n, dtype=bool)
        mask[test] = False
        train_idx = np.flatnonzero(mask)
        model = train(k[np.ix_(train_idx, train_idx)], y[train_idx], hp, target)
        pred = predict_many(model, k[np.ix_(test, train_idx)])
        errors.append(mean_absolute_error_deg(pred, y[test]))
    return float(np.mean(errors))


def cross_validate(
    gram: GramMatrix | np.ndarray,
    targets: LabelVector,
    grid: CvGrid | list[SvrHyperparams] | None = None,
    n_jobs: int = 1,
    folds: int = N_FOLDS,
) -> CvResult:
    """Pick the hyperparameters minimising mean fold MAE, separately for pitch and yaw."""
    g = gram.k if isinstance(gram, GramMatrix) else np.asarray(gram, dtype=np.float64)
    points = (grid or CvGrid()).points() if not isinstance(grid, list) else grid
    if not points:
        raise GridEmpty("the hyperparameter grid has no points")
    partition = fold_indices(targets.n, folds)

    kernels = {}
    for hp in points:
        if hp.kernel not in kernels:
            kernels[hp.kernel] = kernel_from_gram(g, hp.kernel)

    jobs = [(hp, target) for hp in points for target in ("pitch", "yaw")]

    def evaluate(job: tuple[SvrHyperparams, Target]) -> CvScore:
        hp, target = job
        y = targets.pitch if target == "pitch" else targets.yaw
        return CvScore(hyperparams=hp, target=target, mae_deg=_fold_mae(kernels[hp.kernel], y, hp, target, partition))

    if n_jobs > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            scores = list(pool.map(evaluate, jobs))
    else:
        scores = [evaluate(job) for job in jobs]

    # first minimum wins so ties resolve in grid order
    best = {target: min((s for s in scores if s.target == target), key=lambda s: s.mae_deg) for target in ("pitch", "yaw")}
    result = CvResult(best_pitch=best["pitch"].hyperparams, best_yaw=best["yaw"].hyperparams, scores=scores)
    logger.info(
        "cross-validation over %d points: pitch %.4f deg, yaw %.4f deg",
        len(points),
        best["pitch"].mae_deg,
        best["yaw"].mae_deg,
    )
    return result

