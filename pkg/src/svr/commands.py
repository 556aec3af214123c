import time
from pathlib import Path

import click
import numpy as np

from src.eyegen.datasets import read_dataset
from src.exceptions import DimensionMismatch
from src.options import config_option, dataset_options, frac_bits_option, seed_option
from src.protocol.operations import SHUFFLE_STREAM, holdout_split, seed_stream, shuffle_dataset
from src.protocol.schemas import FeatureMatrix, Role
from src.ring.arithmetic import FixedPointCodec
from src.runconfig import RunConfig, apply_flags, load_parties, load_run_config
from src.svr.metrics import mean_angular_error
from src.svr.operations import predict_gaze
from src.svr.selection import cross_validate
from src.svr.storage import load_models
from src.transport.session import local_configs, run_session_sync


def replay_training_set(cfg: RunConfig, n_train: int) -> np.ndarray:
    """Quantized training features in the server's column order, rebuilt from the parties' data and seed.

    Evaluation only: this needs both plaintext datasets in one place. A model
    trained on every sample (server daemon) or on the held-in block
    (run-local) is accepted.
    """
    codec = FixedPointCodec(cfg.frac_bits)
    blocks = []
    for role, (features, labels) in load_parties(cfg, Role.ALICE, Role.BOB).items():
        shuffled, _, _ = shuffle_dataset(
            FeatureMatrix.from_real(features, codec), labels, seed_stream(cfg.seed, role, SHUFFLE_STREAM)
        )
        blocks.append(shuffled.decoded())
    pooled = np.hstack(blocks)
    if n_train == pooled.shape[1]:
        return pooled
    train_idx, _ = holdout_split(blocks[0].shape[1], blocks[1].shape[1], cfg.test_fraction)
    if n_train == train_idx.size:
        return pooled[:, train_idx]
    raise DimensionMismatch(f"model was trained on {n_train} samples, the datasets hold {pooled.shape[1]}")


@click.command("predict")
@click.argument("model_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.argument("test_path", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@config_option
@dataset_options
@seed_option
@frac_bits_option
def predict(model_path, test_path, config_path, alice_data, bob_data, seed, frac_bits):
    """Score a saved model on a REKD test set and print the mean angular error."""
    cfg = apply_flags(load_run_config(config_path), alice_data=alice_data, bob_data=bob_data, seed=seed, frac_bits=frac_bits)
    pair = load_models(model_path)
    train_x = replay_training_set(cfg, pair.pitch_model.n_train)
    test_x, test_labels = read_dataset(test_path)
    test_q = FixedPointCodec(cfg.frac_bits).quantize(test_x)

    started = time.perf_counter()
    predictions = predict_gaze(
        pair, test_q.T @ train_x, np.einsum("ij,ij->j", test_q, test_q), np.einsum("ij,ij->j", train_x, train_x)
    )
    elapsed = time.perf_counter() - started
    click.echo(f"{test_labels.n} samples, mean angular error {mean_angular_error(predictions, test_labels.targets):.4f} deg")
    click.echo(f"prediction {elapsed:.3f}s ({1000 * elapsed / test_labels.n:.4f} ms per sample)")


def _floats(value: str | None) -> tuple[float, ...] | None:
    if value is None:
        return None
    try:
        return tuple(float(part) for part in value.split(",") if part.strip())
    except ValueError:
        raise click.BadParameter(f"{value!r} is not a comma-separated list of numbers")


@click.command("cv")
@config_option
@dataset_options
@seed_option
@frac_bits_option
@click.option("--gammas", help="Comma-separated rbf gammas (default 2^-3..2^4).")
@click.option("--cs", help="Comma-separated C values (default 2^-3..2^3).")
@click.option("--epsilons", help="Comma-separated epsilon values.")
@click.option("--n-jobs", type=click.IntRange(min=1), help="Grid points evaluated in parallel.")
def cv(config_path, alice_data, bob_data, seed, frac_bits, gammas, cs, epsilons, n_jobs):
    """Run the protocol in-process, then 5-fold cross-validate on the server's gram matrix."""
    cfg = apply_flags(load_run_config(config_path), alice_data=alice_data, bob_data=bob_data, seed=seed, frac_bits=frac_bits)
    overrides = {
        key: values for key, values in (("gammas", _floats(gammas)), ("cs", _floats(cs)), ("epsilons", _floats(epsilons))) if values is not None
    }
    grid = cfg.svr.grid.model_copy(update=overrides)
    parties = load_parties(cfg, Role.ALICE, Role.BOB)
    result = run_session_sync(
        *local_configs(parties[Role.ALICE], parties[Role.BOB], cfg.seed, entropy=cfg.entropy, frac_bits=cfg.frac_bits)
    )
    cv_result = cross_validate(result.gram, result.labels, grid, n_jobs=n_jobs or cfg.svr.n_jobs)
    for target, hp in (("pitch", cv_result.best_pitch), ("yaw", cv_result.best_yaw)):
        score = cv_result.best_score(target)
        click.echo(f"{target:>5}: C={hp.C:g} epsilon={hp.epsilon:g} kernel={hp.kernel.model_dump()} cv-mae={score.mae_deg:.4f} deg")
