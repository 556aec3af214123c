"""Timing and accuracy runs of the whole pipeline, one report per dataset size."""
import logging
import time

import numpy as np

from src.audit.equivalence import reference_gram
from src.audit.schemas import BenchConfig, BenchReport, TimingStat
from src.eyegen.datasets import generate_dataset, split_parties
from src.protocol.operations import holdout_split
from src.protocol.schemas import GramMatrix, LabelVector, Role
from src.ring.arithmetic import checksum
from src.schemas import CustomBase
from src.svr.metrics import mean_angular_error
from src.svr.operations import predict_gaze, train_gaze
from src.svr.schemas import GazeModelPair, SvrHyperparams
from src.svr.selection import cross_validate
from src.transport.links import InProcessTransport, TcpTransport, Transport
from src.transport.session import SessionResult, local_configs, run_session_sync

logger = logging.getLogger(__name__)


def make_transport(kind: str) -> Transport:
    if kind == "tcp":
        # ephemeral loopback ports
        return TcpTransport({role: ("127.0.0.1", 0) for role in Role})
    return InProcessTransport()


class Evaluation(CustomBase):
    pair: GazeModelPair
    train_secs: float
    predict_secs: float
    mae: float
    predictions: np.ndarray


def evaluate_gram(
    gram: GramMatrix,
    labels: LabelVector,
    hp_pitch: SvrHyperparams,
    hp_yaw: SvrHyperparams,
    test_fraction: float = 0.2,
    n_jobs: int = 1,
) -> Evaluation:
    """Train on the held-in block of the gram matrix and score the held-out samples."""
    train_idx, test_idx = holdout_split(gram.n_a, gram.n_b, test_fraction)
    k = gram.k
    started = time.perf_counter()
    pair = train_gaze(k[np.ix_(train_idx, train_idx)], LabelVector(targets=labels.targets[train_idx]), hp_pitch, hp_yaw, n_jobs)
    train_secs = time.perf_counter() - started

    diag = np.diag(k)
    started = time.perf_counter()
    predictions = predict_gaze(pair, k[np.ix_(test_idx, train_idx)], diag[test_idx], diag[train_idx])
    predict_secs = time.perf_counter() - started
    mae = mean_angular_error(predictions, labels.targets[test_idx]) if test_idx.size else float("nan")
    return Evaluation(pair=pair, train_secs=train_secs, predict_secs=predict_secs, mae=mae, predictions=predictions)


def select_hyperparams(gram: GramMatrix, labels: LabelVector, config: BenchConfig) -> tuple[SvrHyperparams, SvrHyperparams]:
    if config.hp_pitch and config.hp_yaw:
        return config.hp_pitch, config.hp_yaw
    train_idx, _ = holdout_split(gram.n_a, gram.n_b, config.test_fraction)
    result = cross_validate(
        gram.k[np.ix_(train_idx, train_idx)],
        LabelVector(targets=labels.targets[train_idx]),
        config.grid,
        n_jobs=config.n_jobs,
    )
    return result.best_pitch, result.best_yaw


def run_benchmark(sizes: list[int], config: BenchConfig | None = None) -> list[BenchReport]:
    config = config or BenchConfig()
    if not sizes:
        raise ValueError("sizes must not be empty")
    reports = []
    for n in sizes:
        features, labels = generate_dataset(n, config.eye)
        report, _ = benchmark_parties(*split_parties(features, labels), config)
        reports.append(report)
    return reports


def benchmark_parties(
    alice_data: tuple[np.ndarray, LabelVector], bob_data: tuple[np.ndarray, LabelVector], config: BenchConfig
) -> tuple[BenchReport, GazeModelPair]:
    """Run the protocol and the server pipeline on two party datasets, timing every stage."""
    runs: list[tuple[SessionResult, Evaluation]] = []
    hp_pitch = hp_yaw = None
    mae_plain = None
    for rep in range(config.repetitions + int(config.warmup)):
        configs = local_configs(alice_data, bob_data, config.seed, entropy=config.entropy, frac_bits=config.frac_bits)
        result = run_session_sync(*configs, transport=make_transport(config.transport))
        if hp_pitch is None:
            hp_pitch, hp_yaw = select_hyperparams(result.gram, result.labels, config)
        evaluation = evaluate_gram(result.gram, result.labels, hp_pitch, hp_yaw, config.test_fraction, config.n_jobs)
        if config.compare_plaintext and mae_plain is None:
            plain = reference_gram(alice_data[0], bob_data[0], result, configs[2].frac_bits)
            mae_plain = evaluate_gram(plain, result.labels, hp_pitch, hp_yaw, config.test_fraction, config.n_jobs).mae
        if config.warmup and rep == 0:
            continue
        runs.append((result, evaluation))

    last, last_eval = runs[-1]
    n_test = holdout_split(last.gram.n_a, last.gram.n_b, config.test_fraction)[1].size
    sent = last.sent_bytes()
    report = BenchReport(
        n_a=last.gram.n_a,
        n_b=last.gram.n_b,
        n_f=alice_data[0].shape[0],
        n_test=n_test,
        frac_bits=configs[2].frac_bits,
        repetitions=len(runs),
        alice_encode=TimingStat.of([r.timings.alice_encode for r, _ in runs]),
        bob_encode=TimingStat.of([r.timings.bob_encode for r, _ in runs]),
        server_assemble=TimingStat.of([r.timings.server_assemble for r, _ in runs]),
        server_train=TimingStat.of([e.train_secs for _, e in runs]),
        server_predict_total=TimingStat.of([e.predict_secs for _, e in runs]),
        per_sample_predict_ms=TimingStat.of([1000.0 * e.predict_secs / max(n_test, 1) for _, e in runs]),
        protocol_bytes=sent.protocol,
        auxiliary_bytes=sent.auxiliary,
        framing_bytes=sent.framing,
        mae_private=last_eval.mae,
        mae_plaintext=mae_plain,
        hp_pitch=hp_pitch,
        hp_yaw=hp_yaw,
        gram_checksum=checksum(last.gram.k),
    )
    logger.info("benchmark n=%d: mae %.4f deg, %d protocol bytes", last.gram.n, report.mae_private, report.protocol_bytes)
    return report, last_eval.pair
