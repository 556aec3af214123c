"""Statistical checks that each party's view looks like uniform noise.

A view is collected many times for one fixed input with fresh masks. Every
coordinate of every share is tested separately: chi-square on each of its
eight byte marginals against uniform, or a two-sample KS test against views
built by the simulator from the output alone.
"""
import logging

import numpy as np
from scipy import stats

from src.audit.schemas import MIN_TRIALS, CoordinateTest, ViewReport, ViewSet
from src.encoding.dare import recover_cross, simulate_dot
from src.exceptions import DimensionMismatch, InsufficientTrials
from src.protocol.operations import alice_setup, build_share_bundle
from src.protocol.schemas import FeatureMatrix, LabelVector, Role
from src.ring.arithmetic import RING_MODULUS, FixedPointCodec
from src.ring.random import EntropyMode, RandomSource
from src.transport.frames import MessageType, decode_randomness, decode_share_upload
from src.transport.session import SessionResult

logger = logging.getLogger(__name__)

SERVER_SHARES = ("C1", "C3", "C2", "C4")
BOB_SHARES = ("r1", "r2", "r3")


def _encode_inputs(alice_x: np.ndarray, bob_x: np.ndarray, codec: FixedPointCodec):
    features = [FeatureMatrix.from_real(x, codec) for x in (alice_x, bob_x)]
    labels = [LabelVector(targets=np.zeros((f.n, 2))) for f in features]
    if features[0].n_f != features[1].n_f:
        raise DimensionMismatch("both parties need the same feature count")
    return features, labels


def _stack(rows: dict[str, list[np.ndarray]]) -> dict[str, np.ndarray]:
    return {name: np.vstack(values).astype(np.uint64) for name, values in rows.items()}


def collect_views(
    alice_x: np.ndarray,
    bob_x: np.ndarray,
    trials: int,
    entropy: EntropyMode = "seeded",
    seed: int = 0,
    frac_bits: int | None = None,
) -> tuple[ViewSet, ViewSet]:
    """Server and Bob views over ``trials`` maskings of fixed inputs (n_f x n reals each)."""
    codec = FixedPointCodec(frac_bits)
    (fa, fb), (la, lb) = _encode_inputs(alice_x, bob_x, codec)
    server = {name: [] for name in SERVER_SHARES}
    bob = {name: [] for name in BOB_SHARES}
    for trial in range(trials):
        source = RandomSource(entropy, [seed, trial] if entropy == "seeded" else None)
        r = alice_setup(fa.n_f, source)
        a = build_share_bundle(Role.ALICE, fa, la, r)
        b = build_share_bundle(Role.BOB, fb, lb, r)
        server["C1"].append(a.masked_matrix.ravel(order="F"))
        server["C3"].append(a.masked_scalars)
        server["C2"].append(b.masked_matrix.ravel(order="F"))
        server["C4"].append(b.masked_scalars)
        bob["r1"].append(r.r1_vec)
        bob["r2"].append(r.r2_vec)
        bob["r3"].append(np.array([r.r3], dtype=np.uint64))
    return ViewSet(owner="server", shares=_stack(server)), ViewSet(owner="bob", shares=_stack(bob))


def views_from_sessions(results: list[SessionResult]) -> tuple[ViewSet, ViewSet]:
    """Server and Bob views read back from recorded session transcripts."""
    server = {name: [] for name in SERVER_SHARES}
    bob = {name: [] for name in BOB_SHARES}
    for result in results:
        for entry in result.transcripts[Role.SERVER].view():
            if entry.frame.msg_type != MessageType.SHARE_UPLOAD:
                continue
            bundle = decode_share_upload(entry.frame.payload)
            names = ("C1", "C3") if bundle.role == Role.ALICE else ("C2", "C4")
            server[names[0]].append(bundle.masked_matrix.ravel(order="F"))
            server[names[1]].append(bundle.masked_scalars)
        for entry in result.transcripts[Role.BOB].view():
            if entry.frame.msg_type == MessageType.RANDOMNESS:
                r = decode_randomness(entry.frame.payload)
                bob["r1"].append(r.r1_vec)
                bob["r2"].append(r.r2_vec)
                bob["r3"].append(np.array([r.r3], dtype=np.uint64))
    return ViewSet(owner="server", shares=_stack(server)), ViewSet(owner="bob", shares=_stack(bob))


def simulate_server_views(
    alice_x: np.ndarray, bob_x: np.ndarray, trials: int, seed: int = 0, frac_bits: int | None = None
) -> ViewSet:
    """Server views produced from the cross product alone, for one sample per party."""
    codec = FixedPointCodec(frac_bits)
    (fa, fb), _ = _encode_inputs(alice_x, bob_x, codec)
    if fa.n != 1 or fb.n != 1:
        raise DimensionMismatch("the simulator covers sessions with one sample per party")
    zeros = np.zeros(1, dtype=np.uint64)
    y = int(recover_cross(fa.data, fb.data, zeros, zeros)[0, 0])
    views = {name: [] for name in SERVER_SHARES}
    for trial in range(trials):
        source = RandomSource("seeded", [seed, trial, 1])
        c1, c2, c3, c4 = simulate_dot(y, source.sample(fa.n_f), source.sample(fa.n_f), source.sample_uniform())
        views["C1"].append(c1)
        views["C3"].append(np.array([c3], dtype=np.uint64))
        views["C2"].append(c2)
        views["C4"].append(np.array([c4], dtype=np.uint64))
    return ViewSet(owner="server", shares=_stack(views))


def _unit(values: np.ndarray) -> np.ndarray:
    return values.astype(np.float64) / float(RING_MODULUS)


def check_view_uniformity(views: ViewSet, min_trials: int = MIN_TRIALS) -> ViewReport:
    if views.trials < min_trials:
        raise InsufficientTrials(f"{views.trials} trials, at least {min_trials} required")
    tests = []
    for name, coordinate, values in views.coordinates():
        as_bytes = values.astype("<u8").view(np.uint8).reshape(-1, 8)
        for byte in range(8):
            counts = np.bincount(as_bytes[:, byte], minlength=256)
            p_value = float(stats.chisquare(counts).pvalue)
            tests.append(CoordinateTest(share=name, coordinate=coordinate, byte=byte, p_value=p_value))
    report = ViewReport(owner=views.owner, method="chi-square", trials=views.trials, tests=tests)
    _log(report)
    return report


def compare_with_simulator(real: ViewSet, simulated: ViewSet) -> ViewReport:
    """Two-sample KS per coordinate between real and simulated views."""
    if real.shares.keys() != simulated.shares.keys():
        raise DimensionMismatch("real and simulated views hold different shares")
    sim = {(name, col): values for name, col, values in simulated.coordinates()}
    tests = []
    for name, coordinate, values in real.coordinates():
        p_value = float(stats.ks_2samp(_unit(values), _unit(sim[name, coordinate])).pvalue)
        tests.append(CoordinateTest(share=name, coordinate=coordinate, p_value=p_value))
    report = ViewReport(owner=real.owner, method="ks", trials=min(real.trials, simulated.trials), tests=tests)
    _log(report)
    return report


def _log(report: ViewReport) -> None:
    if report.leak_detected:
        logger.warning(
            "%s view %s: only %.1f%% of %d tests pass", report.owner, report.method, 100 * report.pass_fraction, len(report.tests)
        )
    else:
        logger.info("%s view %s: %.1f%% of %d tests pass", report.owner, report.method, 100 * report.pass_fraction, len(report.tests))
