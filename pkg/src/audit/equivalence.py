import logging

import numpy as np

from src.eyegen.datasets import split_parties
from src.protocol.operations import plaintext_gram
from src.protocol.schemas import FeatureMatrix, GramMatrix, LabelVector, Role
from src.ring.arithmetic import FixedPointCodec
from src.ring.random import EntropyMode
from src.transport.links import Transport
from src.transport.session import SessionResult, local_configs, run_session_sync

logger = logging.getLogger(__name__)


def reference_gram(
    alice_x: np.ndarray, bob_x: np.ndarray, result: SessionResult, frac_bits: int | None = None
) -> GramMatrix:
    """Plaintext gram of the same quantized data, in the session's shuffled order."""
    codec = FixedPointCodec(frac_bits)
    alice = FeatureMatrix.from_real(alice_x[:, result.permutations[Role.ALICE]], codec)
    bob = FeatureMatrix.from_real(bob_x[:, result.permutations[Role.BOB]], codec)
    return plaintext_gram(alice, bob)


def check_gram_equivalence(
    features: np.ndarray,
    labels: LabelVector,
    seed: int,
    entropy: EntropyMode | None = None,
    frac_bits: int | None = None,
    transport: Transport | None = None,
) -> float:
    """Max |K_private - K_plain| over a full protocol run; zero when the ring recovery is exact."""
    (alice_x, alice_y), (bob_x, bob_y) = split_parties(features, labels)
    configs = local_configs((alice_x, alice_y), (bob_x, bob_y), seed, entropy=entropy, frac_bits=frac_bits)
    result = run_session_sync(*configs, transport=transport)
    plain = reference_gram(alice_x, bob_x, result, configs[2].frac_bits)
    diff = float(np.abs(result.gram.k - plain.k).max())
    logger.info("gram equivalence over n=%d: max |diff| = %g", result.gram.n, diff)
    return diff
