import logging

import numpy as np

from src.encoding.dare import encode_columns_left, encode_columns_right, recover_cross
from src.encoding.schemas import DotRandomness
from src.exceptions import BadKernel, DimensionMismatch, RoleConflict
from src.protocol.schemas import FeatureMatrix, GramMatrix, LabelVector, Role, ShareBundle
from src.ring.arithmetic import FixedPointCodec
from src.ring.random import RandomSource

logger = logging.getLogger(__name__)

RING_UNIT_BYTES = 8

SHUFFLE_STREAM = 0
MASK_STREAM = 1
_ROLE_STREAMS = {Role.ALICE: 0, Role.BOB: 1, Role.SERVER: 2}


def seed_stream(seed: int, role: Role, stream: int) -> list[int]:
    """Independent generator seed per (run seed, role, purpose)."""
    return [seed, _ROLE_STREAMS[role], stream]


def shuffle_dataset(
    features: FeatureMatrix, labels: LabelVector, seed
) -> tuple[FeatureMatrix, LabelVector, np.ndarray]:
    """Permute samples before anything leaves the party.

    The permutation stays with the caller and is never put on the wire.
    """
    if features.n != labels.n:
        raise DimensionMismatch(f"{features.n} feature columns but {labels.n} label rows")
    permutation = np.random.default_rng(seed).permutation(features.n)
    shuffled = FeatureMatrix(data=features.data[:, permutation], frac_bits=features.frac_bits)
    return shuffled, LabelVector(targets=labels.targets[permutation]), permutation


def alice_setup(n_f: int, source: RandomSource) -> DotRandomness:
    if n_f < 1:
        raise DimensionMismatch("n_f must be at least 1")
    r1, r2, r3 = source.sample(n_f), source.sample(n_f), source.sample_uniform()
    return DotRandomness(r1_vec=r1, r2_vec=r2, r3=r3)


def check_psd(matrix: np.ndarray, name: str = "gram") -> None:
    tolerance = 1e-9 * max(matrix.shape[0], 1)
    lowest = float(np.linalg.eigvalsh(matrix).min()) if matrix.size else 0.0
    if lowest < -tolerance * max(1.0, float(np.abs(matrix).max())):
        raise BadKernel(f"{name} is not positive semidefinite (min eigenvalue {lowest:g})")


def build_share_bundle(
    role: Role,
    features: FeatureMatrix,
    labels: LabelVector,
    r: DotRandomness,
    audit: bool = False,
) -> ShareBundle:
    if features.n < 1:
        raise DimensionMismatch("a party must contribute at least one sample")
    if features.n != labels.n:
        raise DimensionMismatch(f"{features.n} feature columns but {labels.n} label rows")
    if features.n_f != r.n_f:
        raise DimensionMismatch(f"features have n_f={features.n_f}, randomness has n_f={r.n_f}")

    quantized = features.decoded()
    if audit:
        features.codec.check_dot_headroom(float(np.abs(quantized).max()), features.n_f)

    if role == Role.ALICE:
        masked_matrix, masked_scalars = encode_columns_left(features.data, r)
    elif role == Role.BOB:
        masked_matrix, masked_scalars = encode_columns_right(features.data, r)
    else:
        raise RoleConflict(f"{role.value} does not hold input data")

    local_gram = quantized.T @ quantized
    # mirror the upper triangle: the block must be exactly symmetric
    local_gram = np.triu(local_gram) + np.triu(local_gram, 1).T
    if audit:
        check_psd(local_gram, f"{role.value} local gram")

    return ShareBundle(
        role=role,
        masked_matrix=masked_matrix,
        masked_scalars=masked_scalars,
        local_gram=local_gram,
        labels=labels,
    )


def assemble_gram(alice: ShareBundle, bob: ShareBundle, frac_bits: int, audit: bool = False) -> GramMatrix:
    if alice.role == bob.role:
        raise RoleConflict(f"two uploads with role {alice.role.value}")
    if alice.role == Role.BOB:
        alice, bob = bob, alice
    if alice.n_f != bob.n_f:
        raise DimensionMismatch(f"n_f differs between parties: {alice.n_f} vs {bob.n_f}")
    if alice.n < 1 or bob.n < 1:
        raise DimensionMismatch("both parties must contribute samples")

    codec = FixedPointCodec(frac_bits)
    raw_cross = recover_cross(alice.masked_matrix, bob.masked_matrix, alice.masked_scalars, bob.masked_scalars)
    if audit:
        codec.check_decodable(raw_cross, 2 * frac_bits)
    cross = codec.decode_product_array(raw_cross)

    k = np.block([[alice.local_gram, cross], [cross.T, bob.local_gram]])
    logger.info("assembled %dx%d gram matrix (n_a=%d, n_b=%d)", k.shape[0], k.shape[1], alice.n, bob.n)
    return GramMatrix(k=k, n_a=alice.n, n_b=bob.n)


def plaintext_gram(alice: FeatureMatrix, bob: FeatureMatrix) -> GramMatrix:
    """Insecure reference: the gram of the pooled quantized data. Never on the wire."""
    if alice.n_f != bob.n_f:
        raise DimensionMismatch(f"n_f differs between parties: {alice.n_f} vs {bob.n_f}")
    pooled = np.hstack([alice.decoded(), bob.decoded()])
    k = pooled.T @ pooled
    k = np.triu(k) + np.triu(k, 1).T
    return GramMatrix(k=k, n_a=alice.n, n_b=bob.n)


def communication_bytes(n_f: int, n_a: int, n_b: int, d: int = RING_UNIT_BYTES) -> int:
    return (n_f * n_a + n_f * n_b + n_a + n_b + 2 * n_f) * d


def holdout_split(n_a: int, n_b: int, test_fraction: float = 0.2) -> tuple[np.ndarray, np.ndarray]:
    """Hold out the trailing ``test_fraction`` of each party's block."""
    if not 0.0 <= test_fraction < 1.0:
        raise ValueError("test_fraction must be in [0, 1)")
    test_a, test_b = int(round(n_a * test_fraction)), int(round(n_b * test_fraction))
    train = np.concatenate([np.arange(0, n_a - test_a), np.arange(n_a, n_a + n_b - test_b)])
    test = np.concatenate([np.arange(n_a - test_a, n_a), np.arange(n_a + n_b - test_b, n_a + n_b)])
    return train, test
