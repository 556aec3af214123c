import numpy as np
import pytest
from scipy import stats

from src.encoding.dare import (
    encode_columns_left,
    encode_columns_right,
    encode_dot_left,
    encode_dot_right,
    encode_mul,
    recover_cross,
    recover_dot,
    recover_mul,
    simulate_dot,
    simulate_mul,
)
from src.encoding.schemas import DotRandomness, MulEncoding, MulRandomness
from src.exceptions import DimensionMismatch
from src.ring.arithmetic import RING_MODULUS, as_ring_array
from src.ring.random import RandomSource


def _dot(x: np.ndarray, y: np.ndarray) -> int:
    return sum(int(a) * int(b) for a, b in zip(x, y)) % RING_MODULUS


def _randomness(r1, r2, r3) -> DotRandomness:
    return DotRandomness(r1_vec=as_ring_array(r1), r2_vec=as_ring_array(r2), r3=r3)


@pytest.mark.parametrize(
    "x1, x2, r, expected",
    [
        (3, 5, (2, 7, 11), (5, 12, 32, 13)),
        (0, 0, (0, 0, 0), (0, 0, 0, 0)),
    ],
)
def test_encode_mul(x1, x2, r, expected):
    encoding = encode_mul(x1, x2, MulRandomness(r1=r[0], r2=r[1], r3=r[2]))
    assert encoding.as_tuple() == expected


@pytest.mark.parametrize("c, expected", [((5, 12, 32, 13), 15), ((0, 0, 0, 0), 0)])
def test_recover_mul(c, expected):
    assert recover_mul(MulEncoding(c1=c[0], c2=c[1], c3=c[2], c4=c[3])) == expected


@pytest.mark.parametrize("y, a, expected", [(15, (5, 12, 32), (5, 12, 32, 13)), (0, (0, 0, 0), (0, 0, 0, 0))])
def test_simulate_mul(y, a, expected):
    assert simulate_mul(y, *a).as_tuple() == expected


def test_mul_recovers_product_for_random_inputs():
    values = RandomSource("seeded", 11).sample(5 * 10_000).reshape(-1, 5)
    for x1, x2, r1, r2, r3 in (map(int, row) for row in values):
        encoding = encode_mul(x1, x2, MulRandomness(r1=r1, r2=r2, r3=r3))
        assert recover_mul(encoding) == x1 * x2 % RING_MODULUS


def test_simulated_mul_matches_real_distribution():
    source = RandomSource("seeded", 5)
    x1, x2 = 123456789, RING_MODULUS - 42
    real, simulated = [], []
    for _ in range(5000):
        r1, r2, r3, a1, a2, a3 = (int(v) for v in source.sample(6))
        real.append(encode_mul(x1, x2, MulRandomness(r1=r1, r2=r2, r3=r3)).as_tuple())
        simulated.append(simulate_mul(x1 * x2, a1, a2, a3).as_tuple())
    real, simulated = np.array(real, dtype=np.float64), np.array(simulated, dtype=np.float64)
    for component in range(4):
        assert stats.ks_2samp(real[:, component], simulated[:, component]).pvalue > 0.001


def test_encode_dot_left():
    c1, c3 = encode_dot_left([1, 2], _randomness([5, 6], [7, 8], 9))
    assert c1.tolist() == [6, 8]
    assert c3 == 32


def test_encode_dot_right():
    c2, c4 = encode_dot_right([3, 4], _randomness([5, 6], [7, 8], 9))
    assert c2.tolist() == [10, 12]
    assert c4 == 113


def test_recover_dot():
    assert recover_dot([6, 8], [10, 12], 32, 113) == 11
    assert recover_dot([0, 0], [0, 0], 0, 0) == 0


def test_dot_with_zero_randomness():
    r = _randomness([0] * 4, [0] * 4, 0)
    c1, c3 = encode_dot_left([0] * 4, r)
    assert not c1.any() and c3 == 0


def test_dot_length_mismatch():
    r = _randomness([1] * 35, [2] * 35, 3)
    with pytest.raises(DimensionMismatch):
        encode_dot_left([1] * 36, r)
    with pytest.raises(DimensionMismatch):
        encode_dot_right([1] * 36, r)


def test_dot_recovers_plaintext_for_random_inputs():
    source = RandomSource("seeded", 3)
    for _ in range(1000):
        x, y = source.sample(36), source.sample(36)
        r = DotRandomness(r1_vec=source.sample(36), r2_vec=source.sample(36), r3=source.sample_uniform())
        c1, c3 = encode_dot_left(x, r)
        c2, c4 = encode_dot_right(y, r)
        assert recover_dot(c1, c2, c3, c4) == _dot(x, y)


def test_simulated_dot_decodes_to_output():
    source = RandomSource("seeded", 4)
    c1, c2, c3, c4 = simulate_dot(987654321, source.sample(36), source.sample(36), source.sample_uniform())
    assert recover_dot(c1, c2, c3, c4) == 987654321


def test_column_forms_recover_every_cross_product():
    source = RandomSource("seeded", 8)
    x, y = source.sample(36 * 5).reshape(36, 5), source.sample(36 * 7).reshape(36, 7)
    r = DotRandomness(r1_vec=source.sample(36), r2_vec=source.sample(36), r3=source.sample_uniform())
    c1, c3 = encode_columns_left(x, r)
    c2, c4 = encode_columns_right(y, r)
    cross = recover_cross(c1, c2, c3, c4)
    assert cross.shape == (5, 7)
    assert np.array_equal(cross, x.T @ y)
    # each column matches the per-vector encoding
    single_c1, single_c3 = encode_dot_left(x[:, 2], r)
    assert np.array_equal(c1[:, 2], single_c1) and int(c3[2]) == single_c3


def test_recover_cross_rejects_mismatched_shares():
    zeros = np.zeros((3, 2), dtype=np.uint64)
    with pytest.raises(DimensionMismatch):
        recover_cross(zeros, np.zeros((4, 2), dtype=np.uint64), np.zeros(2, np.uint64), np.zeros(2, np.uint64))
