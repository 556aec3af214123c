"""Decomposable affine randomized encoding of ring multiplication.

f(x1, x2; r1, r2, r3) = (x1 + r1, x2 + r2, r2*x1 + r3, r1*x2 + r1*r2 - r3)
recovers x1*x2 as c1*c2 - c3 - c4. The dot-product form concatenates one
such encoding per coordinate and folds the c3/c4 shares into one scalar per
column.
"""
import numpy as np

from src.encoding.schemas import DotRandomness, MulEncoding, MulRandomness
from src.exceptions import DimensionMismatch
from src.ring.arithmetic import RingArray, as_ring_array, ring_add, ring_mul, ring_sub, to_ring


def encode_mul(x1: int, x2: int, r: MulRandomness) -> MulEncoding:
    x1, x2 = to_ring(x1), to_ring(x2)
    return MulEncoding(
        c1=ring_add(x1, r.r1),
        c2=ring_add(x2, r.r2),
        c3=ring_add(ring_mul(r.r2, x1), r.r3),
        c4=ring_sub(ring_add(ring_mul(r.r1, x2), ring_mul(r.r1, r.r2)), r.r3),
    )


def recover_mul(c: MulEncoding) -> int:
    return ring_sub(ring_sub(ring_mul(c.c1, c.c2), c.c3), c.c4)


def simulate_mul(y: int, a1: int, a2: int, a3: int) -> MulEncoding:
    """Encoding with the real encoding's distribution, built from the output alone."""
    a1, a2, a3 = to_ring(a1), to_ring(a2), to_ring(a3)
    return MulEncoding(c1=a1, c2=a2, c3=a3, c4=ring_sub(ring_sub(ring_mul(a1, a2), to_ring(y)), a3))


def _check_length(vec: RingArray, r: DotRandomness, name: str) -> None:
    if vec.ndim != 1 or vec.shape[0] != r.n_f:
        raise DimensionMismatch(f"{name} has {vec.shape[0] if vec.ndim else 0} entries, randomness has {r.n_f}")


def encode_dot_left(x, r: DotRandomness) -> tuple[RingArray, int]:
    x = as_ring_array(x)
    _check_length(x, r, "x")
    c1 = x + r.r1_vec
    c3 = to_ring(int(r.r2_vec @ x) + r.r3)
    return c1, c3


def encode_dot_right(y, r: DotRandomness) -> tuple[RingArray, int]:
    y = as_ring_array(y)
    _check_length(y, r, "y")
    c2 = y + r.r2_vec
    c4 = to_ring(int(r.r1_vec @ y) + int(r.r1_vec @ r.r2_vec) - r.r3)
    return c2, c4


def recover_dot(c1_vec, c2_vec, c3: int, c4: int) -> int:
    c1_vec, c2_vec = as_ring_array(c1_vec), as_ring_array(c2_vec)
    if c1_vec.shape != c2_vec.shape:
        raise DimensionMismatch(f"share lengths differ: {c1_vec.shape} vs {c2_vec.shape}")
    return to_ring(int(c1_vec @ c2_vec) - int(c3) - int(c4))


def simulate_dot(y: int, a1_vec, a2_vec, a3: int) -> tuple[RingArray, RingArray, int, int]:
    """Dot-product shares (c1, c2, c3, c4) consistent with output y, from uniform a1, a2, a3."""
    a1_vec, a2_vec = as_ring_array(a1_vec), as_ring_array(a2_vec)
    if a1_vec.shape != a2_vec.shape:
        raise DimensionMismatch(f"share lengths differ: {a1_vec.shape} vs {a2_vec.shape}")
    a3 = to_ring(a3)
    return a1_vec, a2_vec, a3, to_ring(int(a1_vec @ a2_vec) - to_ring(y) - a3)


# Column-batched forms. Each column of the result equals the per-vector
# function applied to that column.


def _check_rows(matrix: RingArray, r: DotRandomness, name: str) -> None:
    if matrix.ndim != 2 or matrix.shape[0] != r.n_f:
        raise DimensionMismatch(f"{name} must be n_f x n with n_f={r.n_f}, got shape {matrix.shape}")


def encode_columns_left(x: RingArray, r: DotRandomness) -> tuple[RingArray, RingArray]:
    x = as_ring_array(x)
    _check_rows(x, r, "X")
    c1 = x + r.r1_vec[:, None]
    c3 = r.r2_vec @ x + np.uint64(r.r3)
    return c1, c3


def encode_columns_right(y: RingArray, r: DotRandomness) -> tuple[RingArray, RingArray]:
    y = as_ring_array(y)
    _check_rows(y, r, "Y")
    c2 = y + r.r2_vec[:, None]
    c4 = r.r1_vec @ y + np.uint64(to_ring(int(r.r1_vec @ r.r2_vec) - r.r3))
    return c2, c4


def recover_cross(c1: RingArray, c2: RingArray, c3: RingArray, c4: RingArray) -> RingArray:
    """k_ij = sum_d C1[d, i] * C2[d, j] - C3[i] - C4[j] for every (i, j)."""
    if c1.shape[0] != c2.shape[0]:
        raise DimensionMismatch(f"feature counts differ: {c1.shape[0]} vs {c2.shape[0]}")
    if c3.shape != (c1.shape[1],) or c4.shape != (c2.shape[1],):
        raise DimensionMismatch("scalar shares do not match the column counts")
    return c1.T @ c2 - c3[:, None] - c4[None, :]
