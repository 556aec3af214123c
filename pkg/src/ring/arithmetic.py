"""Fixed-point reals embedded in the ring Z_{2^64}.

Scalars are plain Python ints reduced modulo 2^64; vectors and matrices are
``numpy.uint64`` arrays, whose arithmetic already wraps modulo 2^64.
"""
import numpy as np
import numpy.typing as npt
from Crypto.Hash import SHA256

from src.config import settings
from src.exceptions import OutOfRange, OverflowDetected

RING_BITS = 64
RING_MODULUS = 1 << RING_BITS
RING_DTYPE = np.dtype("<u8")

RingArray = npt.NDArray[np.uint64]


def to_ring(value: int) -> int:
    return value % RING_MODULUS


def ring_add(a: int, b: int) -> int:
    return (a + b) % RING_MODULUS


def ring_sub(a: int, b: int) -> int:
    return (a - b) % RING_MODULUS


def ring_mul(a: int, b: int) -> int:
    return (a * b) % RING_MODULUS


def to_signed(value: int) -> int:
    """Representative of ``value`` in [-2^63, 2^63)."""
    value = to_ring(value)
    return value - RING_MODULUS if value >= RING_MODULUS // 2 else value


def as_ring_array(values) -> RingArray:
    """Coerce ints (possibly negative or >= 2^64) into a uint64 array."""
    if isinstance(values, np.ndarray) and values.dtype == np.uint64:
        return values
    if isinstance(values, np.ndarray) and values.dtype.kind == "i":
        return values.astype(np.int64).view(np.uint64)
    reduced = [to_ring(int(v)) for v in np.ravel(np.asarray(values, dtype=object))]
    return np.array(reduced, dtype=np.uint64).reshape(np.shape(values))


class FixedPointCodec:
    """Round-to-nearest fixed point with ``frac_bits`` fractional bits.

    The representable range is halved twice over the raw signed range so that
    the product of two encoded values (which carries ``2 * frac_bits``
    fractional bits) still decodes without wrapping.
    """

    def __init__(self, frac_bits: int | None = None):
        frac_bits = settings.frac_bits if frac_bits is None else frac_bits
        if not 0 <= frac_bits < 31:
            raise OutOfRange(f"frac_bits must be in [0, 31), got {frac_bits}")
        self.frac_bits = frac_bits
        self.scale = float(1 << frac_bits)
        self.bound = float(2 ** (RING_BITS - 1 - 2 * frac_bits))

    def __repr__(self) -> str:
        return f"FixedPointCodec(frac_bits={self.frac_bits})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FixedPointCodec) and other.frac_bits == self.frac_bits

    def __hash__(self) -> int:
        return hash(self.frac_bits)

    def _check_range(self, x: np.ndarray) -> None:
        if not np.all(np.isfinite(x)):
            raise OutOfRange("cannot encode non-finite values")
        if x.size and (np.min(x) < -self.bound or np.max(x) >= self.bound):
            raise OutOfRange(
                f"values must lie in [-{self.bound:g}, {self.bound:g}) at frac_bits={self.frac_bits}"
            )

    def encode(self, x: float) -> int:
        self._check_range(np.asarray([x], dtype=np.float64))
        return to_ring(int(np.rint(x * self.scale)))

    def decode(self, e: int, frac_bits: int | None = None) -> float:
        frac_bits = self.frac_bits if frac_bits is None else frac_bits
        return to_signed(e) / float(1 << frac_bits)

    def encode_array(self, x: npt.ArrayLike) -> RingArray:
        x = np.asarray(x, dtype=np.float64)
        self._check_range(x)
        return np.rint(x * self.scale).astype(np.int64).view(np.uint64)

    def decode_array(self, e: RingArray, frac_bits: int | None = None) -> npt.NDArray[np.float64]:
        frac_bits = self.frac_bits if frac_bits is None else frac_bits
        return np.asarray(e, dtype=np.uint64).view(np.int64).astype(np.float64) / float(1 << frac_bits)

    def decode_product_array(self, e: RingArray) -> npt.NDArray[np.float64]:
        return self.decode_array(e, 2 * self.frac_bits)

    def quantize(self, x: npt.ArrayLike) -> npt.NDArray[np.float64]:
        return self.decode_array(self.encode_array(x))

    def check_decodable(self, e: RingArray, frac_bits: int | None = None) -> None:
        """Audit-mode guard: raw values decoded at ``frac_bits`` must be in range."""
        frac_bits = self.frac_bits if frac_bits is None else frac_bits
        signed = np.asarray(e, dtype=np.uint64).view(np.int64)
        limit = 2 ** (RING_BITS - 1 - 2 * self.frac_bits + frac_bits)
        if signed.size and np.max(np.abs(signed.astype(np.float64))) >= limit:
            raise OverflowDetected(f"ring value outside the decodable range at {frac_bits} fractional bits")

    def check_dot_headroom(self, max_abs: float, n_f: int) -> None:
        """Raise if a length-``n_f`` dot product of values bounded by ``max_abs`` can wrap."""
        worst = n_f * (max_abs * self.scale + 0.5) ** 2
        if worst >= 2.0 ** (RING_BITS - 1):
            raise OverflowDetected(
                f"dot products of {n_f} features with |x| <= {max_abs:g} overflow at frac_bits={self.frac_bits}"
            )


def checksum(matrix: npt.ArrayLike) -> str:
    """SHA-256 of a real matrix as little-endian binary64."""
    data = np.ascontiguousarray(np.asarray(matrix, dtype="<f8"))
    return SHA256.new(data.tobytes()).hexdigest()
