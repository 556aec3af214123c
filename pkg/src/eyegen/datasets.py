"""Synthetic gaze datasets and the REKD file format.

REKD := magic "REKD" | version u16 | n u64 | n_f u64 | n records of (n_f features, pitch, yaw) as binary64
"""
import csv
import logging
import struct
from pathlib import Path

import numpy as np
from Crypto.Hash import SHA256

from src.exceptions import DatasetFormatError, IoError
from src.eyegen.geometry import landmarks, to_features
from src.eyegen.schemas import EyeModelParams
from src.protocol.schemas import LabelVector

logger = logging.getLogger(__name__)

REKD_MAGIC = b"REKD"
REKD_VERSION = 1
REKD_HEADER = struct.Struct("<4sHQQ")
_F8 = np.dtype("<f8")


def generate_dataset(n: int, params: EyeModelParams | None = None) -> tuple[np.ndarray, LabelVector]:
    """n samples with pitch and yaw uniform in the sampling range; features are n_f x n."""
    if n < 1:
        raise ValueError("n must be at least 1")
    params = params or EyeModelParams()
    rng = np.random.default_rng(params.seed)
    angles = rng.uniform(-params.max_angle, params.max_angle, size=(n, 2))
    features = to_features(landmarks(angles[:, 0], angles[:, 1], params), params)
    return features.T.copy(), LabelVector(targets=angles)


def split_parties(
    features: np.ndarray, labels: LabelVector
) -> tuple[tuple[np.ndarray, LabelVector], tuple[np.ndarray, LabelVector]]:
    """Split samples between Alice and Bob; Alice gets the extra one when n is odd."""
    n_a = (labels.n + 1) // 2
    alice = (features[:, :n_a], LabelVector(targets=labels.targets[:n_a]))
    bob = (features[:, n_a:], LabelVector(targets=labels.targets[n_a:]))
    return alice, bob


def encode_dataset(features: np.ndarray, labels: LabelVector) -> bytes:
    n_f, n = features.shape
    if labels.n != n:
        raise DatasetFormatError(f"{n} feature columns but {labels.n} label rows")
    records = np.hstack([features.T, labels.targets]).astype(_F8)
    return REKD_HEADER.pack(REKD_MAGIC, REKD_VERSION, n, n_f) + records.tobytes()


def decode_dataset(data: bytes) -> tuple[np.ndarray, LabelVector]:
    if len(data) < REKD_HEADER.size:
        raise DatasetFormatError("file is shorter than the REKD header")
    magic, version, n, n_f = REKD_HEADER.unpack_from(data)
    if magic != REKD_MAGIC:
        raise DatasetFormatError(f"bad magic {magic!r}, expected {REKD_MAGIC!r}")
    if version != REKD_VERSION:
        raise DatasetFormatError(f"unsupported REKD version {version}")
    expected = REKD_HEADER.size + n * (n_f + 2) * _F8.itemsize
    if len(data) != expected:
        raise DatasetFormatError(f"expected {expected} bytes for {n} records of {n_f} features, got {len(data)}")
    records = np.frombuffer(data, dtype=_F8, offset=REKD_HEADER.size).reshape(n, n_f + 2).astype(np.float64)
    return records[:, :n_f].T.copy(), LabelVector(targets=records[:, n_f:].copy())


def write_dataset(path: Path | str, features: np.ndarray, labels: LabelVector) -> str:
    """Write a REKD file and return its SHA-256."""
    data = encode_dataset(features, labels)
    try:
        Path(path).write_bytes(data)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}")
    logger.info("wrote %d samples to %s", labels.n, path)
    return SHA256.new(data).hexdigest()


def read_dataset(path: Path | str) -> tuple[np.ndarray, LabelVector]:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}")
    return decode_dataset(data)


def file_checksum(path: Path | str) -> str:
    try:
        return SHA256.new(Path(path).read_bytes()).hexdigest()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}")


def export_csv(path: Path | str, features: np.ndarray, labels: LabelVector) -> None:
    n_f = features.shape[0]
    header = [f"f{i}" for i in range(n_f)] + ["pitch", "yaw"]
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for column, target in zip(features.T, labels.targets):
                writer.writerow([repr(float(v)) for v in column] + [repr(float(v)) for v in target])
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}")
