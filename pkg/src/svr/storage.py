"""REKM model files.

REKM  := magic "REKM" | version u16 | pitch model | yaw model
model := target u8 | kernel kind u8 | gamma f8 | degree u64 | offset f8 | converged u8
         | iterations u64 | n u64 | beta n*f8 | bias f8 | n_sv u64 | support indices n_sv*u64
"""
import struct
from pathlib import Path

import numpy as np

from src.exceptions import DatasetFormatError, InvalidConfig, IoError
from src.kernels.operations import parse_kernel
from src.kernels.schemas import KERNEL_CODES, KernelConfig, PolynomialKernel, RbfKernel
from src.svr.schemas import GazeModelPair, SvrModel

REKM_MAGIC = b"REKM"
REKM_VERSION = 1
_HEADER = struct.Struct("<4sH")
_MODEL_HEAD = struct.Struct("<BBdQdBQQ")
_TARGETS = {"pitch": 0, "yaw": 1}
_KINDS = {code: kind for kind, code in KERNEL_CODES.items()}


def _kernel_fields(kernel: KernelConfig) -> tuple[int, float, int, float]:
    code = KERNEL_CODES[kernel.kind]
    if isinstance(kernel, RbfKernel):
        return code, kernel.gamma, 0, 0.0
    if isinstance(kernel, PolynomialKernel):
        return code, 0.0, kernel.degree, kernel.offset
    return code, 0.0, 0, 0.0


def _kernel_from_fields(code: int, gamma: float, degree: int, offset: float) -> KernelConfig:
    if code not in _KINDS:
        raise DatasetFormatError(f"unknown kernel code {code}")
    kind = _KINDS[code]
    fields = {"rbf": {"gamma": gamma}, "polynomial": {"degree": degree, "offset": offset}}.get(kind, {})
    try:
        return parse_kernel({"kind": kind, **fields})
    except InvalidConfig as exc:
        raise DatasetFormatError(exc.detail)


def _encode_model(model: SvrModel) -> bytes:
    code, gamma, degree, offset = _kernel_fields(model.kernel)
    return b"".join(
        [
            _MODEL_HEAD.pack(_TARGETS[model.target], code, gamma, degree, offset, int(model.converged), model.iterations, model.n_train),
            model.beta.astype("<f8").tobytes(),
            struct.pack("<dQ", model.bias, model.support_indices.size),
            model.support_indices.astype("<u8").tobytes(),
        ]
    )


def _decode_model(data: bytes, offset: int) -> tuple[SvrModel, int]:
    try:
        target, code, gamma, degree, kernel_offset, converged, iterations, n = _MODEL_HEAD.unpack_from(data, offset)
        offset += _MODEL_HEAD.size
        beta = np.frombuffer(data, dtype="<f8", count=n, offset=offset).astype(np.float64)
        offset += 8 * n
        bias, n_sv = struct.unpack_from("<dQ", data, offset)
        offset += 16
        support = np.frombuffer(data, dtype="<u8", count=n_sv, offset=offset).astype(np.int64)
        offset += 8 * n_sv
    except (struct.error, ValueError) as exc:
        raise DatasetFormatError(f"truncated model record: {exc}")
    targets = {v: k for k, v in _TARGETS.items()}
    if target not in targets:
        raise DatasetFormatError(f"unknown model target {target}")
    model = SvrModel(
        beta=beta,
        bias=bias,
        support_indices=support,
        kernel=_kernel_from_fields(code, gamma, degree, kernel_offset),
        target=targets[target],
        converged=bool(converged),
        iterations=iterations,
    )
    return model, offset


def encode_models(pair: GazeModelPair) -> bytes:
    return _HEADER.pack(REKM_MAGIC, REKM_VERSION) + _encode_model(pair.pitch_model) + _encode_model(pair.yaw_model)


def decode_models(data: bytes) -> GazeModelPair:
    if len(data) < _HEADER.size:
        raise DatasetFormatError("file is shorter than the REKM header")
    magic, version = _HEADER.unpack_from(data)
    if magic != REKM_MAGIC:
        raise DatasetFormatError(f"bad magic {magic!r}, expected {REKM_MAGIC!r}")
    if version != REKM_VERSION:
        raise DatasetFormatError(f"unsupported REKM version {version}")
    pitch, offset = _decode_model(data, _HEADER.size)
    yaw, offset = _decode_model(data, offset)
    if offset != len(data):
        raise DatasetFormatError(f"{len(data) - offset} trailing bytes in model file")
    return GazeModelPair(pitch_model=pitch, yaw_model=yaw)


def save_models(path: Path | str, pair: GazeModelPair) -> None:
    try:
        Path(path).write_bytes(encode_models(pair))
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}")


def load_models(path: Path | str) -> GazeModelPair:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}")
    return decode_models(data)
