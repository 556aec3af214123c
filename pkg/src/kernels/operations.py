import numpy as np
from pydantic import TypeAdapter, ValidationError

from src.exceptions import InvalidConfig
from src.kernels.schemas import KernelConfig, LinearKernel, PolynomialKernel, RbfKernel
from src.protocol.schemas import GramMatrix

_kernel_adapter = TypeAdapter(KernelConfig)

# relative to the largest |g_ij|
SYMMETRY_TOL = 1e-9


def parse_kernel(raw: dict) -> KernelConfig:
    try:
        return _kernel_adapter.validate_python(raw)
    except ValidationError as exc:
        raise InvalidConfig(f"invalid kernel config {raw!r}: {exc.errors()[0]['msg']}")


def kernel_from_blocks(g: np.ndarray, diag_rows: np.ndarray, diag_cols: np.ndarray, cfg: KernelConfig) -> np.ndarray:
    """Kernel values for a block of dot products g[i, j] = x_i . z_j.

    diag_rows[i] = x_i . x_i and diag_cols[j] = z_j . z_j; only rbf needs them.
    """
    g = np.asarray(g, dtype=np.float64)
    if isinstance(cfg, LinearKernel):
        return g.copy()
    if isinstance(cfg, PolynomialKernel):
        return (g + cfg.offset) ** cfg.degree
    if isinstance(cfg, RbfKernel):
        sq_dist = diag_rows[:, None] - 2.0 * g + diag_cols[None, :]
        # rounding can push tiny distances below zero
        np.maximum(sq_dist, 0.0, out=sq_dist)
        return np.exp(-cfg.gamma * sq_dist)
    raise InvalidConfig(f"unsupported kernel {cfg!r}")


def kernel_from_gram(g: GramMatrix | np.ndarray, cfg: KernelConfig) -> np.ndarray:
    """Kernel matrix of the training set, exactly symmetric."""
    k = g.k if isinstance(g, GramMatrix) else np.asarray(g, dtype=np.float64)
    if k.ndim != 2 or k.shape[0] != k.shape[1]:
        raise InvalidConfig(f"gram matrix must be square, got shape {k.shape}")
    scale = float(np.max(np.abs(k))) if k.size else 0.0
    if not np.allclose(k, k.T, rtol=0.0, atol=SYMMETRY_TOL * max(scale, 1.0)):
        raise InvalidConfig("gram matrix is not symmetric")
    diag = np.diag(k).copy()
    out = kernel_from_blocks(k, diag, diag, cfg)
    if isinstance(cfg, RbfKernel):
        np.fill_diagonal(out, 1.0)
    # (i, j) and (j, i) round differently
    return np.triu(out) + np.triu(out, 1).T
