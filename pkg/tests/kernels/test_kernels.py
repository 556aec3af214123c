import numpy as np
import pytest

from src.exceptions import InvalidConfig
from src.kernels.operations import kernel_from_blocks, kernel_from_gram, parse_kernel
from src.kernels.schemas import LinearKernel, PolynomialKernel, RbfKernel
from src.protocol.schemas import GramMatrix


def test_rbf_from_gram():
    k = kernel_from_gram(np.array([[2.0, 0.0], [0.0, 2.0]]), RbfKernel(gamma=0.25))
    assert k[0, 1] == k[1, 0] == pytest.approx(np.exp(-1.0))
    assert k[0, 1] == pytest.approx(0.367879, abs=1e-6)
    assert np.array_equal(np.diag(k), [1.0, 1.0])


def test_linear_is_identity():
    g = np.array([[5.0, 11.0], [11.0, 25.0]])
    assert np.array_equal(kernel_from_gram(GramMatrix(k=g, n_a=1, n_b=1), LinearKernel()), g)


def test_polynomial():
    k = kernel_from_gram(np.full((2, 2), 3.0), PolynomialKernel(degree=2, offset=1.0))
    assert np.array_equal(k, np.full((2, 2), 16.0))


def test_rbf_matches_direct_distances():
    x = np.random.default_rng(0).normal(size=(36, 10))
    g = x.T @ x
    k = kernel_from_gram(g, RbfKernel(gamma=0.1))
    direct = np.exp(-0.1 * ((x[:, :, None] - x[:, None, :]) ** 2).sum(axis=0))
    np.testing.assert_allclose(k, direct, rtol=1e-10, atol=1e-12)


def test_blocks_agree_with_full_gram():
    x = np.random.default_rng(1).normal(size=(5, 8))
    g = x.T @ x
    diag = np.diag(g)
    cfg = RbfKernel(gamma=0.5)
    block = kernel_from_blocks(g[5:, :5], diag[5:], diag[:5], cfg)
    np.testing.assert_allclose(block, kernel_from_gram(g, cfg)[5:, :5], rtol=1e-12)


def test_parse_kernel():
    assert parse_kernel({"kind": "rbf", "gamma": 2.0}) == RbfKernel(gamma=2.0)
    assert parse_kernel({"kind": "polynomial"}) == PolynomialKernel()
    with pytest.raises(InvalidConfig):
        parse_kernel({"kind": "sigmoid"})
    with pytest.raises(InvalidConfig):
        parse_kernel({"kind": "rbf", "gamma": -1.0})


def test_gram_must_be_square():
    with pytest.raises(InvalidConfig):
        kernel_from_gram(np.zeros((2, 3)), LinearKernel())


@pytest.mark.parametrize("cfg", [RbfKernel(gamma=0.5), PolynomialKernel(degree=3), LinearKernel()])
def test_kernel_is_exactly_symmetric(cfg):
    x = np.random.default_rng(2).normal(size=(36, 200))
    g = x.T @ x
    g = np.triu(g) + np.triu(g, 1).T
    k = kernel_from_gram(g, cfg)
    assert np.array_equal(k, k.T)


def test_asymmetric_gram_rejected():
    g = np.array([[1.0, 0.5], [0.25, 1.0]])
    with pytest.raises(InvalidConfig, match="symmetric"):
        kernel_from_gram(g, RbfKernel())


def test_rbf_decreases_with_distance():
    # samples along one axis at growing distance from the origin
    points = np.zeros((3, 50))
    points[0] = np.linspace(0.0, 5.0, 50)
    k = kernel_from_gram(points.T @ points, RbfKernel(gamma=0.5))
    row = k[0]
    assert row[0] == 1.0
    assert np.all(np.diff(row) < 0.0)
    assert np.all(row > 0.0)
