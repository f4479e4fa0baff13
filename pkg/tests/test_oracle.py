import numpy as np
import pytest

from nbekcf.kernel import KernelConfig
from nbekcf.oracle import (brute_autocorrelation, brute_circulant_correlation, brute_gram_matrix,
                           brute_kernel_matrix, circulant_filters)


def test_ones_autocorrelation():
    assert np.array_equal(brute_autocorrelation(np.ones((5, 4, 3)), 2, 3), np.full((4, 2), 18.0))


def test_ramp_autocorrelation():
    z = np.arange(1.0, 10.0).reshape(3, 3)
    assert np.array_equal(brute_autocorrelation(z, 2, 2), [[46, 74], [154, 206]])


def test_delta_filter():
    z = np.random.default_rng(0).random((5, 5, 1))
    x = np.zeros((2, 2, 1))
    x[0, 0, 0] = 1
    C = brute_circulant_correlation(x, z)
    assert np.array_equal(C[0, 0], z[:4, :4, 0])
    # the shifted delta sits at (1, 1)
    assert np.array_equal(C[1, 1], z[1:, 1:, 0])


def test_worked_example():
    C = brute_circulant_correlation(np.arange(1.0, 10.0).reshape(3, 3),
                                    np.arange(1.0, 26.0).reshape(5, 5))
    assert C[0, 0, 0, 0] == 411
    assert C[1, 1, 0, 0] == 267


def test_linearity_in_filter():
    rng = np.random.default_rng(1)
    x1, x2, z = rng.random((2, 3, 1)), rng.random((2, 3, 1)), rng.random((4, 5, 1))
    lhs = brute_circulant_correlation(2 * x1 - x2, z)
    rhs = 2 * brute_circulant_correlation(x1, z) - brute_circulant_correlation(x2, z)
    assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-12)


def test_filters_are_cyclic_shifts():
    x = np.arange(6.0).reshape(2, 3, 1)
    F = circulant_filters(x)
    assert F.shape == (2, 3, 2, 3, 1)
    assert F[1, 2, 1, 2, 0] == x[0, 0, 0]


def test_gram_diagonal_and_linear_kernel():
    rng = np.random.default_rng(2)
    x = rng.random((2, 2, 2))
    assert np.array_equal(np.diag(brute_gram_matrix(x)), np.ones(4))
    z = rng.random((4, 4, 2))
    K = brute_kernel_matrix(x, z, KernelConfig(kind="linear"))
    C = brute_circulant_correlation(x, z)
    assert np.allclose(K, C.reshape(4, 9).T, rtol=1e-14)


def test_size_guard():
    with pytest.raises(ValueError):
        brute_autocorrelation(np.ones((17, 3, 1)), 2, 2)
    with pytest.raises(ValueError):
        brute_circulant_correlation(np.ones((2, 2, 1)), np.ones((3, 17, 1)))
    with pytest.raises(ValueError):
        brute_kernel_matrix(np.ones((2, 2, 1)), np.ones((20, 20, 1)))
