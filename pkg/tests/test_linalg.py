import numpy as np
import pytest
from numpy.testing import assert_allclose

from helpers import random_hermitian, random_state, sld_by_linear_solve
from qcrb.errors import InvalidInputError, ModelDegenerateError, NotPSDError
from qcrb.linalg import (
    eig_hermitian,
    jordan,
    pinv_psd,
    sld_inner,
    solve_sld,
    sqrt_psd,
)
from qcrb.model import SIGMA

I2 = np.eye(2)


def test_pauli_spectrum():
    assert_allclose(eig_hermitian(SIGMA[2]).eigenvalues, [-1, 1], atol=1e-15)
    assert_allclose(eig_hermitian(SIGMA[1]).eigenvalues, [-1, 1], atol=1e-15)


def test_diagonal_state_spectrum():
    rho = 0.5 * (I2 + 0.5 * SIGMA[2])
    assert_allclose(eig_hermitian(rho).eigenvalues, [0.25, 0.75], atol=1e-15)


@pytest.mark.parametrize("d", [2, 3, 4, 6])
def test_reconstruction_many(d):
    rng = np.random.default_rng(d)
    for _ in range(250):
        H = random_hermitian(rng, d)
        if rng.random() < 0.3:
            H = H.real
        w, U = eig_hermitian(H)
        nrm = max(1.0, np.linalg.norm(H))
        assert np.linalg.norm(H - (U * w) @ U.conj().T) <= 1e-11 * nrm
        assert np.linalg.norm(U.conj().T @ U - np.eye(d)) <= 1e-11
        assert np.all(np.diff(w) >= 0)
        assert_allclose(w, np.linalg.eigvalsh(H), atol=1e-12 * nrm)


def test_canonical_phase():
    rng = np.random.default_rng(7)
    U = eig_hermitian(random_hermitian(rng, 4)).vectors
    for k in range(4):
        col = U[:, k]
        j = np.argmax(np.abs(col) >= np.abs(col).max() * (1 - 1e-9))
        assert col[j].imag == 0 and col[j].real >= 0


def test_eig_deterministic_and_degenerate():
    H = np.diag([1.0, 1.0, 2.0]).astype(complex)
    a, b = eig_hermitian(H), eig_hermitian(H)
    assert np.array_equal(a.vectors, b.vectors)
    assert_allclose(a.eigenvalues, [1, 1, 2])


def test_non_hermitian_rejected():
    with pytest.raises(InvalidInputError):
        eig_hermitian(np.array([[1.0, 2.0], [0.0, 1.0]]))
    with pytest.raises(InvalidInputError):
        eig_hermitian(np.ones((2, 3)))


def test_sqrt_psd_examples():
    assert_allclose(sqrt_psd(np.eye(3)), np.eye(3), atol=1e-15)
    assert_allclose(sqrt_psd(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-14)
    H = np.array([[1, 0.5], [0.5, 1]])
    R = sqrt_psd(H)
    assert_allclose(R @ R, H, atol=1e-12)
    assert np.linalg.eigvalsh(R)[0] >= 0


def test_sqrt_psd_clamps_and_rejects():
    R = sqrt_psd(np.diag([1.0, -1e-12]))
    assert_allclose(R, np.diag([1.0, 0.0]), atol=1e-15)
    with pytest.raises(NotPSDError):
        sqrt_psd(np.diag([1.0, -1e-3]))


def test_pinv_psd():
    assert_allclose(pinv_psd(np.diag([2.0, 0.0]), 1e-10), np.diag([0.5, 0.0]))
    assert_allclose(pinv_psd(np.eye(2)), np.eye(2))
    rng = np.random.default_rng(3)
    for _ in range(20):
        A = rng.standard_normal((3, 2)) + 1j * rng.standard_normal((3, 2))
        H = A @ A.conj().T
        Hp = pinv_psd(H)
        assert np.linalg.norm(H @ Hp @ H - H) <= 1e-10 * np.linalg.norm(H, 2)


@pytest.mark.parametrize("alpha", [0.0, 0.3, -0.6, 0.9])
def test_sld_equatorial(alpha):
    rho = 0.5 * (I2 + alpha * SIGMA[2])
    L = solve_sld(rho, SIGMA[0] / 2)
    assert_allclose(L, SIGMA[0], atol=1e-14)
    assert_allclose(L, sld_by_linear_solve(rho, SIGMA[0] / 2), atol=1e-12)


def test_sld_along_sigma3():
    rho = 0.5 * (I2 + 0.5 * SIGMA[2])
    L = solve_sld(rho, SIGMA[2] / 2)
    assert_allclose(L, (4 * SIGMA[2] - 2 * I2) / 3, atol=1e-14)
    assert_allclose(L, sld_by_linear_solve(rho, SIGMA[2] / 2), atol=1e-12)


def test_sld_pure_state():
    rho = np.diag([1.0, 0.0])
    assert_allclose(solve_sld(rho, SIGMA[0].real / 2), SIGMA[0].real, atol=1e-15)


def test_sld_leaving_support_rejected():
    with pytest.raises(ModelDegenerateError):
        solve_sld(np.diag([1.0, 0.0]), np.diag([0.5, -0.5]))


@pytest.mark.parametrize("rank", [1, 2, 3])
def test_sld_random_rank_deficient(rank):
    rng = np.random.default_rng(10 + rank)
    d = 4
    rho = random_state(rng, d, rank=rank)
    for _ in range(10):
        X = random_hermitian(rng, d)
        D = jordan(rho, X)
        L = solve_sld(rho, D)
        assert np.linalg.norm(jordan(rho, L) - D) <= 1e-9
        w, U = np.linalg.eigh(rho)
        K = U[:, w < 1e-10]
        assert np.linalg.norm(K.conj().T @ L @ K) <= 1e-12
        assert_allclose(L, sld_by_linear_solve(rho, D), atol=1e-8)


def test_sld_inner_examples():
    assert sld_inner(I2 / 2, SIGMA[0], SIGMA[0]) == pytest.approx(1.0)
    rho = 0.5 * (I2 + 0.4 * SIGMA[2])
    assert abs(sld_inner(rho, SIGMA[0], SIGMA[1])) <= 1e-15


def test_sld_inner_psd_and_symmetric():
    rng = np.random.default_rng(5)
    for _ in range(50):
        rho = random_state(rng, 3, rank=rng.integers(1, 4))
        X, Y = random_hermitian(rng, 3), random_hermitian(rng, 3)
        assert sld_inner(rho, X, X) >= -1e-14
        assert sld_inner(rho, X, Y) == pytest.approx(sld_inner(rho, Y, X), abs=1e-12)


def test_kernel_operators_are_null():
    # X living on ker(rho) has zero norm, zero Jordan product and is orthogonal to everything
    rng = np.random.default_rng(8)
    for _ in range(20):
        rho = random_state(rng, 4, rank=2)
        w, U = np.linalg.eigh(rho)
        K = U[:, w < 1e-10]
        X = K @ random_hermitian(rng, 2) @ K.conj().T
        Y = random_hermitian(rng, 4)
        assert abs(sld_inner(rho, X, X)) <= 1e-10
        assert np.linalg.norm(X @ rho + rho @ X) <= 1e-10
        assert np.linalg.norm(X @ rho @ X) <= 1e-10
        assert abs(sld_inner(rho, X, Y)) <= 1e-10
