"""Dense Hermitian linear algebra.

Everything here works on plain ``numpy`` arrays. Hermitian matrices may be
real symmetric (``float``) or complex Hermitian (``complex``); the dtype of
the input is preserved where that makes sense.

The eigensolver is a cyclic complex Jacobi method. It is slower than LAPACK
but deterministic down to the bit for a given input, and its output is
canonicalized (ascending eigenvalues, fixed eigenvector phases) so that
reports built on top of it are reproducible.
"""

from typing import NamedTuple

import numpy as np

from .errors import InvalidInputError, ModelDegenerateError, NotPSDError, NumericalFailure

HERMITIAN_TOL = 1e-12
RANK_TOL = 1e-10

_JACOBI_OFF_TOL = 1e-14
_JACOBI_MAX_SWEEPS = 100


class EigenDecomp(NamedTuple):
    """Spectral decomposition ``H = U diag(eigenvalues) U^*``.

    ``vectors[:, k]`` is the eigenvector for ``eigenvalues[k]``.
    """

    eigenvalues: np.ndarray
    vectors: np.ndarray

    def reconstruct(self):
        U = self.vectors
        return (U * self.eigenvalues) @ U.conj().T


def as_hermitian(H, name="matrix", tol=HERMITIAN_TOL):
    """Return ``H`` as a square array after checking Hermiticity.

    Raises :class:`InvalidInputError` when ``H`` is not square or when
    ``max |H - H^*| > tol``.
    """
    H = np.asarray(H)
    if H.ndim != 2 or H.shape[0] != H.shape[1] or H.shape[0] < 1:
        raise InvalidInputError(f"{name} must be a non-empty square matrix, got shape {H.shape}")
    if not np.all(np.isfinite(H)):
        raise InvalidInputError(f"{name} has non-finite entries")
    if np.iscomplexobj(H):
        H = H.astype(complex)
        if np.max(np.abs(H.imag)) == 0.0:
            H = H.real.copy()
    else:
        H = H.astype(float)
    err = np.max(np.abs(H - H.conj().T))
    if err > tol:
        raise InvalidInputError(f"{name} is not Hermitian (max |H - H*| = {err:.3e})")
    return H


def _canonical_phase(U):
    # first component of (numerically) largest modulus made real and >= 0
    mod = np.abs(U)
    for k in range(U.shape[1]):
        col = mod[:, k]
        j = int(np.flatnonzero(col >= col.max() * (1 - 1e-9))[0])
        z = U[j, k]
        if np.iscomplexobj(U):
            U[:, k] *= np.conj(z) / abs(z)
            U[j, k] = abs(z)
        elif z < 0:
            U[:, k] = -U[:, k]
    return U


def eig_hermitian(H):
    """Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Sweeps over all pairs ``(p, q)`` in row order until the off-diagonal
    Frobenius mass drops below ``1e-14 * ||H||_F``.

    Parameters
    ----------
    H : array_like, shape (d, d)
        Real symmetric or complex Hermitian matrix.

    Returns
    -------
    EigenDecomp
        Eigenvalues ascending; eigenvectors unitary with canonical phases.
    """
    A = as_hermitian(H, "H").copy()
    d = A.shape[0]
    cplx = np.iscomplexobj(A)
    V = np.eye(d, dtype=A.dtype)
    scale = max(np.linalg.norm(A), np.finfo(float).tiny)

    for _ in range(_JACOBI_MAX_SWEEPS):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= _JACOBI_OFF_TOL * scale:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = A[p, q]
                r = abs(apq)
                if r <= 1e-300 or r <= 1e-18 * scale:
                    continue
                app, aqq = A[p, p].real, A[q, q].real
                theta = (aqq - app) / (2.0 * r)
                t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                if cplx:
                    ph = np.conj(apq) / r
                    R = np.array([[c, s], [-s * ph, c * ph]])
                else:
                    sg = 1.0 if apq > 0 else -1.0
                    R = np.array([[c, s], [-s * sg, c * sg]])
                idx = [p, q]
                A[:, idx] = A[:, idx] @ R
                A[idx, :] = R.conj().T @ A[idx, :]
                A[p, q] = A[q, p] = 0.0
                A[p, p] = A[p, p].real
                A[q, q] = A[q, q].real
                V[:, idx] = V[:, idx] @ R
    else:
        raise NumericalFailure("Jacobi eigensolver did not converge")

    w = np.diag(A).real.copy()
    order = np.argsort(w, kind="stable")
    w = w[order]
    V = _canonical_phase(V[:, order].copy())
    return EigenDecomp(w, V)


def _spectral_norm(w):
    return float(np.max(np.abs(w))) if w.size else 0.0


def sqrt_psd(H):
    """Principal square root of a positive semidefinite matrix.

    Eigenvalues in ``[-1e-10 ||H||, 0)`` are treated as zero; anything more
    negative raises :class:`NotPSDError`.
    """
    w, U = eig_hermitian(H)
    nrm = _spectral_norm(w)
    if w[0] < -RANK_TOL * nrm:
        raise NotPSDError(f"smallest eigenvalue {w[0]:.3e} is negative")
    w = np.clip(w, 0.0, None)
    return (U * np.sqrt(w)) @ U.conj().T


def pinv_psd(H, rank_tol=RANK_TOL):
    """Moore-Penrose pseudo-inverse of a PSD matrix.

    Eigenvalues below ``rank_tol * lambda_max`` are treated as zero.
    """
    w, U = eig_hermitian(H)
    cut = rank_tol * max(w[-1], 0.0)
    inv = np.zeros_like(w)
    keep = w > cut
    inv[keep] = 1.0 / w[keep]
    return (U * inv) @ U.conj().T


def inv_sqrt_pd(H):
    """``H^{-1/2}`` for a positive definite matrix."""
    w, U = eig_hermitian(H)
    if w[0] <= RANK_TOL * max(w[-1], 0.0):
        raise NotPSDError(f"matrix is not positive definite (lambda_min = {w[0]:.3e})")
    return (U / np.sqrt(w)) @ U.conj().T


def support_projector(rho, rank_tol=RANK_TOL):
    """Orthogonal projectors onto ``supp(rho)`` and ``ker(rho)``."""
    w, U = eig_hermitian(rho)
    keep = w > rank_tol * max(w[-1], 0.0)
    Us, Uk = U[:, keep], U[:, ~keep]
    return Us @ Us.conj().T, Uk @ Uk.conj().T


def solve_sld(rho, D, rank_tol=RANK_TOL, support_tol=1e-9):
    """Symmetric logarithmic derivative ``L`` with ``(rho L + L rho)/2 = D``.

    Solved in the eigenbasis of ``rho``: ``L_jk = 2 D_jk / (s_j + s_k)``.
    Components with ``s_j + s_k <= rank_tol * s_max`` (the ker-ker block) are
    set to zero, which picks the representative supported on ``supp(rho)``.

    Raises
    ------
    ModelDegenerateError
        If ``D`` has weight on the ker-ker block beyond ``support_tol``; such a
        ``D`` is not of the form ``rho o X`` for any ``X``.
    """
    rho = as_hermitian(rho, "rho")
    D = as_hermitian(D, "D")
    if D.shape != rho.shape:
        raise InvalidInputError("rho and D must have the same shape")
    return _solve_sld_eig(eig_hermitian(rho), D, rank_tol, support_tol)


def _solve_sld_eig(eig, D, rank_tol=RANK_TOL, support_tol=1e-9):
    s, U = eig
    denom = s[:, None] + s[None, :]
    mask = denom > rank_tol * max(s[-1], 0.0)
    Dt = U.conj().T @ D @ U
    leak = np.max(np.abs(Dt[~mask]), initial=0.0)
    if leak > support_tol * max(1.0, np.max(np.abs(D))):
        raise ModelDegenerateError(
            f"derivative has weight {leak:.3e} outside the support of rho"
        )
    Lt = np.zeros_like(Dt)
    Lt[mask] = 2.0 * Dt[mask] / denom[mask]
    L = U @ Lt @ U.conj().T
    L = 0.5 * (L + L.conj().T)
    if np.iscomplexobj(L) and not np.iscomplexobj(D) and not np.iscomplexobj(U):
        L = L.real
    return L


def sld_inner(rho, X, Y):
    """SLD inner product ``Re tr(rho X Y)`` of two Hermitian operators."""
    return float(np.real(np.trace(np.asarray(rho) @ np.asarray(X) @ np.asarray(Y))))


def jordan(rho, X):
    """Symmetrized product ``(rho X + X rho) / 2``."""
    return 0.5 * (rho @ X + X @ rho)


def sym_sqrt_and_invsqrt(J):
    """Return ``(J^{1/2}, J^{-1/2})`` for a real symmetric positive definite ``J``."""
    w, U = eig_hermitian(np.asarray(J, dtype=float))
    if w[0] <= RANK_TOL * max(w[-1], 0.0):
        raise NotPSDError(f"matrix is not positive definite (lambda_min = {w[0]:.3e})")
    U = np.real(U)
    r = np.sqrt(w)
    return (U * r) @ U.T, (U / r) @ U.T
