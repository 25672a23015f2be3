"""Statistical models at a point: state, tangent derivatives, SLDs, Fisher matrix.

Coordinates
-----------
A tangent vector ``x`` in R^n stands for the operator ``sum_k x_k D_k``; a
cotangent vector ``xi`` stands for ``sum_k xi_k L_k`` (the SLDs). The pairing
between them is ``xi^T J x`` and the SLD norm of either is ``x^T J x``. In
these coordinates the inverse Fisher matrix ``J^{-1}`` plays the role of the
abstract metric that appears in covariance formulas such as ``V = W^{-1} J^{-1}``.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, InvalidModelError, ModelDegenerateError, NotPSDError
from .linalg import RANK_TOL, _solve_sld_eig, as_hermitian, eig_hermitian

SIGMA = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
IDENTITY2 = np.eye(2, dtype=complex)

TRACE_TOL = 1e-10
SUPPORT_TOL = 1e-9
INDEPENDENCE_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class QuantumModel:
    """Density matrix ``rho`` plus ``n`` tangent derivatives ``D_i``.

    Build through :func:`build_model`, which validates the invariants.
    """

    rho: np.ndarray
    derivs: np.ndarray  # shape (n, d, d)
    names: tuple = ()
    rank_tol: float = RANK_TOL
    _eig: object = field(default=None, repr=False)

    @property
    def dim(self):
        return self.rho.shape[0]

    @property
    def n(self):
        return self.derivs.shape[0]

    @property
    def eig(self):
        return self._eig

    def operator(self, x):
        """Tangent coordinates -> operator ``sum_k x_k D_k``."""
        return np.tensordot(np.asarray(x, dtype=float), self.derivs, axes=1)


@dataclass(frozen=True, eq=False)
class FisherData:
    slds: np.ndarray  # shape (n, d, d)
    J: np.ndarray

    def sld_operator(self, xi):
        """Cotangent coordinates -> operator ``sum_k xi_k L_k``."""
        return np.tensordot(np.asarray(xi, dtype=float), self.slds, axes=1)


def build_model(rho, derivs, names=None, rank_tol=RANK_TOL):
    """Validate and assemble a :class:`QuantumModel`.

    Checks unit trace, positivity, traceless derivatives, support of each
    derivative on ``supp(rho)`` and linear independence of the derivatives.
    Nothing is repaired: a violation raises :class:`InvalidModelError` whose
    ``invariant`` attribute names the failed check.
    """
    rho = as_hermitian(rho, "rho")
    d = rho.shape[0]
    derivs = [as_hermitian(D, f"derivative {i}") for i, D in enumerate(derivs)]
    if not derivs:
        raise InvalidInputError("a model needs at least one derivative")
    for i, D in enumerate(derivs):
        if D.shape != (d, d):
            raise InvalidInputError(f"derivative {i} has shape {D.shape}, expected {(d, d)}")
    cplx = np.iscomplexobj(rho) or any(np.iscomplexobj(D) for D in derivs)
    dt = complex if cplx else float
    rho = rho.astype(dt)
    derivs = np.array([D.astype(dt) for D in derivs])
    n = len(derivs)
    if names is None:
        names = tuple(f"theta{i + 1}" for i in range(n))
    names = tuple(str(s) for s in names)
    if len(names) != n:
        raise InvalidInputError(f"{len(names)} names given for {n} derivatives")

    tr = np.trace(rho).real
    if abs(tr - 1.0) > TRACE_TOL:
        raise InvalidModelError("trace", f"tr rho = {tr!r}, expected 1")
    eig = eig_hermitian(rho)
    if eig.eigenvalues[0] < -rank_tol * eig.eigenvalues[-1]:
        raise NotPSDError(f"rho has negative eigenvalue {eig.eigenvalues[0]:.3e}")

    for i, D in enumerate(derivs):
        t = np.trace(D).real
        if abs(t) > TRACE_TOL:
            raise InvalidModelError("traceless", f"tr D_{i} = {t:.3e}, expected 0")
        try:
            _solve_sld_eig(eig, D, rank_tol, SUPPORT_TOL)
        except ModelDegenerateError as exc:
            raise ModelDegenerateError(f"derivative {i}: {exc}") from None

    flat = derivs.reshape(n, -1)
    gram = np.real(flat.conj() @ flat.T)
    lam_min = np.linalg.eigvalsh(gram)[0]
    if lam_min <= INDEPENDENCE_TOL:
        raise InvalidModelError(
            "independence", f"derivatives are linearly dependent (Gram lambda_min = {lam_min:.3e})"
        )
    return QuantumModel(rho=rho, derivs=derivs, names=names, rank_tol=rank_tol, _eig=eig)


def fisher(model):
    """SLD operators and SLD Fisher matrix ``J_ij = tr(D_i L_j)``."""
    slds = np.array(
        [_solve_sld_eig(model.eig, D, model.rank_tol, SUPPORT_TOL) for D in model.derivs]
    )
    n = model.n
    J = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            J[i, j] = np.real(np.trace(model.derivs[i] @ slds[j]))
    J = 0.5 * (J + J.T)
    lam = np.linalg.eigvalsh(J)[0]
    if lam <= INDEPENDENCE_TOL:
        raise InvalidModelError("fisher", f"Fisher matrix is singular (lambda_min = {lam:.3e})")
    return FisherData(slds=slds, J=J)


def qubit_full(alpha):
    """Full three-parameter qubit model at ``rho = (I + alpha sigma_3)/2``.

    Derivatives are ``sigma_i / 2``; the Fisher matrix is
    ``diag(1, 1, 1/(1 - alpha^2))``.
    """
    alpha = float(alpha)
    if not -1.0 < alpha < 1.0:
        raise InvalidInputError(f"alpha must lie in (-1, 1), got {alpha}")
    rho = 0.5 * (IDENTITY2 + alpha * SIGMA[2])
    return build_model(rho, SIGMA / 2, names=("x", "y", "z"))


def qubit_frame(alpha):
    """Coordinates of the SLD-orthonormal frame f1, f2, f3 of the qubit model.

    Rows are the frame vectors expressed in the ``sigma_i / 2`` coordinates:
    ``f1 = sigma_1/2``, ``f2 = sigma_2/2``, ``f3 = sqrt(1-alpha^2) sigma_3 / 2``.
    """
    return np.diag([1.0, 1.0, np.sqrt(1.0 - float(alpha) ** 2)])


def classical_model(p, derivs, names=None):
    """Commuting model: diagonal ``rho = diag(p)`` and diagonal derivatives.

    ``derivs`` may be given as diagonal matrices or as vectors of diagonal entries.
    """
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or np.any(p <= 0) or abs(p.sum() - 1.0) > TRACE_TOL:
        raise InvalidModelError("probability", "p must be a strictly positive probability vector")
    mats = []
    for i, D in enumerate(derivs):
        D = np.asarray(D, dtype=float)
        if D.ndim == 1:
            D = np.diag(D)
        if np.any(D - np.diag(np.diag(D))):
            raise InvalidInputError(f"derivative {i} of a classical model must be diagonal")
        mats.append(D)
    return build_model(np.diag(p), mats, names=names)


def submodel(model, directions):
    """Model spanned by ``D'_j = sum_i directions[i, j] D_i``.

    Parameters
    ----------
    directions : array_like, shape (n, m)
        Full column rank, ``m <= n``.
    """
    C = np.asarray(directions, dtype=float)
    if C.ndim == 1:
        C = C[:, None]
    if C.shape[0] != model.n or C.shape[1] > model.n:
        raise InvalidInputError(f"directions must have shape (n, m<=n) with n={model.n}")
    if np.linalg.matrix_rank(C) < C.shape[1]:
        raise InvalidInputError("directions are not of full column rank")
    derivs = np.tensordot(C.T, model.derivs, axes=1)
    return build_model(model.rho, derivs, rank_tol=model.rank_tol)


def conjugate(model, U):
    """Unitarily rotated model ``(U rho U^*, U D_i U^*)``."""
    U = np.asarray(U)
    rho = U @ model.rho @ U.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    derivs = [0.5 * (M + M.conj().T) for M in (U @ D @ U.conj().T for D in model.derivs)]
    return build_model(rho, derivs, names=model.names, rank_tol=model.rank_tol)


def check_weight(g, n=None, strict=False):
    """Validate a weight matrix: real symmetric, PSD (PD if ``strict``)."""
    g = np.asarray(g, dtype=float)
    if g.ndim == 0:
        g = g.reshape(1, 1)
    if g.ndim != 2 or g.shape[0] != g.shape[1]:
        raise InvalidInputError(f"weight must be square, got shape {g.shape}")
    if n is not None and g.shape[0] != n:
        raise InvalidInputError(f"weight is {g.shape[0]}x{g.shape[0]}, model has n={n}")
    if np.max(np.abs(g - g.T)) > 1e-12 * max(1.0, np.max(np.abs(g))):
        raise InvalidInputError("weight is not symmetric")
    g = 0.5 * (g + g.T)
    lam = np.linalg.eigvalsh(g)
    if lam[0] < -1e-12 * max(1.0, lam[-1]):
        raise InvalidInputError(f"weight is not PSD (lambda_min = {lam[0]:.3e})")
    if strict and lam[0] <= 1e-12 * max(1.0, lam[-1]):
        raise InvalidInputError("weight must be positive definite")
    return g
