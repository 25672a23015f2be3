"""Is a model random?

A model is random when ``X rho X`` is the same operator ``K`` for every SLD
``X`` of unit norm. By polarization this is equivalent to ::

    (X_i rho X_j + X_j rho X_i) / 2 = delta_ij K

on a single orthonormal basis of SLDs, which is what is checked here. For a
random model the dual bound and the random-measurement bound coincide.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .model import fisher as _fisher
from .model import qubit_full


@dataclass(frozen=True, eq=False)
class RandomnessReport:
    is_random: bool
    K: np.ndarray
    max_residual: float
    basis_used: np.ndarray  # rows are J-orthonormal tangent directions
    warning: bool = False

    def to_dict(self):
        K = np.asarray(self.K, dtype=complex)
        return {
            "is_random": bool(self.is_random),
            "K": [[[z.real, z.imag] for z in row] for row in K],
            "max_residual": float(self.max_residual),
            "warning": bool(self.warning),
        }


def j_orthonormal_basis(J, order=None):
    """Gram-Schmidt on the coordinate vectors under ``<x, y> = x^T J y``.

    ``order`` permutes the input vectors; rows of the result are the basis.
    """
    J = np.asarray(J, dtype=float)
    n = J.shape[0]
    order = range(n) if order is None else order
    order = list(order)
    if sorted(order) != list(range(n)):
        raise InvalidInputError(f"order must be a permutation of range({n})")
    basis = []
    for k in order:
        v = np.zeros(n)
        v[k] = 1.0
        # two passes keep the result orthonormal to working precision
        for _ in range(2):
            for b in basis:
                v = v - (b @ J @ v) * b
        v = v / np.sqrt(v @ J @ v)
        basis.append(v)
    return np.array(basis)


def check_randomness(model, fisher=None, tol=1e-10, order=None):
    """Test the randomness condition on one ``J``-orthonormal basis.

    Parameters
    ----------
    tol : float
        ``is_random`` holds when every residual
        ``||(X_i rho X_j + X_j rho X_i)/2 - delta_ij K||_F`` is at most ``tol``.
        Residuals within a factor 10 of ``tol`` on either side set ``warning``.
    order : sequence of int, optional
        Input order for Gram-Schmidt. The verdict does not depend on it.
    """
    fisher = _fisher(model) if fisher is None else fisher
    E = j_orthonormal_basis(fisher.J, order)
    rho = model.rho
    X = [fisher.sld_operator(e) for e in E]
    K = X[0] @ rho @ X[0]
    K = 0.5 * (K + K.conj().T)
    worst = 0.0
    n = len(X)
    for i in range(n):
        XiR = X[i] @ rho
        for j in range(i, n):
            P = 0.5 * (XiR @ X[j] + X[j] @ rho @ X[i])
            if i == j:
                P = P - K
            worst = max(worst, float(np.linalg.norm(P)))
    return RandomnessReport(
        is_random=worst <= tol,
        K=K,
        max_residual=worst,
        basis_used=E,
        warning=tol / 10 < worst <= 10 * tol,
    )


def qubit_identity_check(alpha, trials=50, seed=0):
    """Largest ``||L_e rho L_e - (I - rho)||_F`` over random unit directions ``e``."""
    model = qubit_full(alpha)
    fd = _fisher(model)
    rng = np.random.default_rng(seed)
    target = np.eye(2) - model.rho
    worst = 0.0
    for _ in range(int(trials)):
        e = rng.standard_normal(3)
        e /= np.sqrt(e @ fd.J @ e)
        L = fd.sld_operator(e)
        worst = max(worst, float(np.linalg.norm(L @ model.rho @ L - target)))
    return worst
