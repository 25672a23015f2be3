"""Optimal locally unbiased random measurements and their bound.

For a Fisher matrix ``J`` and weight ``g`` the best deviation ``tr(g V)``
reachable by randomly choosing one SLD observable to measure is
``(tr sqrt(J^{-1} g))^2``. The optimum is realized by measuring the
observables of the eigenvectors of the normalized ``W = sqrt(J^{-1} g) / tr(...)``
with probabilities equal to the eigenvalues of ``W``; its covariance is
``W^{-1} J^{-1}``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateWeightError, InvalidInputError, NotPSDError
from .linalg import EigenDecomp, eig_hermitian, sym_sqrt_and_invsqrt
from .model import check_weight

WEIGHT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class Branch:
    """One simple measurement inside a random measurement.

    With probability ``prob`` the observable ``L_e = sum_k direction_k L_k`` is
    measured; eigenvalue ``lam`` is reported as the estimate
    ``lam * estimator_scale * direction``.
    """

    prob: float
    direction: np.ndarray
    estimator_scale: float
    observable: EigenDecomp

    def outcomes(self):
        """Estimate vectors, one per eigenvalue of the observable, shape (d, n)."""
        return np.outer(self.observable.eigenvalues * self.estimator_scale, self.direction)


@dataclass(frozen=True, eq=False)
class RandomMeasurementPlan:
    branches: tuple
    W: np.ndarray
    J: np.ndarray
    rho: np.ndarray = None

    @property
    def n(self):
        return self.J.shape[0]


@dataclass(frozen=True, eq=False)
class BoundReport:
    bound: float
    W: np.ndarray
    V: np.ndarray
    method: str = "random"

    def to_dict(self):
        return {
            "bound": float(self.bound),
            "W": np.asarray(self.W).tolist(),
            "V": np.asarray(self.V).tolist(),
            "method": self.method,
        }


def _check_J(J):
    J = np.asarray(J, dtype=float)
    if J.ndim == 0:
        J = J.reshape(1, 1)
    if J.ndim != 2 or J.shape[0] != J.shape[1]:
        raise InvalidInputError(f"J must be square, got shape {J.shape}")
    J = 0.5 * (J + J.T)
    try:
        Jh, Jmh = sym_sqrt_and_invsqrt(J)
    except NotPSDError as exc:
        raise InvalidInputError(f"J must be positive definite ({exc})") from None
    return J, Jh, Jmh


def _whitened(J, g):
    J, Jh, Jmh = _check_J(J)
    g = check_weight(g, J.shape[0])
    M = Jmh @ g @ Jmh
    M = 0.5 * (M + M.T)
    # drop round-off so exactly degenerate weights keep the coordinate directions
    M[np.abs(M) <= 8 * np.finfo(float).eps * np.abs(M).max(initial=0.0)] = 0.0
    return J, Jh, Jmh, M


def random_bound(J, g):
    """``(sum_i sqrt(lambda_i))^2`` over the eigenvalues of ``J^{-1} g``.

    ``g`` may be singular; zero eigenvalues contribute nothing.
    """
    _, _, _, M = _whitened(J, g)
    lam = np.clip(eig_hermitian(M).eigenvalues, 0.0, None)
    return float(np.sum(np.sqrt(lam)) ** 2)


def sld_bound(J, g):
    """The SLD Cramer-Rao value ``tr(J^{-1} g)``."""
    J, _, _ = _check_J(J)
    g = check_weight(g, J.shape[0])
    return float(np.trace(np.linalg.solve(J, g)))


def _sqrt_spectrum(J, g):
    J, Jh, Jmh, M = _whitened(J, g)
    lam, U = eig_hermitian(M)
    U = np.real(U)
    if lam[0] <= WEIGHT_TOL * max(1.0, lam[-1]):
        raise DegenerateWeightError(
            f"weight is singular relative to J (lambda_min = {lam[0]:.3e}); "
            "the optimal random measurement needs W invertible"
        )
    r = np.sqrt(lam)
    return J, Jh, Jmh, r / r.sum(), U


def optimal_W(J, g):
    """Normalized principal square root ``W = sqrt(J^{-1} g) / tr sqrt(J^{-1} g)``.

    ``W`` has unit trace, is self-adjoint for ``J`` (``J W = W^T J``) and
    satisfies ``(tr sqrt(J^{-1} g))^2 W^T J W = g``.
    """
    J, Jh, Jmh, w, U = _sqrt_spectrum(J, g)
    return Jmh @ (U * w) @ U.T @ Jh


def build_plan(model, fisher, g):
    """Optimal random measurement for weight ``g`` (must be positive definite)."""
    J = fisher.J
    J, Jh, Jmh, w, U = _sqrt_spectrum(J, g)
    if np.any(w <= WEIGHT_TOL):
        raise DegenerateWeightError("a branch probability vanishes")
    W = Jmh @ (U * w) @ U.T @ Jh
    branches = []
    for i in range(len(w)):
        e = Jmh @ U[:, i]
        e = e / np.sqrt(e @ J @ e)
        obs = eig_hermitian(fisher.sld_operator(e))
        branches.append(Branch(prob=float(w[i]), direction=e, estimator_scale=1.0 / w[i], observable=obs))
    return RandomMeasurementPlan(branches=tuple(branches), W=W, J=J, rho=model.rho)


def plan_covariance(plan):
    """Covariance ``sum_i W_i^{-1} e_i e_i^T`` of a plan (equals ``W^{-1} J^{-1}``)."""
    n = plan.n
    V = np.zeros((n, n))
    for b in plan.branches:
        V += b.estimator_scale * np.outer(b.direction, b.direction)
    return V


def bound_report(model, fisher, g):
    """Bound, optimal ``W`` and predicted covariance bundled for serialization."""
    plan = build_plan(model, fisher, g)
    return BoundReport(bound=random_bound(fisher.J, g), W=plan.W, V=plan_covariance(plan))


def limit_membership(V, J, tol=1e-9):
    """Is ``V`` in the random limit ``{W^{-1} J^{-1} : tr W = 1}``?

    Returns ``(member, W)`` with the witness ``W = (V J)^{-1}`` whether or not
    ``V`` is a member. Membership requires unit trace, a positive spectrum and
    ``J``-self-adjointness, all to within ``tol``.
    """
    V = np.asarray(V, dtype=float)
    J = np.asarray(J, dtype=float)
    if V.shape != J.shape:
        raise InvalidInputError("V and J must have the same shape")
    if abs(np.linalg.det(V)) <= 1e-300 or np.linalg.cond(V) > 1e14:
        raise InvalidInputError("V is singular")
    W = np.linalg.inv(V @ J)
    eigs = np.linalg.eigvals(W)
    positive = bool(np.all(np.abs(eigs.imag) <= tol) and np.all(eigs.real > 0))
    self_adjoint = bool(np.max(np.abs(J @ W - W.T @ J)) <= tol)
    member = abs(np.trace(W) - 1.0) <= tol and positive and self_adjoint
    return bool(member), W


def limit_membership_2param(V, J, tol=1e-9):
    """Two-parameter form of the random limit: ``det X = 1`` for ``X = (V - J^{-1}) J``.

    Returns ``(member, X)``.
    """
    V = np.asarray(V, dtype=float)
    J = np.asarray(J, dtype=float)
    if V.shape != (2, 2) or J.shape != (2, 2):
        raise InvalidInputError("the two-parameter criterion needs n = 2")
    X = (V - np.linalg.inv(J)) @ J
    return bool(abs(np.linalg.det(X) - 1.0) <= tol), X
