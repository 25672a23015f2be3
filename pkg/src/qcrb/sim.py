"""Exact and Monte Carlo evaluation of random measurement plans.

A plan picks branch ``i`` with probability ``p_i``, measures the observable
``L_{e_i}`` and reports ``lam * s_i * e_i`` for eigenvalue ``lam``. Its
outcome law under a state ``tau`` follows from the spectral projectors of the
observables, so every statistic below can be computed exactly from the
eigendecompositions already stored in the plan.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .duallp import RecoveredMeasurement
from .errors import InvalidInputError, NumericalFailure
from .model import check_weight
from .randbound import RandomMeasurementPlan

PROB_TOL = 1e-12
EIGEN_GROUP_TOL = 1e-9
BLOCK = 1 << 14


def outcome_law(branch, tau):
    """Distinct outcome values of one branch and their probabilities under ``tau``.

    Eigenvalues closer than ``1e-9 * max|lam|`` are merged into one outcome,
    so degenerate eigenspaces carry their total weight.
    """
    lam, U = branch.observable
    w = np.real(np.einsum("ik,ij,jk->k", U.conj(), tau, U))
    scale = max(np.max(np.abs(lam)), 1.0)
    values, probs = [], []
    k = 0
    while k < len(lam):
        j = k
        while j + 1 < len(lam) and lam[j + 1] - lam[k] <= EIGEN_GROUP_TOL * scale:
            j += 1
        values.append(float(np.mean(lam[k : j + 1])))
        probs.append(float(np.sum(w[k : j + 1])))
        k = j + 1
    return np.array(values), np.array(probs)


def _clean_probs(p, what):
    p = np.asarray(p, dtype=float)
    if np.any(p < -PROB_TOL) or np.any(p > 1 + PROB_TOL):
        raise NumericalFailure(f"{what} outside [0, 1]: {p}")
    p = np.clip(p, 0.0, None)
    total = p.sum()
    if abs(total - 1.0) > 1e-9:
        raise NumericalFailure(f"{what} sum to {total!r}")
    return p / total


def exact_expectation(plan, tau):
    """Mean estimate ``sum_i p_i s_i e_i tr(L_{e_i} tau)`` under an operator ``tau``.

    Linear in ``tau``; ``tau`` need not be a state.
    """
    tau = np.asarray(tau)
    out = np.zeros(plan.n)
    for b in plan.branches:
        lam, U = b.observable
        w = np.real(np.einsum("ik,ij,jk->k", U.conj(), tau, U))
        out += b.prob * b.estimator_scale * float(lam @ w) * b.direction
    return out


def exact_covariance(plan, rho=None):
    """Second moment ``sum_i p_i s_i^2 tr(rho L_{e_i}^2) e_i e_i^T`` of the estimates.

    The estimates have mean zero at ``rho``, so this is their covariance.
    """
    rho = plan.rho if rho is None else rho
    V = np.zeros((plan.n, plan.n))
    for b in plan.branches:
        lam, U = b.observable
        w = np.real(np.einsum("ik,ij,jk->k", U.conj(), rho, U))
        V += b.prob * b.estimator_scale**2 * float(lam**2 @ w) * np.outer(b.direction, b.direction)
    return V


@dataclass(frozen=True, eq=False)
class SampleResult:
    mean: np.ndarray
    cov: np.ndarray  # uncentered second moment, comparable to exact_covariance
    stderr: np.ndarray  # standard error of each cov entry
    n_samples: int


def _branch_tables(plan, rho):
    probs = _clean_probs([b.prob for b in plan.branches], "branch probabilities")
    tables = []
    for i, b in enumerate(plan.branches):
        values, p = outcome_law(b, rho)
        p = _clean_probs(p, f"outcome probabilities of branch {i}")
        tables.append((np.outer(values * b.estimator_scale, b.direction), p))
    return probs, tables


def _sample_block(probs, tables, size, seed_seq):
    rng = np.random.default_rng(seed_seq)
    branch = rng.choice(len(probs), size=size, p=probs)
    n = tables[0][0].shape[1]
    X = np.empty((size, n))
    for i, (outcomes, p) in enumerate(tables):
        idx = np.flatnonzero(branch == i)
        if idx.size:
            X[idx] = outcomes[rng.choice(len(p), size=idx.size, p=p)]
    P = np.einsum("ki,kj->kij", X, X)
    return X.sum(axis=0), P.sum(axis=0), (P * P).sum(axis=0)


def sample(plan, rho=None, N=100_000, seed=0, threads=1):
    """Draw ``N`` estimates from ``plan`` at state ``rho``.

    Samples are drawn in fixed blocks of ``2**14``, each from its own stream
    spawned from ``seed``, so the result does not depend on ``threads``.
    """
    N = int(N)
    if N < 1:
        raise InvalidInputError("N must be at least 1")
    rho = plan.rho if rho is None else np.asarray(rho)
    probs, tables = _branch_tables(plan, rho)
    sizes = [BLOCK] * (N // BLOCK) + ([N % BLOCK] if N % BLOCK else [])
    seqs = np.random.SeedSequence(seed).spawn(len(sizes))
    job = lambda a: _sample_block(probs, tables, *a)  # noqa: E731
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            parts = list(ex.map(job, zip(sizes, seqs)))
    else:
        parts = [job(a) for a in zip(sizes, seqs)]
    s1 = sum(p[0] for p in parts)
    s2 = sum(p[1] for p in parts)
    s4 = sum(p[2] for p in parts)
    mean = s1 / N
    cov = s2 / N
    var = np.clip(s4 / N - cov**2, 0.0, None)
    return SampleResult(mean=mean, cov=cov, stderr=np.sqrt(var / N), n_samples=N)


def deviation(plan_or_recovery, g, rho=None):
    """Expected weighted squared error ``sum g(x, x) Prob(x)`` of a measurement."""
    m = plan_or_recovery
    if isinstance(m, RecoveredMeasurement):
        g = check_weight(g, m.outcomes.shape[1])
        return float(np.sum(m.probs * np.einsum("ki,ij,kj->k", m.outcomes, g, m.outcomes)))
    if not isinstance(m, RandomMeasurementPlan):
        raise InvalidInputError("expected a RandomMeasurementPlan or RecoveredMeasurement")
    g = check_weight(g, m.n)
    rho = m.rho if rho is None else rho
    total = 0.0
    for b in m.branches:
        values, p = outcome_law(b, rho)
        q = float(b.direction @ g @ b.direction) * b.estimator_scale**2
        total += b.prob * q * float(values**2 @ p)
    return total


def unbiasedness_matrix(plan):
    """``U_kj = sum_i p_i s_i (J e_i)_k (e_i)_j``; local unbiasedness means ``U = I``.

    Entry ``(k, j)`` is the functional ``sum_i p_i <X_i, a(x_i)>`` evaluated at
    the basis endomorphism ``a = E_kj``, whose trace is ``delta_kj``.
    """
    U = np.zeros((plan.n, plan.n))
    for b in plan.branches:
        U += b.prob * b.estimator_scale * np.outer(plan.J @ b.direction, b.direction)
    return U
