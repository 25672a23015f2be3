"""Random instances and independent oracles shared by the test modules."""

import itertools

import numpy as np

from qcrb.model import build_model


def random_hermitian(rng, d, scale=1.0):
    A = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return scale * 0.5 * (A + A.conj().T)


def random_state(rng, d, rank=None, floor=0.05):
    rank = d if rank is None else rank
    A = rng.standard_normal((d, rank)) + 1j * rng.standard_normal((d, rank))
    rho = A @ A.conj().T
    rho = rho / np.trace(rho).real
    if rank == d:
        rho = (1 - floor) * rho + floor * np.eye(d) / d
    return 0.5 * (rho + rho.conj().T)


def random_model(rng, d, n):
    rho = random_state(rng, d)
    derivs = []
    for _ in range(n):
        D = random_hermitian(rng, d)
        D -= np.trace(D).real / d * np.eye(d)
        derivs.append(D)
    return build_model(rho, derivs)


def random_pd(rng, n, floor=0.1):
    A = rng.standard_normal((n, n))
    return A @ A.T + floor * np.eye(n)


def sym_power(P, p):
    w, U = np.linalg.eigh(P)
    return (U * w**p) @ U.T


def random_unit_trace_W(rng, J, floor=0.2):
    """Positive ``J``-self-adjoint ``W`` with unit trace: ``J^{-1/2} P J^{1/2}``."""
    n = J.shape[0]
    P = random_pd(rng, n, floor)
    P /= np.trace(P)
    return sym_power(J, -0.5) @ P @ sym_power(J, 0.5)


def minimize_trace_over_simplex(M, iters=20000):
    """``min tr(M P^{-1})`` over symmetric PD ``P`` with ``tr P = 1``.

    Projected gradient with backtracking; the gradient ``-P^{-1} M P^{-1}`` is
    projected onto trace-zero matrices. Independent of any closed form.
    """
    n = M.shape[0]
    P = np.eye(n) / n
    f = lambda P: np.trace(M @ np.linalg.inv(P))  # noqa: E731
    val = f(P)
    step = 0.1
    for _ in range(iters):
        Pi = np.linalg.inv(P)
        G = -Pi @ M @ Pi
        G -= np.trace(G) / n * np.eye(n)
        if np.linalg.norm(G) < 1e-13:
            break
        while True:
            Q = P - step * G
            if np.linalg.eigvalsh(Q)[0] > 0 and f(Q) <= val - 0.25 * step * np.sum(G * G):
                break
            step *= 0.5
            if step < 1e-18:
                return val
        P, val = Q, f(Q)
        step *= 2.0
    return val


def vertex_enumeration(c, A, b, lo, hi):
    """Max of ``c x`` over ``A x <= b, lo <= x <= hi`` by checking every vertex."""
    n = len(c)
    G = np.vstack([A, np.eye(n), -np.eye(n)])
    h = np.concatenate([b, hi, -lo])
    combos = np.array(list(itertools.combinations(range(len(h)), n)))
    Gs, hs = G[combos], h[combos]
    ok = np.abs(np.linalg.det(Gs)) > 1e-12
    X = np.linalg.solve(Gs[ok], hs[ok][..., None])[..., 0]
    feasible = np.all(X @ G.T <= h + 1e-9 * (1 + np.abs(h)), axis=1)
    return float(np.max(X[feasible] @ c))


def sld_by_linear_solve(rho, D):
    """Least-norm solution of ``(rho L + L rho)/2 = D`` as a d^2 x d^2 linear system."""
    d = rho.shape[0]
    I = np.eye(d)
    # row-major vec: vec(A X B) = (A kron B^T) vec(X)
    T = 0.5 * (np.kron(rho, I) + np.kron(I, rho.T))
    L = np.linalg.lstsq(T, D.reshape(-1), rcond=None)[0].reshape(d, d)
    return 0.5 * (L + L.conj().T)
