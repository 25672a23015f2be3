"""Lagrange dual of the locally unbiased deviation problem, by cutting planes.

A pair ``(a, S)`` (``a`` an n x n endomorphism of tangent coordinates, ``S``
Hermitian d x d) is dual feasible for the weight ``g`` when ::

    R(a, S; x) = g(x, x) rho - S - a(x)  >= 0      for every tangent x,

where ``a(x)`` is the operator ``sum_k (a x)_k D_k``. Any feasible pair gives
the lower bound ``tr a + tr S`` on ``tr(g V)`` over all locally unbiased
measurements, and in finite dimension the best such bound is attained.

The semi-infinite constraint is relaxed to finitely many rank-one cuts
``<psi| R(a, S; x) |psi> >= 0``, each linear in ``(a, S)``. The master LP over
the current cuts is solved with :func:`qcrb.lp.lp_solve`; a multistart
separation oracle then looks for the most violated ``(x, psi)``. The loop
ends when no cut is violated by more than ``eps_feas``. The final point is
shifted ``S <- S - delta I`` by the verified violation so the returned
certificate is a genuine lower bound even if the loop stopped early.

Internally everything is expressed in Fisher-whitened tangent coordinates
``x_hat = J^{1/2} x``, where the SLD norm is Euclidean and the compactness
box of the dual feasible set can be written entrywise. Reported matrices are
in the model's own coordinates.
"""

import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError, NumericalFailure
from .linalg import eig_hermitian, sym_sqrt_and_invsqrt
from .lp import OPTIMAL, LPProblem, lp_solve
from .model import check_weight
from .randbound import optimal_W, random_bound

log = logging.getLogger(__name__)

EPS_FEAS = 1e-8
BOX_SAFETY = 2.0
# a cut only needs to be violated, so per-round searches stop early;
# the final verification runs the alternation to convergence
ROUND_SEARCH = {"homog_iters": 15, "polish_iters": 40}
# random tangent points screened per multistart (rounds / verification)
X_PER_START = 32
VERIFY_X_PER_START = 100
SMOOTHING = 0.5
GAP_TOL = 1e-8


@dataclass(frozen=True, eq=False)
class Cut:
    """Rank-one constraint ``q r - <psi|S|psi> - sum_jk a_kj x_j d_k >= 0``."""

    x: np.ndarray
    psi: np.ndarray
    r: float
    d: np.ndarray
    q: float


@dataclass(eq=False)
class DualCertificate:
    a: np.ndarray
    S: np.ndarray
    spur: float
    feasibility_margin: float
    rounds: int = 0
    converged: bool = True
    status: str = "optimal"
    raw_margin: float = 0.0
    repair_shift: float = 0.0
    history: list = field(default_factory=list)
    cuts: list = field(default_factory=list, repr=False)
    cut_weights: np.ndarray = field(default=None, repr=False)

    @property
    def valid(self):
        return self.feasibility_margin >= -EPS_FEAS

    def to_dict(self):
        S = np.asarray(self.S, dtype=complex)
        return {
            "a": np.asarray(self.a, dtype=float).tolist(),
            "S": [[[z.real, z.imag] for z in row] for row in S],
            "spur": float(self.spur),
            "margin": float(self.feasibility_margin),
            "rounds": int(self.rounds),
            "status": self.status,
        }


class DualProblem:
    """Whitened data for one (model, weight) pair; shared by master and oracle."""

    def __init__(self, model, fisher, g, rank_tol=1e-12):
        self.model = model
        self.fisher = fisher
        n, d = model.n, model.dim
        self.n, self.d = n, d
        self.g = check_weight(g, n)
        self.Jh, self.B = sym_sqrt_and_invsqrt(fisher.J)  # B = J^{-1/2}
        self.rho = model.rho.astype(complex)
        self.Dh = np.tensordot(self.B.T, model.derivs, axes=1).astype(complex)
        gh = self.B @ self.g @ self.B
        self.gh = 0.5 * (gh + gh.T)
        lam, U = np.linalg.eigh(self.gh)
        keep = lam > rank_tol * max(lam[-1], 0.0)
        self.G = U[:, keep]  # orthonormal basis of range(g_hat)
        self.gh_pinv = (U[:, keep] / lam[keep]) @ U[:, keep].T
        self.g_norm = float(max(lam[-1], 0.0))
        self.r = self.G.shape[1]
        self.na = n * self.r
        self.nvar = self.na + d * d
        self.a_box = BOX_SAFETY * 4.0 * n * self.g_norm
        self.s_box = BOX_SAFETY * 4.0 * n * n * self.g_norm
        iu = np.triu_indices(d, 1)
        self._iu = iu

    # --- coordinates -----------------------------------------------------
    def to_hat_x(self, x):
        return np.asarray(x) @ self.Jh

    def from_hat_x(self, xh):
        return np.asarray(xh) @ self.B

    def a_from_hat(self, ah):
        return self.B @ ah @ self.Jh

    def a_to_hat(self, a):
        return self.Jh @ np.asarray(a, dtype=float) @ self.B

    # --- LP variables ----------------------------------------------------
    def objective(self):
        c = np.zeros(self.nvar)
        c[: self.na] = self.G.ravel()  # tr(b G^T)
        c[self.na : self.na + self.d] = 1.0
        return c

    def unpack(self, z):
        n, r, d = self.n, self.r, self.d
        b = z[: self.na].reshape(n, r)
        ah = b @ self.G.T
        s = z[self.na :]
        S = np.diag(s[:d]).astype(complex)
        m = len(self._iu[0])
        u, v = s[d : d + m], s[d + m :]
        S[self._iu] = u + 1j * v
        S[self._iu[1], self._iu[0]] = u - 1j * v
        return ah, S

    def bounds(self):
        lo = np.empty(self.nvar)
        lo[: self.na] = -self.a_box
        lo[self.na :] = -self.s_box
        return lo, -lo

    def cut_rows(self, xh, psi):
        """LP rows ``coef . z <= rhs`` for cuts at whitened ``xh`` (K, n) and ``psi`` (K, d)."""
        psi = np.atleast_2d(psi)
        xh = np.atleast_2d(xh)
        K = psi.shape[0]
        r = np.einsum("ki,ij,kj->k", psi.conj(), self.rho, psi).real
        dh = np.einsum("ki,mij,kj->km", psi.conj(), self.Dh, psi).real
        q = np.einsum("ki,ij,kj->k", xh, self.gh, xh)
        rows = np.empty((K, self.nvar))
        rows[:, : self.na] = np.einsum("km,kj->kmj", dh, xh @ self.G).reshape(K, -1)
        d = self.d
        rows[:, self.na : self.na + d] = np.abs(psi) ** 2
        z = psi[:, self._iu[0]].conj() * psi[:, self._iu[1]]
        m = z.shape[1]
        rows[:, self.na + d : self.na + d + m] = 2 * z.real
        rows[:, self.na + d + m :] = -2 * z.imag
        return rows, q * r

    # --- separation ------------------------------------------------------
    def _expect(self, psi, ah, S):
        r = np.einsum("ki,ij,kj->k", psi.conj(), self.rho, psi).real
        dh = np.einsum("ki,mij,kj->km", psi.conj(), self.Dh, psi).real
        s = np.einsum("ki,ij,kj->k", psi.conj(), S, psi).real
        return r, dh, s

    def _residual_ops(self, xh, ah, S):
        q = np.einsum("ki,ij,kj->k", xh, self.gh, xh)
        ax = np.tensordot(xh @ ah.T, self.Dh, axes=1)
        return q[:, None, None] * self.rho - ax - S

    def _best_x(self, psi, ah, S):
        r, dh, _ = self._expect(psi, ah, S)
        rr = np.where(r > 1e-300, r, np.inf)
        return (dh @ ah) @ self.gh_pinv / (2.0 * rr[:, None])

    def separate(self, ah, S, psi0, homog_iters=60, polish_iters=400, tol=1e-13):
        """Local minimization of ``<psi|R(x)|psi>`` from each row of ``psi0``.

        A homogenized alternation over unit ``(x, t)`` and unit ``psi`` moves
        the starts into good basins; a dehomogenized alternation (``x`` in
        closed form for fixed ``psi``, then ``psi`` the lowest eigenvector of
        ``R(x)``) finishes. Returns ``(values, xh, psi)`` per start.
        """
        n = self.n
        psi = np.array(psi0, dtype=complex)
        prev = np.full(psi.shape[0], np.inf)
        Hm = np.zeros((psi.shape[0], n + 1, n + 1))
        for _ in range(homog_iters):
            r, dh, s = self._expect(psi, ah, S)
            off = -0.5 * (dh @ ah)
            Hm[:, :n, :n] = r[:, None, None] * self.gh
            Hm[:, :n, n] = off
            Hm[:, n, :n] = off
            Hm[:, n, n] = -s
            w, v = np.linalg.eigh(Hm)
            x, t = v[:, :n, 0], v[:, n, 0]
            q = np.einsum("ki,ij,kj->k", x, self.gh, x)
            Q = (q[:, None, None] * self.rho
                 - t[:, None, None] * np.tensordot(x @ ah.T, self.Dh, axes=1)
                 - (t * t)[:, None, None] * S)
            w, v = np.linalg.eigh(Q)
            psi = v[:, :, 0]
            val = w[:, 0]
            if np.all(np.abs(prev - val) <= tol * (1.0 + np.abs(val))):
                break
            prev = val
        prev = np.full(psi.shape[0], np.inf)
        for _ in range(polish_iters):
            xh = self._best_x(psi, ah, S)
            w, v = np.linalg.eigh(self._residual_ops(xh, ah, S))
            psi = v[:, :, 0]
            val = w[:, 0]
            if np.all(np.abs(prev - val) <= tol * (1.0 + np.abs(val))):
                break
            prev = val
        xh = self._best_x(psi, ah, S)
        val = np.linalg.eigvalsh(self._residual_ops(xh, ah, S))[:, 0]
        # eigenvector of the final operator for the reported cut
        w, v = np.linalg.eigh(self._residual_ops(xh, ah, S))
        return w[:, 0], xh, v[:, :, 0]

    def random_starts(self, k, rng):
        z = rng.standard_normal((k, self.d)) + 1j * rng.standard_normal((k, self.d))
        return z / np.linalg.norm(z, axis=1, keepdims=True)

    def x_radius(self, ah, S):
        """Radius in ``range(g_hat)`` outside which no constraint can be violated.

        For unit ``psi`` and ``x_hat = G y``,
        ``<psi|R|psi> >= lam_min(g_hat) lam_min(rho) |y|^2 - |a_hat| delta |y| - lam_max(S)``
        with ``delta^2 = sum_k |D_hat_k|^2``. Capped when ``rho`` or ``g`` is
        (nearly) singular.
        """
        lam_g = np.linalg.eigvalsh(self.G.T @ self.gh @ self.G)[0] if self.r else 0.0
        alpha = max(lam_g, 0.0) * max(float(self.model.eig.eigenvalues[0]), 0.0)
        beta = np.linalg.norm(ah, 2) * np.sqrt(sum(np.linalg.norm(D, 2) ** 2 for D in self.Dh))
        gamma = max(float(np.linalg.eigvalsh(S)[-1]), 0.0)
        cap = 1e3 * (1.0 + beta)
        if alpha <= 0.0:
            return cap
        return min(cap, (beta + np.sqrt(beta * beta + 4 * alpha * gamma)) / (2 * alpha))

    def x_starts(self, ah, S, k, rng, keep, chunk=4096):
        """Sample ``k`` points of the violation ball and return the lowest
        eigenvectors of ``R(x)`` at the ``keep`` most violated ones."""
        if self.r == 0 or k <= 0:
            return np.zeros((0, self.d), dtype=complex)
        R = self.x_radius(ah, S)
        best_w = np.zeros(0)
        best_v = np.zeros((0, self.d), dtype=complex)
        for lo in range(0, k, chunk):
            m = min(chunk, k - lo)
            u = rng.standard_normal((m, self.r))
            u /= np.linalg.norm(u, axis=1, keepdims=True)
            # half uniform in the ball, half log-uniform in radius
            t = rng.random(m)
            rad = np.where(np.arange(m) % 2 == 0, R * t ** (1.0 / self.r), R * 1e-3 ** t)
            xh = (u * rad[:, None]) @ self.G.T
            w, v = np.linalg.eigh(self._residual_ops(xh, ah, S))
            best_w = np.concatenate([best_w, w[:, 0]])
            best_v = np.vstack([best_v, v[:, :, 0]])
            order = np.argsort(best_w, kind="stable")[:keep]
            best_w, best_v = best_w[order], best_v[order]
        return best_v

    def search(self, ah, S, starts, rng, extra=None, x_samples=0, **kw):
        """Multistart separation; returns all local results sorted by value.

        Starts are random unit vectors, the rows of ``extra``, and eigenvectors
        at the most violated of ``x_samples`` random tangent points.
        """
        psi0 = self.random_starts(starts, rng)
        if extra is not None and len(extra):
            psi0 = np.vstack([np.atleast_2d(extra), psi0])
        if x_samples:
            psi0 = np.vstack([self.x_starts(ah, S, x_samples, rng, keep=starts), psi0])
        threads = _thread_count()
        if threads > 1 and psi0.shape[0] >= 2 * threads:
            chunks = np.array_split(psi0, threads)
            with ThreadPoolExecutor(max_workers=threads) as ex:
                parts = list(ex.map(lambda c: self.separate(ah, S, c, **kw), chunks))
            vals = np.concatenate([p[0] for p in parts])
            xh = np.vstack([p[1] for p in parts])
            psi = np.vstack([p[2] for p in parts])
        else:
            vals, xh, psi = self.separate(ah, S, psi0, **kw)
        order = np.argsort(vals, kind="stable")
        return vals[order], xh[order], psi[order]

    def make_cut(self, xh, psi):
        x = self.from_hat_x(xh)
        r = float(np.real(psi.conj() @ self.rho @ psi))
        dvec = np.real(np.einsum("i,mij,j->m", psi.conj(), self.model.derivs, psi))
        return Cut(x=x, psi=psi, r=r, d=dvec, q=float(x @ self.g @ x))


def _thread_count():
    try:
        return max(1, int(os.environ.get("QCRB_THREADS", "1")))
    except ValueError:
        return 1


def _default_starts(n):
    return 8 * (n + 1)


def oracle(a, S, model, fisher, g, starts=None, rng_seed=0):
    """Most violated constraint of ``(a, S)``.

    Returns ``(min_value, cut)`` where ``min_value`` approximates
    ``min_{x, |psi|=1} <psi| g(x,x) rho - S - a(x) |psi>``. A value
    ``>= -eps`` means no violated cut was found.
    """
    prob = DualProblem(model, fisher, g)
    starts = _default_starts(model.n) if starts is None else int(starts)
    rng = np.random.default_rng(rng_seed)
    S = np.asarray(S, dtype=complex)
    vals, xh, psi = prob.search(prob.a_to_hat(a), S, starts, rng, extra=_eig_starts(prob, S),
                                x_samples=VERIFY_X_PER_START * starts)
    return float(vals[0]), prob.make_cut(xh[0], psi[0])


def _eig_starts(prob, S):
    vecs = [eig_hermitian(S).vectors.T, prob.model.eig.vectors.T]
    return np.vstack(vecs).astype(complex)


def _initial_cuts(prob):
    n = prob.n
    eye = np.eye(n)
    _, U = np.linalg.eigh(prob.fisher.J)
    xs = [np.zeros(n)]
    for v in list(eye) + list(U.T):
        xs += [v, -v]
    psis = [prob.model.eig.vectors.T]
    for D in prob.model.derivs:
        psis.append(eig_hermitian(D).vectors.T)
    psis = np.vstack(psis).astype(complex)
    X = np.array([prob.to_hat_x(x) for x in xs])
    XX = np.repeat(X, len(psis), axis=0)
    PP = np.tile(psis, (len(X), 1))
    return XX, PP


def _dedupe(vals, xh, psi, eps, limit):
    picked = []
    for k in range(len(vals)):
        if vals[k] >= -eps or len(picked) >= limit:
            break
        dup = False
        for j in picked:
            if abs(np.vdot(psi[j], psi[k])) > 1 - 1e-8 and np.linalg.norm(xh[j] - xh[k]) <= 1e-6 * (
                1 + np.linalg.norm(xh[j])
            ):
                dup = True
                break
        if not dup:
            picked.append(k)
    return picked


def _spectral_cuts(prob, ah, S, xh, eps):
    """Every eigenvector of ``R(x)`` with eigenvalue below ``-eps`` gives a cut at ``x``."""
    w, v = np.linalg.eigh(prob._residual_ops(xh, ah, S))
    k, j = np.nonzero(w < -eps)
    return xh[k], v[k, :, j]


def dual_bound(model, fisher, g, eps_feas=EPS_FEAS, max_rounds=200, starts=None, seed=0,
               cuts_per_round=None, verify_starts=None, smoothing=SMOOTHING, gap_tol=GAP_TOL):
    """Best dual lower bound ``max tr a + tr S`` by the cutting-plane method.

    The oracle is queried at ``smoothing * center + (1 - smoothing) * z``,
    where ``z`` is the master LP solution and ``center`` the best point found
    feasible so far (initially ``a = 0, S = 0``). A cut violated at the query
    point is also violated at ``z``, so every round still tightens the master
    LP; a feasible query point becomes the new center.

    Parameters
    ----------
    eps_feas : float
        Stop when the oracle finds no constraint value below ``-eps_feas``
        at the master solution.
    max_rounds : int
        Master LP solves before giving up; the certificate is still repaired
        and valid, with ``converged=False`` and ``status="max_rounds"``.
    starts, verify_starts : int
        Oracle multistarts per round (default ``8(n+1)``) and for the final
        verification (default ten times ``starts``).
    cuts_per_round : int
        Distinct violated local minima turned into cuts per round (default
        ``n + 1``); each contributes every violated eigenvector of ``R(x)``.
    smoothing : float in [0, 1)
        Weight of the center in the query point; ``0`` is plain Kelley.
    gap_tol : float
        Also stop when the master value exceeds the center value by at most
        ``gap_tol * max(1, |master|)``.

    Returns
    -------
    DualCertificate
    """
    prob = DualProblem(model, fisher, g)
    n = model.n
    starts = _default_starts(n) if starts is None else int(starts)
    verify_starts = 10 * starts if verify_starts is None else int(verify_starts)
    cuts_per_round = n + 1 if cuts_per_round is None else int(cuts_per_round)
    if not 0.0 <= smoothing < 1.0:
        raise InvalidInputError("smoothing must lie in [0, 1)")

    X0, P0 = _initial_cuts(prob)
    rows, rhs = prob.cut_rows(X0, P0)
    cut_x, cut_psi = list(X0), list(P0)
    lo, hi = prob.bounds()
    c = prob.objective()
    history = []
    status = "max_rounds"
    sol = None
    warm = None
    rounds = 0
    center = np.zeros(prob.nvar)  # a = 0, S = 0 is feasible
    center_val = 0.0

    def query(z, rng):
        ah, S = prob.unpack(z)
        extra = _eig_starts(prob, S) if warm is None else np.vstack([warm, _eig_starts(prob, S)])
        found = prob.search(ah, S, starts, rng, extra=extra, x_samples=X_PER_START * starts, **ROUND_SEARCH)
        return ah, S, found

    for rnd in range(max_rounds):
        rounds = rnd + 1
        trial = lp_solve(LPProblem.create(c, rows, rhs, lo, hi), warm_start=sol)
        if trial.status != OPTIMAL:
            if sol is None:
                raise NumericalFailure(f"master LP returned status {trial.status!r} in round {rounds}")
            log.warning("master LP returned %r in round %d; keeping the previous point", trial.status, rounds)
            status = "numerical_failure"
            break
        sol = trial
        history.append(sol.objective)
        z = sol.x
        if sol.objective - center_val <= gap_tol * max(1.0, abs(sol.objective)):
            status = "optimal"
            break
        rng = np.random.default_rng([seed, rnd])
        # a stalled master means the smoothed cuts miss z, so separate z itself
        stalled = len(history) > 1 and history[-2] - history[-1] <= gap_tol * max(1.0, abs(history[-1]))
        mix = 0.0 if stalled else smoothing
        ah, S, (vals, xh, psi) = query(mix * center + (1 - mix) * z, rng)
        if vals[0] >= -eps_feas and mix > 0:
            center = mix * center + (1 - mix) * z
            center_val = float(c @ center)
            ah, S, (vals, xh, psi) = query(z, rng)
        log.debug("round %d: master %.12g, center %.12g, oracle %.3e", rounds, sol.objective, center_val,
                  vals[0])
        if vals[0] >= -eps_feas:
            center, center_val = z, float(sol.objective)
            status = "optimal"
            break
        picked = _dedupe(vals, xh, psi, eps_feas, cuts_per_round)
        cx, cp = _spectral_cuts(prob, ah, S, xh[picked], eps_feas)
        new_rows, new_rhs = prob.cut_rows(cx, cp)
        rows = np.vstack([rows, new_rows])
        rhs = np.concatenate([rhs, new_rhs])
        cut_x += list(cx)
        cut_psi += list(cp)
        warm = psi[picked]

    # verify and repair the center and, if different, the last master point
    best = None
    candidates = [center] if status == "optimal" else [center, sol.x]
    for k, zc in enumerate(candidates):
        ah, S = prob.unpack(zc)
        rng = np.random.default_rng([seed + 1, 10**6 + k])
        vals, _, _ = prob.search(ah, S, verify_starts, rng, extra=_eig_starts(prob, S),
                                 x_samples=VERIFY_X_PER_START * verify_starts)
        raw = float(vals[0])
        delta = max(0.0, -raw)
        S = S - delta * np.eye(prob.d)
        a = prob.a_from_hat(ah)
        spur = float(np.trace(a) + np.trace(S).real)
        if best is None or spur > best[0]:
            best = (spur, a, S, raw, delta)
    spur, a, S, raw, delta = best
    # pair the cuts with the duals of the last master LP, which may predate the newest cuts
    m = len(sol.row_duals)
    cuts = [prob.make_cut(x, p) for x, p in zip(cut_x[:m], cut_psi[:m])]
    return DualCertificate(
        a=a,
        S=S,
        spur=spur,
        feasibility_margin=raw + delta,
        rounds=rounds,
        converged=status == "optimal",
        status=status,
        raw_margin=raw,
        repair_shift=delta,
        history=history,
        cuts=cuts,
        cut_weights=sol.row_duals.copy(),
    )


def verify_certificate(cert, model, fisher, g, starts=None, seed=12345):
    """Independent feasibility check; returns the most negative constraint value found."""
    n = model.n
    starts = 10 * _default_starts(n) if starts is None else starts
    val, _ = oracle(cert.a, cert.S, model, fisher, g, starts=starts, rng_seed=seed)
    return val


def qubit_certificate(model, fisher, g, verify=True):
    """Closed-form dual certificate for a full qubit model.

    Uses ``a = 2 c^2 W`` and ``S = -c^2 X rho X`` with ``W`` the optimal
    normalized square root, ``c = tr sqrt(J^{-1} g)`` and ``X`` any SLD of unit
    norm (for a qubit ``X rho X = I - rho`` for every such ``X``).
    """
    if model.dim != 2 or model.n != 3:
        raise InvalidInputError("qubit_certificate needs a full qubit model (d = 2, n = 3)")
    g = check_weight(g, 3, strict=True)
    J = fisher.J
    W = optimal_W(J, g)
    c2 = random_bound(J, g)
    e = np.zeros(3)
    e[0] = 1.0 / np.sqrt(J[0, 0])
    X = fisher.sld_operator(e)
    K = X @ model.rho @ X
    a = 2.0 * c2 * W
    S = -c2 * K
    spur = float(np.trace(a) + np.trace(S).real)
    margin = verify_certificate_values(a, S, model, fisher, g) if verify else np.nan
    return DualCertificate(a=a, S=S, spur=spur, feasibility_margin=margin, rounds=0, status="closed_form")


def verify_certificate_values(a, S, model, fisher, g, starts=None, seed=12345):
    n = model.n
    starts = 10 * _default_starts(n) if starts is None else starts
    val, _ = oracle(a, S, model, fisher, g, starts=starts, rng_seed=seed)
    return val


@dataclass(eq=False)
class RecoveredMeasurement:
    weights: np.ndarray
    outcomes: np.ndarray  # (K, n) estimate vectors
    states: np.ndarray  # (K, d) unit vectors
    probs: np.ndarray  # outcome probabilities mu_c <psi_c|rho|psi_c>
    povm_residual: float
    unbiasedness_residual: float
    mean_residual: float
    deviation: float

    def elements(self):
        return [w * np.outer(p, p.conj()) for w, p in zip(self.weights, self.states)]


def recover_measurement(certificate, cut_pool=None, lp_duals=None, model=None, g=None, drop=1e-12):
    """Candidate measurement read off the final master LP's dual values.

    Cut ``c`` with dual weight ``mu_c`` becomes the POVM element
    ``mu_c |psi_c><psi_c|`` with estimate ``x_c``. Residuals of the POVM
    normalization and of local unbiasedness are reported, not enforced.
    """
    cut_pool = certificate.cuts if cut_pool is None else cut_pool
    lp_duals = certificate.cut_weights if lp_duals is None else lp_duals
    if model is None:
        raise InvalidInputError("recover_measurement needs the model")
    d, n = model.dim, model.n
    g = check_weight(g, n) if g is not None else np.eye(n)
    if not cut_pool:
        return RecoveredMeasurement(
            weights=np.zeros(0), outcomes=np.zeros((0, n)), states=np.zeros((0, d), complex),
            probs=np.zeros(0),
            povm_residual=float(np.sqrt(d)), unbiasedness_residual=float(np.sqrt(n)),
            mean_residual=0.0, deviation=0.0,
        )
    mu = np.asarray(lp_duals[: len(cut_pool)], dtype=float)
    keep = np.flatnonzero(mu > drop)
    cuts = [cut_pool[k] for k in keep]
    mu = mu[keep]
    X = np.array([c.x for c in cuts]).reshape(len(cuts), n)
    P = np.array([c.psi for c in cuts]).reshape(len(cuts), d)
    rr = np.array([c.r for c in cuts])
    dd = np.array([c.d for c in cuts]).reshape(len(cuts), n)
    povm = np.einsum("k,ki,kj->ij", mu, P, P.conj())
    unb = np.einsum("k,kj,km->mj", mu, X, dd) - np.eye(n)
    mean = np.einsum("k,kj,k->j", mu, X, rr)
    dev = float(np.sum(mu * np.einsum("ki,ij,kj->k", X, g, X) * rr))
    return RecoveredMeasurement(
        weights=mu, outcomes=X, states=P, probs=mu * rr,
        povm_residual=float(np.linalg.norm(povm - np.eye(d))),
        unbiasedness_residual=float(np.linalg.norm(unb)),
        mean_residual=float(np.linalg.norm(mean)),
        deviation=dev,
    )
