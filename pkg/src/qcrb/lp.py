"""Dense simplex method for small linear programs.

Solves ::

    maximize    c^T x
    subject to  A_ub x <= b_ub
                lo <= x <= hi

with finite ``lo`` (``hi`` may be ``inf``). The method works on a condensed
dictionary (basic variables as rows, nonbasic variables as columns), uses
Bland's smallest-index rule for both the entering and the leaving variable,
and reaches a feasible basis through Chvatal's one-artificial-variable
auxiliary problem.

The dictionary is rebuilt from the original data every few pivots. If
round-off has pushed the basis out of the feasible region the auxiliary
problem is rerun from the current basis, so an ill-conditioned LP costs extra
pivots rather than giving a wrong answer. Once an optimal basis is found the
primal and dual values are recomputed from the original data by basis solves.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
ITERATION_LIMIT = "iteration_limit"
NUMERICAL = "numerical_failure"

_LOST = "lost_feasibility"

_PIVOT_TOL = 1e-9
_FEAS_TOL = 1e-7  # on row-scaled data; below this a basis has lost feasibility
_ACCEPT_TOL = 1e-10
_HARRIS_TOL = 1e-10
_STALL = 50  # primal feasibility required of the final basis
_REINVERT_EVERY = 16
_MAX_RESTARTS = 20
_WARM_RESTARTS = 3


@dataclass
class LPProblem:
    c: np.ndarray
    A_ub: np.ndarray
    b_ub: np.ndarray
    lo: np.ndarray
    hi: np.ndarray

    @classmethod
    def create(cls, c, A_ub=None, b_ub=None, lo=None, hi=None):
        c = np.asarray(c, dtype=float).ravel()
        n = c.size
        if A_ub is None:
            A_ub = np.zeros((0, n))
            b_ub = np.zeros(0)
        A_ub = np.asarray(A_ub, dtype=float).reshape(-1, n)
        b_ub = np.asarray(b_ub, dtype=float).ravel()
        lo = np.zeros(n) if lo is None else np.broadcast_to(np.asarray(lo, dtype=float), (n,)).copy()
        hi = np.full(n, np.inf) if hi is None else np.broadcast_to(np.asarray(hi, dtype=float), (n,)).copy()
        if b_ub.size != A_ub.shape[0]:
            raise InvalidInputError("A_ub and b_ub disagree in the number of rows")
        if not np.all(np.isfinite(lo)):
            raise InvalidInputError("lower bounds must be finite")
        if np.any(hi < lo):
            raise InvalidInputError("some upper bound is below its lower bound")
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(A_ub)) and np.all(np.isfinite(b_ub))):
            raise InvalidInputError("LP data must be finite")
        return cls(c, A_ub, b_ub, lo, hi)

    @property
    def n(self):
        return self.c.size

    @property
    def m(self):
        return self.b_ub.size


@dataclass
class LPSolution:
    status: str
    x: np.ndarray = None
    objective: float = np.nan
    row_duals: np.ndarray = None  # multipliers of A_ub rows, >= 0
    upper_duals: np.ndarray = None  # multipliers of x <= hi, >= 0
    reduced_costs: np.ndarray = None  # c - A^T y - upper_duals; <= 0 at optimum
    pivots: int = 0
    basis: list = field(default_factory=list)
    n_rows: int = None  # rows of A_ub the basis refers to


def _basis_solve(F, basic, n, M, rhs, transpose=False):
    """Solve with the basis matrix ``B = F[:, basic]`` exploiting slack columns.

    Slack labels ``n <= lab < n + M`` are unit columns of ``F``; only the small
    block of the remaining columns against the uncovered rows needs a dense
    solve. With ``transpose`` solves ``B^T pi = rhs`` (``rhs`` by basis position).
    """
    basic = np.asarray(basic)
    is_slack = (basic >= n) & (basic < n + M)
    pos_s, pos_x = np.flatnonzero(is_slack), np.flatnonzero(~is_slack)
    srows = basic[pos_s] - n
    xcols = basic[pos_x]
    free = np.setdiff1d(np.arange(M), srows, assume_unique=True)
    C = F[np.ix_(free, xcols)]
    Fs = F[np.ix_(srows, xcols)]
    if not transpose:
        out = np.empty_like(rhs, dtype=float)
        xs = np.linalg.solve(C, rhs[free]) if xcols.size else rhs[free][:0]
        out[pos_x] = xs
        out[pos_s] = rhs[srows] - Fs @ xs
        return out
    pi = np.empty(M)
    pi[srows] = rhs[pos_s]
    if xcols.size:
        pi[free] = np.linalg.solve(C.T, rhs[pos_x] - Fs.T @ pi[srows])
    return pi


class _Dictionary:
    """Condensed simplex dictionary ``x_B = b - A x_N``, ``z = v + c^T x_N``.

    ``F [x; slack; x0] = h`` is the original (row-scaled) data with columns
    indexed by variable label. Label ``n + M`` is the auxiliary variable ``x0``
    of the phase-one problem; its column is ``-1`` in every row and it only
    enters the dictionary during phase one.
    """

    def __init__(self, F, h, n):
        M = F.shape[0]
        F = np.hstack([F, -np.ones((M, 1))])
        self.F, self.h, self.n, self.M = F, h, n, M
        self.aux = n + M
        self.basic = list(range(n, n + M))
        self.nonbasic = list(range(n))
        self.A = F[:, :n].copy()
        self.b = h.copy()
        self.c = np.zeros(n)
        self.v = 0.0
        self.pivots = 0

    def columns(self, labels):
        return self.F[:, labels]

    def start_from(self, basic):
        """Replace the slack basis by ``basic``; ``False`` if it is singular."""
        self.basic = list(basic)
        inb = set(self.basic)
        self.nonbasic = [lab for lab in range(self.n + self.M) if lab not in inb]
        if not self.reinvert({}):
            self.basic = list(range(self.n, self.n + self.M))
            self.nonbasic = list(range(self.n))
            self.A = self.F[:, : self.n].copy()
            self.b = self.h.copy()
            return False
        return True

    def set_cost(self, cost):
        """Express the objective ``sum cost[lab] x_lab`` through the nonbasic variables."""
        cb = np.array([cost.get(lab, 0.0) for lab in self.basic])
        cn = np.array([cost.get(lab, 0.0) for lab in self.nonbasic])
        self.c = cn - cb @ self.A
        self.v = float(cb @ self.b)

    def reinvert(self, cost):
        """Rebuild the dictionary from the original data and the current basis."""
        rhs = np.hstack([self.h[:, None], self.columns(self.nonbasic)])
        try:
            sol = _basis_solve(self.F, self.basic, self.n, self.M, rhs)
        except np.linalg.LinAlgError:
            return False
        self.b, self.A = sol[:, 0], sol[:, 1:]
        self.set_cost(cost)
        return True

    def pivot(self, i, j):
        A, b, c = self.A, self.b, self.c
        piv = A[i, j]
        row = A[i] / piv
        row[j] = 1.0 / piv
        bi = b[i] / piv
        col = A[:, j].copy()
        col[i] = 0.0
        A -= np.outer(col, row)
        A[:, j] = -col / piv
        A[i] = row
        b -= col * bi
        b[i] = bi
        cj = c[j]
        c -= cj * row
        c[j] = -cj / piv
        self.v += cj * bi
        self.basic[i], self.nonbasic[j] = self.nonbasic[j], self.basic[i]
        self.pivots += 1

    def entering(self, rule, tol):
        cand = np.flatnonzero(self.c > tol)
        if cand.size == 0:
            return None
        if rule == "bland":
            labels = np.asarray(self.nonbasic)[cand]
            return int(cand[np.argmin(labels)])
        return int(cand[np.argmax(self.c[cand])])

    def leaving(self, j, tol, strict=False):
        """Ratio test: two-pass (Harris) by default, Bland's rule if ``strict``.

        The Harris test finds the longest step keeping every basic variable
        above ``-_HARRIS_TOL``, then picks, among rows blocking before that
        step, the one with the largest pivot element (smallest label on ties).
        Large pivots keep the basis well conditioned. The strict test takes
        the smallest label among exact minimum ratios, which cannot cycle.
        """
        colj = self.A[:, j]
        rows = np.flatnonzero(colj > max(_PIVOT_TOL * np.abs(colj).max(), tol))
        if rows.size == 0:
            return None
        b = np.maximum(self.b[rows], 0.0)
        if strict:
            ratios = b / colj[rows]
            rmin = ratios.min()
            ties = rows[ratios <= rmin + 1e-12 * (1.0 + abs(rmin))]
            labels = np.asarray(self.basic)[ties]
            return int(ties[np.argmin(labels)])
        theta = np.min((b + _HARRIS_TOL) / colj[rows])
        block = rows[b / colj[rows] <= theta]
        piv = colj[block]
        ties = block[piv >= piv.max() * (1 - 1e-12)]
        labels = np.asarray(self.basic)[ties]
        return int(ties[np.argmin(labels)])

    def run(self, rule, tol, max_pivots, cost, reinvert_every):
        """Primal simplex until optimal; Bland's leaving rule takes over after
        ``_STALL`` pivots without objective progress, until progress resumes."""
        best, stalled = self.v, 0
        while True:
            if reinvert_every and self.pivots and self.pivots % reinvert_every == 0:
                if self.reinvert(cost):
                    if self.b.min() < -_FEAS_TOL:
                        return _LOST
                    np.maximum(self.b, 0.0, out=self.b)
            j = self.entering(rule, tol)
            if j is None:
                return OPTIMAL
            i = self.leaving(j, tol, strict=rule == "dantzig" or stalled >= _STALL)
            if i is None:
                return UNBOUNDED
            if self.pivots >= max_pivots:
                return ITERATION_LIMIT
            self.pivot(i, j)
            if self.v > best + 1e-12 * (1.0 + abs(best)):
                best, stalled = self.v, 0
            else:
                stalled += 1

    def dual_cleanup(self, cost, tol, max_pivots, reinvert_every):
        """Dual simplex pivots removing small negative ``b`` at a dual-feasible basis.

        Returns ``True`` when ``b >= -_ACCEPT_TOL`` is reached.
        """
        for _ in range(4 * self.M + 16):
            i = int(np.argmin(self.b))
            if self.b[i] >= -_ACCEPT_TOL:
                return True
            row = self.A[i]
            cand = np.flatnonzero(row < -_PIVOT_TOL * np.abs(row).max())
            if cand.size == 0 or self.pivots >= max_pivots:
                return False
            ratios = np.minimum(self.c[cand], 0.0) / row[cand]
            rmin = ratios.min()
            ties = cand[ratios <= rmin + 1e-12 * (1.0 + abs(rmin))]
            labels = np.asarray(self.nonbasic)[ties]
            self.pivot(i, int(ties[np.argmin(labels)]))
            if reinvert_every and self.pivots % reinvert_every == 0:
                self.reinvert(cost)
        return False

    def drop_aux(self):
        if self.aux in self.basic:
            i = self.basic.index(self.aux)
            self.pivot(i, int(np.argmax(np.abs(self.A[i]))))
        j = self.nonbasic.index(self.aux)
        self.A = np.delete(self.A, j, axis=1)
        self.c = np.delete(self.c, j)
        del self.nonbasic[j]

    def phase_one(self, rule, tol, max_pivots, reinvert_every):
        """Reach a feasible basis from the current one via ``max -x0``.

        Every basic row gets ``+x0``; entering ``x0`` on the most negative row
        makes the auxiliary dictionary feasible.
        """
        self.A = np.hstack([self.A, -np.ones((self.M, 1))])
        self.nonbasic.append(self.aux)
        cost = {self.aux: -1.0}
        self.set_cost(cost)
        self.pivot(int(np.argmin(self.b)), len(self.nonbasic) - 1)
        status = self.run(rule, tol, max_pivots, cost, reinvert_every)
        if status == OPTIMAL and self.v < -1e-9:
            status = INFEASIBLE
        if status in (OPTIMAL, _LOST):
            self.drop_aux()
        return status


def lp_solve(problem, rule="bland", tol=1e-11, max_pivots=50_000, scale_rows=True,
             reinvert_every=_REINVERT_EVERY, warm_start=None):
    """Solve an :class:`LPProblem`.

    Parameters
    ----------
    rule : {"bland", "dantzig"}
        Pivoting rule. ``"bland"`` (the default) cannot cycle. ``"dantzig"``
        (largest reduced cost, smallest label on ratio ties) is provided for
        comparison and may cycle on degenerate problems.
    scale_rows : bool
        Divide every constraint row by its largest coefficient before pivoting.
    reinvert_every : int
        Pivots between rebuilds of the dictionary from the original data;
        ``0`` disables reinversion.
    warm_start : LPSolution, optional
        Optimal solution of an earlier problem with the same objective and
        bounds whose constraint rows are a prefix of ``problem.A_ub``. Its
        basis, extended by the slacks of the new rows, is the starting basis.

    Returns
    -------
    LPSolution
        ``status`` is one of ``"optimal"``, ``"infeasible"``, ``"unbounded"``,
        ``"iteration_limit"`` or ``"numerical_failure"`` (round-off kept
        breaking feasibility); statuses are reported, not raised.
    """
    if rule not in ("bland", "dantzig"):
        raise InvalidInputError(f"unknown pivoting rule {rule!r}")
    p = problem
    n = p.n
    finite_hi = np.flatnonzero(np.isfinite(p.hi))
    R = np.vstack([p.A_ub, np.eye(n)[finite_hi]])
    h = np.concatenate([p.b_ub - p.A_ub @ p.lo, (p.hi - p.lo)[finite_hi]])
    M = R.shape[0]

    scale = np.maximum(np.abs(R).max(axis=1, initial=0.0), np.abs(h))
    scale[scale == 0] = 1.0
    if not scale_rows:
        scale[:] = 1.0
    Rs, hs = R / scale[:, None], h / scale

    d = _Dictionary(np.hstack([Rs, np.eye(M)]), hs, n)
    cost = {k: float(p.c[k]) for k in range(n) if p.c[k] != 0.0}
    start = _warm_basis(warm_start, n, p.m, M)
    warm = start is not None and d.start_from(start)
    d.set_cost(cost)
    for _ in range(_WARM_RESTARTS if warm else _MAX_RESTARTS):
        if M and d.b.min() < -tol:
            status = d.phase_one(rule, tol, max_pivots, reinvert_every)
            if status not in (OPTIMAL, _LOST):
                break
            d.reinvert(cost) if reinvert_every else d.set_cost(cost)
            if status == _LOST:
                continue
            np.maximum(d.b, 0.0, out=d.b)
        status = d.run(rule, tol, max_pivots, cost, reinvert_every)
        if status == _LOST:
            continue
        if status != OPTIMAL:
            break
        # confirm on a freshly rebuilt dictionary; otherwise keep pivoting
        if not reinvert_every or not d.reinvert(cost):
            break
        if d.b.min() < -_ACCEPT_TOL and d.c.max() <= tol:
            d.dual_cleanup(cost, tol, max_pivots, reinvert_every)
            d.reinvert(cost)
        if d.b.min() >= -_ACCEPT_TOL:
            np.maximum(d.b, 0.0, out=d.b)
            if d.c.max() <= tol:
                break
    else:
        status = NUMERICAL
    if status != OPTIMAL:
        # a warm basis can be badly conditioned; retry from the slack basis
        if warm:
            return lp_solve(problem, rule, tol, max_pivots, scale_rows, reinvert_every)
        return LPSolution(status, pivots=d.pivots)
    return _refine(p, R, h, finite_hi, d, scale)


def _warm_basis(warm, n, m, M):
    """Map an earlier optimal basis onto the row layout of the current problem."""
    if warm is None or warm.status != OPTIMAL or warm.n_rows is None:
        return None
    m0 = warm.n_rows
    if m0 > m or len(warm.basis) != M - (m - m0):
        return None
    basic = [lab + (m - m0) if lab >= n + m0 else lab for lab in warm.basis]
    return basic + list(range(n + m0, n + m))


def _refine(p, R, h, finite_hi, d, scale):
    n, m = p.n, p.m
    M = R.shape[0]
    F = np.hstack([R, np.eye(M)])
    cost = np.r_[p.c, np.zeros(M)]
    basic = np.asarray(d.basic)
    try:
        xb = _basis_solve(F, basic, n, M, h)
        pi = _basis_solve(F, basic, n, M, cost[basic], transpose=True)
    except np.linalg.LinAlgError:
        xb, pi = None, None
    full = np.zeros(n + M)
    if xb is not None:
        full[basic] = np.maximum(xb, 0.0)
    else:
        # singular basis matrix: fall back to the tableau values
        vals = np.maximum(d.b, 0.0)
        slack = basic >= n
        vals[slack] *= scale[basic[slack] - n]
        full[basic] = vals
        pi = np.zeros(M)
        for k, lab in enumerate(d.nonbasic):
            if lab >= n:
                pi[lab - n] = -d.c[k] / scale[lab - n]
    pi = np.maximum(pi, 0.0)
    y = full[:n]
    x = p.lo + y
    upper = np.zeros(n)
    upper[finite_hi] = pi[m:]
    row_duals = pi[:m]
    reduced = p.c - p.A_ub.T @ row_duals - upper
    return LPSolution(
        OPTIMAL,
        x=x,
        objective=float(p.c @ x),
        row_duals=row_duals,
        upper_duals=upper,
        reduced_costs=reduced,
        pivots=d.pivots,
        basis=list(d.basic),
        n_rows=m,
    )

