"""Dense two-phase tableau simplex.

Small, auditable LP solver used by the face oracle and the l1 decoder.
Problems are stated as::

    minimize    c @ x
    subject to  A_ub @ x <= b_ub
                A_eq @ x == b_eq
                lb <= x <= ub          (entries may be -inf / +inf)

Every variable is mapped onto non-negative standard-form columns, the rows are
sign-normalized so the right-hand side is non-negative, and Phase I drives a
set of artificial columns to zero. Entering columns are picked by Dantzig's
rule; after a run of degenerate pivots the solver falls back to Bland's rule
until the objective strictly improves, which rules out cycling.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-7
DEFAULT_MAX_PIVOTS = 50_000
_DEGENERATE_STREAK = 30
_HARRIS_DELTA = 1e-10
_REFACTOR_EVERY = 40
# Pivots smaller than this fraction of their column are avoided when possible.
_REL_PIVOT_TOL = 1e-6
_MAX_BASIS_COND = 1e12
_MAX_PIVOT_TRIES = 10


class LpStatus(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"
    NUMERICAL_FAILURE = "numerical-failure"


@dataclass
class LinearProgram:
    """An LP in inequality/equality/bounds form (minimization)."""

    c: np.ndarray
    A_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None
    A_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    lb: np.ndarray | None = None
    ub: np.ndarray | None = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).ravel()
        n = self.c.size
        self.A_ub, self.b_ub = _rows(self.A_ub, self.b_ub, n, "ub")
        self.A_eq, self.b_eq = _rows(self.A_eq, self.b_eq, n, "eq")
        self.lb = np.zeros(n) if self.lb is None else np.asarray(self.lb, dtype=float).ravel()
        self.ub = np.full(n, np.inf) if self.ub is None else np.asarray(self.ub, dtype=float).ravel()
        if self.lb.size != n or self.ub.size != n:
            raise ValueError("bounds must have one entry per variable")
        for name in ("c", "A_ub", "b_ub", "A_eq", "b_eq"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"{name} has non-finite entries")
        if np.any(np.isnan(self.lb)) or np.any(np.isnan(self.ub)):
            raise ValueError("bounds must not be NaN")
        if np.any(self.lb == np.inf) or np.any(self.ub == -np.inf):
            raise ValueError("bounds must allow at least one finite value")

    @property
    def num_vars(self) -> int:
        return self.c.size

    def violation(self, x: np.ndarray) -> float:
        """Largest constraint violation of ``x``, by direct substitution."""
        x = np.asarray(x, dtype=float)
        worst = 0.0
        if self.b_ub.size:
            worst = max(worst, float(np.max(self.A_ub @ x - self.b_ub, initial=0.0)))
        if self.b_eq.size:
            worst = max(worst, float(np.max(np.abs(self.A_eq @ x - self.b_eq))))
        worst = max(worst, float(np.max(self.lb - x, initial=0.0)))
        worst = max(worst, float(np.max(x - self.ub, initial=0.0)))
        return worst

    def rhs_scale(self) -> float:
        vals = [np.max(np.abs(b), initial=0.0) for b in (self.b_ub, self.b_eq)]
        return 1.0 + float(max(vals))


def _rows(A, b, n, tag):
    if A is None:
        if b is not None and np.size(b):
            raise ValueError(f"b_{tag} given without A_{tag}")
        return np.zeros((0, n)), np.zeros(0)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    if A.shape != (b.size, n):
        raise ValueError(f"A_{tag} has shape {A.shape}, expected {(b.size, n)}")
    return A, b


@dataclass
class LpOutcome:
    status: LpStatus
    x: np.ndarray | None = None
    objective: float = float("nan")
    max_violation: float = float("nan")
    pivots: int = 0
    phase1_objective: float = float("nan")
    farkas: np.ndarray | None = None
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status is LpStatus.OPTIMAL


@dataclass
class _StandardForm:
    # x = offset + transform @ y, y >= 0
    offset: np.ndarray
    transform: np.ndarray
    A: np.ndarray
    b: np.ndarray
    cost: np.ndarray
    basis: list = field(default_factory=list)
    n_struct: int = 0
    n_art: int = 0
    # standard-form row i == row_scale[i] * (original row i), ub rows first
    row_scale: tuple | None = None


def _standard_form(lp: LinearProgram) -> _StandardForm:
    n = lp.num_vars
    offset = np.zeros(n)
    columns = []  # (original index, sign)
    bound_rows = []  # (column index, upper bound on that column)
    for j in range(n):
        lo, hi = lp.lb[j], lp.ub[j]
        if np.isfinite(lo):
            offset[j] = lo
            columns.append((j, 1.0))
            if np.isfinite(hi):
                bound_rows.append((len(columns) - 1, hi - lo))
        elif np.isfinite(hi):
            offset[j] = hi
            columns.append((j, -1.0))
        else:
            columns.append((j, 1.0))
            columns.append((j, -1.0))
    ny = len(columns)
    transform = np.zeros((n, ny))
    for p, (j, sgn) in enumerate(columns):
        transform[j, p] = sgn

    A_ub = lp.A_ub @ transform
    b_ub = lp.b_ub - lp.A_ub @ offset
    if bound_rows:
        extra = np.zeros((len(bound_rows), ny))
        for r, (p, cap) in enumerate(bound_rows):
            extra[r, p] = 1.0
        A_ub = np.vstack([A_ub, extra])
        b_ub = np.concatenate([b_ub, [cap for _, cap in bound_rows]])
    A_eq = lp.A_eq @ transform
    b_eq = lp.b_eq - lp.A_eq @ offset

    m_ub, m_eq = b_ub.size, b_eq.size
    m = m_ub + m_eq
    # Columns: structural | slacks | artificials
    slack_sign = np.ones(m_ub)
    A = np.zeros((m, ny + m_ub))
    A[:m_ub, :ny] = A_ub
    A[:m_ub, ny:ny + m_ub] = np.eye(m_ub)
    A[m_ub:, :ny] = A_eq
    b = np.concatenate([b_ub, b_eq])
    flip = b < 0
    A[flip] *= -1.0
    b[flip] *= -1.0
    row_scale = np.where(flip, -1.0, 1.0)
    slack_sign[flip[:m_ub]] = -1.0

    # Crash basis: a slack, or a structural column that is a positive
    # multiple of a unit vector, starts basic in its row; others get artificials.
    row_basic = {}
    for i in range(m_ub):
        if slack_sign[i] > 0:
            row_basic[i] = ny + i
    nz = A[:, :ny] != 0
    for j in np.flatnonzero(nz.sum(axis=0) == 1):
        i = int(np.flatnonzero(nz[:, j])[0])
        if i not in row_basic and A[i, j] > 0:
            scale = A[i, j]
            A[i] /= scale
            b[i] /= scale
            row_scale[i] /= scale
            row_basic[i] = int(j)
    needs_art = [i for i in range(m) if i not in row_basic]
    art = np.zeros((m, len(needs_art)))
    basis = []
    art_of_row = {i: a for a, i in enumerate(needs_art)}
    for i in range(m):
        if i in art_of_row:
            art[i, art_of_row[i]] = 1.0
            basis.append(ny + m_ub + art_of_row[i])
        else:
            basis.append(row_basic[i])
    A = np.hstack([A, art])
    cost = np.concatenate([lp.c @ transform, np.zeros(m_ub + len(needs_art))])
    return _StandardForm(offset, transform, A, b, cost, basis, ny + m_ub, len(needs_art),
                         _original_rows(row_scale, lp, bound_rows))


def _original_rows(row_scale, lp, bound_rows):
    # Bound rows are appended after the user's ub rows; they carry no user dual.
    n_ub = lp.b_ub.size
    n_bound = len(bound_rows)
    return np.concatenate([row_scale[:n_ub], row_scale[n_ub + n_bound:]]), n_ub, n_bound


class _Tableau:
    """Rows 0..m-1 are constraints; row m is phase-II cost, row m+1 phase-I cost.

    The original standard-form data is kept so the tableau can be rebuilt from
    the current basis, which bounds the rounding error picked up by long runs
    of rank-one updates.
    """

    def __init__(self, sf: _StandardForm):
        m, ncols = sf.A.shape
        self.m = m
        self.ncols = ncols
        self.A0 = sf.A
        self.b0 = sf.b
        self.costs = np.zeros((2, ncols))
        self.costs[0] = sf.cost
        self.costs[1, sf.n_struct:] = 1.0
        self.basis = list(sf.basis)
        self.n_struct = sf.n_struct
        self.allowed = np.ones(ncols, dtype=bool)
        self.pivots = 0
        self.T = np.zeros((m + 2, ncols + 1))
        self.T[:m, :ncols] = sf.A
        self.T[:m, -1] = sf.b
        self._price()

    def _price(self):
        m = self.m
        T = self.T
        T[m:, :self.ncols] = self.costs
        T[m:, -1] = 0.0
        cb = self.costs[:, self.basis]
        T[m:] -= cb @ T[:m]

    def refactor(self) -> bool:
        """Rebuild the tableau from the original data; False if the basis is singular."""
        if self.m == 0:
            self._price()
            return True
        B = self.A0[:, self.basis]
        if np.linalg.cond(B) > _MAX_BASIS_COND:
            return False
        try:
            body = np.linalg.solve(B, np.column_stack([self.A0, self.b0]))
        except np.linalg.LinAlgError:
            return False
        if not np.all(np.isfinite(body)):
            return False
        self.T[:self.m] = body
        for i, bcol in enumerate(self.basis):
            self.T[:self.m, bcol] = 0.0
            self.T[i, bcol] = 1.0
        self._price()
        return True

    def drop_rows(self, keep: np.ndarray):
        self.basis = [b for b, k in zip(self.basis, keep) if k]
        self.A0 = self.A0[keep]
        self.b0 = self.b0[keep]
        self.T = np.vstack([self.T[:self.m][keep], self.T[self.m:]])
        self.m = len(self.basis)

    def pivot(self, row: int, col: int):
        T = self.T
        T[row] /= T[row, col]
        colvals = T[:, col].copy()
        colvals[row] = 0.0
        T -= np.outer(colvals, T[row])
        T[:, col] = 0.0
        T[row, col] = 1.0
        self.basis[row] = col
        self.pivots += 1
        if self.pivots % _REFACTOR_EVERY == 0:
            self.refactor()

    def run(self, cost_row: int, max_pivots: int, stop_below: float | None = None) -> str:
        """Iterate to optimality for the given cost row; returns a status tag.

        ``cost_row`` is 0 for the true objective and 1 for phase I.
        ``stop_below`` ends the run early once the objective value drops under
        it (phase I cannot go below zero, so there is nothing left to gain).
        """
        m = self.m
        r = m + cost_row
        streak = 0
        while True:
            T = self.T
            if stop_below is not None and -T[r, -1] <= stop_below:
                return "optimal"
            if self.pivots >= max_pivots:
                return "limit"
            red = T[r, :self.ncols]
            candidates = np.flatnonzero((red < -PIVOT_TOL) & self.allowed)
            if candidates.size:
                # Reduced costs are only trusted relative to the column scale.
                colscale = 1.0 + np.abs(T[:m, candidates]).max(axis=0, initial=0.0)
                candidates = candidates[red[candidates] < -PIVOT_TOL * colscale]
            if candidates.size == 0:
                return "optimal"
            bland = streak >= _DEGENERATE_STREAK
            if bland:
                order = candidates
            else:
                order = candidates[np.argsort(red[candidates], kind="stable")]
            # Candidates are tried in rule order; the first with a pivot that is
            # not tiny relative to its column wins, else the relatively largest.
            choice, best_rel = None, -1.0
            for col in order[:_MAX_PIVOT_TRIES]:
                col = int(col)
                row = self._ratio_test(col, bland)
                if row is None:
                    return "unbounded"
                colvals = T[:m, col]
                rel = colvals[row] / np.abs(colvals).max()
                if rel > best_rel:
                    choice, best_rel = (row, col), rel
                if rel >= _REL_PIVOT_TOL:
                    break
            row, col = choice
            step = max(T[row, -1], 0.0) / T[row, col]
            streak = streak + 1 if step <= PIVOT_TOL else 0
            self.pivot(row, col)

    def _ratio_test(self, col: int, bland: bool) -> int | None:
        m = self.m
        T = self.T
        colvals = T[:m, col]
        pos = np.flatnonzero(colvals > PIVOT_TOL)
        if pos.size == 0:
            return None
        rhs = np.maximum(T[pos, -1], 0.0)
        ratios = rhs / colvals[pos]
        if bland:
            best = ratios.min()
            ties = pos[ratios <= best]
            return int(min(ties, key=lambda i: self.basis[i]))
        # Harris two-pass: relax the bound slightly, then take the largest
        # pivot element among rows under the relaxed bound.
        theta = np.min((rhs + _HARRIS_DELTA) / colvals[pos])
        eligible = pos[ratios <= theta]
        return int(eligible[np.argmax(colvals[eligible])])

    def objective(self, cost_row: int) -> float:
        return float(-self.T[self.m + cost_row, -1])


def _farkas_ray(tab: _Tableau, sf: _StandardForm) -> np.ndarray | None:
    """Phase-I row multipliers mapped back to the user's ub and eq rows.

    The returned ``y`` (ub rows first) certifies infeasibility: ``y_ub <= 0``,
    ``y @ [A_ub; A_eq]`` is ``<= 0`` on columns bounded below, ``>= 0`` on
    columns bounded above, ``== 0`` on free columns, and ``y @ b`` (shifted by
    the bound offsets) is positive. Not produced when finite upper bounds add
    rows of their own.
    """
    scales, n_ub, n_bound = sf.row_scale
    if n_bound:
        return None
    B = tab.A0[:, tab.basis]
    try:
        y_sf = np.linalg.solve(B.T, tab.costs[1, tab.basis])
    except np.linalg.LinAlgError:
        return None
    return scales * y_sf


def solve(lp: LinearProgram, *, max_pivots: int = DEFAULT_MAX_PIVOTS,
          feas_tol: float = FEAS_TOL) -> LpOutcome:
    """Solve ``lp`` with the two-phase method.

    The returned outcome is deterministic for identical input. When the status
    is optimal, ``max_violation`` has been recomputed by substituting ``x``
    into the original constraints.
    """
    sf = _standard_form(lp)
    tab = _Tableau(sf)
    scale = lp.rhs_scale()
    phase1 = 0.0

    if sf.n_art:
        status = tab.run(1, max_pivots, stop_below=min(1e-12, 1e-2 * feas_tol) * scale)
        if status == "limit":
            return LpOutcome(LpStatus.NUMERICAL_FAILURE, pivots=tab.pivots,
                             message="pivot limit reached in phase I")
        if not tab.refactor():
            return LpOutcome(LpStatus.NUMERICAL_FAILURE, pivots=tab.pivots,
                             message="phase I ended on an ill-conditioned basis")
        phase1 = tab.objective(1)
        if phase1 > feas_tol * scale:
            return LpOutcome(LpStatus.INFEASIBLE, pivots=tab.pivots, phase1_objective=phase1,
                             farkas=_farkas_ray(tab, sf))
        tab.allowed[sf.n_struct:] = False
        keep = np.ones(tab.m, dtype=bool)
        for i in range(tab.m):
            if tab.basis[i] < sf.n_struct:
                continue
            row = tab.T[i, :sf.n_struct]
            cand = np.flatnonzero(np.abs(row) > PIVOT_TOL)
            if cand.size:
                tab.pivot(i, int(cand[np.argmax(np.abs(row[cand]))]))
            else:
                keep[i] = False  # redundant equality
        if not keep.all():
            tab.drop_rows(keep)

    status = tab.run(0, max_pivots)
    if status == "limit":
        return LpOutcome(LpStatus.NUMERICAL_FAILURE, pivots=tab.pivots,
                         message="pivot limit reached in phase II")
    if status == "unbounded":
        return LpOutcome(LpStatus.UNBOUNDED, pivots=tab.pivots, phase1_objective=phase1)
    if not tab.refactor():
        return LpOutcome(LpStatus.NUMERICAL_FAILURE, pivots=tab.pivots,
                         message="final basis is singular")
    # Reinversion can expose optimality lost to rounding; finish the job.
    if tab.run(0, max_pivots) != "optimal":
        return LpOutcome(LpStatus.NUMERICAL_FAILURE, pivots=tab.pivots,
                         message="phase II did not settle after reinversion")

    y = np.zeros(tab.ncols)
    for i, bcol in enumerate(tab.basis):
        y[bcol] = tab.T[i, -1]
    x = sf.offset + sf.transform @ y[:sf.transform.shape[1]]
    viol = lp.violation(x)
    outcome = LpOutcome(LpStatus.OPTIMAL, x=x, objective=float(lp.c @ x),
                        max_violation=viol, pivots=tab.pivots, phase1_objective=phase1)
    if viol > feas_tol * scale:
        outcome.status = LpStatus.NUMERICAL_FAILURE
        outcome.message = f"solution violates constraints by {viol:.3e}"
    return outcome
