"""Dense primal simplex for the small LPs generated by the DEA models.

All variables are implicitly non-negative.  Problems are maximized.  The
solver is a plain two-phase tableau simplex; Dantzig pricing is used first
and Bland's rule takes over after a fixed number of pivots to rule out
cycling.  Instances here have at most a few hundred columns, so dense
arithmetic is the right trade-off.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import LpError, LpInfeasible, LpUnbounded, ValidationError

PIVOT_TOL = 1e-10
FEAS_TOL = 1e-9
BLAND_AFTER = 200
MAX_ITER = 20_000


@dataclass
class LpProblem:
    """max c'x  s.t.  a_eq x = b_eq,  a_ub x <= b_ub,  x >= 0."""

    c: np.ndarray
    a_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    a_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        nvar = self.c.size
        for name in ("a_eq", "a_ub"):
            a = getattr(self, name)
            if a is not None:
                a = np.atleast_2d(np.asarray(a, dtype=float))
                if a.shape[1] != nvar:
                    raise ValidationError(f"{name} has {a.shape[1]} columns, expected {nvar}")
                setattr(self, name, a)
        for aname, bname in (("a_eq", "b_eq"), ("a_ub", "b_ub")):
            a, b = getattr(self, aname), getattr(self, bname)
            if (a is None) != (b is None):
                raise ValidationError(f"{aname} and {bname} must be given together")
            if b is not None:
                b = np.asarray(b, dtype=float).ravel()
                if b.size != a.shape[0]:
                    raise ValidationError(f"{bname} length does not match {aname}")
                setattr(self, bname, b)


@dataclass
class LpSolution:
    x: np.ndarray
    objective: float
    status: str = "optimal"


def _pivot(T: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    piv_row = T[row]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= np.outer(factors, piv_row)


def simplex(T: np.ndarray, basis: np.ndarray, ncols: int) -> str:
    """Run the simplex on a reduced tableau.

    ``T`` is (rows+1, ncols+1): constraint rows with the RHS in the last
    column, objective row last holding z_j - c_j (optimal when all >= 0
    for maximization).  ``basis`` maps constraint rows to basic columns and
    is updated in place.  Returns "optimal" or "unbounded".
    """
    zrow = T[-1]
    for it in range(MAX_ITER):
        reduced = zrow[:ncols]
        if it < BLAND_AFTER:
            col = int(np.argmin(reduced))
            if reduced[col] >= -PIVOT_TOL:
                return "optimal"
        else:
            negatives = np.nonzero(reduced < -PIVOT_TOL)[0]
            if negatives.size == 0:
                return "optimal"
            col = int(negatives[0])
        col_vals = T[:-1, col]
        positive = col_vals > PIVOT_TOL
        if not positive.any():
            return "unbounded"
        ratios = np.full(col_vals.shape, np.inf)
        ratios[positive] = T[:-1, -1][positive] / col_vals[positive]
        row = int(np.argmin(ratios))
        if it >= BLAND_AFTER:
            # Bland: break ratio ties on the smallest basic variable index.
            best = ratios[row]
            ties = np.nonzero(ratios <= best + PIVOT_TOL)[0]
            row = int(ties[np.argmin(basis[ties])])
        _pivot(T, row, col)
        basis[row] = col
    raise LpError("simplex iteration limit exceeded")


def extract_solution(T: np.ndarray, basis: np.ndarray, nvar: int) -> np.ndarray:
    x = np.zeros(nvar)
    keep = basis < nvar
    x[basis[keep]] = T[:-1, -1][keep]
    np.clip(x, 0.0, None, out=x)
    return x


def _build_standard(problem: LpProblem):
    """Equality standard form: slack columns for the <= rows, b >= 0."""
    nvar = problem.c.size
    blocks_a, blocks_b = [], []
    if problem.a_eq is not None:
        blocks_a.append(problem.a_eq)
        blocks_b.append(problem.b_eq)
    nslack = 0 if problem.a_ub is None else problem.a_ub.shape[0]
    if nslack:
        blocks_a.append(problem.a_ub)
        blocks_b.append(problem.b_ub)
    if not blocks_a:
        raise ValidationError("problem has no constraints")
    A = np.vstack(blocks_a)
    b = np.concatenate(blocks_b)
    rows = A.shape[0]
    full = np.zeros((rows, nvar + nslack))
    full[:, :nvar] = A
    if nslack:
        full[rows - nslack :, nvar:] = np.eye(nslack)
    flip = b < 0
    full[flip] *= -1.0
    b = np.abs(b)
    c = np.concatenate([problem.c, np.zeros(nslack)])
    return full, b, c


def _phase_one(A: np.ndarray, b: np.ndarray):
    """Find a BFS via artificial variables; returns (tableau, basis) or None."""
    rows, ncols = A.shape
    T = np.zeros((rows + 1, ncols + rows + 1))
    T[:-1, :ncols] = A
    T[:-1, ncols : ncols + rows] = np.eye(rows)
    T[:-1, -1] = b
    basis = np.arange(ncols, ncols + rows)
    # Phase-1 objective: max -sum(artificials); z-row = sum of constraint rows
    # over the original columns (artificial reduced costs start at zero).
    T[-1, :ncols] = -A.sum(axis=0)
    T[-1, -1] = -b.sum()
    status = simplex(T, basis, ncols + rows)
    if status != "optimal" or T[-1, -1] < -1e-7:
        return None
    # Drive leftover artificials out of the basis; drop redundant rows.
    keep_rows = np.ones(rows, dtype=bool)
    for r in range(rows):
        if basis[r] >= ncols:
            pivots = np.nonzero(np.abs(T[r, :ncols]) > 1e-9)[0]
            if pivots.size:
                _pivot(T, r, int(pivots[0]))
                basis[r] = int(pivots[0])
            else:
                keep_rows[r] = False
    if not keep_rows.all():
        rows_idx = np.concatenate([np.nonzero(keep_rows)[0], [rows]])
        T = T[rows_idx]
        basis = basis[keep_rows]
    T2 = np.hstack([T[:, :ncols], T[:, -1:]])
    return T2, basis


def two_phase(A: np.ndarray, b: np.ndarray, c: np.ndarray):
    """Solve max c'x, Ax = b, x >= 0 from scratch; returns (x, objective)."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float).copy()
    c = np.asarray(c, dtype=float)
    flip = b < 0
    if flip.any():
        A = A.copy()
        A[flip] *= -1.0
        b = np.abs(b)
    first = _phase_one(A, b)
    if first is None:
        raise LpInfeasible("no feasible point")
    T, basis = first
    ncols = A.shape[1]
    T[-1, :ncols] = -c
    T[-1, -1] = 0.0
    for r, col in enumerate(basis):
        if abs(c[col]) > 0:
            T[-1] += c[col] * T[r]
    status = simplex(T, basis, ncols)
    if status == "unbounded":
        raise LpUnbounded("objective unbounded above")
    x = extract_solution(T, basis, ncols)
    return x, float(T[-1, -1])


def lp_solve(problem: LpProblem) -> LpSolution:
    """Solve an LpProblem; raises LpInfeasible / LpUnbounded."""
    A, b, c = _build_standard(problem)
    x, obj = two_phase(A, b, c)
    return LpSolution(x=x[: problem.c.size], objective=obj)
