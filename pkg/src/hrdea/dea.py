"""Directional DEA models solved against an empirical VRS frontier.

Two radial models are provided: the plain directional model over inputs and
desirable outputs, and the weak-disposability variant that splits the
intensity weights so undesirable outputs can only shrink by scaling
activity down.  Interval bounds under box uncertainty come from the
best/worst scenario projections.

The distance maximization and the slack maximization are solved
lexicographically: the reported distance is always the optimum of the pure
distance phase, and the non-Archimedean weight only enters the reported
objective value.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import DataSet, Direction
from .errors import LpInfeasible, LpUnbounded, ValidationError
from .lp import simplex, two_phase

DEFAULT_EPS = 1e-6


@dataclass(frozen=True)
class DeaSolution:
    """Optimal projection of one DMU on one frontier."""

    distance: float
    intensities: np.ndarray
    slacks_x: np.ndarray
    slacks_y: np.ndarray
    targets_x: np.ndarray
    targets_y: np.ndarray
    targets_u: np.ndarray
    objective: float
    alpha: np.ndarray | None = None
    beta: np.ndarray | None = None


def _eq1_distance(X, Y, xk, yk, dx, dy, anchor: int) -> float:
    """Distance phase of the plain directional model, warm-started.

    The reference column ``anchor`` must weakly dominate the evaluated
    point (X[:, anchor] <= xk, Y[:, anchor] >= yk); then the vertex with
    full weight on the anchor is feasible and no phase-1 is needed.
    """
    m, n = X.shape
    s = Y.shape[0]
    ncols = n + 1 + m + s
    rows = m + s + 1
    T = np.zeros((rows + 1, ncols + 1))
    ax = X[:, anchor]
    ay = Y[:, anchor]
    T[:m, :n] = X - ax[:, None]
    T[m : m + s, :n] = ay[:, None] - Y
    T[rows - 1, :n] = 1.0
    T[:m, n] = dx
    T[m : m + s, n] = dy
    idx = np.arange(m)
    T[idx, n + 1 + idx] = 1.0
    idx = np.arange(s)
    T[m + idx, n + 1 + m + idx] = 1.0
    T[:m, -1] = xk - ax
    T[m : m + s, -1] = ay - yk
    T[rows - 1, -1] = 1.0
    T[-1, n] = -1.0
    basis = np.concatenate(
        [n + 1 + np.arange(m + s), [anchor]]
    )
    status = simplex(T, basis, ncols)
    if status == "unbounded":
        raise LpUnbounded("distance unbounded; check the direction vector")
    return max(float(T[-1, -1]), 0.0)


def _eq1_matrices(X, Y, xk, yk, dx, dy):
    """Standard-form (A, b) of the plain model with variables (mu, D, gx, gy)."""
    m, n = X.shape
    s = Y.shape[0]
    ncols = n + 1 + m + s
    A = np.zeros((m + s + 1, ncols))
    A[:m, :n] = X
    A[m : m + s, :n] = Y
    A[m + s, :n] = 1.0
    A[:m, n] = dx
    A[m : m + s, n] = -dy
    A[np.arange(m), n + 1 + np.arange(m)] = 1.0
    A[m + np.arange(s), n + 1 + m + np.arange(s)] = -1.0
    b = np.concatenate([xk, yk, [1.0]])
    return A, b


def directional_distance(X, Y, xk, yk, dx, dy, anchor: int | None = None) -> float:
    """Optimal radial distance of (xk, yk) against the frontier of (X, Y)."""
    # Solve with the direction normalized to unit magnitude; D scales
    # inversely, and the tableau stays conditioned for tiny components.
    scale = float(max(np.max(dx, initial=0.0), np.max(dy, initial=0.0)))
    if scale <= 0.0:
        raise ValidationError("direction must have a strictly positive component")
    dx, dy = dx / scale, dy / scale
    if anchor is not None and np.all(X[:, anchor] <= xk) and np.all(Y[:, anchor] >= yk):
        return _eq1_distance(X, Y, xk, yk, dx, dy, anchor) / scale
    A, b = _eq1_matrices(X, Y, xk, yk, dx, dy)
    c = np.zeros(A.shape[1])
    c[X.shape[1]] = 1.0
    x, obj = two_phase(A, b, c)
    return max(float(obj), 0.0) / scale


def _eq3_distance(X, Y, U, xk, yk, uk, dx, dy, du) -> float:
    """Distance phase of the weak-disposability model."""
    m, n = X.shape
    s, v = Y.shape[0], U.shape[0]
    ncols = 2 * n + 1 + m + s
    rows = m + s + v + 1
    A = np.zeros((rows, ncols))
    A[:m, :n] = X
    A[:m, n : 2 * n] = X
    A[m : m + s, :n] = Y
    A[m + s : m + s + v, :n] = U
    A[rows - 1, : 2 * n] = 1.0
    A[:m, 2 * n] = dx
    A[m : m + s, 2 * n] = -dy
    A[m + s : m + s + v, 2 * n] = du
    A[np.arange(m), 2 * n + 1 + np.arange(m)] = 1.0
    A[m + np.arange(s), 2 * n + 1 + m + np.arange(s)] = -1.0
    b = np.concatenate([xk, yk, uk, [1.0]])
    c = np.zeros(ncols)
    c[2 * n] = 1.0
    x, obj = two_phase(A, b, c)
    return max(float(obj), 0.0)


def _slack_phase_eq1(X, Y, xk, yk, dx, dy, dist):
    """Maximize total slack at the fixed optimal distance."""
    m, n = X.shape
    s = Y.shape[0]
    ncols = n + m + s
    A = np.zeros((m + s + 1, ncols))
    A[:m, :n] = X
    A[m : m + s, :n] = Y
    A[m + s, :n] = 1.0
    A[np.arange(m), n + np.arange(m)] = 1.0
    A[m + np.arange(s), n + m + np.arange(s)] = -1.0
    b = np.concatenate([xk - dist * dx, yk + dist * dy, [1.0]])
    c = np.zeros(ncols)
    c[n:] = 1.0
    x, _ = two_phase(A, b, c)
    return x[:n], x[n : n + m], x[n + m :]


def _slack_phase_eq3(X, Y, U, xk, yk, uk, dx, dy, du, dist):
    m, n = X.shape
    s, v = Y.shape[0], U.shape[0]
    ncols = 2 * n + m + s
    A = np.zeros((m + s + v + 1, ncols))
    A[:m, :n] = X
    A[:m, n : 2 * n] = X
    A[m : m + s, :n] = Y
    A[m + s : m + s + v, :n] = U
    A[m + s + v, : 2 * n] = 1.0
    A[np.arange(m), 2 * n + np.arange(m)] = 1.0
    A[m + np.arange(s), 2 * n + m + np.arange(s)] = -1.0
    b = np.concatenate([xk - dist * dx, yk + dist * dy, uk - dist * du, [1.0]])
    c = np.zeros(ncols)
    c[2 * n :] = 1.0
    x, _ = two_phase(A, b, c)
    return x[:n], x[n : 2 * n], x[2 * n : 2 * n + m], x[2 * n + m :]


def _check_unmasked(data: DataSet):
    if data.has_missing:
        raise ValidationError(
            "dataset has imperfectly known cells; run the sampling pipeline "
            "or an imputation baseline first"
        )


def solve_directional(
    data: DataSet, k: int, direction: Direction, eps: float = DEFAULT_EPS
) -> DeaSolution:
    """Solve the plain directional model for DMU k against the full sample."""
    _check_unmasked(data)
    if not 0 <= k < data.n:
        raise ValidationError(f"DMU index {k} out of range")
    dx, dy, _ = direction.resolve(data, k)
    xk, yk = data.X[:, k], data.Y[:, k]
    dist = directional_distance(data.X, data.Y, xk, yk, dx, dy, anchor=k)
    mu, gx, gy = _slack_phase_eq1(data.X, data.Y, xk, yk, dx, dy, dist)
    return DeaSolution(
        distance=dist,
        intensities=mu,
        slacks_x=gx,
        slacks_y=gy,
        targets_x=data.X @ mu,
        targets_y=data.Y @ mu,
        targets_u=np.zeros(0),
        objective=dist + eps * (gx.sum() + gy.sum()),
    )


def solve_weak_disposability(
    data: DataSet, k: int, direction: Direction, eps: float = DEFAULT_EPS
) -> DeaSolution:
    """Solve the weak-disposability model for DMU k (requires v >= 1)."""
    _check_unmasked(data)
    if data.v < 1:
        raise ValidationError("no undesirable outputs; use solve_directional")
    if not 0 <= k < data.n:
        raise ValidationError(f"DMU index {k} out of range")
    dx, dy, du = direction.resolve(data, k)
    xk, yk, uk = data.X[:, k], data.Y[:, k], data.U[:, k]
    dist = weak_disposability_distance(data.X, data.Y, data.U, xk, yk, uk, dx, dy, du)
    alpha, beta, gx, gy = _slack_phase_eq3(
        data.X, data.Y, data.U, xk, yk, uk, dx, dy, du, dist
    )
    return DeaSolution(
        distance=dist,
        intensities=alpha + beta,
        slacks_x=gx,
        slacks_y=gy,
        targets_x=data.X @ (alpha + beta),
        targets_y=data.Y @ alpha,
        targets_u=data.U @ alpha,
        objective=dist + eps * (gx.sum() + gy.sum()),
        alpha=alpha,
        beta=beta,
    )


def weak_disposability_distance(X, Y, U, xk, yk, uk, dx, dy, du) -> float:
    """Distance-only entry point used by the sampling pipeline."""
    scale = float(
        max(np.max(dx, initial=0.0), np.max(dy, initial=0.0), np.max(du, initial=0.0))
    )
    if scale <= 0.0:
        raise ValidationError("direction must have a strictly positive component")
    return _eq3_distance(X, Y, U, xk, yk, uk, dx / scale, dy / scale, du / scale) / scale


def interval_dea_bounds(
    data: DataSet,
    lower_x: np.ndarray,
    upper_x: np.ndarray,
    lower_y: np.ndarray,
    upper_y: np.ndarray,
    k: int,
    direction: Direction,
) -> tuple[float, float]:
    """Widest distance interval for DMU k under box uncertainty.

    The upper bound projects the worst version of k (upper inputs, lower
    outputs) on the frontier of the best scenario; the lower bound projects
    the best version of k on the worst-scenario frontier.  A best version
    that would end up beyond the worst frontier (a super-efficiency case)
    is reported with the bound clamped at zero, consistent with the
    sampling pipeline where every point belongs to its own frontier.
    """
    if data.v > 0:
        raise ValidationError("interval bounds are defined for the model without undesirables")
    lower_x = np.asarray(lower_x, dtype=float)
    upper_x = np.asarray(upper_x, dtype=float)
    lower_y = np.asarray(lower_y, dtype=float)
    upper_y = np.asarray(upper_y, dtype=float)
    for lo, hi, label in ((lower_x, upper_x, "inputs"), (lower_y, upper_y, "outputs")):
        if lo.shape != hi.shape:
            raise ValidationError(f"interval matrices for {label} differ in shape")
        if np.any(lo > hi):
            raise ValidationError(f"crossed interval bounds in {label}")
    if lower_x.shape != data.X.shape or lower_y.shape != data.Y.shape:
        raise ValidationError("interval matrices must match the dataset shape")
    # Floor at a tiny positive value: a zero bound would degenerate the
    # direction resolved at the scenario version of k.
    lower_x, upper_x = np.maximum(lower_x, 1e-12), np.maximum(upper_x, 1e-12)
    lower_y, upper_y = np.maximum(lower_y, 1e-12), np.maximum(upper_y, 1e-12)

    # Worst version of k against the best scenario.
    xk_w, yk_w = upper_x[:, k], lower_y[:, k]
    dxw, dyw, _ = direction.resolve_at(xk_w, yk_w)
    d_high = directional_distance(lower_x, upper_y, xk_w, yk_w, dxw, dyw, anchor=k)

    # Best version of k against the worst scenario.
    xk_b, yk_b = lower_x[:, k], upper_y[:, k]
    dxb, dyb, _ = direction.resolve_at(xk_b, yk_b)
    try:
        d_low = directional_distance(upper_x, lower_y, xk_b, yk_b, dxb, dyb)
    except LpInfeasible:
        d_low = 0.0
    return d_low, d_high
