"""Convex uncertainty sets and chord computations for the Hit & Run walk.

A set lives in the non-negative orthant of R^z (z = m + s + v): the orthant
bounds are appended to every chord computation, so a walk can never leave
the admissible region.  Coordinates whose semi-axis is zero are fixed at
the center; a set with all semi-axes zero degenerates to a single point.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import HrdeaError, UnsupportedDimensionError, ValidationError

SHAPES = ("point", "box", "ellipsoid", "rhombus", "polytope", "superellipsoid")

CONTAIN_TOL = 1e-9
DENOM_TOL = 1e-12
RHOMBUS_MAX_DIM = 20


@dataclass(frozen=True)
class UncertaintySet:
    """Convex admissible region for one DMU's observation."""

    shape: str
    center: np.ndarray
    semi_axes: np.ndarray | None = None
    rows_a: np.ndarray | None = None
    rows_b: np.ndarray | None = None
    orders: tuple[float, float] | None = None

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise ValidationError(f"unknown shape {self.shape!r}; expected one of {SHAPES}")
        center = np.asarray(self.center, dtype=float).ravel()
        object.__setattr__(self, "center", center)
        if not np.all(np.isfinite(center)):
            raise ValidationError("set center must be finite")
        if np.any(center < 0):
            raise ValidationError("set center must lie in the non-negative orthant")
        if self.shape == "polytope":
            if self.rows_a is None or self.rows_b is None:
                raise ValidationError("polytope needs constraint rows (a, b)")
            a = np.atleast_2d(np.asarray(self.rows_a, dtype=float))
            b = np.asarray(self.rows_b, dtype=float).ravel()
            if a.shape != (b.size, center.size):
                raise ValidationError("polytope rows do not match the dimension")
            object.__setattr__(self, "rows_a", a)
            object.__setattr__(self, "rows_b", b)
        else:
            w = np.zeros_like(center) if self.semi_axes is None else np.asarray(
                self.semi_axes, dtype=float
            ).ravel()
            if w.shape != center.shape:
                raise ValidationError("semi-axes must match the center dimension")
            if np.any(w < 0) or not np.all(np.isfinite(w)):
                raise ValidationError("semi-axes must be finite and >= 0")
            object.__setattr__(self, "semi_axes", w)
        if self.shape == "superellipsoid":
            if center.size != 3:
                raise UnsupportedDimensionError(
                    "superellipsoid sets support exactly 3 dimensions"
                )
            if self.orders is None or len(self.orders) != 2 or min(self.orders) <= 0:
                raise ValidationError("superellipsoid orders must be two positive numbers")
            if np.any(self.semi_axes <= 0):
                raise ValidationError("superellipsoid semi-axes must be strictly positive")
        if self.shape == "rhombus" and int(np.count_nonzero(self.semi_axes)) > RHOMBUS_MAX_DIM:
            raise UnsupportedDimensionError(
                f"rhombus sets support at most {RHOMBUS_MAX_DIM} free dimensions"
            )
        if self.shape == "point" and np.any(self.semi_axes != 0):
            raise ValidationError("a point set cannot carry semi-axes")
        if not contains(self, self.center):
            raise ValidationError("set center must belong to the set")

    @property
    def z(self) -> int:
        return self.center.size

    @property
    def active(self) -> np.ndarray:
        """Coordinates free to move (semi-axis > 0)."""
        if self.shape == "polytope":
            return np.ones(self.z, dtype=bool)
        return self.semi_axes > 0

    @property
    def is_point(self) -> bool:
        if self.shape == "point":
            return True
        if self.shape == "polytope":
            return False
        return not self.active.any()

    # -- constructors ------------------------------------------------------

    @classmethod
    def point(cls, center) -> "UncertaintySet":
        return cls("point", np.asarray(center, dtype=float))

    @classmethod
    def box(cls, center, semi_axes) -> "UncertaintySet":
        return cls("box", center, _broadcast_axes(center, semi_axes))

    @classmethod
    def ellipsoid(cls, center, semi_axes) -> "UncertaintySet":
        return cls("ellipsoid", center, _broadcast_axes(center, semi_axes))

    @classmethod
    def rhombus(cls, center, semi_axes) -> "UncertaintySet":
        return cls("rhombus", center, _broadcast_axes(center, semi_axes))

    @classmethod
    def polytope(cls, rows_a, rows_b, interior_point) -> "UncertaintySet":
        return cls("polytope", interior_point, rows_a=rows_a, rows_b=rows_b)

    @classmethod
    def superellipsoid(cls, center, semi_axes, orders) -> "UncertaintySet":
        return cls(
            "superellipsoid",
            center,
            _broadcast_axes(center, semi_axes),
            orders=(float(orders[0]), float(orders[1])),
        )


def _broadcast_axes(center, semi_axes):
    center = np.asarray(center, dtype=float).ravel()
    w = np.asarray(semi_axes, dtype=float)
    if w.ndim == 0:
        w = np.full(center.shape, float(w))
    return w


def contains(uset: UncertaintySet, point, tol: float = CONTAIN_TOL) -> bool:
    """Membership test with a small outward slack."""
    p = np.asarray(point, dtype=float).ravel()
    if p.shape != uset.center.shape:
        raise ValidationError("point dimension does not match the set")
    if np.any(p < -tol):
        return False
    if uset.shape == "polytope":
        return bool(np.all(uset.rows_a @ p <= uset.rows_b + tol))
    dev = p - uset.center
    active = uset.active
    if np.any(np.abs(dev[~active]) > tol):
        return False
    if not active.any():
        return True
    t = dev[active] / uset.semi_axes[active]
    if uset.shape == "box":
        return bool(np.all(np.abs(t) <= 1 + tol))
    if uset.shape == "ellipsoid":
        return bool(t @ t <= 1 + tol)
    if uset.shape == "rhombus":
        return bool(np.abs(t).sum() <= 1 + tol)
    # superellipsoid: all three coordinates are active
    o1, o2 = uset.orders
    tx, ty, tu = np.abs(t)
    value = (tx**o1 + ty**o1) ** (o2 / o1) + tu**o2
    return bool(value <= 1 + tol)


def _check_chord_inputs(uset: UncertaintySet, p, d):
    p = np.asarray(p, dtype=float).ravel()
    d = np.asarray(d, dtype=float).ravel()
    if p.shape != uset.center.shape or d.shape != uset.center.shape:
        raise ValidationError("point/direction dimension does not match the set")
    norm = np.linalg.norm(d)
    if abs(norm - 1.0) > 1e-6:
        raise ValidationError(f"direction must have unit norm, got {norm}")
    if not contains(uset, p):
        raise ValidationError("chord start point lies outside the set")
    return p, d


def _orthant_cap(p: np.ndarray, d: np.ndarray) -> float:
    """Largest step along d that keeps every coordinate non-negative."""
    inward = d < -DENOM_TOL
    if not inward.any():
        return np.inf
    caps = p[inward] / -d[inward]
    return float(max(np.min(caps), 0.0))


def _forward_min(num: np.ndarray, den: np.ndarray) -> float:
    """Smallest non-negative hit among the faces the direction points at.

    A face is ahead only when its denominator is strictly positive; a zero
    or negative denominator means the ray never reaches that face.  This
    also makes boundary points well-behaved: the
    face a point sits on blocks outward moves (hit at 0) but never inward
    ones, so the walk cannot freeze there.
    """
    ahead = den > DENOM_TOL
    if not ahead.any():
        raise HrdeaError("set is unbounded along the sampled direction")
    lam = num[ahead] / den[ahead]
    lam = lam[lam >= -1e-6]
    if lam.size == 0:
        raise HrdeaError("no forward boundary hit; interior precondition violated")
    return float(max(np.min(lam), 0.0))


def _frozen_dims_block(uset, d) -> bool:
    """True when d pushes along a coordinate that is fixed at the center."""
    inactive = ~uset.active
    return bool(inactive.any() and np.any(np.abs(d[inactive]) > DENOM_TOL))


def chord_length_polytope(uset: UncertaintySet, p, d, checked: bool = True) -> float:
    """Distance to the boundary along d for a linear-constraint set."""
    if checked:
        p, d = _check_chord_inputs(uset, p, d)
    a = np.vstack([uset.rows_a, -np.eye(uset.z)])
    b = np.concatenate([uset.rows_b, np.zeros(uset.z)])
    return _forward_min(b - a @ p, a @ d)


def chord_length_box(uset: UncertaintySet, p, d, checked: bool = True) -> float:
    if checked:
        p, d = _check_chord_inputs(uset, p, d)
    if _frozen_dims_block(uset, d):
        return 0.0
    active = uset.active
    if not active.any():
        return 0.0
    c, w = uset.center[active], uset.semi_axes[active]
    lo = np.maximum(c - w, 0.0)
    hi = c + w
    pa, da = p[active], d[active]
    if not (np.abs(da) > DENOM_TOL).any():
        return 0.0
    # upper faces are ahead when d > 0, lower faces when d < 0
    num = np.concatenate([hi - pa, pa - lo])
    den = np.concatenate([da, -da])
    return _forward_min(num, den)


def chord_length_ellipsoid(uset: UncertaintySet, p, d, checked: bool = True) -> float:
    """Smallest positive root of the boundary quadratic, orthant-capped."""
    if checked:
        p, d = _check_chord_inputs(uset, p, d)
    if _frozen_dims_block(uset, d):
        return 0.0
    active = uset.active
    if not active.any():
        return 0.0
    w = uset.semi_axes[active]
    da = d[active] / w
    dev = (p[active] - uset.center[active]) / w
    phi = da @ da
    if phi == 0.0:
        return 0.0
    psi = 2.0 * (dev @ da)
    sigma = dev @ dev - 1.0
    disc = psi * psi - 4.0 * phi * sigma
    if disc < -1e-12:
        raise HrdeaError("negative discriminant; start point outside the ellipsoid")
    root = (-psi + np.sqrt(max(disc, 0.0))) / (2.0 * phi)
    lam = max(float(root), 0.0)
    return min(lam, _orthant_cap(p, d))


@lru_cache(maxsize=32)
def _sign_patterns(z: int) -> np.ndarray:
    bits = (np.arange(2**z)[:, None] >> np.arange(z)[None, :]) & 1
    return (1.0 - 2.0 * bits).astype(float)


def chord_length_rhombus(uset: UncertaintySet, p, d, checked: bool = True) -> float:
    """Chord against the 2^z implicit faces |.|/w summing to one."""
    if checked:
        p, d = _check_chord_inputs(uset, p, d)
    if _frozen_dims_block(uset, d):
        return 0.0
    active = uset.active
    za = int(np.count_nonzero(active))
    if za == 0:
        return 0.0
    if za > RHOMBUS_MAX_DIM:
        raise UnsupportedDimensionError(
            f"rhombus chord limited to {RHOMBUS_MAX_DIM} free dimensions"
        )
    a = _sign_patterns(za) / uset.semi_axes[active]
    num = 1.0 - a @ (p[active] - uset.center[active])
    den = a @ d[active]
    return min(_forward_min(num, den), _orthant_cap(p, d))


def chord_length(uset: UncertaintySet, p, d, checked: bool = True) -> float:
    """Shape-appropriate chord length from p along the unit direction d.

    ``checked=False`` skips the interiority/unit-norm validation; the walk
    uses it because its points stay inside the set by construction.
    """
    if uset.shape == "box":
        return chord_length_box(uset, p, d, checked)
    if uset.shape == "ellipsoid":
        return chord_length_ellipsoid(uset, p, d, checked)
    if uset.shape == "rhombus":
        return chord_length_rhombus(uset, p, d, checked)
    if uset.shape == "polytope":
        return chord_length_polytope(uset, p, d, checked)
    if uset.shape == "point":
        return 0.0
    raise ValidationError(
        "superellipsoid sets are sampled through their spherical parametrization"
    )


def _signed_power(value: float, exponent: float) -> float:
    return np.sign(value) * np.abs(value) ** exponent


def superellipsoid_boundary_point(uset: UncertaintySet, psi: float, phi: float) -> np.ndarray:
    """Boundary point of a 3-d superellipsoid at spherical angles (psi, phi)."""
    if uset.shape != "superellipsoid":
        raise ValidationError("boundary parametrization requires a superellipsoid set")
    o1, o2 = uset.orders
    w = uset.semi_axes
    c = uset.center
    g_phi = _signed_power(np.cos(phi), 2.0 / o2)
    return np.array(
        [
            c[0] + w[0] * g_phi * _signed_power(np.cos(psi), 2.0 / o1),
            c[1] + w[1] * g_phi * _signed_power(np.sin(psi), 2.0 / o1),
            c[2] + w[2] * _signed_power(np.sin(phi), 2.0 / o2),
        ]
    )
