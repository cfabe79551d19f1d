import numpy as np
import pytest

from hrdea.errors import HrdeaError, UnsupportedDimensionError, ValidationError
from hrdea.geometry import (
    UncertaintySet,
    chord_length,
    chord_length_box,
    chord_length_ellipsoid,
    chord_length_polytope,
    chord_length_rhombus,
    contains,
    superellipsoid_boundary_point,
)

PENTAGON_A = np.array([[1.0, 1.0], [5.0, -1.0], [-2.0, 1.0]])
PENTAGON_B = np.array([10.0, 10.0, 5.0])
D1 = np.array([0.2, 0.4]) / np.hypot(0.2, 0.4)


@pytest.fixture
def pentagon():
    return UncertaintySet.polytope(PENTAGON_A, PENTAGON_B, interior_point=[2.0, 6.0])


def test_pentagon_chord(pentagon):
    lam = chord_length_polytope(pentagon, [2.0, 6.0], D1)
    assert lam == pytest.approx((10.0 / 3.0) * np.hypot(0.2, 0.4), abs=1e-9)
    hit = np.array([2.0, 6.0]) + lam * D1
    np.testing.assert_allclose(hit, [8.0 / 3.0, 22.0 / 3.0], atol=1e-9)
    assert contains(pentagon, hit)


def test_parallel_constraint_contributes_infinity():
    # only the constraint orthogonal to d: the hit must come from elsewhere
    uset = UncertaintySet.polytope(
        np.array([[-2.0, 1.0], [1.0, 1.0]]), np.array([5.0, 10.0]), [2.0, 6.0]
    )
    lam = chord_length_polytope(uset, [2.0, 6.0], D1)
    # (-2, 1) @ d == 0, so the first row never binds
    assert lam == pytest.approx(2.0 / D1.sum(), abs=1e-9)


def test_box_chords():
    box = UncertaintySet.box([5.0, 5.0], [3.0, 2.0])  # x1 in [2,8], x2 in [3,7]
    assert chord_length_box(box, [5.0, 5.0], [1.0, 0.0]) == pytest.approx(3.0, abs=1e-12)
    assert chord_length_box(box, [5.0, 5.0], [0.0, 1.0]) == pytest.approx(2.0, abs=1e-12)
    assert chord_length_box(box, [8.0, 5.0], [1.0, 0.0]) == 0.0


def test_box_as_polytope_matches_closed_form():
    rng = np.random.default_rng(42)
    c = np.array([5.0, 5.0, 4.0])
    w = np.array([3.0, 2.0, 1.5])
    box = UncertaintySet.box(c, w)
    rows_a = np.vstack([np.eye(3), -np.eye(3)])
    rows_b = np.concatenate([c + w, -(c - w)])
    poly = UncertaintySet.polytope(rows_a, rows_b, c)
    for _ in range(300):
        p = rng.uniform(c - w, c + w)
        d = rng.uniform(-1, 1, 3)
        d /= np.linalg.norm(d)
        assert chord_length_box(box, p, d) == pytest.approx(
            chord_length_polytope(poly, p, d), abs=1e-10
        )


def test_rhombus_matches_explicit_constraints():
    rng = np.random.default_rng(43)
    c = np.array([5.0, 5.0])
    w = np.array([3.0, 1.0])
    rho = UncertaintySet.rhombus(c, w)
    signs = np.array([[1, 1], [1, -1], [-1, 1], [-1, -1]], dtype=float)
    rows_a = signs / w
    rows_b = 1.0 + rows_a @ c
    poly = UncertaintySet.polytope(rows_a, rows_b, c)
    for _ in range(300):
        while True:
            p = rng.uniform(c - w, c + w)
            if contains(rho, p):
                break
        d = rng.uniform(-1, 1, 2)
        d /= np.linalg.norm(d)
        assert chord_length_rhombus(rho, p, d) == pytest.approx(
            chord_length_polytope(poly, p, d), abs=1e-10
        )


def test_degenerate_box_chord_is_zero():
    point = UncertaintySet.box([5.0, 5.0], [0.0, 0.0])
    assert chord_length_box(point, [5.0, 5.0], [1.0, 0.0]) == 0.0
    assert point.is_point


def test_ellipsoid_chords():
    ell = UncertaintySet.ellipsoid([5.0, 5.0], [3.0, 1.0])
    assert chord_length_ellipsoid(ell, [5.0, 5.0], [1.0, 0.0]) == pytest.approx(3.0, abs=1e-12)
    assert chord_length_ellipsoid(ell, [5.0, 5.0], [0.0, 1.0]) == pytest.approx(1.0, abs=1e-12)
    assert chord_length_ellipsoid(ell, [6.5, 5.0], [1.0, 0.0]) == pytest.approx(1.5, abs=1e-12)


def test_sphere_symmetry():
    sphere = UncertaintySet.ellipsoid([10.0, 10.0, 10.0], [2.0, 2.0, 2.0])
    rng = np.random.default_rng(11)
    for _ in range(100):
        d = rng.normal(size=3)
        d /= np.linalg.norm(d)
        lam = chord_length_ellipsoid(sphere, sphere.center, d)
        assert lam == pytest.approx(2.0, abs=1e-10)


def test_rhombus_chords():
    rho = UncertaintySet.rhombus([5.0, 5.0], [3.0, 1.0])
    assert chord_length_rhombus(rho, [5.0, 5.0], [1.0, 0.0]) == pytest.approx(3.0, abs=1e-12)
    assert chord_length_rhombus(rho, [5.0, 5.0], [0.0, 1.0]) == pytest.approx(1.0, abs=1e-12)
    s = 1.0 / np.sqrt(2.0)
    assert chord_length_rhombus(rho, [5.0, 5.0], [s, s]) == pytest.approx(
        3.0 * np.sqrt(2.0) / 4.0, abs=1e-12
    )


def test_rhombus_dimension_cap():
    with pytest.raises(UnsupportedDimensionError):
        UncertaintySet.rhombus(np.ones(25), np.ones(25))


def test_contains_examples():
    box = UncertaintySet.box([5.0, 5.0], [3.0, 2.0])
    assert contains(box, [5.0, 5.0])
    assert not contains(box, [9.0, 5.0])
    ell = UncertaintySet.ellipsoid([5.0, 5.0], [3.0, 1.0])
    assert contains(ell, [8.0, 5.0])  # boundary counts as inside


def test_nesting_box_ellipsoid_rhombus():
    c = np.array([5.0, 6.0, 7.0])
    w = np.array([2.0, 1.0, 3.0])
    box = UncertaintySet.box(c, w)
    ell = UncertaintySet.ellipsoid(c, w)
    rho = UncertaintySet.rhombus(c, w)
    rng = np.random.default_rng(4)
    points = rng.uniform(c - 1.2 * w, c + 1.2 * w, size=(2000, 3))
    for p in points:
        if contains(rho, p):
            assert contains(ell, p)
        if contains(ell, p):
            assert contains(box, p)


def _sample_interior(uset, rng):
    lo = np.maximum(uset.center - uset.semi_axes, 0.0)
    hi = uset.center + uset.semi_axes
    while True:
        p = rng.uniform(lo, hi)
        if contains(uset, p, tol=-1e-9):
            return p


def test_boundary_bracketing_all_shapes():
    rng = np.random.default_rng(8)
    c = np.array([4.0, 5.0, 6.0])
    w = np.array([2.5, 1.5, 3.0])
    shapes = [
        UncertaintySet.box(c, w),
        UncertaintySet.ellipsoid(c, w),
        UncertaintySet.rhombus(c, w),
    ]
    for uset in shapes:
        for _ in range(1000):
            p = _sample_interior(uset, rng)
            d = rng.uniform(-1, 1, 3)
            norm = np.linalg.norm(d)
            if norm == 0:
                continue
            d /= norm
            lam = chord_length(uset, p, d)
            assert contains(uset, p + lam * d)
            assert not contains(uset, p + (lam + 1e-6) * d)


def test_orthant_clips_the_chord():
    box = UncertaintySet.box([1.0, 1.0], [5.0, 5.0])  # would extend to -4
    lam = chord_length_box(box, [1.0, 1.0], [-1.0, 0.0])
    assert lam == pytest.approx(1.0, abs=1e-12)
    ell = UncertaintySet.ellipsoid([1.0, 1.0], [5.0, 5.0])
    lam = chord_length_ellipsoid(ell, [1.0, 1.0], [-1.0, 0.0])
    assert lam == pytest.approx(1.0, abs=1e-12)


def test_chord_requires_interior_point():
    box = UncertaintySet.box([5.0, 5.0], [1.0, 1.0])
    with pytest.raises(ValidationError):
        chord_length_box(box, [9.0, 5.0], np.array([1.0, 0.0]))


def test_chord_requires_unit_direction(pentagon):
    with pytest.raises(ValidationError):
        chord_length_polytope(pentagon, [2.0, 6.0], np.array([0.2, 0.4]))


def test_unbounded_polytope_direction_detected():
    half = UncertaintySet.polytope(np.array([[-1.0, 0.0]]), np.array([0.0]), [1.0, 1.0])
    with pytest.raises(HrdeaError):
        chord_length_polytope(half, [1.0, 1.0], np.array([1.0, 0.0]))


def test_superellipsoid_boundary_points():
    se = UncertaintySet.superellipsoid([5.0, 5.0, 5.0], [3.0, 2.0, 4.0], (2.0, 2.0))
    np.testing.assert_allclose(
        superellipsoid_boundary_point(se, 0.0, 0.0), [8.0, 5.0, 5.0], atol=1e-12
    )
    np.testing.assert_allclose(
        superellipsoid_boundary_point(se, np.pi / 2, 0.0), [5.0, 7.0, 5.0], atol=1e-12
    )
    np.testing.assert_allclose(
        superellipsoid_boundary_point(se, 0.0, np.pi / 2), [5.0, 5.0, 9.0], atol=1e-12
    )


@pytest.mark.parametrize("orders", [(2.0, 2.0), (1.0, 1.0), (4.0, 4.0), (2.0, 3.0), (1.5, 4.0)])
def test_superellipsoid_boundary_satisfies_set_equation(orders):
    se = UncertaintySet.superellipsoid([5.0, 5.0, 5.0], [3.0, 2.0, 4.0], orders)
    o1, o2 = orders
    rng = np.random.default_rng(17)
    for _ in range(200):
        psi = rng.uniform(-np.pi, np.pi)
        phi = rng.uniform(-np.pi / 2, np.pi / 2)
        p = superellipsoid_boundary_point(se, psi, phi)
        t = np.abs(p - se.center) / se.semi_axes
        value = (t[0] ** o1 + t[1] ** o1) ** (o2 / o1) + t[2] ** o2
        assert value == pytest.approx(1.0, abs=1e-9)


def test_superellipsoid_validation():
    with pytest.raises(ValidationError):
        UncertaintySet.superellipsoid([5.0, 5.0, 5.0], [3.0, 2.0, 4.0], (0.0, 2.0))
    with pytest.raises(UnsupportedDimensionError):
        UncertaintySet.superellipsoid([5.0, 5.0], [3.0, 2.0], (2.0, 2.0))


def test_center_must_be_inside_and_nonnegative():
    with pytest.raises(ValidationError):
        UncertaintySet.box([-1.0, 5.0], [1.0, 1.0])
    with pytest.raises(ValidationError):
        UncertaintySet.polytope(np.array([[1.0, 0.0]]), np.array([1.0]), [2.0, 0.0])
