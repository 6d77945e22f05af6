import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cyclic_hopf.groups import GroupSpec, Subgroup
from cyclic_hopf.polynomial import PolyVectorField, plinear
from cyclic_hopf.representation import PermAction, find_h_simple, isotropy_point
from cyclic_hopf.synthesis import (
    HopfFamilyNumeric,
    NonCommutingError,
    bump_gap,
    equivariant_symmetrize,
    hermite_interpolate,
    hopf_family,
    prescribed_linearization_field,
    stable_equilibrium_field,
    verify_equivariance,
)


def act(spec):
    return PermAction(GroupSpec.parse(spec))


def random_instance(rng, n, m):
    pts = set()
    while len(pts) < m:
        pts.add(tuple(Fraction(rng.randint(-6, 6)) / rng.randint(1, 3) for _ in range(n)))
    pts = sorted(pts)
    vals = [tuple(Fraction(rng.randint(-3, 3)) for _ in range(n)) for _ in range(m)]
    jacs = [[[Fraction(rng.randint(-3, 3)) / rng.randint(1, 2) for _ in range(n)] for _ in range(n)] for _ in range(m)]
    return pts, vals, jacs


def central_jacobian(field, x, h=Fraction(1, 10**6)):
    """Central differences evaluated exactly, so only truncation error remains."""
    cols = []
    for j in range(len(x)):
        xp = [v + h * (i == j) for i, v in enumerate(x)]
        xm = [v - h * (i == j) for i, v in enumerate(x)]
        cols.append([(a - b) / (2 * h) for a, b in zip(field.evaluate(xp), field.evaluate(xm))])
    return np.array(cols, dtype=float).T


def test_single_identity_node():
    g = hermite_interpolate([(Fraction(0), Fraction(0))], [(Fraction(0), Fraction(0))], [[[1, 0], [0, 1]]])
    assert g.evaluate((Fraction(3), Fraction(-2))) == (Fraction(3), Fraction(-2))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 6), st.integers(1, 4))
def test_hermite_exact_and_matches_finite_differences(seed, n, m):
    rng = random.Random(seed)
    pts, vals, jacs = random_instance(rng, n, m)
    g = hermite_interpolate(pts, vals, jacs)
    for y, v, J in zip(pts, vals, jacs):
        assert g.evaluate(y) == v
        assert g.jacobian(y) == J
        fd = central_jacobian(g, y)
        assert np.abs(fd - np.array(J, float)).max() <= 1e-6


def test_two_nodes_in_plane_match_step_1e5_differences():
    pts = [(Fraction(0), Fraction(1)), (Fraction(2), Fraction(-1))]
    vals = [(Fraction(1), Fraction(-2)), (Fraction(3), Fraction(1, 2))]
    jacs = [[[Fraction(1), Fraction(2)], [Fraction(-1), Fraction(0)]], [[Fraction(0), Fraction(1, 3)], [Fraction(5), Fraction(-2)]]]
    g = hermite_interpolate(pts, vals, jacs)
    for y, v, J in zip(pts, vals, jacs):
        assert g.evaluate(y) == v and g.jacobian(y) == J
        fd = central_jacobian(g, y, h=Fraction(1, 10**5))
        assert np.abs(fd - np.array(J, float)).max() <= 1e-6


def test_hermite_rejects_repeated_nodes():
    with pytest.raises(ValueError):
        hermite_interpolate([(0, 0), (0, 0)], [(0, 0), (0, 0)], [[[1, 0], [0, 1]]] * 2)


def test_symmetrize_constant_on_swap():
    A = act("Z2")
    c = PolyVectorField(2, (plinear([0, 0], 3), plinear([0, 0], 7)))
    f = equivariant_symmetrize(c, A)
    assert f.evaluate((Fraction(1), Fraction(2))) == (Fraction(5), Fraction(5))


def test_symmetrize_is_idempotent_on_equivariants():
    A = act("Z5")
    n = A.dim
    minus_x = PolyVectorField(n, tuple(plinear([-int(i == j) for j in range(n)]) for i in range(n)))
    assert equivariant_symmetrize(minus_x, A) == minus_x


@pytest.mark.parametrize("spec", ["Z3", "Z4", "Z2xZ3", "Z2xZ2"])
def test_symmetrized_random_field_is_exactly_equivariant(spec):
    A = act(spec)
    rng = random.Random(5)
    pts, vals, jacs = random_instance(rng, A.dim, 2)
    f = equivariant_symmetrize(hermite_interpolate(pts, vals, jacs), A)
    assert verify_equivariance(f, A, samples=10) == 0


def test_broken_field_is_detected():
    A = act("Z3")
    f = stable_equilibrium_field(A, (0, 0, 0))
    comps = list(f.components)
    comps[0] = dict(comps[0])
    comps[0][(1, 0, 0)] = comps[0].get((1, 0, 0), Fraction(0)) + Fraction(1, 1000)
    broken = PolyVectorField(3, tuple(comps))
    assert verify_equivariance(broken, A, samples=5) > 0


def test_stable_equilibrium_at_origin_is_minus_identity():
    A = act("Z4")
    f = stable_equilibrium_field(A, (0,) * 4)
    x = (Fraction(1), Fraction(-2), Fraction(3, 7), Fraction(5))
    assert f.evaluate(x) == tuple(-v for v in x)


def test_stable_equilibrium_on_free_orbit():
    A = act("Z3")
    x0 = (Fraction(1), Fraction(2), Fraction(3))
    f = stable_equilibrium_field(A, x0)
    for g in A.group.elements():
        y = tuple(A.apply(g, list(x0)))
        assert f.evaluate(y) == (0, 0, 0)
    J = np.array(f.jacobian(x0), float)
    assert np.linalg.eigvals(J).real.max() <= -0.5
    assert verify_equivariance(f, A, samples=10) == 0


def test_prescribed_rotation_on_mode_one_plane():
    A = act("Z4")
    e1 = np.array([1, 0, -1, 0]) / 2  # e1 e1^T etc. stay rational with this scaling
    e2 = np.array([0, 1, 0, -1]) / 2
    P = 2 * (np.outer(e1, e1) + np.outer(e2, e2))
    R = 2 * (np.outer(e2, e1) - np.outer(e1, e2))
    M = R - (np.eye(4) - P)
    Mq = [[Fraction(v).limit_denominator(4) for v in row] for row in M]
    x0 = (Fraction(1),) * 4
    f = prescribed_linearization_field(A, x0, Mq)
    assert f.evaluate(x0) == (0,) * 4
    assert f.jacobian(x0) == Mq
    B = np.stack([e1, e2], axis=1) * np.sqrt(2)
    assert np.allclose(B.T @ np.array(f.jacobian(x0), float) @ B, [[0, -1], [1, 0]])
    assert verify_equivariance(f, A, samples=5) == 0


def test_prescribed_rejects_non_commuting():
    A = act("Z4")
    M = [[Fraction(int(i == j == 0)) for j in range(4)] for i in range(4)]
    with pytest.raises(NonCommutingError):
        prescribed_linearization_field(A, (1, 1, 1, 1), M)


def test_prescribed_accepts_singular_and_trivial_isotropy():
    A = act("Z3")
    M = [[Fraction(1), Fraction(2), Fraction(0)], [Fraction(0), Fraction(0), Fraction(0)], [Fraction(3), Fraction(0), Fraction(-1)]]
    x0 = (Fraction(0), Fraction(1), Fraction(5))
    f = prescribed_linearization_field(A, x0, M)
    assert f.evaluate(x0) == (0, 0, 0)
    assert f.jacobian(x0) == M


HOPF_CASES = [("Z3", 3, 1), ("Z4", 4, 1), ("Z6", 6, 2), ("Z6", 3, 1), ("Z2xZ3", (2, 3), (2, 1)), ("Z2xZ3", (1, 3), (1, 1))]


@pytest.mark.parametrize("spec, H, K", HOPF_CASES)
def test_hopf_family_contracts(spec, H, K):
    A = act(spec)
    H = Subgroup(H if isinstance(H, tuple) else (H,))
    K = Subgroup(K if isinstance(K, tuple) else (K,))
    w = find_h_simple(H, K, A)
    x0 = (0,) * A.dim if H == A.group.whole() else isotropy_point(H, A)
    f = hopf_family(A, x0, w)
    assert verify_equivariance(f, A, samples=10) == 0
    assert f.evaluate(x0, Fraction(1, 10)) == (0,) * A.dim
    B = w.basis
    for lam in (Fraction(-1, 10), Fraction(0), Fraction(1, 10), Fraction(1, 3)):
        J = np.array(f.jacobian(x0, lam), float)
        JV = B.T @ J @ B
        assert np.allclose(JV, [[float(lam), -1], [1, float(lam)]], atol=1e-12)
        ev = np.sort_complex(np.linalg.eigvals(JV))
        assert np.allclose(ev, [float(lam) - 1j, float(lam) + 1j], atol=1e-12)
        # V is invariant and the complement contracts at rate 1
        assert np.abs(J @ B - B @ JV).max() < 1e-12


def test_field_json_roundtrip():
    A = act("Z3")
    w = find_h_simple(Subgroup((3,)), Subgroup((1,)), A)
    f = hopf_family(A, (0, 0, 0), w)
    g = PolyVectorField.from_json(f.to_json())
    assert g == f
    assert g.to_json() == f.to_json()


NUMERIC_CASES = [("Z3", 3, 1), ("Z6", 3, 1), ("Z6", 2, 1), ("Z2xZ3", (1, 3), (1, 1))]


@pytest.mark.parametrize("spec, H, K", NUMERIC_CASES)
def test_blended_numeric_matches_exact_field(spec, H, K):
    A = act(spec)
    H = Subgroup(H if isinstance(H, tuple) else (H,))
    K = Subgroup(K if isinstance(K, tuple) else (K,))
    w = find_h_simple(H, K, A)
    x0 = (0,) * A.dim if H == A.group.whole() else tuple(3 * v for v in isotropy_point(H, A))
    f = hopf_family(A, x0, w)
    F = HopfFamilyNumeric(A, x0, w)
    rng = random.Random(1)
    for _ in range(3):
        x = tuple(Fraction(v) + Fraction(rng.randint(-50, 50), 100) for v in x0)
        lam = Fraction(rng.randint(-3, 3), 10)
        xf = np.array([float(v) for v in x])
        exact = np.array([float(v) for v in f.evaluate(x, lam)])
        J = np.array(f.jacobian(x, lam), float)
        assert np.allclose(F(xf, float(lam)), exact, rtol=1e-9, atol=1e-9)
        assert np.allclose(F.jac(xf, float(lam)), J, rtol=1e-9, atol=1e-9)


def test_flat_bumps_keep_the_normal_form_to_third_order():
    A = act("Z6")
    w = find_h_simple(Subgroup((2,)), Subgroup((1,)), A)
    x0 = tuple(20 * v for v in isotropy_point(Subgroup((2,)), A))
    F = HopfFamilyNumeric(A, x0, w)
    r1, r2 = F.normal_form_remainder(0.2, 0.1), F.normal_form_remainder(0.1, 0.1)
    # halving the radius divides an O(r^4) remainder by 16
    assert 12 < r1 / r2 < 20


def test_bump_gap():
    A = act("Z6")
    assert bump_gap(A, (0,) * 6) == math.inf
    assert bump_gap(A, (1, 2, 1, 2, 1, 2)) == 1.0
