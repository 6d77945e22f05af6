import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cyclic_hopf.groups import (
    GroupSpec,
    NotNestedError,
    Subgroup,
    enumerate_subgroups,
    euler_phi,
    is_cyclic,
    normalizer,
    quotient_is_cyclic,
    subgroup_from_elements,
    theta_homomorphisms,
)


def S(*orders):
    return Subgroup(orders)


@pytest.mark.parametrize(
    "spec, expected",
    [
        ("Z6", [S(1), S(2), S(3), S(6)]),
        ("Z2xZ3", [S(1, 1), S(1, 3), S(2, 1), S(2, 3)]),
        ("Z4", [S(1), S(2), S(4)]),
    ],
)
def test_enumerate_subgroups(spec, expected):
    assert enumerate_subgroups(GroupSpec.parse(spec)) == expected


def test_parse_is_case_insensitive_and_validates():
    assert GroupSpec.parse("z2XZ3") == GroupSpec.parse("Z2xZ3")
    assert str(GroupSpec.parse("z6")) == "Z6"
    G = GroupSpec.parse("Z6")
    assert G.parse_subgroup("Z3") == S(3)
    for bad in ("Z0", "Y3", "Z2xZ3xZ5", "", "Z"):
        with pytest.raises(ValueError):
            GroupSpec.parse(bad)
    with pytest.raises(ValueError):
        G.parse_subgroup("Z4")


@pytest.mark.parametrize("sub, expected", [(S(2, 3), True), (S(2, 2), False), (S(4), True)])
def test_is_cyclic(sub, expected):
    assert is_cyclic(sub) is expected


@pytest.mark.parametrize(
    "H, K, expected",
    [(S(6), S(2), True), (S(2, 4), S(2, 2), True), (S(2, 2), S(1, 1), False)],
)
def test_quotient_is_cyclic(H, K, expected):
    assert quotient_is_cyclic(H, K) is expected


def test_quotient_requires_nesting():
    with pytest.raises(NotNestedError):
        quotient_is_cyclic(S(2), S(4))


@pytest.mark.parametrize("H, G, expected", [(S(2), "Z4", S(4)), (S(1, 1), "Z2xZ3", S(2, 3)), (S(6), "Z6", S(6))])
def test_normalizer_is_whole_group(H, G, expected):
    assert normalizer(H, GroupSpec.parse(G)) == expected


def _brute_quotient_cyclic(H, K, G):
    """Build H/K from cosets and look for an element of order |H|/|K|."""
    Kset = set(K.elements(G))
    cosets = {frozenset(G.add(h, k) for k in Kset) for h in H.elements(G)}
    target = len(cosets)
    for coset in cosets:
        h = next(iter(coset))
        x, order = h, 1
        while not Kset.__contains__(x):
            x = G.add(x, h)
            order += 1
        if order == target:
            return True
    return False


def test_quotient_cyclic_matches_brute_force_up_to_order_36():
    groups = [GroupSpec((k,)) for k in range(1, 37)]
    groups += [GroupSpec((l, k)) for l in range(2, 7) for k in range(2, 7) if l * k <= 36]
    for G in groups:
        subs = enumerate_subgroups(G)
        for H, K in itertools.product(subs, subs):
            if K.issubgroup(H):
                assert quotient_is_cyclic(H, K) == _brute_quotient_cyclic(H, K, G), (G, H, K)


def test_single_factor_subgroups_are_cyclic():
    for k in range(1, 40):
        assert all(is_cyclic(s) for s in enumerate_subgroups(GroupSpec((k,))))


def test_theta_examples():
    G = GroupSpec.parse("Z3")
    assert sorted(t.phase_per_generator for t in theta_homomorphisms(S(3), S(1), G)) == [
        (Fraction(1, 3),),
        (Fraction(2, 3),),
    ]
    G2 = GroupSpec.parse("Z2")
    (triv,) = theta_homomorphisms(S(2), S(2), G2)
    assert triv.phase_per_generator == (Fraction(0),)
    G4 = GroupSpec.parse("Z4")
    (half,) = theta_homomorphisms(S(4), S(2), G4)
    assert half.phase_per_generator == (Fraction(1, 2),)
    assert half.kernel_elements() == [(0,), (2,)]


def _brute_thetas(H, K, G):
    """All maps generator -> a/|H_i| that define homomorphisms with kernel K."""
    out = 0
    for phases in itertools.product(*(range(s) for s in H.suborders)):
        ph = [Fraction(a, s) for a, s in zip(phases, H.suborders)]
        ker = {h for h in H.elements(G) if sum(c * p for c, p in zip(H.coords(h, G), ph)) % 1 == 0}
        if ker == set(K.elements(G)):
            out += 1
    return out


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 6), st.integers(1, 8), st.booleans())
def test_theta_properties(l, k, two):
    G = GroupSpec((l, k)) if two and k > 1 else GroupSpec((k,))
    subs = enumerate_subgroups(G)
    for H, K in itertools.product(subs, subs):
        if not K.issubgroup(H):
            continue
        homs = theta_homomorphisms(H, K, G)
        assert len(homs) == _brute_thetas(H, K, G)
        if quotient_is_cyclic(H, K):
            assert len(homs) == euler_phi(H.order // K.order)
        else:
            assert homs == []
        for t in homs:
            assert t.is_homomorphism()
            assert t.kernel() == K
            els = H.elements(G)
            for a, b in itertools.product(els, els):
                assert t(G.add(a, b)) == (t(a) + t(b)) % 1


def test_subgroup_from_elements():
    G = GroupSpec.parse("Z2xZ2")
    assert subgroup_from_elements([(0, 0), (1, 0)], G) == S(2, 1)
    # the diagonal subgroup is not a product subgroup
    assert subgroup_from_elements([(0, 0), (1, 1)], G) is None
    assert subgroup_from_elements([(0, 0), (1, 0), (0, 1)], G) is None


def test_euler_phi():
    assert [euler_phi(d) for d in range(1, 13)] == [1, 1, 2, 2, 4, 2, 6, 4, 6, 4, 10, 4]
    assert all(euler_phi(p) == p - 1 for p in (2, 3, 5, 7, 11, 13))
