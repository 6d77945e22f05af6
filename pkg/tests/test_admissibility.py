import json

import pytest

from cyclic_hopf.admissibility import (
    NO_H_SIMPLE,
    abelian_vs_cyclic_gap,
    check_cyclic_hopf,
    check_hmodk,
    classify_all,
    exception_clause,
    nested_pairs,
    theorem_equi_predicate,
)
from cyclic_hopf.groups import GroupSpec, NotNestedError, Subgroup, enumerate_subgroups
from cyclic_hopf.representation import PermAction, fix_subspace, is_isotropy


def act(spec):
    return PermAction(GroupSpec.parse(spec))


def S(*o):
    return Subgroup(o)


def test_z4_exception_pair():
    rep = check_cyclic_hopf(S(4), S(2), act("Z4"))
    assert rep.cond_a.holds and rep.cond_b.holds and rep.cond_c.holds
    assert rep.cond_c.witness["dim_fix_K"] == 2
    # the generator swaps the two half-planes of Fix(Z2) cut by the diagonal
    assert not rep.cond_d.holds
    assert not rep.verdict_cyclic_hopf
    assert rep.exception_triggered
    assert any(r.startswith(NO_H_SIMPLE) for r in rep.reasons)


def test_z3_rotating_wave_pair():
    rep = check_cyclic_hopf(S(3), S(1), act("Z3"))
    assert all(c.holds for c in (rep.cond_a, rep.cond_b, rep.cond_c, rep.cond_d))
    assert rep.verdict_cyclic_hopf
    assert rep.h_simple_witness.mode_index == 1
    assert rep.reasons == []


def test_z6_mode_two_witness():
    rep = check_cyclic_hopf(S(6), S(2), act("Z6"))
    assert rep.verdict_cyclic_hopf
    assert rep.h_simple_witness.mode_index == 2


@pytest.mark.parametrize("spec", ["Z4", "Z6", "Z2xZ3", "Z2xZ4", "Z3xZ3"])
def test_h_equals_k_passes_hmodk_when_fix_is_big(spec):
    A = act(spec)
    for K in enumerate_subgroups(A.group):
        if is_isotropy(K, A) and fix_subspace(K, A).dim >= 2:
            rep = check_hmodk(K, K, A)
            assert rep.verdict_hmodk, (spec, K, rep.reasons)
            assert rep.cond_a.holds and rep.cond_d.holds


def test_z3_z3_trivial_conditions():
    rep = check_cyclic_hopf(S(3), S(3), act("Z3"))
    assert rep.cond_a.holds and rep.cond_d.holds
    assert rep.cond_c.witness["dim_fix_K"] == 1 and not rep.cond_c.holds


def test_non_nested_pair_rejected():
    with pytest.raises(NotNestedError):
        check_hmodk(S(2), S(4), act("Z4"))


def test_classification_counts():
    assert len(classify_all(GroupSpec.parse("Z3")).rows) == 3
    t = classify_all(GroupSpec.parse("Z2xZ3"))
    assert len(t.rows) == 9
    assert {(str(r.report.H), str(r.report.K)) for r in t.rows} == {
        (str(H), str(K)) for H, K in nested_pairs(GroupSpec.parse("Z2xZ3"))
    }
    z4 = classify_all(GroupSpec.parse("Z4"))
    assert z4.row(S(4), S(2)).report.verdict_cyclic_hopf is False


def test_single_factor_equivalence():
    for k in range(1, 17):
        A = PermAction(GroupSpec((k,)))
        for n in range(1, k + 1):
            if k % n:
                continue
            for q in range(1, n + 1):
                if n % q:
                    continue
                rep = check_cyclic_hopf(S(n), S(q), A)
                independent = check_hmodk(S(n), S(q), A).verdict_hmodk and not (
                    n == k and k % 2 == 0 and 2 * q == k
                )
                assert rep.verdict_cyclic_hopf == independent, (k, n, q)
                assert exception_clause(S(n), S(q), A.group) == (n == k and k % 2 == 0 and 2 * q == k)


def test_cyclic_implies_hmodk_and_gap_has_reasons():
    for spec in ("Z2xZ2", "Z2xZ4", "Z3xZ6", "Z4xZ4"):
        t = classify_all(GroupSpec.parse(spec))
        for r in t.rows:
            assert not r.report.verdict_cyclic_hopf or r.report.verdict_hmodk
        for g in abelian_vs_cyclic_gap(GroupSpec.parse(spec)):
            row = t.row(g.H, g.K)
            assert not row.report.verdict_cyclic_hopf and g.reasons


@pytest.mark.parametrize(
    "l, k, H, K, expected",
    [
        (2, 3, (2, 3), (2, 1), True),
        (2, 2, (2, 2), (2, 1), False),
        (2, 2, (2, 2), (1, 2), False),
    ],
)
def test_theorem_equi_examples(l, k, H, K, expected):
    assert theorem_equi_predicate(l, k, H, K) is expected


def test_theorem_equi_non_coprime_rejects_every_k():
    for p in (1, 2):
        for q in (1, 2, 4):
            assert theorem_equi_predicate(2, 4, (2, 4), (p, q)) is False


def test_closed_form_disagreements_are_the_trivial_factor_family():
    """Characterisation of where the literal closed form and the pipeline differ.

    The literal side conditions m != q and p != n reject 1 = 1, so pairs
    (Z1 x Z_n, trivial) and (Z_m x Z1, trivial) are closed-form false even
    though a rotating wave in the nontrivial block realises them.
    """
    for l in range(2, 7):
        for k in range(2, 7):
            t = classify_all(GroupSpec((l, k)))
            for row in t.rows:
                H, K = row.report.H.suborders, row.report.K.suborders
                family = K == (1, 1) and 1 in H
                if not family:
                    assert not row.disagrees, (l, k, H, K)
                elif row.report.verdict_cyclic_hopf:
                    assert row.disagrees and row.closed_form is False, (l, k, H, K)


def test_gap_z2xz4():
    gap = abelian_vs_cyclic_gap(GroupSpec.parse("Z2xZ4"))
    assert any(str(g.H) == "Z2xZ4" and "H not cyclic" in g.reasons for g in gap)
    assert all(not (g.H.suborders[0] % 2 or g.H.suborders[1] % 2) for g in gap)
    assert abelian_vs_cyclic_gap(GroupSpec.parse("Z2xZ3")) == []
    with pytest.raises(ValueError):
        abelian_vs_cyclic_gap(GroupSpec.parse("Z5"))


def test_z2xz2_gap_flags_whole_group_iff_abelian_admissible():
    G = GroupSpec.parse("Z2xZ2")
    rep = check_cyclic_hopf(S(2, 2), S(1, 1), PermAction(G))
    flagged = any(g.H == S(2, 2) and g.K == S(1, 1) for g in abelian_vs_cyclic_gap(G))
    assert flagged == rep.verdict_abelian_hopf


def test_table_serialisation_is_deterministic():
    G = GroupSpec.parse("Z2xZ3")
    a = json.dumps(classify_all(G).to_dict(), sort_keys=True)
    b = json.dumps(classify_all(G, seed=0).to_dict(), sort_keys=True)
    assert a == b
    data = json.loads(a)
    assert data["schema_version"] == 1
    csv_text = classify_all(G).to_csv()
    assert len(csv_text.strip().splitlines()) == 1 + 9
