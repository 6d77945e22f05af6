"""H mod K admissibility and its cyclic Hopf refinement, pair by pair.

``check_hmodk`` evaluates conditions (a)-(d) with exact machinery;
``check_cyclic_hopf`` adds H isotropy, cyclicity of H and K and an H-simple
plane with kernel K.  Dropping the two cyclicity requirements gives the
abelian Hopf baseline used by :func:`abelian_vs_cyclic_gap`.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field

from .groups import (
    GroupSpec,
    NotNestedError,
    Subgroup,
    enumerate_subgroups,
    is_cyclic,
    normalizer,
    quotient_orders,
)
from .representation import (
    HSimpleWitness,
    PermAction,
    chambers,
    find_h_simple,
    fix_subspace,
    is_isotropy,
)

SCHEMA_VERSION = 1

NO_H_SIMPLE = "no H-simple subspace with kernel K"


@dataclass
class Condition:
    holds: bool
    witness: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"holds": self.holds, "witness": self.witness}


@dataclass
class AdmissibilityReport:
    H: Subgroup
    K: Subgroup
    cond_a: Condition
    cond_b: Condition
    cond_c: Condition
    cond_d: Condition
    H_cyclic: bool | None = None
    H_isotropy: bool | None = None
    K_cyclic: bool | None = None
    h_simple_witness: HSimpleWitness | None = None
    exception_triggered: bool | None = None
    reasons: list[str] = field(default_factory=list)

    @property
    def verdict_hmodk(self) -> bool:
        return all(c.holds for c in (self.cond_a, self.cond_b, self.cond_c, self.cond_d))

    @property
    def hopf_evaluated(self) -> bool:
        return self.H_cyclic is not None

    @property
    def verdict_abelian_hopf(self) -> bool:
        return self.verdict_hmodk and bool(self.H_isotropy) and self.h_simple_witness is not None

    @property
    def verdict_cyclic_hopf(self) -> bool:
        return self.verdict_abelian_hopf and bool(self.H_cyclic) and bool(self.K_cyclic)

    def to_dict(self) -> dict:
        out = {
            "H": str(self.H),
            "K": str(self.K),
            "cond_a": self.cond_a.to_dict(),
            "cond_b": self.cond_b.to_dict(),
            "cond_c": self.cond_c.to_dict(),
            "cond_d": self.cond_d.to_dict(),
            "verdict_hmodk": self.verdict_hmodk,
        }
        if self.hopf_evaluated:
            out["hopf_conditions"] = {
                "H_cyclic": self.H_cyclic,
                "H_isotropy": self.H_isotropy,
                "K_cyclic": self.K_cyclic,
                "h_simple_witness": None if self.h_simple_witness is None else self.h_simple_witness.to_dict(),
                "exception_triggered": self.exception_triggered,
            }
            out["verdict_abelian_hopf"] = self.verdict_abelian_hopf
            out["verdict_cyclic_hopf"] = self.verdict_cyclic_hopf
        out["reasons"] = list(self.reasons)
        return out


def _nested(H: Subgroup, K: Subgroup, G: GroupSpec) -> None:
    H.check_in(G)
    K.check_in(G)
    if not K.issubgroup(H):
        raise NotNestedError(f"K={K} is not contained in H={H}")


def check_hmodk(H: Subgroup, K: Subgroup, A: PermAction, seed: int = 0) -> AdmissibilityReport:
    """Conditions (a)-(d) of the H mod K theorem, each with a witness."""
    G = A.group
    _nested(H, K, G)
    reasons = []

    q = quotient_orders(H, K)
    a = Condition(is_cyclic(Subgroup(q)), {"quotient_orders": list(q), "quotient_order": math.prod(q)})
    if not a.holds:
        reasons.append("(a) H/K is not cyclic")

    b = Condition(is_isotropy(K, A))
    if not b.holds:
        reasons.append("(b) K is not an isotropy subgroup")

    dim = fix_subspace(K, A).dim
    NK = normalizer(K, G)
    c_ok = dim > 2 or (dim == 2 and (H == K or H == NK))
    c = Condition(c_ok, {"dim_fix_K": dim, "normalizer": str(NK)})
    if not c.holds:
        reasons.append(f"(c) dim Fix(K) = {dim}" + (" and H is neither K nor N(K)" if dim == 2 else " < 2"))

    if b.holds:
        dec = chambers(K, H, A, seed=seed)
        fixed = dec.fixed_chambers()
        d = Condition(
            bool(fixed),
            {
                "walls": len(dec.hyperplanes),
                "chambers": len(dec.chambers),
                "fixed_chamber": fixed[0] if fixed else None,
                "fixed_chamber_signs": list(dec.chambers[fixed[0]][0]) if fixed else None,
            },
        )
        if not d.holds:
            reasons.append("(d) H fixes no component of Fix(K) minus L_K")
    else:
        d = Condition(False, {"skipped": "K is not an isotropy subgroup"})
    return AdmissibilityReport(H, K, a, b, c, d, reasons=reasons)


def exception_clause(H: Subgroup, K: Subgroup, G: GroupSpec) -> bool:
    """Closed form: some block has n = k even and q = k/2 (with the other factor of K equal to H's)."""
    for i, k in enumerate(G.factor_orders):
        others_equal = all(H.suborders[j] == K.suborders[j] for j in range(G.rank) if j != i)
        if others_equal and k % 2 == 0 and H.suborders[i] == k and 2 * K.suborders[i] == k:
            return True
    return False


def check_cyclic_hopf(H: Subgroup, K: Subgroup, A: PermAction, seed: int = 0) -> AdmissibilityReport:
    """All seven conditions; the constructive mode search decides the H-simple part."""
    rep = check_hmodk(H, K, A, seed=seed)
    rep.H_cyclic = is_cyclic(H)
    rep.K_cyclic = is_cyclic(K)
    rep.H_isotropy = is_isotropy(H, A)
    rep.h_simple_witness = find_h_simple(H, K, A)
    rep.exception_triggered = exception_clause(H, K, A.group)
    if rep.exception_triggered and rep.h_simple_witness is not None:
        raise AssertionError(f"exception clause holds for ({H},{K}) but a witness was found")
    if not rep.H_isotropy:
        rep.reasons.append("H is not an isotropy subgroup")
    if not rep.H_cyclic:
        rep.reasons.append("H not cyclic")
    if not rep.K_cyclic:
        rep.reasons.append("K not cyclic")
    if rep.h_simple_witness is None:
        rep.reasons.append(NO_H_SIMPLE + (" (exception n=k even, q=k/2)" if rep.exception_triggered else ""))
    return rep


def equi_shapes(H: Subgroup, K: Subgroup) -> list[int]:
    """Which of the two closed-form shapes (1: K=Z_m x Z_q, 2: K=Z_p x Z_n) the pair has."""
    (m, n), (p, q) = H.suborders, K.suborders
    out = []
    if p == m:
        out.append(1)
    if q == n:
        out.append(2)
    return out


def theorem_equi_predicate(l: int, k: int, H: tuple[int, int], K: tuple[int, int]) -> bool:
    """Closed-form classification for Z_l x Z_k, implemented literally.

    Shape 1, (Z_m x Z_n, Z_m x Z_q): q | n, not (q = k/2 and n = k),
    gcd(m, n) = 1, gcd(m, q) = 1 and m != q.
    Shape 2, (Z_m x Z_n, Z_p x Z_n): p | m, not (p = l/2 and m = l),
    gcd(m, n) = 1, gcd(p, n) = 1 and p != n.
    """
    (m, n), (p, q) = H, K
    if l % m or k % n or m % p or n % q:
        raise ValueError("expected m|l, n|k, p|m, q|n")
    if math.gcd(m, n) != 1:
        return False
    shape1 = (
        p == m
        and n % q == 0
        and not (2 * q == k and n == k)
        and math.gcd(m, q) == 1
        and m != q
    )
    shape2 = (
        q == n
        and m % p == 0
        and not (2 * p == l and m == l)
        and math.gcd(p, n) == 1
        and p != n
    )
    return shape1 or shape2


@dataclass
class ClassificationRow:
    report: AdmissibilityReport
    shapes: list[int]
    closed_form: bool | None

    @property
    def disagrees(self) -> bool:
        return self.closed_form is not None and self.closed_form != self.report.verdict_cyclic_hopf

    def to_dict(self) -> dict:
        out = self.report.to_dict()
        out["closed_form"] = (
            {"shapes": self.shapes, "verdict": self.closed_form, "agrees": not self.disagrees}
            if self.closed_form is not None
            else "outside closed-form classification"
        )
        return out

    def flat(self) -> dict:
        r = self.report
        return {
            "H": str(r.H),
            "K": str(r.K),
            "cond_a": r.cond_a.holds,
            "cond_b": r.cond_b.holds,
            "cond_c": r.cond_c.holds,
            "cond_d": r.cond_d.holds,
            "hmodk": r.verdict_hmodk,
            "H_cyclic": r.H_cyclic,
            "H_isotropy": r.H_isotropy,
            "K_cyclic": r.K_cyclic,
            "h_simple": r.h_simple_witness is not None,
            "exception": r.exception_triggered,
            "abelian_hopf": r.verdict_abelian_hopf,
            "cyclic_hopf": r.verdict_cyclic_hopf,
            "closed_form": "" if self.closed_form is None else self.closed_form,
        }


@dataclass
class ClassificationTable:
    action: PermAction
    rows: list[ClassificationRow]

    @property
    def group(self) -> GroupSpec:
        return self.action.group

    def disagreements(self) -> list[ClassificationRow]:
        return [r for r in self.rows if r.disagrees]

    def row(self, H: Subgroup, K: Subgroup) -> ClassificationRow:
        return next(r for r in self.rows if r.report.H == H and r.report.K == K)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "group": str(self.group),
            "action": self.action.describe(),
            "rows": [r.to_dict() for r in self.rows],
            "disagreements": [[str(r.report.H), str(r.report.K)] for r in self.disagreements()],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        flat = [r.flat() for r in self.rows]
        writer = csv.DictWriter(buf, fieldnames=list(flat[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(flat)
        return buf.getvalue()


def nested_pairs(G: GroupSpec) -> list[tuple[Subgroup, Subgroup]]:
    subs = enumerate_subgroups(G)
    pairs = [(H, K) for H in subs for K in subs if K.issubgroup(H)]
    return sorted(pairs, key=lambda hk: (hk[0].order, hk[1].order, hk[0].suborders, hk[1].suborders))


def classify_all(G: GroupSpec, A: PermAction | None = None, seed: int = 0) -> ClassificationTable:
    A = PermAction(G) if A is None else A
    rows = []
    for H, K in nested_pairs(G):
        rep = check_cyclic_hopf(H, K, A, seed=seed)
        shapes, closed = [], None
        if G.rank == 2:
            shapes = equi_shapes(H, K)
            if shapes:
                closed = theorem_equi_predicate(*G.factor_orders, H.suborders, K.suborders)
        rows.append(ClassificationRow(rep, shapes, closed))
    return ClassificationTable(A, rows)


@dataclass
class GapPair:
    H: Subgroup
    K: Subgroup
    reasons: list[str]

    def to_dict(self) -> dict:
        return {"H": str(self.H), "K": str(self.K), "reasons": self.reasons}


def abelian_vs_cyclic_gap(G: GroupSpec, A: PermAction | None = None, seed: int = 0) -> list[GapPair]:
    """Pairs admissible for the abelian Hopf theorem but not the cyclic one."""
    if G.rank != 2:
        raise ValueError("the gap is empty by definition for a cyclic group")
    table = classify_all(G, A, seed=seed)
    out = []
    for row in table.rows:
        r = row.report
        if r.verdict_abelian_hopf and not r.verdict_cyclic_hopf:
            reasons = [s for s, ok in (("H not cyclic", r.H_cyclic), ("K not cyclic", r.K_cyclic)) if not ok]
            out.append(GapPair(r.H, r.K, reasons))
    return out
