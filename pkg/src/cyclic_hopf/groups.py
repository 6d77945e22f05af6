"""Exact arithmetic for Z_k and Z_l x Z_k.

Subgroups are restricted to products Z_p x Z_q and are identified by their
suborder tuple.  Everything here is integer or ``Fraction`` arithmetic.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction

Element = tuple[int, ...]

_SPEC_RE = re.compile(r"^\s*z(\d+)\s*(?:x\s*z(\d+))?\s*$", re.IGNORECASE)


class NotNestedError(ValueError):
    """Raised when K is not contained in H."""


def _divisors(k: int) -> list[int]:
    return [d for d in range(1, k + 1) if k % d == 0]


def euler_phi(d: int) -> int:
    return sum(1 for a in range(d) if math.gcd(a, d) == 1) if d > 1 else 1


def _parse_orders(text: str) -> tuple[int, ...]:
    m = _SPEC_RE.match(text)
    if m is None:
        raise ValueError(f"cannot parse group spec {text!r}; expected 'Z<k>' or 'Z<l>xZ<k>'")
    return tuple(int(g) for g in m.groups() if g is not None)


@dataclass(frozen=True)
class GroupSpec:
    """A cyclic group or a product of two cyclic groups."""

    factor_orders: tuple[int, ...]

    def __post_init__(self):
        orders = tuple(int(k) for k in self.factor_orders)
        object.__setattr__(self, "factor_orders", orders)
        if len(orders) not in (1, 2):
            raise ValueError("a group spec has one or two cyclic factors")
        if any(k < 1 for k in orders):
            raise ValueError("factor orders must be positive")
        if len(orders) == 2 and any(k < 2 for k in orders):
            raise ValueError("both factors of Z_l x Z_k must have order > 1")

    @classmethod
    def parse(cls, text: str) -> GroupSpec:
        return cls(_parse_orders(text))

    @property
    def rank(self) -> int:
        return len(self.factor_orders)

    @property
    def order(self) -> int:
        return math.prod(self.factor_orders)

    def elements(self) -> list[Element]:
        return list(itertools.product(*(range(k) for k in self.factor_orders)))

    def add(self, a: Element, b: Element) -> Element:
        return tuple((x + y) % k for x, y, k in zip(a, b, self.factor_orders))

    def neg(self, a: Element) -> Element:
        return tuple((-x) % k for x, k in zip(a, self.factor_orders))

    def identity(self) -> Element:
        return (0,) * self.rank

    def whole(self) -> Subgroup:
        return Subgroup(self.factor_orders)

    def trivial(self) -> Subgroup:
        return Subgroup((1,) * self.rank)

    def parse_subgroup(self, text: str) -> Subgroup:
        orders = _parse_orders(text)
        if len(orders) != self.rank:
            raise ValueError(f"subgroup {text!r} does not match the factor count of {self}")
        sub = Subgroup(orders)
        sub.check_in(self)
        return sub

    def __str__(self) -> str:
        return "x".join(f"Z{k}" for k in self.factor_orders)


@dataclass(frozen=True, order=True)
class Subgroup:
    """Product subgroup Z_{s_1} (x Z_{s_2}); ``suborders[i]`` divides factor i."""

    suborders: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "suborders", tuple(int(s) for s in self.suborders))
        if any(s < 1 for s in self.suborders):
            raise ValueError("suborders must be positive")

    @property
    def order(self) -> int:
        return math.prod(self.suborders)

    def check_in(self, G: GroupSpec) -> None:
        if len(self.suborders) != G.rank or any(
            k % s for s, k in zip(self.suborders, G.factor_orders)
        ):
            raise ValueError(f"{self} is not a subgroup of {G}")

    def strides(self, G: GroupSpec) -> tuple[int, ...]:
        """Residue of each factor generator: ``k_i / s_i``."""
        return tuple(k // s for s, k in zip(self.suborders, G.factor_orders))

    def generators(self, G: GroupSpec) -> list[Element]:
        gens = []
        for i, stride in enumerate(self.strides(G)):
            g = [0] * G.rank
            g[i] = stride % G.factor_orders[i]
            gens.append(tuple(g))
        return gens

    def elements(self, G: GroupSpec) -> list[Element]:
        strides = self.strides(G)
        return [
            tuple(t * d for t, d in zip(ts, strides))
            for ts in itertools.product(*(range(s) for s in self.suborders))
        ]

    def contains(self, g: Element, G: GroupSpec) -> bool:
        return all(r % d == 0 for r, d in zip(g, self.strides(G)))

    def coords(self, g: Element, G: GroupSpec) -> tuple[int, ...]:
        """Exponents of ``g`` with respect to :meth:`generators`."""
        if not self.contains(g, G):
            raise ValueError(f"{g} is not in {self}")
        return tuple((r // d) % s for r, d, s in zip(g, self.strides(G), self.suborders))

    def issubgroup(self, other: Subgroup) -> bool:
        return all(o % s == 0 for s, o in zip(self.suborders, other.suborders))

    def __str__(self) -> str:
        return "x".join(f"Z{s}" for s in self.suborders)


def subgroup_from_elements(elements, G: GroupSpec) -> Subgroup | None:
    """Identify a set of elements as a product subgroup, or return None."""
    elems = {tuple(e) for e in elements}
    if not elems:
        return None
    suborders = []
    for i, k in enumerate(G.factor_orders):
        axis = {e[i] for e in elems if all(e[j] == 0 for j in range(G.rank) if j != i)}
        suborders.append(len(axis))
    try:
        cand = Subgroup(tuple(suborders))
        cand.check_in(G)
    except ValueError:
        return None
    if set(cand.elements(G)) != elems:
        return None
    return cand


def enumerate_subgroups(G: GroupSpec) -> list[Subgroup]:
    """All product subgroups, sorted lexicographically by suborders."""
    return sorted(Subgroup(t) for t in itertools.product(*(_divisors(k) for k in G.factor_orders)))


def is_cyclic(S: Subgroup) -> bool:
    return all(math.gcd(a, b) == 1 for a, b in itertools.combinations(S.suborders, 2))


def _require_nested(H: Subgroup, K: Subgroup) -> None:
    if len(H.suborders) != len(K.suborders) or not K.issubgroup(H):
        raise NotNestedError(f"K={K} is not contained in H={H}")


def quotient_orders(H: Subgroup, K: Subgroup) -> tuple[int, ...]:
    _require_nested(H, K)
    return tuple(h // k for h, k in zip(H.suborders, K.suborders))


def quotient_is_cyclic(H: Subgroup, K: Subgroup) -> bool:
    return is_cyclic(Subgroup(quotient_orders(H, K)))


def normalizer(H: Subgroup, G: GroupSpec) -> Subgroup:
    # abelian: every subgroup is normal
    H.check_in(G)
    return G.whole()


@dataclass(frozen=True)
class ThetaHom:
    """A homomorphism H -> S^1 = Q/Z given by phases on H's generators.

    Phases are fractions of one period in [0, 1).
    """

    group: GroupSpec
    domain: Subgroup
    phase_per_generator: tuple[Fraction, ...]

    def __call__(self, g: Element) -> Fraction:
        t = self.domain.coords(g, self.group)
        return sum((c * p for c, p in zip(t, self.phase_per_generator)), Fraction(0)) % 1

    def is_homomorphism(self) -> bool:
        # well defined iff every generator phase has order dividing the generator order
        return all((p * s) % 1 == 0 for p, s in zip(self.phase_per_generator, self.domain.suborders))

    def kernel_elements(self) -> list[Element]:
        return [g for g in self.domain.elements(self.group) if self(g) == 0]

    def kernel(self) -> Subgroup | None:
        return subgroup_from_elements(self.kernel_elements(), self.group)

    def to_dict(self) -> dict:
        return {
            "domain": str(self.domain),
            "phase_per_generator": [f"{p.numerator}/{p.denominator}" for p in self.phase_per_generator],
        }


def theta_homomorphisms(H: Subgroup, K: Subgroup, G: GroupSpec) -> list[ThetaHom]:
    """Every Theta: H -> S^1 whose kernel is exactly K.

    Generator i of H must map to b_i / (h_i / k_i) with b_i a unit mod
    h_i / k_i; such maps exist only when H/K is cyclic.
    """
    H.check_in(G)
    K.check_in(G)
    q = quotient_orders(H, K)
    if not is_cyclic(Subgroup(q)):
        return []
    choices = [[Fraction(b, d) for b in range(d) if math.gcd(b, d) == 1] for d in q]
    return [ThetaHom(G, H, tuple(ph)) for ph in itertools.product(*choices)]
