"""The block cyclic-shift permutation action and its linear algebra.

Z_k acts on R^k by ``(rho(r) x)_i = x_{i-r mod k}``; Z_l x Z_k acts
diagonally on R^l (+) R^k.  Fixed-point subspaces, the variety L_K and the
chamber structure of Fix(K) minus L_K are computed in exact rationals.
Fourier modes are irrational in general and carry float bases.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction

import numpy as np
from scipy.optimize import linprog

from .groups import Element, GroupSpec, Subgroup, subgroup_from_elements
from .linalg import LinearSubspace, nullspace


class NotIsotropyError(ValueError):
    pass


class SamplingError(RuntimeError):
    pass


@dataclass(frozen=True)
class PermAction:
    """Diagonal action of ``group`` by cyclic permutation of coordinate blocks."""

    group: GroupSpec

    @property
    def block_dims(self) -> tuple[int, ...]:
        return self.group.factor_orders

    @property
    def offsets(self) -> tuple[int, ...]:
        return tuple(itertools.accumulate((0,) + self.block_dims[:-1]))

    @property
    def dim(self) -> int:
        return sum(self.block_dims)

    def perm(self, g: Element) -> tuple[int, ...]:
        """Index map p with ``(rho(g) x)[i] == x[p[i]]``."""
        p = []
        for off, k, r in zip(self.offsets, self.block_dims, g):
            p.extend(off + (i - r) % k for i in range(k))
        return tuple(p)

    def apply(self, g: Element, x):
        p = self.perm(g)
        if isinstance(x, np.ndarray):
            return x[..., list(p)]
        return type(x)(x[j] for j in p) if isinstance(x, tuple) else [x[j] for j in p]

    def matrix(self, g: Element) -> np.ndarray:
        n = self.dim
        M = np.zeros((n, n), dtype=int)
        M[np.arange(n), list(self.perm(g))] = 1
        return M

    def is_homomorphism(self) -> bool:
        G = self.group
        return all(
            np.array_equal(self.matrix(G.add(a, b)), self.matrix(a) @ self.matrix(b))
            for a in G.elements()
            for b in G.elements()
        )

    def describe(self) -> str:
        return "cyclic permutation blocks " + "+".join(f"R^{k}" for k in self.block_dims)


def _shift_equations(A: PermAction, g: Element) -> list[tuple[Fraction, ...]]:
    n, p = A.dim, A.perm(g)
    rows = []
    for i in range(n):
        if p[i] != i:
            row = [Fraction(0)] * n
            row[p[i]] += 1
            row[i] -= 1
            rows.append(tuple(row))
    return rows


@lru_cache(maxsize=None)
def fix_element(g: Element, A: PermAction) -> LinearSubspace:
    return LinearSubspace.solutions(_shift_equations(A, g), A.dim)


@lru_cache(maxsize=None)
def fix_subspace(K: Subgroup, A: PermAction) -> LinearSubspace:
    """Fix(K) as the nullspace of the stacked rho(g) - I over K's generators."""
    K.check_in(A.group)
    rows = [r for g in K.generators(A.group) for r in _shift_equations(A, g)]
    return LinearSubspace.solutions(rows, A.dim)


@lru_cache(maxsize=None)
def is_isotropy(K: Subgroup, A: PermAction) -> bool:
    # a finite union of proper subspaces cannot cover Fix(K)
    FK = fix_subspace(K, A)
    return all(
        _fix_meet(K, g, A).dim < FK.dim for g in A.group.elements() if not K.contains(g, A.group)
    )


@lru_cache(maxsize=None)
def _fix_meet(K: Subgroup, g: Element, A: PermAction) -> LinearSubspace:
    return fix_subspace(K, A).intersect(fix_element(g, A))


def stabilizer(x, A: PermAction) -> Subgroup | None:
    xs = list(x)
    elems = [g for g in A.group.elements() if A.apply(g, xs) == xs]
    return subgroup_from_elements(elems, A.group)


def isotropy_point(K: Subgroup, A: PermAction, seed: int = 0, scale: int = 10) -> tuple[Fraction, ...]:
    """A rational point of Fix(K) whose stabilizer is exactly K."""
    if not is_isotropy(K, A):
        raise NotIsotropyError(f"{K} is not an isotropy subgroup")
    FK = fix_subspace(K, A)
    rng = random.Random(seed)
    for _ in range(1000):
        c = [Fraction(rng.randint(-scale, scale)) for _ in range(FK.dim)]
        x = FK.point(c)
        if stabilizer(x, A) == K:
            return x
    raise SamplingError("no generic point found")


@dataclass(frozen=True)
class VarietyLK:
    fix: LinearSubspace
    pieces: tuple[LinearSubspace, ...]
    sources: tuple[tuple[Element, ...], ...]

    def to_dict(self) -> dict:
        return {
            "fix_dim": self.fix.dim,
            "pieces": [
                {"dim": p.dim, "sources": [list(s) for s in src]}
                for p, src in zip(self.pieces, self.sources)
            ],
        }


@lru_cache(maxsize=None)
def variety_LK(K: Subgroup, A: PermAction) -> VarietyLK:
    """The union over g not in K of Fix(g) & Fix(K), duplicates merged."""
    FK = fix_subspace(K, A)
    merged: dict[LinearSubspace, list[Element]] = {}
    for g in A.group.elements():
        if K.contains(g, A.group):
            continue
        piece = _fix_meet(K, g, A)
        if piece == FK:
            raise NotIsotropyError(f"{g} fixes all of Fix({K}); {K} is not an isotropy subgroup")
        merged.setdefault(piece, []).append(g)
    keys = sorted(merged, key=lambda p: (-p.dim, p.basis))
    return VarietyLK(FK, tuple(keys), tuple(tuple(merged[p]) for p in keys))


@dataclass
class ChamberDecomposition:
    fix: LinearSubspace
    hyperplanes: list[tuple[Fraction, ...]]
    chambers: list[tuple[tuple[int, ...], tuple[Fraction, ...]]]
    action: dict[Element, tuple[int, ...]]
    unused_pieces: list[LinearSubspace] = field(default_factory=list)

    def signs(self, coords) -> tuple[int, ...]:
        out = []
        for nrm in self.hyperplanes:
            v = sum(a * b for a, b in zip(nrm, coords))
            out.append((v > 0) - (v < 0))
        return tuple(out)

    def index_of(self, coords) -> int:
        s = self.signs(coords)
        if 0 in s:
            raise SamplingError("point lies on a wall")
        return [c[0] for c in self.chambers].index(s)

    def fixed_chambers(self) -> list[int]:
        return [
            i for i in range(len(self.chambers)) if all(perm[i] == i for perm in self.action.values())
        ]


def _normal_in_coords(piece: LinearSubspace, FK: LinearSubspace) -> tuple[Fraction, ...]:
    coords = [FK.coordinates(b) for b in piece.basis]
    (nrm,) = nullspace(coords, FK.dim)
    # scale to coprime integers with a positive leading entry
    den = math.lcm(*(v.denominator for v in nrm))
    ints = [int(v * den) for v in nrm]
    g = math.gcd(*ints)
    sign = 1 if next(v for v in ints if v) > 0 else -1
    return tuple(Fraction(sign * v // g) for v in ints)


def _chamber_point(normals, signs, d: int, rng: random.Random) -> tuple[Fraction, ...] | None:
    """Rational point with the given strict signs, or None when infeasible."""
    if not normals:
        return tuple(Fraction(rng.randint(-9, 9)) for _ in range(d))
    A_ub = np.array([[-s * float(v) for v in nrm] for nrm, s in zip(normals, signs)])
    b_ub = -np.ones(len(normals))
    obj = np.array([rng.uniform(-1, 1) for _ in range(d)]) * 1e-3
    res = linprog(obj, A_ub=A_ub, b_ub=b_ub, bounds=[(-50, 50)] * d, method="highs")
    if res.status != 0:
        return None
    for den in (1000, 10**6, 10**9):
        c = tuple(Fraction(v).limit_denominator(den) for v in res.x)
        got = tuple(int(np.sign(sum(a * b for a, b in zip(nrm, c)))) for nrm in normals)
        if got == tuple(signs):
            return c
    raise SamplingError("LP point failed exact sign verification")


def chambers(K: Subgroup, H: Subgroup, A: PermAction, seed: int = 0) -> ChamberDecomposition:
    """Chambers of Fix(K) cut by the codimension-one pieces of L_K.

    Chambers are found incrementally: each new wall splits a chamber when an
    LP finds points on both sides.  Sample points are rational and verified
    exactly; H acts on chambers through its action on sample points.
    """
    if not K.issubgroup(H):
        raise ValueError(f"K={K} is not contained in H={H}")
    var = variety_LK(K, A)
    FK = var.fix
    d = FK.dim
    hyper, unused = [], []
    for piece in var.pieces:
        if piece.dim == d - 1:
            nrm = _normal_in_coords(piece, FK)
            if nrm not in hyper:
                hyper.append(nrm)
        else:
            unused.append(piece)
    hyper.sort()
    rng = random.Random(seed)
    cells: list[tuple[tuple[int, ...], tuple[Fraction, ...]]] = [((), _chamber_point([], (), d, rng))]
    for i in range(len(hyper)):
        nxt = []
        for signs, _ in cells:
            for s in (1, -1):
                pt = _chamber_point(hyper[: i + 1], signs + (s,), d, rng)
                if pt is not None:
                    nxt.append((signs + (s,), pt))
        cells = nxt
    cells.sort(key=lambda c: tuple(-s for s in c[0]))
    dec = ChamberDecomposition(FK, hyper, cells, {}, unused)
    for h in H.elements(A.group):
        perm = []
        for _, c in cells:
            image = FK.coordinates(A.apply(h, FK.point(c)))
            perm.append(dec.index_of(image))
        dec.action[h] = tuple(perm)
    return dec


def h_fixes_component(H: Subgroup, K: Subgroup, A: PermAction, seed: int = 0) -> tuple[bool, int | None]:
    fixed = chambers(K, H, A, seed).fixed_chambers()
    return (True, fixed[0]) if fixed else (False, None)


@dataclass(frozen=True)
class Mode:
    """Real Fourier mode ``j`` of one cyclic block, restricted to a subgroup H."""

    block: int
    j: int
    dim: int
    basis: np.ndarray = field(compare=False, repr=False)
    kernel: Subgroup
    # per element of H: rotation angle (fraction of a turn) for 2-dim modes,
    # 0 or 1/2 (sign) for 1-dim modes
    angles: tuple[tuple[Element, Fraction], ...] = field(compare=False, repr=False)

    @property
    def character(self) -> tuple[Fraction, ...]:
        return tuple(a for _, a in self.angles)


def _mode_basis(k: int, j: int) -> np.ndarray:
    i = np.arange(k)
    if j == 0:
        return np.ones((k, 1)) / np.sqrt(k)
    if 2 * j == k:
        return ((-1.0) ** i)[:, None] / np.sqrt(k)
    phi = 2 * np.pi * j * i / k
    return np.stack([np.cos(phi), np.sin(phi)], axis=1) / np.sqrt(k / 2)


def isotypic_modes(A: PermAction, H: Subgroup) -> list[Mode]:
    """Real Fourier decomposition of each block, with H's kernel on every mode.

    Mode j of a block Z_k is the span of cos/sin(2 pi j i / k); an element with
    block residue r rotates it by j r / k of a turn, so it acts trivially iff
    k divides j r.
    """
    G = A.group
    H.check_in(G)
    h_elems = H.elements(G)
    modes = []
    for b, (off, k) in enumerate(zip(A.offsets, A.block_dims)):
        for j in range(k // 2 + 1):
            local = _mode_basis(k, j)
            basis = np.zeros((A.dim, local.shape[1]))
            basis[off : off + k] = local
            angles = tuple((h, Fraction(j * h[b], k) % 1) for h in h_elems)
            ker = subgroup_from_elements([h for h, a in angles if a == 0], G)
            modes.append(Mode(b, j, local.shape[1], basis, ker, angles))
    return modes


@dataclass(frozen=True)
class HSimpleWitness:
    """A 2-dim H-invariant subspace on which H acts H-simply with kernel K."""

    modes: tuple[tuple[int, int], ...]
    basis: np.ndarray = field(compare=False, repr=False)
    kernel: Subgroup
    simple_kind: str

    @property
    def mode_index(self) -> int:
        return self.modes[0][1]

    def to_dict(self) -> dict:
        return {
            "mode_index": self.mode_index,
            "modes": [{"block": b, "j": j} for b, j in self.modes],
            "kernel": str(self.kernel),
            "simple_kind": self.simple_kind,
        }


NONABSOLUTE = "nonabsolutely-irreducible"
DOUBLED = "sum-of-two-isomorphic-absolutely-irreducible"


def h_simple_witnesses(H: Subgroup, A: PermAction) -> list[HSimpleWitness]:
    """All H-simple planes assembled from the Fourier modes, in a fixed order.

    A 2-dim mode qualifies on its own: H acts by rotations, which are either
    non-absolutely irreducible or, when every angle is 0 or 1/2, a doubled
    sign/trivial character.  Two 1-dim modes qualify when their characters on
    H agree.
    """
    modes = isotypic_modes(A, H)
    out = []
    for m in modes:
        if m.dim == 2:
            doubled = all(a in (0, Fraction(1, 2)) for a in m.character)
            out.append(HSimpleWitness(((m.block, m.j),), m.basis, m.kernel, DOUBLED if doubled else NONABSOLUTE))
    lines = [m for m in modes if m.dim == 1]
    for m1, m2 in itertools.combinations(lines, 2):
        if m1.character == m2.character:
            basis = np.concatenate([m1.basis, m2.basis], axis=1)
            out.append(HSimpleWitness(((m1.block, m1.j), (m2.block, m2.j)), basis, m1.kernel, DOUBLED))
    return out


def find_h_simple(H: Subgroup, K: Subgroup, A: PermAction) -> HSimpleWitness | None:
    """First H-simple plane with kernel exactly K, or None.

    Two-dimensional modes are preferred over doubled lines.
    """
    if not K.issubgroup(H):
        raise ValueError(f"K={K} is not contained in H={H}")
    for w in h_simple_witnesses(H, A):
        if w.kernel == K:
            return w
    return None


def action_on_plane(w: HSimpleWitness, g: Element, A: PermAction) -> np.ndarray:
    """Matrix of rho(g) restricted to the witness plane, in its orthonormal basis."""
    return w.basis.T @ A.matrix(g) @ w.basis


def clear_caches() -> None:
    """Drop memoised fixed-point computations (for cold-start timing)."""
    for fn in (fix_element, fix_subspace, is_isotropy, _fix_meet, variety_LK):
        fn.cache_clear()
