"""Exact row reduction over Q and canonical subspaces."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction

Vector = tuple[Fraction, ...]


def _as_rows(rows) -> list[list[Fraction]]:
    return [[Fraction(v) for v in row] for row in rows]


def rref(rows, ncols: int | None = None) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form. Returns (nonzero rows, pivot columns)."""
    m = _as_rows(rows)
    if not m:
        return [], []
    ncols = len(m[0]) if ncols is None else ncols
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows) -> int:
    return len(rref(rows)[1])


def nullspace(rows, ncols: int) -> list[Vector]:
    """Basis of {x : rows @ x = 0}."""
    R, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, p in zip(R, pivots):
            x[p] = -row[f]
        basis.append(tuple(x))
    return basis


def matvec(M, x) -> list:
    return [sum(a * b for a, b in zip(row, x)) for row in M]


def matmul(A, B) -> list[list]:
    cols = list(zip(*B))
    return [[sum(a * b for a, b in zip(row, col)) for col in cols] for row in A]


def identity(n: int) -> list[list[Fraction]]:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


@dataclass(frozen=True)
class LinearSubspace:
    """Subspace of Q^n stored by its reduced echelon basis.

    Equal subspaces have identical ``basis`` tuples, so ``==`` is subspace
    equality.
    """

    ambient_dim: int
    basis: tuple[Vector, ...]
    pivots: tuple[int, ...]

    @classmethod
    def span(cls, vectors, ambient_dim: int) -> LinearSubspace:
        R, piv = rref(list(vectors), ambient_dim)
        return cls(ambient_dim, tuple(tuple(r) for r in R), tuple(piv))

    @classmethod
    def solutions(cls, equations, ambient_dim: int) -> LinearSubspace:
        return cls.span(nullspace(equations, ambient_dim), ambient_dim)

    @classmethod
    def whole(cls, n: int) -> LinearSubspace:
        return cls.span(identity(n), n)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def equations(self) -> list[Vector]:
        """Rows whose common kernel is this subspace."""
        return list(self._equations)

    @cached_property
    def _equations(self) -> tuple[Vector, ...]:
        if not self.basis:
            return tuple(tuple(r) for r in identity(self.ambient_dim))
        return tuple(nullspace(self.basis, self.ambient_dim))

    def intersect(self, other: LinearSubspace) -> LinearSubspace:
        return LinearSubspace.solutions(self.equations() + other.equations(), self.ambient_dim)

    def contains(self, x) -> bool:
        x = [Fraction(v) for v in x]
        return all(sum(a * b for a, b in zip(eq, x)) == 0 for eq in self._equations)

    def issubspace(self, other: LinearSubspace) -> bool:
        return all(other.contains(b) for b in self.basis)

    def coordinates(self, x) -> tuple[Fraction, ...]:
        """Coefficients of ``x`` in ``basis``; raises if x is outside."""
        c = tuple(Fraction(x[p]) for p in self.pivots)
        if list(self.point(c)) != [Fraction(v) for v in x]:
            raise ValueError("vector is not in the subspace")
        return c

    def point(self, coords) -> Vector:
        out = [Fraction(0)] * self.ambient_dim
        for c, b in zip(coords, self.basis):
            if c:
                for i, v in enumerate(b):
                    if v:
                        out[i] += c * v
        return tuple(out)

    def to_dict(self) -> dict:
        return {
            "ambient_dim": self.ambient_dim,
            "basis": [[str(v) for v in b] for b in self.basis],
        }
