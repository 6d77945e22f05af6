"""Polynomial vector fields with exact rational coefficients, affine in lambda."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

Exponent = tuple[int, ...]
Poly = dict[Exponent, Fraction]  # scalar polynomial: exponent -> coefficient


def padd(*polys: Poly) -> Poly:
    if len(polys) == 1:
        return {e: c for e, c in polys[0].items() if c != 0}
    out: Poly = {}
    for p in polys:
        for e, c in p.items():
            out[e] = out.get(e, 0) + c
    return {e: c for e, c in out.items() if c != 0}


def pscale(p: Poly, s) -> Poly:
    s = Fraction(s)
    return {e: c * s for e, c in p.items()} if s else {}


def pmul(p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, 0) + c1 * c2
    return {e: c for e, c in out.items() if c != 0}


def pconst(c, n: int) -> Poly:
    c = Fraction(c)
    return {(0,) * n: c} if c else {}


def plinear(coeffs, const=0) -> Poly:
    """``const + sum_i coeffs[i] x_i``."""
    n = len(coeffs)
    out = pconst(const, n)
    for i, a in enumerate(coeffs):
        a = Fraction(a)
        if a:
            e = [0] * n
            e[i] = 1
            out[tuple(e)] = a
    return out


def ppow(p: Poly, k: int, n: int) -> Poly:
    out = pconst(1, n)
    for _ in range(k):
        out = pmul(out, p)
    return out


def pshift(p: Poly, y) -> Poly:
    """The polynomial ``x -> p(x - y)``."""
    n = len(y)
    out: Poly = {}
    for e, c in p.items():
        term = pconst(c, n)
        for i, k in enumerate(e):
            if k:
                lin = plinear([int(j == i) for j in range(n)], -Fraction(y[i]))
                term = pmul(term, ppow(lin, k, n))
        out = padd(out, term)
    return out


def peval(p: Poly, x) -> Fraction:
    if not p:
        return Fraction(0)
    x = [Fraction(v) for v in x]
    # integer arithmetic over a common denominator, one reduction at the end
    D = math.lcm(*(v.denominator for v in x)) if x else 1
    a = [v.numerator * (D // v.denominator) for v in x]
    coeffs = [Fraction(c) for c in p.values()]
    L = math.lcm(*(c.denominator for c in coeffs))
    deg = max(sum(e) for e in p)
    Dp = [D**k for k in range(deg + 1)]
    total = 0
    for e, c in zip(p, coeffs):
        m = c.numerator * (L // c.denominator) * Dp[deg - sum(e)]
        for ai, k in zip(a, e):
            if k:
                m *= ai**k
        total += m
    return Fraction(total, L * Dp[deg])


def pderiv(p: Poly, i: int) -> Poly:
    out: Poly = {}
    for e, c in p.items():
        if e[i]:
            d = list(e)
            d[i] -= 1
            out[tuple(d)] = c * e[i]
    return out


def _frac_str(c: Fraction) -> list[int]:
    return [c.numerator, c.denominator]


@dataclass(frozen=True)
class PolyVectorField:
    """``f(x, lam) = components(x) + lam * parameter_components(x)``.

    Each component is a scalar polynomial with ``Fraction`` coefficients, so
    evaluation at rational points is exact.
    """

    n: int
    components: tuple[Poly, ...]
    parameter_components: tuple[Poly, ...] | None = None

    def __post_init__(self):
        if len(self.components) != self.n:
            raise ValueError("need one component per coordinate")
        params = self.parameter_components
        if params is None:
            params = tuple({} for _ in range(self.n))
        object.__setattr__(self, "components", tuple(padd(c) for c in self.components))
        object.__setattr__(self, "parameter_components", tuple(padd(c) for c in params))

    @property
    def degree(self) -> int:
        return max(
            (sum(e) for comp in self.components + self.parameter_components for e in comp),
            default=0,
        )

    @property
    def terms(self) -> dict[Exponent, tuple[Fraction, ...]]:
        return self._collect(self.components)

    @property
    def parameter_terms(self) -> dict[Exponent, tuple[Fraction, ...]]:
        return self._collect(self.parameter_components)

    def _collect(self, comps) -> dict[Exponent, tuple[Fraction, ...]]:
        exps = sorted({e for c in comps for e in c})
        return {e: tuple(c.get(e, Fraction(0)) for c in comps) for e in exps}

    def __add__(self, other: PolyVectorField) -> PolyVectorField:
        return PolyVectorField(
            self.n,
            tuple(padd(a, b) for a, b in zip(self.components, other.components)),
            tuple(padd(a, b) for a, b in zip(self.parameter_components, other.parameter_components)),
        )

    def scaled(self, s) -> PolyVectorField:
        return PolyVectorField(
            self.n,
            tuple(pscale(c, s) for c in self.components),
            tuple(pscale(c, s) for c in self.parameter_components),
        )

    def times(self, p: Poly) -> PolyVectorField:
        """Multiply every component by the scalar polynomial ``p``."""
        return PolyVectorField(
            self.n,
            tuple(pmul(c, p) for c in self.components),
            tuple(pmul(c, p) for c in self.parameter_components),
        )

    def evaluate(self, x, lam=0) -> tuple[Fraction, ...]:
        lam = Fraction(lam)
        return tuple(
            peval(c, x) + (lam * peval(q, x) if lam and q else 0)
            for c, q in zip(self.components, self.parameter_components)
        )

    def jacobian(self, x, lam=0) -> list[list[Fraction]]:
        lam = Fraction(lam)
        return [
            [
                peval(pderiv(c, j), x) + (lam * peval(pderiv(q, j), x) if lam and q else 0)
                for j in range(self.n)
            ]
            for c, q in zip(self.components, self.parameter_components)
        ]

    def numeric(self) -> NumericField:
        return NumericField(self)

    def to_dict(self) -> dict:
        def enc(terms):
            return [{"exponent": list(e), "coefficients": [_frac_str(c) for c in cs]} for e, cs in terms.items()]

        return {"n": self.n, "terms": enc(self.terms), "parameter_terms": enc(self.parameter_terms)}

    @classmethod
    def from_dict(cls, data: dict) -> PolyVectorField:
        n = data["n"]

        def dec(terms):
            comps = [dict() for _ in range(n)]
            for t in terms:
                e = tuple(t["exponent"])
                for i, (num, den) in enumerate(t["coefficients"]):
                    if num:
                        comps[i][e] = Fraction(num, den)
            return tuple(comps)

        return cls(n, dec(data["terms"]), dec(data["parameter_terms"]))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> PolyVectorField:
        return cls.from_dict(json.loads(text))


class NumericField:
    """Vectorised float evaluation of a :class:`PolyVectorField` and its Jacobian."""

    def __init__(self, field: PolyVectorField):
        n = field.n
        exps = sorted({e for comp in field.components + field.parameter_components for e in comp})
        if not exps:
            exps = [(0,) * n]
        self.n = n
        self.exps = np.array(exps, dtype=int).reshape(len(exps), n)
        self.coef0 = np.array([[float(c.get(e, 0)) for c in field.components] for e in exps])
        self.coef1 = np.array([[float(c.get(e, 0)) for c in field.parameter_components] for e in exps])
        # derivative monomials: for variable a, exps - e_a with multiplicity exps[:, a]
        self.dmult = self.exps.T.astype(float)  # (n, T)
        self.dexps = np.maximum(self.exps[None, :, :] - np.eye(n, dtype=int)[:, None, :], 0)  # (n, T, n)

    def coef(self, lam: float) -> np.ndarray:
        return self.coef0 + lam * self.coef1 if lam else self.coef0

    def __call__(self, x, lam: float = 0.0) -> np.ndarray:
        mon = np.prod(np.asarray(x, float)[None, :] ** self.exps, axis=1)
        return mon @ self.coef(lam)

    def jac(self, x, lam: float = 0.0) -> np.ndarray:
        x = np.asarray(x, float)
        dmon = self.dmult * np.prod(x[None, None, :] ** self.dexps, axis=2)  # (n_var, T)
        return (dmon @ self.coef(lam)).T
