"""Construction of equivariant polynomial vector fields.

The building blocks are a Hermite interpolant with prescribed values and
Jacobians at finitely many nodes, and the group average
``f(x) = |G|^-1 sum_g rho(g)^-1 g(rho(g) x)``.  Prescribing data on a whole
group orbit and then averaging keeps the data and makes the field exactly
equivariant.
"""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

import numpy as np

from .groups import Element, Subgroup
from .polynomial import (
    Exponent,
    Poly,
    PolyVectorField,
    padd,
    pconst,
    peval,
    plinear,
    pmul,
    ppow,
    pscale,
    pshift,
)
from .representation import HSimpleWitness, PermAction, stabilizer


class NonCommutingError(ValueError):
    def __init__(self, element: Element):
        super().__init__(f"linearization does not commute with rho{element} for an element of the isotropy group")
        self.element = element


class WitnessError(ValueError):
    pass


def _separating_direction(points) -> list[int]:
    """Small integer vector c with pairwise distinct values c . y_j.

    Coordinate axes and two-coordinate combinations are tried first so the
    bumps stay polynomials in at most two variables.
    """
    n, N = len(points[0]), len(points)

    def ok(c):
        vals = [sum(a * b for a, b in zip(c, y)) for y in points]
        return len(set(vals)) == N

    def min_gap(a):
        vals = sorted(y[a] for y in points)
        return min(v - u for u, v in zip(vals, vals[1:]))

    # the widest-separating axis keeps bump coefficients small
    axes = sorted(range(n), key=lambda a: -min_gap(a))
    if min_gap(axes[0]) > 0:
        return [int(i == axes[0]) for i in range(n)]
    for a, b in itertools.combinations(range(n), 2):
        for w in range(2, 4 * N * N + 2):
            c = [0] * n
            c[a], c[b] = 1, w
            if ok(c):
                return c
    rng = random.Random(0)
    while True:
        c = [rng.randint(-100, 100) for _ in range(n)]
        if ok(c):
            return c


def _flat_weights(s: list[Fraction], j: int, m: int) -> list[Fraction]:
    """Taylor coefficients at s_j, to order m-1, of prod_{i != j} (1 + t/(s_j - s_i))^-m."""
    out = [Fraction(1)] + [Fraction(0)] * (m - 1)
    for i, si in enumerate(s):
        if i == j:
            continue
        a = 1 / (s[j] - si)
        # binomial series of (1 + a t)^-m
        fac = [math.comb(m + k - 1, k) * (-a) ** k for k in range(m)]
        out = [sum(out[r] * fac[k - r] for r in range(k + 1)) for k in range(m)]
    return out


def _bumps(points, order: int = 1) -> tuple[list[Poly], list[list[Fraction]]]:
    """Bumps b_j with b_j(y_i) = delta_ij and their gradients at y_j.

    order 1: b_j = prod_{i != j} ((c.x - s_i)/(s_j - s_i))^2, so b_j vanishes to
    first order at the other nodes.  order r > 1: b_j = L_j^(r+1) q_j with q_j
    the Taylor inverse of L_j^(r+1), so b_j - delta_ij vanishes to order r at
    every node and gradients are zero.
    """
    n = len(points[0])
    if len(points) == 1:
        return [pconst(1, n)], [[Fraction(0)] * n]
    c = _separating_direction(points)
    s = [sum(Fraction(a) * b for a, b in zip(c, y)) for y in points]
    m = 2 if order == 1 else order + 1
    bumps, grads = [], []
    for j in range(len(points)):
        b = pconst(1, n)
        dlog = Fraction(0)
        for i in range(len(points)):
            if i != j:
                lin = pscale(plinear(c, -s[i]), 1 / (s[j] - s[i]))
                b = pmul(b, ppow(lin, m, n))
                dlog += m / (s[j] - s[i])
        if order == 1:
            grads.append([dlog * a for a in c])
        else:
            t = plinear(c, -s[j])
            q = padd(*(pscale(ppow(t, k, n), w) for k, w in enumerate(_flat_weights(s, j, m))))
            b = pmul(b, q)
            grads.append([Fraction(0)] * n)
        bumps.append(b)
    return bumps, grads


def _blend(points, local_fields: list[PolyVectorField], order: int = 1) -> PolyVectorField:
    """Sum of b_j * (phi_j + correction) reproducing each phi_j to the given order at y_j."""
    n = len(points[0])
    bumps, grads = _bumps(points, order)
    total = PolyVectorField(n, tuple({} for _ in range(n)))
    for y, phi, b, gb in zip(points, local_fields, bumps, grads):
        if any(gb):
            # the product rule adds phi_j(y_j) grad(b_j)^T; subtract it
            shift = plinear(gb, -sum(g * yy for g, yy in zip(gb, y)))
            v0 = [peval(c, y) for c in phi.components]
            v1 = [peval(c, y) for c in phi.parameter_components]
            corr = PolyVectorField(
                n,
                tuple(pscale(shift, -v) for v in v0),
                tuple(pscale(shift, -v) for v in v1),
            )
            phi = phi + corr
        total = total + phi.times(b)
    return total


def pshift_field(f: PolyVectorField, y) -> PolyVectorField:
    """The field ``x -> f(x - y)``."""
    if not any(y):
        return f
    return PolyVectorField(
        f.n,
        tuple(pshift(c, y) for c in f.components),
        tuple(pshift(c, y) for c in f.parameter_components),
    )


def affine_field(value, matrix, y) -> PolyVectorField:
    """``x -> value + matrix (x - y)``."""
    n = len(y)
    comps = []
    for r in range(n):
        row = [Fraction(v) for v in matrix[r]]
        comps.append(plinear(row, Fraction(value[r]) - sum(a * Fraction(b) for a, b in zip(row, y))))
    return PolyVectorField(n, tuple(comps))


def hermite_interpolate(points, values, jacobians) -> PolyVectorField:
    """Polynomial g with g(y_j) = v_j and Dg(y_j) = A_j, exactly.

    Parameters
    ----------
    points : sequence of rational vectors
        Pairwise distinct interpolation nodes y_j.
    values : sequence of rational vectors
        Prescribed values v_j.
    jacobians : sequence of square rational matrices
        Prescribed Jacobians A_j.  Singular matrices are allowed.
    """
    points = [tuple(Fraction(v) for v in y) for y in points]
    if len(set(points)) != len(points):
        raise ValueError("interpolation nodes must be pairwise distinct")
    n = len(points[0])
    if any(len(y) != n for y in points) or any(len(v) != n for v in values):
        raise ValueError("nodes and values must share one ambient dimension")
    if any(len(A) != n or any(len(row) != n for row in A) for A in jacobians):
        raise ValueError("jacobians must be n x n")
    local = [affine_field(v, A, y) for y, v, A in zip(points, values, jacobians)]
    return _blend(points, local)


def _exponent_map(p: tuple[int, ...]):
    def move(e: Exponent) -> Exponent:
        e2 = [0] * len(p)
        for i, k in enumerate(e):
            e2[p[i]] += k
        return tuple(e2)

    return move


def _permute_field(f: PolyVectorField, p: tuple[int, ...]) -> PolyVectorField:
    """``x -> rho^-1 f(rho x)`` for the permutation with ``(rho x)[i] = x[p[i]]``."""
    n = f.n
    pinv = [0] * n
    for i, pi in enumerate(p):
        pinv[pi] = i
    move = _exponent_map(p)
    return PolyVectorField(
        n,
        tuple({move(e): c for e, c in f.components[pinv[i]].items()} for i in range(n)),
        tuple({move(e): c for e, c in f.parameter_components[pinv[i]].items()} for i in range(n)),
    )


def equivariant_symmetrize(g: PolyVectorField, A: PermAction) -> PolyVectorField:
    """Group average of g; the result is exactly equivariant."""
    n = g.n
    elems = A.group.elements()
    srcs = (g.components, g.parameter_components)
    # accumulate integer numerators over a common denominator
    den = math.lcm(1, *(c.denominator for src in srcs for comp in src for c in comp.values()))
    ints = [[{e: int(c * den) for e, c in comp.items()} for comp in src] for src in srcs]
    acc = [[dict() for _ in range(n)] for _ in srcs]
    for el in elems:
        p = A.perm(el)
        move = _exponent_map(p)
        for src, dst in zip(ints, acc):
            for i in range(n):
                d = dst[p[i]]
                for e, c in src[i].items():
                    e2 = move(e)
                    d[e2] = d.get(e2, 0) + c
    total = den * len(elems)
    comps, pcomps = (tuple({e: Fraction(c, total) for e, c in d.items() if c} for d in dst) for dst in acc)
    return PolyVectorField(n, comps, pcomps)


def _push(A: PermAction, g: Element, M) -> list[list]:
    """rho(g) M rho(g)^-1 for a permutation rho(g)."""
    p = A.perm(g)
    n = len(p)
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            out[i][j] = M[p[i]][p[j]]
    return out


def _orbit(A: PermAction, x0) -> list[tuple[Element, tuple[Fraction, ...]]]:
    seen, out = set(), []
    for g in A.group.elements():
        y = tuple(A.apply(g, list(x0)))
        if y not in seen:
            seen.add(y)
            out.append((g, y))
    return out


def commutator_violations(A: PermAction, x0, M) -> list[Element]:
    Sigma = stabilizer(x0, A)
    return [s for s in Sigma.elements(A.group) if _push(A, s, M) != [list(r) for r in M]]


def prescribed_linearization_field(A: PermAction, x0, M) -> PolyVectorField:
    """Equivariant polynomial f with f(x0) = 0 and Df(x0) = M.

    M must commute with the isotropy group of x0.
    """
    x0 = tuple(Fraction(v) for v in x0)
    M = [[Fraction(v) for v in row] for row in M]
    bad = commutator_violations(A, x0, M)
    if bad:
        raise NonCommutingError(bad[0])
    orbit = _orbit(A, x0)
    points = [y for _, y in orbit]
    jacs = [_push(A, g, M) for g, _ in orbit]
    zeros = [(Fraction(0),) * A.dim] * len(points)
    return equivariant_symmetrize(hermite_interpolate(points, zeros, jacs), A)


def stable_equilibrium_field(A: PermAction, x0) -> PolyVectorField:
    n = A.dim
    return prescribed_linearization_field(A, x0, [[-Fraction(int(i == j)) for j in range(n)] for i in range(n)])


ROT = np.array([[0.0, -1.0], [1.0, 0.0]])


def hopf_linear_parts(witness: HSimpleWitness) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Projection P onto V, and L0 = J_V - (I - P), L1 = P, so D f = L0 + lam L1."""
    B = witness.basis
    n = B.shape[0]
    P = B @ B.T
    J = B @ ROT @ B.T
    return P, J - (np.eye(n) - P), P


def _exact(M: np.ndarray) -> list[list[Fraction]]:
    return [[Fraction(float(v)) for v in row] for row in M]


def _local_hopf_field(witness: HSimpleWitness) -> PolyVectorField:
    """lam P u + J u - (I - P) u - |P u|^2 P u in the local coordinate u."""
    P, L0, L1 = hopf_linear_parts(witness)
    n = P.shape[0]
    Pq, L0q, L1q = _exact(P), _exact(L0), _exact(L1)
    Pu = [plinear(row) for row in Pq]
    # |P u|^2 = u^T P u since P is an orthogonal projection
    quad = padd(*(pmul(plinear([Fraction(0)] * i + [Fraction(1)] + [Fraction(0)] * (n - i - 1)), Pu[i]) for i in range(n)))
    comps = tuple(padd(plinear(L0q[i]), pscale(pmul(quad, Pu[i]), -1)) for i in range(n))
    params = tuple(plinear(L1q[i]) for i in range(n))
    return PolyVectorField(n, comps, params)


def check_witness(A: PermAction, x0, witness: HSimpleWitness, tol: float = 1e-12) -> Subgroup:
    """Isotropy of x0 after checking the witness plane is invariant and A(lam) commutes on it."""
    Sigma = stabilizer(x0, A)
    B = witness.basis
    for s in Sigma.elements(A.group):
        R = A.matrix(s)
        img = R @ B
        if np.abs(img - B @ (B.T @ img)).max() > tol:
            raise WitnessError(f"witness plane is not invariant under {s}")
        Rv = B.T @ img
        if np.abs(Rv @ ROT - ROT @ Rv).max() > tol:
            raise WitnessError(f"A(lam) does not commute with {s} on the witness plane")
    return Sigma


def hopf_family(A: PermAction, x0, witness: HSimpleWitness) -> PolyVectorField:
    """Equivariant family with a Hopf point at (x0, 0) on the witness plane.

    Near x0 the field is ``lam v + J v - |v|^2 v`` on V and ``-w`` on the
    complement, where v, w are the parts of x - x0 in V and its orthogonal
    complement.  The same local field is pushed to every point of the orbit
    of x0, blended by bumps and group-averaged.
    """
    x0 = tuple(Fraction(v) for v in x0)
    check_witness(A, x0, witness)
    local = _local_hopf_field(witness)
    orbit = _orbit(A, x0)
    points = [y for _, y in orbit]
    pieces = []
    for g, y in orbit:
        # rho(g) phi(rho(g)^-1 u) == _permute_field(phi, perm(-g))
        pushed = _permute_field(local, A.perm(A.group.neg(g)))
        pieces.append(pshift_field(pushed, y))
    return equivariant_symmetrize(_blend(points, pieces, order=3), A)


def bump_gap(A: PermAction, x0) -> float:
    """Smallest spacing of the group orbit of x0 along the bump direction (inf for a fixed point)."""
    points = [y for _, y in _orbit(A, tuple(Fraction(v) for v in x0))]
    if len(points) == 1:
        return math.inf
    c = _separating_direction(points)
    s = sorted(float(sum(Fraction(a) * b for a, b in zip(c, y))) for y in points)
    return min(v - u for u, v in zip(s, s[1:])) / math.hypot(*c)


class HopfFamilyNumeric:
    """Float evaluation of :func:`hopf_family` in blended form.

    Expanding the exact field in monomials about the origin cancels badly far
    from the origin, so the dynamics evaluate the same function as a group
    average of bumps in product form times local cubics about each orbit point.
    """

    def __init__(self, A: PermAction, x0, witness: HSimpleWitness):
        x0 = tuple(Fraction(v) for v in x0)
        check_witness(A, x0, witness)
        self.n = A.dim
        self.x0 = np.array([float(v) for v in x0])
        self.basis = np.asarray(witness.basis, float)
        self.P, self.L0, _ = hopf_linear_parts(witness)
        orbit = _orbit(A, x0)
        points = [y for _, y in orbit]
        # permutations as gathers: (rho x)[i] = x[p[i]], (rho^-1 x)[i] = x[pinv[i]]
        perms = [A.perm(g) for g in A.group.elements()]
        self.S = np.array(perms)
        self.Sinv = np.argsort(self.S, axis=1)
        self.R = np.array([A.perm(g) for g, _ in orbit])
        self.Rinv = np.argsort(self.R, axis=1)
        self.y = np.array([[float(v) for v in y] for y in points])
        N = len(points)
        if N > 1:
            c = _separating_direction(points)
            sq = [sum(Fraction(a) * b for a, b in zip(c, y)) for y in points]
            self.c = np.array(c, float)
            self.s = np.array([float(v) for v in sq])
            self.w = np.array([[float(v) for v in _flat_weights(sq, j, 4)] for j in range(N)])
            diff = self.s[:, None] - self.s[None, :]
            np.fill_diagonal(diff, 1.0)
            self.inv = 1.0 / diff  # inv[j, i] = 1/(s_j - s_i), diagonal unused
            np.fill_diagonal(self.inv, 0.0)
        else:
            self.c = None

    def _bumps(self, t: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """b_j(t) and b_j'(t) for every row t, shape (G, N)."""
        G, N = len(t), len(self.y)
        if self.c is None:
            return np.ones((G, 1)), np.zeros((G, 1))
        fac = (t[:, None, None] - self.s[None, None, :]) * self.inv[None, :, :]
        idx = np.arange(N)
        fac[:, idx, idx] = 1.0
        L = fac.prod(axis=2)
        # products leaving out one factor, from prefix and suffix products
        ones = np.ones((G, N, 1))
        left = np.concatenate([ones, np.cumprod(fac, axis=2)[:, :, :-1]], axis=2)
        right = np.concatenate([np.cumprod(fac[:, :, ::-1], axis=2)[:, :, -2::-1], ones], axis=2)
        dL = (left * right * self.inv[None]).sum(axis=2)
        u = t[:, None] - self.s[None, :]
        powers = u[..., None] ** np.arange(4)
        q = (powers * self.w[None]).sum(axis=2)
        dq = (powers[..., :3] * (self.w[:, 1:] * np.arange(1, 4))[None]).sum(axis=2)
        return L**4 * q, 4 * L**3 * dL * q + L**4 * dq

    def _pieces(self, x: np.ndarray, lam: float):
        X = x[self.S]  # (G, n): rho(g) x
        D = X[:, None, :] - self.y[None, :, :]  # (G, N, n)
        U = np.take_along_axis(D, self.Rinv[None], axis=2)  # rho(g_j)^-1 (x - y_j)
        Pu = U @ self.P
        r2 = (U * Pu).sum(axis=2)
        loc = lam * Pu + U @ self.L0.T - r2[..., None] * Pu
        phi = np.take_along_axis(loc, self.R[None], axis=2)
        t = X @ self.c if self.c is not None else np.zeros(len(X))
        b, db = self._bumps(t)
        return Pu, r2, phi, b, db

    def normal_form_remainder(self, radius: float, lam: float, samples: int = 16) -> float:
        """max |f(x0 + u) - local normal form(u)| over a circle of the given radius in V."""
        B = np.linalg.qr(self.basis)[0]
        worst = 0.0
        for th in np.linspace(0.0, 2 * math.pi, samples, endpoint=False):
            u = radius * (math.cos(th) * B[:, 0] + math.sin(th) * B[:, 1])
            Pu = self.P @ u
            local = lam * Pu + self.L0 @ u - float(u @ Pu) * Pu
            worst = max(worst, float(np.abs(self(self.x0 + u, lam) - local).max()))
        return worst if math.isfinite(worst) else math.inf

    def __call__(self, x, lam: float = 0.0) -> np.ndarray:
        x = np.asarray(x, float)
        with np.errstate(over="ignore", invalid="ignore"):
            _, _, phi, b, _ = self._pieces(x, lam)
            F = (b[..., None] * phi).sum(axis=1)  # (G, n)
            return np.take_along_axis(F, self.Sinv, axis=1).mean(axis=0)

    def jac(self, x, lam: float = 0.0) -> np.ndarray:
        x = np.asarray(x, float)
        with np.errstate(over="ignore", invalid="ignore"):
            Pu, r2, phi, b, db = self._pieces(x, lam)
            Dloc = lam * self.P + self.L0 - 2 * Pu[..., :, None] * Pu[..., None, :] - r2[..., None, None] * self.P
            R = self.R[None, :, :, None], self.R[None, :, None, :]
            DR = Dloc[:, np.arange(len(self.y))[:, None, None], R[0][0], R[1][0]]  # rho Dloc rho^-1
            DF = (b[..., None, None] * DR).sum(axis=1)
            if self.c is not None:
                DF += np.einsum("gj,gja,b->gab", db, phi, self.c)
            Si = self.Sinv
            return DF[np.arange(len(Si))[:, None, None], Si[:, :, None], Si[:, None, :]].mean(axis=0)


def _integer_form(f: PolyVectorField):
    exps = sorted({e for comp in f.components + f.parameter_components for e in comp})
    den = math.lcm(*(c.denominator for comp in f.components + f.parameter_components for c in comp.values()), 1)
    rows0 = [[(i, int(c[e] * den)) for i, c in enumerate(f.components) if e in c] for e in exps]
    rows1 = [[(i, int(c[e] * den)) for i, c in enumerate(f.parameter_components) if e in c] for e in exps]
    sparse = [(sum(e), [(j, k) for j, k in enumerate(e) if k]) for e in exps]
    return sparse, rows0, rows1, den


def _eval_scaled(sparse, rows0, rows1, a: list[int], q: int, deg: int, n: int) -> tuple[list[int], list[int]]:
    """q^deg * (den * f)(a / q) as integers, for both lambda parts."""
    out0, out1 = [0] * n, [0] * n
    qp = [q**k for k in range(deg + 1)]
    pw = [[ai**k for k in range(deg + 1)] for ai in a]
    for (total, nz), row0, row1 in zip(sparse, rows0, rows1):
        m = qp[deg - total]
        for j, k in nz:
            m *= pw[j][k]
        for i, c in row0:
            out0[i] += c * m
        for i, c in row1:
            out1[i] += c * m
    return out0, out1


def verify_equivariance(f: PolyVectorField, A: PermAction, samples: int = 50, lams=(Fraction(-1, 10), 0, Fraction(1, 10)), seed: int = 0) -> Fraction:
    """max |rho(g) f(x, lam) - f(rho(g) x, lam)| over g, random rational x and lam.

    Evaluation is exact (integer arithmetic after clearing denominators).
    """
    rng = random.Random(seed)
    n, q = f.n, 7
    sparse, rows0, rows1, den = _integer_form(f)
    deg = f.degree
    lams = [Fraction(lam) for lam in lams]
    worst = [0] * len(lams)
    elems = A.group.elements()
    for _ in range(samples):
        a = [rng.randint(-20, 20) for _ in range(n)]
        base0, base1 = _eval_scaled(sparse, rows0, rows1, a, q, deg, n)
        for g in elems:
            p = A.perm(g)
            img0, img1 = _eval_scaled(sparse, rows0, rows1, [a[j] for j in p], q, deg, n)
            d0 = [base0[p[i]] - img0[i] for i in range(n)]
            d1 = [base1[p[i]] - img1[i] for i in range(n)]
            for t, lam in enumerate(lams):
                r = max(abs(x * lam.denominator + y * lam.numerator) for x, y in zip(d0, d1))
                if r > worst[t]:
                    worst[t] = r
    return max((Fraction(r, den * q**deg * lam.denominator) for r, lam in zip(worst, lams)), default=Fraction(0))
