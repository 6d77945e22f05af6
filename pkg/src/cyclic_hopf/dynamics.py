"""Integration, periodic-orbit location and symmetry measurement."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import minimize_scalar

from .groups import Element, Subgroup, ThetaHom, subgroup_from_elements
from .polynomial import NumericField, PolyVectorField
from .representation import PermAction

log = logging.getLogger(__name__)

RTOL = 1e-10
ATOL = 1e-12
ESCAPE = 1e6  # trajectories farther than this from their start count as blow-up
HUGE = 1e100
MAX_EVALS = 2_000_000


class IntegrationError(RuntimeError):
    pass


class OrbitNotFound(RuntimeError):
    pass


class NewtonDivergence(OrbitNotFound):
    pass


def _numeric(f) -> NumericField:
    return f.numeric() if isinstance(f, PolyVectorField) else f


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray
    derivatives: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self._spline = CubicHermiteSpline(self.times, self.states, self.derivatives, axis=0)

    def __call__(self, t):
        return self._spline(t)

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def _finite(v: np.ndarray) -> np.ndarray:
    # a huge finite value makes the step controller reject the trial step; NaN would poison it
    return v if np.all(np.isfinite(v)) else np.nan_to_num(v, nan=HUGE, posinf=HUGE, neginf=-HUGE)


def _rhs(F, lam, extra=None):
    calls = 0

    def rhs(t, y):
        nonlocal calls
        calls += 1
        if calls > MAX_EVALS:
            raise IntegrationError(f"more than {MAX_EVALS} field evaluations by t={t:.6g}")
        return _finite(F(y, lam) if extra is None else extra(y))

    return rhs


def _escape(x_init, n: int | None = None):
    x_init = np.asarray(x_init, float)
    n = len(x_init) if n is None else n
    radius = ESCAPE * (1 + np.linalg.norm(x_init[:n]))

    def event(t, y):
        return radius - float(np.linalg.norm(y[:n] - x_init[:n]))

    event.terminal = True
    return event


def _check(sol) -> None:
    if sol.status == 1:
        raise IntegrationError(f"trajectory escaped to |x| > {ESCAPE:g} at t={sol.t[-1]:.6g}")
    if sol.status != 0:
        raise IntegrationError(f"integration failed at t={sol.t[-1]:.6g}: {sol.message}")


def integrate(f, lam: float, x_init, t_span, rtol: float = RTOL, atol: float = ATOL, method: str = "DOP853") -> Trajectory:
    """Adaptive embedded Runge-Kutta solution with cubic Hermite dense output."""
    F = _numeric(f)
    sol = solve_ivp(
        _rhs(F, lam),
        t_span,
        np.asarray(x_init, float),
        method=method,
        rtol=rtol,
        atol=atol,
        events=_escape(x_init),
    )
    _check(sol)
    states = sol.y.T
    derivs = np.array([F(x, lam) for x in states])
    meta = {"method": method, "rtol": rtol, "atol": atol, "steps": len(sol.t) - 1, "nfev": int(sol.nfev)}
    return Trajectory(sol.t, states, derivs, meta)


def _flow_with_monodromy(F: NumericField, lam, x, T, rtol, atol):
    n = len(x)

    def variational(y):
        z = y[:n]
        Phi = y[n:].reshape(n, n)
        return np.concatenate([F(z, lam), (F.jac(z, lam) @ Phi).ravel()])

    rhs = _rhs(F, lam, variational)
    y0 = np.concatenate([x, np.eye(n).ravel()])
    sol = solve_ivp(rhs, (0.0, T), y0, method="DOP853", rtol=rtol, atol=atol, events=_escape(y0, n))
    _check(sol)
    y = sol.y[:, -1]
    return y[:n], y[n:].reshape(n, n)


@dataclass
class PeriodicOrbit:
    period: float
    anchor: np.ndarray
    cycle: np.ndarray  # (P, n) states at t = i T / P
    closure_defect: float
    lam: float
    floquet_multipliers: np.ndarray | None = None
    newton_iterations: int = 0

    @property
    def center(self) -> np.ndarray:
        return self.cycle.mean(axis=0)

    @property
    def amplitude(self) -> float:
        return float(np.linalg.norm(self.cycle - self.center, axis=1).max())

    def amplitude_about(self, x0) -> float:
        return float(np.linalg.norm(self.cycle - np.asarray(x0, float), axis=1).mean())

    def to_dict(self) -> dict:
        out = {
            "period": self.period,
            "closure_defect": self.closure_defect,
            "lambda": self.lam,
            "amplitude": self.amplitude,
            "newton_iterations": self.newton_iterations,
            "anchor": self.anchor.tolist(),
        }
        if self.floquet_multipliers is not None:
            out["floquet_multipliers"] = [[float(m.real), float(m.imag)] for m in self.floquet_multipliers]
        return out


def _first_return(F, lam, anchor, normal, period_guess, rtol, atol) -> float:
    def section(t, y):
        return float(normal @ (y - anchor))

    section.direction = 1
    sol = solve_ivp(
        _rhs(F, lam), (0.0, 4 * period_guess), anchor, method="DOP853",
        rtol=rtol, atol=atol, events=[section, _escape(anchor)],
    )
    _check(sol)
    times = [t for t in sol.t_events[0] if t > 0.05 * period_guess]
    if not times:
        raise OrbitNotFound("no return to the Poincare section")
    return float(times[0])


def find_periodic_orbit(
    f,
    lam: float,
    x_seed,
    period_guess: float = 2 * math.pi,
    transient_periods: int = 50,
    samples: int = 512,
    rtol: float = RTOL,
    atol: float = ATOL,
    closure_tol: float = 1e-10,
    max_newton: int = 20,
    min_amplitude: float = 1e-6,
    unit_tol: float = 1e-4,
) -> PeriodicOrbit:
    """Attracting periodic orbit near ``x_seed``.

    After a transient, the section through the current point orthogonal to
    the flow gives a first-return time; Newton on (point, period) with the
    monodromy matrix then closes the orbit.  The orbit is rejected unless
    exactly one Floquet multiplier lies within ``unit_tol`` of 1.
    """
    F = _numeric(f)
    x = integrate(F, lam, x_seed, (0.0, transient_periods * period_guess), rtol, atol).final
    speed = np.linalg.norm(F(x, lam))
    if not np.isfinite(speed) or speed < 1e-10:
        raise OrbitNotFound(f"trajectory settled on an equilibrium (|f| = {speed:.2e})")
    anchor = x.copy()
    normal = F(anchor, lam) / speed
    T = _first_return(F, lam, anchor, normal, period_guess, rtol, atol)
    n = len(x)
    defect = math.inf
    for it in range(1, max_newton + 1):
        phi, M = _flow_with_monodromy(F, lam, x, T, rtol, atol)
        res = phi - x
        defect = float(np.linalg.norm(res))
        if defect <= closure_tol:
            break
        lhs = np.zeros((n + 1, n + 1))
        lhs[:n, :n] = M - np.eye(n)
        lhs[:n, n] = F(phi, lam)
        lhs[n, :n] = normal
        rhs = -np.concatenate([res, [normal @ (x - anchor)]])
        try:
            step = np.linalg.solve(lhs, rhs)
        except np.linalg.LinAlgError as exc:
            raise NewtonDivergence(f"singular Newton system: {exc}") from exc
        x = x + step[:n]
        T = T + step[n]
        if not (np.all(np.isfinite(x)) and T > 0):
            raise NewtonDivergence("Newton iterate left the admissible region")
    else:
        raise NewtonDivergence(f"closure defect {defect:.2e} after {max_newton} Newton steps")
    ts = np.arange(samples) * T / samples
    sol = solve_ivp(_rhs(F, lam), (0.0, T), x, method="DOP853", rtol=rtol, atol=atol, t_eval=ts)
    orbit = PeriodicOrbit(float(T), x, sol.y.T, defect, lam, newton_iterations=it)
    if orbit.amplitude < min_amplitude:
        raise OrbitNotFound(f"orbit collapsed to a point (amplitude {orbit.amplitude:.2e})")
    # at a degenerate centre Newton can close a cycle that is not isolated
    mu = np.linalg.eigvals(M)
    near_one = int(np.sum(np.abs(mu - 1) < unit_tol))
    if near_one != 1:
        raise OrbitNotFound(f"cycle is not isolated: {near_one} Floquet multipliers within {unit_tol:g} of 1")
    orbit.floquet_multipliers = mu[np.argsort(-np.abs(mu), kind="stable")]
    return orbit


def floquet_multipliers(orbit: PeriodicOrbit, f, lam: float | None = None, rtol: float = RTOL, atol: float = ATOL) -> np.ndarray:
    """Eigenvalues of the monodromy matrix, sorted by decreasing modulus."""
    F = _numeric(f)
    lam = orbit.lam if lam is None else lam
    _, M = _flow_with_monodromy(F, lam, orbit.anchor, orbit.period, rtol, atol)
    cond = np.linalg.cond(M)
    if cond > 1e12:
        log.warning("ill-conditioned monodromy matrix (cond %.2e)", cond)
    mu = np.linalg.eigvals(M)
    mu = mu[np.argsort(-np.abs(mu), kind="stable")]
    orbit.floquet_multipliers = mu
    return mu


def split_trivial_multiplier(mu: np.ndarray) -> tuple[complex, np.ndarray]:
    i = int(np.argmin(np.abs(mu - 1)))
    return mu[i], np.delete(mu, i)


def _shift(Xhat: np.ndarray, freqs: np.ndarray, theta: float) -> np.ndarray:
    return np.fft.ifft(Xhat * np.exp(2j * np.pi * freqs * theta)[:, None], axis=0).real


@dataclass
class ElementSymmetry:
    element: Element
    theta: float
    residual: float
    status: str  # symmetry | ambiguous | none | unsnappable
    theta_rational: Fraction | None = None

    def to_dict(self) -> dict:
        return {
            "element": list(self.element),
            "theta": self.theta,
            "theta_rational": None if self.theta_rational is None else f"{self.theta_rational.numerator}/{self.theta_rational.denominator}",
            "residual": self.residual,
            "status": self.status,
        }


@dataclass
class SymmetryReport:
    elements: list[ElementSymmetry]
    H: Subgroup | None
    K: Subgroup | None
    theta: ThetaHom | None
    homomorphism_defect: float
    tol: float

    @property
    def ambiguous(self) -> list[Element]:
        return [e.element for e in self.elements if e.status == "ambiguous"]

    def phase(self, g: Element) -> ElementSymmetry:
        return next(e for e in self.elements if e.element == tuple(g))

    def to_dict(self) -> dict:
        return {
            "H": None if self.H is None else str(self.H),
            "K": None if self.K is None else str(self.K),
            "theta": None if self.theta is None else self.theta.to_dict(),
            "homomorphism_defect": self.homomorphism_defect,
            "tol": self.tol,
            "ambiguous": [list(g) for g in self.ambiguous],
            "elements": [e.to_dict() for e in self.elements],
        }


def _circ(a: float) -> float:
    """Distance of a phase from 0 on the circle R/Z."""
    a = a % 1.0
    return min(a, 1.0 - a)


def detect_symmetries(orbit: PeriodicOrbit, A: PermAction, tol: float = 1e-5, phase_tol: float = 1e-6) -> SymmetryReport:
    """Measured spatial group K, spatio-temporal group H and phase map Theta.

    For each g the residual is min over theta of
    max_t |rho(g) x(t) - x(t + theta T)|, relative to the orbit amplitude;
    theta is scanned on the sample grid and refined by a bounded scalar
    minimisation using trigonometric interpolation of the cycle.
    """
    X = orbit.cycle
    P = len(X)
    amp = orbit.amplitude
    Xhat = np.fft.fft(X, axis=0)
    freqs = np.fft.fftfreq(P) * P
    G = A.group
    measured = []
    for g in G.elements():
        Y = X[:, list(A.perm(g))]
        grid = [np.linalg.norm(Y - np.roll(X, -s, axis=0), axis=1).max() for s in range(P)]
        s = int(np.argmin(grid))

        def resid(theta):
            return np.linalg.norm(Y - _shift(Xhat, freqs, theta), axis=1).max() / amp

        opt = minimize_scalar(resid, bounds=((s - 1) / P, (s + 1) / P), method="bounded", options={"xatol": 1e-13})
        theta, r = float(opt.x) % 1.0, float(min(opt.fun, grid[s] / amp))
        if opt.fun > grid[s] / amp:
            theta = s / P
        status = "symmetry" if r <= tol else ("ambiguous" if r <= 10 * tol else "none")
        measured.append(ElementSymmetry(tuple(g), theta, r, status))

    order = sum(1 for m in measured if m.status == "symmetry")
    for m in measured:
        if m.status == "symmetry":
            snapped = Fraction(round(m.theta * order), order) % 1
            if _circ(m.theta - float(snapped)) <= phase_tol:
                m.theta_rational = snapped
            else:
                m.status = "unsnappable"
    H_elems = [m.element for m in measured if m.status == "symmetry"]
    K_elems = [m.element for m in measured if m.status == "symmetry" and m.theta_rational == 0]
    H = subgroup_from_elements(H_elems, G)
    K = subgroup_from_elements(K_elems, G)
    theta_hom, defect = None, math.inf
    if H is not None:
        by_el = {m.element: m for m in measured}
        theta_hom = ThetaHom(G, H, tuple(by_el[g].theta_rational for g in H.generators(G)))
        defect = max(
            _circ(by_el[G.add(a, b)].theta - by_el[a].theta - by_el[b].theta)
            for a in H_elems
            for b in H_elems
        )
    return SymmetryReport(measured, H, K, theta_hom, defect, tol)


@dataclass
class CrossingResult:
    sigma0: float
    rho0: float
    dsigma: float
    simple: bool
    eigenvalues0: tuple[complex, complex]
    transverse_max_real: float
    invariance_defect: float

    def to_dict(self) -> dict:
        return {
            "sigma0": self.sigma0,
            "rho0": self.rho0,
            "dsigma": self.dsigma,
            "simple": self.simple,
            "eigenvalues0": [[float(z.real), float(z.imag)] for z in self.eigenvalues0],
            "transverse_max_real": self.transverse_max_real,
            "invariance_defect": self.invariance_defect,
        }


def hopf_crossing_check(f, x0, basis, h: float = 1e-4) -> CrossingResult:
    """sigma(0), rho(0) and sigma'(0) for the eigenvalues sigma +- i rho of Df(x0, lam) on V."""
    if isinstance(f, PolyVectorField):
        # exact Jacobian; rounding happens once, after evaluation
        x0q = tuple(Fraction(v) for v in x0)

        def jac(lam):
            return np.array(f.jacobian(x0q, Fraction(lam)), float)
    else:
        F = _numeric(f)
        x0f = np.asarray([float(v) for v in x0])

        def jac(lam):
            return F.jac(x0f, lam)

    Q, _ = np.linalg.qr(np.asarray(basis, float))
    n = Q.shape[0]
    full, _ = np.linalg.qr(np.concatenate([Q, np.eye(n)], axis=1))
    perp = full[:, 2:n]

    def on_v(lam):
        J = jac(lam)
        ev = np.linalg.eigvals(Q.T @ J @ Q)
        return ev[np.argsort(-ev.imag)], J

    ev0, J0 = on_v(0.0)
    evp, _ = on_v(h)
    evm, _ = on_v(-h)
    sigma0, rho0 = float(ev0[0].real), float(abs(ev0[0].imag))
    dsigma = float((evp[0].real - evm[0].real) / (2 * h))
    simple = bool(abs(ev0[0].imag) > 0 and abs(ev0[0] - ev0[1]) > 1e-8)
    trans = np.linalg.eigvals(perp.T @ J0 @ perp) if perp.shape[1] else np.array([])
    inv = float(np.abs(J0 @ Q - Q @ (Q.T @ J0 @ Q)).max())
    return CrossingResult(
        sigma0, rho0, dsigma, simple, (complex(ev0[0]), complex(ev0[1])),
        float(trans.real.max()) if trans.size else -math.inf, inv,
    )
