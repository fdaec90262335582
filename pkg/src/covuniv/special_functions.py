"""Airy function, the Hastings-McLeod solution of Painleve II and Tracy-Widom CDFs.

The Painleve state is augmented with two cumulants so the distribution
functions come straight out of the solver:

    u(x) = int_x^inf (t - x) q(t)^2 dt,    u'' = q^2
    j(x) = int_x^inf q(t) dt,              j'  = -q

so that ``F2 = exp(-u)`` and ``F1 = exp(-(u + j) / 2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from functools import cached_property, lru_cache

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicHermiteSpline

AIRY_RANGE = (-15.0, 30.0)
SERIES_CUTOFF = 4.5
ASYMPTOTIC_CUTOFF = 5.0

_AI0 = "0.355028053887817239260063186004183176397979174"
_MINUS_AIP0 = "0.258819403792806798405183560189203963479091138"
_C1 = float(_AI0)
_C2 = float(_MINUS_AIP0)


class PainleveSolverError(RuntimeError):
    """The integration left the Hastings-McLeod branch or did not converge."""


def _series_float(x: float) -> tuple[float, float]:
    x3 = x * x * x
    f = a = 1.0
    g = b = x
    fp = c = 0.5 * x * x
    gp = d = 1.0
    k = 1
    while True:
        a *= x3 / ((3 * k - 1) * (3 * k))
        b *= x3 / ((3 * k) * (3 * k + 1))
        c *= x3 / ((3 * k) * (3 * k + 2))
        d *= x3 / ((3 * k - 2) * (3 * k))
        f += a
        g += b
        fp += c
        gp += d
        if k > 5 and max(abs(a), abs(b), abs(c), abs(d)) < 1e-18:
            break
        k += 1
    return _C1 * f - _C2 * g, _C1 * fp - _C2 * gp


def _series_decimal(x: float, prec: int = 60) -> tuple[float, float]:
    # Oscillatory side: terms reach ~exp(2/3 |x|^1.5) and cancel, so sum in 60 digits.
    with localcontext() as ctx:
        ctx.prec = prec
        X = Decimal(x)
        X3 = X * X * X
        c1, c2 = Decimal(_AI0), Decimal(_MINUS_AIP0)
        f = a = Decimal(1)
        g = b = X
        fp = c = X * X / 2
        gp = d = Decimal(1)
        eps = Decimal(10) ** (-(prec - 5))
        k = 1
        while True:
            a = a * X3 / ((3 * k - 1) * (3 * k))
            b = b * X3 / ((3 * k) * (3 * k + 1))
            c = c * X3 / ((3 * k) * (3 * k + 2))
            d = d * X3 / ((3 * k - 2) * (3 * k))
            f += a
            g += b
            fp += c
            gp += d
            if k > 5 and max(abs(a), abs(b), abs(c), abs(d)) < eps:
                break
            k += 1
        return float(c1 * f - c2 * g), float(c1 * fp - c2 * gp)


def _asymptotic(x: float, tol: float = 1e-10) -> tuple[float, float]:
    zeta = 2.0 / 3.0 * x**1.5
    pref = math.exp(-zeta) / (2.0 * math.sqrt(math.pi))
    s_ai = s_aip = 0.0
    u = 1.0
    term_prev = math.inf
    k = 0
    while True:
        v = -(6 * k + 1) / (6 * k - 1) * u if k else 1.0
        t_ai = (-1) ** k * u / zeta**k
        t_aip = (-1) ** k * v / zeta**k
        if abs(t_ai) >= term_prev or abs(t_ai) < 1e-17:
            break
        s_ai += t_ai
        s_aip += t_aip
        term_prev = abs(t_ai)
        k += 1
        u *= (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k)
    ai = pref / x**0.25 * s_ai
    bound = pref / x**0.25 * abs(u / zeta**k)
    if bound > tol:
        raise ArithmeticError(f"asymptotic Airy expansion too coarse at x={x}: bound {bound:.2e}")
    return ai, -pref * x**0.25 * s_aip


def airy(x: float) -> tuple[float, float]:
    """Return ``(Ai(x), Ai'(x))`` to about 1e-10 absolute on [-15, 30]."""
    x = float(x)
    lo, hi = AIRY_RANGE
    if not lo <= x <= hi:
        raise ValueError(f"x={x} is outside the supported range [{lo}, {hi}]")
    if x > ASYMPTOTIC_CUTOFF:
        return _asymptotic(x)
    if x < -SERIES_CUTOFF:
        return _series_decimal(x)
    return _series_float(x)


def airy_ai(x):
    if np.ndim(x) == 0:
        return airy(x)[0]
    return np.array([airy(v)[0] for v in np.ravel(x)]).reshape(np.shape(x))


def airy_ai_prime(x):
    if np.ndim(x) == 0:
        return airy(x)[1]
    return np.array([airy(v)[1] for v in np.ravel(x)]).reshape(np.shape(x))


def hastings_mcleod_left_asymptotic(x: float) -> float:
    """``q(x) ~ sqrt(-x/2) (1 + 1/(8x^3) - 73/(128x^6) + 10657/(1024x^9))`` as ``x -> -inf``."""
    x3 = x**3
    return math.sqrt(-x / 2.0) * (1 + 1 / (8 * x3) - 73 / (128 * x3**2) + 10657 / (1024 * x3**3))


def _right_state(x_hi: float) -> np.ndarray:
    ai, aip = airy(x_hi)
    # closed forms of int (t-x) Ai^2 and int Ai^2 over [x, inf)
    u = (2 * x_hi**2 * ai**2 - 2 * x_hi * aip**2 - ai * aip) / 3.0
    up = -(aip**2 - x_hi * ai**2)
    j, _ = integrate.quad(airy_ai, x_hi, AIRY_RANGE[1], epsabs=1e-30, epsrel=1e-13, limit=200)
    return np.array([ai, aip, u, up, j])


def _rhs(x, y):
    q, qp, u, up, j = y
    return np.array([qp, x * q + 2 * q**3, up, q * q, -q])


@dataclass(frozen=True)
class PainleveSolution:
    grid: np.ndarray
    q: np.ndarray
    qprime: np.ndarray
    u: np.ndarray
    uprime: np.ndarray
    j: np.ndarray
    method: str = "bvp"
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def F2(self) -> np.ndarray:
        return np.exp(-self.u)

    @property
    def F1(self) -> np.ndarray:
        return np.exp(-0.5 * (self.u + self.j))

    @property
    def x_lo(self) -> float:
        return float(self.grid[0])

    @property
    def x_hi(self) -> float:
        return float(self.grid[-1])

    @cached_property
    def _log_splines(self):
        # Hermite cubic on log F using the exact derivative from the ODE state
        log_f2 = -self.u
        dlog_f2 = -self.uprime
        log_f1 = -0.5 * (self.u + self.j)
        dlog_f1 = -0.5 * (self.uprime - self.q)
        return {
            2: CubicHermiteSpline(self.grid, log_f2, dlog_f2),
            1: CubicHermiteSpline(self.grid, log_f1, dlog_f1),
        }

    def cdf(self, beta: int, x):
        if beta not in (1, 2):
            raise ValueError("beta must be 1 or 2")
        xs = np.asarray(x, dtype=float)
        vals = np.exp(self._log_splines[beta](np.clip(xs, self.x_lo, self.x_hi)))
        vals = np.where(xs < self.x_lo, 0.0, vals)
        vals = np.where(xs > self.x_hi, 1.0, vals)
        return float(vals) if vals.ndim == 0 else vals

    def residual(self, order: int = 4) -> np.ndarray:
        """Finite-difference residual of q'' - xq - 2q^3 on a uniform grid.

        The default five-point stencil is needed because the three-point one
        has a truncation term h^2 q^(4) / 12 of about 1.6e-6 at h = 0.01.
        """
        q, x = self.q, self.grid
        h = x[1] - x[0]
        if order == 2:
            d2 = (q[2:] - 2 * q[1:-1] + q[:-2]) / h**2
            xi, qi = x[1:-1], q[1:-1]
        elif order == 4:
            d2 = (-q[4:] + 16 * q[3:-1] - 30 * q[2:-2] + 16 * q[1:-3] - q[:-4]) / (12 * h**2)
            xi, qi = x[2:-2], q[2:-2]
        else:
            raise ValueError("order must be 2 or 4")
        return d2 - xi * qi - 2 * qi**3


def _guard_bound(x: float) -> float:
    return 2.0 * math.sqrt(max(-x, 0.0) / 2.0) + 1.0


def _shoot(x_lo, x_hi, grid, rtol):
    y0 = _right_state(x_hi)

    def blowup(x, y):
        return _guard_bound(x) - abs(y[0])

    def sign_change(x, y):
        return y[0]

    blowup.terminal = True
    sign_change.terminal = True
    sol = integrate.solve_ivp(
        _rhs,
        (x_hi, x_lo),
        y0,
        method="DOP853",
        t_eval=grid[::-1],
        rtol=rtol,
        atol=1e-30,
        events=(blowup, sign_change),
    )
    if sol.status == 1:
        hit = [ev for ev in sol.t_events if len(ev)]
        where = float(hit[0][0]) if hit else float(sol.t[-1])
        return None, where
    if sol.status != 0:
        raise PainleveSolverError(f"ODE integration failed: {sol.message}")
    return sol.y[:, ::-1], None


def _polish(interp, grid, seg_len=0.25):
    """Re-integrate short backward segments from the collocation state.

    The collocation interpolant is only C1 between its nodes. Short local
    solves give grid values that are smooth to ~1e-13 while the global
    solve still picks the branch; the unstable mode grows by at most ~3x
    over one segment.
    """
    y = np.empty((5, grid.size))
    per = max(int(round(seg_len / (grid[1] - grid[0]))), 1)
    hi = grid.size - 1
    y[:, hi] = interp(grid[hi])
    while hi > 0:
        lo = max(hi - per, 0)
        sol = integrate.solve_ivp(
            _rhs, (grid[hi], grid[lo]), interp(grid[hi]), method="DOP853",
            t_eval=grid[lo:hi][::-1], rtol=3e-14, atol=1e-30,
        )
        if sol.status != 0:
            raise PainleveSolverError(f"segment re-integration failed: {sol.message}")
        y[:, lo:hi] = sol.y[:, ::-1]
        hi = lo
    return y


def _solve_bvp(x_lo, x_hi, grid, tol):
    if x_lo > -6:
        raise ValueError("collocation mode needs x_lo <= -6 for the left asymptotic condition")
    right = _right_state(x_hi)
    q_left = hastings_mcleod_left_asymptotic(x_lo)

    def bc(ya, yb):
        return np.array([ya[0] - q_left, yb[0] - right[0], yb[2] - right[2], yb[3] - right[3], yb[4] - right[4]])

    def f(x, y):
        return np.vstack([y[1], x * y[0] + 2 * y[0] ** 3, y[3], y[0] ** 2, -y[0]])

    mesh = np.linspace(x_lo, x_hi, 401)
    neg = np.clip(-mesh, 0.0, None)
    guess = np.vstack(
        [
            np.sqrt(neg / 2.0) + np.where(mesh >= 0, airy_ai(np.clip(mesh, None, AIRY_RANGE[1])), 0.0),
            np.zeros_like(mesh),
            neg**3 / 12.0,
            -(neg**2) / 4.0,
            np.sqrt(2.0) / 3.0 * neg**1.5,
        ]
    )
    sol = integrate.solve_bvp(f, bc, mesh, guess, tol=tol, bc_tol=1e-14, max_nodes=500000)
    if sol.status != 0:
        raise PainleveSolverError(f"collocation did not converge: {sol.message}")
    y = _polish(sol.sol, grid)
    bad = np.nonzero(y[0] <= 0)[0]
    if bad.size:
        raise PainleveSolverError(f"q is not positive at x={grid[bad[0]]:.4f}")
    return y, len(sol.x)


def solve_painleve_ii(
    x_lo: float = -10.0,
    x_hi: float = 10.0,
    step: float = 0.01,
    method: str = "bvp",
    tol: float = 1e-11,
) -> PainleveSolution:
    """Tabulate the Hastings-McLeod solution and both Tracy-Widom CDFs on a grid.

    ``method="bvp"`` solves the augmented system by collocation between the
    left asymptotic expansion and the Airy data at ``x_hi``. ``method="shooting"``
    integrates backward from ``x_hi``; in double precision it tracks the
    branch to about 1e-8 down to x = -6 and drifts by a few percent near
    x = -10, which is where the collocation mode takes over.
    """
    if x_hi < 8:
        raise ValueError("x_hi must be >= 8 so that q(x_hi) = Ai(x_hi) to working precision")
    if step > 0.01:
        raise ValueError("step must be <= 0.01")
    if x_lo >= x_hi:
        raise ValueError("need x_lo < x_hi")
    n = int(round((x_hi - x_lo) / step)) + 1
    grid = np.linspace(x_lo, x_hi, n)
    meta: dict = {}
    if method == "bvp":
        y, nodes = _solve_bvp(x_lo, x_hi, grid, tol)
        meta["collocation_nodes"] = nodes
    elif method == "shooting":
        y = where = None
        for rtol in (1e-12, 1e-13, 3e-14):
            y, where = _shoot(x_lo, x_hi, grid, rtol)
            if y is not None:
                meta["rtol"] = rtol
                break
        if y is None:
            raise PainleveSolverError(f"left the Hastings-McLeod branch near x={where:.4f}")
    else:
        raise ValueError(f"unknown method {method!r}")
    return PainleveSolution(grid, y[0], y[1], y[2], y[3], y[4], method=method, meta=meta)


@lru_cache(maxsize=4)
def default_solution(method: str = "bvp") -> PainleveSolution:
    return solve_painleve_ii(method=method)


def tw_cdf(beta: int, x, solution: PainleveSolution | None = None):
    """Tracy-Widom CDF ``F_beta(x)`` for ``beta`` in {1, 2}."""
    sol = solution if solution is not None else default_solution()
    return sol.cdf(beta, x)


def tw_quantile(beta: int, prob: float, solution: PainleveSolution | None = None, tol: float = 1e-9) -> float:
    if not 0 < prob < 1:
        raise ValueError(f"prob must be in (0, 1), got {prob}")
    sol = solution if solution is not None else default_solution()
    lo, hi = sol.x_lo, sol.x_hi
    if sol.cdf(beta, lo) > prob:
        raise ValueError(f"prob={prob} lies below the tabulated range (x < {lo})")
    while True:
        mid = 0.5 * (lo + hi)
        val = sol.cdf(beta, mid)
        if abs(val - prob) <= tol or hi - lo < 1e-14:
            return mid
        if val < prob:
            lo = mid
        else:
            hi = mid


def tw_quantiles(beta: int, probs, solution: PainleveSolution | None = None, tol: float = 1e-12) -> np.ndarray:
    """Vectorised bisection for many probabilities at once."""
    sol = solution if solution is not None else default_solution()
    pr = np.asarray(probs, dtype=float).ravel()
    if np.any((pr <= 0) | (pr >= 1)):
        raise ValueError("probabilities must lie in (0, 1)")
    if np.any(pr < sol.cdf(beta, sol.x_lo)):
        raise ValueError(f"some probabilities lie below the tabulated range (x < {sol.x_lo})")
    lo = np.full(pr.shape, sol.x_lo)
    hi = np.full(pr.shape, sol.x_hi)
    while np.max(hi - lo, initial=0.0) > tol:
        mid = 0.5 * (lo + hi)
        below = np.asarray(sol.cdf(beta, mid)) < pr
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return 0.5 * (lo + hi)
