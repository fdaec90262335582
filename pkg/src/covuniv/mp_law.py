"""Marchenko-Pastur law for ``M = XX*/N`` with aspect ratio ``gamma = p/N >= 1``."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .combinatorics import narayana_moment


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class MPDistribution:
    gamma: float
    sigma2: float = 1.0

    def __post_init__(self):
        if not self.gamma >= 1:
            raise ValueError(
                f"gamma must be >= 1 (got {self.gamma}); use the companion matrix for p < N"
            )
        if not self.sigma2 > 0:
            raise ValueError("sigma2 must be positive")

    @property
    def u_minus(self) -> float:
        return self.sigma2 * (1 - math.sqrt(self.gamma)) ** 2

    @property
    def u_plus(self) -> float:
        return self.sigma2 * (1 + math.sqrt(self.gamma)) ** 2

    def _theta_weight(self, theta):
        # x = u- + (u+ - u-) sin^2 theta turns rho(x) dx into a smooth weight in theta
        a, b = self.u_minus, self.u_plus
        w = b - a
        sin2 = np.sin(theta) ** 2
        x = a + w * sin2
        num = w * w * 2.0 * sin2 * np.cos(theta) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            dens = np.where(x > 0, num / (2.0 * np.pi * x * self.sigma2), 0.0)
        if a == 0.0:
            # gamma = 1: the 1/x singularity at x = 0 cancels against sin^2 theta
            dens = np.where(x > 0, dens, w / (np.pi * self.sigma2))
        return x, dens


def mp_density(d: MPDistribution, x):
    x = np.asarray(x, dtype=float)
    a, b = d.u_minus, d.u_plus
    inside = (x > a) & (x < b) & (x > 0)
    with np.errstate(invalid="ignore", divide="ignore"):
        val = np.sqrt(np.clip((b - x) * (x - a), 0, None)) / (2 * np.pi * x * d.sigma2)
    out = np.where(inside, val, 0.0)
    return float(out) if out.ndim == 0 else out


def _theta_integral(d: MPDistribution, f, theta_hi=math.pi / 2, epsrel=1e-13):
    def integrand(theta):
        x, w = d._theta_weight(theta)
        return f(x) * w

    val, err = integrate.quad(integrand, 0.0, theta_hi, epsabs=0.0, epsrel=epsrel, limit=400)
    if not math.isfinite(val) or err > max(1e-9 * abs(val), 1e-14):
        raise QuadratureError(f"quadrature did not converge: value={val}, error estimate={err}")
    return val


def mp_total_mass(d: MPDistribution) -> float:
    return _theta_integral(d, lambda x: 1.0)


def mp_moment_numeric(d: MPDistribution, L: int) -> float:
    """``L``-th moment of the law by quadrature in the angle variable."""
    if L < 1:
        raise ValueError("L must be >= 1")
    if L > 60:
        raise ValueError("L > 60 is outside the supported quadrature range")
    return _theta_integral(d, lambda x: x**L)


def mp_moment_narayana(L: int, gamma, sigma2=1.0) -> float:
    """``sigma2**L * sum_k gamma**k N(L, k)`` accumulated exactly, rounded once."""
    if L < 1:
        raise ValueError("L must be >= 1")
    return float(narayana_moment(L, gamma, sigma2))


def mp_cdf(d: MPDistribution, x: float) -> float:
    a, b = d.u_minus, d.u_plus
    if x <= a:
        return 0.0
    if x >= b:
        return 1.0
    theta = math.asin(math.sqrt((x - a) / (b - a)))
    val = _theta_integral(d, lambda t: 1.0, theta_hi=theta)
    return min(max(val, 0.0), 1.0)


def mp_cdf_array(d: MPDistribution, xs) -> np.ndarray:
    return np.array([mp_cdf(d, float(x)) for x in np.asarray(xs, dtype=float).ravel()])


def mp_quantile(d: MPDistribution, prob: float, tol: float = 1e-12) -> float:
    if not 0 < prob < 1:
        raise ValueError("prob must be in (0, 1)")
    lo, hi = d.u_minus, d.u_plus
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if mp_cdf(d, mid) < prob:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
