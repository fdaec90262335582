"""Independent reference implementations used only by the tests."""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.special import airy


def fredholm_f2(s: float, m: int = 80, upper: float = 16.0) -> float:
    """det(I - K_Airy) on L^2(s, inf) by Gauss-Legendre Nystrom discretisation."""
    x, w = np.polynomial.legendre.leggauss(m)
    x = s + (upper - s) * (x + 1) / 2
    w = w * (upper - s) / 2
    ai, aip, _, _ = airy(x)
    dx = x[:, None] - x[None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        k = (ai[:, None] * aip[None, :] - aip[:, None] * ai[None, :]) / dx
    k[np.diag_indices(m)] = aip**2 - x * ai**2
    sw = np.sqrt(w)
    return float(np.linalg.det(np.eye(m) - sw[:, None] * k * sw[None, :]))


def jacobi_eigenvalues(a, tol: float = 1e-14, max_sweeps: int = 100) -> np.ndarray:
    """Cyclic Jacobi rotations for a real symmetric matrix, descending order."""
    a = np.array(a, dtype=float)
    n = a.shape[0]
    for _ in range(max_sweeps):
        off = math.sqrt(np.sum(np.tril(a, -1) ** 2))
        if off <= tol * np.linalg.norm(a):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if a[p, q] == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2 * a[p, q])
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1))
                c = 1 / math.sqrt(t * t + 1)
                sn = t * c
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q], rot[q, p] = sn, -sn
                a = rot.T @ a @ rot
    return np.sort(np.diag(a))[::-1]


def brute_force_dyck(s: int):
    """All Dyck words of half-length s from the full set of +-1 sequences."""
    out = []
    for steps in itertools.product((1, -1), repeat=2 * s):
        h = 0
        ok = True
        for st in steps:
            h += st
            if h < 0:
                ok = False
                break
        if ok and h == 0:
            out.append(steps)
    return out


def odd_up_steps(steps) -> int:
    return sum(1 for i, st in enumerate(steps, 1) if st == 1 and i % 2 == 1)


def mp_cdf_gamma_one(x: float) -> float:
    """Closed form of the gamma = 1, sigma2 = 1 Marchenko-Pastur CDF on [0, 4]."""
    return (math.sqrt(x * (4 - x)) + 4 * math.asin(math.sqrt(x) / 2)) / (2 * math.pi)
