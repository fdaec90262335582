"""Edge normalisations for the largest eigenvalue and for trace powers.

All functions accept scalars or arrays for the eigenvalue argument.
"""

from __future__ import annotations

import numpy as np

CONVENTIONS = ("basic", "adjusted", "companion", "gammainf")


def _positive(name, v):
    if not v > 0:
        raise ValueError(f"{name} must be positive, got {v}")


def _out(v):
    v = np.asarray(v, dtype=float)
    return float(v) if v.ndim == 0 else v


def u_plus(N: int, p: int, sigma2: float = 1.0) -> float:
    """Right edge of the Marchenko-Pastur support for ``XX*/N``."""
    return sigma2 * (1.0 + np.sqrt(p / N)) ** 2


def rescale_basic(lam, N: int, p: int, sigma2: float = 1.0):
    """Centre at ``u_+`` and scale by ``N^{2/3}`` with the gamma-dependent constant."""
    _positive("N", N)
    _positive("p", p)
    _positive("sigma2", sigma2)
    g = p / N
    rg = np.sqrt(g)
    c = g ** (1 / 6) / (1 + rg) ** (4 / 3) * N ** (2 / 3) / sigma2
    return _out(c * (np.asarray(lam, dtype=float) - sigma2 * (1 + rg) ** 2))


def rescale_adjusted(lam1, N: int, p: int, sigma2: float = 1.0, a1: float = 0.0, a2: float = 0.0):
    """Finite-size corrected form with dimension shifts ``N + a1`` and ``p + a2``."""
    _positive("sigma2", sigma2)
    n_eff, p_eff = N + a1, p + a2
    if not (n_eff > 0 and p_eff > 0):
        raise ValueError(f"shifted dimensions must be positive: N+a1={n_eff}, p+a2={p_eff}")
    rn, rp = np.sqrt(n_eff), np.sqrt(p_eff)
    centre = sigma2 * (rn + rp) ** 2
    scale = sigma2 * (rn + rp) * (1 / rn + 1 / rp) ** (1 / 3)
    return _out((N * np.asarray(lam1, dtype=float) - centre) / scale)


def rescale_companion(lam1_prime, N: int, p: int, sigma2: float = 1.0):
    """Rescaling of the top eigenvalue of ``X*X/p`` with ``delta = N/p``."""
    _positive("N", N)
    _positive("sigma2", sigma2)
    if p < N:
        raise ValueError("companion rescaling needs p >= N")
    d = N / p
    rd = np.sqrt(d)
    c = d ** (1 / 6) / (1 + rd) ** (4 / 3) * p ** (2 / 3)
    return _out(c * (np.asarray(lam1_prime, dtype=float) / sigma2 - (1 + rd) ** 2))


def gamma_inf_normalizers(N: int, p: int, sigma2: float = 1.0) -> tuple[float, float]:
    """``(v_plus, s_scale)`` for ``XX*/p`` when ``p/N`` is large.

    ``v_plus = sigma2 (1 + 1/sqrt(gamma))^2`` is the edge of ``XX*/p`` and
    trace powers are taken at ``s ~ sqrt(gamma) N^{2/3}``.
    """
    _positive("N", N)
    _positive("sigma2", sigma2)
    if p < N:
        raise ValueError("gamma_inf normalisation needs p >= N")
    g = p / N
    v_plus = sigma2 * (1 + 1 / np.sqrt(g)) ** 2
    return float(v_plus), float(np.sqrt(g) * N ** (2 / 3))


def rescale_gamma_inf(lam_p, N: int, p: int, sigma2: float = 1.0):
    """Rescale an eigenvalue of ``XX*/p``.

    Since ``XX*/p = (N/p) XX*/N`` this is the basic rescaling of ``lam_p * p / N``.
    """
    return rescale_basic(np.asarray(lam_p, dtype=float) * (p / N), N, p, sigma2)


def rescale(lam, N: int, p: int, sigma2: float = 1.0, convention: str = "adjusted", a1: float = 0.0, a2: float = 0.0):
    """Dispatch on ``convention``. ``lam`` must be an eigenvalue of the matching matrix:
    ``XX*/N`` for basic/adjusted, ``X*X/p`` for companion, ``XX*/p`` for gammainf."""
    if convention == "basic":
        return rescale_basic(lam, N, p, sigma2)
    if convention == "adjusted":
        return rescale_adjusted(lam, N, p, sigma2, a1, a2)
    if convention == "companion":
        return rescale_companion(lam, N, p, sigma2)
    if convention == "gammainf":
        return rescale_gamma_inf(lam, N, p, sigma2)
    raise ValueError(f"unknown convention {convention!r}; expected one of {CONVENTIONS}")
