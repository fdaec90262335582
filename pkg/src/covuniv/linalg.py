"""Dense symmetric / Hermitian eigenvalues and trace functionals."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numba import njit

DEFAULT_ORDER_CAP = 4096
# above this order the LAPACK driver is used when method="auto"
NATIVE_ORDER_LIMIT = 256


class EigenSolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues in descending order."""

    eigenvalues: np.ndarray

    def __post_init__(self):
        ev = np.asarray(self.eigenvalues, dtype=float)
        if ev.ndim != 1:
            raise ValueError("eigenvalues must be one-dimensional")
        if not np.all(np.isfinite(ev)):
            raise ValueError("eigenvalues must be finite")
        if ev.size > 1 and np.any(np.diff(ev) > 0):
            raise ValueError("eigenvalues must be sorted in descending order")
        ev.setflags(write=False)
        object.__setattr__(self, "eigenvalues", ev)

    def __len__(self):
        return self.eigenvalues.size

    @property
    def largest(self) -> float:
        return float(self.eigenvalues[0])


@njit(cache=True)
def _tridiagonalize(a):
    # Householder reduction in place; returns diagonal d and subdiagonal e.
    # Complex reflectors are phased so that e comes out real and nonnegative.
    n = a.shape[0]
    d = np.empty(n)
    e = np.zeros(n)
    # zeroed: u[0] also serves as a typed zero below
    u = np.zeros(n, dtype=a.dtype)
    p = np.zeros(n, dtype=a.dtype)
    for k in range(n - 2):
        m0 = k + 1
        xnorm2 = 0.0
        for i in range(m0, n):
            xnorm2 += abs(a[i, k]) ** 2
        xnorm = math.sqrt(xnorm2)
        d[k] = a[k, k].real
        if xnorm == 0.0:
            e[k] = 0.0
            continue
        x0 = a[m0, k]
        ax0 = abs(x0)
        phase = x0 / ax0 if ax0 > 0 else 1.0 + 0.0 * x0
        alpha = -phase * xnorm
        for i in range(m0, n):
            u[i] = a[i, k]
        u[m0] -= alpha
        un2 = 0.0
        for i in range(m0, n):
            un2 += abs(u[i]) ** 2
        un = math.sqrt(un2)
        for i in range(m0, n):
            u[i] /= un
        for i in range(m0, n):
            s = 0.0 * u[0]
            for j in range(m0, n):
                s += a[i, j] * u[j]
            p[i] = s
        kk = 0.0 * u[0]
        for i in range(m0, n):
            kk += np.conj(u[i]) * p[i]
        for i in range(m0, n):
            p[i] -= kk.real * u[i]
        # A22 <- (I - 2uu*) A22 (I - 2uu*)
        for i in range(m0, n):
            ui = u[i]
            pi = p[i]
            for j in range(m0, n):
                a[i, j] -= 2.0 * (ui * np.conj(p[j]) + pi * np.conj(u[j]))
        e[k] = xnorm
    if n >= 2:
        d[n - 2] = a[n - 2, n - 2].real
        e[n - 2] = abs(a[n - 1, n - 2])
    d[n - 1] = a[n - 1, n - 1].real
    return d, e


@njit(cache=True)
def _tridiagonal_ql(d, e, max_iter):
    # implicit QL with Wilkinson-type shift; d overwritten by eigenvalues
    n = d.shape[0]
    total = 0
    for l in range(n):
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= 2.220446049250313e-16 * dd:
                    break
                m += 1
            if m == l:
                break
            total += 1
            if total > max_iter:
                return False
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + (r if g >= 0 else -r))
            s = 1.0
            c = 1.0
            p = 0.0
            deflated = False
            i = m - 1
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    deflated = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                i -= 1
            if deflated:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return True


def _check_conservation(m: np.ndarray, ev: np.ndarray) -> None:
    n = m.shape[0]
    fro = float(np.linalg.norm(m))
    tol = n * 1e-12 * max(fro, np.finfo(float).tiny)
    tr = float(np.trace(m).real)
    if abs(math.fsum(ev) - tr) > tol:
        raise EigenSolverError(f"trace not conserved: {math.fsum(ev)} vs {tr}")
    if abs(math.fsum(ev * ev) - fro * fro) > tol * max(fro, 1.0):
        raise EigenSolverError("Frobenius norm not conserved")


def eig_sym(m, method: str = "auto", cap: int = DEFAULT_ORDER_CAP, check: bool = __debug__) -> Spectrum:
    """All eigenvalues of a real symmetric or complex Hermitian matrix.

    ``method="native"`` runs Householder tridiagonalization followed by implicit
    QL; ``"lapack"`` defers to ``numpy.linalg.eigvalsh``. ``"auto"`` picks the
    native path up to order ``NATIVE_ORDER_LIMIT``. Only the upper triangle is
    read. With ``check`` the trace and Frobenius norm are verified.
    """
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    n = m.shape[0]
    if n == 0:
        raise ValueError("empty matrix")
    if n > cap:
        raise ValueError(f"order {n} exceeds the configured cap {cap}")
    cplx = np.iscomplexobj(m)
    a = np.array(m, dtype=np.complex128 if cplx else np.float64, order="C")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    # mirror the upper triangle so asymmetric input is handled consistently
    il = np.tril_indices(n, -1)
    a[il] = np.conj(a.T[il])
    if cplx:
        a[np.diag_indices(n)] = a.diagonal().real
    ref = a.copy() if check else None

    if method == "auto":
        method = "native" if n <= NATIVE_ORDER_LIMIT else "lapack"
    if method == "native":
        d, e = _tridiagonalize(a)
        if not _tridiagonal_ql(d, e, 50 * n):
            raise EigenSolverError(f"QL iteration did not converge within {50 * n} sweeps (n={n})")
        ev = np.sort(d)[::-1]
    elif method == "lapack":
        ev = np.linalg.eigvalsh(a, UPLO="U")[::-1].copy()
    else:
        raise ValueError(f"unknown method {method!r}")
    if check:
        _check_conservation(ref, ev)
    return Spectrum(ev)


def sample_covariance(x, denom: str | float = "N") -> np.ndarray:
    """``X X* / c`` for an ``N x p`` array, exactly Hermitian.

    ``denom`` is ``"N"`` (rows), ``"p"`` (columns) or a positive number.
    """
    x = np.asarray(x)
    if x.ndim != 2:
        raise ValueError(f"X must be two-dimensional, got shape {x.shape}")
    n, p = x.shape
    if denom == "N":
        if n > p:
            raise ValueError(f"M_N convention needs N <= p (got {n}x{p}); transpose X first")
        c = float(n)
    elif denom == "p":
        c = float(p)
    else:
        c = float(denom)
        if not c > 0:
            raise ValueError("denominator must be positive")
    m = (x @ x.conj().T) / c
    iu = np.triu_indices(n, 1)
    m.T[iu] = np.conj(m[iu])
    if np.iscomplexobj(m):
        m[np.diag_indices(n)] = m.diagonal().real
    return m


def trace_power(spec: Spectrum, s: int, scale: float = 1.0) -> float:
    """``sum_i (lambda_i / scale)**s`` computed in log space.

    Tiny negative eigenvalues (rounding noise of PSD inputs) are set to zero.
    """
    if int(s) != s or s < 1:
        raise ValueError("s must be a positive integer")
    if not scale > 0:
        raise ValueError("scale must be positive")
    s = int(s)
    ev = np.asarray(spec.eigenvalues if isinstance(spec, Spectrum) else spec, dtype=float)
    floor = 1e-10 * float(np.max(np.abs(ev))) if ev.size else 0.0
    ev = np.where((ev < 0) & (ev >= -floor), 0.0, ev)
    a = ev / scale
    mag = np.abs(a)
    nz = mag > 0
    if not np.any(nz):
        return 0.0
    logs = np.log(mag[nz])
    top = float(logs.max())
    if s * top < 600:
        # no overflow risk: direct powers keep exact small-integer cases exact
        return math.fsum(a[nz] ** s)
    terms = np.exp(s * (logs - top))
    if s % 2:
        terms = terms * np.sign(a[nz])
    total = math.fsum(terms)
    if total == 0.0:
        return 0.0
    log_val = math.log(abs(total)) + s * top
    mag_val = math.exp(log_val) if log_val < 709.7 else math.inf
    return math.copysign(mag_val, total)
