"""Seeded Monte Carlo studies: edge CDF tables, spectral KS, trace moments, CLT, universality.

Every replication draws from its own counter-based stream, so a report is a
pure function of its configuration and master seed. Replications may be
spread over worker processes; results are gathered by index and reduced in
index order, which makes the output independent of the worker count.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from threadpoolctl import threadpool_limits

from .ensembles import EnsembleConfig, sample_matrix
from .linalg import eig_sym, sample_covariance, trace_power
from .mp_law import MPDistribution, mp_cdf_array, mp_moment_narayana
from .rescaling import CONVENTIONS, gamma_inf_normalizers, rescale, u_plus
from .special_functions import tw_cdf, tw_quantiles

# (x, F1(x)) pairs used as the reference table
TABLE_ANCHORS = (
    (-3.896, 0.01),
    (-3.516, 0.025),
    (-3.180, 0.05),
    (-2.782, 0.10),
    (-2.088, 0.25),
    (-1.269, 0.50),
    (-0.392, 0.75),
    (0.450, 0.90),
    (0.979, 0.95),
    (1.454, 0.975),
    (2.024, 0.99),
)
TRACE_BOUND = 1e3


class ReplicationError(RuntimeError):
    def __init__(self, index: int, cause: BaseException):
        super().__init__(f"replication {index} failed: {cause}")
        self.index = index


def available_workers() -> int:
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:  # pragma: no cover
        return os.cpu_count() or 1


# ---- per-replication kernels (module level so they pickle) ----

def _largest_eigenvalue(cfg: EnsembleConfig, r: int) -> float:
    x = sample_matrix(cfg, r)
    return eig_sym(sample_covariance(x, "N")).largest


def _trace_power(cfg: EnsembleConfig, r: int, s: int, scale: float, denom: str) -> float:
    x = sample_matrix(cfg, r)
    return trace_power(eig_sym(sample_covariance(x, denom)), s, scale)


def _run_chunk(kernel, cfg, indices, extra):
    out = []
    with threadpool_limits(limits=1):
        for r in indices:
            try:
                out.append(kernel(cfg, r, *extra))
            except Exception as exc:  # noqa: BLE001
                raise ReplicationError(r, exc) from exc
    return out


def map_replications(kernel, cfg: EnsembleConfig, R: int, extra: tuple = (), threads: int | None = None) -> np.ndarray:
    """Evaluate ``kernel(cfg, r, *extra)`` for r = 0..R-1, returned in index order.

    BLAS is pinned to one thread inside each worker so the arithmetic does
    not depend on how many workers are used.
    """
    threads = available_workers() if threads is None else int(threads)
    if threads < 1:
        raise ValueError("threads must be >= 1")
    idx = np.arange(R)
    if threads == 1 or R < 2:
        vals = _run_chunk(kernel, cfg, idx.tolist(), extra)
    else:
        chunks = [c.tolist() for c in np.array_split(idx, min(R, 4 * threads)) if c.size]
        with ProcessPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(_run_chunk, [kernel] * len(chunks), [cfg] * len(chunks), chunks, [extra] * len(chunks)))
        vals = [v for part in parts for v in part]
    return np.asarray(vals, dtype=float)


def _mean_stderr(v: np.ndarray) -> tuple[float, float]:
    mean = math.fsum(v) / v.size
    if v.size < 2:
        return mean, math.nan
    var = math.fsum((v - mean) ** 2) / (v.size - 1)
    return mean, math.sqrt(var / v.size)


# ---- largest eigenvalue tables ----

@dataclass(frozen=True)
class McReport:
    config: dict
    R: int
    a1: float
    a2: float
    anchors: tuple
    empirical_cdf: tuple
    master_seed: int
    beta: int = 1
    convention: str = "adjusted"
    raw: np.ndarray | None = field(default=None, repr=False, compare=False)

    def rows(self):
        return [(x, t, e) for (x, t), e in zip(self.anchors, self.empirical_cdf)]

    def as_dict(self) -> dict:
        return {
            "config": self.config,
            "R": self.R,
            "a1": self.a1,
            "a2": self.a2,
            "convention": self.convention,
            "master_seed": self.master_seed,
            "rows": [{"anchor_x": x, "F1_target": t, "empirical": e} for x, t, e in self.rows()],
        }


def run_largest_eigenvalue_mc(
    cfg: EnsembleConfig,
    R: int,
    a1: float = 0.0,
    a2: float = 0.0,
    extra_anchors=(),
    keep_raw: bool = True,
    threads: int | None = None,
    convention: str = "adjusted",
) -> McReport:
    """Empirical CDF of the rescaled top eigenvalue at the table anchors.

    The top eigenvalue of ``XX*/N`` is rescaled with ``convention``; the
    companion and gamma_inf forms use ``lambda N / p``, the top eigenvalue of
    ``X*X/p`` and ``XX*/p``. For ``beta=2`` the target column holds ``F2``.
    """
    if R < 100:
        raise ValueError("R must be at least 100")
    if convention not in CONVENTIONS:
        raise ValueError(f"unknown convention {convention!r}")
    lam = map_replications(_largest_eigenvalue, cfg, R, threads=threads)
    if convention in ("companion", "gammainf"):
        lam = lam * (cfg.N / cfg.p)
    vals = np.sort(rescale(lam, cfg.N, cfg.p, cfg.sigma2, convention, a1, a2))
    if cfg.beta == 1:
        anchors = list(TABLE_ANCHORS)
    else:
        anchors = [(x, round(float(tw_cdf(2, x)), 4)) for x, _ in TABLE_ANCHORS]
    anchors += [(float(x), float(tw_cdf(cfg.beta, x))) for x in extra_anchors]
    anchors.sort(key=lambda a: a[0])
    counts = np.searchsorted(vals, [x for x, _ in anchors], side="right")
    ecdf = tuple(float(c) / R for c in counts)
    return McReport(
        config=cfg.as_dict(),
        R=R,
        a1=float(a1),
        a2=float(a2),
        anchors=tuple(anchors),
        empirical_cdf=ecdf,
        master_seed=cfg.master_seed,
        beta=cfg.beta,
        convention=convention,
        raw=vals if keep_raw else None,
    )


def pp_plot_data(report: McReport) -> np.ndarray:
    """``(R, 2)`` array of (TW quantile at (i - 0.5)/R, i-th sorted value)."""
    if report.raw is None:
        raise ValueError("report was built without raw values; rerun with keep_raw=True")
    vals = np.sort(np.asarray(report.raw, dtype=float))
    R = vals.size
    probs = (np.arange(1, R + 1) - 0.5) / R
    return np.column_stack([tw_quantiles(report.beta, probs), vals])


def pp_slope(pairs: np.ndarray) -> float:
    """Least-squares slope of empirical against theoretical quantiles."""
    x, y = pairs[:, 0], pairs[:, 1]
    xc = x - x.mean()
    return float(np.dot(xc, y - y.mean()) / np.dot(xc, xc))


# ---- Marchenko-Pastur fit ----

def run_mp_ks(cfg: EnsembleConfig, replication_index: int = 0) -> float:
    """Kolmogorov-Smirnov distance between the spectrum of ``XX*/N`` and the limit law."""
    x = sample_matrix(cfg, replication_index)
    with threadpool_limits(limits=1):
        ev = np.sort(eig_sym(sample_covariance(x, "N")).eigenvalues)
    d = MPDistribution(cfg.gamma, cfg.sigma2)
    F = mp_cdf_array(d, ev)
    n = ev.size
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - F), np.max(F - (i - 1) / n)))


# ---- trace moments ----

@dataclass(frozen=True)
class TraceMomentReport:
    config: dict
    s: int
    R: int
    mc_mean: float
    mc_stderr: float
    narayana_value: float
    relative_gap: float

    def as_dict(self):
        return dict(self.__dict__)


def run_trace_moment_check(cfg: EnsembleConfig, s: int, R: int, threads: int | None = None) -> TraceMomentReport:
    """Compare the Monte Carlo mean of ``Tr(M^s)/N`` with the Narayana polynomial."""
    s = int(s)
    if s < 1:
        raise ValueError("s must be >= 1")
    if s > math.sqrt(cfg.N) / 3:
        raise ValueError(
            f"s={s} exceeds sqrt(N)/3={math.sqrt(cfg.N) / 3:.3g}; the moment formula needs s << sqrt(N)"
        )
    if R < 2:
        raise ValueError("R must be >= 2")
    vals = map_replications(_trace_power, cfg, R, (s, 1.0, "N"), threads) / cfg.N
    mean, se = _mean_stderr(vals)
    target = mp_moment_narayana(s, Fraction(cfg.p, cfg.N), Fraction(cfg.sigma2).limit_denominator(10**12))
    return TraceMomentReport(cfg.as_dict(), s, R, mean, se, target, abs(mean - target) / target)


# ---- fluctuations of trace powers ----

@dataclass(frozen=True)
class CltReport:
    config: dict
    beta: int
    s: int
    R: int
    mean: float
    variance: float
    variance_stderr: float
    target: float
    skewness: float
    kurtosis: float

    def as_dict(self):
        return dict(self.__dict__)


def clt_target(beta: int) -> float:
    return 1.0 / (beta * math.pi)


def run_clt_check(cfg: EnsembleConfig, s: int, R: int, threads: int | None = None) -> CltReport:
    """Sample variance and standardised 3rd/4th moments of ``Tr(M/u_+)^s``."""
    s = int(s)
    if not 8 <= s <= math.sqrt(cfg.N) / 2:
        raise ValueError(f"s={s} outside [8, sqrt(N)/2]; need 1 << s << sqrt(N)")
    if R < 4:
        raise ValueError("R must be >= 4")
    up = u_plus(cfg.N, cfg.p, cfg.sigma2)
    v = map_replications(_trace_power, cfg, R, (s, up, "N"), threads)
    mean = math.fsum(v) / R
    c = v - mean
    m2 = math.fsum(c**2) / R
    m3 = math.fsum(c**3) / R
    m4 = math.fsum(c**4) / R
    var = m2 * R / (R - 1)
    # delta-method standard error of the sample variance
    var_se = math.sqrt(max(m4 - m2 * m2 * (R - 3) / (R - 1), 0.0) / R)
    return CltReport(
        cfg.as_dict(),
        cfg.beta,
        s,
        R,
        mean,
        var,
        var_se,
        clt_target(cfg.beta),
        m3 / m2**1.5 if m2 > 0 else math.nan,
        m4 / m2**2 if m2 > 0 else math.nan,
    )


# ---- two-ensemble contrast ----

@dataclass(frozen=True)
class UniversalityReport:
    config_a: dict
    config_b: dict
    s: int
    R: int
    gamma_inf: bool
    mean_a: float
    stderr_a: float
    mean_b: float
    stderr_b: float
    difference: float
    pooled_stderr: float
    z: float
    max_value: float

    def as_dict(self):
        return dict(self.__dict__)


def universality_power(N: int, p: int, c: float = 1.0, gamma_inf: bool = False) -> int:
    scale = gamma_inf_normalizers(N, p)[1] if gamma_inf else N ** (2 / 3)
    return max(int(round(c * scale)), 1)


def run_universality_pair(
    cfg_a: EnsembleConfig,
    cfg_b: EnsembleConfig,
    c: float = 1.0,
    R: int = 2000,
    gamma_inf: bool = False,
    s: int | None = None,
    threads: int | None = None,
) -> UniversalityReport:
    """Normalised trace powers under two entry laws with the same shape.

    Default power is ``round(c N^{2/3})`` normalised by ``N u_+``; with
    ``gamma_inf`` it is ``round(c sqrt(gamma) N^{2/3})`` on ``XX*/p`` normalised
    by ``v_+``. An explicit ``s`` overrides ``c``.
    """
    if (cfg_a.N, cfg_a.p, cfg_a.beta) != (cfg_b.N, cfg_b.p, cfg_b.beta):
        raise ValueError("both ensembles must share N, p and beta")
    if R < 2:
        raise ValueError("R must be >= 2")
    N, p = cfg_a.N, cfg_a.p
    s = universality_power(N, p, c, gamma_inf) if s is None else int(s)
    out = []
    for cfg in (cfg_a, cfg_b):
        if gamma_inf:
            scale, denom = gamma_inf_normalizers(N, p, cfg.sigma2)[0], "p"
        else:
            scale, denom = u_plus(N, p, cfg.sigma2), "N"
        out.append(map_replications(_trace_power, cfg, R, (s, scale, denom), threads))
    (ma, sa), (mb, sb) = _mean_stderr(out[0]), _mean_stderr(out[1])
    diff = ma - mb
    pooled = math.hypot(sa, sb)
    z = diff / pooled if pooled > 0 else (0.0 if diff == 0 else math.inf)
    return UniversalityReport(
        cfg_a.as_dict(), cfg_b.as_dict(), s, R, gamma_inf, ma, sa, mb, sb, diff, pooled, z,
        float(max(out[0].max(), out[1].max())),
    )
