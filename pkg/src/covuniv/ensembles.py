"""Seeded i.i.d. data matrices with symmetric entry laws."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field

import numpy as np

SEED_ENV_VAR = "COVUNIV_SEED"
FALLBACK_SEED = 20240917
_UINT64 = 1 << 64


def default_seed() -> int:
    """Seed from ``$COVUNIV_SEED`` if set, else a fixed fallback."""
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None or raw.strip() == "":
        return FALLBACK_SEED
    try:
        return check_seed(int(raw.strip(), 0))
    except ValueError as exc:
        raise ValueError(f"{SEED_ENV_VAR}={raw!r} is not a valid 64-bit seed") from exc


def check_seed(seed: int) -> int:
    seed = int(seed)
    if not 0 <= seed < _UINT64:
        raise ValueError(f"seed must be in [0, 2**64), got {seed}")
    return seed


def replication_rng(master_seed: int, index: int) -> np.random.Generator:
    """Counter-based stream for replication ``index``.

    Philox keyed by the pair (master_seed, index); the stream depends only
    on that pair, never on scheduling.
    """
    key = np.array([check_seed(master_seed), check_seed(index)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def standard_normal(rng: np.random.Generator, size: int) -> np.ndarray:
    """Marsaglia polar method, vectorised over batches of uniform pairs."""
    out = np.empty(size)
    filled = 0
    while filled < size:
        need = size - filled
        # acceptance rate pi/4, two variates per accepted pair
        pairs = int(need / 2 / 0.78) + 16
        u = rng.random((2, pairs)) * 2.0 - 1.0
        r2 = u[0] * u[0] + u[1] * u[1]
        ok = (r2 > 0.0) & (r2 < 1.0)
        u, r2 = u[:, ok], r2[ok]
        f = np.sqrt(-2.0 * np.log(r2) / r2)
        z = np.concatenate([u[0] * f, u[1] * f])
        take = min(need, z.size)
        out[filled : filled + take] = z[:take]
        filled += take
    return out


@dataclass(frozen=True)
class EntryDistribution:
    """Symmetric entry law.

    kind is one of ``gaussian`` (params: sigma2), ``mixture`` (w, v1, v2),
    ``t`` (nu) or ``rademacher``. Use the constructors below.
    """

    kind: str
    params: tuple = field(default=())

    def __post_init__(self):
        k, pr = self.kind, tuple(float(v) for v in self.params)
        object.__setattr__(self, "params", pr)
        if k == "gaussian":
            if len(pr) != 1 or not pr[0] > 0:
                raise ValueError("gaussian needs one positive variance")
        elif k == "mixture":
            if len(pr) != 3:
                raise ValueError("mixture needs (w, v1, v2)")
            w, v1, v2 = pr
            if not 0 <= w <= 1 or not v1 > 0 or not v2 > 0:
                raise ValueError("mixture needs 0 <= w <= 1 and positive component variances")
        elif k == "t":
            if len(pr) != 1 or not pr[0] > 4:
                # finite fourth moment is required
                raise ValueError(f"Student-t needs nu > 4, got {pr[0] if pr else None}")
        elif k == "rademacher":
            if pr:
                raise ValueError("rademacher takes no parameters")
        else:
            raise ValueError(f"unknown distribution kind {k!r}")

    @classmethod
    def gaussian(cls, sigma2: float = 1.0):
        return cls("gaussian", (sigma2,))

    @classmethod
    def mixture(cls, w: float = 0.5, v1: float = 1.0, v2: float = 3.0):
        return cls("mixture", (w, v1, v2))

    @classmethod
    def student_t(cls, nu: float):
        """Student-t with ``nu`` degrees of freedom.

        Heavier than sub-Gaussian tails; the edge asymptotics are only
        expected to hold for fairly large ``nu`` (roughly above 36).
        """
        return cls("t", (nu,))

    @classmethod
    def rademacher(cls):
        return cls("rademacher")

    @classmethod
    def parse(cls, text: str) -> "EntryDistribution":
        """Parse ``gaussian``, ``gaussian:2``, ``mix:0.5,1,3``, ``t:40``, ``rademacher``."""
        name, _, rest = text.strip().partition(":")
        name = name.lower()
        try:
            args = [float(v) for v in rest.split(",")] if rest else []
        except ValueError:
            raise ValueError(f"cannot parse distribution {text!r}") from None
        if name in ("gaussian", "normal"):
            if len(args) > 1:
                raise ValueError("gaussian takes at most one parameter (the variance)")
            return cls.gaussian(*args)
        if name in ("mix", "mixture"):
            if len(args) not in (0, 3):
                raise ValueError("mixture takes no parameters or exactly w,v1,v2")
            return cls.mixture(*args)
        if name in ("t", "student"):
            if len(args) != 1:
                raise ValueError("Student-t needs one parameter, e.g. t:40")
            return cls.student_t(args[0])
        if name == "rademacher":
            if args:
                raise ValueError("rademacher takes no parameters")
            return cls.rademacher()
        raise ValueError(f"unknown distribution {text!r}")

    def __str__(self):
        fmt = lambda v: f"{v:g}"  # noqa: E731
        if self.kind == "gaussian":
            return f"gaussian:{fmt(self.params[0])}"
        if self.kind == "mixture":
            return "mix:" + ",".join(fmt(v) for v in self.params)
        if self.kind == "t":
            return f"t:{fmt(self.params[0])}"
        return "rademacher"

    @property
    def variance(self) -> float:
        if self.kind == "gaussian":
            return self.params[0]
        if self.kind == "mixture":
            w, v1, v2 = self.params
            return w * v1 + (1 - w) * v2
        if self.kind == "t":
            nu = self.params[0]
            return nu / (nu - 2)
        return 1.0

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        size = int(size)
        if self.kind == "gaussian":
            return math.sqrt(self.params[0]) * standard_normal(rng, size)
        if self.kind == "mixture":
            w, v1, v2 = self.params
            first = rng.random(size) < w
            z = standard_normal(rng, size)
            return z * np.where(first, math.sqrt(v1), math.sqrt(v2))
        if self.kind == "t":
            nu = self.params[0]
            z = standard_normal(rng, size)
            # chi-square(nu) = 2 * Gamma(nu / 2)
            v = 2.0 * rng.standard_gamma(nu / 2.0, size)
            return z / np.sqrt(v / nu)
        return rng.integers(0, 2, size).astype(float) * 2.0 - 1.0


def sample_entry(dist: EntryDistribution, rng: np.random.Generator) -> float:
    return float(dist.sample(rng, 1)[0])


@dataclass(frozen=True)
class EnsembleConfig:
    """Shape, symmetry class and entry law of one ensemble.

    ``p < N`` is normalised by swapping the two dimensions, so that the
    ``N x N`` matrix ``XX*/N`` is always the smaller one.
    """

    N: int
    p: int
    beta: int = 1
    dist: EntryDistribution = field(default_factory=EntryDistribution.gaussian)
    master_seed: int = FALLBACK_SEED

    def __post_init__(self):
        n, p = int(self.N), int(self.p)
        if n < 1 or p < 1:
            raise ValueError("N and p must be positive")
        if p < n:
            n, p = p, n
        object.__setattr__(self, "N", n)
        object.__setattr__(self, "p", p)
        if self.beta not in (1, 2):
            raise ValueError("beta must be 1 (real) or 2 (complex)")
        if isinstance(self.dist, str):
            object.__setattr__(self, "dist", EntryDistribution.parse(self.dist))
        object.__setattr__(self, "master_seed", check_seed(self.master_seed))

    @property
    def gamma(self) -> float:
        return self.p / self.N

    @property
    def sigma2(self) -> float:
        return self.dist.variance

    def as_dict(self) -> dict:
        return {
            "N": self.N,
            "p": self.p,
            "beta": self.beta,
            "dist": str(self.dist),
            "sigma2": self.sigma2,
            "master_seed": self.master_seed,
        }


def sample_matrix(cfg: EnsembleConfig, replication_index: int) -> np.ndarray:
    """``N x p`` data matrix for one replication.

    For ``beta=2`` real and imaginary parts are independent draws scaled to
    variance ``sigma2 / 2`` each.
    """
    rng = replication_rng(cfg.master_seed, replication_index)
    size = cfg.N * cfg.p
    re = cfg.dist.sample(rng, size).reshape(cfg.N, cfg.p)
    if cfg.beta == 1:
        return re
    im = cfg.dist.sample(rng, size).reshape(cfg.N, cfg.p)
    return (re + 1j * im) * math.sqrt(0.5)
