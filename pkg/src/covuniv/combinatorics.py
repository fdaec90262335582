"""Dyck paths, Narayana numbers and the counting identities built on them.

Steps are indexed ``1..2s``. An *odd up step* is an up step whose index is
odd, so ``UDUD`` has two of them (instants 1 and 3) and ``UUDD`` has one.
All counts are exact Python integers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

import numpy as np

UP = 1
DOWN = -1

ENUMERATION_CAP = 14
DECOMPOSITION_CAP = 200
REJECTION_BUDGET = 10**6


@dataclass(frozen=True)
class DyckPath:
    """A nonnegative excursion of +1/-1 steps, stored as a tuple of ints."""

    steps: tuple[int, ...]

    def __post_init__(self):
        level = 0
        for step in self.steps:
            if step not in (UP, DOWN):
                raise ValueError(f"steps must be +1 or -1, got {step!r}")
            level += step
            if level < 0:
                raise ValueError("path dips below zero")
        if level != 0:
            raise ValueError("path does not return to zero")

    @classmethod
    def from_string(cls, word: str) -> "DyckPath":
        table = {"U": UP, "D": DOWN}
        try:
            return cls(tuple(table[c] for c in word.upper()))
        except KeyError as exc:
            raise ValueError(f"unexpected step letter {exc.args[0]!r}") from None

    @property
    def half_length(self) -> int:
        return len(self.steps) // 2

    def levels(self) -> list[int]:
        out = [0]
        for step in self.steps:
            out.append(out[-1] + step)
        return out

    def __str__(self) -> str:
        return "".join("U" if step == UP else "D" for step in self.steps)

    def __len__(self) -> int:
        return len(self.steps)


@dataclass(frozen=True)
class PathStatistics:
    odd_up_count: int
    returns_to_zero: int
    max_level: int
    uu_count: int
    du_count: int
    ud_count: int

    def satisfies_block_relations(self, s: int) -> bool:
        """Check ``2l + k3 + k2 = s``, ``l + k2 = s - k`` and ``l + k3 = k``."""
        k, l, k2, k3 = self.odd_up_count, self.uu_count, self.du_count, self.ud_count
        return 2 * l + k3 + k2 == s and l + k2 == s - k and l + k3 == k


def _binom(n: int, r: int) -> int:
    # C(-1, 0) = 1 is needed by the degenerate empty-subpath term.
    if r < 0:
        return 0
    if r == 0:
        return 1
    if n < r:
        return 0
    return math.comb(n, r)


def catalan(s: int) -> int:
    if s < 0:
        raise ValueError("s must be >= 0")
    return math.comb(2 * s, s) // (s + 1)


def narayana(s: int, k: int) -> int:
    """Number of Dyck paths of half-length ``s`` with ``k`` odd up steps."""
    if s < 1:
        raise ValueError(f"s must be >= 1, got {s}")
    if not 1 <= k <= s:
        raise ValueError(f"k must lie in [1, {s}], got {k}")
    num = math.comb(s, k) * math.comb(s, k - 1)
    q, r = divmod(num, s)
    assert r == 0
    return q


def narayana_row(s: int) -> list[int]:
    return [narayana(s, k) for k in range(1, s + 1)]


def log_narayana(s: int, k: int) -> float:
    """``log N(s, k)`` through ``lgamma``; usable far beyond exact range."""
    if not 1 <= k <= s:
        raise ValueError(f"k must lie in [1, {s}], got {k}")
    lg = math.lgamma
    log_c1 = lg(s + 1) - lg(k + 1) - lg(s - k + 1)
    log_c2 = lg(s + 1) - lg(k) - lg(s - k + 2)
    return log_c1 + log_c2 - math.log(s)


def narayana_moment(s: int, gamma, sigma2=1) -> Fraction:
    """Exact ``sigma2**s * sum_k gamma**k N(s, k)`` for rational inputs."""
    g = Fraction(gamma)
    total = sum(g**k * narayana(s, k) for k in range(1, s + 1))
    return Fraction(sigma2) ** s * total


def _dyck_words(s: int) -> Iterator[int]:
    """Yield Dyck words of half-length ``s`` as bit masks, ``U`` first.

    Step ``i`` (0-based) is bit ``2s - 1 - i``; 1 means up. Words come out
    in lexicographic order with ``U < D``.
    """
    n = 2 * s
    # stack entries: (word, position, ups, downs)
    stack = [(0, 0, 0, 0)]
    while stack:
        word, pos, ups, downs = stack.pop()
        if pos == n:
            yield word
            continue
        # push D first so U is explored first
        if downs < ups:
            stack.append((word, pos + 1, ups, downs + 1))
        if ups < s:
            stack.append((word | (1 << (n - 1 - pos)), pos + 1, ups + 1, downs))


def _odd_instant_mask(s: int) -> int:
    # instants 1, 3, 5, ... are the 0-based positions 0, 2, 4, ...
    n = 2 * s
    mask = 0
    for pos in range(0, n, 2):
        mask |= 1 << (n - 1 - pos)
    return mask


def _check_cap(s: int, cap: int) -> None:
    if s > cap:
        raise ValueError(
            f"enumeration of half-length {s} exceeds the cap {cap}; "
            "raise the cap explicitly if you really want this"
        )


def enumerate_dyck(s: int, cap: int = ENUMERATION_CAP) -> Iterator[DyckPath]:
    """Yield every Dyck path of half-length ``s`` once, in lexicographic order."""
    if s < 1:
        raise ValueError("s must be >= 1")
    _check_cap(s, cap)
    n = 2 * s
    for word in _dyck_words(s):
        yield DyckPath(tuple(UP if (word >> (n - 1 - i)) & 1 else DOWN for i in range(n)))


def odd_up_histogram(s: int, cap: int = ENUMERATION_CAP) -> dict[int, int]:
    """Histogram of the odd-up-step count over all Dyck paths of half-length ``s``.

    Runs a full enumeration on bit masks, so it stays fast up to ``s = 14``.
    """
    if s < 1:
        raise ValueError("s must be >= 1")
    _check_cap(s, cap)
    mask = _odd_instant_mask(s)
    counts: dict[int, int] = {}
    for word in _dyck_words(s):
        k = (word & mask).bit_count()
        counts[k] = counts.get(k, 0) + 1
    return dict(sorted(counts.items()))


def path_statistics(path: DyckPath) -> PathStatistics:
    k = returns = level = top = 0
    uu = du = ud = 0
    steps = path.steps
    for i, step in enumerate(steps):
        if step == UP and i % 2 == 0:
            k += 1
        level += step
        if level == 0:
            returns += 1
        top = max(top, level)
        if i % 2 == 1:
            pair = (steps[i - 1], step)
            if pair == (UP, UP):
                uu += 1
            elif pair == (DOWN, UP):
                du += 1
            elif pair == (UP, DOWN):
                ud += 1
    return PathStatistics(k, returns, top, uu, du, ud)


def count_dyck_by_returns(l: int, Q: int) -> int:
    """Dyck paths of half-length ``l`` that touch zero exactly ``Q`` times after the start."""
    if l < 1 or not 1 <= Q <= l:
        raise ValueError(f"need 1 <= Q <= l, got l={l}, Q={Q}")
    return _dyck_by_returns(l, Q)


def _dyck_by_returns(l: int, Q: int) -> int:
    # ballot-type closed form Q/(2l-Q) * C(2l-Q, l); l = Q = 0 is the empty path
    if l == 0:
        return 1 if Q == 0 else 0
    if Q < 1 or Q > l:
        return 0
    q, r = divmod(Q * math.comb(2 * l - Q, l), 2 * l - Q)
    assert r == 0
    return q


def uu_dd_subpath(path: DyckPath) -> DyckPath:
    """Collapse 2-step blocks: ``UU -> U``, ``DD -> D``, drop ``UD`` and ``DU``."""
    out = []
    steps = path.steps
    for i in range(0, len(steps), 2):
        pair = (steps[i], steps[i + 1])
        if pair == (UP, UP):
            out.append(UP)
        elif pair == (DOWN, DOWN):
            out.append(DOWN)
    return DyckPath(tuple(out))


@dataclass(frozen=True)
class DecompositionCheck:
    s: int
    k: int
    narayana: int
    decomposition: int

    @property
    def holds(self) -> bool:
        return self.narayana == self.decomposition


def decomposition_sum(s: int, k: int) -> int:
    """Right-hand side of the sub-Dyck-path decomposition of ``N(s, k)``.

    Sums over the half-length ``l`` of the UU/DD sub-path and its number of
    returns ``Q``: ``#Dyck(l, Q) * C(l-Q+s-k-1, s-k-l) * C(s, k-l)``. The
    ``l = 0`` term is the empty sub-path and only survives when ``k = s``.
    """
    total = 0
    for l in range(0, min(k, s - k) + 1):
        for Q in range(0, l + 1):
            count = _dyck_by_returns(l, Q)
            if count:
                total += count * _binom(l - Q + s - k - 1, s - k - l) * _binom(s, k - l)
    return total


def verify_decomposition_identity(s: int, k: int, cap: int = DECOMPOSITION_CAP) -> DecompositionCheck:
    if not 1 <= k <= s:
        raise ValueError(f"k must lie in [1, {s}], got {k}")
    if s > cap:
        raise ValueError(f"s={s} exceeds the cap {cap}")
    return DecompositionCheck(s, k, narayana(s, k), decomposition_sum(s, k))


def _exact_sqrt(x) -> Fraction | None:
    try:
        f = Fraction(x)
    except (TypeError, ValueError):
        return None
    if f < 0:
        return None
    a, b = math.isqrt(f.numerator), math.isqrt(f.denominator)
    if a * a == f.numerator and b * b == f.denominator:
        return Fraction(a, b)
    return None


def hat_k(s: int, gamma: float) -> int:
    """Location ``floor(s * sqrt(gamma) / (1 + sqrt(gamma))) + 1`` of the Narayana profile peak."""
    if s < 1:
        raise ValueError("s must be >= 1")
    if gamma <= 0:
        raise ValueError("gamma must be positive")
    root = _exact_sqrt(gamma)
    if root is not None:
        return math.floor(s * root / (1 + root)) + 1
    r = math.sqrt(gamma)
    return math.floor(s * r / (1 + r)) + 1


def default_decay_constant(gamma: float) -> float:
    return 1.0 / (2.0 * (math.sqrt(gamma) + 1.0) ** 2)


def log_profile_ratio(s: int, gamma: float, l: int) -> float:
    """``log[N(s, kh+l) gamma^(kh+l) / (N(s, kh) gamma^kh)]`` with ``kh = hat_k(s, gamma)``."""
    kh = hat_k(s, gamma)
    if not 1 <= kh + l <= s:
        raise ValueError(f"hat_k + l = {kh + l} is outside [1, {s}]")
    return log_narayana(s, kh + l) - log_narayana(s, kh) + l * math.log(gamma)


def narayana_profile_decay(s: int, gamma: float, l: int, c: float | None = None) -> bool:
    """Whether the profile ratio at offset ``l`` is below ``exp(-c l^2 / (s - hat_k))``."""
    if c is None:
        c = default_decay_constant(gamma)
    if l == 0:
        return True
    width = max(s - hat_k(s, gamma), 1)
    return log_profile_ratio(s, gamma, l) <= -c * l * l / width + 1e-12


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def sample_uniform_dyck(s: int, rng) -> DyckPath:
    """Uniform Dyck path of half-length ``s`` by the cycle lemma.

    A uniformly shuffled word with ``s`` ups and ``s + 1`` downs has exactly
    one rotation whose proper prefixes stay nonnegative; dropping its final
    down step leaves a uniform Dyck path.
    """
    if s < 1:
        raise ValueError("s must be >= 1")
    gen = _as_generator(rng)
    word = np.array([UP] * s + [DOWN] * (s + 1), dtype=np.int64)
    gen.shuffle(word)
    partial = np.cumsum(word)
    # rotate to start right after the first time the running sum hits its minimum
    start = int(np.argmin(partial)) + 1
    rotated = np.concatenate([word[start:], word[:start]])
    return DyckPath(tuple(int(v) for v in rotated[:-1]))


def sample_dyck_given_k(s: int, k: int, rng, budget: int = REJECTION_BUDGET) -> DyckPath:
    """Uniform Dyck path of half-length ``s`` conditioned on ``k`` odd up steps (by rejection)."""
    narayana(s, k)  # validates the range
    gen = _as_generator(rng)
    for _ in range(budget + 1):
        path = sample_uniform_dyck(s, gen)
        if path_statistics(path).odd_up_count == k:
            return path
    raise RuntimeError(
        f"no path with k={k} after {budget} rejections at s={s}; "
        "enumerate_dyck is the fallback for tail values of k"
    )
