"""Binomial offspring laws, narrow-band trial policies and extinction."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import BandViolation, ConvergenceError, DomainError
from ..model import ModelParams, snap_floor


@dataclass(frozen=True)
class OffspringLaw:
    """Bin(trials, p) offspring."""

    trials: int
    p: float

    def __post_init__(self):
        if self.trials < 0 or int(self.trials) != self.trials:
            raise DomainError(f"trials must be a non-negative integer, got {self.trials}")
        if not 0.0 <= self.p <= 1.0:
            raise DomainError(f"p must lie in [0, 1], got {self.p}")

    @property
    def mean(self) -> float:
        return self.trials * self.p

    @classmethod
    def upper(cls, params: ModelParams) -> "OffspringLaw":
        """Bin(2(n-1), p): one trial per neighbour, mean 1 + eps."""
        return cls(params.omega, params.p)

    @classmethod
    def lower(cls, params: ModelParams) -> "OffspringLaw":
        """Bin(floor(2(n-1)(1+eps/2)/(1+eps)), p), mean at most 1 + eps/2."""
        return cls(lower_trials(params), params.p)


def lower_trials(params: ModelParams) -> int:
    eps = params.epsilon
    return snap_floor(params.omega * (1.0 + eps / 2.0) / (1.0 + eps))


@dataclass(frozen=True)
class Band:
    """Admissible per-step trial counts ``lo <= N_t <= hi``.

    ``hi = 2(n-1)`` gives mean exactly 1 + eps. ``lo`` is the integer floor
    of (1 + eps/2)/p, i.e. the lower law's trial count, so ``lo * p`` may sit
    up to one ``p`` below 1 + eps/2.
    """

    lo: int
    hi: int
    p: float
    epsilon: float

    @classmethod
    def from_params(cls, params: ModelParams) -> "Band":
        if params.epsilon <= 0:
            raise DomainError(f"narrow band needs eps > 0, got {params.epsilon}")
        lo = lower_trials(params)
        if lo < 1:
            raise DomainError("band is empty: floor((1 + eps/2)/p) < 1")
        return cls(lo=lo, hi=params.omega, p=params.p, epsilon=params.epsilon)

    def check(self, trials) -> None:
        arr = np.asarray(trials)
        if arr.size and (arr.min() < self.lo or arr.max() > self.hi):
            raise BandViolation(f"trial count outside band [{self.lo}, {self.hi}]")

    def mean_range(self) -> tuple[float, float]:
        return self.lo * self.p, self.hi * self.p


class BandPolicy:
    """Rule choosing the trial count N_t of step t.

    ``step`` sees the step index and the current number of active
    individuals. ``steps`` draws one step for many independent runs and
    ``block_total`` returns sum_{s=t}^{t+k-1} N_s for many runs; the latter
    two exist only for policies that ignore the population history, which
    all built-ins do.
    """

    name = "policy"
    # True when block_total draws one variate per step (memory grows with k)
    draws_per_step = False

    def step(self, t: int, g: int, band: Band, rng: np.random.Generator) -> int:
        raise NotImplementedError

    def steps(self, t: np.ndarray, band: Band, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def block_total(self, t: np.ndarray, k: np.ndarray, band: Band, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}()"


class ConstantLower(BandPolicy):
    name = "constant-lower"

    def step(self, t, g, band, rng):
        return band.lo

    def steps(self, t, band, rng):
        return np.full(t.shape, band.lo, dtype=np.int64)

    def block_total(self, t, k, band, rng):
        return k * band.lo


class ConstantUpper(BandPolicy):
    name = "constant-upper"

    def step(self, t, g, band, rng):
        return band.hi

    def steps(self, t, band, rng):
        return np.full(t.shape, band.hi, dtype=np.int64)

    def block_total(self, t, k, band, rng):
        return k * band.hi


class UniformInBand(BandPolicy):
    """Fresh uniform integer in [lo, hi] at every step."""

    name = "uniform"
    draws_per_step = True

    def step(self, t, g, band, rng):
        return int(rng.integers(band.lo, band.hi + 1))

    def steps(self, t, band, rng):
        return rng.integers(band.lo, band.hi + 1, size=t.shape)

    def block_total(self, t, k, band, rng):
        k = np.asarray(k, dtype=np.int64)
        draws = rng.integers(band.lo, band.hi + 1, size=int(k.sum()))
        starts = np.concatenate([[0], np.cumsum(k)[:-1]])
        return np.add.reduceat(draws, starts) if draws.size else np.zeros_like(k)


class AlternatingAdversarial(BandPolicy):
    """Blocks of ``block`` steps at the top of the band, then at the bottom.

    With the default block of ceil(eps^-2) steps the process swings between
    its fastest and slowest growth on the time scale where large finite
    clusters form.
    """

    name = "alternating"

    def __init__(self, block: int | None = None):
        if block is not None and block < 1:
            raise DomainError(f"block must be >= 1, got {block}")
        self.block = block

    def _block(self, band: Band) -> int:
        if self.block is not None:
            return self.block
        return max(1, math.ceil(1.0 / band.epsilon**2 - 1e-9))

    def step(self, t, g, band, rng):
        return band.hi if (t // self._block(band)) % 2 == 0 else band.lo

    def steps(self, t, band, rng):
        return np.where((t // self._block(band)) % 2 == 0, band.hi, band.lo).astype(np.int64)

    def block_total(self, t, k, band, rng):
        b = self._block(band)

        def high_steps_before(x):
            return (x // (2 * b)) * b + np.minimum(x % (2 * b), b)

        n_hi = high_steps_before(t + k) - high_steps_before(t)
        return n_hi * band.hi + (k - n_hi) * band.lo

    def __repr__(self) -> str:
        return f"AlternatingAdversarial(block={self.block})"


POLICIES = {
    "constant-lower": ConstantLower,
    "constant-upper": ConstantUpper,
    "uniform": UniformInBand,
    "alternating": AlternatingAdversarial,
}


def make_policy(name: str) -> BandPolicy:
    try:
        return POLICIES[name]()
    except KeyError:
        raise DomainError(f"unknown policy {name!r}; choose from {sorted(POLICIES)}") from None


def _pgf(law: OffspringLaw, s: float) -> float:
    x = law.p * (1.0 - s)
    if x >= 1.0:
        return 0.0
    return math.exp(law.trials * math.log1p(-x))


def extinction_probability(law: OffspringLaw, tol: float = 1e-12, max_iter: int = 10_000_000) -> float:
    """Smallest root of s = (1 - p + p s)^N.

    Iterates the generating function from 0, which climbs monotonically to
    the smallest fixed point, then finishes with Newton steps taken from
    below (the map is convex, so they cannot overshoot).
    """
    if tol <= 0:
        raise DomainError(f"tol must be positive, got {tol}")
    N, p = law.trials, law.p
    if N == 0 or p == 0.0:
        return 1.0
    if N * p <= 1.0:
        # degenerate Z == 1 never dies; every other law with mean <= 1 does
        return 0.0 if (N == 1 and p == 1.0) else 1.0
    s = 0.0
    for _ in range(max_iter):
        nxt = _pgf(law, s)
        if abs(nxt - s) < tol:
            s = nxt
            break
        s = nxt
    else:
        raise ConvergenceError(f"no convergence within {max_iter} iterations for {law}")
    for _ in range(60):
        x = p * (1.0 - s)
        if x >= 1.0:
            break
        slope = N * p * math.exp((N - 1) * math.log1p(-x))
        if slope >= 1.0:
            break
        step = (_pgf(law, s) - s) / (1.0 - slope)
        if not step > 0.0:
            break
        s = min(s + step, 1.0)
        if step < 1e-17:
            break
    return s


def survival_from_k(q1: float, k: int) -> float:
    """Survival probability started from ``k`` independent ancestors."""
    if not 0.0 <= q1 <= 1.0:
        raise DomainError(f"q1 must lie in [0, 1], got {q1}")
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    if k == 0 or q1 == 1.0:
        return 0.0
    if q1 == 0.0:
        return 1.0
    return -math.expm1(k * math.log(q1))
