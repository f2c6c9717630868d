"""Model parameters, closed-form bounds and regime diagnostics for H(2, n).

Everything here is a pure function of its arguments.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, RegimeError

# Defaults for turning "eps >> n^{-2/3} (ln n)^{1/3}" and "eps << 1" into flags.
REGIME_RATIO_LOW = 4.0
REGIME_EPS_HIGH = 0.5

_SNAP = 1e-9


def snap_floor(x: float) -> int:
    """floor(x), tolerant of binary round-off in decimal inputs (0.1**2 etc.)."""
    return math.floor(x + _SNAP * max(1.0, abs(x)))


def snap_ceil(x: float) -> int:
    return math.ceil(x - _SNAP * max(1.0, abs(x)))


def snap_value(x: float) -> float:
    """x, or the nearest integer when x is within round-off of one."""
    r = round(x)
    return float(r) if abs(x - r) <= _SNAP * max(1.0, abs(x)) else x


@dataclass(frozen=True)
class ModelParams:
    n: int
    epsilon: float
    omega: int
    p_c: float
    p: float
    n_vertices: int

    @property
    def n_edges(self) -> int:
        """Number of edges of H(2, n): 2n lines, each a K_n."""
        return self.n * self.n * (self.n - 1)

    @property
    def expected_degree(self) -> float:
        return self.p * self.omega

    def giant_target(self) -> float:
        """Leading-order size of the largest component, 2 eps n^2."""
        return 2.0 * self.epsilon * self.n_vertices


@dataclass(frozen=True)
class RegimeReport:
    ratio_lower: float
    ratio_upper: float
    in_theorem_regime: bool
    notes: str


def derive_params(n: int, epsilon: float) -> ModelParams:
    """Build the parameter bundle for percolation at p = (1 + eps) / (2(n - 1)).

    ``epsilon <= 0`` is accepted for exploratory runs; operations that need
    the supercritical regime check for themselves. ``p = 0`` (eps = -1) is
    allowed as a degenerate case.
    """
    if isinstance(n, bool) or int(n) != n:
        raise DomainError(f"n must be an integer, got {n!r}")
    n = int(n)
    if n < 2:
        raise DomainError(f"n must be >= 2, got {n}")
    epsilon = float(epsilon)
    if not math.isfinite(epsilon):
        raise DomainError(f"epsilon must be finite, got {epsilon}")
    omega = 2 * (n - 1)
    p = (1.0 + epsilon) / omega
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"edge probability (1+eps)/Omega = {p} outside [0, 1]")
    return ModelParams(
        n=n,
        epsilon=epsilon,
        omega=omega,
        p_c=1.0 / omega,
        p=p,
        n_vertices=n * n,
    )


def params_at(n: int, p: float) -> ModelParams:
    """Parameters for an edge probability given directly; eps = p Omega - 1
    and ``p`` is kept exactly as passed."""
    base = derive_params(n, float(p) * 2 * (int(n) - 1) - 1.0)
    return ModelParams(base.n, base.epsilon, base.omega, base.p_c, float(p), base.n_vertices)


def second_component_bound(params: ModelParams) -> float:
    """2^8 eps^-2 ln(n^2 eps^3), the whp ceiling on the second component."""
    eps = params.epsilon
    if eps <= 0:
        raise RegimeError(f"bound needs eps > 0, got {eps}")
    arg = params.n_vertices * eps**3
    # n^2 eps^3 == 1 up to round-off (n=1000, eps=0.01) is the vacuous boundary
    if arg <= 1.0 or math.isclose(arg, 1.0, rel_tol=1e-12):
        raise RegimeError(f"n^2 eps^3 = {arg:.6g} <= 1: bound is vacuous")
    return 256.0 / (eps * eps) * math.log(arg)


def binomial_lower_tail_bound(k: int, p: float, t: float) -> float:
    """Upper bound on P(X <= kp - t) for X ~ Bin(k, p):

        exp(-t^2 / (2 (kp + t/3)))
    """
    if int(k) != k or k < 1:
        raise DomainError(f"k must be a positive integer, got {k!r}")
    if not 0.0 < p < 1.0:
        raise DomainError(f"p must lie in (0, 1), got {p}")
    if not t >= 0.0:
        raise DomainError(f"t must be >= 0, got {t}")
    if math.isinf(t):
        return 0.0
    mean = k * p
    return math.exp(-(t * t) / (2.0 * (mean + t / 3.0)))


def regime_check(
    params: ModelParams,
    ratio_low: float = REGIME_RATIO_LOW,
    eps_high: float = REGIME_EPS_HIGH,
) -> RegimeReport:
    """Flag whether (n, eps) sits in the window where the second-component
    bound is claimed. Never raises on eps <= 0; it only reports."""
    n, eps = params.n, params.epsilon
    scale = n ** (-2.0 / 3.0) * math.log(n) ** (1.0 / 3.0)
    ratio_lower = eps / scale
    notes = []
    if eps <= 0:
        notes.append("eps <= 0: not supercritical")
    if ratio_lower < ratio_low:
        notes.append(f"eps / (n^-2/3 ln^1/3 n) = {ratio_lower:.4g} < {ratio_low:g}")
    if eps > eps_high:
        notes.append(f"eps = {eps:g} > {eps_high:g}: not small")
    ok = eps > 0 and ratio_lower >= ratio_low and eps <= eps_high
    return RegimeReport(
        ratio_lower=ratio_lower,
        ratio_upper=eps,
        in_theorem_regime=ok,
        notes="; ".join(notes) if notes else "ok",
    )
