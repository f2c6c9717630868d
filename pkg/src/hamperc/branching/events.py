"""Large-but-finite progeny: path events at the checkpoint and Monte Carlo
estimates of P(alpha eps^-2 <= Q < infinity)."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import ConfigError, DomainError
from ..model import ModelParams, snap_floor, snap_value
from ..percolation.explore import ExplorationTrace
from .laws import Band, BandPolicy, OffspringLaw
from .process import EnsembleResult, coupled_triple_ensemble, progeny_ensemble

DEFAULT_ENVELOPE_C = 3.0
MIN_CAP = 100_000


class PathLabel(enum.Enum):
    E = "E"
    E_TILDE = "E~"
    NEITHER = "neither"


@dataclass(frozen=True)
class PathClass:
    label: PathLabel
    g_at_checkpoint: int
    checkpoint: int
    threshold: float


def checkpoint_step(alpha: float, eps: float) -> int:
    return snap_floor(alpha / (2.0 * eps * eps))


def active_threshold(alpha: float, eps: float) -> float:
    return alpha / (16.0 * eps)


def classify_path(trace: ExplorationTrace, alpha: float, params: ModelParams) -> PathClass:
    """Label a chain by whether it is still alive at step
    floor(alpha eps^-2 / 2), and if so whether its active count there is
    below alpha eps^-1 / 16 (``E``) or at least that (``E~``)."""
    eps = params.epsilon
    if eps <= 0:
        raise DomainError("classification needs eps > 0")
    ck = checkpoint_step(alpha, eps)
    thr = active_threshold(alpha, eps)
    if trace.t0 is not None and trace.t0 <= ck:
        return PathClass(PathLabel.NEITHER, 0, ck, thr)
    if trace.g.size <= ck:
        raise DomainError(f"trace has {trace.g.size - 1} steps, checkpoint is {ck}")
    g = int(trace.g[ck])
    label = PathLabel.E if g < thr else PathLabel.E_TILDE
    return PathClass(label, g, ck, thr)


@dataclass(frozen=True)
class EventFrequencies:
    runs: int
    e: int
    e_tilde: int
    neither: int
    a_and_b: int
    containment_failures: int

    def rate(self, count: int) -> tuple[float, float]:
        est = count / self.runs
        return est, math.sqrt(est * (1.0 - est) / self.runs)


def event_frequencies(
    policy: BandPolicy, params: ModelParams, alpha: float, runs: int, stream: np.random.Generator
) -> EventFrequencies:
    """Count E / E~ over coupled runs stopped at the checkpoint.

    Also checks pathwise that E implies A and B, where A = "the upper chain
    is alive through the checkpoint" and B = "the continued lower chain has
    fewer than the threshold active at the checkpoint".
    """
    eps = params.epsilon
    ck = checkpoint_step(alpha, eps)
    thr = active_threshold(alpha, eps)
    ens = coupled_triple_ensemble(policy, params, runs, None, stream, max_steps=ck, checkpoint=ck)
    alive = ~ens.extinct
    g_mid = ens.g_checkpoint[:, 1]
    e = alive[:, 1] & (g_mid < thr)
    e_tilde = alive[:, 1] & (g_mid >= thr)
    a = alive[:, 2]
    b = ens.g_checkpoint[:, 0] < thr
    return EventFrequencies(
        runs=runs,
        e=int(e.sum()),
        e_tilde=int(e_tilde.sum()),
        neither=int((~alive[:, 1]).sum()),
        a_and_b=int((a & b).sum()),
        containment_failures=int((e & ~(a & b)).sum()),
    )


@dataclass(frozen=True)
class ProgenyEstimate:
    alpha: float
    threshold: float
    cap: int
    trials: int
    hits: int
    estimate: float
    stderr: float
    envelope: float

    def within_envelope(self, sigmas: float = 3.0) -> bool:
        return self.estimate <= self.envelope + sigmas * self.stderr


def default_cap(alpha_max: float, eps: float) -> int:
    return max(math.ceil(50.0 * alpha_max / (eps * eps)), MIN_CAP)


def estimate_large_finite_progeny(
    source: BandPolicy | OffspringLaw,
    params: ModelParams,
    alpha: float | Sequence[float],
    trials: int,
    stream: np.random.Generator,
    cap: int | None = None,
    envelope_c: float = DEFAULT_ENVELOPE_C,
):
    """Fraction of runs with alpha eps^-2 <= Q < cap, where Q >= cap stands
    in for infinite progeny.

    A sequence of alphas is scored on the same runs (so the estimates are
    nested) and returns a list. ``envelope`` is C eps exp(-alpha / 2^8).
    """
    alphas = [float(alpha)] if np.isscalar(alpha) else [float(a) for a in alpha]
    eps = params.epsilon
    if eps == 0:
        raise DomainError("eps must be nonzero")
    if cap is None:
        cap = default_cap(max(alphas), abs(eps))
    for a in alphas:
        lo = snap_value(a / (eps * eps))
        if cap <= lo:
            raise ConfigError(f"cap {cap} <= alpha eps^-2 = {lo:.6g} for alpha = {a}")
    if isinstance(source, BandPolicy):
        res = progeny_ensemble(source, trials, cap, stream, params=params)
    else:
        res = progeny_ensemble(source, trials, cap, stream)
    out = score_progeny(res, params, alphas, cap, envelope_c)
    return out[0] if np.isscalar(alpha) else out


def score_progeny(
    res: EnsembleResult,
    params: ModelParams,
    alphas: Sequence[float],
    cap: int,
    envelope_c: float = DEFAULT_ENVELOPE_C,
) -> list[ProgenyEstimate]:
    """Per-alpha large-finite-progeny estimates from one ensemble."""
    eps = params.epsilon
    q, surv = res.total_progeny, res.survived
    trials = res.runs
    out = []
    for a in alphas:
        lo = snap_value(a / (eps * eps))
        if cap <= lo:
            raise ConfigError(f"cap {cap} <= alpha eps^-2 = {lo:.6g} for alpha = {a}")
        hits = int(np.count_nonzero(~surv & (q >= lo)))
        est = hits / trials
        out.append(
            ProgenyEstimate(
                alpha=float(a),
                threshold=lo,
                cap=int(cap),
                trials=trials,
                hits=hits,
                estimate=est,
                stderr=math.sqrt(est * (1.0 - est) / trials),
                envelope=envelope_c * eps * math.exp(-a / 256.0),
            )
        )
    return out
