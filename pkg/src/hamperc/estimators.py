"""Monte Carlo estimators tying sampled percolation clusters to their
branching-process predictions, plus per-trial measurement records.

Cluster probes always start from vertex (1, 1); H(2, n) is vertex-transitive
so nothing is lost. Trial ``k`` of an estimator draws from
``derive_stream(master_seed, stream_base + k)``.
"""
from __future__ import annotations

import math
import time
import warnings
from dataclasses import asdict, dataclass, replace

import numpy as np

from .branching.laws import OffspringLaw
from .branching.process import progeny_ensemble
from .errors import ConfigError, DomainError, RegimeError
from .model import (
    REGIME_EPS_HIGH,
    REGIME_RATIO_LOW,
    ModelParams,
    regime_check,
    second_component_bound,
    snap_ceil,
    snap_floor,
    snap_value,
)
from .percolation.explore import explore_lazy
from .percolation.graph import Vertex, sample_open_graph
from .percolation.spectrum import component_spectrum, middle_component_count, z_geq
from .rng import derive_stream

PROBE = Vertex(1, 1)
DEFAULT_TAIL_MULTIPLIER = 10.0
DEFAULT_DELTA = 0.25
# unquantified constants, our defaults
DEFAULT_MIDDLE_C = 3.0
DEFAULT_DOMINATION_C = 1.0

ON_VIOLATION = ("raise", "warn", "ignore")


def _stderr(est: float, trials: int) -> float:
    return math.sqrt(est * (1.0 - est) / trials) if trials else float("nan")


def require_regime(
    params: ModelParams,
    on_violation: str = "raise",
    ratio_low: float = REGIME_RATIO_LOW,
    eps_high: float = REGIME_EPS_HIGH,
) -> bool:
    """Apply the regime gate. Returns whether params are in the regime.

    ``on_violation`` picks what happens outside it: ``raise`` a
    RegimeError, ``warn`` (RuntimeWarning) or ``ignore``.
    """
    if on_violation not in ON_VIOLATION:
        raise ConfigError(f"on_violation must be one of {ON_VIOLATION}, got {on_violation!r}")
    rep = regime_check(params, ratio_low, eps_high)
    if not rep.in_theorem_regime:
        msg = f"(n={params.n}, eps={params.epsilon:g}) outside theorem regime: {rep.notes}"
        if on_violation == "raise":
            raise RegimeError(msg)
        if on_violation == "warn":
            warnings.warn(msg, RuntimeWarning, stacklevel=3)
    return rep.in_theorem_regime


@dataclass(frozen=True)
class TailEstimate:
    trials: int
    hits: int
    estimate: float
    stderr: float
    target: float
    threshold: int


def estimate_cluster_tail(
    params: ModelParams,
    N: int,
    trials: int,
    master_seed: int,
    on_violation: str = "raise",
    probes_per_graph: int = 1,
    multiplier: float = DEFAULT_TAIL_MULTIPLIER,
    stream_base: int = 0,
) -> TailEstimate:
    """Fraction of trials with |Q(1,1)| >= N; the target is 2 eps.

    With one probe per graph each trial is a lazy exploration stopped as
    soon as Q reaches N, which has the law of exploring a fresh graph.
    ``probes_per_graph > 1`` samples whole graphs and probes that many
    uniformly chosen vertices of each (faster, correlated); ``trials`` then
    counts probes.

    The regime gate and the ``N >= multiplier * eps^-2`` check are skipped
    with ``on_violation="ignore"`` (exploratory mode).
    """
    if trials < 1:
        raise ConfigError(f"trials must be >= 1, got {trials}")
    if N < 1:
        raise DomainError(f"N must be >= 1, got {N}")
    if probes_per_graph < 1:
        raise ConfigError(f"probes_per_graph must be >= 1, got {probes_per_graph}")
    require_regime(params, on_violation)
    if on_violation != "ignore" and params.epsilon > 0:
        need = snap_ceil(multiplier / params.epsilon**2)
        if N < need:
            raise ConfigError(f"N = {N} below {multiplier:g} eps^-2 = {need}")
    hits = 0
    if probes_per_graph == 1:
        for k in range(trials):
            s = derive_stream(master_seed, stream_base + k)
            tr = explore_lazy(params, PROBE, s, stop_at=N)
            hits += tr.size >= N
    else:
        done = 0
        k = 0
        while done < trials:
            s = derive_stream(master_seed, stream_base + k)
            spectrum = component_spectrum(sample_open_graph(params, s))
            m = min(probes_per_graph, trials - done)
            probes = s.integers(0, params.n_vertices, size=m)
            hits += int(np.count_nonzero(spectrum.label_sizes[spectrum.component_of[probes]] >= N))
            done += m
            k += 1
    est = hits / trials
    return TailEstimate(
        trials=trials,
        hits=int(hits),
        estimate=est,
        stderr=_stderr(est, trials),
        target=2.0 * params.epsilon,
        threshold=int(N),
    )


@dataclass(frozen=True)
class ConcentrationStats:
    samples: np.ndarray
    mean: float
    variance: float
    max_rel_deviation: float  # max |Z - mean| / (eps n^2)

    def within(self, delta: float = DEFAULT_DELTA) -> bool:
        return self.max_rel_deviation <= delta


def estimate_z_geq_concentration(
    params: ModelParams, N: int, trials: int, master_seed: int, stream_base: int = 0
) -> ConcentrationStats:
    """Sample statistics of Z_{>=N} over independent graphs."""
    if trials < 1:
        raise ConfigError(f"trials must be >= 1, got {trials}")
    vals = np.empty(trials, dtype=np.int64)
    for k in range(trials):
        g = sample_open_graph(params, derive_stream(master_seed, stream_base + k))
        vals[k] = z_geq(component_spectrum(g), N)
    mean = float(vals.mean())
    scale = abs(params.epsilon) * params.n_vertices
    dev = float(np.abs(vals - mean).max())
    return ConcentrationStats(
        samples=vals,
        mean=mean,
        variance=float(vals.var()),
        max_rel_deviation=dev / scale if scale else (0.0 if dev == 0 else math.inf),
    )


@dataclass(frozen=True)
class MiddleGroundEstimate:
    alpha: float
    lower: float
    upper: float
    trials: int
    hits: int
    estimate: float
    stderr: float
    bound: float  # C (eps e^{-alpha/2^8} + n^-6)


def middle_window(params: ModelParams, alpha: float) -> tuple[float, float]:
    """[alpha eps^-2, eps n^2 / 5)."""
    eps = params.epsilon
    if eps <= 0:
        raise DomainError("window needs eps > 0")
    return snap_value(alpha / (eps * eps)), snap_value(eps * params.n_vertices / 5.0)


def no_middle_ground_rate(
    params: ModelParams,
    alpha: float,
    trials: int,
    master_seed: int,
    lemma_c: float = DEFAULT_MIDDLE_C,
    stream_base: int = 0,
) -> MiddleGroundEstimate:
    """Frequency of alpha eps^-2 <= |Q(1,1)| < eps n^2 / 5 over fresh
    graphs, via lazy explorations stopped at the window's top."""
    if trials < 1:
        raise ConfigError(f"trials must be >= 1, got {trials}")
    lo, hi = middle_window(params, alpha)
    if lo >= hi:
        raise ConfigError(f"empty window [{lo:.6g}, {hi:.6g})")
    stop = snap_ceil(hi)
    hits = 0
    for k in range(trials):
        tr = explore_lazy(params, PROBE, derive_stream(master_seed, stream_base + k), stop_at=stop)
        hits += tr.completed and lo <= tr.size < hi
    est = hits / trials
    eps = params.epsilon
    return MiddleGroundEstimate(
        alpha=float(alpha),
        lower=lo,
        upper=hi,
        trials=trials,
        hits=int(hits),
        estimate=est,
        stderr=_stderr(est, trials),
        bound=lemma_c * (eps * math.exp(-alpha / 256.0) + float(params.n) ** -6),
    )


@dataclass(frozen=True)
class DominationParams:
    ell: int
    c_log: float
    omega_prime: int
    degree_ok: bool  # omega' >= 2(n-1) - eps n / 2

    @classmethod
    def from_params(cls, params: ModelParams, ell: int, c_log: float = DEFAULT_DOMINATION_C):
        """Omega' = Omega - (5/2) max(ell / n, C ln n), floored to an integer."""
        n = params.n
        cut = 2.5 * max(ell / n, c_log * math.log(n))
        op = max(0, snap_floor(params.omega - cut))
        return cls(
            ell=int(ell),
            c_log=float(c_log),
            omega_prime=op,
            degree_ok=op >= params.omega - params.epsilon * n / 2.0,
        )


@dataclass(frozen=True)
class DominationReport:
    ell: int
    cluster: float
    cluster_se: float
    upper: float
    upper_se: float
    lower: float
    lower_se: float
    omega_prime: int
    upper_ok: bool
    lower_ok: bool
    window_ok: bool  # ell <= eps n^2 / 5

    @property
    def holds(self) -> bool:
        return self.upper_ok and self.lower_ok


def check_domination(
    params: ModelParams,
    ell: int,
    trials: int,
    master_seed: int,
    c_log: float = DEFAULT_DOMINATION_C,
    sigmas: float = 3.0,
) -> DominationReport:
    """Compare P(|Q(1,1)| >= ell) against P(Q >= ell) for Bin(Omega, p) and
    Bin(Omega', p) progeny, each from ``trials`` runs on its own streams.

    A bracket counts as holding when it is not violated by more than
    ``sigmas`` joint standard errors.
    """
    if ell < 1:
        raise DomainError(f"ell must be >= 1, got {ell}")
    dp = DominationParams.from_params(params, ell, c_log)
    hits = 0
    for k in range(trials):
        tr = explore_lazy(params, PROBE, derive_stream(master_seed, k), stop_at=ell)
        hits += tr.size >= ell
    cl = hits / trials
    up = progeny_ensemble(OffspringLaw(params.omega, params.p), trials, ell, derive_stream(master_seed, 1 << 40))
    lo = progeny_ensemble(OffspringLaw(dp.omega_prime, params.p), trials, ell, derive_stream(master_seed, 2 << 40))
    pu, pl = float(up.survived.mean()), float(lo.survived.mean())
    se_c, se_u, se_l = _stderr(cl, trials), _stderr(pu, trials), _stderr(pl, trials)
    return DominationReport(
        ell=int(ell),
        cluster=cl,
        cluster_se=se_c,
        upper=pu,
        upper_se=se_u,
        lower=pl,
        lower_se=se_l,
        omega_prime=dp.omega_prime,
        upper_ok=cl <= pu + sigmas * math.hypot(se_c, se_u),
        lower_ok=cl >= pl - sigmas * math.hypot(se_c, se_l),
        window_ok=ell <= params.epsilon * params.n_vertices / 5.0,
    )


@dataclass(frozen=True)
class TrialRecord:
    master_seed: int
    stream_id: int
    trial: int
    n: int
    epsilon: float
    edge_count: int
    c1: int
    c2: int
    probe_size: int  # |Q(1,1)|
    z_geq: int  # vertices in components of size >= window lower edge
    middle_count: int  # components with size in [window_lo, window_hi)
    giant_rel_error: float
    theorem_ok: bool | None  # None when n^2 eps^3 <= 1
    margin: float | None
    runtime: float | None  # seconds; None when timing is off

    def as_row(self) -> dict:
        return asdict(self)


def theorem_check(record: TrialRecord, params: ModelParams) -> tuple[bool, float]:
    """(c2 <= bound, c2 / bound). Raises RegimeError when n^2 eps^3 <= 1."""
    bound = second_component_bound(params)
    return record.c2 <= bound, record.c2 / bound


def run_trial(
    params: ModelParams,
    master_seed: int,
    stream_id: int,
    window: tuple[float, float],
    trial: int = 0,
) -> TrialRecord:
    """Sample one graph and measure everything a sweep row needs."""
    t_start = time.perf_counter()
    g = sample_open_graph(params, derive_stream(master_seed, stream_id), seed=master_seed)
    spectrum = component_spectrum(g)
    lo, hi = window
    target = params.giant_target()
    rec = TrialRecord(
        master_seed=master_seed,
        stream_id=stream_id,
        trial=trial,
        n=params.n,
        epsilon=params.epsilon,
        edge_count=g.edge_count,
        c1=spectrum.c1,
        c2=spectrum.c2,
        probe_size=spectrum.size_of(PROBE.index(params.n)),
        z_geq=z_geq(spectrum, max(1, snap_ceil(lo))),
        middle_count=middle_component_count(spectrum, lo, hi),
        giant_rel_error=abs(spectrum.c1 - target) / target if target > 0 else math.nan,
        theorem_ok=None,
        margin=None,
        runtime=0.0,
    )
    try:
        ok, margin = theorem_check(rec, params)
    except RegimeError:
        ok, margin = None, None
    return replace(rec, theorem_ok=ok, margin=margin, runtime=time.perf_counter() - t_start)
