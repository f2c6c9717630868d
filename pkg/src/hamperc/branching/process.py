"""Galton-Watson simulation: single exploration chains, batched ensembles
and the three-chain monotone coupling.

All chains start from Q_0 = G_0 = 1 and explore one individual per step.
A run stops as *survived* the first time Q reaches ``cap`` and as *extinct*
when G hits 0 with Q still below ``cap``; an extinct run has Q = T0.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DomainError
from ..model import ModelParams
from ..percolation.explore import ExplorationTrace
from .laws import Band, BandPolicy, OffspringLaw

_BUDGET = 1 << 22


@dataclass(frozen=True, eq=False)
class ProgenyOutcome:
    extinct: bool
    total_progeny: int
    hitting_time: int | None
    steps: int
    trace: ExplorationTrace | None = None

    @property
    def survived(self) -> bool:
        return not self.extinct


def _trace(zs: list[int]) -> ExplorationTrace:
    z = np.asarray(zs, dtype=np.int64)
    q = np.concatenate([[1], 1 + np.cumsum(z)])
    g = q - np.arange(q.size)
    t0 = int(np.argmax(g == 0)) if np.any(g == 0) else None
    return ExplorationTrace(q=q, g=g, z=z, t0=t0, steps=z.size, size=int(q[-1]))


def _run_chain(next_trials, p: float, cap: int, rng: np.random.Generator, record: bool) -> ProgenyOutcome:
    if cap < 1:
        raise DomainError(f"cap must be >= 1, got {cap}")
    q = g = 1
    t = 0
    zs: list[int] = [] if record else None
    while True:
        if q >= cap:
            return ProgenyOutcome(False, q, None, t, _trace(zs) if record else None)
        if g == 0:
            return ProgenyOutcome(True, q, t, t, _trace(zs) if record else None)
        N = next_trials(t, g)
        z = int(rng.binomial(N, p)) if N and p > 0.0 else 0
        if record:
            zs.append(z)
        q += z
        g += z - 1
        t += 1


def simulate_gw(law: OffspringLaw, cap: int, stream: np.random.Generator, record: bool = False) -> ProgenyOutcome:
    """One homogeneous Bin(N, p) chain until extinction or Q >= cap."""
    N = law.trials
    return _run_chain(lambda t, g: N, law.p, cap, stream, record)


def simulate_narrow_band(
    policy: BandPolicy,
    params: ModelParams,
    cap: int,
    stream: np.random.Generator,
    record: bool = False,
) -> ProgenyOutcome:
    """One chain with N_t chosen by ``policy``; every N_t is band-checked."""
    band = Band.from_params(params)

    def next_trials(t, g):
        N = policy.step(t, g, band, stream)
        band.check(N)
        return N

    return _run_chain(next_trials, params.p, cap, stream, record)


@dataclass(frozen=True, eq=False)
class EnsembleResult:
    total_progeny: np.ndarray
    survived: np.ndarray
    hitting_time: np.ndarray  # -1 where survived

    @property
    def runs(self) -> int:
        return int(self.survived.size)

    def extinct_fraction(self) -> float:
        return float(1.0 - self.survived.mean()) if self.runs else float("nan")


def progeny_ensemble(
    source: OffspringLaw | BandPolicy,
    runs: int,
    cap: int,
    stream: np.random.Generator,
    params: ModelParams | None = None,
    budget: int = _BUDGET,
) -> EnsembleResult:
    """Outcomes of ``runs`` independent chains, simulated in blocks.

    With G active individuals, the next k <= G steps cannot empty the
    population before their end, so their offspring are drawn as one
    Bin(N_t + ... + N_{t+k-1}, p) variable. Survival, Q and T0 have the
    same joint law as under step-by-step simulation. ``budget`` bounds the
    per-step draws of policies that need them.
    """
    if cap < 1:
        raise DomainError(f"cap must be >= 1, got {cap}")
    if isinstance(source, OffspringLaw):
        p, band, N = source.p, None, source.trials
    else:
        if params is None:
            raise DomainError("a band policy needs model params")
        band, p, N = Band.from_params(params), params.p, None
    q = np.ones(runs, dtype=np.int64)
    g = np.ones(runs, dtype=np.int64)
    t = np.zeros(runs, dtype=np.int64)
    alive = np.arange(runs) if cap > 1 else np.arange(0)
    bounded = getattr(source, "draws_per_step", False)
    while alive.size:
        ga = g[alive]
        k = np.minimum(ga, max(1, budget // alive.size)) if bounded else ga
        if band is None:
            trials = k * N
        else:
            trials = source.block_total(t[alive], k, band, stream)
            if np.any(trials < k * band.lo) or np.any(trials > k * band.hi):
                raise AssertionError("block trial total outside band")
        z = stream.binomial(trials, p) if p > 0.0 else np.zeros_like(trials)
        q[alive] += z
        g[alive] += z - k
        t[alive] += k
        done = (q[alive] >= cap) | (g[alive] == 0)
        alive = alive[~done]
    survived = q >= cap
    return EnsembleResult(total_progeny=q, survived=survived, hitting_time=np.where(survived, -1, t))


@dataclass(frozen=True)
class CoupledStep:
    z_minus: int
    z: int
    z_plus: int


def coupled_steps(n_minus, n_mid, omega: int, p: float, stream: np.random.Generator):
    """Vectorised coupled offspring draws.

    Summing the first ``n_minus``, first ``n_mid`` and all ``omega`` of a
    row of Bernoulli(p) indicators is the same as adding independent
    binomial increments, which is how the three counts are built:
    z_minus ~ Bin(n_minus), z = z_minus + Bin(n_mid - n_minus),
    z_plus = z + Bin(omega - n_mid).
    """
    n_minus, n_mid = np.broadcast_arrays(
        np.asarray(n_minus, dtype=np.int64), np.asarray(n_mid, dtype=np.int64)
    )
    if np.any(n_minus < 0) or np.any(n_minus > n_mid) or np.any(n_mid > omega):
        raise DomainError("need 0 <= n_minus <= n_mid <= omega")
    zm = stream.binomial(n_minus, p)
    z = zm + stream.binomial(n_mid - n_minus, p)
    zp = z + stream.binomial(omega - n_mid, p)
    return zm, z, zp


def coupled_step(n_minus: int, n_mid: int, omega: int, p: float, stream: np.random.Generator) -> CoupledStep:
    zm, z, zp = coupled_steps(n_minus, n_mid, omega, p, stream)
    out = CoupledStep(int(zm), int(z), int(zp))
    assert 0 <= out.z_minus <= out.z <= out.z_plus <= omega
    return out


@dataclass(frozen=True, eq=False)
class TripleEnsemble:
    """Per-run results of the coupled (lower, policy, upper) chains.

    Arrays have shape ``(runs, 3)``, columns ordered lower, middle, upper.
    ``q``/``g`` hold each chain's value when it stopped (or at the last
    simulated step); ``g_checkpoint`` holds the continued G values at the
    requested checkpoint step.
    """

    q: np.ndarray
    g: np.ndarray
    stop_time: np.ndarray  # -1 while never stopped
    survived: np.ndarray
    extinct: np.ndarray
    g_checkpoint: np.ndarray | None
    steps: int
    violations: int
    traces: list | None = None


def coupled_triple_ensemble(
    policy: BandPolicy,
    params: ModelParams,
    runs: int,
    cap: int | None,
    stream: np.random.Generator,
    max_steps: int | None = None,
    checkpoint: int | None = None,
    record: bool = False,
    strict: bool = True,
) -> TripleEnsemble:
    """Run ``runs`` triples driven by shared coupled draws, step by step.

    The lower chain uses the band's bottom trial count, the middle chain the
    policy's N_t and the upper chain 2(n - 1). At every step the ordering
    Z- <= Z <= Z+ is checked, and so are Q- <= Q <= Q+ and G- <= G <= G+
    for each pair whose dominating chain has not stopped at the cap. Any
    failure is counted and, with ``strict``, raised.
    """
    band = Band.from_params(params)
    omega, p = params.omega, params.p
    cap = np.iinfo(np.int64).max if cap is None else cap
    if max_steps is None and cap == np.iinfo(np.int64).max:
        raise DomainError("need a cap or max_steps")
    qc = np.ones((runs, 3), dtype=np.int64)
    gc = np.ones((runs, 3), dtype=np.int64)
    q_stop = np.ones((runs, 3), dtype=np.int64)
    g_stop = np.ones((runs, 3), dtype=np.int64)
    stopped = np.zeros((runs, 3), dtype=bool)
    survived = np.zeros((runs, 3), dtype=bool)
    stop_time = np.full((runs, 3), -1, dtype=np.int64)
    g_ck = None if checkpoint is None else np.zeros((runs, 3), dtype=np.int64)
    if checkpoint == 0:
        g_ck[:] = 1
    rec: list[np.ndarray] = []
    violations = 0
    t = 0
    active = np.arange(runs)
    while active.size and (max_steps is None or t < max_steps):
        n_mid = policy.steps(np.full(active.size, t, dtype=np.int64), band, stream)
        band.check(n_mid)
        zm, z, zp = coupled_steps(band.lo, n_mid, omega, p, stream)
        zs = np.stack([zm, z, zp], axis=1)
        if record:
            rec.append(zs.copy())
        bad = ~((zm <= z) & (z <= zp))
        qc[active] += zs
        gc[active] += zs - 1
        t += 1
        if checkpoint is not None and t == checkpoint:
            g_ck[active] = gc[active]

        st = stopped[active]
        qa, ga = qc[active], gc[active]
        hit_cap = ~st & (qa >= cap)
        died = ~st & ~hit_cap & (ga == 0)
        newly = hit_cap | died
        qs, gs = q_stop[active], g_stop[active]
        qs[newly], gs[newly] = qa[newly], ga[newly]
        running = ~(st | newly)
        qs[running], gs[running] = qa[running], ga[running]
        q_stop[active], g_stop[active] = qs, gs
        sv = survived[active]
        sv |= hit_cap
        survived[active] = sv
        tm = stop_time[active]
        tm[newly] = t
        stop_time[active] = tm
        stopped[active] = st | newly

        for lo_c, hi_c in ((0, 1), (1, 2), (0, 2)):
            check = ~sv[:, hi_c]
            bad |= check & ((qs[:, lo_c] > qs[:, hi_c]) | (gs[:, lo_c] > gs[:, hi_c]))
        violations += int(bad.sum())
        if strict and violations:
            raise AssertionError(f"coupling order violated at step {t}")
        active = active[~stopped[active].all(axis=1)]

    # stopping order: lower dies first, upper reaches the cap first
    ext = stopped & ~survived
    order_bad = (ext[:, 1] & ~ext[:, 0]) | (ext[:, 2] & ~ext[:, 1])
    order_bad |= (survived[:, 0] & ~survived[:, 1]) | (survived[:, 1] & ~survived[:, 2])
    violations += int(order_bad.sum())
    if strict and violations:
        raise AssertionError("coupling stop order violated")

    traces = None
    if record and runs == 1:
        z_all = np.concatenate(rec, axis=0) if rec else np.zeros((0, 3), np.int64)
        traces = []
        for c in range(3):
            n_steps = stop_time[0, c] if stop_time[0, c] >= 0 else z_all.shape[0]
            traces.append(_trace(z_all[:n_steps, c].tolist()))
    return TripleEnsemble(
        q=q_stop,
        g=g_stop,
        stop_time=stop_time,
        survived=survived,
        extinct=ext,
        g_checkpoint=g_ck,
        steps=t,
        violations=violations,
        traces=traces,
    )


def simulate_coupled_triple(
    policy: BandPolicy, params: ModelParams, cap: int, stream: np.random.Generator
) -> tuple[ProgenyOutcome, ProgenyOutcome, ProgenyOutcome]:
    """Lower, policy-driven and upper chains from one set of coupled draws."""
    ens = coupled_triple_ensemble(policy, params, 1, cap, stream, record=True)
    out = []
    for c in range(3):
        tr = ens.traces[c]
        ext = bool(ens.extinct[0, c])
        out.append(
            ProgenyOutcome(
                extinct=ext,
                total_progeny=int(ens.q[0, c]),
                hitting_time=int(ens.stop_time[0, c]) if ext else None,
                steps=tr.steps,
                trace=tr,
            )
        )
    return tuple(out)
