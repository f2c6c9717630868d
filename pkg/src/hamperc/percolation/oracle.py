"""Exact (c1, c2) law for H(2, 2) and H(2, 3) by enumerating edge subsets.

Component sizes are found with vectorised label propagation over all
2^E subsets at once, deliberately sharing no code with the union-find path
so the two can check each other.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ..errors import DomainError
from .graph import all_edges


@lru_cache(maxsize=None)
def subset_table(n: int) -> dict[tuple[int, int], tuple[int, ...]]:
    """``(c1, c2) -> counts[k]``: number of k-edge subsets with that outcome."""
    if n not in (2, 3):
        raise DomainError(f"exact enumeration supports n in {{2, 3}}, got {n}")
    u, v = all_edges(n)
    n_edges = u.size
    nv = n * n
    masks = np.arange(1 << n_edges, dtype=np.int64)
    bits = ((masks[:, None] >> np.arange(n_edges)) & 1).astype(bool)
    label = np.tile(np.arange(nv, dtype=np.int8), (masks.size, 1))
    while True:
        before = label.copy()
        for e in range(n_edges):
            on = bits[:, e]
            lo = np.minimum(label[on, u[e]], label[on, v[e]])
            label[on, u[e]] = lo
            label[on, v[e]] = lo
        if np.array_equal(before, label):
            break
    counts = (label[:, :, None] == np.arange(nv, dtype=np.int8)).sum(axis=1)
    counts.sort(axis=1)
    c1 = counts[:, -1]
    c2 = counts[:, -2]
    k = bits.sum(axis=1)
    table: dict[tuple[int, int], list[int]] = {}
    for a, b, kk in zip(c1.tolist(), c2.tolist(), k.tolist()):
        table.setdefault((a, b), [0] * (n_edges + 1))[kk] += 1
    return {key: tuple(val) for key, val in sorted(table.items())}


@dataclass(frozen=True)
class ExactLaw:
    n: int
    p: float | Fraction
    joint: dict[tuple[int, int], float | Fraction]

    def c1_marginal(self) -> dict[int, float | Fraction]:
        out: dict[int, float | Fraction] = {}
        for (a, _), pr in self.joint.items():
            out[a] = out.get(a, 0) + pr
        return dict(sorted(out.items()))

    def prob_c1(self, size: int):
        return self.c1_marginal().get(size, 0)


def exact_small_oracle(n: int, p) -> ExactLaw:
    """Exact joint law of (c1, c2). Pass ``p`` as a ``Fraction`` for exact
    rational output, e.g. ``P(c1 = 4) = 5/16`` at n = 2, p = 1/2."""
    if n not in (2, 3):
        raise DomainError(f"exact enumeration supports n in {{2, 3}}, got {n}")
    if not 0 <= p <= 1:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    table = subset_table(n)
    n_edges = n * n * (n - 1)
    one = Fraction(1) if isinstance(p, Fraction) else 1.0
    weights = [p**k * (one - p) ** (n_edges - k) for k in range(n_edges + 1)]
    joint = {}
    for key, counts in table.items():
        pr = sum(c * w for c, w in zip(counts, weights))
        if pr:
            joint[key] = pr
    return ExactLaw(n=n, p=p, joint=joint)


def simulate_top_two(params, trials: int, stream: np.random.Generator, chunk: int = 20_000):
    """Monte Carlo ``(c1, c2)`` arrays from the production sampler and
    union-find, ``chunk`` graphs at a time."""
    from .graph import sample_edge_batch
    from .spectrum import batch_top_two

    c1s, c2s = [], []
    done = 0
    while done < trials:
        k = min(chunk, trials - done)
        _, u, v = sample_edge_batch(params, k, stream)
        c1, c2 = batch_top_two(params.n_vertices, k, u, v)
        c1s.append(c1)
        c2s.append(c2)
        done += k
    return np.concatenate(c1s), np.concatenate(c2s)


def c1_chi_square(c1_samples: np.ndarray, law: ExactLaw, min_expected: float = 5.0):
    """Pearson test of sampled c1 values against the exact marginal.

    Cells with expected count below ``min_expected`` are pooled, smallest
    first. Returns ``(statistic, pvalue, rows)`` with rows
    ``(sizes, observed, expected)``.
    """
    from scipy import stats

    trials = len(c1_samples)
    marg = law.c1_marginal()
    values, counts = np.unique(np.asarray(c1_samples), return_counts=True)
    observed = dict(zip(values.tolist(), counts.tolist()))
    unexpected = set(observed) - set(marg)
    if unexpected:
        # an outcome the exact law forbids: reject outright
        return float("inf"), 0.0, []
    cells = sorted(((float(pr) * trials, size) for size, pr in marg.items()))
    pooled: list[list] = []
    acc_sizes, acc_exp = [], 0.0
    for exp, size in cells:
        acc_sizes.append(size)
        acc_exp += exp
        if acc_exp >= min_expected:
            pooled.append([tuple(sorted(acc_sizes)), acc_exp])
            acc_sizes, acc_exp = [], 0.0
    if acc_sizes:
        if pooled:
            pooled[-1][0] = tuple(sorted(pooled[-1][0] + tuple(acc_sizes)))
            pooled[-1][1] += acc_exp
        else:
            pooled.append([tuple(sorted(acc_sizes)), acc_exp])
    rows = [(sizes, sum(observed.get(s, 0) for s in sizes), exp) for sizes, exp in pooled]
    if len(rows) < 2:
        return 0.0, 1.0, rows
    obs = np.array([r[1] for r in rows], dtype=float)
    exp = np.array([r[2] for r in rows], dtype=float)
    exp *= obs.sum() / exp.sum()
    res = stats.chisquare(obs, exp)
    return float(res.statistic), float(res.pvalue), rows
