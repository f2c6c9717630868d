"""Seeded, splittable randomness and the exact discrete samplers built on it.

Every stream is a Philox-4x64 counter-based generator whose 128-bit key is
``master_seed | stream_id << 64`` (each reduced mod 2**64). The mapping from
``(master_seed, stream_id)`` to key is therefore injective on 64-bit inputs,
and the output sequence depends only on numpy's published Philox constants.
"""
from __future__ import annotations

import numpy as np

from .errors import DomainError

_MASK64 = (1 << 64) - 1

# above this fraction of the pair space, rejection wastes draws
DENSE_FRACTION = 1.0 / 8.0


def stream_key(master_seed: int, stream_id: int) -> int:
    return (int(master_seed) & _MASK64) | ((int(stream_id) & _MASK64) << 64)


def derive_stream(master_seed: int, stream_id: int = 0) -> np.random.Generator:
    """Independent generator for ``(master_seed, stream_id)``."""
    return np.random.Generator(np.random.Philox(key=stream_key(master_seed, stream_id)))


def sample_binomial(N: int, p: float, stream: np.random.Generator) -> int:
    """One exact Bin(N, p) draw.

    numpy uses inversion when N*min(p, 1-p) < 30 and the BTPE
    accept-reject scheme above that; both are exact.
    """
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"p must lie in [0, 1], got {p}")
    if N < 0:
        raise DomainError(f"N must be >= 0, got {N}")
    if N == 0 or p == 0.0:
        return 0
    if p == 1.0:
        return int(N)
    return int(stream.binomial(N, p))


def pair_count(K: int) -> int:
    return K * (K - 1) // 2


def pair_from_index(r):
    """Bijection from pair index ``r`` to 0-based pairs ``a < b``.

    Pairs are ordered by ``b`` then ``a``: index ``b(b-1)/2 + a``, so the
    first ``K(K-1)/2`` indices cover exactly the pairs inside ``range(K)``.
    Works on scalars and integer arrays.
    """
    r = np.asarray(r, dtype=np.int64)
    b = ((1 + np.sqrt(1 + 8 * r.astype(np.float64))) // 2).astype(np.int64)
    # repair float rounding for very large r
    b -= (b * (b - 1) // 2 > r).astype(np.int64)
    b += ((b + 1) * b // 2 <= r).astype(np.int64)
    a = r - b * (b - 1) // 2
    return a, b


def index_from_pair(a, b):
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    return hi * (hi - 1) // 2 + lo


def _floyd(m: int, total: int, stream: np.random.Generator) -> list[int]:
    chosen: dict[int, None] = {}
    for j in range(total - m, total):
        t = int(stream.integers(0, j + 1))
        chosen[j if t in chosen else t] = None
    return list(chosen)


def _rejection(m: int, total: int, stream: np.random.Generator) -> np.ndarray:
    seen: set[int] = set()
    out: list[int] = []
    while len(out) < m:
        for r in stream.integers(0, total, size=m - len(out)).tolist():
            if r not in seen:
                seen.add(r)
                out.append(r)
    return np.asarray(out, dtype=np.int64)


def sample_subset(m: int, total: int, stream: np.random.Generator) -> np.ndarray:
    """Uniform m-subset of ``range(total)`` as an int64 array (unsorted)."""
    if m < 0 or m > total:
        raise DomainError(f"cannot choose {m} distinct items out of {total}")
    if m == 0:
        return np.empty(0, dtype=np.int64)
    if m > total * DENSE_FRACTION:
        return np.asarray(_floyd(m, total, stream), dtype=np.int64)
    return _rejection(m, total, stream)


def sample_distinct_pairs(m: int, K: int, stream: np.random.Generator) -> list[tuple[int, int]]:
    """``m`` distinct unordered pairs from ``{1..K}``, uniform over m-subsets."""
    total = pair_count(K)
    if m < 0 or m > total:
        raise DomainError(f"m={m} exceeds the {total} pairs available for K={K}")
    idx = sample_subset(m, total, stream)
    a, b = pair_from_index(idx)
    pairs = [(int(x) + 1, int(y) + 1) for x, y in zip(a, b)]
    assert len(set(pairs)) == m and all(1 <= x < y <= K for x, y in pairs)
    return pairs


def sample_line_subsets(
    counts: np.ndarray, total: int, stream: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """Independent uniform subsets for many lines at once.

    Line ``l`` receives ``counts[l]`` distinct indices from ``range(total)``.
    Returns ``(line, index)`` arrays sorted by ``(line, index)``.
    """
    counts = np.asarray(counts, dtype=np.int64)
    n_lines = counts.size
    if counts.size and (counts.min() < 0 or counts.max() > total):
        raise DomainError("line count outside [0, total]")
    m_total = int(counts.sum())
    if m_total == 0:
        return np.empty(0, np.int64), np.empty(0, np.int64)

    if counts.max() <= total * DENSE_FRACTION:
        # draw with replacement, drop duplicates, top up the deficit; the
        # result is exchangeable over the ground set hence uniform
        line = np.repeat(np.arange(n_lines, dtype=np.int64), counts)
        keys = np.unique(line * total + stream.integers(0, total, size=m_total))
        while True:
            have = np.bincount(keys // total, minlength=n_lines)
            deficit = counts - have
            if not deficit.any():
                break
            extra_line = np.repeat(np.arange(n_lines, dtype=np.int64), deficit)
            extra = extra_line * total + stream.integers(0, total, size=extra_line.size)
            keys = np.union1d(keys, extra)
        return keys // total, keys % total

    if n_lines * total <= 4_000_000:
        # random keys: the first counts[l] entries of a uniform permutation
        order = np.argsort(stream.random((n_lines, total)), axis=1, kind="stable")
        mask = np.arange(total)[None, :] < counts[:, None]
        line = np.nonzero(mask)[0].astype(np.int64)
        idx = order[mask].astype(np.int64)
    else:
        parts = [sample_subset(int(c), total, stream) for c in counts]
        line = np.repeat(np.arange(n_lines, dtype=np.int64), counts)
        idx = np.concatenate(parts)
    keys = np.sort(line * total + idx)
    return keys // total, keys % total
