from collections import Counter
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from hamperc.errors import DomainError
from hamperc.rng import (
    derive_stream,
    index_from_pair,
    pair_count,
    pair_from_index,
    sample_binomial,
    sample_distinct_pairs,
    sample_line_subsets,
    sample_subset,
    stream_key,
)

P_MIN = 1e-6


def binomial_pmf(N, p):
    """pmf by the ratio recurrence P(k+1) = P(k) (N-k)/(k+1) p/(1-p)."""
    out = [(1 - p) ** N]
    for k in range(N):
        out.append(out[-1] * (N - k) / (k + 1) * p / (1 - p))
    return np.array(out)


def pooled_chisquare(observed, expected, min_expected=5.0):
    obs, exp = [], []
    acc_o = acc_e = 0.0
    for o, e in zip(observed, expected):
        acc_o += o
        acc_e += e
        if acc_e >= min_expected:
            obs.append(acc_o)
            exp.append(acc_e)
            acc_o = acc_e = 0.0
    obs[-1] += acc_o
    exp[-1] += acc_e
    exp = np.array(exp) * (sum(obs) / sum(exp))
    return stats.chisquare(obs, exp).pvalue


def test_determinism():
    a = derive_stream(42, 7).integers(0, 2**62, size=1000)
    b = derive_stream(42, 7).integers(0, 2**62, size=1000)
    assert np.array_equal(a, b)


def test_distinct_stream_ids():
    a = derive_stream(42, 7).integers(0, 2**62, size=1000)
    b = derive_stream(42, 8).integers(0, 2**62, size=1000)
    c = derive_stream(43, 7).integers(0, 2**62, size=1000)
    assert not np.array_equal(a, b) and not np.array_equal(a, c)


def test_key_injective_on_64_bit_inputs():
    assert stream_key(1, 0) != stream_key(0, 1)
    assert stream_key(2**64 - 1, 2**64 - 1) == (1 << 128) - 1


def test_pinned_first_draws():
    # frozen output: guards against silent generator or key changes
    draws = derive_stream(2026, 3).integers(0, 1000, size=5).tolist()
    assert draws == [384, 55, 147, 915, 927]


def test_uniformity_mod_64():
    x = derive_stream(1, 1).integers(0, 2**63, size=10**6) % 64
    counts = np.bincount(x, minlength=64)
    assert stats.chisquare(counts).pvalue > P_MIN


def test_streams_uncorrelated():
    a = derive_stream(5, 0).random(10**5)
    b = derive_stream(5, 1).random(10**5)
    r = np.corrcoef(a, b)[0, 1]
    assert abs(r) < 4 / np.sqrt(10**5)


def test_binomial_trivial(stream):
    assert sample_binomial(0, 0.3, stream) == 0
    assert sample_binomial(17, 1.0, stream) == 17
    assert sample_binomial(17, 0.0, stream) == 0


def test_binomial_domain(stream):
    with pytest.raises(DomainError):
        sample_binomial(5, 1.2, stream)
    with pytest.raises(DomainError):
        sample_binomial(-1, 0.5, stream)


def test_binomial_pmf_chisquare():
    s = derive_stream(11, 0)
    draws = np.fromiter((sample_binomial(50, 0.1, s) for _ in range(10**6)), dtype=np.int64, count=10**6)
    counts = np.bincount(draws, minlength=51)
    expected = binomial_pmf(50, 0.1) * draws.size
    assert pooled_chisquare(counts, expected) > P_MIN


@pytest.mark.parametrize("N,p", [(1000, 0.3), (200, 0.9), (100000, 1e-3)])
def test_binomial_pmf_chisquare_btpe(N, p):
    # large N*p exercises the accept-reject branch
    draws = derive_stream(12, N).binomial(N, p, size=2 * 10**5)
    lo, hi = draws.min(), draws.max()
    pmf = stats.binom.pmf(np.arange(lo, hi + 1), N, p)
    counts = np.bincount(draws - lo, minlength=hi - lo + 1)
    assert pooled_chisquare(counts, pmf * draws.size) > P_MIN


@pytest.mark.parametrize("N,p", [(3, 0.5), (50, 0.1), (1998, 1.1 / 1998), (10**4, 0.37), (10**6, 0.999)])
def test_binomial_moments(N, p):
    m = 10**6
    x = derive_stream(13, N).binomial(N, p, size=m).astype(float)
    q = 1 - p
    var = N * p * q
    mu4 = var * (1 + 3 * (N - 2) * p * q)
    assert abs(x.mean() - N * p) <= 4 * np.sqrt(var / m)
    assert abs(x.var() - var) <= 4 * np.sqrt((mu4 - var**2) / m)


def test_pairs_trivial(stream):
    assert sample_distinct_pairs(0, 5, stream) == []
    assert sorted(sample_distinct_pairs(6, 4, stream)) == [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]
    with pytest.raises(DomainError):
        sample_distinct_pairs(7, 4, stream)


def test_single_pair_uniform():
    s = derive_stream(14, 0)
    trials = 3 * 10**5
    c = Counter(sample_distinct_pairs(1, 3, s)[0] for _ in range(trials))
    sigma = np.sqrt(trials * (1 / 3) * (2 / 3))
    assert set(c) == {(1, 2), (1, 3), (2, 3)}
    for v in c.values():
        assert abs(v - trials / 3) <= 3 * sigma


@given(st.integers(2, 60), st.data())
@settings(max_examples=200, deadline=None)
def test_pairs_distinct_in_range(K, data):
    total = pair_count(K)
    m = data.draw(st.integers(0, total))
    pairs = sample_distinct_pairs(m, K, derive_stream(data.draw(st.integers(0, 2**32)), 0))
    assert len(pairs) == m == len(set(pairs))
    assert all(1 <= a < b <= K for a, b in pairs)


@pytest.mark.parametrize("m", [1, 2, 3])
def test_subset_law_uniform_both_branches(m):
    # every m >= 1 exceeds 6/8 of the 6 items, so these go through Floyd
    s = derive_stream(15, m)
    total = 6
    trials = 60000
    c = Counter(tuple(sorted(sample_subset(m, total, s).tolist())) for _ in range(trials))
    n_sub = comb(total, m)
    assert len(c) == n_sub
    assert stats.chisquare(list(c.values())).pvalue > P_MIN


@given(st.integers(0, 2**40))
def test_pair_index_roundtrip(r):
    a, b = pair_from_index(r)
    assert 0 <= a < b
    assert int(index_from_pair(a, b)) == r
    assert int(index_from_pair(b, a)) == r


def test_pair_index_enumeration():
    a, b = pair_from_index(np.arange(pair_count(7)))
    assert sorted(zip(a.tolist(), b.tolist())) == sorted((i, j) for j in range(7) for i in range(j))


@pytest.mark.parametrize("total,fill", [(45, 0.05), (45, 0.6), (4950, 0.01), (10, 1.0)])
def test_line_subsets(total, fill):
    s = derive_stream(16, total)
    counts = s.binomial(total, fill, size=400)
    line, idx = sample_line_subsets(counts, total, s)
    assert np.array_equal(np.bincount(line, minlength=counts.size), counts)
    assert idx.min(initial=0) >= 0 and idx.max(initial=0) < total
    key = line * total + idx
    assert np.all(np.diff(key) > 0)  # sorted and duplicate-free


def test_line_subsets_inclusion_uniform():
    total, m, lines = 20, 9, 20000
    s = derive_stream(17, 0)
    line, idx = sample_line_subsets(np.full(lines, m), total, s)
    hits = np.bincount(idx, minlength=total)
    assert stats.chisquare(hits).pvalue > P_MIN


def test_subset_law_uniform_rejection_branch():
    # m=2 of 20 is below the dense threshold, so rejection sampling is used
    s = derive_stream(15, 99)
    c = Counter(tuple(sorted(sample_subset(2, 20, s).tolist())) for _ in range(100000))
    assert len(c) == comb(20, 2)
    assert stats.chisquare(list(c.values())).pvalue > P_MIN
