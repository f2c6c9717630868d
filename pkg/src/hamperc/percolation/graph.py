"""Vertices, open subgraphs of H(2, n) and their samplers.

H(2, n) splits into 2n lines (n rows, n columns), each a complete graph
K_n, and every edge lies on exactly one line. Sampling a percolation
configuration line by line, ``M ~ Bin(n(n-1)/2, p)`` open edges per line and
then a uniform M-subset of the line's pairs, has the same law as flipping
one coin per edge, at a cost proportional to the number of open edges.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import NamedTuple

import numpy as np

from ..errors import DomainError
from ..model import ModelParams
from ..rng import index_from_pair, pair_count, pair_from_index, sample_line_subsets


class Vertex(NamedTuple):
    """A vertex ``(i, j)`` with 1-based coordinates, as written in I/O."""

    i: int
    j: int

    def index(self, n: int) -> int:
        if not (1 <= self.i <= n and 1 <= self.j <= n):
            raise DomainError(f"vertex {tuple(self)} outside [1..{n}]^2")
        return (self.i - 1) * n + (self.j - 1)

    @classmethod
    def from_index(cls, idx: int, n: int) -> "Vertex":
        r, c = divmod(int(idx), n)
        return cls(r + 1, c + 1)


def as_index(v0, n: int) -> int:
    """Accept a ``Vertex``/(i, j) tuple (1-based) or a 0-based linear index."""
    if isinstance(v0, tuple):
        return Vertex(*v0).index(n)
    v0 = int(v0)
    if not 0 <= v0 < n * n:
        raise DomainError(f"vertex index {v0} outside [0, {n * n})")
    return v0


def adjacent(a: int, b: int, n: int) -> bool:
    ra, ca = divmod(a, n)
    rb, cb = divmod(b, n)
    return (ra == rb) != (ca == cb)


@dataclass(frozen=True, eq=False)
class OpenGraph:
    """Retained edges of one percolation configuration.

    Edges are stored as two int64 arrays of linear vertex indices with
    ``u < v`` and no duplicates, in line order.
    """

    n: int
    p: float
    u: np.ndarray
    v: np.ndarray
    seed: str | None = field(default=None, compare=False)

    @property
    def edge_count(self) -> int:
        return int(self.u.size)

    @property
    def n_vertices(self) -> int:
        return self.n * self.n

    @cached_property
    def adjacency(self) -> tuple[np.ndarray, np.ndarray]:
        """CSR ``(indptr, indices)`` over all n^2 vertices."""
        src = np.concatenate([self.u, self.v])
        dst = np.concatenate([self.v, self.u])
        order = np.argsort(src, kind="stable")
        indptr = np.zeros(self.n_vertices + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=self.n_vertices), out=indptr[1:])
        return indptr, dst[order]

    def neighbors(self, x: int) -> np.ndarray:
        indptr, indices = self.adjacency
        return indices[indptr[x]:indptr[x + 1]]

    def validate(self) -> None:
        n = self.n
        if self.u.shape != self.v.shape:
            raise AssertionError("edge arrays differ in length")
        if self.edge_count == 0:
            return
        if np.any(self.u >= self.v) or self.u.min() < 0 or self.v.max() >= n * n:
            raise AssertionError("edge endpoints out of order or range")
        ru, cu = np.divmod(self.u, n)
        rv, cv = np.divmod(self.v, n)
        if np.any((ru == rv) == (cu == cv)):
            raise AssertionError("edge joins vertices not sharing exactly one coordinate")
        keys = self.u * (n * n) + self.v
        if np.unique(keys).size != keys.size:
            raise AssertionError("duplicate edge")


def _line_pairs_to_edges(n: int, line: np.ndarray, a: np.ndarray, b: np.ndarray):
    """Map (line, a, b) triples to linear vertex indices; lines >= 2n wrap
    into later graphs of a batch with a vertex offset of n^2 per graph."""
    graph, local = np.divmod(line, 2 * n)
    offset = graph * (n * n)
    is_row = local < n
    k = np.where(is_row, local, local - n)
    u = np.where(is_row, k * n + a, a * n + k) + offset
    v = np.where(is_row, k * n + b, b * n + k) + offset
    return graph, u, v


def sample_edge_batch(params: ModelParams, count: int, stream: np.random.Generator):
    """``count`` independent configurations, vectorised over all lines.

    Returns ``(graph_id, u, v)`` in (graph, line, pair) order; vertices of
    graph ``g`` are offset by ``g * n^2`` so the batch is one disjoint union.
    """
    n, p = params.n, params.p
    total = pair_count(n)
    n_lines = 2 * n * count
    if p == 0.0:
        m = np.zeros(n_lines, dtype=np.int64)
    else:
        m = stream.binomial(total, p, size=n_lines).astype(np.int64)
    line, idx = sample_line_subsets(m, total, stream)
    a, b = pair_from_index(idx)
    return _line_pairs_to_edges(n, line, a, b)


def sample_open_graph(params: ModelParams, stream: np.random.Generator, seed=None) -> OpenGraph:
    """One percolation configuration on H(2, n) at edge probability ``params.p``."""
    _, u, v = sample_edge_batch(params, 1, stream)
    return OpenGraph(params.n, params.p, u, v, seed=None if seed is None else str(seed))


def all_edges(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Every edge of H(2, n) in canonical (line, pair index) order."""
    total = pair_count(n)
    line = np.repeat(np.arange(2 * n, dtype=np.int64), total)
    idx = np.tile(np.arange(total, dtype=np.int64), 2 * n)
    a, b = pair_from_index(idx)
    _, u, v = _line_pairs_to_edges(n, line, a, b)
    return u, v


def sample_open_graph_coupled(n: int, ps, stream: np.random.Generator) -> list[OpenGraph]:
    """Graphs at several edge probabilities from one shared uniform per edge.

    Edge ``e`` is open at level ``p`` iff ``U_e < p``, so the graphs are
    nested whenever the levels are ordered. Costs O(n^3); debugging aid.
    """
    u, v = all_edges(n)
    uniforms = stream.random(u.size)
    out = []
    for p in ps:
        keep = uniforms < p
        out.append(OpenGraph(n, float(p), u[keep], v[keep]))
    return out


def graph_from_edges(n: int, p: float, pairs) -> OpenGraph:
    """Build a graph from 0-based linear-index pairs (mainly for tests)."""
    arr = np.asarray(list(pairs), dtype=np.int64).reshape(-1, 2)
    u = np.minimum(arr[:, 0], arr[:, 1])
    v = np.maximum(arr[:, 0], arr[:, 1])
    keys = np.unique(u * (n * n) + v)
    g = OpenGraph(n, p, keys // (n * n), keys % (n * n))
    g.validate()
    return g


def line_pair_index(g: OpenGraph) -> tuple[np.ndarray, np.ndarray]:
    """Inverse of the line mapping: ``(line, pair index)`` of every edge."""
    n = g.n
    ru, cu = np.divmod(g.u, n)
    rv, cv = np.divmod(g.v, n)
    same_row = ru == rv
    line = np.where(same_row, ru, n + cu)
    idx = np.where(same_row, index_from_pair(cu, cv), index_from_pair(ru, rv))
    return line, idx


def dump_edges(g: OpenGraph, path: str | Path) -> None:
    """Write ``n=<n> p=<p> seed=<seed>`` then one ``i1 j1 i2 j2`` line per
    edge, 1-based."""
    n = g.n
    ru, cu = np.divmod(g.u, n)
    rv, cv = np.divmod(g.v, n)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"n={n} p={g.p!r} seed={g.seed if g.seed is not None else ''}\n")
        for row in zip(ru + 1, cu + 1, rv + 1, cv + 1):
            fh.write("%d %d %d %d\n" % row)


def load_edges(path: str | Path) -> OpenGraph:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        fields = dict(tok.split("=", 1) for tok in header)
        n = int(fields["n"])
        rows = [tuple(map(int, line.split())) for line in fh if line.strip()]
    pairs = [((i1 - 1) * n + j1 - 1, (i2 - 1) * n + j2 - 1) for i1, j1, i2, j2 in rows]
    g = graph_from_edges(n, float(fields["p"]), pairs)
    seed = fields.get("seed") or None
    return OpenGraph(g.n, g.p, g.u, g.v, seed=seed)
