"""Breadth-first exploration of a vertex's cluster as a (Q_t, G_t) chain.

At step t one active vertex is explored; Z_t is the number of vertices it
reveals, Q_{t+1} = Q_t + Z_t counts vertices found so far and
G_{t+1} = G_t + Z_t - 1 counts found-but-unexplored ones. T0 is the first t
with G_t = 0, at which point Q_{T0} = T0 is the cluster size.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..model import ModelParams
from .graph import OpenGraph, as_index


@dataclass(frozen=True, eq=False)
class ExplorationTrace:
    q: np.ndarray
    g: np.ndarray
    z: np.ndarray
    t0: int | None
    steps: int
    size: int
    found: np.ndarray | None = None

    @property
    def completed(self) -> bool:
        return self.t0 is not None

    def check(self) -> None:
        """Assert the chain identities on the stored prefix."""
        q, g, z = self.q, self.g, self.z
        assert q[0] == 1 and g[0] == 1
        k = z.size
        assert np.array_equal(q[1:k + 1], q[:k] + z)
        assert np.array_equal(g[1:k + 1], g[:k] + z - 1)
        if self.t0 is not None:
            assert self.size == self.t0, (self.size, self.t0)
            if k >= self.t0:
                assert int(z[: self.t0].sum()) == self.t0 - 1
                assert q[self.t0] == self.t0 and g[self.t0] == 0
                assert np.all(g[: self.t0] >= 1)

    def to_rows(self):
        """(t, Q_t, G_t, Z_t) rows; Z is blank on the final stored step."""
        for t in range(self.q.size):
            zt = int(self.z[t]) if t < self.z.size else ""
            yield t, int(self.q[t]), int(self.g[t]), zt


class _Recorder:
    def __init__(self, cap):
        self.cap = cap
        self.q = [1]
        self.g = [1]
        self.z = []

    def push(self, t, z, q, g):
        if self.cap is None or t < self.cap:
            self.z.append(z)
            self.q.append(q)
            self.g.append(g)

    def trace(self, t0, steps, size, found):
        return ExplorationTrace(
            q=np.asarray(self.q, dtype=np.int64),
            g=np.asarray(self.g, dtype=np.int64),
            z=np.asarray(self.z, dtype=np.int64),
            t0=t0,
            steps=steps,
            size=size,
            found=found,
        )


def explore_cluster(
    graph: OpenGraph, v0, max_steps: int | None = None, trace_cap: int | None = None
) -> ExplorationTrace:
    """Explore the cluster of ``v0`` in a sampled graph.

    Stops when G hits 0 (``t0`` set) or after ``max_steps`` steps
    (``t0 = None``). ``trace_cap`` bounds how many steps are stored.
    """
    x0 = as_index(v0, graph.n)
    indptr, indices = graph.adjacency
    seen = np.zeros(graph.n_vertices, dtype=bool)
    seen[x0] = True
    order = [x0]
    rec = _Recorder(trace_cap)
    q = g = 1
    t = 0
    while g > 0 and (max_steps is None or t < max_steps):
        x = order[t]
        nb = indices[indptr[x]:indptr[x + 1]]
        new = nb[~seen[nb]]
        seen[new] = True
        order.extend(new.tolist())
        z = int(new.size)
        q += z
        g += z - 1
        rec.push(t, z, q, g)
        t += 1
    return rec.trace(t if g == 0 else None, t, q, np.asarray(order, dtype=np.int64))


def explore_lazy(
    params: ModelParams,
    v0,
    stream: np.random.Generator,
    stop_at: int | None = None,
    max_steps: int | None = None,
    trace_cap: int | None = 0,
) -> ExplorationTrace:
    """Explore the cluster of ``v0`` while sampling edges on demand.

    Each edge between the vertex being explored and a not-yet-found vertex
    is examined here for the first and only time, so revealing it with a
    fresh Bernoulli(p) reproduces the percolation law exactly. Stops when G
    hits 0, when Q >= ``stop_at`` or after ``max_steps``. By default no
    per-step trace is stored (``trace_cap=0``).
    """
    n, p = params.n, params.p
    x0 = as_index(v0, n)
    seen = np.zeros((n, n), dtype=bool)
    row_found = [0] * n
    col_found = [0] * n
    r0, c0 = divmod(x0, n)
    seen[r0, c0] = True
    row_found[r0] += 1
    col_found[c0] += 1
    order = [x0]
    rec = _Recorder(trace_cap)

    buf = stream.random(1024)
    pos = 0
    q = g = 1
    t = 0
    while g > 0 and (stop_at is None or q < stop_at) and (max_steps is None or t < max_steps):
        r, c = divmod(order[t], n)
        k_row = n - row_found[r]
        k_col = n - col_found[c]
        k = k_row + k_col
        z = int(stream.binomial(k, p)) if k and p > 0 else 0
        if z:
            if 4 * k >= 2 * n:
                # rejection over the 2n line slots; acceptance >= 1/4
                got = 0
                while got < z:
                    if pos == buf.size:
                        buf = stream.random(1024)
                        pos = 0
                    s = int(buf[pos] * 2 * n)
                    pos += 1
                    rr, cc = (r, s) if s < n else (s - n, c)
                    if seen[rr, cc]:
                        continue
                    seen[rr, cc] = True
                    row_found[rr] += 1
                    col_found[cc] += 1
                    order.append(rr * n + cc)
                    got += 1
            else:
                cand = np.concatenate(
                    [r * n + np.flatnonzero(~seen[r]), np.flatnonzero(~seen[:, c]) * n + c]
                )
                for x in cand[stream.permutation(cand.size)[:z]].tolist():
                    rr, cc = divmod(x, n)
                    seen[rr, cc] = True
                    row_found[rr] += 1
                    col_found[cc] += 1
                    order.append(x)
        q += z
        g += z - 1
        rec.push(t, z, q, g)
        t += 1
    return rec.trace(t if g == 0 else None, t, q, np.asarray(order, dtype=np.int64))


@dataclass(frozen=True, eq=False)
class LineOccupancy:
    rows: np.ndarray
    cols: np.ndarray

    @property
    def max_occupancy(self) -> int:
        return int(max(self.rows.max(), self.cols.max()))

    def within(self, m: float) -> bool:
        return self.max_occupancy <= m


def occupancy_of(found: np.ndarray, n: int) -> LineOccupancy:
    r, c = np.divmod(np.asarray(found, dtype=np.int64), n)
    return LineOccupancy(np.bincount(r, minlength=n), np.bincount(c, minlength=n))


def line_occupancy(graph: OpenGraph, v0, t: int) -> LineOccupancy:
    """Row/column counts of the vertices found in the first ``t`` steps."""
    tr = explore_cluster(graph, v0, max_steps=t, trace_cap=0)
    occ = occupancy_of(tr.found, graph.n)
    assert occ.rows.sum() == tr.size
    return occ


def occupancy_cap(params: ModelParams, ell: float) -> float:
    """Per-line cap m = 5 ell / (2n) used when sandwiching explorations."""
    return 5.0 * ell / (2.0 * params.n)
