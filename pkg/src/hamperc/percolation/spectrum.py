"""Connected components of open graphs via union-find."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .graph import OpenGraph


@njit(cache=True)
def _find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


@njit(cache=True)
def _union_find_roots(n_vertices, u, v):
    parent = np.arange(n_vertices)
    size = np.ones(n_vertices, dtype=np.int64)
    for e in range(u.shape[0]):
        a = _find(parent, u[e])
        b = _find(parent, v[e])
        if a == b:
            continue
        if size[a] < size[b]:
            a, b = b, a
        parent[b] = a
        size[a] += size[b]
    for x in range(n_vertices):
        parent[x] = _find(parent, x)
    return parent


def component_labels(n_vertices: int, u: np.ndarray, v: np.ndarray):
    """Return ``(root, root_sizes)``: the root vertex of each vertex's
    component, and ``root_sizes[r]``, the size of the component rooted at
    ``r`` (0 for non-roots)."""
    roots = _union_find_roots(
        np.int64(n_vertices), np.ascontiguousarray(u, np.int64), np.ascontiguousarray(v, np.int64)
    )
    return roots, np.bincount(roots, minlength=n_vertices)


@dataclass(frozen=True, eq=False)
class ComponentSpectrum:
    """Component sizes of one configuration, largest first.

    ``c2`` is 0 when the graph is connected; tied sizes count separately.
    """

    sizes: np.ndarray
    component_of: np.ndarray  # root vertex id per vertex
    label_sizes: np.ndarray  # indexed by root id

    @property
    def c1(self) -> int:
        return int(self.sizes[0])

    @property
    def c2(self) -> int:
        return int(self.sizes[1]) if self.sizes.size > 1 else 0

    @property
    def n_components(self) -> int:
        return int(self.sizes.size)

    def size_of(self, x: int) -> int:
        """Size of the component containing linear vertex ``x``."""
        return int(self.label_sizes[self.component_of[x]])


def component_spectrum(graph: OpenGraph) -> ComponentSpectrum:
    label, size_by_label = component_labels(graph.n_vertices, graph.u, graph.v)
    sizes = np.sort(size_by_label[size_by_label > 0])[::-1].copy()
    assert sizes.sum() == graph.n_vertices
    return ComponentSpectrum(sizes=sizes, component_of=label, label_sizes=size_by_label)


def batch_top_two(n_vertices: int, count: int, u: np.ndarray, v: np.ndarray):
    """``(c1, c2)`` arrays for a disjoint union of ``count`` graphs on
    ``n_vertices`` vertices each (vertex ids offset per graph)."""
    _, root_sizes = component_labels(n_vertices * count, u, v)
    first = np.flatnonzero(root_sizes)
    sizes = root_sizes[first]
    graph_of = first // n_vertices
    order = np.lexsort((-sizes, graph_of))
    g_sorted, s_sorted = graph_of[order], sizes[order]
    starts = np.searchsorted(g_sorted, np.arange(count))
    c1 = s_sorted[starts]
    nxt = starts + 1
    has_second = (nxt < g_sorted.size) & (g_sorted[np.minimum(nxt, g_sorted.size - 1)] == np.arange(count))
    c2 = np.where(has_second, s_sorted[np.minimum(nxt, s_sorted.size - 1)], 0)
    return c1, c2


def z_geq(spectrum: ComponentSpectrum, N: int) -> int:
    """Number of vertices in components of size at least ``N``."""
    s = spectrum.sizes
    return int(s[s >= N].sum())


def middle_component_count(spectrum: ComponentSpectrum, x: float, y: float) -> int:
    """Number of components whose size lies in ``[x, y)``."""
    s = spectrum.sizes
    return int(np.count_nonzero((s >= x) & (s < y)))
