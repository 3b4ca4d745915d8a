"""Graphs over observation windows and their squared spanning distances."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DimensionMismatchError, WindowSizeError

# ╭──────────────────────────────────────────────────────────────╮
# │ Graph kinds and shared defaults                              │
# ╰──────────────────────────────────────────────────────────────╯

# Smallest admissible reference point k (t0); blocks need two nodes for a graph.
REFERENCE_START = 2

# NNG is the 1-nearest-neighbour digraph with edge direction dropped and
# duplicate (i, j) pairs removed. Ties go to the lowest neighbour index.
NNG_SYMMETRIZED = True

Edge = Tuple[int, int, float]
ArrayLike = Union[np.ndarray, Sequence[float], Sequence[Sequence[float]]]


class GraphKind(str, Enum):
    """Graph built over a block of observations."""

    CG = "cg"
    MST = "mst"
    NNG = "nng"

    @classmethod
    def parse(cls, value: "GraphKind | str") -> "GraphKind":
        if isinstance(value, GraphKind):
            return value
        aliases = {
            "cg": cls.CG,
            "complete": cls.CG,
            "mst": cls.MST,
            "tree": cls.MST,
            "nng": cls.NNG,
            "nearest": cls.NNG,
        }
        key = str(value).strip().lower()
        if key not in aliases:
            raise ValueError(f"Unknown graph kind {value!r}; expected one of cg, mst, nng")
        return aliases[key]


# ╭──────────────────────────────────────────────────────────────╮
# │ Core data structures                                         │
# ╰──────────────────────────────────────────────────────────────╯


@dataclass(frozen=True, eq=False)
class ObservationWindow:
    """Ordered block of ``m`` d-dimensional observations.

    ``anchor`` is the stream index of the first observation. A flat sequence
    of numbers is read as ``m`` one-dimensional observations.
    """

    observations: np.ndarray
    anchor: int = 0

    def __post_init__(self) -> None:
        values = np.array(self.observations, dtype=float, copy=True)
        if values.ndim == 1:
            values = values.reshape(-1, 1)
        if values.ndim != 2:
            raise DimensionMismatchError(
                f"Observations must form an (m, d) array, got shape {values.shape}"
            )
        if values.shape[1] < 1:
            raise DimensionMismatchError("Observations need at least one dimension")
        if values.shape[0] < 2:
            raise WindowSizeError(f"A window needs at least 2 observations, got {values.shape[0]}")
        if not np.all(np.isfinite(values)):
            raise ValueError("Observations must be finite (no NaN or Inf entries)")
        values.setflags(write=False)
        object.__setattr__(self, "observations", values)
        object.__setattr__(self, "anchor", int(self.anchor))

    @classmethod
    def from_array(cls, values: ArrayLike, anchor: int = 0) -> "ObservationWindow":
        return cls(np.asarray(values, dtype=float), anchor=anchor)

    @property
    def size(self) -> int:
        return int(self.observations.shape[0])

    @property
    def dimension(self) -> int:
        return int(self.observations.shape[1])

    @property
    def half(self) -> int:
        """Half-length ``n`` of a ``2n`` scanning window."""

        return require_scanning_window(self.size)

    def block(self, start: int, stop: int) -> "ObservationWindow":
        return ObservationWindow(self.observations[start:stop], anchor=self.anchor + start)


@dataclass(frozen=True)
class GraphSpanning:
    """A graph over a block together with its squared spanning weight."""

    kind: GraphKind
    edges: Tuple[Edge, ...]
    weight: float

    @property
    def edge_count(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class SpanningProfile:
    """Block weights for every reference point ``k`` of a ``2n`` window."""

    ks: np.ndarray
    left: np.ndarray
    right: np.ndarray
    total: float


class UnionFind:
    """Disjoint sets with path compression and union by rank."""

    def __init__(self, size: int) -> None:
        self._parent = list(range(size))
        self._rank = [0] * size

    def find(self, node: int) -> int:
        root = node
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[node] != root:
            self._parent[node], node = root, self._parent[node]
        return root

    def union(self, first: int, second: int) -> bool:
        """Merge the sets holding ``first`` and ``second``; False if already joined."""

        a, b = self.find(first), self.find(second)
        if a == b:
            return False
        if self._rank[a] < self._rank[b]:
            a, b = b, a
        self._parent[b] = a
        if self._rank[a] == self._rank[b]:
            self._rank[a] += 1
        return True


# ╭──────────────────────────────────────────────────────────────╮
# │ Distances                                                    │
# ╰──────────────────────────────────────────────────────────────╯


def squared_distance(a: ArrayLike, b: ArrayLike) -> float:
    """Return the squared Euclidean distance between two observations."""

    first = np.atleast_1d(np.asarray(a, dtype=float))
    second = np.atleast_1d(np.asarray(b, dtype=float))
    if first.shape != second.shape or first.ndim != 1:
        raise DimensionMismatchError(
            f"Observation dimensions differ: {first.shape} vs {second.shape}"
        )
    return float(distances_to(first.reshape(1, -1), second)[0])


def distances_to(points: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Squared distances from each row of ``points`` to ``target``.

    Coordinates are accumulated one dimension at a time, in index order, so an
    entry does not depend on how many rows share the call. The online ring
    buffer relies on this to match :func:`pairwise_sq_distances` bit for bit.
    """

    total = np.zeros(points.shape[0], dtype=float)
    for column, value in zip(points.T, target):
        diff = column - value
        total += diff * diff
    return total


def pairwise_sq_distances(points: ArrayLike) -> np.ndarray:
    """Return the symmetric ``m × m`` matrix of squared distances."""

    values = np.asarray(points, dtype=float)
    if values.ndim == 1:
        values = values.reshape(-1, 1)
    size = values.shape[0]
    dist = np.zeros((size, size), dtype=float)
    for column in values.T:
        diff = column[:, None] - column[None, :]
        dist += diff * diff
    if not np.all(np.isfinite(dist)):
        raise ValueError("Squared distances overflowed to a non-finite value")
    return dist


# ╭──────────────────────────────────────────────────────────────╮
# │ Graph construction                                           │
# ╰──────────────────────────────────────────────────────────────╯


def _sorted_edge_arrays(dist: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    size = dist.shape[0]
    rows, cols = np.triu_indices(size, 1)
    weights = dist[rows, cols]
    order = np.lexsort((cols, rows, weights))
    return rows[order], cols[order], weights[order]


def _kruskal(size: int, rows: np.ndarray, cols: np.ndarray, weights: np.ndarray) -> List[Edge]:
    """Kruskal over edges already sorted by (w, i, j)."""

    forest = UnionFind(size)
    edges: List[Edge] = []
    for i, j, w in zip(rows.tolist(), cols.tolist(), weights.tolist()):
        if forest.union(i, j):
            edges.append((i, j, w))
            if len(edges) == size - 1:
                break
    return edges


def _complete_edges(dist: np.ndarray) -> List[Edge]:
    rows, cols = np.triu_indices(dist.shape[0], 1)
    return [(i, j, w) for i, j, w in zip(rows.tolist(), cols.tolist(), dist[rows, cols].tolist())]


def _mst_edges(dist: np.ndarray) -> List[Edge]:
    rows, cols, weights = _sorted_edge_arrays(dist)
    return _kruskal(dist.shape[0], rows, cols, weights)


def _nng_edges(dist: np.ndarray) -> List[Edge]:
    masked = dist.copy()
    np.fill_diagonal(masked, np.inf)
    nearest = np.argmin(masked, axis=1)
    pairs = sorted({(min(i, j), max(i, j)) for i, j in enumerate(nearest.tolist())})
    return [(i, j, float(dist[i, j])) for i, j in pairs]


def graph_edges(dist: np.ndarray, kind: GraphKind) -> List[Edge]:
    kind = GraphKind.parse(kind)
    if dist.shape[0] < 2:
        raise WindowSizeError("A graph needs at least 2 nodes")
    if kind is GraphKind.CG:
        return _complete_edges(dist)
    if kind is GraphKind.MST:
        return _mst_edges(dist)
    return _nng_edges(dist)


def spanning_weight(dist: np.ndarray, kind: GraphKind) -> float:
    """Squared spanning weight of the ``kind`` graph over a distance matrix."""

    kind = GraphKind.parse(kind)
    if kind is GraphKind.CG:
        return float(np.triu(dist, 1).sum())
    return math.fsum(w for _, _, w in graph_edges(dist, kind))


def build_graph(window: ObservationWindow, kind: GraphKind) -> GraphSpanning:
    """Build the CG, MST or NNG over ``window`` and return its edges and weight."""

    kind = GraphKind.parse(kind)
    dist = pairwise_sq_distances(window.observations)
    edges = graph_edges(dist, kind)
    return GraphSpanning(kind=kind, edges=tuple(edges), weight=math.fsum(w for _, _, w in edges))


def adjacency_indicator(graph: GraphSpanning, size: int) -> np.ndarray:
    """Encode ``graph`` as the 0/1 vector of its upper-triangular adjacency."""

    vector = np.zeros(size * (size - 1) // 2, dtype=float)
    for i, j, _ in graph.edges:
        vector[i * size - i * (i + 1) // 2 + (j - i - 1)] = 1.0
    return vector


# ╭──────────────────────────────────────────────────────────────╮
# │ Window splits                                                │
# ╰──────────────────────────────────────────────────────────────╯


def require_scanning_window(size: int) -> int:
    """Return ``n`` for a window of length ``2n``; reject odd or short windows."""

    if size % 2 or size < 2 * REFERENCE_START:
        raise WindowSizeError(
            f"A scanning window needs an even length of at least {2 * REFERENCE_START}, got {size}"
        )
    return size // 2


def reference_points(n: int) -> range:
    """Admissible reference points ``k`` of a ``2n`` window."""

    return range(REFERENCE_START, 2 * n - REFERENCE_START + 1)


def _check_reference(n: int, k: int) -> None:
    if not REFERENCE_START <= k <= 2 * n - REFERENCE_START:
        raise ValueError(
            f"Reference point k={k} outside [{REFERENCE_START}, {2 * n - REFERENCE_START}]"
        )


def spanning_triplet(window: ObservationWindow, k: int, kind: GraphKind) -> tuple[float, float, float]:
    """Return ``(wl, wr, w2n)``: weights before ``k``, from ``k`` on, and overall."""

    n = window.half
    _check_reference(n, k)
    dist = pairwise_sq_distances(window.observations)
    return (
        spanning_weight(dist[:k, :k], kind),
        spanning_weight(dist[k:, k:], kind),
        spanning_weight(dist, kind),
    )


def gap_spanning(window: ObservationWindow, k: int) -> float:
    """Total squared distance over all pairs straddling reference point ``k``."""

    n = window.half
    _check_reference(n, k)
    left = window.observations[:k]
    right = window.observations[k:]
    return float(sum(distances_to(right, point).sum() for point in left))


def spanning_profile(
    dist: np.ndarray, kind: GraphKind, ks: Optional[Sequence[int]] = None
) -> SpanningProfile:
    """Block weights ``wl(k)``, ``wr(k)`` for every ``k`` of a ``2n`` window, or just ``ks``."""

    kind = GraphKind.parse(kind)
    size = dist.shape[0]
    n = require_scanning_window(size)
    if ks is None:
        ks = np.arange(REFERENCE_START, 2 * n - REFERENCE_START + 1)
    else:
        ks = np.asarray(sorted(set(int(k) for k in ks)), dtype=int)
        for k in ks.tolist():
            _check_reference(n, k)

    if kind is GraphKind.CG:
        upper = np.triu(dist, 1)
        left = np.cumsum(upper.sum(axis=0))
        right = np.cumsum(upper.sum(axis=1)[::-1])[::-1]
        return SpanningProfile(ks=ks, left=left[ks - 1], right=right[ks], total=float(upper.sum()))

    left_weights = np.empty(ks.size)
    right_weights = np.empty(ks.size)
    if kind is GraphKind.MST:
        # One global (w, i, j) order; block filters keep that order.
        rows, cols, weights = _sorted_edge_arrays(dist)
        for index, k in enumerate(ks.tolist()):
            inside = cols < k
            left_weights[index] = math.fsum(
                w for _, _, w in _kruskal(k, rows[inside], cols[inside], weights[inside])
            )
            outside = rows >= k
            right_weights[index] = math.fsum(
                w
                for _, _, w in _kruskal(
                    size - k, rows[outside] - k, cols[outside] - k, weights[outside]
                )
            )
        total = math.fsum(w for _, _, w in _kruskal(size, rows, cols, weights))
    else:
        for index, k in enumerate(ks.tolist()):
            left_weights[index] = spanning_weight(dist[:k, :k], kind)
            right_weights[index] = spanning_weight(dist[k:, k:], kind)
        total = spanning_weight(dist, kind)
    return SpanningProfile(ks=ks, left=left_weights, right=right_weights, total=total)


__all__ = [
    "Edge",
    "GraphKind",
    "GraphSpanning",
    "NNG_SYMMETRIZED",
    "ObservationWindow",
    "REFERENCE_START",
    "SpanningProfile",
    "UnionFind",
    "adjacency_indicator",
    "build_graph",
    "distances_to",
    "gap_spanning",
    "graph_edges",
    "pairwise_sq_distances",
    "reference_points",
    "require_scanning_window",
    "spanning_profile",
    "spanning_triplet",
    "spanning_weight",
    "squared_distance",
]
