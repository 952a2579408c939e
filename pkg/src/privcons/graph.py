"""Undirected topologies, symmetric time-varying weight schedules, step-size bounds."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

Edge = tuple[int, int]


class TopologyError(ValueError):
    pass


class IndexOutOfRange(TopologyError):
    pass


class SelfLoop(TopologyError):
    pass


class DuplicateEdge(TopologyError):
    pass


class ZeroDegreeUndecomposed(ValueError):
    pass


class MissingWeight(KeyError):
    pass


@dataclass(frozen=True)
class Topology:
    """Undirected simple graph on nodes ``0..node_count-1``.

    Edges are stored once, as sorted ``(i, j)`` pairs with ``i < j``, in a
    fixed canonical order. Weight schedules index into that order.
    """

    node_count: int
    edges: tuple[Edge, ...]
    neighbors: tuple[tuple[int, ...], ...] = field(repr=False, compare=False)

    def edge_index(self, i: int, j: int) -> int:
        key = (i, j) if i < j else (j, i)
        try:
            return self._index[key]
        except KeyError:
            raise KeyError(f"({i}, {j}) is not an edge") from None

    @property
    def _index(self) -> dict[Edge, int]:
        cache = self.__dict__.get("_index_cache")
        if cache is None:
            cache = {e: n for n, e in enumerate(self.edges)}
            object.__setattr__(self, "_index_cache", cache)
        return cache

    def has_edge(self, i: int, j: int) -> bool:
        return ((i, j) if i < j else (j, i)) in self._index

    def degree(self, i: int) -> int:
        return len(self.neighbors[i])

    def adjacency(self) -> np.ndarray:
        A = np.zeros((self.node_count, self.node_count), dtype=int)
        for i, j in self.edges:
            A[i, j] = A[j, i] = 1
        return A

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Endpoint index arrays ``(heads, tails)`` aligned with ``edges``."""
        if not self.edges:
            return np.zeros(0, dtype=int), np.zeros(0, dtype=int)
        e = np.asarray(self.edges, dtype=int)
        return e[:, 0], e[:, 1]


def build_topology(node_count: int, edges: Iterable[Sequence[int]]) -> Topology:
    """Validate an edge list and return a :class:`Topology`.

    Raises:
        IndexOutOfRange: an endpoint lies outside ``[0, node_count)``.
        SelfLoop: an edge joins a node to itself.
        DuplicateEdge: the same unordered pair appears twice.
    """
    if node_count < 1:
        raise TopologyError(f"node_count must be positive, got {node_count}")
    seen: set[Edge] = set()
    ordered: list[Edge] = []
    for raw in edges:
        i, j = (int(v) for v in raw)
        for v in (i, j):
            if not 0 <= v < node_count:
                raise IndexOutOfRange(f"node {v} not in [0, {node_count})")
        if i == j:
            raise SelfLoop(f"self-loop at node {i}")
        key = (i, j) if i < j else (j, i)
        if key in seen:
            raise DuplicateEdge(f"edge {key} listed twice")
        seen.add(key)
        ordered.append(key)
    ordered.sort()
    nbrs: list[list[int]] = [[] for _ in range(node_count)]
    for i, j in ordered:
        nbrs[i].append(j)
        nbrs[j].append(i)
    return Topology(node_count, tuple(ordered), tuple(tuple(sorted(n)) for n in nbrs))


def paper_topology() -> Topology:
    """Five-node benchmark network (0-based labels of the 1..5 example)."""
    return build_topology(5, [(0, 1), (0, 4), (1, 2), (2, 4), (3, 4)])


def random_connected_topology(
    node_count: int, rng: np.random.Generator, extra_edge_prob: float = 0.3
) -> Topology:
    """Random spanning tree plus independent extra edges; always connected."""
    order = rng.permutation(node_count)
    edges: set[Edge] = set()
    for pos in range(1, node_count):
        u = int(order[pos])
        v = int(order[rng.integers(pos)])
        edges.add((min(u, v), max(u, v)))
    for i in range(node_count):
        for j in range(i + 1, node_count):
            if (i, j) not in edges and rng.random() < extra_edge_prob:
                edges.add((i, j))
    return build_topology(node_count, sorted(edges))


def max_degree(t: Topology) -> int:
    return max((len(n) for n in t.neighbors), default=0)


def epsilon_bound(delta: int, decomposed: bool) -> float:
    """Upper end of the admissible step-size interval ``(0, upper]``.

    Each visible sub-state gains one extra neighbour (its hidden twin), so the
    decomposed protocol uses ``1/(delta+1)`` instead of ``1/delta``.
    """
    if delta < 0:
        raise ValueError("degree cannot be negative")
    if decomposed:
        return 1.0 / (delta + 1)
    if delta == 0:
        raise ZeroDegreeUndecomposed("no admissible step size for an isolated node")
    return 1.0 / delta


def is_connected(t: Topology) -> bool:
    seen = {0}
    queue = deque([0])
    while queue:
        u = queue.popleft()
        for v in t.neighbors[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return len(seen) == t.node_count


@dataclass(frozen=True, eq=False)
class WeightSchedule:
    """Symmetric edge weights ``a_ij[k]`` for rounds ``0..horizon``.

    ``values[k, e]`` is the weight of ``topology.edges[e]`` at round ``k``.
    Row 0 may hold any real numbers; rows ``k >= 1`` are meant to lie in
    ``[eta, 1)`` (checked by :func:`validate_weight_schedule`, not here).
    """

    values: np.ndarray
    eta: float = 0.1

    def __post_init__(self) -> None:
        v = np.array(self.values, dtype=float)
        if v.ndim != 2:
            raise ValueError("weight values must be a (rounds, edges) array")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        if not 0.0 < self.eta < 1.0:
            raise ValueError(f"eta must lie in (0, 1), got {self.eta}")

    @property
    def horizon(self) -> int:
        return self.values.shape[0] - 1

    @property
    def initial_weights(self) -> np.ndarray:
        return self.values[0]

    def at(self, k: int) -> np.ndarray:
        if not 0 <= k < self.values.shape[0]:
            raise MissingWeight(f"no weights for round {k}")
        return self.values[k]

    def weight(self, t: Topology, i: int, j: int, k: int) -> float:
        return float(self.at(k)[t.edge_index(i, j)])

    def replace(self, k: int, edge_idx: int, value: float) -> "WeightSchedule":
        v = self.values.copy()
        v[k, edge_idx] = value
        return WeightSchedule(v, self.eta)


def draw_steady(rng: np.random.Generator, size, eta: float) -> np.ndarray:
    """Uniform draws in ``[eta, 1)``; clamps the rare round-up to 1.0."""
    return np.minimum(rng.uniform(eta, 1.0, size=size), np.nextafter(1.0, 0.0))


def random_weight_schedule(
    t: Topology,
    horizon: int,
    rng: np.random.Generator,
    *,
    eta: float = 0.1,
    steady: float | None = None,
    round0: float | None = None,
    round0_range: tuple[float, float] = (-20.0, 20.0),
) -> WeightSchedule:
    """Generate a schedule obeying the two-phase weight rule.

    Args:
        steady: constant weight for rounds ``k >= 1``; drawn uniformly from
            ``[eta, 1)`` per edge and round when None.
        round0: constant round-0 weight; drawn uniformly from ``round0_range``
            when None.
    """
    E = len(t.edges)
    values = np.empty((horizon + 1, E))
    if round0 is None:
        values[0] = rng.uniform(*round0_range, size=E)
    else:
        values[0] = round0
    if steady is None:
        values[1:] = draw_steady(rng, (horizon, E), eta)
    else:
        values[1:] = steady
    return WeightSchedule(values, eta)


@dataclass
class ValidationReport:
    violations: list[tuple[int, Edge, float]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_weight_schedule(ws: WeightSchedule, t: Topology, horizon: int) -> ValidationReport:
    """Check ``eta <= a[k] < 1`` for every edge and every round ``1..horizon``.

    Round-0 weights are never flagged.

    Raises:
        MissingWeight: the schedule is shorter than ``horizon`` or has a
            column count that does not match the edge set, or holds NaN.
    """
    if ws.values.shape[1] != len(t.edges):
        raise MissingWeight(f"schedule has {ws.values.shape[1]} edges, topology has {len(t.edges)}")
    if ws.horizon < horizon:
        raise MissingWeight(f"schedule ends at round {ws.horizon}, need {horizon}")
    report = ValidationReport()
    block = ws.values[: horizon + 1]
    bad_k, bad_e = np.nonzero(np.isnan(block))
    if bad_k.size:
        raise MissingWeight(f"weight for edge {t.edges[bad_e[0]]} at round {bad_k[0]} is undefined")
    steady = block[1:]
    ks, es = np.nonzero((steady < ws.eta) | (steady >= 1.0))
    for k, e in zip(ks, es):
        report.violations.append((int(k) + 1, t.edges[e], float(steady[k, e])))
    return report
