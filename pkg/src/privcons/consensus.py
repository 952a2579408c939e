"""Synchronous average consensus, plain and with per-node state decomposition."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .graph import MissingWeight, Topology, WeightSchedule, draw_steady

PROTOCOLS = ("standard", "decomposed", "correlated-noise", "decaying-laplace")


class DimensionMismatch(ValueError):
    pass


class EmptyInput(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class AlphaBetaSchedule:
    """Private coupling ``a_{i,ab}[k]`` between each node's two sub-states.

    ``values[k, i]``; row 0 unrestricted, rows ``k >= 1`` in ``[eta, 1)``.
    """

    values: np.ndarray
    eta: float = 0.1

    def __post_init__(self) -> None:
        v = np.array(self.values, dtype=float)
        if v.ndim != 2:
            raise ValueError("alpha-beta weights must be a (rounds, nodes) array")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def horizon(self) -> int:
        return self.values.shape[0] - 1

    def at(self, k: int) -> np.ndarray:
        if not 0 <= k < self.values.shape[0]:
            raise MissingWeight(f"no alpha-beta weights for round {k}")
        return self.values[k]

    def violations(self) -> list[tuple[int, int, float]]:
        steady = self.values[1:]
        ks, ns = np.nonzero((steady < self.eta) | (steady >= 1.0))
        return [(int(k) + 1, int(n), float(steady[k, n])) for k, n in zip(ks, ns)]


def random_alpha_beta_schedule(
    node_count: int,
    horizon: int,
    rng: np.random.Generator,
    *,
    eta: float = 0.1,
    steady: float | None = None,
    round0: float | None = None,
    round0_range: tuple[float, float] = (-20.0, 20.0),
) -> AlphaBetaSchedule:
    values = np.empty((horizon + 1, node_count))
    values[0] = rng.uniform(*round0_range, size=node_count) if round0 is None else round0
    values[1:] = draw_steady(rng, (horizon, node_count), eta) if steady is None else steady
    return AlphaBetaSchedule(values, eta)


@dataclass(frozen=True, eq=False)
class DecomposedState:
    alpha: np.ndarray
    beta: np.ndarray

    def __post_init__(self) -> None:
        a = np.asarray(self.alpha, dtype=float)
        b = np.asarray(self.beta, dtype=float)
        if a.shape != b.shape or a.ndim != 1:
            raise DimensionMismatch(f"alpha {a.shape} and beta {b.shape} must be equal-length vectors")
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "beta", b)

    @classmethod
    def from_initial(cls, x0, alpha0, beta0) -> "DecomposedState":
        """Build a round-0 state, rejecting sub-states whose mean is not ``x0``."""
        x0 = np.asarray(x0, dtype=float)
        s = cls(alpha0, beta0)
        if s.alpha.shape != x0.shape:
            raise DimensionMismatch("sub-state length differs from the initial state")
        gap = np.abs(s.alpha + s.beta - 2.0 * x0)
        if np.any(gap > 1e-12 * np.maximum(1.0, np.abs(s.alpha) + np.abs(s.beta))):
            raise ValueError("alpha[0] + beta[0] must equal 2 * x[0]")
        return s

    @property
    def x(self) -> np.ndarray:
        return 0.5 * (self.alpha + self.beta)


def consensus_target(x0) -> float:
    x0 = np.asarray(x0, dtype=float)
    if x0.size == 0:
        raise EmptyInput("no initial values")
    return float(x0.mean())


def exchange(
    base: np.ndarray,
    received: np.ndarray,
    own: np.ndarray,
    t: Topology,
    weights: np.ndarray,
    eps: float,
) -> np.ndarray:
    """``base_i + eps * sum_j a_ij (received_j - own_i)`` for every node.

    All consensus-type updates in the package are this one map with different
    choices of what a node starts from, what it hears and what it compares
    against; sharing it keeps the zero-noise baselines bitwise identical to
    the plain protocol.
    """
    heads, tails = t.edge_arrays()
    acc = np.zeros_like(base)
    np.add.at(acc, heads, weights * (received[tails] - own[heads]))
    np.add.at(acc, tails, weights * (received[heads] - own[tails]))
    return base + eps * acc


def check_dim(vec: np.ndarray, t: Topology) -> None:
    if vec.shape != (t.node_count,):
        raise DimensionMismatch(f"state has shape {vec.shape}, topology has {t.node_count} nodes")


def step_standard(x, t: Topology, ws: WeightSchedule, eps: float, k: int) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    check_dim(x, t)
    return exchange(x, x, x, t, ws.at(k), eps)


def decompose(x0, rng: np.random.Generator, spread: float = 20.0) -> DecomposedState:
    """Split each value into two sub-states whose mean is the value.

    The visible part is drawn uniformly from ``x0 +- spread``; the hidden
    part is obtained by subtraction and the visible part is re-derived from
    it, which makes ``alpha + beta == 2*x0`` hold bit-exactly whenever ``x0``
    is representable at the sub-states' magnitude.
    """
    if spread <= 0:
        raise ValueError("spread must be positive")
    x0 = np.asarray(x0, dtype=float)
    alpha = rng.uniform(x0 - spread, x0 + spread)
    beta = 2.0 * x0 - alpha
    alpha = 2.0 * x0 - beta
    return DecomposedState(alpha, beta)


def step_decomposed(
    d: DecomposedState,
    t: Topology,
    ws: WeightSchedule,
    ab: AlphaBetaSchedule,
    eps: float,
    k: int,
) -> DecomposedState:
    check_dim(d.alpha, t)
    a_ab = ab.at(k)
    if a_ab.shape != d.alpha.shape:
        raise DimensionMismatch("alpha-beta schedule width differs from node count")
    alpha, beta = d.alpha, d.beta
    inner = eps * a_ab * (beta - alpha)
    alpha_next = exchange(alpha, alpha, alpha, t, ws.at(k), eps) + inner
    beta_next = beta - inner
    return DecomposedState(alpha_next, beta_next)


@dataclass(frozen=True, eq=False)
class Trace:
    """Full record of one run, private quantities included.

    ``x[k]`` is each node's state (the sub-state mean for decomposed runs),
    ``sent[k]`` what each node put on the wire at round ``k``. Row ``k`` of
    every array is round ``k``; rounds run ``0..horizon``.
    """

    protocol: str
    topology: Topology
    epsilon: float
    x0: np.ndarray
    x: np.ndarray
    sent: np.ndarray
    weights: WeightSchedule
    alpha: Optional[np.ndarray] = None
    beta: Optional[np.ndarray] = None
    alpha_beta: Optional[AlphaBetaSchedule] = None
    seed: Optional[int] = None
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"unknown protocol {self.protocol!r}")
        for name in ("x0", "x", "sent", "alpha", "beta"):
            v = getattr(self, name)
            if v is not None:
                v = np.array(v, dtype=float)
                v.setflags(write=False)
                object.__setattr__(self, name, v)
        if self.x.shape != self.sent.shape or self.x.shape[1] != self.topology.node_count:
            raise DimensionMismatch("trace arrays disagree on shape")

    @property
    def horizon(self) -> int:
        return self.x.shape[0] - 1

    @property
    def decomposed(self) -> bool:
        return self.alpha is not None

    def with_seed(self, seed: Optional[int]) -> "Trace":
        return replace(self, seed=seed)


def simulate_standard(
    t: Topology, x0, ws: WeightSchedule, eps: float, horizon: int, seed: Optional[int] = None
) -> Trace:
    x0 = np.asarray(x0, dtype=float)
    check_dim(x0, t)
    if ws.horizon < horizon:
        raise MissingWeight(f"weights end at round {ws.horizon}, horizon is {horizon}")
    xs = np.empty((horizon + 1, t.node_count))
    xs[0] = x0
    for k in range(horizon):
        xs[k + 1] = step_standard(xs[k], t, ws, eps, k)
    return Trace("standard", t, eps, x0, xs, xs, ws, seed=seed)


def simulate_decomposed(
    t: Topology,
    x0,
    initial: DecomposedState,
    ws: WeightSchedule,
    ab: AlphaBetaSchedule,
    eps: float,
    horizon: int,
    seed: Optional[int] = None,
) -> Trace:
    x0 = np.asarray(x0, dtype=float)
    check_dim(x0, t)
    for sched in (ws, ab):
        if sched.horizon < horizon:
            raise MissingWeight(f"schedule ends at round {sched.horizon}, horizon is {horizon}")
    alpha = np.empty((horizon + 1, t.node_count))
    beta = np.empty_like(alpha)
    d = initial
    alpha[0], beta[0] = d.alpha, d.beta
    for k in range(horizon):
        d = step_decomposed(d, t, ws, ab, eps, k)
        alpha[k + 1], beta[k + 1] = d.alpha, d.beta
    x = 0.5 * (alpha + beta)
    x[0] = x0
    return Trace(
        "decomposed", t, eps, x0, x, alpha, ws,
        alpha=alpha, beta=beta, alpha_beta=ab, seed=seed,
    )
