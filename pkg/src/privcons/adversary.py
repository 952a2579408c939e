"""What an attacker gets to see, and the integral observer an eavesdropper runs on it.

Traces hold every quantity of a run; this module is the only place that
decides which of them leave the simulation. A view is a per-round mapping
from field names to floats:

``x[i]``, ``alpha[i]``, ``beta[i]``   a node's own state and sub-states
``sent[p]``                          value node ``p`` put on the wire
``a[p,q]``                           edge weight, ``p < q``
``a_ab[i]``                          node ``i``'s private sub-state coupling
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

import numpy as np

from .consensus import Trace
from .graph import Edge, Topology


class UnknownNode(IndexError):
    pass


class MissingObservation(KeyError):
    pass


def _edge_key(p: int, q: int) -> str:
    if p > q:
        p, q = q, p
    return f"a[{p},{q}]"


@dataclass(frozen=True)
class HonestButCurious:
    """A participating node that follows the protocol and records what it receives."""

    node: int
    kind: str = field(default="honest-but-curious", init=False)


@dataclass(frozen=True)
class Eavesdropper:
    """External listener on a set of links.

    Args:
        target: node whose initial value the observer tries to recover.
        wiretap: tapped edges; None taps every edge.
        known_edges: edges whose weights the attacker knows; None means the
            tapped edges.
        hidden: individual ``(p, q, round)`` weight entries withheld even on
            known edges.
        assumed_weight: stand-in used by the observer for any weight it lacks.
    """

    target: int = 0
    wiretap: Optional[tuple[Edge, ...]] = None
    known_edges: Optional[tuple[Edge, ...]] = None
    hidden: tuple[tuple[int, int, int], ...] = ()
    assumed_weight: float = 0.7
    kind: str = field(default="eavesdropper", init=False)

    def tapped(self, t: Topology) -> tuple[Edge, ...]:
        if self.wiretap is None:
            return t.edges
        return tuple(sorted((min(p, q), max(p, q)) for p, q in self.wiretap))

    def known(self, t: Topology) -> tuple[Edge, ...]:
        if self.known_edges is None:
            return self.tapped(t)
        return tuple(sorted((min(p, q), max(p, q)) for p, q in self.known_edges))

    def hidden_set(self) -> set[tuple[int, int, int]]:
        return {(min(p, q), max(p, q), int(k)) for p, q, k in self.hidden}


AdversarySpec = Union[HonestButCurious, Eavesdropper]


@dataclass(frozen=True)
class AdversaryView:
    kind: str
    topology: Topology
    rounds: tuple[Mapping[str, float], ...]

    @property
    def horizon(self) -> int:
        return len(self.rounds) - 1

    def fields(self) -> set[str]:
        out: set[str] = set()
        for r in self.rounds:
            out.update(r)
        return out

    def records(self) -> list[tuple[int, str, float]]:
        """Flat ``(round, field, value)`` rows in a stable order."""
        return [(k, name, r[name]) for k, r in enumerate(self.rounds) for name in sorted(r)]


def _check_node(i: int, t: Topology) -> None:
    if not 0 <= i < t.node_count:
        raise UnknownNode(f"node {i} not in topology of {t.node_count} nodes")


def project_view(trace: Trace, adversary: AdversarySpec) -> AdversaryView:
    t = trace.topology
    rounds: list[dict[str, float]] = []
    w = trace.weights.values
    if isinstance(adversary, HonestButCurious):
        i = adversary.node
        _check_node(i, t)
        nbrs = t.neighbors[i]
        own_edges = [(p, t.edge_index(i, p)) for p in nbrs]
        for k in range(trace.horizon + 1):
            rec: dict[str, float] = {f"x[{i}]": float(trace.x[k, i])}
            if trace.decomposed:
                rec[f"alpha[{i}]"] = float(trace.alpha[k, i])
                rec[f"beta[{i}]"] = float(trace.beta[k, i])
                rec[f"a_ab[{i}]"] = float(trace.alpha_beta.values[k, i])
            else:
                rec[f"sent[{i}]"] = float(trace.sent[k, i])
            for p, e in own_edges:
                rec[f"sent[{p}]"] = float(trace.sent[k, p])
                rec[_edge_key(i, p)] = float(w[k, e])
            rounds.append(rec)
        return AdversaryView(adversary.kind, t, tuple(rounds))

    if isinstance(adversary, Eavesdropper):
        _check_node(adversary.target, t)
        tapped = adversary.tapped(t)
        nodes = sorted({v for e in tapped for v in e})
        known = [(e, t.edge_index(*e)) for e in adversary.known(t)]
        hidden = adversary.hidden_set()
        for k in range(trace.horizon + 1):
            rec = {f"sent[{p}]": float(trace.sent[k, p]) for p in nodes}
            for (p, q), e in known:
                if (p, q, k) not in hidden:
                    rec[_edge_key(p, q)] = float(w[k, e])
            rounds.append(rec)
        return AdversaryView(adversary.kind, t, tuple(rounds))

    raise TypeError(f"not an adversary spec: {adversary!r}")


@dataclass(frozen=True)
class ObserverState:
    z: float
    target: int
    assumed_weights: Mapping[Edge, float] = field(default_factory=dict)
    default_weight: float = 0.7

    def weight(self, rec: Mapping[str, float], p: int, q: int) -> float:
        key = _edge_key(p, q)
        if key in rec:
            return rec[key]
        edge = (min(p, q), max(p, q))
        return self.assumed_weights.get(edge, self.default_weight)


def _sent(rec: Mapping[str, float], p: int, k: int) -> float:
    try:
        return rec[f"sent[{p}]"]
    except KeyError:
        raise MissingObservation(f"transmission of node {p} at round {k} not in view") from None


def init_observer(view: AdversaryView, target: int, default_weight: float = 0.7,
                  assumed_weights: Optional[Mapping[Edge, float]] = None) -> ObserverState:
    return ObserverState(_sent(view.rounds[0], target, 0), target,
                         dict(assumed_weights or {}), default_weight)


def observer_step(o: ObserverState, view: AdversaryView, eps: float, k: int) -> ObserverState:
    """Accumulate the gap between the target's observed move and the plain consensus move."""
    if k + 1 > view.horizon:
        raise MissingObservation(f"no observation for round {k + 1}")
    tgt = o.target
    now, nxt = view.rounds[k], view.rounds[k + 1]
    xt = _sent(now, tgt, k)
    drift = 0.0
    for p in view.topology.neighbors[tgt]:
        drift += o.weight(now, tgt, p) * (_sent(now, p, k) - xt)
    predicted = xt + eps * drift
    return ObserverState(o.z + _sent(nxt, tgt, k + 1) - predicted, tgt, o.assumed_weights, o.default_weight)


def run_observer(trace: Trace, spy: Eavesdropper) -> np.ndarray:
    """Observer trajectory ``z[0..horizon]`` against ``trace``."""
    view = project_view(trace, spy)
    o = init_observer(view, spy.target, spy.assumed_weight)
    z = np.empty(view.horizon + 1)
    z[0] = o.z
    for k in range(view.horizon):
        o = observer_step(o, view, trace.epsilon, k)
        z[k + 1] = o.z
    return z


def estimate_initial(trajectory, truth: Optional[float] = None) -> tuple[float, Optional[float]]:
    """Final observer value and, given the true initial value, its absolute error."""
    z = np.asarray(trajectory, dtype=float)
    if z.size == 0:
        raise ValueError("empty observer trajectory")
    est = float(z[-1])
    return est, (None if truth is None else abs(est - float(truth)))
