"""Convergence and privacy summaries of a run."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Mapping, Optional

import numpy as np

from .consensus import Trace, consensus_target

DEFAULT_TOLERANCE = 1e-6


def _node_values(trace: Trace) -> np.ndarray:
    """(rounds, n) array of every value that has to reach the average."""
    if trace.decomposed:
        return np.concatenate([trace.alpha, trace.beta], axis=1)
    return trace.x


def convergence_profile(trace: Trace, target: Optional[float] = None) -> np.ndarray:
    """Per-round worst deviation of any (sub-)state from ``target``."""
    if target is None:
        target = consensus_target(trace.x0)
    return np.max(np.abs(_node_values(trace) - target), axis=1)


def rounds_to_tolerance(profile, tol: float = DEFAULT_TOLERANCE) -> Optional[int]:
    """First round after which the profile stays within ``tol`` through the horizon."""
    profile = np.asarray(profile)
    above = np.nonzero(profile > tol)[0]
    if above.size == 0:
        return 0
    k = int(above[-1]) + 1
    return k if k < profile.size else None


def conservation_drift(trace: Trace) -> float:
    """Max over rounds of how far the network sum strays from its round-0 value.

    Decomposed runs count both sub-states, against ``2 * sum(x0)``.
    """
    vals = _node_values(trace)
    ref = (2.0 if trace.decomposed else 1.0) * float(np.sum(trace.x0))
    return float(np.max(np.abs(vals.sum(axis=1) - ref)))


@dataclass
class RunSummary:
    protocol: str
    seed: Optional[int]
    horizon: int
    target: float
    final_consensus_error: float
    avg_err: float
    rounds_to_tolerance: Optional[int]
    conservation_drift: float
    est_err: dict[str, float] = field(default_factory=dict)
    estimates: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        if not self.est_err:
            d.pop("est_err")
            d.pop("estimates")
        return d


def summarize(
    trace: Trace,
    adversary_results: Optional[Mapping[str, tuple[float, float]]] = None,
    tol: float = DEFAULT_TOLERANCE,
) -> RunSummary:
    """Collect headline numbers for a run.

    ``adversary_results`` maps an adversary label to ``(estimate, est_err)``.
    """
    target = consensus_target(trace.x0)
    profile = convergence_profile(trace, target)
    final_mean = float(_node_values(trace)[-1].mean())
    results = dict(adversary_results or {})
    return RunSummary(
        protocol=trace.protocol,
        seed=trace.seed,
        horizon=trace.horizon,
        target=target,
        final_consensus_error=float(profile[-1]),
        avg_err=abs(final_mean - target),
        rounds_to_tolerance=rounds_to_tolerance(profile, tol),
        conservation_drift=conservation_drift(trace),
        est_err={k: float(v[1]) for k, v in results.items()},
        estimates={k: float(v[0]) for k, v in results.items()},
    )
