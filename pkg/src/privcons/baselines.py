"""Noise-obfuscation comparison protocols.

These are reconstructions of two well-known families, not reference
implementations of any particular published algorithm:

* ``correlated-noise``: every node broadcasts ``x + n`` where the noise
  ``n[k] = phi**k * w[k] - phi**(k-1) * w[k-1]`` telescopes, and updates from
  its own obfuscated value. The network sum drifts by ``sum(n[k])`` each round,
  which sums to ``phi**K * w[K]`` and vanishes, so the exact average survives.
* ``decaying-laplace``: every node broadcasts ``x + L`` with Laplace noise of
  scale ``noise_scale * phi**k`` and updates its true state from what it
  hears. The injected noise is never cancelled, so the limit is biased.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .consensus import Trace, check_dim, consensus_target, exchange
from .graph import MissingWeight, Topology, WeightSchedule

OBFUSCATION_KINDS = ("correlated-noise", "decaying-laplace")


@dataclass(frozen=True)
class ObfuscationConfig:
    kind: str = "correlated-noise"
    decay: float = 0.9
    noise_scale: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in OBFUSCATION_KINDS:
            raise ValueError(f"unknown obfuscation kind {self.kind!r}")
        if not 0.0 < self.decay < 1.0:
            raise ValueError(f"decay must lie in (0, 1), got {self.decay}")
        if self.noise_scale < 0:
            raise ValueError("noise_scale must be nonnegative")


def draw_noise(cfg: ObfuscationConfig, rng: np.random.Generator, horizon: int, node_count: int) -> np.ndarray:
    """Unit-scale raw draws for rounds ``0..horizon`` (Gaussian or Laplace)."""
    shape = (horizon + 1, node_count)
    if cfg.kind == "correlated-noise":
        return rng.standard_normal(shape)
    return rng.laplace(0.0, 1.0, shape)


def correlated_noise(cfg: ObfuscationConfig, draws: np.ndarray, k: int) -> np.ndarray:
    cur = cfg.noise_scale * cfg.decay**k * draws[k]
    if k == 0:
        return cur
    return cur - cfg.noise_scale * cfg.decay ** (k - 1) * draws[k - 1]


def laplace_noise(cfg: ObfuscationConfig, draws: np.ndarray, k: int) -> np.ndarray:
    return cfg.noise_scale * cfg.decay**k * draws[k]


def step_correlated_noise(
    x, cfg: ObfuscationConfig, t: Topology, ws: WeightSchedule, eps: float, k: int, draws: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """One round; returns ``(x[k+1], transmitted x+[k])``."""
    x = np.asarray(x, dtype=float)
    check_dim(x, t)
    sent = x + correlated_noise(cfg, draws, k)
    return exchange(sent, sent, sent, t, ws.at(k), eps), sent


def step_decaying_laplace(
    x, cfg: ObfuscationConfig, t: Topology, ws: WeightSchedule, eps: float, k: int, draws: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    check_dim(x, t)
    sent = x + laplace_noise(cfg, draws, k)
    return exchange(x, sent, x, t, ws.at(k), eps), sent


_STEPPERS = {
    "correlated-noise": step_correlated_noise,
    "decaying-laplace": step_decaying_laplace,
}


def simulate_obfuscated(
    t: Topology,
    x0,
    ws: WeightSchedule,
    eps: float,
    horizon: int,
    cfg: ObfuscationConfig,
    rng: np.random.Generator,
    seed: Optional[int] = None,
) -> Trace:
    x0 = np.asarray(x0, dtype=float)
    check_dim(x0, t)
    if ws.horizon < horizon:
        raise MissingWeight(f"weights end at round {ws.horizon}, horizon is {horizon}")
    draws = draw_noise(cfg, rng, horizon, t.node_count)
    step = _STEPPERS[cfg.kind]
    xs = np.empty((horizon + 1, t.node_count))
    sent = np.empty_like(xs)
    xs[0] = x0
    for k in range(horizon):
        xs[k + 1], sent[k] = step(xs[k], cfg, t, ws, eps, k, draws)
    # last row: what would be broadcast at the final round
    noise = correlated_noise if cfg.kind == "correlated-noise" else laplace_noise
    sent[horizon] = xs[horizon] + noise(cfg, draws, horizon)
    return Trace(cfg.kind, t, eps, x0, xs, sent, ws, seed=seed,
                 meta={"decay": cfg.decay, "noise_scale": cfg.noise_scale})


def avg_err(trace: Trace, x0=None) -> float:
    """Distance between the final network mean and the true initial average."""
    x0 = trace.x0 if x0 is None else x0
    final = trace.x[-1] if not trace.decomposed else np.concatenate([trace.alpha[-1], trace.beta[-1]])
    return abs(float(final.mean()) - consensus_target(x0))
