"""Alternate-world construction and view comparison for decomposed runs.

Given a decomposed run, a target node ``j`` and a neighbour ``m`` that does
not collude with the attacker, :func:`construct_alternate` builds a second
run in which ``j`` started from any other value. ``m`` absorbs the
difference so the network sum is unchanged, the transmitted sub-states at
round 0 stay put, and three round-0 weights (``j``'s and ``m``'s private
couplings and the ``j``-``m`` edge) are re-solved so that every sub-state of
every node coincides with the original from round 1 on. Verifiers then
check that an attacker's view of the two runs is the same.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .adversary import AdversarySpec, Eavesdropper, HonestButCurious, project_view
from .consensus import AlphaBetaSchedule, DecomposedState, Trace, simulate_decomposed
from .graph import Topology, WeightSchedule

DEGENERATE_TOL = 1e-9


class NotNeighbor(ValueError):
    pass


class DegenerateDenominator(ArithmeticError):
    pass


class ShapeMismatch(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class AlternateWorld:
    topology: Topology
    epsilon: float
    target: int
    accomplice: int
    altered_initial: float
    accomplice_initial: float
    x0: np.ndarray
    initial: DecomposedState
    weights: WeightSchedule
    alpha_beta: AlphaBetaSchedule
    horizon: int
    seed: Optional[int] = None

    def simulate(self, horizon: Optional[int] = None) -> Trace:
        return simulate_decomposed(
            self.topology, self.x0, self.initial, self.weights, self.alpha_beta,
            self.epsilon, self.horizon if horizon is None else horizon, seed=self.seed,
        )


def construct_alternate(trace: Trace, j: int, m: int, altered_initial: float) -> AlternateWorld:
    """Build the world in which node ``j`` started from ``altered_initial``.

    Raises:
        NotNeighbor: ``m`` is not adjacent to ``j``.
        ValueError: the trace is not decomposed, or the altered value equals
            the original one.
        DegenerateDenominator: one of the three weight re-solves would divide
            by a sub-state difference smaller than ``1e-9``.
    """
    if not trace.decomposed:
        raise ValueError("alternate worlds are defined for decomposed runs only")
    t = trace.topology
    if not t.has_edge(j, m):
        raise NotNeighbor(f"node {m} is not a neighbour of node {j}")
    xj, xm = float(trace.x0[j]), float(trace.x0[m])
    xbar_j = float(altered_initial)
    if xbar_j == xj:
        raise ValueError("altered initial value equals the original")
    eps = trace.epsilon

    a0, b0 = trace.alpha[0], trace.beta[0]
    aj, bj, am, bm = float(a0[j]), float(b0[j]), float(a0[m]), float(b0[m])
    xbar_m = xj + xm - xbar_j
    bbar_j = 2.0 * xbar_j - aj
    bbar_m = 2.0 * xbar_m - am

    den_j, den_m, den_jm = aj - bbar_j, am - bbar_m, am - aj
    for name, den in (("j alpha-beta", den_j), ("m alpha-beta", den_m), ("j-m edge", den_jm)):
        if abs(den) < DEGENERATE_TOL:
            raise DegenerateDenominator(f"{name} denominator {den:.3g} too close to zero")

    ab0 = trace.alpha_beta.values[0]
    e_jm = t.edge_index(j, m)
    a_jm = float(trace.weights.values[0, e_jm])
    # hidden sub-states after round 0 must land where they did originally
    abar_j = (bj - bbar_j + eps * ab0[j] * (aj - bj)) / (eps * den_j)
    abar_m = (bm - bbar_m + eps * ab0[m] * (am - bm)) / (eps * den_m)
    # the j-m edge carries j's (and, symmetrically, m's) sum shift
    abar_jm = (bj - bbar_j + eps * a_jm * (am - aj)) / (eps * den_jm)

    x0 = np.array(trace.x0, dtype=float)
    x0[j], x0[m] = xbar_j, xbar_m
    beta = np.array(b0, dtype=float)
    beta[j], beta[m] = bbar_j, bbar_m
    ab = np.array(trace.alpha_beta.values)
    ab[0, j], ab[0, m] = abar_j, abar_m

    return AlternateWorld(
        topology=t,
        epsilon=eps,
        target=j,
        accomplice=m,
        altered_initial=xbar_j,
        accomplice_initial=xbar_m,
        x0=x0,
        initial=DecomposedState(np.array(a0), beta),
        weights=trace.weights.replace(0, e_jm, abar_jm),
        alpha_beta=AlphaBetaSchedule(ab, trace.alpha_beta.eta),
        horizon=trace.horizon,
        seed=trace.seed,
    )


@dataclass(frozen=True)
class Verdict:
    indistinguishable: bool
    adversary: str
    round: Optional[int] = None
    field: Optional[str] = None
    original: Optional[float] = None
    alternate: Optional[float] = None

    def __bool__(self) -> bool:
        return self.indistinguishable

    def to_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if v is not None}

    def __str__(self) -> str:
        if self.indistinguishable:
            return f"{self.adversary}: views identical"
        return (f"{self.adversary}: first divergence at round {self.round}, field {self.field}: "
                f"{self.original!r} vs {self.alternate!r}")


def _close(a: float, b: float, tol: float) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def _describe(adversary: AdversarySpec) -> str:
    if isinstance(adversary, HonestButCurious):
        return f"honest-but-curious node {adversary.node}"
    return f"eavesdropper on node {adversary.target}"


def verify_indistinguishable(original: Trace, alternate: Trace, adversary: AdversarySpec,
                             tol: float = 1e-9) -> Verdict:
    """Compare what ``adversary`` sees in two runs, field by field.

    Values match when ``|a - b| <= tol * max(1, |a|, |b|)``. A field present in
    one view and not the other counts as a divergence.
    """
    if original.topology != alternate.topology:
        raise ShapeMismatch("traces use different topologies")
    if original.horizon != alternate.horizon:
        raise ShapeMismatch(f"horizons differ: {original.horizon} vs {alternate.horizon}")
    va, vb = project_view(original, adversary), project_view(alternate, adversary)
    who = _describe(adversary)
    for k, (ra, rb) in enumerate(zip(va.rounds, vb.rounds)):
        for name in sorted(set(ra) | set(rb)):
            if name not in ra or name not in rb:
                return Verdict(False, who, k, name, ra.get(name), rb.get(name))
            if not _close(ra[name], rb[name], tol):
                return Verdict(False, who, k, name, ra[name], rb[name])
    return Verdict(True, who)


def verify_eavesdropper_variant(original: Trace, alternate: Trace, spy: Eavesdropper,
                                tol: float = 1e-9) -> Verdict:
    if not isinstance(spy, Eavesdropper):
        raise TypeError("expected an Eavesdropper spec")
    return verify_indistinguishable(original, alternate, spy, tol)


def max_state_gap(original: Trace, alternate: Trace, start: int = 1) -> float:
    """Largest relative sub-state difference over rounds ``start..horizon``."""
    if original.horizon != alternate.horizon:
        raise ShapeMismatch("horizons differ")
    gaps = []
    for a, b in ((original.alpha, alternate.alpha), (original.beta, alternate.beta)):
        a, b = a[start:], b[start:]
        if a.size:
            gaps.append(np.max(np.abs(a - b) / np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))))
    return float(max(gaps, default=0.0))


@dataclass
class TrialResult:
    target: int
    accomplice: int
    altered_initial: float
    status: str  # "pass", "fail" or "degenerate"
    observer: Optional[int] = None
    checks: dict = field(default_factory=dict)
    detail: str = ""


def run_trial(trace: Trace, j: int, m: int, altered_initial: float,
              observer: Optional[int] = None, tol: float = 1e-8) -> TrialResult:
    """Build one alternate world and run every check against it.

    Checks: the honest-but-curious ``observer`` (if given) sees nothing
    different; all sub-states agree from round 1; a full-wiretap eavesdropper
    that lacks the ``j``-``m`` round-0 weight sees nothing different, while one
    that knows it spots the change at round 0; the accomplice itself does see
    a difference (the designed failure). The last two need the change to
    exceed ``tol``; a shift far below it is invisible to everyone and the
    trial reports "fail".
    """
    res = TrialResult(j, m, altered_initial, "pass", observer)
    try:
        world = construct_alternate(trace, j, m, altered_initial)
    except DegenerateDenominator as exc:
        res.status, res.detail = "degenerate", str(exc)
        return res
    alt = world.simulate()
    lo, hi = min(j, m), max(j, m)
    blind = Eavesdropper(target=j, hidden=((lo, hi, 0),))
    sighted = Eavesdropper(target=j)

    if observer is not None:
        res.checks["honest_but_curious"] = bool(
            verify_indistinguishable(trace, alt, HonestButCurious(observer), tol))
    res.checks["states_from_round_1"] = max_state_gap(trace, alt) <= tol
    res.checks["eavesdropper_blind"] = bool(verify_eavesdropper_variant(trace, alt, blind, tol))
    seen = verify_eavesdropper_variant(trace, alt, sighted, tol)
    res.checks["eavesdropper_sighted_detects_round_0"] = (not seen) and seen.round == 0
    res.checks["accomplice_expected_fail"] = not verify_indistinguishable(
        trace, alt, HonestButCurious(m), tol)
    if not all(res.checks.values()):
        res.status = "fail"
        res.detail = ", ".join(k for k, v in res.checks.items() if not v)
    return res
