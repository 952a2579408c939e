"""Scenario documents, bundled presets, and end-to-end runs.

A scenario is a YAML mapping (``schema_version: 1``); see ``README.md`` for
the full schema. Every random quantity comes from a stream derived from the
master seed and a fixed label, so changing e.g. the noise settings leaves
the weight and sub-state draws untouched.
"""

from __future__ import annotations

import csv
import io
import json
import os
import warnings
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional, Sequence

import numpy as np
import yaml

from .adversary import AdversarySpec, Eavesdropper, HonestButCurious, estimate_initial, run_observer
from .baselines import ObfuscationConfig, simulate_obfuscated
from .consensus import (
    PROTOCOLS,
    Trace,
    decompose,
    random_alpha_beta_schedule,
    simulate_decomposed,
    simulate_standard,
)
from .graph import (
    Topology,
    TopologyError,
    build_topology,
    epsilon_bound,
    is_connected,
    max_degree,
    random_weight_schedule,
)
from .indistinguishability import TrialResult, run_trial
from .metrics import RunSummary, summarize


SCHEMA_VERSION = 1
OUT_DIR_ENV = "PRIVCONS_OUT_DIR"
_STREAMS = {"weights": 1, "alpha_beta": 2, "substates": 3, "noise": 4, "indist": 5}


class ParseError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None, field: Optional[str] = None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.line = line
        self.field = field


class ValidationError(ValueError):
    def __init__(self, problems: Sequence[str]):
        self.problems = list(problems)
        super().__init__("invalid scenario:\n  " + "\n  ".join(self.problems))


class EpsilonBoundWarning(UserWarning):
    pass


def stream(seed: int, label: str) -> np.random.Generator:
    """Independent generator for one purpose, derived from the master seed."""
    return np.random.default_rng([int(seed), _STREAMS[label]])


@dataclass(frozen=True)
class WeightParams:
    """Weight-generation knobs. ``None`` means "draw at random"."""

    eta: float = 0.1
    steady: Optional[float] = None
    round0: Optional[float] = None
    round0_range: tuple[float, float] = (-20.0, 20.0)
    alpha_beta_steady: Optional[float] = None
    alpha_beta_round0: Optional[float] = None


@dataclass(frozen=True)
class Checks:
    max_consensus_error: Optional[float] = None
    max_conservation_drift: Optional[float] = None
    max_est_err: Optional[float] = None
    min_est_err: Optional[float] = None

    def evaluate(self, summary: RunSummary) -> dict[str, tuple[float, float, bool]]:
        out: dict[str, tuple[float, float, bool]] = {}
        if self.max_consensus_error is not None:
            v = summary.final_consensus_error
            out["final_consensus_error"] = (v, self.max_consensus_error, v <= self.max_consensus_error)
        if self.max_conservation_drift is not None:
            v = summary.conservation_drift
            out["conservation_drift"] = (v, self.max_conservation_drift, v <= self.max_conservation_drift)
        for label, v in summary.est_err.items():
            if self.max_est_err is not None:
                out[f"est_err[{label}]<="] = (v, self.max_est_err, v <= self.max_est_err)
            if self.min_est_err is not None:
                out[f"est_err[{label}]>="] = (v, self.min_est_err, v >= self.min_est_err)
        return out


@dataclass(frozen=True)
class Scenario:
    name: str
    protocol: str
    node_count: int
    edges: tuple[tuple[int, int], ...]
    initial_state: tuple[float, ...]
    epsilon: float
    horizon: int = 500
    seed: int = 0
    weights: WeightParams = field(default_factory=WeightParams)
    spread: float = 20.0
    decay: float = 0.9
    noise_scale: float = 1.0
    adversaries: tuple[AdversarySpec, ...] = ()
    checks: Checks = field(default_factory=Checks)
    out_dir: str = "out"
    schema_version: int = SCHEMA_VERSION

    def topology(self) -> Topology:
        return build_topology(self.node_count, self.edges)

    def obfuscation(self) -> ObfuscationConfig:
        return ObfuscationConfig(self.protocol, self.decay, self.noise_scale)

    def with_overrides(self, **kw) -> "Scenario":
        return replace(self, **{k: v for k, v in kw.items() if v is not None})

    def to_document(self) -> dict:
        """Plain-data form that :func:`load_scenario` reads back."""
        w = self.weights
        rnd = lambda v: "random" if v is None else v  # noqa: E731
        doc: dict[str, Any] = {
            "schema_version": self.schema_version,
            "name": self.name,
            "protocol": self.protocol,
            "epsilon": self.epsilon,
            "horizon": self.horizon,
            "seed": self.seed,
            "initial_state": list(self.initial_state),
            "topology": {"nodes": self.node_count, "edges": [list(e) for e in self.edges]},
            "weights": {
                "eta": w.eta,
                "steady": rnd(w.steady),
                "round0": rnd(w.round0),
                "round0_range": list(w.round0_range),
                "alpha_beta_steady": rnd(w.alpha_beta_steady),
                "alpha_beta_round0": rnd(w.alpha_beta_round0),
            },
            "decomposition": {"spread": self.spread},
            "noise": {"decay": self.decay, "scale": self.noise_scale},
            "adversaries": [_adversary_doc(a) for a in self.adversaries],
            "checks": {k: v for k, v in self.checks.__dict__.items() if v is not None},
            "output": {"dir": self.out_dir},
        }
        return doc

    def dump(self) -> str:
        return yaml.safe_dump(self.to_document(), sort_keys=False, default_flow_style=None)


def _adversary_doc(a: AdversarySpec) -> dict:
    if isinstance(a, HonestButCurious):
        return {"kind": a.kind, "node": a.node}
    d: dict[str, Any] = {"kind": a.kind, "target": a.target,
                         "wiretap": "all" if a.wiretap is None else [list(e) for e in a.wiretap]}
    if a.known_edges is not None:
        d["known_edges"] = [list(e) for e in a.known_edges]
    if a.hidden:
        d["hidden"] = [list(h) for h in a.hidden]
    d["assumed_weight"] = a.assumed_weight
    return d


# ---------------------------------------------------------------- presets

_PAPER_EDGES = ((0, 1), (0, 4), (1, 2), (2, 4), (3, 4))
_PAPER_SPY = Eavesdropper(target=0, hidden=((0, 1, 0),), assumed_weight=0.7)


def _paper(name: str, protocol: str, **kw) -> Scenario:
    base = dict(
        name=name,
        protocol=protocol,
        node_count=5,
        edges=_PAPER_EDGES,
        initial_state=(1.0, 2.0, 3.0, 4.0, 5.0),
        epsilon=1.0 / 3.0,
        adversaries=(_PAPER_SPY,),
        out_dir=f"out/{name}",
    )
    base.update(kw)
    return Scenario(**base)


PRESETS: dict[str, Scenario] = {
    "paper-standard": _paper(
        "paper-standard", "standard", horizon=200,
        weights=WeightParams(steady=0.75, round0=0.75),
        adversaries=(Eavesdropper(target=0),),
        checks=Checks(max_consensus_error=1e-6, max_est_err=1e-9),
    ),
    "paper-fig3": _paper(
        "paper-fig3", "correlated-noise", horizon=200,
        weights=WeightParams(steady=0.75, round0=0.75),
        checks=Checks(max_consensus_error=1e-6, max_est_err=0.05),
    ),
    "paper-fig4": _paper(
        "paper-fig4", "correlated-noise", horizon=200, decay=0.8,
        weights=WeightParams(steady=0.75, round0=0.75),
        checks=Checks(max_consensus_error=1e-6, max_est_err=0.05),
    ),
    "paper-fig5": _paper(
        "paper-fig5", "decomposed", horizon=500,
        weights=WeightParams(steady=0.75, round0_range=(-20.0, 20.0)),
        spread=20.0,
        checks=Checks(max_consensus_error=1e-6, max_conservation_drift=1e-9),
    ),
    "paper-fig6": _paper(
        "paper-fig6", "decaying-laplace", horizon=200, noise_scale=1.0,
        weights=WeightParams(steady=0.75, round0=0.75),
    ),
}

FIG6_NOISE_SCALES = (0.1, 1.0, 10.0)


# ---------------------------------------------------------------- parsing

_TOP_KEYS = {"schema_version", "name", "protocol", "epsilon", "horizon", "seed", "initial_state",
             "topology", "weights", "decomposition", "noise", "adversaries", "checks", "output"}


def _num(value: Any, name: str, problems: list[str]) -> Optional[float]:
    try:
        if isinstance(value, bool):
            raise TypeError
        if isinstance(value, str):
            return float(Fraction(value.strip()))
        return float(value)
    except (TypeError, ValueError, ZeroDivisionError):
        problems.append(f"{name}: expected a number, got {value!r}")
        return None


def _opt_num(value: Any, name: str, problems: list[str]) -> Optional[float]:
    if value is None or value == "random":
        return None
    return _num(value, name, problems)


def _section(doc: dict, key: str) -> dict:
    sec = doc.get(key) or {}
    if not isinstance(sec, dict):
        raise ParseError("expected a mapping", field=key)
    return sec


def _parse_adversary(raw: Any, idx: int, problems: list[str]) -> Optional[AdversarySpec]:
    where = f"adversaries[{idx}]"
    if not isinstance(raw, dict):
        problems.append(f"{where}: expected a mapping")
        return None
    kind = raw.get("kind")
    try:
        if kind == "honest-but-curious":
            return HonestButCurious(int(raw["node"]))
        if kind == "eavesdropper":
            wiretap = raw.get("wiretap", "all")
            known = raw.get("known_edges")
            return Eavesdropper(
                target=int(raw.get("target", 0)),
                wiretap=None if wiretap == "all" else tuple(tuple(int(v) for v in e) for e in wiretap),
                known_edges=None if known in (None, "wiretap") else tuple(tuple(int(v) for v in e) for e in known),
                hidden=tuple(tuple(int(v) for v in h) for h in raw.get("hidden", ())),
                assumed_weight=float(raw.get("assumed_weight", 0.7)),
            )
    except (KeyError, TypeError, ValueError) as exc:
        problems.append(f"{where}: malformed ({exc})")
        return None
    problems.append(f"{where}: unknown kind {kind!r}")
    return None


def parse_document(doc: Any) -> Scenario:
    if doc is None:
        raise ParseError("empty scenario document")
    if not isinstance(doc, dict):
        raise ParseError("scenario document must be a mapping")
    problems: list[str] = []
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        problems.append(f"unknown keys: {sorted(unknown)}")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        problems.append(f"schema_version: expected {SCHEMA_VERSION}, got {version!r}")
    protocol = doc.get("protocol")
    if protocol not in PROTOCOLS:
        problems.append(f"protocol: expected one of {PROTOCOLS}, got {protocol!r}")

    topo = _section(doc, "topology")
    w = _section(doc, "weights")
    dec = _section(doc, "decomposition")
    noise = _section(doc, "noise")
    chk = _section(doc, "checks")
    out = _section(doc, "output")

    try:
        edges = tuple((int(a), int(b)) for a, b in topo.get("edges", []))
    except (TypeError, ValueError):
        raise ParseError("edges must be a list of node pairs", field="topology.edges") from None
    r0 = w.get("round0_range", [-20.0, 20.0])
    if not (isinstance(r0, (list, tuple)) and len(r0) == 2):
        problems.append("weights.round0_range: expected [low, high]")
        r0 = (-20.0, 20.0)
    adversaries = tuple(
        a for a in (_parse_adversary(raw, n, problems) for n, raw in enumerate(doc.get("adversaries") or []))
        if a is not None
    )
    initial = doc.get("initial_state")
    if not isinstance(initial, list):
        problems.append("initial_state: expected a list of numbers")
        initial = []

    def num(v, name, default=None):
        return default if v is None and default is not None else _num(v, name, problems)

    scen = Scenario(
        name=str(doc.get("name", "scenario")),
        protocol=str(protocol),
        node_count=int(num(topo.get("nodes"), "topology.nodes") or 0),
        edges=edges,
        initial_state=tuple(num(v, f"initial_state[{n}]") or 0.0 for n, v in enumerate(initial)),
        epsilon=num(doc.get("epsilon"), "epsilon") or 0.0,
        horizon=int(num(doc.get("horizon"), "horizon", 500) or 0),
        seed=int(num(doc.get("seed"), "seed", 0) or 0),
        weights=WeightParams(
            eta=num(w.get("eta"), "weights.eta", 0.1),
            steady=_opt_num(w.get("steady"), "weights.steady", problems),
            round0=_opt_num(w.get("round0"), "weights.round0", problems),
            round0_range=tuple(num(v, "weights.round0_range") or 0.0 for v in r0),
            alpha_beta_steady=_opt_num(w.get("alpha_beta_steady"), "weights.alpha_beta_steady", problems),
            alpha_beta_round0=_opt_num(w.get("alpha_beta_round0"), "weights.alpha_beta_round0", problems),
        ),
        spread=num(dec.get("spread"), "decomposition.spread", 20.0),
        decay=num(noise.get("decay"), "noise.decay", 0.9),
        noise_scale=num(noise.get("scale"), "noise.scale", 1.0),
        adversaries=adversaries,
        checks=Checks(**{k: _num(v, f"checks.{k}", problems) for k, v in chk.items()
                         if k in Checks.__dataclass_fields__}),
        out_dir=str(out.get("dir", "out")),
        schema_version=int(version) if isinstance(version, int) else SCHEMA_VERSION,
    )
    unknown_checks = set(chk) - set(Checks.__dataclass_fields__)
    if unknown_checks:
        problems.append(f"checks: unknown keys {sorted(unknown_checks)}")
    if problems:
        raise ValidationError(problems)
    validate(scen)
    return scen


def validate(s: Scenario) -> None:
    """Raise :class:`ValidationError` listing every problem; warn on a large step size."""
    problems: list[str] = []
    t = None
    try:
        t = s.topology()
    except TopologyError as exc:
        problems.append(f"topology: {exc}")
    if t is not None:
        if not is_connected(t):
            problems.append("topology: graph is not connected")
        if len(s.initial_state) != t.node_count:
            problems.append(f"initial_state: {len(s.initial_state)} values for {t.node_count} nodes")
    if not s.epsilon > 0:
        problems.append("epsilon: must be positive")
    if s.horizon < 0:
        problems.append("horizon: must be nonnegative")
    if s.seed < 0:
        problems.append("seed: must be nonnegative")
    w = s.weights
    if not 0.0 < w.eta < 1.0:
        problems.append("weights.eta: must lie in (0, 1)")
    for name in ("steady", "alpha_beta_steady"):
        v = getattr(w, name)
        if v is not None and not w.eta <= v < 1.0:
            problems.append(f"weights.{name}: {v} outside [eta, 1)")
    if w.round0_range[0] > w.round0_range[1]:
        problems.append("weights.round0_range: low exceeds high")
    if s.spread <= 0:
        problems.append("decomposition.spread: must be positive")
    if not 0.0 < s.decay < 1.0:
        problems.append("noise.decay: must lie in (0, 1)")
    if s.noise_scale < 0:
        problems.append("noise.scale: must be nonnegative")
    for n, a in enumerate(s.adversaries):
        node = a.node if isinstance(a, HonestButCurious) else a.target
        if not 0 <= node < s.node_count:
            problems.append(f"adversaries[{n}]: node {node} out of range")
        if isinstance(a, Eavesdropper) and t is not None:
            for e in (a.wiretap or ()) + (a.known_edges or ()):
                if not t.has_edge(*e):
                    problems.append(f"adversaries[{n}]: {tuple(e)} is not an edge")
    if problems:
        raise ValidationError(problems)

    decomposed = s.protocol == "decomposed"
    delta = max_degree(t)
    if delta > 0 or decomposed:
        bound = epsilon_bound(delta, decomposed)
        if s.epsilon > bound * (1 + 1e-12):
            msg = (f"{s.name}: epsilon {s.epsilon:.6g} exceeds the {'decomposed ' if decomposed else ''}"
                   f"step bound {bound:.6g} for max degree {delta}")
            warnings.warn(msg, EpsilonBoundWarning, stacklevel=3)


def load_scenario(source: str) -> Scenario:
    """Load a preset name, a path to a YAML file, or inline YAML text."""
    if source in PRESETS:
        scen = PRESETS[source]
        validate(scen)
        return scen
    text = source
    if "\n" not in source and source.strip():
        path = Path(source)
        if path.is_file():
            text = path.read_text()
        elif ":" not in source:
            raise FileNotFoundError(f"no preset or scenario file named {source!r}")
    if not text.strip():
        raise ParseError("empty scenario document")
    try:
        doc = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ParseError(f"malformed YAML: {getattr(exc, 'problem', exc)}",
                         line=None if mark is None else mark.line + 1) from None
    return parse_document(doc)


# ---------------------------------------------------------------- running

def build_trace(s: Scenario) -> Trace:
    """Simulate the scenario's protocol; deterministic in ``s.seed``."""
    t = s.topology()
    w = s.weights
    ws = random_weight_schedule(
        t, s.horizon, stream(s.seed, "weights"), eta=w.eta,
        steady=w.steady, round0=w.round0, round0_range=w.round0_range,
    )
    x0 = np.asarray(s.initial_state, dtype=float)
    if s.protocol == "standard":
        return simulate_standard(t, x0, ws, s.epsilon, s.horizon, seed=s.seed)
    if s.protocol == "decomposed":
        ab = random_alpha_beta_schedule(
            t.node_count, s.horizon, stream(s.seed, "alpha_beta"), eta=w.eta,
            steady=w.alpha_beta_steady, round0=w.alpha_beta_round0, round0_range=w.round0_range,
        )
        d0 = decompose(x0, stream(s.seed, "substates"), s.spread)
        return simulate_decomposed(t, x0, d0, ws, ab, s.epsilon, s.horizon, seed=s.seed)
    return simulate_obfuscated(t, x0, ws, s.epsilon, s.horizon, s.obfuscation(),
                               stream(s.seed, "noise"), seed=s.seed)


def adversary_label(a: AdversarySpec) -> str:
    if isinstance(a, HonestButCurious):
        return f"honest-but-curious@{a.node}"
    return f"eavesdropper@{a.target}"


@dataclass
class RunResult:
    scenario: Scenario
    trace: Trace
    observers: dict[str, np.ndarray]
    summary: RunSummary
    checks: dict[str, tuple[float, float, bool]]

    @property
    def passed(self) -> bool:
        return all(ok for _, _, ok in self.checks.values())


def evaluate(s: Scenario) -> RunResult:
    trace = build_trace(s)
    observers: dict[str, np.ndarray] = {}
    results: dict[str, tuple[float, float]] = {}
    for a in s.adversaries:
        if isinstance(a, Eavesdropper):
            label = adversary_label(a)
            z = run_observer(trace, a)
            observers[label] = z
            est, err = estimate_initial(z, trace.x0[a.target])
            results[label] = (est, err)
    summary = summarize(trace, results)
    return RunResult(s, trace, observers, summary, s.checks.evaluate(summary))


def _fmt(v: float) -> str:
    return repr(float(v))


def trace_csv(trace: Trace) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["round", "node", "role", "value"])
    roles: list[tuple[str, np.ndarray]] = [("x", trace.x)]
    if trace.decomposed:
        roles += [("alpha", trace.alpha), ("beta", trace.beta)]
    elif trace.protocol != "standard":
        roles.append(("transmitted", trace.sent))
    for k in range(trace.horizon + 1):
        for i in range(trace.topology.node_count):
            for role, arr in roles:
                wr.writerow([k, i, role, _fmt(arr[k, i])])
    return buf.getvalue()


def weights_csv(trace: Trace) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["round", "edge", "weight"])
    edges = trace.topology.edges
    for k in range(trace.horizon + 1):
        for (p, q), v in zip(edges, trace.weights.values[k]):
            wr.writerow([k, f"{p}-{q}", _fmt(v)])
        if trace.alpha_beta is not None:
            for i, v in enumerate(trace.alpha_beta.values[k]):
                wr.writerow([k, f"ab:{i}", _fmt(v)])
    return buf.getvalue()


def observer_csv(target: int, z: np.ndarray) -> str:
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["round", "node", "role", "value"])
    for k, v in enumerate(z):
        wr.writerow([k, target, "observer_z", _fmt(v)])
    return buf.getvalue()


def summary_text(res: RunResult) -> str:
    d = res.summary.to_dict()
    lines = [f"scenario = {res.scenario.name}"]
    for k, v in d.items():
        if isinstance(v, dict):
            for sub, sv in v.items():
                lines.append(f"{k}[{sub}] = {sv!r}")
        else:
            lines.append(f"{k} = {v!r}")
    for name, (v, limit, ok) in res.checks.items():
        lines.append(f"check {name}: {v!r} vs {limit!r} -> {'PASS' if ok else 'FAIL'}")
    block = {"scenario": res.scenario.name, "summary": d,
             "checks": {k: {"value": v, "limit": lim, "pass": ok} for k, (v, lim, ok) in res.checks.items()}}
    return "\n".join(lines) + "\n\n# machine-readable\n" + json.dumps(block, sort_keys=True) + "\n"


def resolve_out_dir(s: Scenario, override: Optional[str] = None) -> Path:
    if override:
        return Path(override)
    env = os.environ.get(OUT_DIR_ENV)
    if env:
        return Path(env) / s.name
    return Path(s.out_dir)


def run_scenario(s: Scenario, out_dir: Optional[str | Path] = None) -> tuple[dict[str, Path], RunResult]:
    """Simulate, then write ``trace.csv``, ``weights.csv``, one observer CSV per
    eavesdropper, and ``summary.txt``."""
    res = evaluate(s)
    out = Path(out_dir) if out_dir is not None else resolve_out_dir(s)
    out.mkdir(parents=True, exist_ok=True)
    files = {"trace": out / "trace.csv", "weights": out / "weights.csv", "summary": out / "summary.txt"}
    files["trace"].write_text(trace_csv(res.trace))
    files["weights"].write_text(weights_csv(res.trace))
    n = 0
    for a in s.adversaries:
        if isinstance(a, Eavesdropper):
            path = out / f"observer_{n}.csv"
            path.write_text(observer_csv(a.target, res.observers[adversary_label(a)]))
            files[f"observer_{n}"] = path
            n += 1
    files["summary"].write_text(summary_text(res))
    return files, res


# ---------------------------------------------------------------- suites

@dataclass
class SuiteReport:
    trials: list[TrialResult] = field(default_factory=list)

    def count(self, status: str) -> int:
        return sum(1 for t in self.trials if t.status == status)

    @property
    def passed(self) -> int:
        return self.count("pass")

    @property
    def failed(self) -> int:
        return self.count("fail")

    @property
    def degenerate(self) -> int:
        return self.count("degenerate")

    @property
    def expected_fail(self) -> int:
        return sum(1 for t in self.trials if t.checks.get("accomplice_expected_fail"))

    def to_dict(self) -> dict:
        return {"trials": len(self.trials), "pass": self.passed, "fail": self.failed,
                "degenerate": self.degenerate, "expected_fail": self.expected_fail}

    def text(self) -> str:
        lines = [f"{k} = {v}" for k, v in self.to_dict().items()]
        for t in self.trials:
            if t.status != "pass":
                lines.append(f"  j={t.target} m={t.accomplice} xbar={t.altered_initial!r}: {t.status} {t.detail}")
        return "\n".join(lines) + "\n\n# machine-readable\n" + json.dumps(self.to_dict(), sort_keys=True) + "\n"


def run_indistinguishability_suite(s: Scenario, trials: int, tol: float = 1e-8,
                                   trace: Optional[Trace] = None) -> SuiteReport:
    """Random alternate-world trials against one decomposed run of ``s``.

    Each trial picks a target ``j`` with at least one neighbour, an accomplice
    ``m`` among its neighbours, an altered initial value within 50 of the
    original, and (if one exists) an honest-but-curious observer outside
    ``{j, m}``.
    """
    if s.protocol != "decomposed":
        raise ValueError("the indistinguishability suite needs a decomposed scenario")
    trace = build_trace(s) if trace is None else trace
    t = trace.topology
    rng = stream(s.seed, "indist")
    report = SuiteReport()
    candidates = [i for i in range(t.node_count) if t.neighbors[i]]
    for _ in range(trials):
        j = int(rng.choice(candidates))
        m = int(rng.choice(t.neighbors[j]))
        shift = 0.0
        while shift == 0.0:
            shift = float(rng.uniform(-50.0, 50.0))
        others = [i for i in range(t.node_count) if i not in (j, m)]
        observer = int(rng.choice(others)) if others else None
        report.trials.append(run_trial(trace, j, m, float(trace.x0[j]) + shift, observer, tol))
    return report


def _sweep_one(args: tuple[Scenario, int, float]) -> dict:
    s, seed, scale = args
    res = evaluate(s.with_overrides(seed=seed, noise_scale=scale))
    row = {"seed": seed, "noise_scale": scale, "avg_err": res.summary.avg_err,
           "final_consensus_error": res.summary.final_consensus_error}
    for label, v in res.summary.est_err.items():
        row[f"est_err[{label}]"] = v
    return row


def sweep(s: Scenario, seeds: Sequence[int], noise_scales: Sequence[float], workers: int = 1) -> list[dict]:
    """Run every (seed, noise scale) pair; rows come back in input order."""
    jobs = [(s, int(seed), float(scale)) for scale in noise_scales for seed in seeds]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(_sweep_one, jobs))
    return [_sweep_one(j) for j in jobs]


def sweep_medians(rows: list[dict]) -> dict[float, dict[str, float]]:
    out: dict[float, dict[str, float]] = {}
    for scale in sorted({r["noise_scale"] for r in rows}):
        sub = [r for r in rows if r["noise_scale"] == scale]
        keys = [k for k in sub[0] if k not in ("seed", "noise_scale")]
        out[scale] = {k: float(np.median([r[k] for r in sub])) for k in keys}
    return out


def sweep_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    wr = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    wr.writeheader()
    for r in rows:
        wr.writerow({k: (_fmt(v) if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()
