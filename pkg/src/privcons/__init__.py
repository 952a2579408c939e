"""Privacy-preserving average consensus by state decomposition: simulators,
attacks, and executable indistinguishability checks."""

from .adversary import (
    AdversaryView,
    Eavesdropper,
    HonestButCurious,
    ObserverState,
    estimate_initial,
    observer_step,
    project_view,
    run_observer,
)
from .baselines import ObfuscationConfig, avg_err, simulate_obfuscated, step_correlated_noise, step_decaying_laplace
from .consensus import (
    AlphaBetaSchedule,
    DecomposedState,
    Trace,
    consensus_target,
    decompose,
    random_alpha_beta_schedule,
    simulate_decomposed,
    simulate_standard,
    step_decomposed,
    step_standard,
)
from .graph import (
    Topology,
    WeightSchedule,
    build_topology,
    epsilon_bound,
    is_connected,
    max_degree,
    paper_topology,
    random_connected_topology,
    random_weight_schedule,
    validate_weight_schedule,
)
from .indistinguishability import construct_alternate, verify_eavesdropper_variant, verify_indistinguishable
from .metrics import RunSummary, convergence_profile, summarize
from .scenario import PRESETS, Scenario, build_trace, load_scenario, run_indistinguishability_suite, run_scenario

__version__ = "0.1.0"
