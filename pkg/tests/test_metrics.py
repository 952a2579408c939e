import numpy as np
import pytest
from hypothesis import given, strategies as st

from privcons.consensus import decompose, random_alpha_beta_schedule, simulate_decomposed, simulate_standard
from privcons.graph import epsilon_bound, max_degree, random_connected_topology, random_weight_schedule
from privcons.metrics import conservation_drift, convergence_profile, rounds_to_tolerance, summarize

EPS = 1 / 3


def test_profile_at_horizon_zero(paper, paper_x0, const_weights):
    tr = simulate_standard(paper, paper_x0, const_weights(0), EPS, 0)
    assert convergence_profile(tr).tolist() == [2.0]


def test_uniform_input_has_zero_profile(paper, const_weights):
    tr = simulate_standard(paper, np.full(5, 7.0), const_weights(20), EPS, 20)
    assert np.all(convergence_profile(tr) == 0.0)
    assert rounds_to_tolerance(convergence_profile(tr)) == 0
    assert conservation_drift(tr) == 0.0


def test_rounds_to_tolerance_examples():
    assert rounds_to_tolerance([1.0, 0.5, 1e-7, 1e-8]) == 2
    assert rounds_to_tolerance([1.0, 1e-7, 0.1, 1e-8]) == 3
    assert rounds_to_tolerance([1.0, 0.5]) is None
    assert rounds_to_tolerance([0.5, 0.4], tol=1.0) == 0


@given(st.integers(0, 2**32 - 1))
def test_tail_of_standard_profile_is_nonincreasing(seed):
    rng = np.random.default_rng(seed)
    t = random_connected_topology(int(rng.integers(2, 8)), rng)
    x0 = rng.uniform(-10, 10, t.node_count)
    ws = random_weight_schedule(t, 300, rng, round0_range=(0.1, 0.9))
    tr = simulate_standard(t, x0, ws, epsilon_bound(max_degree(t), False), 300)
    tail = convergence_profile(tr)[-50:]
    # round-off floor: one ulp of the state scale per step
    floor = 1e-13 * max(1.0, float(np.max(np.abs(x0))))
    assert np.all(np.diff(tail) <= floor)


def test_decomposed_profile_counts_both_substates(paper, paper_x0):
    rng = np.random.default_rng(0)
    ws = random_weight_schedule(paper, 2, rng)
    ab = random_alpha_beta_schedule(5, 2, rng)
    d0 = decompose(paper_x0, rng)
    tr = simulate_decomposed(paper, paper_x0, d0, ws, ab, EPS, 2)
    expected = max(np.max(np.abs(d0.alpha - 3.0)), np.max(np.abs(d0.beta - 3.0)))
    assert convergence_profile(tr)[0] == expected


def test_summarize_is_pure_and_omits_est_err(paper, paper_x0, const_weights):
    tr = simulate_standard(paper, paper_x0, const_weights(100), EPS, 100)
    before = tr.x.copy()
    a, b = summarize(tr), summarize(tr)
    assert a == b
    assert np.array_equal(tr.x, before)
    d = a.to_dict()
    assert "est_err" not in d and "estimates" not in d
    assert d["target"] == 3.0 and d["protocol"] == "standard"
    assert d["final_consensus_error"] < 1e-6


def test_summarize_with_adversary(paper, paper_x0, const_weights):
    tr = simulate_standard(paper, paper_x0, const_weights(10), EPS, 10)
    s = summarize(tr, {"spy": (1.25, 0.25)})
    assert s.est_err == {"spy": 0.25} and s.estimates == {"spy": 1.25}
    assert s.to_dict()["est_err"] == {"spy": 0.25}
    assert s.avg_err == pytest.approx(0.0, abs=1e-12)
