import json
import warnings

import numpy as np
import pytest
import yaml

from privcons import cli
from privcons.adversary import Eavesdropper, HonestButCurious
from privcons.scenario import (
    OUT_DIR_ENV,
    PRESETS,
    EpsilonBoundWarning,
    ParseError,
    ValidationError,
    build_trace,
    evaluate,
    load_scenario,
    resolve_out_dir,
    run_indistinguishability_suite,
    run_scenario,
    stream,
    sweep,
    sweep_csv,
    sweep_medians,
    trace_csv,
    weights_csv,
)

SMALL = """
schema_version: 1
name: tiny
protocol: decomposed
epsilon: 1/5
horizon: 30
seed: 4
initial_state: [1, 2, 3]
topology:
  nodes: 3
  edges: [[0, 1], [1, 2]]
adversaries:
  - {kind: eavesdropper, target: 0, hidden: [[0, 1, 0]]}
  - {kind: honest-but-curious, node: 2}
checks:
  max_conservation_drift: 1.0e-9
"""


# ---- loading

def test_presets_describe_the_benchmark():
    fig3 = load_scenario("paper-fig3")
    assert fig3.protocol == "correlated-noise" and fig3.node_count == 5
    assert fig3.topology().edges == ((0, 1), (0, 4), (1, 2), (2, 4), (3, 4))
    spy = fig3.adversaries[0]
    assert isinstance(spy, Eavesdropper) and spy.target == 0
    assert spy.hidden == ((0, 1, 0),) and spy.assumed_weight == 0.7
    fig5 = load_scenario("paper-fig5")
    assert fig5.protocol == "decomposed" and fig5.weights.round0_range == (-20.0, 20.0)
    assert fig5.weights.round0 is None
    assert load_scenario("paper-fig4").decay != fig3.decay
    assert load_scenario("paper-fig6").protocol == "decaying-laplace"


def test_inline_document_parses():
    s = load_scenario(SMALL)
    assert s.epsilon == pytest.approx(0.2)
    assert s.initial_state == (1.0, 2.0, 3.0)
    assert s.adversaries[1] == HonestButCurious(2)
    assert s.checks.max_conservation_drift == 1e-9


def test_file_path_loads(tmp_path):
    p = tmp_path / "tiny.yaml"
    p.write_text(SMALL)
    assert load_scenario(str(p)).name == "tiny"


@pytest.mark.parametrize("text", ["", "   \n", "# only a comment\n"])
def test_empty_document_is_a_parse_error(text):
    with pytest.raises(ParseError):
        load_scenario(text)


def test_malformed_yaml_reports_line():
    with pytest.raises(ParseError) as info:
        load_scenario("name: x\nprotocol: [standard\nhorizon: 3\n")
    assert info.value.line is not None and info.value.line >= 2


def test_missing_file():
    with pytest.raises(FileNotFoundError):
        load_scenario("no-such-scenario")


def test_validation_lists_every_problem():
    doc = yaml.safe_load(SMALL)
    doc.update(protocol="telepathy", initial_state=[1, 2], horizon=-1, bogus=3)
    doc["topology"]["edges"] = [[0, 1]]
    with pytest.raises(ValidationError) as info:
        load_scenario(yaml.safe_dump(doc))
    text = "\n".join(info.value.problems)
    assert "protocol" in text and "unknown keys" in text
    doc["protocol"] = "decomposed"
    doc.pop("bogus")
    with pytest.raises(ValidationError) as info:
        load_scenario(yaml.safe_dump(doc))
    problems = info.value.problems
    assert any("not connected" in p for p in problems)
    assert any("initial_state" in p for p in problems)
    assert any("horizon" in p for p in problems)


def test_bad_adversary_edge_and_steady_weight():
    doc = yaml.safe_load(SMALL)
    doc["adversaries"] = [{"kind": "eavesdropper", "target": 0, "wiretap": [[0, 2]]}]
    doc["weights"] = {"steady": 1.0}
    with pytest.raises(ValidationError) as info:
        load_scenario(yaml.safe_dump(doc))
    assert len(info.value.problems) == 2


def test_epsilon_bound_warning():
    with pytest.warns(EpsilonBoundWarning, match="exceeds"):
        load_scenario("paper-fig5")
    with warnings.catch_warnings():
        warnings.simplefilter("error", EpsilonBoundWarning)
        load_scenario(SMALL)  # 1/5 <= 1/(2+1)


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_dump_round_trips(name):
    s = PRESETS[name]
    assert load_scenario(s.dump()) == s


# ---- running

def test_streams_are_independent():
    a = stream(3, "weights").random(4)
    b = stream(3, "noise").random(4)
    assert not np.array_equal(a, b)
    assert np.array_equal(a, stream(3, "weights").random(4))


def test_changing_noise_scale_keeps_weights():
    s = load_scenario("paper-fig6")
    a, b = build_trace(s), build_trace(s.with_overrides(noise_scale=5.0))
    assert np.array_equal(a.weights.values, b.weights.values)


def test_run_writes_expected_files(tmp_path):
    s = load_scenario(SMALL)
    files, res = run_scenario(s, tmp_path)
    assert sorted(p.name for p in tmp_path.iterdir()) == ["observer_0.csv", "summary.txt", "trace.csv",
                                                         "weights.csv"]
    trace_rows = files["trace"].read_text().splitlines()
    assert trace_rows[0] == "round,node,role,value"
    assert len(trace_rows) - 1 == (s.horizon + 1) * 3 * 3
    weight_rows = files["weights"].read_text().splitlines()
    assert weight_rows[0] == "round,edge,weight"
    assert len(weight_rows) - 1 == (s.horizon + 1) * (2 + 3)
    obs = files["observer_0"].read_text().splitlines()
    assert len(obs) - 1 == s.horizon + 1 and obs[1].startswith("0,0,observer_z,")
    summary = files["summary"].read_text()
    assert "conservation_drift = " in summary
    block = json.loads(summary.split("# machine-readable\n")[1])
    assert block["checks"]["conservation_drift"]["pass"] is True
    assert res.passed


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_roles_per_protocol(name):
    s = PRESETS[name].with_overrides(horizon=3)
    text = trace_csv(build_trace(s))
    roles = {line.split(",")[2] for line in text.splitlines()[1:]}
    expected = {"standard": {"x"}, "decomposed": {"x", "alpha", "beta"}}.get(s.protocol, {"x", "transmitted"})
    assert roles == expected


def test_byte_identical_reruns(tmp_path):
    s = load_scenario("paper-fig5")
    run_scenario(s, tmp_path / "a")
    run_scenario(s, tmp_path / "b")
    for f in ("trace.csv", "weights.csv", "observer_0.csv", "summary.txt"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
    other = s.with_overrides(seed=1)
    assert trace_csv(build_trace(other)) != (tmp_path / "a" / "trace.csv").read_text()


def test_preset_summaries():
    fig5 = evaluate(load_scenario("paper-fig5"))
    assert fig5.summary.final_consensus_error < 1e-6
    assert fig5.summary.est_err["eavesdropper@0"] > 0.05
    assert fig5.passed
    std = evaluate(load_scenario("paper-standard"))
    assert std.summary.est_err["eavesdropper@0"] <= 1e-9 and std.passed


def test_weights_csv_names_edges():
    tr = build_trace(load_scenario(SMALL).with_overrides(horizon=0))
    rows = weights_csv(tr).splitlines()[1:]
    assert [r.split(",")[1] for r in rows] == ["0-1", "1-2", "ab:0", "ab:1", "ab:2"]


def test_out_dir_resolution(monkeypatch, tmp_path):
    s = load_scenario(SMALL)
    monkeypatch.delenv(OUT_DIR_ENV, raising=False)
    assert str(resolve_out_dir(s)) == "out"
    monkeypatch.setenv(OUT_DIR_ENV, str(tmp_path))
    assert resolve_out_dir(s) == tmp_path / "tiny"
    assert str(resolve_out_dir(s, "elsewhere")) == "elsewhere"


# ---- suites

def test_indistinguishability_suite_on_paper():
    s = load_scenario("paper-fig5").with_overrides(horizon=60)
    rep = run_indistinguishability_suite(s, 100)
    assert rep.passed + rep.degenerate == 100 and rep.failed == 0
    assert rep.expected_fail == rep.passed
    assert rep.to_dict()["trials"] == 100


def test_indistinguishability_suite_edge_cases():
    s = load_scenario("paper-fig5").with_overrides(horizon=5)
    assert run_indistinguishability_suite(s, 0).to_dict() == {
        "trials": 0, "pass": 0, "fail": 0, "degenerate": 0, "expected_fail": 0}
    with pytest.raises(ValueError):
        run_indistinguishability_suite(load_scenario("paper-fig3"), 1)


def test_sweep_rows_and_medians():
    s = load_scenario("paper-fig6").with_overrides(horizon=50)
    rows = sweep(s, [0, 1, 2], [0.1, 10.0])
    assert [(r["seed"], r["noise_scale"]) for r in rows] == [(0, 0.1), (1, 0.1), (2, 0.1),
                                                            (0, 10.0), (1, 10.0), (2, 10.0)]
    med = sweep_medians(rows)
    assert med[0.1]["avg_err"] <= med[10.0]["avg_err"]
    assert sweep_csv(rows).splitlines()[0].startswith("seed,noise_scale,avg_err")
    assert sweep(s, [0, 1], [1.0], workers=2) == sweep(s, [0, 1], [1.0])


# ---- CLI

def test_seed_range_parsing():
    assert cli.parse_seed_range("3..6") == [3, 4, 5, 6]
    assert cli.parse_seed_range("1,4,9") == [1, 4, 9]
    with pytest.raises(Exception):
        cli.parse_seed_range("5..2")


def test_cli_preset_list_and_dump(capsys):
    assert cli.main(["preset", "--list"]) == 0
    assert "paper-fig5" in capsys.readouterr().out
    assert cli.main(["preset", "paper-fig3", "--dump"]) == 0
    assert load_scenario(capsys.readouterr().out) == PRESETS["paper-fig3"]


def test_cli_run_and_check(tmp_path, capsys):
    assert cli.main(["preset", "paper-fig5", "--out-dir", str(tmp_path), "--check"]) == 0
    assert "final_consensus_error" in capsys.readouterr().out
    assert (tmp_path / "trace.csv").exists()
    # too few rounds to converge: the check fails
    code = cli.main(["run", "paper-fig5", "--horizon", "20", "--out-dir", str(tmp_path / "short"), "--check"])
    assert code == 1
    code = cli.main(["run", "paper-fig5", "--horizon", "20", "--out-dir", str(tmp_path / "short")])
    assert code == 0


def test_cli_env_out_dir(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(OUT_DIR_ENV, str(tmp_path))
    assert cli.main(["run", SMALL, "--seed", "9"]) == 0
    assert (tmp_path / "tiny" / "summary.txt").exists()


def test_cli_errors_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("schema_version: 1\nprotocol: nope\n")
    assert cli.main(["run", str(bad)]) == 2
    assert "invalid scenario" in capsys.readouterr().err
    assert cli.main(["run", "missing-file"]) == 2
    empty = tmp_path / "empty.yaml"
    empty.write_text("")
    assert cli.main(["run", str(empty)]) == 2


def test_cli_indist_and_sweep(tmp_path, capsys):
    code = cli.main(["indist", "paper-fig5", "--trials", "10", "--horizon", "40",
                     "--out-dir", str(tmp_path), "--check"])
    assert code == 0
    assert "fail = 0" in capsys.readouterr().out
    code = cli.main(["sweep", "paper-fig6", "--seeds", "0..9", "--horizon", "60",
                     "--out-dir", str(tmp_path), "--check"])
    out = capsys.readouterr().out
    assert code == 0 and "nondecreasing in noise scale: True" in out
    assert len((tmp_path / "sweep.csv").read_text().splitlines()) == 1 + 10 * 3
