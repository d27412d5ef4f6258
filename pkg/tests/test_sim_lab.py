import csv
import io

import pytest

from qcmdpc.decoder import DecoderConfig, FixedPerIteration, MaxMinusDelta, SyndromeWeightStep, bundled_step
from qcmdpc.sim_lab import ExperimentConfig, ExperimentReport, replay_instance, report_table, run_experiment

from conftest import TOY


@pytest.fixture(scope="module")
def step_cfg():
    return DecoderConfig(SyndromeWeightStep(bundled_step(TOY)), max_iterations=9)


@pytest.fixture(scope="module")
def report(step_cfg):
    return run_experiment(ExperimentConfig(TOY, step_cfg, n_codes=3, n_trials_per_code=200, seed=11, label="step"))


def test_zero_error_instance(step_cfg):
    rep = run_experiment(ExperimentConfig(TOY, step_cfg, n_codes=1, n_trials_per_code=1, error_weight=0))
    assert rep.counts == {0: 1}
    assert rep.proportions() == {0: 1.0, "inf": 0.0}


def test_histogram_conservation(report):
    assert report.total == 3 * 200
    assert sum(report.executed_sweeps.values()) == 600
    assert abs(sum(report.proportions().values()) - 1) < 1e-9
    assert report.failures == 0


def test_replay_matches_tally(step_cfg, report):
    cfg = ExperimentConfig(TOY, step_cfg, n_codes=3, n_trials_per_code=200, seed=11)
    replayed = {}
    for code in range(3):
        for trial in range(200):
            ok, trace = replay_instance(cfg, code, trial)
            assert ok and trace.records == []
            replayed[trace.iterations] = replayed.get(trace.iterations, 0) + 1
    assert replayed == report.counts


def test_deterministic_across_workers(step_cfg, tmp_path):
    base = dict(n_codes=2, n_trials_per_code=60, seed=5)
    one = run_experiment(ExperimentConfig(TOY, step_cfg, workers=1, trace_path=tmp_path / "a.csv", **base))
    many = run_experiment(ExperimentConfig(TOY, step_cfg, workers=3, trace_path=tmp_path / "b.csv", **base))
    assert one.to_csv() == many.to_csv()
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_failures_counted(step_cfg):
    cfg = DecoderConfig(FixedPerIteration((15,)), max_iterations=2)
    rep = run_experiment(ExperimentConfig(TOY, cfg, n_codes=1, n_trials_per_code=30, error_weight=40))
    assert rep.failures == 30 and rep.counts == {}
    assert rep.to_csv().splitlines() == ["iterations,count,proportion", "inf,30,1"]


def test_constant_time_reports_effective_iterations(step_cfg):
    from dataclasses import replace

    base = dict(n_codes=1, n_trials_per_code=50, seed=2)
    plain = run_experiment(ExperimentConfig(TOY, step_cfg, **base))
    ct = run_experiment(ExperimentConfig(TOY, replace(step_cfg, constant_time=True), **base))
    assert plain.to_csv() == ct.to_csv()
    assert ct.executed_sweeps == {9: 50}


def test_csv_roundtrip(report):
    text = report.to_csv()
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["iterations", "count", "proportion"]
    assert rows[-1][0] == "inf"
    assert [int(r[0]) for r in rows[1:-1]] == list(range(report.max_iterations + 1))
    back = ExperimentReport.from_csv(text)
    assert back.counts == report.counts and back.failures == report.failures
    assert back.to_csv() == text


def test_report_table_single():
    rep = ExperimentReport({3: 1})
    text, table = report_table([rep], ["only"])
    rows = list(csv.reader(io.StringIO(table)))
    assert rows[0] == ["iterations", "only"]
    nonzero = [r for r in rows[1:] if float(r[1]) > 0]
    assert nonzero == [["3", "1"]]
    assert "1 instances" in text


def test_report_table_merged(report):
    other = run_experiment(ExperimentConfig(TOY, DecoderConfig(MaxMinusDelta(1), max_iterations=12),
                                            n_codes=1, n_trials_per_code=100, seed=3, label="maxdelta"))
    text, table = report_table([report, other])
    rows = list(csv.reader(io.StringIO(table)))
    assert rows[0] == ["iterations", "step", "maxdelta"]
    top = max(report.max_iterations, other.max_iterations)
    assert [r[0] for r in rows[1:]] == [str(k) for k in range(top + 1)] + ["inf"]
    for col in (1, 2):
        assert abs(sum(float(r[col]) for r in rows[1:]) - 1) < 1e-9
    assert "maxdelta" in text.splitlines()[0]


def test_config_validation(step_cfg):
    with pytest.raises(ValueError):
        ExperimentConfig(TOY, step_cfg, n_codes=0)
    with pytest.raises(ValueError):
        ExperimentConfig(TOY, step_cfg, n_trials_per_code=0)
