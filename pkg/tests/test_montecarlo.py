import dataclasses
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from onoff_mud.montecarlo import (
    AggregateResult,
    ExperimentSpec,
    MRow,
    find_crossing,
    run_experiment,
    run_trial,
    wilson_half_width,
    wilson_interval,
)


def synthetic(points):
    rows = []
    for m, p in points:
        md = int(round(p * 100_000))
        rows.append(MRow(m, 1000, md, 100_000, 0, 900_000, 0))
    return AggregateResult(ExperimentSpec(m_values=[m for m, _ in points]), rows)


def test_ml_noiseless_trial_is_exact():
    spec = ExperimentSpec(n=10, detector="ml", activity="fixed", k=2, snr=4.0, noise=False)
    for t in range(20):
        c = run_trial(spec, 3, t)
        assert c.exact
        assert (c.md_count, c.active_count, c.fa_count, c.inactive_count) == (0, 2, 0, 8)


def test_empty_support_trial():
    spec = ExperimentSpec(n=20, detector="sud", activity="fixed", k=0, snr=1.0)
    c = run_trial(spec, 30, 0)
    assert c.md_count == 0 and c.active_count == 0
    assert c.inactive_count == 20


def test_trial_is_deterministic():
    spec = ExperimentSpec(n=50, detector="seqomp", profile="robust", master_seed=3)
    assert run_trial(spec, 40, 7) == run_trial(spec, 40, 7)
    outcomes = {run_trial(spec, 40, t) for t in range(10)}
    assert len(outcomes) > 1


@pytest.mark.parametrize("detector", ["sud", "seqomp", "omp", "lasso"])
def test_counts_are_bounded(detector):
    spec = ExperimentSpec(n=40, activity_probability=0.2, snr=10.0, detector=detector, profile="robust")
    for t in range(15):
        c = run_trial(spec, 24, t)
        assert 0 <= c.md_count <= c.active_count
        assert 0 <= c.fa_count <= c.inactive_count
        assert c.active_count + c.inactive_count == 40
        assert c.exact == (c.md_count == 0 and c.fa_count == 0)


def test_spec_validation():
    with pytest.raises(ValueError):
        ExperimentSpec(trials=0)
    with pytest.raises(ValueError):
        ExperimentSpec(detector="bp")
    with pytest.raises(ValueError):
        ExperimentSpec(activity_probability=1.5)
    with pytest.raises(ValueError):
        ExperimentSpec(activity="fixed", k=200)
    with pytest.raises(ValueError):
        ExperimentSpec(m_values=[0])


def test_from_db():
    assert ExperimentSpec.from_db(20.0).snr == pytest.approx(100.0)


def test_detection_order():
    spec = ExperimentSpec(n=5, activity_probability=0.5, snr=10.0, profile="exponential")
    prof = spec.power_profile()
    assert spec.detection_order(prof).tolist() == [0, 1, 2, 3, 4]
    asc = dataclasses.replace(spec, order="ascending")
    assert asc.detection_order(prof).tolist() == [4, 3, 2, 1, 0]
    # ties keep natural order
    const = dataclasses.replace(spec, profile="constant")
    assert const.detection_order(const.power_profile()).tolist() == [0, 1, 2, 3, 4]


def test_aggregate_matches_trial_sums():
    spec = ExperimentSpec(n=30, activity_probability=0.2, snr=20.0, m_values=[15, 25], trials=37)
    res = run_experiment(spec, workers=1, chunk_size=10)
    for m in spec.m_values:
        counts = [run_trial(spec, m, t) for t in range(spec.trials)]
        row = res.row(m)
        assert row.md_count == sum(c.md_count for c in counts)
        assert row.active_count == sum(c.active_count for c in counts)
        assert row.fa_count == sum(c.fa_count for c in counts)
        assert row.exact_count == sum(c.exact for c in counts)
        assert row.p_md == row.md_count / row.active_count


def test_chunking_and_workers_do_not_change_result():
    spec = ExperimentSpec(n=40, activity_probability=0.1, m_values=[20, 30], trials=50, detector="seqomp")
    ref = run_experiment(spec, workers=1, chunk_size=50).to_csv()
    assert run_experiment(spec, workers=1, chunk_size=7).to_csv() == ref
    assert run_experiment(spec, workers=2, chunk_size=9).to_csv() == ref


def test_env_var_sets_workers(monkeypatch):
    from onoff_mud import montecarlo

    monkeypatch.setenv(montecarlo.WORKERS_ENV, "3")
    assert montecarlo.default_workers() == 3
    monkeypatch.setenv(montecarlo.WORKERS_ENV, "0")
    with pytest.raises(ValueError):
        montecarlo.default_workers()
    monkeypatch.delenv(montecarlo.WORKERS_ENV)
    assert montecarlo.default_workers() == 1


def test_no_active_users_reports_absent_pmd():
    spec = ExperimentSpec(n=10, activity="fixed", k=0, snr=1.0, m_values=[12], trials=5)
    res = run_experiment(spec)
    assert res.row(12).p_md is None
    assert res.row(12).p_md_ci is None
    line = res.to_csv().splitlines()[1]
    assert line.startswith("12,,,")
    assert json.loads(res.to_json())["rows"][0]["p_md"] is None


def test_csv_and_json_agree():
    spec = ExperimentSpec(n=30, activity_probability=0.2, snr=20.0, m_values=[10, 20], trials=20)
    res = run_experiment(spec)
    lines = res.to_csv().splitlines()
    assert lines[0] == "m,p_md,p_md_ci,p_fa,p_fa_ci,exact_rate,trials"
    records = json.loads(res.to_json())["rows"]
    for line, rec in zip(lines[1:], records):
        fields = line.split(",")
        assert int(fields[0]) == rec["m"]
        assert float(fields[1]) == rec["p_md"]
        assert float(fields[4]) == rec["p_fa_ci"]
        assert int(fields[6]) == rec["trials"]


def test_find_crossing_interpolates_in_log():
    res = synthetic([(50, 0.1), (70, 0.001)])
    assert find_crossing(res, 0.01) == pytest.approx(60.0, rel=1e-12)


def test_find_crossing_exact_hit():
    res = synthetic([(40, 0.2), (50, 0.01), (60, 0.001)])
    assert find_crossing(res, 0.01) == 50.0


def test_find_crossing_to_zero():
    res = synthetic([(40, 0.02), (50, 0.0)])
    assert find_crossing(res, 0.01) == pytest.approx(45.0)


def test_find_crossing_no_bracket():
    with pytest.raises(ValueError):
        find_crossing(synthetic([(40, 0.2), (50, 0.1)]), 0.01)
    with pytest.raises(ValueError):
        find_crossing(synthetic([(40, 0.005), (50, 0.001)]), 0.01)


def test_wilson_against_scipy():
    for k, n in [(0, 100), (3, 1000), (50, 100), (1000, 1000)]:
        lo, hi = wilson_interval(k, n)
        ref = stats.binomtest(k, n).proportion_ci(0.95, method="wilson")
        assert lo == pytest.approx(ref.low, abs=1e-12)
        assert hi == pytest.approx(ref.high, abs=1e-12)
    assert wilson_half_width(1, 0) is None


@settings(max_examples=200, deadline=None)
@given(n=st.integers(1, 10**6), frac=st.floats(0, 1))
def test_wilson_interval_inside_unit(n, frac):
    k = int(frac * n)
    lo, hi = wilson_interval(k, n)
    assert -1e-12 <= lo <= k / n <= hi <= 1 + 1e-12


@pytest.mark.slow
def test_pmd_decreases_with_m():
    spec = ExperimentSpec.from_db(
        20.0, n=100, activity_probability=0.1, detector="seqomp", m_values=range(60, 181, 20), trials=300
    )
    p = np.array([r.p_md for r in run_experiment(spec).rows])
    # smooth with a 3-point moving average before checking the trend
    smooth = np.convolve(p, np.ones(3) / 3, mode="valid")
    assert np.all(np.diff(smooth) <= 0)
    assert stats.spearmanr(spec.m_values, p).statistic < -0.9
