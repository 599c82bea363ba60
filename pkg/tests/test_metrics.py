from fractions import Fraction

import pytest
from hypothesis import given

from oracles import tick_sim
from strategies import as_rows, workloads

from conftest import make_workload
from schedsim import POLICY_NAMES, SimConfig, run
from schedsim.metrics import (IncompleteTrace, MismatchedSuites, compare, compute,
                              format_comparison_csv, format_comparison_text, format_metrics,
                              response_reduction)

# Hand-simulated tables.  RR, quantum 1000, two 2500-tick jobs at t=0:
#   A runs [0,1000) [2000,3000) [4000,4500); B runs [1000,2000) [3000,4000) [4500,5000)
RR_FIXTURE = {
    0: dict(response=0, turnaround=4500, waiting=2000, completion=4500, met_deadline=True),
    1: dict(response=1000, turnaround=5000, waiting=2500, completion=5000, met_deadline=True),
}
RR_SUMMARY = dict(cpu_utilization=Fraction(1), overall_turnaround=5000, avg_response=Fraction(500),
                  avg_turnaround=Fraction(4750), avg_waiting=Fraction(2250), miss_ratio=Fraction(0),
                  total_value=Fraction(2))
# EDF: A(dl 8000) and B(dl 4000) at t=0, bursts 2000: B [0,2000), A [2000,4000)
EDF_FIXTURE = {
    0: dict(response=2000, turnaround=4000, waiting=2000, completion=4000, met_deadline=True),
    1: dict(response=0, turnaround=2000, waiting=0, completion=2000, met_deadline=True),
}
EDF_SUMMARY = dict(cpu_utilization=Fraction(1), overall_turnaround=4000, avg_response=Fraction(1000),
                   avg_turnaround=Fraction(3000), avg_waiting=Fraction(1000), miss_ratio=Fraction(0),
                   total_value=Fraction(2))

RR_WORKLOAD = make_workload((0, 2500, 90_000), (0, 2500, 90_000), name="rr2")
EDF_WORKLOAD = make_workload((0, 2000, 8000), (0, 2000, 4000), name="edf2")


def _check_fixture(report, per_job, summary):
    for m in report.per_job:
        for key, value in per_job[m.job_id].items():
            assert getattr(m, key) == value, (m.job_id, key)
    for key, value in summary.items():
        assert getattr(report, key) == value, key


def test_rr_fixture():
    report = compute(*run(RR_WORKLOAD, "rr", SimConfig(rr_quantum=1000)))
    _check_fixture(report, RR_FIXTURE, RR_SUMMARY)


def test_edf_fixture():
    report = compute(*run(EDF_WORKLOAD, "edf"))
    _check_fixture(report, EDF_FIXTURE, EDF_SUMMARY)


@pytest.mark.parametrize("workload, policy, fixture", [
    (RR_WORKLOAD, "rr", RR_FIXTURE), (EDF_WORKLOAD, "edf", EDF_FIXTURE)])
def test_fixtures_agree_with_tick_reference(workload, policy, fixture):
    _, first, done = tick_sim(as_rows(workload), policy, 1000)
    for jid, row in fixture.items():
        assert row["response"] == first[jid]
        assert row["completion"] == done[jid]


def test_single_job_metrics():
    w = make_workload((0, 3000, 3000), name="single_job")
    m = compute(*run(w, "edf", SimConfig(dispatch_latency=1000)))
    job = m.per_job[0]
    assert (job.response, job.turnaround, job.waiting, job.met_deadline) == (1000, 4000, 1000, False)
    assert m.cpu_utilization == Fraction(3, 4)
    assert job.value_accrued == 0 and m.miss_ratio == 1


def test_single_job_no_latency():
    m = compute(*run(make_workload((0, 3000, 3000)), "fcfs"))
    job = m.per_job[0]
    assert (job.response, job.waiting, job.turnaround) == (0, 0, 3000)
    assert m.cpu_utilization == 1


def test_aborted_before_dispatch_has_no_response():
    w = make_workload((0, 3000, 3000, 10), (0, 3000, 2500, 1))
    m = compute(*run(w, "dasa"))
    assert m.per_job[1].response is None and m.per_job[1].turnaround is None
    assert m.misses == 1 and m.avg_response == 0 and m.total_value == 10


def test_incomplete_trace_detected():
    trace, states = run(make_workload((0, 3000, 9000)), "edf")
    trace.makespan = 10
    with pytest.raises(IncompleteTrace):
        compute(trace, states)


@pytest.mark.parametrize("policy", POLICY_NAMES)
@given(w=workloads(values=True))
def test_metric_identities(policy, w):
    trace, states = run(w, policy)
    m = compute(trace, states)
    assert compute(trace, states) == m
    for j in m.per_job:
        if j.turnaround is not None:
            assert j.turnaround == j.waiting + j.burst
            assert j.waiting >= 0 and j.response <= j.turnaround
        assert j.value_accrued == (j.value if j.met_deadline else 0)
    assert m.cpu_utilization * trace.makespan + trace.idle + trace.latency_ticks == trace.makespan
    assert m.miss_ratio == Fraction(m.misses, len(m.per_job))


def _report(workload, policy, responses):
    from schedsim import TaskSpec, Workload

    tasks = tuple(TaskSpec(i, 0, 1, 10 ** 6) for i in range(len(responses)))
    w = Workload(tasks, name=workload)
    trace, states = run(w, "fcfs")
    trace.policy = policy
    base = compute(trace, states)
    per_job = tuple(type(j)(**{**j.__dict__, "response": r}) for j, r in zip(base.per_job, responses))
    return type(base)(**{**base.__dict__, "per_job": per_job,
                         "avg_response": Fraction(sum(responses), len(responses))})


def test_reduction_arithmetic():
    assert response_reduction(Fraction(750), Fraction(1000)) == Fraction(1, 4)
    assert response_reduction(Fraction(5), Fraction(5)) == 0
    assert response_reduction(None, Fraction(5)) is None
    assert response_reduction(Fraction(0), Fraction(0)) == 0


def test_compare_rows_and_weighted_aggregate():
    reports = [
        _report("c1", "nmlfq", [750, 750]), _report("c1", "dasa", [1000, 1000]),
        _report("c2", "nmlfq", [100, 200, 300, 400]), _report("c2", "dasa", [400, 400, 400, 400]),
    ]
    table = compare(reports)
    assert table.reference == "nmlfq"
    assert table.reduction("dasa", "c1") == Fraction(1, 4)
    assert table.reduction("nmlfq", "c1") == 0
    agg = table.aggregate_row("nmlfq")
    assert agg.avg_response == Fraction(750 * 2 + 1000, 6)
    assert table.aggregate_row("dasa").avg_response == Fraction(2000 + 1600, 6)
    assert len(table.rows) == 4 and len(table.aggregate) == 2
    assert table.response_min["nmlfq"] == 250 and table.response_max["dasa"] == 1000
    assert "ALL" in format_comparison_csv(table)
    assert "25.0%" in format_comparison_text(table)


def test_compare_identical_reports():
    r = _report("c1", "lbesa", [10, 20])
    s = _report("c1", "lbesa#2", [10, 20])
    table = compare([r, s], reference="lbesa")
    assert table.reduction("lbesa#2") == 0


def test_compare_mismatch():
    with pytest.raises(MismatchedSuites):
        compare([_report("c1", "nmlfq", [1]), _report("c1", "dasa", [1]), _report("c2", "nmlfq", [1])])
    with pytest.raises(MismatchedSuites):
        compare([_report("c1", "nmlfq", [1]), _report("c1", "nmlfq", [2])])
    with pytest.raises(MismatchedSuites):
        compare([])


def test_metrics_csv_layout():
    text = format_metrics(compute(*run(EDF_WORKLOAD, "edf")))
    lines = text.splitlines()
    assert lines[0].startswith("job_id,arrival,burst,deadline,value")
    assert lines[3] == "#summary"
    assert "avg_response,1000" in lines
