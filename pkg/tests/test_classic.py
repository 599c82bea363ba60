import pytest
from hypothesis import given

from oracles import demand_ok, tick_sim
from strategies import as_rows, workloads

from conftest import make_workload
from schedsim import JobState, JobStatus, SimConfig, TaskSpec, run
from schedsim.metrics import compute
from schedsim.policies import RrConfig, edf_select, fcfs_select, rr_select


def job(id, arrival=0, burst=1000, deadline=10_000):
    j = JobState(TaskSpec(id, arrival, burst, deadline))
    j.state = JobStatus.READY
    return j


def test_edf_picks_nearest_deadline():
    assert edf_select([job(0, deadline=5000), job(1, deadline=4000)], 0) == 1


def test_edf_tie_breaks_by_arrival_then_id():
    assert edf_select([job(1, deadline=4000), job(0, deadline=4000)], 0) == 0
    assert edf_select([job(0, arrival=5, deadline=4000), job(1, arrival=0, deadline=4000)], 10) == 1


def test_edf_overload_misses_exactly_one():
    w = make_workload((0, 3000, 3000), (0, 3000, 3100))
    trace, states = run(w, "edf")
    assert [tuple(s) for s in trace.segments] == [(0, 0, 3000), (1, 3000, 6000)]
    report = compute(trace, states)
    assert report.misses == 1 and not report.per_job[1].met_deadline
    assert states[1].state is JobStatus.COMPLETED


def test_fcfs_picks_earliest_arrival():
    assert fcfs_select([job(1, arrival=10), job(0, arrival=0)], 20) == 0


def test_fcfs_is_non_preemptive():
    w = make_workload((0, 3000, 90_000), (10, 100, 200))
    trace, _ = run(w, "fcfs")
    assert [tuple(s) for s in trace.segments] == [(0, 0, 3000), (1, 3000, 3100)]


def test_rr_select_grants_quantum():
    assert rr_select([job(3), job(1)], 0, RrConfig(250)) == (3, 250)
    with pytest.raises(ValueError):
        RrConfig(0)


def test_rr_two_jobs_alternate():
    w = make_workload((0, 2500, 90_000), (0, 2500, 90_000))
    trace, _ = run(w, "rr", SimConfig(rr_quantum=1000))
    expected, _, _ = tick_sim(as_rows(w), "rr", 1000)
    got = [tuple(s) for s in trace.segments]
    assert got == expected
    assert [s[0] for s in got] == [0, 1, 0, 1, 0, 1]
    assert got[-2][2] - got[-2][1] == 500 and got[-1][2] - got[-1][1] == 500


def test_rr_single_job_back_to_back_quanta():
    trace, states = run(make_workload((0, 3500, 90_000)), "rr")
    assert [r.time for r in trace.events if r.kind == "QuantumExpiry"] == [1000, 2000, 3000]
    assert states[0].completion == 3500 and trace.idle == 0


def _ready_at(states, trace, t):
    end = {}
    for r in trace.events:
        if r.kind in ("Completion", "Abort") and r.time <= t:
            end[r.job_id] = r.time
    return [j for j in states.values() if j.spec.arrival <= t and j.id not in end]


@given(w=workloads())
def test_edf_dispatch_invariant(w):
    trace, states = run(w, "edf")
    for r in trace.events:
        if r.kind == "Select" and r.job_id is not None:
            chosen = states[r.job_id]
            assert all(chosen.edf_key <= other.edf_key for other in _ready_at(states, trace, r.time))


@given(w=workloads())
def test_edf_optimal_against_demand_oracle(w):
    _, states = run(w, "edf")
    missed = any(j.completion > j.spec.deadline for j in states.values())
    assert missed == (not demand_ok(as_rows(w)))
